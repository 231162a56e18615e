//! Elaboration of named syntax into the name-free calculus, where the only
//! variable is `q` and weakening is substitution along `p`.

use std::fmt;

use super::ast::{SurfaceTerm, SurfaceType};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Combinator {
    /// The last variable of the context.
    Q,
    /// `(t)p`: `t` read in the context without its last entry.
    Wk(Box<Combinator>),
    Lam(Box<Combinator>),
    App(Box<Combinator>, Box<Combinator>),
    Pair(Box<Combinator>, Box<Combinator>),
    Fst(Box<Combinator>),
    Snd(Box<Combinator>),
    Lit(usize),
    /// A declared term, in the context it was declared in.
    Global(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CombTy {
    Discrete(usize),
    /// `Pi(A, B)` with `B` one entry deeper.
    Pi(Box<CombTy>, Box<CombTy>),
    Sigma(Box<CombTy>, Box<CombTy>),
    /// A declared type, in the context it was declared in.
    Ref(String),
    /// A type document on disk, read in the current context.
    File(String),
    /// `(A)p`
    Wk(Box<CombTy>),
}

impl Combinator {
    /// `t` under `n` weakenings.
    pub fn weakened(self, n: usize) -> Self {
        (0..n).fold(self, |t, _| Combinator::Wk(Box::new(t)))
    }
}

impl CombTy {
    pub fn weakened(self, n: usize) -> Self {
        (0..n).fold(self, |t, _| CombTy::Wk(Box::new(t)))
    }
}

impl fmt::Display for Combinator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Combinator::Q => f.write_str("q"),
            Combinator::Wk(t) => write!(f, "({t})p"),
            Combinator::Lam(b) => write!(f, "lam({b})"),
            Combinator::App(g, a) => write!(f, "app({g}, {a})"),
            Combinator::Pair(l, r) => write!(f, "pair({l}, {r})"),
            Combinator::Fst(t) => write!(f, "fst({t})"),
            Combinator::Snd(t) => write!(f, "snd({t})"),
            Combinator::Lit(n) => write!(f, "#{n}"),
            Combinator::Global(n) => f.write_str(n),
        }
    }
}

impl fmt::Display for CombTy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CombTy::Discrete(n) => write!(f, "{{{n}}}"),
            CombTy::Pi(a, b) => write!(f, "Pi({a}, {b})"),
            CombTy::Sigma(a, b) => write!(f, "Sigma({a}, {b})"),
            CombTy::Ref(n) => f.write_str(n),
            CombTy::File(p) => write!(f, "\"{p}\""),
            CombTy::Wk(t) => write!(f, "({t})p"),
        }
    }
}

pub fn print_combinator(c: &Combinator) -> String {
    c.to_string()
}

/// A name bound in scope. Binders from a context declaration or a `Pi`/`Sigma`
/// carry their surface type; lambda binders do not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binder {
    pub name: String,
    pub ty: Option<SurfaceType>,
}

/// A declaration visible to later ones: declared over `base` extended by
/// `binders`.
#[derive(Clone, Debug)]
pub struct Global {
    pub name: String,
    pub base: String,
    pub binders: Vec<(String, SurfaceType)>,
}

/// Names in scope: the base context, its binders innermost last, and the
/// declarations made so far.
#[derive(Clone, Debug)]
pub struct Scope<'a> {
    pub base: &'a str,
    pub binders: Vec<Binder>,
    pub types: &'a [Global],
    pub terms: &'a [Global],
}

impl Scope<'_> {
    fn trace(&self) -> String {
        let names: Vec<&str> = self.binders.iter().map(|b| b.name.as_str()).collect();
        if names.is_empty() {
            format!("in scope: {} (no variables)", self.base)
        } else {
            format!("in scope: {}, {}", self.base, names.join(", "))
        }
    }

    fn with(&self, name: &str, ty: Option<SurfaceType>) -> Self {
        let mut s = self.clone();
        s.binders.push(Binder {
            name: name.to_string(),
            ty,
        });
        s
    }

    /// Weakenings needed to bring `g` into this scope, if it is visible:
    /// same base and its binders a prefix of ours.
    fn reach(&self, g: &Global) -> Option<usize> {
        if g.base != self.base || g.binders.len() > self.binders.len() {
            return None;
        }
        let prefix = g
            .binders
            .iter()
            .zip(&self.binders)
            .all(|((x, a), b)| *x == b.name && b.ty.as_ref() == Some(a));
        prefix.then(|| self.binders.len() - g.binders.len())
    }

    fn global<'g>(&self, pool: &'g [Global], name: &str) -> Option<&'g Global> {
        pool.iter().find(|g| g.name == name)
    }

    pub fn ty(&self, t: &SurfaceType) -> Result<CombTy> {
        Ok(match t {
            SurfaceType::Discrete(n) => CombTy::Discrete(*n),
            SurfaceType::Pi(x, a, b) => CombTy::Pi(
                Box::new(self.ty(a)?),
                Box::new(self.with(x, Some((**a).clone())).ty(b)?),
            ),
            SurfaceType::Sigma(x, a, b) => CombTy::Sigma(
                Box::new(self.ty(a)?),
                Box::new(self.with(x, Some((**a).clone())).ty(b)?),
            ),
            SurfaceType::File(p) => CombTy::File(p.clone()),
            SurfaceType::Ref(n) => {
                let g = self.global(self.types, n).ok_or_else(|| {
                    Error::Scope(format!("unknown type `{n}` ({})", self.trace()))
                })?;
                let k = self.reach(g).ok_or_else(|| {
                    Error::Scope(format!(
                        "type `{n}` is declared in {} and is not visible here ({})",
                        spec_text(g),
                        self.trace()
                    ))
                })?;
                CombTy::Ref(n.clone()).weakened(k)
            }
        })
    }

    pub fn tm(&self, t: &SurfaceTerm) -> Result<Combinator> {
        Ok(match t {
            SurfaceTerm::Var(x) => {
                if let Some(i) = self.binders.iter().rev().position(|b| b.name == *x) {
                    // the i-th variable from the right is q under i weakenings
                    Combinator::Q.weakened(i)
                } else if let Some(g) = self.global(self.terms, x) {
                    let k = self.reach(g).ok_or_else(|| {
                        Error::Scope(format!(
                            "term `{x}` is declared in {} and is not visible here ({})",
                            spec_text(g),
                            self.trace()
                        ))
                    })?;
                    Combinator::Global(x.clone()).weakened(k)
                } else {
                    return Err(Error::Scope(format!(
                        "unbound variable `{x}` ({})",
                        self.trace()
                    )));
                }
            }
            SurfaceTerm::Lam(x, b) => Combinator::Lam(Box::new(self.with(x, None).tm(b)?)),
            SurfaceTerm::App(f, a) => Combinator::App(Box::new(self.tm(f)?), Box::new(self.tm(a)?)),
            SurfaceTerm::Pair(l, r) => {
                Combinator::Pair(Box::new(self.tm(l)?), Box::new(self.tm(r)?))
            }
            SurfaceTerm::Proj1(t) => Combinator::Fst(Box::new(self.tm(t)?)),
            SurfaceTerm::Proj2(t) => Combinator::Snd(Box::new(self.tm(t)?)),
            SurfaceTerm::Lit(n) => Combinator::Lit(*n),
        })
    }
}

fn spec_text(g: &Global) -> String {
    let mut s = g.base.clone();
    for (x, a) in &g.binders {
        s.push_str(&format!(", {x}:{a}"));
    }
    s
}

/// Elaborates `t` under the named context `names` (outermost first), with
/// no declarations in scope.
pub fn elaborate(names: &[&str], t: &SurfaceTerm) -> Result<Combinator> {
    let scope = Scope {
        base: "",
        binders: names
            .iter()
            .map(|n| Binder {
                name: n.to_string(),
                ty: None,
            })
            .collect(),
        types: &[],
        terms: &[],
    };
    scope.tm(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parser::parse_term;

    #[test]
    fn variables_follow_de_bruijn() {
        let xyz = ["x", "y", "z"];
        let show = |s: &str| print_combinator(&elaborate(&xyz, &parse_term(s).unwrap()).unwrap());
        assert_eq!(show("z"), "q");
        assert_eq!(show("y"), "(q)p");
        assert_eq!(show("x"), "((q)p)p");
        assert_eq!(show("\\w. x"), "lam((((q)p)p)p)");
        assert_eq!(show("\\x. x"), "lam(q)");
    }

    #[test]
    fn unbound_names_show_the_scope() {
        let Err(e) = elaborate(&["x"], &parse_term("y").unwrap()) else {
            panic!()
        };
        let m = e.to_string();
        assert!(m.contains("`y`") && m.contains("x"), "{m}");
    }
}
