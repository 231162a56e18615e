//! Named surface syntax and its printer. Printing then parsing gives back
//! the same tree.

use std::fmt;

use super::lexer::Pos;

/// Words that cannot name variables, types, terms or contexts.
pub const KEYWORDS: [&str; 8] = ["ctx", "type", "term", "in", "Pi", "Sigma", "eval", "check"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurfaceType {
    /// `{n}`
    Discrete(usize),
    /// `Pi(x:A) B`
    Pi(String, Box<SurfaceType>, Box<SurfaceType>),
    /// `Sigma(x:A) B`
    Sigma(String, Box<SurfaceType>, Box<SurfaceType>),
    /// A declared type.
    Ref(String),
    /// A type document on disk.
    File(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurfaceTerm {
    Var(String),
    /// `\x. t`
    Lam(String, Box<SurfaceTerm>),
    App(Box<SurfaceTerm>, Box<SurfaceTerm>),
    /// `(t, u)`
    Pair(Box<SurfaceTerm>, Box<SurfaceTerm>),
    /// `t.1`
    Proj1(Box<SurfaceTerm>),
    /// `t.2`
    Proj2(Box<SurfaceTerm>),
    /// `#n`, an element of a discrete type.
    Lit(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatRef {
    Builtin(String),
    File(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CtxExpr {
    /// `empty(C)`: the terminal presheaf, one element everywhere.
    Empty(CatRef),
    /// `yoneda(C, x)`
    Yoneda(CatRef, String),
    /// A presheaf document on disk.
    File(String),
}

/// `H, x:A, y:B`: a declared context extended by named binders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtxSpec {
    pub base: String,
    pub binders: Vec<(String, SurfaceType)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Ctx {
        name: String,
        expr: CtxExpr,
    },
    Type {
        name: String,
        ty: SurfaceType,
        ctx: CtxSpec,
    },
    Term {
        name: String,
        ty: SurfaceType,
        tm: SurfaceTerm,
        ctx: CtxSpec,
    },
    /// Print the full table of a declared term.
    Eval(String),
    /// Validate a declared term and its type.
    Check(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub pos: Pos,
    pub decl: Decl,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Script {
    pub items: Vec<Item>,
}

impl Script {
    pub fn decls(&self) -> impl Iterator<Item = &Decl> {
        self.items.iter().map(|i| &i.decl)
    }
}

impl fmt::Display for SurfaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceType::Discrete(n) => write!(f, "{{{n}}}"),
            SurfaceType::Pi(x, a, b) => write!(f, "Pi({x}:{a}) {b}"),
            SurfaceType::Sigma(x, a, b) => write!(f, "Sigma({x}:{a}) {b}"),
            SurfaceType::Ref(n) => f.write_str(n),
            SurfaceType::File(p) => write!(f, "\"{p}\""),
        }
    }
}

/// Binding strength: lambdas extend right, application is left-nested,
/// projections are postfix.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Lam,
    App,
    Postfix,
}

fn write_tm(t: &SurfaceTerm, at: Prec, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let own = match t {
        SurfaceTerm::Lam(..) => Prec::Lam,
        SurfaceTerm::App(..) => Prec::App,
        _ => Prec::Postfix,
    };
    if own < at {
        f.write_str("(")?;
        write_tm(t, Prec::Lam, f)?;
        return f.write_str(")");
    }
    match t {
        SurfaceTerm::Var(x) => f.write_str(x),
        SurfaceTerm::Lit(n) => write!(f, "#{n}"),
        SurfaceTerm::Lam(x, b) => {
            write!(f, "\\{x}. ")?;
            write_tm(b, Prec::Lam, f)
        }
        SurfaceTerm::App(g, a) => {
            write_tm(g, Prec::App, f)?;
            f.write_str(" ")?;
            write_tm(a, Prec::Postfix, f)
        }
        SurfaceTerm::Pair(l, r) => {
            f.write_str("(")?;
            write_tm(l, Prec::Lam, f)?;
            f.write_str(", ")?;
            write_tm(r, Prec::Lam, f)?;
            f.write_str(")")
        }
        SurfaceTerm::Proj1(t) => {
            write_tm(t, Prec::Postfix, f)?;
            f.write_str(".1")
        }
        SurfaceTerm::Proj2(t) => {
            write_tm(t, Prec::Postfix, f)?;
            f.write_str(".2")
        }
    }
}

impl fmt::Display for SurfaceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tm(self, Prec::Lam, f)
    }
}

impl fmt::Display for CatRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatRef::Builtin(n) => f.write_str(n),
            CatRef::File(p) => write!(f, "\"{p}\""),
        }
    }
}

impl fmt::Display for CtxExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CtxExpr::Empty(c) => write!(f, "empty({c})"),
            CtxExpr::Yoneda(c, x) => write!(f, "yoneda({c}, {x})"),
            CtxExpr::File(p) => write!(f, "\"{p}\""),
        }
    }
}

impl fmt::Display for CtxSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.base)?;
        for (x, a) in &self.binders {
            write!(f, ", {x}:{a}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decl::Ctx { name, expr } => write!(f, "ctx {name} = {expr}"),
            Decl::Type { name, ty, ctx } => write!(f, "type {name} = {ty} in {ctx}"),
            Decl::Term { name, ty, tm, ctx } => write!(f, "term {name} : {ty} = {tm} in {ctx}"),
            Decl::Eval(n) => write!(f, "eval {n}"),
            Decl::Check(n) => write!(f, "check {n}"),
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.decls() {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

pub fn print_surface(t: &SurfaceTerm) -> String {
    t.to_string()
}
