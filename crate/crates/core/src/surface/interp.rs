//! Interpretation of elaborated scripts in the presheaf model.
//!
//! Every binder extends the context with `H.A`, and the only way back is
//! substitution along `p`: `(t)p` is `tm_subst(t, p)` and `(A)p` is
//! `ty_subst(A, p)`. Types keep their syntactic shape alongside the model
//! family so that lambdas, pairs and literals can be checked against them.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use serde_json::Value;

use super::ast::{CatRef, CtxExpr, CtxSpec, Decl, SurfaceType};
use super::elab::{Binder, CombTy, Combinator, Global, Scope};
use super::lexer::Pos;
use super::parser::parse_script;
use crate::catcore::{validate_category, FinCategory};
use crate::cwf::{
    ctx_extend, discrete_tm, discrete_ty, empty_ctx, proj_p_into, shift, sub_single, tm_subst,
    ty_subst, validate_tm, validate_ty, var_q_along, Ctx, Fiber, Sub, TmInCtx, TyInCtx,
};
use crate::formers::{
    app_tm, fst_tm, lambda_tm, pair_tm, pi_ty, sigma_ty, snd_tm, PiTy, SigmaTy, DEFAULT_PI_CAP,
};
use crate::io::{builtin_category, Loader};
use crate::par::Exec;
use crate::presheaf::{validate_presheaf, yoneda, FinSet};
use crate::report::Report;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct ScriptOptions {
    pub pi_cap: usize,
    pub exec: Exec,
}

impl Default for ScriptOptions {
    fn default() -> Self {
        Self {
            pi_cap: DEFAULT_PI_CAP,
            exec: Exec::default(),
        }
    }
}

/// A type in the model together with the former that built it.
#[derive(Clone, Debug)]
pub enum SemTy {
    Discrete {
        n: usize,
        ty: Arc<TyInCtx>,
    },
    /// A type read from disk.
    Plain(Arc<TyInCtx>),
    Pi {
        former: Arc<PiTy>,
        dom: Box<SemTy>,
        cod: Box<SemTy>,
    },
    Sigma {
        former: Arc<SigmaTy>,
        dom: Box<SemTy>,
        cod: Box<SemTy>,
    },
}

impl SemTy {
    pub fn ty(&self) -> &Arc<TyInCtx> {
        match self {
            SemTy::Discrete { ty, .. } | SemTy::Plain(ty) => ty,
            SemTy::Pi { former, .. } => &former.ty,
            SemTy::Sigma { former, .. } => &former.ty,
        }
    }

    /// `(A)sigma`, rebuilding formers so that `(Pi(A, B))sigma` is
    /// `Pi((A)sigma, (B)shift(sigma, A))`.
    pub fn subst(&self, sigma: &Sub, opts: ScriptOptions) -> Result<SemTy> {
        Ok(match self {
            SemTy::Discrete { n, ty } => SemTy::Discrete {
                n: *n,
                ty: Arc::new(ty_subst(ty, sigma)?),
            },
            SemTy::Plain(ty) => SemTy::Plain(Arc::new(ty_subst(ty, sigma)?)),
            SemTy::Pi { dom, cod, .. } => {
                let (dom, cod) = subst_family(dom, cod, sigma, opts)?;
                let former = pi_ty(dom.ty(), cod.ty(), opts.pi_cap, opts.exec)?;
                SemTy::Pi {
                    former: Arc::new(former),
                    dom: Box::new(dom),
                    cod: Box::new(cod),
                }
            }
            SemTy::Sigma { dom, cod, .. } => {
                let (dom, cod) = subst_family(dom, cod, sigma, opts)?;
                let former = sigma_ty(dom.ty(), cod.ty())?;
                SemTy::Sigma {
                    former: Arc::new(former),
                    dom: Box::new(dom),
                    cod: Box::new(cod),
                }
            }
        })
    }

    /// Short description for error messages.
    pub fn describe(&self) -> String {
        match self {
            SemTy::Discrete { n, .. } => format!("{{{n}}}"),
            SemTy::Plain(_) => "a loaded type".into(),
            SemTy::Pi { dom, cod, .. } => format!("Pi({}, {})", dom.describe(), cod.describe()),
            SemTy::Sigma { dom, cod, .. } => {
                format!("Sigma({}, {})", dom.describe(), cod.describe())
            }
        }
    }
}

fn subst_family(
    dom: &SemTy,
    cod: &SemTy,
    sigma: &Sub,
    opts: ScriptOptions,
) -> Result<(SemTy, SemTy)> {
    let dom2 = dom.subst(sigma, opts)?;
    let cod2 = cod.subst(&shift(sigma, dom.ty())?, opts)?;
    Ok((dom2, cod2))
}

/// `Some(n)` if `t` is the constant family on an `n`-element set.
pub fn discrete_size(t: &TyInCtx) -> Option<usize> {
    let mut n = None;
    for fiber in t.fibers().iter().flatten() {
        let Fiber::Atoms(s) = fiber else { return None };
        if *n.get_or_insert(s.len()) != s.len() {
            return None;
        }
    }
    let n = n?;
    let identity = t
        .morph_tables()
        .iter()
        .flatten()
        .all(|table| table.iter().enumerate().all(|(i, &j)| i == j));
    identity.then_some(n)
}

/// Swaps in `want`'s family once the types agree.
fn retype(m: TmInCtx, want: &SemTy, what: &str) -> Result<TmInCtx> {
    if **m.ty() == **want.ty() {
        Ok(TmInCtx::from_tables(want.ty().clone(), m.table().to_vec()))
    } else {
        Err(Error::TypeMismatch(format!(
            "{what} does not have type {}",
            want.describe()
        )))
    }
}

/// One entry of a context `H, x1:A1, ..., xn:An`. The base level has no
/// entry; every other level records its type and `p` back to the previous
/// level.
#[derive(Clone)]
struct Level {
    ctx: Arc<Ctx>,
    entry: Option<(SemTy, Sub)>,
}

fn extend(levels: &[Level], a: SemTy) -> Vec<Level> {
    let ext = Arc::new(ctx_extend(a.ty()));
    extend_into(levels, a, ext)
}

fn extend_into(levels: &[Level], a: SemTy, ext: Arc<Ctx>) -> Vec<Level> {
    let p = proj_p_into(a.ty(), &ext);
    let mut out = levels.to_vec();
    out.push(Level {
        ctx: ext,
        entry: Some((a, p)),
    });
    out
}

fn split(levels: &[Level]) -> Result<(&[Level], &SemTy, &Sub)> {
    match levels.split_last() {
        Some((
            Level {
                entry: Some((a, p)),
                ..
            },
            rest,
        )) => Ok((rest, a, p)),
        _ => Err(Error::Internal(
            "variable reaches past the base context".into(),
        )),
    }
}

fn here(levels: &[Level]) -> &Arc<Ctx> {
    &levels.last().expect("at least the base level").ctx
}

/// A declared term in the model.
#[derive(Clone, Debug)]
pub struct TermOut {
    pub name: String,
    pub pos: Pos,
    pub combinator: Combinator,
    pub ty_comb: CombTy,
    pub sem: SemTy,
    pub term: TmInCtx,
}

/// The result of an `eval` or `check` command.
#[derive(Clone, Debug)]
pub enum Output {
    Eval(String),
    Check { name: String, report: Report },
}

#[derive(Clone, Debug, Default)]
pub struct ScriptRun {
    pub terms: Vec<TermOut>,
    pub outputs: Vec<Output>,
}

impl ScriptRun {
    pub fn term(&self, name: &str) -> Option<&TermOut> {
        self.terms.iter().find(|t| t.name == name)
    }
}

struct Interp {
    loader: Loader,
    opts: ScriptOptions,
    ctxs: HashMap<String, Arc<Ctx>>,
    types: HashMap<String, (Arc<Ctx>, SemTy)>,
    terms: HashMap<String, usize>,
    type_globals: Vec<Global>,
    term_globals: Vec<Global>,
    run: ScriptRun,
}

impl Interp {
    fn category(&self, c: &CatRef) -> Result<Arc<FinCategory>> {
        match c {
            CatRef::Builtin(name) => builtin_category(name).map(Arc::new),
            CatRef::File(path) => {
                let c = self.loader.category(&Value::String(path.clone()))?;
                validate_category(&c).into_result()?;
                Ok(c)
            }
        }
    }

    fn base(&self, e: &CtxExpr) -> Result<Ctx> {
        match e {
            CtxExpr::Empty(c) => Ok(empty_ctx(&self.category(c)?)),
            CtxExpr::Yoneda(c, x) => {
                let c = self.category(c)?;
                let obj = c.find_object(x).ok_or_else(|| {
                    Error::Scope(format!(
                        "no object `{x}` (objects: {})",
                        c.object_labels().join(", ")
                    ))
                })?;
                Ok(yoneda(&c, obj))
            }
            CtxExpr::File(path) => {
                let h = self.loader.presheaf(&Value::String(path.clone()))?;
                validate_presheaf(&h).into_result()?;
                Ok((*h).clone())
            }
        }
    }

    fn scope<'a>(&'a self, spec: &'a CtxSpec) -> Scope<'a> {
        Scope {
            base: &spec.base,
            binders: Vec::new(),
            types: &self.type_globals,
            terms: &self.term_globals,
        }
    }

    /// Elaborates and interprets the binders of `spec` left to right.
    fn levels<'a>(&'a self, spec: &'a CtxSpec) -> Result<(Vec<Level>, Scope<'a>)> {
        let ctx = self
            .ctxs
            .get(&spec.base)
            .ok_or_else(|| Error::Scope(format!("unknown context `{}`", spec.base)))?;
        let mut levels = vec![Level {
            ctx: ctx.clone(),
            entry: None,
        }];
        let mut scope = self.scope(spec);
        for (x, a) in &spec.binders {
            let sem = self.ty(&levels, &scope.ty(a)?)?;
            levels = extend(&levels, sem);
            scope.binders.push(Binder {
                name: x.clone(),
                ty: Some(a.clone()),
            });
        }
        Ok((levels, scope))
    }

    fn same_ctx(&self, levels: &[Level], declared: &Ctx, what: &str) -> Result<()> {
        if **here(levels) == *declared {
            Ok(())
        } else {
            Err(Error::ContextMismatch(format!(
                "{what} lives over a different context"
            )))
        }
    }

    fn ty(&self, levels: &[Level], t: &CombTy) -> Result<SemTy> {
        let h = here(levels);
        Ok(match t {
            CombTy::Discrete(n) => SemTy::Discrete {
                n: *n,
                ty: Arc::new(discrete_ty(h, FinSet::new(*n))),
            },
            CombTy::Pi(a, b) => {
                let a = self.ty(levels, a)?;
                let b = self.ty(&extend(levels, a.clone()), b)?;
                let former = pi_ty(a.ty(), b.ty(), self.opts.pi_cap, self.opts.exec)?;
                SemTy::Pi {
                    former: Arc::new(former),
                    dom: Box::new(a),
                    cod: Box::new(b),
                }
            }
            CombTy::Sigma(a, b) => {
                let a = self.ty(levels, a)?;
                let b = self.ty(&extend(levels, a.clone()), b)?;
                let former = sigma_ty(a.ty(), b.ty())?;
                SemTy::Sigma {
                    former: Arc::new(former),
                    dom: Box::new(a),
                    cod: Box::new(b),
                }
            }
            CombTy::Ref(name) => {
                let (ctx, sem) = self
                    .types
                    .get(name)
                    .ok_or_else(|| Error::Scope(format!("unknown type `{name}`")))?;
                self.same_ctx(levels, ctx, &format!("type `{name}`"))?;
                sem.clone()
            }
            CombTy::File(path) => {
                let t = self.loader.ty(&Value::String(path.clone()))?;
                validate_ty(&t).into_result()?;
                self.same_ctx(levels, t.ctx(), &format!("type \"{path}\""))?;
                SemTy::Plain(t)
            }
            CombTy::Wk(t) => {
                let (rest, _, p) = split(levels)?;
                self.ty(rest, t)?.subst(p, self.opts)?
            }
        })
    }

    fn infer(&self, levels: &[Level], t: &Combinator) -> Result<(TmInCtx, SemTy)> {
        match t {
            Combinator::Q => {
                let (_, a, p) = split(levels)?;
                let sem = a.subst(p, self.opts)?;
                let q = var_q_along(a.ty(), p)?;
                Ok((retype(q, &sem, "q")?, sem))
            }
            Combinator::Wk(t) => {
                let (rest, _, p) = split(levels)?;
                let (m, sem) = self.infer(rest, t)?;
                let sem = sem.subst(p, self.opts)?;
                let m = tm_subst(&m, p)?;
                Ok((retype(m, &sem, "a weakened term")?, sem))
            }
            Combinator::Global(name) => {
                let i = self.terms[name];
                let out = &self.run.terms[i];
                self.same_ctx(levels, out.term.ctx(), &format!("term `{name}`"))?;
                Ok((out.term.clone(), out.sem.clone()))
            }
            Combinator::App(f, u) => {
                let (fm, fs) = self.infer(levels, f)?;
                let SemTy::Pi { former, dom, cod } = fs else {
                    return Err(Error::TypeMismatch(format!(
                        "`{f}` is applied but has type {}",
                        fs.describe()
                    )));
                };
                let um = self.check(levels, u, &dom)?;
                let sem = cod.subst(&sub_single(&um)?, self.opts)?;
                let m = app_tm(&former, &fm, &um)?;
                Ok((retype(m, &sem, "an application")?, sem))
            }
            Combinator::Fst(pr) | Combinator::Snd(pr) => {
                let (pm, ps) = self.infer(levels, pr)?;
                let SemTy::Sigma { former, dom, cod } = ps else {
                    return Err(Error::TypeMismatch(format!(
                        "`{pr}` is projected but has type {}",
                        ps.describe()
                    )));
                };
                let first = fst_tm(&former, &pm)?;
                if let Combinator::Fst(_) = t {
                    return Ok((retype(first, &dom, "a first projection")?, *dom));
                }
                let sem = cod.subst(&sub_single(&first)?, self.opts)?;
                let second = snd_tm(&former, &pm)?;
                Ok((retype(second, &sem, "a second projection")?, sem))
            }
            Combinator::Lam(_) | Combinator::Pair(..) | Combinator::Lit(_) => {
                Err(Error::TypeMismatch(format!(
                    "cannot infer a type for `{t}`; give it one in a term declaration"
                )))
            }
        }
    }
}

impl Interp {
    fn check(&self, levels: &[Level], t: &Combinator, want: &SemTy) -> Result<TmInCtx> {
        match (t, want) {
            (Combinator::Lam(b), SemTy::Pi { former, dom, cod }) => {
                let inner = extend_into(levels, (**dom).clone(), cod.ty().ctx().clone());
                let body = self.check(&inner, b, cod)?;
                retype(lambda_tm(former, &body)?, want, "a lambda")
            }
            (Combinator::Pair(l, r), SemTy::Sigma { former, dom, cod }) => {
                let lm = self.check(levels, l, dom)?;
                let rs = cod.subst(&sub_single(&lm)?, self.opts)?;
                let rm = self.check(levels, r, &rs)?;
                retype(pair_tm(former, &lm, &rm)?, want, "a pair")
            }
            (Combinator::Lit(k), _) => {
                let n = match want {
                    SemTy::Discrete { n, .. } => Some(*n),
                    SemTy::Plain(ty) => discrete_size(ty),
                    _ => None,
                };
                let Some(n) = n else {
                    return Err(Error::TypeMismatch(format!(
                        "literal #{k} needs a discrete type, expected {}",
                        want.describe()
                    )));
                };
                if *k >= n {
                    return Err(Error::OutOfRange(format!("literal #{k} is not in {{{n}}}")));
                }
                retype(
                    discrete_tm(here(levels), FinSet::new(n), *k)?,
                    want,
                    "a literal",
                )
            }
            (Combinator::Lam(_), _) | (Combinator::Pair(..), _) => Err(Error::TypeMismatch(
                format!("`{t}` cannot have type {}", want.describe()),
            )),
            _ => {
                let (m, got) = self.infer(levels, t)?;
                if **m.ty() == **want.ty() {
                    retype(m, want, "a term")
                } else {
                    Err(Error::TypeMismatch(format!(
                        "`{t}` has type {}, expected {}",
                        got.describe(),
                        want.describe()
                    )))
                }
            }
        }
    }

    fn decl(&mut self, pos: Pos, d: &Decl) -> Result<()> {
        match d {
            Decl::Ctx { name, expr } => {
                let h = self.base(expr)?;
                self.ctxs.insert(name.clone(), Arc::new(h));
            }
            Decl::Type { name, ty, ctx } => {
                let (levels, scope) = self.levels(ctx)?;
                let sem = self.ty(&levels, &scope.ty(ty)?)?;
                self.types
                    .insert(name.clone(), (here(&levels).clone(), sem));
                self.type_globals.push(global(name, ctx));
            }
            Decl::Term { name, ty, tm, ctx } => {
                let (levels, scope) = self.levels(ctx)?;
                let ty_comb = scope.ty(ty)?;
                let combinator = scope.tm(tm)?;
                let sem = self.ty(&levels, &ty_comb)?;
                let term = self.check(&levels, &combinator, &sem)?;
                self.terms.insert(name.clone(), self.run.terms.len());
                self.run.terms.push(TermOut {
                    name: name.clone(),
                    pos,
                    combinator,
                    ty_comb,
                    sem,
                    term,
                });
                self.term_globals.push(global(name, ctx));
            }
            Decl::Eval(name) => {
                self.declared(name)?;
                self.run.outputs.push(Output::Eval(name.clone()));
            }
            Decl::Check(name) => {
                let m = &self.run.terms[self.declared(name)?].term;
                let mut report = validate_ty(m.ty());
                let tm = validate_tm(m);
                report.structural.extend(tm.structural);
                report.laws.extend(tm.laws);
                self.run.outputs.push(Output::Check {
                    name: name.clone(),
                    report,
                });
            }
        }
        Ok(())
    }

    fn declared(&self, name: &str) -> Result<usize> {
        self.terms
            .get(name)
            .copied()
            .ok_or_else(|| Error::Scope(format!("unknown term `{name}`")))
    }
}

fn global(name: &str, spec: &CtxSpec) -> Global {
    Global {
        name: name.to_string(),
        base: spec.base.clone(),
        binders: spec.binders.clone(),
    }
}

/// Parses, elaborates and interprets a script. Relative paths resolve
/// against `dir`. Errors carry the position of the declaration they arose
/// in; budget errors pass through unchanged.
pub fn run_script(text: &str, dir: &Path, opts: ScriptOptions) -> Result<ScriptRun> {
    let script = parse_script(text)?;
    let mut it = Interp {
        loader: Loader::new(dir),
        opts,
        ctxs: HashMap::new(),
        types: HashMap::new(),
        terms: HashMap::new(),
        type_globals: Vec::new(),
        term_globals: Vec::new(),
        run: ScriptRun::default(),
    };
    for item in &script.items {
        it.decl(item.pos, &item.decl).map_err(|e| match e {
            Error::BudgetExceeded { .. } | Error::Script { .. } => e,
            other => item.pos.error(other.to_string()),
        })?;
    }
    Ok(it.run)
}

/// A term interpreted directly over a presheaf, without a script.
#[derive(Clone, Debug)]
pub struct Interpreted {
    pub combinator: Combinator,
    pub sem: SemTy,
    pub term: TmInCtx,
    /// The binder types, each over the context extended by the ones before.
    pub binders: Vec<SemTy>,
}

/// Elaborates and interprets `tm : ty` in `h, x1:A1, ..., xn:An`.
pub fn interpret_in(
    h: &Arc<Ctx>,
    binders: &[(String, SurfaceType)],
    ty: &SurfaceType,
    tm: &super::ast::SurfaceTerm,
    opts: ScriptOptions,
) -> Result<Interpreted> {
    let it = Interp {
        loader: Loader::new("."),
        opts,
        ctxs: HashMap::from([("H".to_string(), h.clone())]),
        types: HashMap::new(),
        terms: HashMap::new(),
        type_globals: Vec::new(),
        term_globals: Vec::new(),
        run: ScriptRun::default(),
    };
    let spec = CtxSpec {
        base: "H".into(),
        binders: binders.to_vec(),
    };
    let (levels, scope) = it.levels(&spec)?;
    let combinator = scope.tm(tm)?;
    let sem = it.ty(&levels, &scope.ty(ty)?)?;
    let term = it.check(&levels, &combinator, &sem)?;
    let binders = levels
        .into_iter()
        .filter_map(|l| l.entry.map(|(a, _)| a))
        .collect();
    Ok(Interpreted {
        combinator,
        sem,
        term,
        binders,
    })
}
