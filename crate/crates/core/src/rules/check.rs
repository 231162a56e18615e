//! The 39 rule checks. Typing rules build the conclusion and run its
//! validator; equations build both sides and compare their tables.

use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use super::fixture::Fixture;
use super::sample::some_maps;
use crate::cwf::{
    ctx_extend, empty_ctx, proj_p, proj_p_into, shift, sub_pair, sub_single, tm_subst, ty_subst,
    validate_tm, validate_ty, var_q, var_q_along, Ctx, Sub, TmInCtx, TyInCtx,
};
use crate::formers::{
    app_tm, fst_tm, lambda_tm, pair_tm, pi_ty, sigma_ty, snd_tm, validate_pi, PiTy, SigmaTy,
};
use crate::par::Exec;
use crate::presheaf::{
    compose_maps, identity_map, validate_presheaf, validate_pshmap, Presheaf, PshMap,
};
use crate::report::Report;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureKind {
    /// A constructed object failed its validator.
    Typing,
    /// Two sides of an equation differ.
    Equation,
    /// A kernel operation refused its inputs or panicked.
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub witness: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Value>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Pass,
    /// The fixture does not meet the rule's hypotheses.
    Skip(String),
    Fail(Failure),
}

/// Early exit of a check.
pub(crate) enum Flow {
    Skip(String),
    Fail(Failure),
}

impl From<Error> for Flow {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Flow::Skip(e.to_string()),
            other => Flow::Fail(Failure {
                kind: FailureKind::Error,
                witness: other.to_string(),
                lhs: None,
                rhs: None,
            }),
        }
    }
}

type Check = Result<(), Flow>;

/// Table view used in equation counterexamples.
pub trait Tables {
    fn tables(&self) -> Value;
}

impl Tables for PshMap {
    fn tables(&self) -> Value {
        json!({ "components": self.components })
    }
}

impl Tables for Presheaf {
    fn tables(&self) -> Value {
        let sizes: Vec<usize> = self.sets().iter().map(|s| s.size).collect();
        json!({ "sizes": sizes, "restrict": self.tables() })
    }
}

fn fiber_sizes(t: &TyInCtx) -> Vec<Vec<usize>> {
    t.fibers()
        .iter()
        .map(|row| row.iter().map(|f| f.len()).collect())
        .collect()
}

impl Tables for TyInCtx {
    fn tables(&self) -> Value {
        json!({ "sizes": fiber_sizes(self), "morph": self.morph_tables() })
    }
}

impl Tables for TmInCtx {
    fn tables(&self) -> Value {
        json!({ "elem": self.table(), "sizes": fiber_sizes(self.ty()) })
    }
}

fn typed(what: &str, r: Report) -> Check {
    if r.is_ok() {
        Ok(())
    } else {
        Err(Flow::Fail(Failure {
            kind: FailureKind::Typing,
            witness: format!("{what}: {}", r.summary()),
            lhs: None,
            rhs: None,
        }))
    }
}

fn equal<T: PartialEq + Tables>(what: &str, lhs: &T, rhs: &T) -> Check {
    if lhs == rhs {
        Ok(())
    } else {
        Err(Flow::Fail(Failure {
            kind: FailureKind::Equation,
            witness: what.to_string(),
            lhs: Some(lhs.tables()),
            rhs: Some(rhs.tables()),
        }))
    }
}

fn same_ctx(what: &str, x: &Ctx, y: &Ctx) -> Check {
    equal(what, x, y)
}

fn need<'a, T>(xs: &'a [T], what: &str) -> Result<&'a [T], Flow> {
    if xs.is_empty() {
        Err(Flow::Skip(format!("no {what} in this fixture")))
    } else {
        Ok(xs)
    }
}

pub(crate) struct Env {
    pub pi_cap: usize,
}

fn pi(fx: &Fixture, env: &Env) -> Result<PiTy, Flow> {
    Ok(pi_ty(&fx.a, &fx.b, env.pi_cap, Exec::Sequential)?)
}

fn sigma(fx: &Fixture) -> Result<SigmaTy, Flow> {
    Ok(sigma_ty(&fx.a, &fx.b)?)
}

/// `(A)sigma` and `B(sigma p, q)`.
fn shifted(fx: &Fixture) -> Result<(Arc<TyInCtx>, Arc<TyInCtx>, Sub), Flow> {
    let a_s = Arc::new(ty_subst(&fx.a, &fx.sigma)?);
    let sh = shift(&fx.sigma, &fx.a)?;
    let b_s = Arc::new(ty_subst(&fx.b, &sh)?);
    Ok((a_s, b_s, sh))
}

fn pairs(fx: &Fixture) -> Result<Vec<(&TmInCtx, &TmInCtx)>, Flow> {
    let vs = need(&fx.vs, "pairs of terms")?;
    Ok(vs.iter().map(|(i, v)| (&fx.ts[*i], v)).collect())
}

/// One entry of the rule list.
pub struct Rule {
    pub id: &'static str,
    pub statement: &'static str,
    pub(crate) check: fn(&Fixture, &Env) -> Check,
}

macro_rules! rule {
    ($id:literal, $stmt:literal, $f:expr) => {
        Rule {
            id: $id,
            statement: $stmt,
            check: $f,
        }
    };
}

pub static RULES: [Rule; 39] = [
    rule!("S1", "1 : G -> G", |fx, _| {
        let id = identity_map(&fx.g);
        typed("1", validate_pshmap(&id))?;
        same_ctx("source of 1", &id.source, &fx.g)?;
        same_ctx("target of 1", &id.target, &fx.g)
    }),
    rule!("S2", "sigma delta : K -> G", |fx, _| {
        let sd = compose_maps(&fx.sigma, &fx.delta)?;
        typed("sigma delta", validate_pshmap(&sd))?;
        same_ctx("source of sigma delta", &sd.source, &fx.k)?;
        same_ctx("target of sigma delta", &sd.target, &fx.g)
    }),
    rule!("S3", "H |- (A)sigma", |fx, _| {
        typed("(A)sigma", validate_ty(&ty_subst(&fx.a, &fx.sigma)?))
    }),
    rule!("S4", "H |- (t)sigma : (A)sigma", |fx, _| {
        let a_s = ty_subst(&fx.a, &fx.sigma)?;
        for t in need(&fx.ts, "terms of A")? {
            let ts = tm_subst(t, &fx.sigma)?;
            typed("(t)sigma", validate_tm(&ts))?;
            equal("type of (t)sigma", &**ts.ty(), &a_s)?;
        }
        Ok(())
    }),
    rule!("S5", "() |-", |fx, _| {
        let e = Arc::new(empty_ctx(&fx.base));
        typed("()", validate_presheaf(&e))?;
        for x in [&fx.g, &fx.h, &fx.k] {
            let n = some_maps(x, &e, 2)?.len();
            if n != 1 {
                return Err(Flow::Fail(Failure {
                    kind: FailureKind::Typing,
                    witness: format!("{n} maps into the empty context"),
                    lhs: None,
                    rhs: None,
                }));
            }
        }
        Ok(())
    }),
    rule!("S6", "G.A |-", |fx, _| {
        typed("G.A", validate_presheaf(&ctx_extend(&fx.a)))
    }),
    rule!("S7", "p : G.A -> G", |fx, _| {
        let p = proj_p(&fx.a);
        typed("p", validate_pshmap(&p))?;
        same_ctx("source of p", &p.source, &ctx_extend(&fx.a))?;
        same_ctx("target of p", &p.target, &fx.g)
    }),
    rule!("S8", "G.A |- q : (A)p", |fx, _| {
        let q = var_q(&fx.a)?;
        typed("q", validate_tm(&q))?;
        equal("type of q", &**q.ty(), &ty_subst(&fx.a, &proj_p(&fx.a))?)
    }),
    rule!("S9", "(sigma, u) : H -> G.A", |fx, _| {
        for u in need(&fx.us, "terms of (A)sigma")? {
            let s = sub_pair(&fx.sigma, u, &fx.a)?;
            typed("(sigma, u)", validate_pshmap(&s))?;
            same_ctx("source of (sigma, u)", &s.source, &fx.h)?;
            same_ctx("target of (sigma, u)", &s.target, &ctx_extend(&fx.a))?;
        }
        Ok(())
    }),
    rule!("S10", "1 sigma = sigma 1 = sigma", |fx, _| {
        equal(
            "1 sigma = sigma",
            &compose_maps(&identity_map(&fx.g), &fx.sigma)?,
            &fx.sigma,
        )?;
        equal(
            "sigma 1 = sigma",
            &compose_maps(&fx.sigma, &identity_map(&fx.h))?,
            &fx.sigma,
        )
    }),
    rule!("S11", "(sigma delta) nu = sigma (delta nu)", |fx, _| {
        let lhs = compose_maps(&compose_maps(&fx.sigma, &fx.delta)?, &fx.nu)?;
        let rhs = compose_maps(&fx.sigma, &compose_maps(&fx.delta, &fx.nu)?)?;
        equal("(sigma delta) nu = sigma (delta nu)", &lhs, &rhs)
    }),
    rule!("S12", "[u] = (1, u)", |fx, _| {
        for t in need(&fx.ts, "terms of A")? {
            let lhs = sub_single(t)?;
            let rhs = sub_pair(&identity_map(&fx.g), t, &fx.a)?;
            equal("[u] = (1, u)", &lhs, &rhs)?;
        }
        Ok(())
    }),
    rule!("S13", "(A)1 = A", |fx, _| {
        equal("(A)1 = A", &ty_subst(&fx.a, &identity_map(&fx.g))?, &*fx.a)
    }),
    rule!("S14", "((A)sigma)delta = (A)(sigma delta)", |fx, _| {
        let lhs = ty_subst(&ty_subst(&fx.a, &fx.sigma)?, &fx.delta)?;
        let rhs = ty_subst(&fx.a, &compose_maps(&fx.sigma, &fx.delta)?)?;
        equal("((A)sigma)delta = (A)(sigma delta)", &lhs, &rhs)
    }),
    rule!("S15", "(u)1 = u", |fx, _| {
        let id = identity_map(&fx.g);
        for t in need(&fx.ts, "terms of A")? {
            equal("(u)1 = u", &tm_subst(t, &id)?, t)?;
        }
        Ok(())
    }),
    rule!("S16", "((u)sigma)delta = (u)(sigma delta)", |fx, _| {
        let sd = compose_maps(&fx.sigma, &fx.delta)?;
        for t in need(&fx.ts, "terms of A")? {
            let lhs = tm_subst(&tm_subst(t, &fx.sigma)?, &fx.delta)?;
            equal(
                "((u)sigma)delta = (u)(sigma delta)",
                &lhs,
                &tm_subst(t, &sd)?,
            )?;
        }
        Ok(())
    }),
    rule!(
        "S17",
        "(sigma, u) delta = (sigma delta, (u)delta)",
        |fx, _| {
            let sd = compose_maps(&fx.sigma, &fx.delta)?;
            for u in need(&fx.us, "terms of (A)sigma")? {
                let lhs = compose_maps(&sub_pair(&fx.sigma, u, &fx.a)?, &fx.delta)?;
                let rhs = sub_pair(&sd, &tm_subst(u, &fx.delta)?, &fx.a)?;
                equal("(sigma, u) delta = (sigma delta, (u)delta)", &lhs, &rhs)?;
            }
            Ok(())
        }
    ),
    rule!("S18", "p (sigma, u) = sigma", |fx, _| {
        let p = proj_p(&fx.a);
        for u in need(&fx.us, "terms of (A)sigma")? {
            let lhs = compose_maps(&p, &sub_pair(&fx.sigma, u, &fx.a)?)?;
            equal("p (sigma, u) = sigma", &lhs, &fx.sigma)?;
        }
        Ok(())
    }),
    rule!("S19", "(q)(sigma, u) = u", |fx, _| {
        let q = var_q(&fx.a)?;
        for u in need(&fx.us, "terms of (A)sigma")? {
            let lhs = tm_subst(&q, &sub_pair(&fx.sigma, u, &fx.a)?)?;
            equal("(q)(sigma, u) = u", &lhs, u)?;
        }
        Ok(())
    }),
    rule!("S20", "(p, q) = 1", |fx, _| {
        let ext = Arc::new(ctx_extend(&fx.a));
        let p = proj_p_into(&fx.a, &ext);
        let q = var_q_along(&fx.a, &p)?;
        equal("(p, q) = 1", &sub_pair(&p, &q, &fx.a)?, &identity_map(&ext))
    }),
    rule!("F1", "G |- Pi(A, B)", |fx, env| {
        typed("Pi(A, B)", validate_pi(&pi(fx, env)?))
    }),
    rule!("F2", "G |- lambda b : Pi(A, B)", |fx, env| {
        let p = pi(fx, env)?;
        for b in need(&fx.bodies, "terms of B")? {
            let lam = lambda_tm(&p, b)?;
            typed("lambda b", validate_tm(&lam))?;
            equal("type of lambda b", &**lam.ty(), &*p.ty)?;
        }
        Ok(())
    }),
    rule!("F3", "G |- Sigma(A, B)", |fx, _| {
        typed("Sigma(A, B)", validate_ty(&sigma(fx)?.ty))
    }),
    rule!("F4", "G |- (u, v) : Sigma(A, B)", |fx, _| {
        let s = sigma(fx)?;
        for (u, v) in pairs(fx)? {
            let pr = pair_tm(&s, u, v)?;
            typed("(u, v)", validate_tm(&pr))?;
            equal("type of (u, v)", &**pr.ty(), &*s.ty)?;
        }
        Ok(())
    }),
    rule!("F5", "G |- pr.1 : A", |fx, _| {
        let s = sigma(fx)?;
        for pr in need(&fx.prs, "terms of Sigma(A, B)")? {
            let x = fst_tm(&s, pr)?;
            typed("pr.1", validate_tm(&x))?;
            equal("type of pr.1", &**x.ty(), &*fx.a)?;
        }
        Ok(())
    }),
    rule!("F6", "G |- pr.2 : B[pr.1]", |fx, _| {
        let s = sigma(fx)?;
        for pr in need(&fx.prs, "terms of Sigma(A, B)")? {
            let y = snd_tm(&s, pr)?;
            typed("pr.2", validate_tm(&y))?;
            let b_fst = ty_subst(&fx.b, &sub_single(&fst_tm(&s, pr)?)?)?;
            equal("type of pr.2", &**y.ty(), &b_fst)?;
        }
        Ok(())
    }),
    rule!("F7", "G |- app(f, u) : B[u]", |fx, env| {
        let p = pi(fx, env)?;
        for f in need(&fx.fs, "terms of Pi(A, B)")? {
            for u in need(&fx.ts, "terms of A")? {
                let y = app_tm(&p, f, u)?;
                typed("app(f, u)", validate_tm(&y))?;
                equal(
                    "type of app(f, u)",
                    &**y.ty(),
                    &ty_subst(&fx.b, &sub_single(u)?)?,
                )?;
            }
        }
        Ok(())
    }),
    rule!(
        "F8",
        "Pi(A, B)sigma = Pi(A sigma, B(sigma p, q))",
        |fx, env| {
            let p = pi(fx, env)?;
            let (a_s, b_s, _) = shifted(fx)?;
            let rhs = pi_ty(&a_s, &b_s, env.pi_cap, Exec::Sequential)?;
            equal(
                "Pi(A, B)sigma = Pi(A sigma, B(sigma p, q))",
                &ty_subst(&p.ty, &fx.sigma)?,
                &*rhs.ty,
            )
        }
    ),
    rule!(
        "F9",
        "(lambda b)sigma = lambda(b(sigma p, q))",
        |fx, env| {
            let p = pi(fx, env)?;
            let (a_s, b_s, sh) = shifted(fx)?;
            let p_s = pi_ty(&a_s, &b_s, env.pi_cap, Exec::Sequential)?;
            for b in need(&fx.bodies, "terms of B")? {
                let lhs = tm_subst(&lambda_tm(&p, b)?, &fx.sigma)?;
                let rhs = lambda_tm(&p_s, &tm_subst(b, &sh)?)?;
                equal("(lambda b)sigma = lambda(b(sigma p, q))", &lhs, &rhs)?;
            }
            Ok(())
        }
    ),
    rule!(
        "F10",
        "app(f, u)sigma = app(f sigma, u sigma)",
        |fx, env| {
            let p = pi(fx, env)?;
            let (a_s, b_s, _) = shifted(fx)?;
            let p_s = pi_ty(&a_s, &b_s, env.pi_cap, Exec::Sequential)?;
            for f in need(&fx.fs, "terms of Pi(A, B)")? {
                let f_s = tm_subst(f, &fx.sigma)?;
                for u in need(&fx.ts, "terms of A")? {
                    let lhs = tm_subst(&app_tm(&p, f, u)?, &fx.sigma)?;
                    let rhs = app_tm(&p_s, &f_s, &tm_subst(u, &fx.sigma)?)?;
                    equal("app(f, u)sigma = app(f sigma, u sigma)", &lhs, &rhs)?;
                }
            }
            Ok(())
        }
    ),
    rule!("F11", "app(lambda b, u) = b[u]", |fx, env| {
        let p = pi(fx, env)?;
        for b in need(&fx.bodies, "terms of B")? {
            let lam = lambda_tm(&p, b)?;
            for u in need(&fx.ts, "terms of A")? {
                let lhs = app_tm(&p, &lam, u)?;
                let rhs = tm_subst(b, &sub_single(u)?)?;
                equal("app(lambda b, u) = b[u]", &lhs, &rhs)?;
            }
        }
        Ok(())
    }),
    rule!("F12", "f = lambda(app((f)p, q))", |fx, env| {
        let p = pi(fx, env)?;
        let fs = need(&fx.fs, "terms of Pi(A, B)")?;
        let ext = Arc::new(ctx_extend(&fx.a));
        let pa = proj_p_into(&fx.a, &ext);
        let q = var_q_along(&fx.a, &pa)?;
        let a_p = Arc::new(ty_subst(&fx.a, &pa)?);
        let b_p = Arc::new(ty_subst(&fx.b, &shift(&pa, &fx.a)?)?);
        let p_p = pi_ty(&a_p, &b_p, env.pi_cap, Exec::Sequential)?;
        for f in fs {
            let body = app_tm(&p_p, &tm_subst(f, &pa)?, &q)?;
            equal("f = lambda(app((f)p, q))", f, &lambda_tm(&p, &body)?)?;
        }
        Ok(())
    }),
    rule!(
        "F13",
        "Sigma(A, B)sigma = Sigma(A sigma, B(sigma p, q))",
        |fx, _| {
            let s = sigma(fx)?;
            let (a_s, b_s, _) = shifted(fx)?;
            let rhs = sigma_ty(&a_s, &b_s)?;
            equal(
                "Sigma(A, B)sigma = Sigma(A sigma, B(sigma p, q))",
                &ty_subst(&s.ty, &fx.sigma)?,
                &*rhs.ty,
            )
        }
    ),
    rule!("F14", "(pr.1)sigma = (pr sigma).1", |fx, _| {
        let s = sigma(fx)?;
        let (a_s, b_s, _) = shifted(fx)?;
        let s_s = sigma_ty(&a_s, &b_s)?;
        for pr in need(&fx.prs, "terms of Sigma(A, B)")? {
            let lhs = tm_subst(&fst_tm(&s, pr)?, &fx.sigma)?;
            let rhs = fst_tm(&s_s, &tm_subst(pr, &fx.sigma)?)?;
            equal("(pr.1)sigma = (pr sigma).1", &lhs, &rhs)?;
        }
        Ok(())
    }),
    rule!("F15", "(pr.2)sigma = (pr sigma).2", |fx, _| {
        let s = sigma(fx)?;
        let (a_s, b_s, _) = shifted(fx)?;
        let s_s = sigma_ty(&a_s, &b_s)?;
        for pr in need(&fx.prs, "terms of Sigma(A, B)")? {
            let lhs = tm_subst(&snd_tm(&s, pr)?, &fx.sigma)?;
            let rhs = snd_tm(&s_s, &tm_subst(pr, &fx.sigma)?)?;
            equal("(pr.2)sigma = (pr sigma).2", &lhs, &rhs)?;
        }
        Ok(())
    }),
    rule!("F16", "(u, v)sigma = (u sigma, v sigma)", |fx, _| {
        let s = sigma(fx)?;
        let (a_s, b_s, _) = shifted(fx)?;
        let s_s = sigma_ty(&a_s, &b_s)?;
        for (u, v) in pairs(fx)? {
            let lhs = tm_subst(&pair_tm(&s, u, v)?, &fx.sigma)?;
            let rhs = pair_tm(&s_s, &tm_subst(u, &fx.sigma)?, &tm_subst(v, &fx.sigma)?)?;
            equal("(u, v)sigma = (u sigma, v sigma)", &lhs, &rhs)?;
        }
        Ok(())
    }),
    rule!("F17", "(u, v).1 = u", |fx, _| {
        let s = sigma(fx)?;
        for (u, v) in pairs(fx)? {
            equal("(u, v).1 = u", &fst_tm(&s, &pair_tm(&s, u, v)?)?, u)?;
        }
        Ok(())
    }),
    rule!("F18", "(u, v).2 = v", |fx, _| {
        let s = sigma(fx)?;
        for (u, v) in pairs(fx)? {
            equal("(u, v).2 = v", &snd_tm(&s, &pair_tm(&s, u, v)?)?, v)?;
        }
        Ok(())
    }),
    rule!("F19", "(pr.1, pr.2) = pr", |fx, _| {
        let s = sigma(fx)?;
        for pr in need(&fx.prs, "terms of Sigma(A, B)")? {
            let back = pair_tm(&s, &fst_tm(&s, pr)?, &snd_tm(&s, pr)?)?;
            equal("(pr.1, pr.2) = pr", &back, pr)?;
        }
        Ok(())
    }),
];

pub fn find_rule(id: &str) -> Option<&'static Rule> {
    RULES.iter().find(|r| r.id.eq_ignore_ascii_case(id))
}

/// Runs one rule on one fixture. Panics inside the kernel are caught and
/// reported as failures.
pub(crate) fn run_rule(rule: &Rule, fx: &Fixture, env: &Env) -> Outcome {
    let res = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| (rule.check)(fx, env)));
    match res {
        Ok(Ok(())) => Outcome::Pass,
        Ok(Err(Flow::Skip(why))) => Outcome::Skip(why),
        Ok(Err(Flow::Fail(f))) => Outcome::Fail(f),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            Outcome::Fail(Failure {
                kind: FailureKind::Error,
                witness: format!("panic: {msg}"),
                lhs: None,
                rhs: None,
            })
        }
    }
}
