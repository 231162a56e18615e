use std::sync::Arc;

use super::{expect_ext, same_ty};
use crate::catcore::{ArrId, ObjId};
use crate::cwf::{
    sub_single, ty_subst, validate_ty, ExtLayout, Fiber, PiFiber, PiKey, TmInCtx, TyInCtx,
};
use crate::mutation::{self, clamp, Mutation};
use crate::report::Report;
use crate::{error, par, Error, Result};

/// Default bound on the raw candidate tables per `(I, rho)`.
pub const DEFAULT_PI_CAP: usize = 100_000;

/// `Pi(A, B)` together with the families it was built from.
#[derive(Clone, Debug)]
pub struct PiTy {
    pub a: Arc<TyInCtx>,
    pub b: Arc<TyInCtx>,
    pub ty: Arc<TyInCtx>,
}

/// Shared view of `A`, `B` and the layout of `H.A`.
struct Family<'a> {
    a: &'a TyInCtx,
    b: &'a TyInCtx,
    layout: ExtLayout,
}

/// One naturality constraint between two key positions of a table.
#[derive(Clone, Copy)]
struct Constraint {
    /// key `(J, f, u)`
    from: usize,
    /// key `(K, g;f, A(g)(u))`
    to: usize,
    g: ArrId,
    /// index of `(f(rho), u)` in `H.A(J)`
    env: usize,
}

impl Family<'_> {
    /// Canonical keys at `(I, rho)`: every `f: J -> I` and `u` in `A(J, f(rho))`.
    fn keys(&self, i: ObjId, rho: usize) -> Vec<PiKey> {
        let h = self.a.ctx();
        let c = h.base();
        let mut keys = Vec::new();
        for j in c.objects() {
            for f in c.hom(j, i) {
                let f_rho = h.restrict(f, rho);
                keys.extend((0..self.a.size(j, f_rho)).map(|elem| PiKey {
                    obj: j,
                    arrow: f,
                    elem,
                }));
            }
        }
        keys
    }

    /// Size of `B(J, (f(rho), u))` for the key `(J, f, u)`.
    fn codomain(&self, rho: usize, key: &PiKey) -> usize {
        let f_rho = self.a.ctx().restrict(key.arrow, rho);
        self.b
            .size(key.obj, self.layout.index(key.obj, f_rho, key.elem))
    }

    fn constraints(&self, rho: usize, keys: &[PiKey]) -> Vec<Constraint> {
        let h = self.a.ctx();
        let c = h.base();
        let mut out = Vec::new();
        for (from, key) in keys.iter().enumerate() {
            let (j, f, u) = (key.obj, key.arrow, key.elem);
            let f_rho = h.restrict(f, rho);
            let env = self.layout.index(j, f_rho, u);
            for g in c.arrows_into(j) {
                let to_key = PiKey {
                    obj: c.dom(g),
                    arrow: c.comp(g, f),
                    elem: self.a.morph(g, f_rho, u),
                };
                let to = keys
                    .binary_search(&to_key)
                    .expect("reindexed key is canonical");
                out.push(Constraint { from, to, g, env });
            }
        }
        out
    }

    fn holds(&self, k: &Constraint, table: &[usize]) -> bool {
        self.b.morph(k.g, k.env, table[k.from]) == table[k.to]
    }
}

/// Reports every failure of the naturality condition
/// `B(g)(w(J, f, u)) = w(K, g;f, A(g)(u))` for a candidate table at `(I, rho)`.
pub fn is_pi_element(
    a: &TyInCtx,
    b: &TyInCtx,
    i: ObjId,
    rho: usize,
    keys: &[PiKey],
    table: &[usize],
) -> Result<Report> {
    expect_ext(a, b)?;
    let fam = Family {
        a,
        b,
        layout: ExtLayout::new(a),
    };
    let canonical = fam.keys(i, rho);
    if keys != canonical.as_slice() {
        return Err(Error::Invalid({
            let mut r = Report::ok();
            r.structural(
                "malformed key set",
                format!(
                    "expected {} canonical keys, got {}",
                    canonical.len(),
                    keys.len()
                ),
            );
            r
        }));
    }
    if table.len() != keys.len() {
        return Err(Error::OutOfRange(format!(
            "{} values for {} keys",
            table.len(),
            keys.len()
        )));
    }
    let c = a.ctx().base();
    let mut r = Report::ok();
    for (key, &v) in keys.iter().zip(table) {
        let n = fam.codomain(rho, key);
        if v >= n {
            r.structural(
                "value out of range",
                format!(
                    "w({}, {}, {}) = {v} but the codomain has {n}",
                    c.object_label(key.obj),
                    c.arrow_name(key.arrow),
                    key.elem
                ),
            );
        }
    }
    if r.has_structural() {
        return Ok(r);
    }
    for k in fam.constraints(rho, keys) {
        if !fam.holds(&k, table) {
            let from = keys[k.from];
            r.law(
                "pi naturality",
                format!(
                    "f={}, g={}, u={}: B(g)(w(J,f,u)) = {} but w(K,g;f,A(g)(u)) = {}",
                    c.arrow_name(from.arrow),
                    c.arrow_name(k.g),
                    from.elem,
                    b.morph(k.g, k.env, table[k.from]),
                    table[k.to]
                ),
            );
        }
    }
    Ok(r)
}

/// All natural tables at `(I, rho)` in lexicographic order.
fn enumerate_fiber(fam: &Family<'_>, i: ObjId, rho: usize, pi_cap: usize) -> Result<PiFiber> {
    let keys = fam.keys(i, rho);
    let ranges: Vec<usize> = keys.iter().map(|k| fam.codomain(rho, k)).collect();
    let mut raw: usize = 1;
    for &n in &ranges {
        raw = raw.saturating_mul(n);
    }
    if raw > pi_cap {
        return Err(error::budget(
            format!(
                "candidate Pi tables at {}:{rho}",
                fam.a.ctx().base().object_label(i)
            ),
            pi_cap,
            0,
        ));
    }
    let filter = !mutation::active(Mutation::PiNoNaturalityFilter);
    let mut at: Vec<Vec<Constraint>> = vec![Vec::new(); keys.len()];
    if filter {
        for k in fam.constraints(rho, &keys) {
            at[k.from.max(k.to)].push(k);
        }
    }
    let mut tables = Vec::new();
    let mut table = vec![0; keys.len()];
    fn go(
        fam: &Family<'_>,
        ranges: &[usize],
        at: &[Vec<Constraint>],
        k: usize,
        table: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if k == ranges.len() {
            out.push(table.clone());
            return;
        }
        for v in 0..ranges[k] {
            table[k] = v;
            if at[k].iter().all(|c| fam.holds(c, table)) {
                go(fam, ranges, at, k + 1, table, out);
            }
        }
    }
    if raw > 0 {
        go(fam, &ranges, &at, 0, &mut table, &mut tables);
    }
    Ok(PiFiber {
        keys: Arc::new(keys),
        tables,
    })
}

/// `Pi(A, B)`: `Pi(I, rho)` holds every natural table over the canonical
/// keys, and a morphism `f: J -> I` sends `w` to `(K, g, v) |-> w(K, g;f, v)`.
///
/// Fails with [`Error::BudgetExceeded`] when some `(I, rho)` has more than
/// `pi_cap` raw candidate tables.
pub fn pi_ty(a: &Arc<TyInCtx>, b: &Arc<TyInCtx>, pi_cap: usize, exec: par::Exec) -> Result<PiTy> {
    expect_ext(a, b)?;
    let fam = Family {
        a,
        b,
        layout: ExtLayout::new(a),
    };
    let h = a.ctx();
    let c = h.base();
    let slots: Vec<(ObjId, usize)> = c
        .objects()
        .flat_map(|i| (0..h.size(i)).map(move |rho| (i, rho)))
        .collect();
    // mutations are thread-local, so stay on this thread while one is active
    let exec = if mutation::current().is_some() {
        par::Exec::Sequential
    } else {
        exec
    };
    let computed = par::map(exec, &slots, |&(i, rho)| {
        enumerate_fiber(&fam, i, rho, pi_cap)
    });
    let mut fibers: Vec<Vec<Fiber>> = c.objects().map(|i| Vec::with_capacity(h.size(i))).collect();
    for (&(i, _), fib) in slots.iter().zip(computed) {
        fibers[i.0].push(Fiber::Funcs(fib?));
    }
    let swap = mutation::active(Mutation::PiMorphCompOrder);
    let mut morph = Vec::with_capacity(c.num_arrows());
    for f in c.arrow_ids() {
        let (j, i) = (c.dom(f), c.cod(f));
        let mut rows = Vec::with_capacity(h.size(i));
        for rho in 0..h.size(i) {
            let Fiber::Funcs(src) = &fibers[i.0][rho] else {
                unreachable!()
            };
            let Fiber::Funcs(dst) = &fibers[j.0][h.restrict(f, rho)] else {
                unreachable!()
            };
            // position in the source table of each destination key (K, g, v)
            let lookup: Vec<usize> = dst
                .keys
                .iter()
                .map(|k| {
                    let gf = match c.compose(f, k.arrow) {
                        Some(fg) if swap => fg,
                        _ => c.comp(k.arrow, f),
                    };
                    src.key_index(&PiKey { arrow: gf, ..*k })
                        .ok_or_else(|| Error::Internal("reindexed Pi key missing".into()))
                })
                .collect::<Result<_>>()?;
            let row = src
                .tables
                .iter()
                .map(|w| {
                    let moved: Vec<usize> = lookup.iter().map(|&p| w[p]).collect();
                    dst.tables
                        .binary_search(&moved)
                        .map_err(|_| Error::Internal("reindexed Pi table is not natural".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        morph.push(rows);
    }
    Ok(PiTy {
        a: a.clone(),
        b: b.clone(),
        ty: Arc::new(TyInCtx::from_tables(h.clone(), fibers, morph)),
    })
}

/// `validate_ty` on `Pi(A, B)` plus [`is_pi_element`] on every element.
pub fn validate_pi(p: &PiTy) -> Report {
    let mut r = validate_ty(&p.ty);
    if r.has_structural() {
        return r;
    }
    let h = p.ty.ctx();
    for i in h.base().objects() {
        for rho in 0..h.size(i) {
            let Fiber::Funcs(fib) = p.ty.fiber(i, rho) else {
                r.structural(
                    "not a Pi fiber",
                    format!("{}:{rho}", h.base().object_label(i)),
                );
                continue;
            };
            for w in &fib.tables {
                match is_pi_element(&p.a, &p.b, i, rho, &fib.keys, w) {
                    Ok(e) => {
                        r.structural.extend(e.structural);
                        r.laws.extend(e.laws);
                    }
                    Err(e) => r.structural("malformed Pi element", e.to_string()),
                }
            }
        }
    }
    r
}

/// `lambda b` for `b: H.A |- B`: `w(J, f, u) = b(J, (f(rho), u))`.
pub fn lambda_tm(p: &PiTy, b: &TmInCtx) -> Result<TmInCtx> {
    if !same_ty(b.ty(), &p.b) {
        return Err(Error::TypeMismatch("the body is not typed at B".into()));
    }
    let layout = ExtLayout::new(&p.a);
    let h = p.ty.ctx();
    let unrestricted = mutation::active(Mutation::LambdaUnrestricted);
    let elem = h
        .base()
        .objects()
        .map(|i| {
            (0..h.size(i))
                .map(|rho| {
                    let Fiber::Funcs(fib) = p.ty.fiber(i, rho) else {
                        unreachable!()
                    };
                    let table: Vec<usize> = fib
                        .keys
                        .iter()
                        .map(|k| {
                            let env = if unrestricted {
                                clamp(rho, h.size(k.obj))
                            } else {
                                h.restrict(k.arrow, rho)
                            };
                            let u = clamp(k.elem, p.a.size(k.obj, env));
                            b.at(k.obj, layout.index(k.obj, env, u))
                        })
                        .collect();
                    fib.tables
                        .binary_search(&table)
                        .map_err(|_| Error::Internal("lambda table is not a Pi element".into()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TmInCtx::from_tables(p.ty.clone(), elem))
}

/// `app(w, u)`: `w(I, rho)` evaluated at `(I, id_I, u(I, rho))`.
pub fn app_tm(p: &PiTy, w: &TmInCtx, u: &TmInCtx) -> Result<TmInCtx> {
    if !same_ty(w.ty(), &p.ty) {
        return Err(Error::TypeMismatch(
            "the function is not typed at this Pi type".into(),
        ));
    }
    if !same_ty(u.ty(), &p.a) {
        return Err(Error::TypeMismatch("the argument is not typed at A".into()));
    }
    let ty = ty_subst(&p.b, &sub_single(u)?)?;
    let h = p.ty.ctx();
    let c = h.base();
    let skew = mutation::active(Mutation::AppNonIdentityArrow);
    let elem = c
        .objects()
        .map(|i| {
            (0..h.size(i))
                .map(|rho| {
                    let Fiber::Funcs(fib) = p.ty.fiber(i, rho) else {
                        unreachable!()
                    };
                    let table = &fib.tables[w.at(i, rho)];
                    if skew {
                        if let Some(pos) = fib.keys.iter().position(|k| !c.is_identity(k.arrow)) {
                            return Ok(clamp(table[pos], ty.size(i, rho)));
                        }
                    }
                    let key = PiKey {
                        obj: i,
                        arrow: c.id(i),
                        elem: u.at(i, rho),
                    };
                    fib.key_index(&key).map(|pos| table[pos]).ok_or_else(|| {
                        Error::Internal("identity key missing from a Pi table".into())
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TmInCtx::from_tables(Arc::new(ty), elem))
}
