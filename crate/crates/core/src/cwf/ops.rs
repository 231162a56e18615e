use std::sync::Arc;

use super::ty::{validate_ty, Ctx, Fiber, TmInCtx, TyInCtx};
use crate::catcore::{op_cat, ArrId, FinCategory, ObjId};
use crate::mutation::{self, clamp, Mutation};
use crate::presheaf::{
    category_of_elements, compose_maps, element_offsets, for_each_presheaf, identity_map,
    same_presheaf, singleton_presheaf, FinSet, Presheaf, PshMap,
};
use crate::{error, Error, Result};

/// Context maps are presheaf maps.
pub type Sub = PshMap;

/// The terminal context: every set is `{0}`.
pub fn empty_ctx(c: &Arc<FinCategory>) -> Ctx {
    singleton_presheaf(c)
}

/// Addressing of the pairs `(rho, u)` that make up `H.T(I)`.
#[derive(Clone, Debug)]
pub struct ExtLayout {
    /// `offsets[I][rho]`: index of `(rho, 0)` in `H.T(I)`.
    offsets: Vec<Vec<usize>>,
    /// `pairs[I][k] = (rho, u)`
    pairs: Vec<Vec<(usize, usize)>>,
}

impl ExtLayout {
    pub fn new(t: &TyInCtx) -> Self {
        let mut offsets = Vec::with_capacity(t.fibers.len());
        let mut pairs = Vec::with_capacity(t.fibers.len());
        for row in &t.fibers {
            let mut off = Vec::with_capacity(row.len());
            let mut ps = Vec::new();
            for (rho, fib) in row.iter().enumerate() {
                off.push(ps.len());
                ps.extend((0..fib.len()).map(|u| (rho, u)));
            }
            offsets.push(off);
            pairs.push(ps);
        }
        Self { offsets, pairs }
    }

    pub fn index(&self, i: ObjId, rho: usize, u: usize) -> usize {
        self.offsets[i.0][rho] + u
    }

    pub fn pair(&self, i: ObjId, k: usize) -> (usize, usize) {
        self.pairs[i.0][k]
    }

    pub fn size(&self, i: ObjId) -> usize {
        self.pairs[i.0].len()
    }
}

/// `H.T`: `set(I)` holds the pairs `(rho, u)` in lexicographic order and
/// restriction along `f` is `(f(rho), T(f)(u))`.
pub fn ctx_extend(t: &TyInCtx) -> Ctx {
    let layout = ExtLayout::new(t);
    let h = &*t.ctx;
    let c = h.base();
    let sets = c
        .objects()
        .map(|i| {
            let labels = layout.pairs[i.0]
                .iter()
                .map(|&(rho, u)| format!("({},{})", h.set(i).label(rho), t.fiber(i, rho).label(u)))
                .collect();
            FinSet {
                size: layout.size(i),
                labels: Some(labels),
            }
        })
        .collect();
    let broken = mutation::active(Mutation::ExtendRestrictionBroken);
    let restrict = c
        .arrow_ids()
        .map(|f| {
            let (j, i) = (c.dom(f), c.cod(f));
            layout.pairs[i.0]
                .iter()
                .map(|&(rho, u)| {
                    let f_rho = h.restrict(f, rho);
                    let v = if broken {
                        clamp(u, t.size(j, f_rho))
                    } else {
                        t.morph(f, rho, u)
                    };
                    layout.index(j, f_rho, v)
                })
                .collect()
        })
        .collect();
    Presheaf::from_tables(c.clone(), sets, restrict)
}

/// `p: H.T -> H`, `(rho, u) |-> rho`. `ext` must be `ctx_extend(t)`.
pub fn proj_p_into(t: &TyInCtx, ext: &Arc<Ctx>) -> Sub {
    let layout = ExtLayout::new(t);
    let h = &t.ctx;
    let second = mutation::active(Mutation::ProjSecond);
    let components = h
        .base()
        .objects()
        .map(|i| {
            layout.pairs[i.0]
                .iter()
                .map(|&(rho, u)| if second { clamp(u, h.size(i)) } else { rho })
                .collect()
        })
        .collect();
    PshMap {
        source: ext.clone(),
        target: h.clone(),
        components,
    }
}

pub fn proj_p(t: &TyInCtx) -> Sub {
    proj_p_into(t, &Arc::new(ctx_extend(t)))
}

/// `q: H.T |- (T)p`, `(rho, u) |-> u`.
pub fn var_q(t: &TyInCtx) -> Result<TmInCtx> {
    let ext = Arc::new(ctx_extend(t));
    let p = proj_p_into(t, &ext);
    var_q_along(t, &p)
}

/// `q` typed at `(T)p` for a projection `p` already built over `ctx_extend(t)`.
pub fn var_q_along(t: &TyInCtx, p: &Sub) -> Result<TmInCtx> {
    let layout = ExtLayout::new(t);
    let ty = Arc::new(ty_subst(t, p)?);
    let constant = mutation::active(Mutation::QConstant);
    let elem = t
        .ctx
        .base()
        .objects()
        .map(|i| {
            layout.pairs[i.0]
                .iter()
                .map(|&(_, u)| if constant { 0 } else { u })
                .collect()
        })
        .collect();
    Ok(TmInCtx { ty, elem })
}

fn check_sub_into(sigma: &Sub, ctx: &Arc<Ctx>, what: &str) -> Result<()> {
    if same_presheaf(&sigma.target, ctx) {
        Ok(())
    } else {
        Err(Error::ContextMismatch(format!(
            "the context map does not land in the context of the {what}"
        )))
    }
}

/// `(T)sigma` for `sigma: H -> G` and `T` over `G`.
pub fn ty_subst(t: &TyInCtx, sigma: &Sub) -> Result<TyInCtx> {
    check_sub_into(sigma, &t.ctx, "type")?;
    let h = &sigma.source;
    let c = h.base();
    let ignore = mutation::active(Mutation::TySubstIgnoresSub);
    let fibers = c
        .objects()
        .map(|i| {
            (0..h.size(i))
                .map(|rho| t.fibers[i.0][sigma.apply(i, rho)].clone())
                .collect()
        })
        .collect();
    let morph = c
        .arrow_ids()
        .map(|f| {
            let i = c.cod(f);
            (0..h.size(i))
                .map(|rho| {
                    let at = if ignore {
                        clamp(rho, t.ctx.size(i))
                    } else {
                        sigma.apply(i, rho)
                    };
                    t.morph[f.0][at].clone()
                })
                .collect()
        })
        .collect();
    Ok(TyInCtx {
        ctx: h.clone(),
        fibers,
        morph,
    })
}

/// `(t)sigma`, typed at `(T)sigma`.
pub fn tm_subst(t: &TmInCtx, sigma: &Sub) -> Result<TmInCtx> {
    let ty = Arc::new(ty_subst(&t.ty, sigma)?);
    let h = &sigma.source;
    let ignore = mutation::active(Mutation::TmSubstIgnoresSub);
    let elem = h
        .base()
        .objects()
        .map(|i| {
            (0..h.size(i))
                .map(|rho| {
                    let at = if ignore {
                        clamp(rho, t.ty.ctx.size(i))
                    } else {
                        sigma.apply(i, rho)
                    };
                    t.elem[i.0][at]
                })
                .collect()
        })
        .collect();
    Ok(TmInCtx { ty, elem })
}

/// `(sigma; u): H -> G.A` for `sigma: H -> G` and `u` at `(A)sigma`.
pub fn sub_pair(sigma: &Sub, u: &TmInCtx, a: &TyInCtx) -> Result<Sub> {
    sub_pair_into(sigma, u, a, &Arc::new(ctx_extend(a)))
}

/// [`sub_pair`] landing in an already built `ext = ctx_extend(a)`.
pub fn sub_pair_into(sigma: &Sub, u: &TmInCtx, a: &TyInCtx, ext: &Arc<Ctx>) -> Result<Sub> {
    if !same_presheaf(&u.ty.ctx, &sigma.source) {
        return Err(Error::ContextMismatch(
            "the term does not live over the source of the context map".into(),
        ));
    }
    let expected = ty_subst(a, sigma)?;
    if *u.ty != expected {
        return Err(Error::TypeMismatch(
            "the term is not typed at (A)sigma".into(),
        ));
    }
    let layout = ExtLayout::new(a);
    let h = &sigma.source;
    let drop = mutation::active(Mutation::SubPairDropsTerm);
    let components = h
        .base()
        .objects()
        .map(|i| {
            (0..h.size(i))
                .map(|rho| {
                    let v = if drop { 0 } else { u.elem[i.0][rho] };
                    layout.index(i, sigma.apply(i, rho), v)
                })
                .collect()
        })
        .collect();
    Ok(PshMap {
        source: h.clone(),
        target: ext.clone(),
        components,
    })
}

/// `[u] = (1; u): H -> H.A` where `u: H |- A`.
pub fn sub_single(u: &TmInCtx) -> Result<Sub> {
    sub_pair(&identity_map(&u.ty.ctx), u, &u.ty)
}

/// The shifted substitution `(sigma p, q): H.(A)sigma -> G.A`, built from
/// the primitives.
pub fn shift(sigma: &Sub, a: &TyInCtx) -> Result<Sub> {
    let a_sigma = ty_subst(a, sigma)?;
    let ext = Arc::new(ctx_extend(&a_sigma));
    let p = proj_p_into(&a_sigma, &ext);
    let q = var_q_along(&a_sigma, &p)?;
    let sigma_p = compose_maps(sigma, &p)?;
    sub_pair(&sigma_p, &q, a)
}

/// The constant family `A` over `H` with identity morphisms.
pub fn discrete_ty(h: &Arc<Ctx>, a: FinSet) -> TyInCtx {
    let c = h.base();
    let fibers = c
        .objects()
        .map(|i| vec![Fiber::Atoms(a.clone()); h.size(i)])
        .collect();
    let morph = c
        .arrow_ids()
        .map(|f| vec![(0..a.size).collect(); h.size(c.cod(f))])
        .collect();
    TyInCtx {
        ctx: h.clone(),
        fibers,
        morph,
    }
}

/// The constant term `a` of [`discrete_ty`].
pub fn discrete_tm(h: &Arc<Ctx>, a: FinSet, elem: usize) -> Result<TmInCtx> {
    if elem >= a.size {
        return Err(Error::OutOfRange(format!(
            "element {elem} of a set with {}",
            a.size
        )));
    }
    let elems = h.sets().iter().map(|s| vec![elem; s.size]).collect();
    Ok(TmInCtx {
        ty: Arc::new(discrete_ty(h, a)),
        elem: elems,
    })
}

/// Every term of `t`, lexicographic on the element table (objects in
/// index order, then environments).
pub fn enumerate_terms(t: &Arc<TyInCtx>, cap: usize) -> Result<Vec<TmInCtx>> {
    let mut out = Vec::new();
    for_each_term(t, &mut |elem| {
        if out.len() == cap {
            return Err(error::budget("terms", cap, out.len()));
        }
        out.push(TmInCtx {
            ty: t.clone(),
            elem: elem.to_vec(),
        });
        Ok(true)
    })?;
    Ok(out)
}

/// Streams the terms of [`enumerate_terms`]; the visitor returns `false` to stop.
pub fn for_each_term(
    t: &TyInCtx,
    visit: &mut dyn FnMut(&[Vec<usize>]) -> Result<bool>,
) -> Result<()> {
    validate_ty(t).into_result()?;
    let h = &*t.ctx;
    let c = h.base();
    let offsets = element_offsets(h);
    let slots: Vec<(ObjId, usize)> = c
        .objects()
        .flat_map(|i| (0..h.size(i)).map(move |rho| (i, rho)))
        .collect();
    // (f, rho) with its two slots, checked once the later one is filled
    let mut checks: Vec<Vec<(ArrId, usize)>> = vec![Vec::new(); slots.len()];
    for f in c.arrow_ids() {
        if c.is_identity(f) {
            continue;
        }
        let (j, i) = (c.dom(f), c.cod(f));
        for rho in 0..h.size(i) {
            let a = offsets[i.0] + rho;
            let b = offsets[j.0] + h.restrict(f, rho);
            checks[a.max(b)].push((f, rho));
        }
    }
    let mut elem: Vec<Vec<usize>> = c.objects().map(|i| vec![0; h.size(i)]).collect();

    fn go(
        t: &TyInCtx,
        slots: &[(ObjId, usize)],
        checks: &[Vec<(ArrId, usize)>],
        k: usize,
        elem: &mut Vec<Vec<usize>>,
        visit: &mut dyn FnMut(&[Vec<usize>]) -> Result<bool>,
    ) -> Result<bool> {
        if k == slots.len() {
            return visit(elem);
        }
        let (i, rho) = slots[k];
        let h = &*t.ctx;
        let c = h.base();
        for v in 0..t.size(i, rho) {
            elem[i.0][rho] = v;
            let ok = checks[k].iter().all(|&(f, r)| {
                let (j, i2) = (c.dom(f), c.cod(f));
                t.morph(f, r, elem[i2.0][r]) == elem[j.0][h.restrict(f, r)]
            });
            if ok && !go(t, slots, checks, k + 1, elem, visit)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    go(t, &slots, &checks, 0, &mut elem, visit)?;
    Ok(())
}

/// Index of the arrow `(f at rho)` of the category of elements.
fn element_arrow_offsets(h: &Ctx) -> (Vec<usize>, usize) {
    let c = h.base();
    let mut out = Vec::with_capacity(c.num_arrows());
    let mut n = 0;
    for f in c.arrow_ids() {
        out.push(n);
        n += h.size(c.cod(f));
    }
    (out, n)
}

/// Types over `H` are exactly presheaves on the opposite of the category of
/// elements of `H`; this is that base category.
pub fn type_base(h: &Ctx) -> Result<Arc<FinCategory>> {
    Ok(Arc::new(op_cat(&category_of_elements(h)?)?))
}

/// Reads a presheaf on [`type_base`] as a type over `h`.
pub fn ty_from_presheaf(h: &Arc<Ctx>, p: &Presheaf) -> Result<TyInCtx> {
    let c = h.base();
    let offsets = element_offsets(h);
    let (arrows, n_arrows) = element_arrow_offsets(h);
    if p.sets().len() != h.total_elements() || p.tables().len() != n_arrows {
        return Err(Error::CategoryMismatch(
            "the presheaf is not over the elements of the context".into(),
        ));
    }
    let fibers = c
        .objects()
        .map(|i| {
            (0..h.size(i))
                .map(|rho| Fiber::Atoms(p.set(ObjId(offsets[i.0] + rho)).clone()))
                .collect()
        })
        .collect();
    let morph = c
        .arrow_ids()
        .map(|f| {
            (0..h.size(c.cod(f)))
                .map(|rho| p.table(ArrId(arrows[f.0] + rho)).to_vec())
                .collect()
        })
        .collect();
    Ok(TyInCtx {
        ctx: h.clone(),
        fibers,
        morph,
    })
}

/// The presheaf on [`type_base`] corresponding to `t`.
pub fn ty_to_presheaf(t: &TyInCtx, base: &Arc<FinCategory>) -> Presheaf {
    let sets = t
        .fibers
        .iter()
        .flat_map(|row| row.iter().map(|f| FinSet::new(f.len())))
        .collect();
    let restrict = t
        .morph
        .iter()
        .flat_map(|rows| rows.iter().cloned())
        .collect();
    Presheaf::from_tables(base.clone(), sets, restrict)
}

/// Streams every type over `h` with fibers of at most `max_set` elements,
/// in the order of [`for_each_presheaf`] on [`type_base`].
pub fn for_each_type(
    h: &Arc<Ctx>,
    max_set: usize,
    visit: &mut dyn FnMut(TyInCtx) -> Result<bool>,
) -> Result<()> {
    let base = type_base(h)?;
    for_each_presheaf(&base, max_set, &mut |p| visit(ty_from_presheaf(h, &p)?))
}

pub fn enumerate_types(h: &Arc<Ctx>, max_set: usize, cap: usize) -> Result<Vec<TyInCtx>> {
    let mut out = Vec::new();
    for_each_type(h, max_set, &mut |t| {
        if out.len() == cap {
            return Err(error::budget("types", cap, out.len()));
        }
        out.push(t);
        Ok(true)
    })?;
    Ok(out)
}
