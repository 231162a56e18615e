use std::sync::Arc;

use super::{expect_ext, same_ty};
use crate::catcore::ObjId;
use crate::cwf::{sub_single, ty_subst, ExtLayout, Fiber, TmInCtx, TyInCtx};
use crate::mutation::{self, clamp, Mutation};
use crate::{Error, Result};

/// `Sigma(A, B)` together with the families it was built from.
#[derive(Clone, Debug)]
pub struct SigmaTy {
    pub a: Arc<TyInCtx>,
    pub b: Arc<TyInCtx>,
    pub ty: Arc<TyInCtx>,
}

/// Index of the pair `(u, v)` in a `Pairs` fiber, found by position since
/// pairs are stored in lexicographic order.
fn pair_index(pairs: &[(usize, usize)], u: usize, v: usize) -> Option<usize> {
    pairs.binary_search(&(u, v)).ok()
}

/// `Sigma(A, B)(I, rho)` is the set of pairs `(u, v)` with `u` in `A(I, rho)`
/// and `v` in `B(I, (rho, u))`, and morphisms act componentwise.
pub fn sigma_ty(a: &Arc<TyInCtx>, b: &Arc<TyInCtx>) -> Result<SigmaTy> {
    expect_ext(a, b)?;
    let layout = ExtLayout::new(a);
    let h = a.ctx();
    let c = h.base();
    let fibers: Vec<Vec<Fiber>> = c
        .objects()
        .map(|i| {
            (0..h.size(i))
                .map(|rho| {
                    let mut pairs = Vec::new();
                    for u in 0..a.size(i, rho) {
                        let k = layout.index(i, rho, u);
                        pairs.extend((0..b.size(i, k)).map(|v| (u, v)));
                    }
                    Fiber::Pairs(pairs)
                })
                .collect()
        })
        .collect();
    let drop_second = mutation::active(Mutation::SigmaMorphDropsSecond);
    let mut morph = Vec::with_capacity(c.num_arrows());
    for f in c.arrow_ids() {
        let (j, i) = (c.dom(f), c.cod(f));
        let mut rows = Vec::with_capacity(h.size(i));
        for rho in 0..h.size(i) {
            let f_rho = h.restrict(f, rho);
            let Fiber::Pairs(src) = &fibers[i.0][rho] else {
                unreachable!()
            };
            let Fiber::Pairs(dst) = &fibers[j.0][f_rho] else {
                unreachable!()
            };
            let row = src
                .iter()
                .map(|&(u, v)| {
                    let u2 = a.morph(f, rho, u);
                    let k2 = layout.index(j, f_rho, u2);
                    let v2 = if drop_second {
                        clamp(v, b.size(j, k2))
                    } else {
                        b.morph(f, layout.index(i, rho, u), v)
                    };
                    pair_index(dst, u2, v2).ok_or_else(|| {
                        Error::Internal(format!("pair ({u2},{v2}) missing from a Sigma fiber"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        morph.push(rows);
    }
    Ok(SigmaTy {
        a: a.clone(),
        b: b.clone(),
        ty: Arc::new(TyInCtx::from_tables(h.clone(), fibers, morph)),
    })
}

/// `(u, v)` for `u: A` and `v: B[u]`.
pub fn pair_tm(s: &SigmaTy, u: &TmInCtx, v: &TmInCtx) -> Result<TmInCtx> {
    if !same_ty(u.ty(), &s.a) {
        return Err(Error::TypeMismatch(
            "the first component is not typed at A".into(),
        ));
    }
    let b_u = ty_subst(&s.b, &sub_single(u)?)?;
    if !same_ty(v.ty(), &b_u) {
        return Err(Error::TypeMismatch(
            "the second component is not typed at B[u]".into(),
        ));
    }
    let h = s.ty.ctx();
    let elem = h
        .base()
        .objects()
        .map(|i| {
            (0..h.size(i))
                .map(|rho| {
                    let Fiber::Pairs(pairs) = s.ty.fiber(i, rho) else {
                        unreachable!()
                    };
                    pair_index(pairs, u.at(i, rho), v.at(i, rho))
                        .ok_or_else(|| Error::Internal("pair missing from a Sigma fiber".into()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TmInCtx::from_tables(s.ty.clone(), elem))
}

fn check_sigma_term(s: &SigmaTy, pr: &TmInCtx) -> Result<()> {
    if same_ty(pr.ty(), &s.ty) {
        Ok(())
    } else {
        Err(Error::TypeMismatch(
            "the term is not typed at this Sigma type".into(),
        ))
    }
}

fn components(s: &SigmaTy, pr: &TmInCtx) -> Vec<Vec<(usize, usize)>> {
    let h = s.ty.ctx();
    h.base()
        .objects()
        .map(|i| {
            (0..h.size(i))
                .map(|rho| {
                    let Fiber::Pairs(pairs) = s.ty.fiber(i, rho) else {
                        unreachable!()
                    };
                    pairs[pr.at(i, rho)]
                })
                .collect()
        })
        .collect()
}

/// `pr.1: A`.
pub fn fst_tm(s: &SigmaTy, pr: &TmInCtx) -> Result<TmInCtx> {
    check_sigma_term(s, pr)?;
    let swap = mutation::active(Mutation::FstReturnsSnd);
    let elem = components(s, pr)
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .enumerate()
                .map(|(rho, (u, v))| {
                    if swap {
                        clamp(v, s.a.size(ObjId(i), rho))
                    } else {
                        u
                    }
                })
                .collect()
        })
        .collect();
    Ok(TmInCtx::from_tables(s.a.clone(), elem))
}

/// `pr.2: B[pr.1]`.
pub fn snd_tm(s: &SigmaTy, pr: &TmInCtx) -> Result<TmInCtx> {
    let fst = fst_tm(s, pr)?;
    let ty = ty_subst(&s.b, &sub_single(&fst)?)?;
    let elem = components(s, pr)
        .into_iter()
        .map(|row| row.into_iter().map(|(_, v)| v).collect())
        .collect();
    Ok(TmInCtx::from_tables(Arc::new(ty), elem))
}
