//! Dependent sums and products with their introduction and elimination
//! terms.

mod pi;
mod sigma;

use std::sync::Arc;

pub use pi::{app_tm, is_pi_element, lambda_tm, pi_ty, validate_pi, PiTy, DEFAULT_PI_CAP};
pub use sigma::{fst_tm, pair_tm, sigma_ty, snd_tm, SigmaTy};

use crate::cwf::{ctx_extend, TyInCtx};
use crate::{Error, Result};

pub(crate) fn same_ty(x: &Arc<TyInCtx>, y: &TyInCtx) -> bool {
    std::ptr::eq(&**x, y) || **x == *y
}

/// `B` must live over `H.A`.
pub(crate) fn expect_ext(a: &TyInCtx, b: &TyInCtx) -> Result<()> {
    if **b.ctx() == ctx_extend(a) {
        Ok(())
    } else {
        Err(Error::ContextMismatch(
            "B does not live over the extension of its context by A".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catcore::{named, FinCategory, ObjId};
    use crate::cwf::{
        discrete_ty, empty_ctx, enumerate_terms, for_each_type, proj_p_into, shift, sub_single,
        tm_subst, ty_subst, validate_tm, validate_ty, var_q_along, Ctx, Fiber,
    };
    use crate::par::Exec;
    use crate::presheaf::{yoneda, FinSet};

    fn ctx(c: FinCategory) -> Arc<Ctx> {
        Arc::new(empty_ctx(&Arc::new(c)))
    }

    fn discrete_pair(h: &Arc<Ctx>, na: usize, nb: usize) -> (Arc<TyInCtx>, Arc<TyInCtx>) {
        let a = Arc::new(discrete_ty(h, FinSet::new(na)));
        let ext = Arc::new(ctx_extend(&a));
        let b = Arc::new(discrete_ty(&ext, FinSet::new(nb)));
        (a, b)
    }

    #[test]
    fn terminal_counts() {
        let h = ctx(named::terminal());
        let (a, b) = discrete_pair(&h, 2, 3);
        let s = sigma_ty(&a, &b).unwrap();
        assert_eq!(s.ty.size(ObjId(0), 0), 6);
        let p = pi_ty(&a, &b, DEFAULT_PI_CAP, Exec::Sequential).unwrap();
        assert_eq!(p.ty.size(ObjId(0), 0), 9);
        let (a0, b0) = discrete_pair(&h, 0, 3);
        assert_eq!(
            pi_ty(&a0, &b0, DEFAULT_PI_CAP, Exec::Sequential)
                .unwrap()
                .ty
                .size(ObjId(0), 0),
            1
        );
        assert_eq!(sigma_ty(&a0, &b0).unwrap().ty.size(ObjId(0), 0), 0);
    }

    #[test]
    fn empty_b_fiber_contributes_nothing() {
        let h = ctx(named::terminal());
        let a = Arc::new(discrete_ty(&h, FinSet::new(2)));
        let ext = Arc::new(ctx_extend(&a));
        // B(*, (0, 0)) = {0, 1}, B(*, (0, 1)) = {}
        let b = Arc::new(TyInCtx::from_tables(
            ext,
            vec![vec![Fiber::atoms(2), Fiber::atoms(0)]],
            vec![vec![vec![0, 1], vec![]]],
        ));
        assert!(validate_ty(&b).is_ok());
        let s = sigma_ty(&a, &b).unwrap();
        assert_eq!(s.ty.fiber(ObjId(0), 0), &Fiber::Pairs(vec![(0, 0), (0, 1)]));
        let p = pi_ty(&a, &b, 100, Exec::Sequential).unwrap();
        assert_eq!(p.ty.size(ObjId(0), 0), 0);
    }

    #[test]
    fn pi_cap_is_enforced() {
        let h = ctx(named::terminal());
        let (a, b) = discrete_pair(&h, 3, 3);
        assert!(matches!(
            pi_ty(&a, &b, 26, Exec::Sequential),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(pi_ty(&a, &b, 27, Exec::Sequential).is_ok());
    }

    /// Raw filter over all candidate tables, against the pruned search.
    #[test]
    fn walking_arrow_pi_matches_exhaustive_filter() {
        let w = Arc::new(named::walking_arrow());
        let b_obj = w.find_object("b").unwrap();
        for h in [Arc::new(empty_ctx(&w)), Arc::new(yoneda(&w, b_obj))] {
            let mut checked = 0;
            for_each_type(&h, 2, &mut |a| {
                let a = Arc::new(a);
                let ext = Arc::new(ctx_extend(&a));
                for_each_type(&ext, 2, &mut |b| {
                    let b = Arc::new(b);
                    let p = pi_ty(&a, &b, DEFAULT_PI_CAP, Exec::Sequential).unwrap();
                    assert!(validate_pi(&p).is_ok());
                    for i in w.objects() {
                        for rho in 0..h.size(i) {
                            let Fiber::Funcs(fib) = p.ty.fiber(i, rho) else {
                                panic!()
                            };
                            let mut count = 0;
                            let mut table = vec![0; fib.keys.len()];
                            let ranges: Vec<usize> = fib
                                .keys
                                .iter()
                                .map(|k| {
                                    let env = h.restrict(k.arrow, rho);
                                    let idx =
                                        (0..env).map(|r| a.size(k.obj, r)).sum::<usize>() + k.elem;
                                    b.size(k.obj, idx)
                                })
                                .collect();
                            if ranges.iter().all(|&n| n > 0) {
                                'odo: loop {
                                    if is_pi_element(&a, &b, i, rho, &fib.keys, &table)
                                        .unwrap()
                                        .is_ok()
                                    {
                                        count += 1;
                                    }
                                    for k in (0..table.len()).rev() {
                                        table[k] += 1;
                                        if table[k] < ranges[k] {
                                            continue 'odo;
                                        }
                                        table[k] = 0;
                                    }
                                    break;
                                }
                            }
                            assert_eq!(count, fib.tables.len());
                        }
                    }
                    checked += 1;
                    Ok(checked % 7 != 0)
                })?;
                Ok(checked < 200)
            })
            .unwrap();
        }
    }

    #[test]
    fn flipped_entry_has_a_witness() {
        let w = Arc::new(named::walking_arrow());
        let h = Arc::new(empty_ctx(&w));
        let (a, b) = discrete_pair(&h, 2, 2);
        let p = pi_ty(&a, &b, DEFAULT_PI_CAP, Exec::Sequential).unwrap();
        let bo = w.find_object("b").unwrap();
        let Fiber::Funcs(fib) = p.ty.fiber(bo, 0) else {
            panic!()
        };
        // keys at b: (a, f, 0), (a, f, 1), (b, id_b, 0), (b, id_b, 1); constant along f
        assert_eq!(fib.keys.len(), 4);
        assert_eq!(fib.tables.len(), 4);
        let mut t = fib.tables[0].clone();
        t[0] = 1 - t[0];
        let r = is_pi_element(&a, &b, bo, 0, &fib.keys, &t).unwrap();
        assert!(r.mentions("pi naturality"));
        assert!(r.laws.iter().any(|v| v.witness.contains("g=f")));
        assert!(is_pi_element(&a, &b, bo, 0, &fib.keys[1..], &t[1..]).is_err());
    }

    /// The first type with every fiber inhabited and some morphism that is
    /// not a bijection.
    fn pick_type(h: &Arc<Ctx>) -> Arc<TyInCtx> {
        let mut pick = None;
        for_each_type(h, 2, &mut |t| {
            let inhabited = t.fibers().iter().flatten().all(|f| !f.is_empty());
            let collapsing = t.morph_tables().iter().flatten().any(|row| {
                let mut seen = row.clone();
                seen.sort();
                seen.dedup();
                seen.len() < row.len()
            });
            if inhabited && collapsing {
                pick = Some(t);
                return Ok(false);
            }
            Ok(true)
        })
        .unwrap();
        Arc::new(pick.expect("a suitable type"))
    }

    fn chain_fixture() -> (Arc<TyInCtx>, Arc<TyInCtx>) {
        let c = Arc::new(named::chain3());
        let h = Arc::new(yoneda(&c, c.find_object("c").unwrap()));
        let a = pick_type(&h);
        let b = pick_type(&Arc::new(ctx_extend(&a)));
        (a, b)
    }

    #[test]
    fn sigma_laws() {
        let (a, b) = chain_fixture();
        let s = sigma_ty(&a, &b).unwrap();
        assert!(validate_ty(&s.ty).is_ok());
        let terms = enumerate_terms(&s.ty, 10_000).unwrap();
        assert!(!terms.is_empty());
        for pr in &terms {
            let x = fst_tm(&s, pr).unwrap();
            let y = snd_tm(&s, pr).unwrap();
            assert!(validate_tm(&x).is_ok() && validate_tm(&y).is_ok());
            let back = pair_tm(&s, &x, &y).unwrap();
            assert_eq!(&back, pr);
            assert_eq!(fst_tm(&s, &back).unwrap(), x);
            assert_eq!(snd_tm(&s, &back).unwrap(), y);
        }
    }

    #[test]
    fn pi_laws() {
        let (a, b) = chain_fixture();
        let p = pi_ty(&a, &b, DEFAULT_PI_CAP, Exec::Sequential).unwrap();
        assert!(validate_pi(&p).is_ok());
        let fs = enumerate_terms(&p.ty, 10_000).unwrap();
        let us = enumerate_terms(&a, 10_000).unwrap();
        assert!(!fs.is_empty() && !us.is_empty());
        let bodies = enumerate_terms(&b, 10_000).unwrap();
        // beta
        for body in &bodies {
            let lam = lambda_tm(&p, body).unwrap();
            assert!(validate_tm(&lam).is_ok());
            for u in &us {
                let lhs = app_tm(&p, &lam, u).unwrap();
                let rhs = tm_subst(body, &sub_single(u).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        // eta: f = lambda(app((f)p, q))
        let ext = Arc::new(ctx_extend(&a));
        let pr = proj_p_into(&a, &ext);
        let q = var_q_along(&a, &pr).unwrap();
        let ap = Arc::new(ty_subst(&a, &pr).unwrap());
        let bp = Arc::new(ty_subst(&b, &shift(&pr, &a).unwrap()).unwrap());
        let pw = pi_ty(&ap, &bp, DEFAULT_PI_CAP, Exec::Sequential).unwrap();
        assert_eq!(*pw.ty, ty_subst(&p.ty, &pr).unwrap());
        for f in &fs {
            let fp = tm_subst(f, &pr).unwrap();
            let body = app_tm(&pw, &fp, &q).unwrap();
            assert_eq!(**body.ty(), *b);
            assert_eq!(&lambda_tm(&p, &body).unwrap(), f);
        }
    }

    #[test]
    fn app_of_lambda_q_is_identity() {
        let (a, _) = chain_fixture();
        let ext = Arc::new(ctx_extend(&a));
        let pr = proj_p_into(&a, &ext);
        let q = Arc::new(var_q_along(&a, &pr).unwrap());
        let b = q.ty().clone();
        let p = pi_ty(&a, &b, DEFAULT_PI_CAP, Exec::Sequential).unwrap();
        let lam = lambda_tm(&p, &q).unwrap();
        for u in enumerate_terms(&a, 1000).unwrap() {
            assert_eq!(app_tm(&p, &lam, &u).unwrap().table(), u.table());
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let (a, b) = chain_fixture();
        let s = pi_ty(&a, &b, DEFAULT_PI_CAP, Exec::Sequential).unwrap();
        let p = pi_ty(&a, &b, DEFAULT_PI_CAP, Exec::Parallel).unwrap();
        assert_eq!(*s.ty, *p.ty);
    }
}
