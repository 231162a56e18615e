//! Bounded enumeration of functors and natural transformations, and the
//! functor category built from them.

use std::collections::HashMap;
use std::sync::Arc;

use super::category::{validate_category, ArrId, Arrow, FinCategory, ObjId};
use super::functor::{identity_trans, same_category, trans_comp, Functor, NatTrans};
use crate::{error, Error, Result};

/// All functors `C -> D`, lexicographic on the object table and then on the
/// arrow table. Errors once more than `cap` functors exist.
pub fn enumerate_functors(
    c: &Arc<FinCategory>,
    d: &Arc<FinCategory>,
    cap: usize,
) -> Result<Vec<Functor>> {
    validate_category(c).into_result()?;
    validate_category(d).into_result()?;
    let (nc, nd) = (c.num_objects(), d.num_objects());
    let mut out = Vec::new();
    if nc > 0 && nd == 0 {
        return Ok(out);
    }
    // composition constraints, indexed by the largest arrow they mention
    let na = c.num_arrows();
    let mut constraints: Vec<Vec<(ArrId, ArrId, ArrId)>> = vec![Vec::new(); na];
    for (f, g, h) in c.composition_entries() {
        let last = f.0.max(g.0).max(h.0);
        constraints[last].push((f, g, h));
    }
    let mut ob_map = vec![ObjId(0); nc];
    loop {
        let mut arr_map = vec![ArrId(0); na];
        arrows(c, d, &ob_map, &constraints, 0, &mut arr_map, &mut |am| {
            if out.len() == cap {
                return Err(error::budget("functors", cap, out.len()));
            }
            out.push(Functor {
                source: c.clone(),
                target: d.clone(),
                ob_map: ob_map.clone(),
                arr_map: am.to_vec(),
            });
            Ok(())
        })?;
        // next object table (odometer, last position fastest)
        let mut i = nc;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            ob_map[i].0 += 1;
            if ob_map[i].0 < nd {
                break;
            }
            ob_map[i] = ObjId(0);
        }
    }
}

fn arrows(
    c: &FinCategory,
    d: &FinCategory,
    ob_map: &[ObjId],
    constraints: &[Vec<(ArrId, ArrId, ArrId)>],
    i: usize,
    arr_map: &mut Vec<ArrId>,
    emit: &mut dyn FnMut(&[ArrId]) -> Result<()>,
) -> Result<()> {
    if i == arr_map.len() {
        return emit(arr_map);
    }
    let f = ArrId(i);
    let (x, y) = (ob_map[c.dom(f).0], ob_map[c.cod(f).0]);
    let candidates = if c.is_identity(f) {
        vec![d.id(x)]
    } else {
        d.hom(x, y)
    };
    for g in candidates {
        arr_map[i] = g;
        let ok = constraints[i]
            .iter()
            .all(|&(p, q, r)| arr_map[r.0] == d.comp(arr_map[p.0], arr_map[q.0]));
        if ok {
            arrows(c, d, ob_map, constraints, i + 1, arr_map, emit)?;
        }
    }
    Ok(())
}

/// All natural transformations `F => G`, lexicographic on the component table.
pub fn enumerate_nat_trans(f: &Functor, g: &Functor, cap: usize) -> Result<Vec<NatTrans>> {
    if !same_category(&f.source, &g.source) || !same_category(&f.target, &g.target) {
        return Err(Error::CategoryMismatch(
            "functors do not share source and target".into(),
        ));
    }
    let (c, d) = (&*f.source, &*f.target);
    let choices: Vec<Vec<ArrId>> = c.objects().map(|x| d.hom(f.ob(x), g.ob(x))).collect();
    let mut out = Vec::new();
    if choices.iter().any(Vec::is_empty) {
        return Ok(out);
    }
    // naturality squares, indexed by the larger of the two objects involved
    let mut squares: Vec<Vec<ArrId>> = vec![Vec::new(); c.num_objects()];
    for a in c.arrow_ids() {
        squares[c.dom(a).0.max(c.cod(a).0)].push(a);
    }
    let mut comps = vec![ArrId(0); c.num_objects()];
    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        c: &FinCategory,
        d: &FinCategory,
        f: &Functor,
        g: &Functor,
        choices: &[Vec<ArrId>],
        squares: &[Vec<ArrId>],
        comps: &mut Vec<ArrId>,
        out: &mut Vec<NatTrans>,
        cap: usize,
    ) -> Result<()> {
        if i == comps.len() {
            if out.len() == cap {
                return Err(error::budget("natural transformations", cap, out.len()));
            }
            out.push(NatTrans {
                from: f.clone(),
                to: g.clone(),
                components: comps.clone(),
            });
            return Ok(());
        }
        for &a in &choices[i] {
            comps[i] = a;
            let natural = squares[i].iter().all(|&h| {
                let (x, y) = (c.dom(h), c.cod(h));
                d.comp(comps[x.0], g.arr(h)) == d.comp(f.arr(h), comps[y.0])
            });
            if natural {
                go(i + 1, c, d, f, g, choices, squares, comps, out, cap)?;
            }
        }
        Ok(())
    }
    go(0, c, d, f, g, &choices, &squares, &mut comps, &mut out, cap)?;
    Ok(out)
}

/// The functor category `FUN(C, D)`: objects are the enumerated functors,
/// arrows all natural transformations between them (grouped by source then
/// target functor), composition is vertical composition.
///
/// `cap` bounds both the functor enumeration and each hom-set enumeration.
pub fn functor_category(
    c: &Arc<FinCategory>,
    d: &Arc<FinCategory>,
    cap: usize,
) -> Result<FinCategory> {
    let functors = enumerate_functors(c, d, cap)?;
    let objects: Vec<String> = (0..functors.len()).map(|i| format!("F{i}")).collect();
    let mut arrows = Vec::new();
    let mut trans = Vec::new();
    let mut index: HashMap<(usize, usize, Vec<ArrId>), ArrId> = HashMap::new();
    for (i, fi) in functors.iter().enumerate() {
        for (j, fj) in functors.iter().enumerate() {
            for t in enumerate_nat_trans(fi, fj, cap)? {
                let id = ArrId(arrows.len());
                index.insert((i, j, t.components.clone()), id);
                arrows.push(Arrow {
                    name: format!("t{}", id.0),
                    dom: ObjId(i),
                    cod: ObjId(j),
                });
                trans.push((i, j, t));
            }
        }
    }
    let ids = functors
        .iter()
        .enumerate()
        .map(|(i, f)| index[&(i, i, identity_trans(f).components)])
        .collect();
    let mut entries = Vec::new();
    for (a, (i, j, t1)) in trans.iter().enumerate() {
        for (b, (j2, k, t2)) in trans.iter().enumerate() {
            if j != j2 {
                continue;
            }
            let t = trans_comp(t1, t2)?;
            let h = index.get(&(*i, *k, t.components)).copied().ok_or_else(|| {
                Error::Internal("composite transformation missing from enumeration".into())
            })?;
            entries.push((ArrId(a), ArrId(b), h));
        }
    }
    FinCategory::from_tables(objects, arrows, ids, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catcore::functor::{
        constant_functor, identity_functor, validate_functor, validate_nat_trans,
    };
    use crate::catcore::{discrete_cat, named};

    fn arc(c: FinCategory) -> Arc<FinCategory> {
        Arc::new(c)
    }

    /// Every raw pair of tables, filtered by the validator.
    fn brute_force_functors(c: &Arc<FinCategory>, d: &Arc<FinCategory>) -> Vec<Functor> {
        let (nc, na) = (c.num_objects(), c.num_arrows());
        let (nd, nb) = (d.num_objects(), d.num_arrows());
        let mut out = Vec::new();
        let ob_total = nd.pow(nc as u32);
        let arr_total = nb.pow(na as u32);
        for o in 0..ob_total {
            let ob_map: Vec<ObjId> = (0..nc)
                .map(|i| ObjId(o / nd.pow((nc - 1 - i) as u32) % nd))
                .collect();
            for a in 0..arr_total {
                let arr_map: Vec<ArrId> = (0..na)
                    .map(|i| ArrId(a / nb.pow((na - 1 - i) as u32) % nb))
                    .collect();
                let f = Functor {
                    source: c.clone(),
                    target: d.clone(),
                    ob_map: ob_map.clone(),
                    arr_map,
                };
                if validate_functor(&f).is_ok() {
                    out.push(f);
                }
            }
        }
        out
    }

    #[test]
    fn discrete_two_to_three() {
        let fs = enumerate_functors(&arc(discrete_cat(2)), &arc(discrete_cat(3)), 100).unwrap();
        assert_eq!(fs.len(), 9);
    }

    #[test]
    fn matches_brute_force() {
        let cats = [
            named::terminal(),
            named::walking_arrow(),
            discrete_cat(2),
            named::parallel_pair(),
            named::chain3(),
        ];
        for c in &cats {
            for d in &cats {
                let (c, d) = (arc(c.clone()), arc(d.clone()));
                if d.num_arrows().pow(c.num_arrows() as u32) > 200_000 {
                    continue;
                }
                let fast = enumerate_functors(&c, &d, 10_000).unwrap();
                let slow = brute_force_functors(&c, &d);
                assert_eq!(fast, slow);
            }
        }
        let w = arc(named::walking_arrow());
        // walking arrow endofunctors: constant a, constant b, identity
        assert_eq!(enumerate_functors(&w, &w, 100).unwrap().len(), 3);
    }

    #[test]
    fn into_empty_category() {
        let fs =
            enumerate_functors(&arc(named::walking_arrow()), &arc(discrete_cat(0)), 10).unwrap();
        assert!(fs.is_empty());
        let fs = enumerate_functors(&arc(discrete_cat(0)), &arc(discrete_cat(0)), 10).unwrap();
        assert_eq!(fs.len(), 1);
    }

    #[test]
    fn functor_cap() {
        match enumerate_functors(&arc(discrete_cat(2)), &arc(discrete_cat(3)), 4) {
            Err(Error::BudgetExceeded { partial, .. }) => assert_eq!(partial, 4),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn nat_trans_counts() {
        let d2 = arc(discrete_cat(2));
        let id = identity_functor(&d2);
        assert_eq!(enumerate_nat_trans(&id, &id, 10).unwrap().len(), 1);

        let w = arc(named::walking_arrow());
        let (a, b) = (w.find_object("a").unwrap(), w.find_object("b").unwrap());
        let ca = constant_functor(&w, &w, a);
        let cb = constant_functor(&w, &w, b);
        let ab = enumerate_nat_trans(&ca, &cb, 10).unwrap();
        assert_eq!(ab.len(), 1);
        let f = w.find_arrow("f").unwrap();
        assert_eq!(ab[0].components, vec![f, f]);
        assert!(enumerate_nat_trans(&cb, &ca, 10).unwrap().is_empty());
    }

    #[test]
    fn nat_trans_matches_brute_force() {
        let w = arc(named::walking_arrow());
        let fs = enumerate_functors(&w, &w, 100).unwrap();
        for f in &fs {
            for g in &fs {
                let fast = enumerate_nat_trans(f, g, 100).unwrap();
                let mut slow = Vec::new();
                for c0 in w.arrow_ids() {
                    for c1 in w.arrow_ids() {
                        let t = NatTrans {
                            from: f.clone(),
                            to: g.clone(),
                            components: vec![c0, c1],
                        };
                        if validate_nat_trans(&t).is_ok() {
                            slow.push(t);
                        }
                    }
                }
                assert_eq!(fast, slow);
                // flipping a component of a passing transformation breaks it
                for t in &fast {
                    for k in 0..2 {
                        for other in w.arrow_ids().filter(|&o| o != t.components[k]) {
                            let mut m = t.clone();
                            m.components[k] = other;
                            assert!(!validate_nat_trans(&m).is_ok() || slow.contains(&m));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn trans_comp_associative_on_walking_arrow() {
        let w = arc(named::walking_arrow());
        let fs = enumerate_functors(&w, &w, 100).unwrap();
        let mut all = Vec::new();
        for f in &fs {
            for g in &fs {
                all.extend(enumerate_nat_trans(f, g, 100).unwrap());
            }
        }
        let mut triples = 0;
        for t1 in &all {
            for t2 in all.iter().filter(|t| t.from == t1.to) {
                for t3 in all.iter().filter(|t| t.from == t2.to) {
                    let l = trans_comp(&trans_comp(t1, t2).unwrap(), t3).unwrap();
                    let r = trans_comp(t1, &trans_comp(t2, t3).unwrap()).unwrap();
                    assert_eq!(l, r);
                    triples += 1;
                }
            }
        }
        assert!(triples > 10);
    }

    #[test]
    fn functor_category_examples() {
        for c in [
            named::walking_arrow(),
            named::parallel_pair(),
            named::chain3(),
        ] {
            let c = arc(c);
            let fun = functor_category(&arc(discrete_cat(1)), &c, 1000).unwrap();
            assert!(validate_category(&fun).is_ok());
            assert_eq!(fun.num_objects(), c.num_objects());
            assert_eq!(fun.hom_sizes(), c.hom_sizes());
        }
        let w = arc(named::walking_arrow());
        let to_terminal = functor_category(&w, &arc(named::terminal()), 1000).unwrap();
        assert_eq!(to_terminal, named::terminal());

        let d2 = arc(discrete_cat(2));
        let fun = functor_category(&d2, &d2, 1000).unwrap();
        assert_eq!(fun.num_objects(), 4);
        assert_eq!(fun.num_arrows(), 4);
        assert!(validate_category(&fun).is_ok());

        let ww = functor_category(&w, &w, 1000).unwrap();
        assert!(validate_category(&ww).is_ok());
    }
}
