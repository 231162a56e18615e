//! Representable presheaves, the Yoneda embedding, and an exhaustive check
//! that the embedding is full and faithful.

use std::sync::Arc;

use serde::Serialize;

use super::finset::FinSet;
use super::presheaf::{enumerate_pshmaps, Presheaf, PshMap};
use crate::catcore::{ArrId, FinCategory, ObjId};
use crate::{par, Error, Result};

/// `hom(-, x)`: `set(I)` is `hom(I, x)` labelled by arrow names, and
/// restriction along `f: J -> I` precomposes with `f`.
pub fn yoneda(c: &Arc<FinCategory>, x: ObjId) -> Presheaf {
    let homs: Vec<Vec<ArrId>> = c.objects().map(|i| c.hom(i, x)).collect();
    let sets = homs
        .iter()
        .map(|h| FinSet {
            size: h.len(),
            labels: Some(h.iter().map(|&a| c.arrow_name(a).to_string()).collect()),
        })
        .collect();
    let restrict = c
        .arrow_ids()
        .map(|f| {
            let (j, i) = (c.dom(f), c.cod(f));
            homs[i.0]
                .iter()
                .map(|&a| {
                    let fa = c.comp(f, a);
                    homs[j.0]
                        .iter()
                        .position(|&b| b == fa)
                        .expect("composite lies in hom(J, x)")
                })
                .collect()
        })
        .collect();
    Presheaf::from_tables(c.clone(), sets, restrict)
}

/// `yoneda(f): hom(-, x) -> hom(-, y)` for `f: x -> y`, postcomposing with `f`.
pub fn yoneda_map(c: &Arc<FinCategory>, f: ArrId) -> PshMap {
    let (x, y) = (c.dom(f), c.cod(f));
    let source = Arc::new(yoneda(c, x));
    let target = Arc::new(yoneda(c, y));
    yoneda_map_between(c, f, source, target)
}

fn yoneda_map_between(
    c: &FinCategory,
    f: ArrId,
    source: Arc<Presheaf>,
    target: Arc<Presheaf>,
) -> PshMap {
    let (x, y) = (c.dom(f), c.cod(f));
    let components = c
        .objects()
        .map(|a| {
            let into_y = c.hom(a, y);
            c.hom(a, x)
                .into_iter()
                .map(|g| {
                    let gf = c.comp(g, f);
                    into_y
                        .iter()
                        .position(|&h| h == gf)
                        .expect("composite lies in hom(A, y)")
                })
                .collect()
        })
        .collect();
    PshMap {
        source,
        target,
        components,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct YonedaPair {
    pub x: String,
    pub y: String,
    pub arrows: usize,
    pub maps: usize,
    pub injective: bool,
    pub surjective: bool,
}

impl YonedaPair {
    pub fn ok(&self) -> bool {
        self.injective && self.surjective && self.arrows == self.maps
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct YonedaReport {
    pub ok: bool,
    pub pairs: Vec<YonedaPair>,
}

/// For every ordered pair of objects, enumerates all presheaf maps
/// `hom(-, x) -> hom(-, y)` and checks that `f |-> yoneda_map(f)` is a
/// bijection from `hom(x, y)` onto them.
pub fn check_yoneda_lemma(
    c: &Arc<FinCategory>,
    cap: usize,
    exec: par::Exec,
) -> Result<YonedaReport> {
    crate::catcore::validate_category(c).into_result()?;
    let reps: Vec<Arc<Presheaf>> = c.objects().map(|x| Arc::new(yoneda(c, x))).collect();
    let pairs: Vec<(ObjId, ObjId)> = c
        .objects()
        .flat_map(|x| c.objects().map(move |y| (x, y)))
        .collect();
    let results = par::map(exec, &pairs, |&(x, y)| -> Result<YonedaPair> {
        let maps = enumerate_pshmaps(&reps[x.0], &reps[y.0], cap).map_err(|e| match e {
            Error::BudgetExceeded { what, cap, partial } => Error::BudgetExceeded {
                what: format!(
                    "{what} for hom(-, {}) -> hom(-, {})",
                    c.object_label(x),
                    c.object_label(y)
                ),
                cap,
                partial,
            },
            other => other,
        })?;
        let images: Vec<PshMap> = c
            .hom(x, y)
            .into_iter()
            .map(|f| yoneda_map_between(c, f, reps[x.0].clone(), reps[y.0].clone()))
            .collect();
        let injective = images
            .iter()
            .enumerate()
            .all(|(i, a)| images[i + 1..].iter().all(|b| a != b));
        let surjective = maps.iter().all(|m| images.contains(m));
        Ok(YonedaPair {
            x: c.object_label(x).to_string(),
            y: c.object_label(y).to_string(),
            arrows: images.len(),
            maps: maps.len(),
            injective,
            surjective,
        })
    });
    let pairs = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(YonedaReport {
        ok: pairs.iter().all(YonedaPair::ok),
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catcore::named;
    use crate::presheaf::presheaf::{
        compose_maps, identity_map, singleton_presheaf, validate_presheaf, validate_pshmap,
    };

    #[test]
    fn representables_on_small_categories() {
        let t = Arc::new(named::terminal());
        assert_eq!(yoneda(&t, ObjId(0)), singleton_presheaf(&t));

        let w = Arc::new(named::walking_arrow());
        let (a, b) = (w.find_object("a").unwrap(), w.find_object("b").unwrap());
        let f = w.find_arrow("f").unwrap();
        let yb = yoneda(&w, b);
        assert!(validate_presheaf(&yb).is_ok());
        assert_eq!(yb.set(a).labels.as_deref(), Some(&["f".to_string()][..]));
        assert_eq!(yb.set(b).labels.as_deref(), Some(&["id_b".to_string()][..]));
        assert_eq!(yb.restrict(f, 0), 0);

        let ya = yoneda(&w, a);
        assert_eq!(ya.size(a), 1);
        assert_eq!(ya.size(b), 0);
    }

    #[test]
    fn yoneda_map_functorial() {
        let w = Arc::new(named::walking_arrow());
        let f = w.find_arrow("f").unwrap();
        let a = w.find_object("a").unwrap();
        let m = yoneda_map(&w, f);
        assert!(validate_pshmap(&m).is_ok());
        // id_a |-> f
        assert_eq!(m.components[a.0], vec![0]);

        let c = Arc::new(named::chain3());
        for x in c.objects() {
            let idm = yoneda_map(&c, c.id(x));
            assert_eq!(idm, identity_map(&Arc::new(yoneda(&c, x))));
        }
        for (f, g, h) in c.composition_entries() {
            let composite = compose_maps(&yoneda_map(&c, g), &yoneda_map(&c, f)).unwrap();
            assert_eq!(composite, yoneda_map(&c, h));
        }
    }

    #[test]
    fn lemma_on_walking_arrow() {
        let w = Arc::new(named::walking_arrow());
        let rep = check_yoneda_lemma(&w, 1000, par::Exec::Sequential).unwrap();
        assert!(rep.ok);
        let ab = rep.pairs.iter().find(|p| p.x == "a" && p.y == "b").unwrap();
        assert_eq!((ab.arrows, ab.maps), (1, 1));
        let ba = rep.pairs.iter().find(|p| p.x == "b" && p.y == "a").unwrap();
        assert_eq!((ba.arrows, ba.maps), (0, 0));
        let t =
            check_yoneda_lemma(&Arc::new(named::terminal()), 10, par::Exec::Sequential).unwrap();
        assert!(t.ok && t.pairs[0].maps == 1);
    }
}
