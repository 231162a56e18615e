use std::sync::Arc;

use super::presheaf::Presheaf;
use crate::catcore::{ArrId, Arrow, FinCategory, ObjId};
use crate::Result;

/// Index of `(I, rho)` among the objects of the category of elements.
pub(crate) fn element_offsets(h: &Presheaf) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(h.sets().len());
    let mut n = 0;
    for s in h.sets() {
        offsets.push(n);
        n += s.size;
    }
    offsets
}

/// The category of elements of `h`.
///
/// Objects are pairs `(I, rho)` with `rho` in `h(I)`, ordered by object then
/// element. Each base arrow `f: J -> I` and element `rho` of `h(I)` give an
/// arrow `(I, rho) -> (J, f(rho))`, ordered by base arrow then element. The
/// arrow runs in the direction of restriction.
pub fn category_of_elements(h: &Presheaf) -> Result<FinCategory> {
    crate::presheaf::validate_presheaf(h).into_result()?;
    let c: &Arc<FinCategory> = h.base();
    let offsets = element_offsets(h);
    let mut objects = Vec::new();
    for i in c.objects() {
        for rho in 0..h.size(i) {
            objects.push(format!("{}:{}", c.object_label(i), h.set(i).label(rho)));
        }
    }
    // arrow index of (f, rho)
    let mut arrow_of = vec![Vec::new(); c.num_arrows()];
    let mut arrows = Vec::new();
    for f in c.arrow_ids() {
        let (j, i) = (c.dom(f), c.cod(f));
        for rho in 0..h.size(i) {
            arrow_of[f.0].push(ArrId(arrows.len()));
            arrows.push(Arrow {
                name: format!("{}@{}", c.arrow_name(f), h.set(i).label(rho)),
                dom: ObjId(offsets[i.0] + rho),
                cod: ObjId(offsets[j.0] + h.restrict(f, rho)),
            });
        }
    }
    let mut ids = Vec::new();
    for i in c.objects() {
        ids.extend_from_slice(&arrow_of[c.id(i).0][..h.size(i)]);
    }
    // (f at rho) then (g at f(rho)) is (g;f at rho)
    let mut entries = Vec::new();
    for (g, f, gf) in c.composition_entries() {
        let i = c.cod(f);
        for rho in 0..h.size(i) {
            let first = arrow_of[f.0][rho];
            let then = arrow_of[g.0][h.restrict(f, rho)];
            entries.push((first, then, arrow_of[gf.0][rho]));
        }
    }
    FinCategory::from_tables(objects, arrows, ids, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catcore::{named, validate_category};
    use crate::presheaf::{enumerate_presheaves, singleton_presheaf, yoneda};

    #[test]
    fn singleton_gives_base_shape() {
        for c in [
            named::walking_arrow(),
            named::chain3(),
            named::parallel_pair(),
        ] {
            let c = Arc::new(c);
            let e = category_of_elements(&singleton_presheaf(&c)).unwrap();
            assert!(validate_category(&e).is_ok());
            assert_eq!(
                (e.num_objects(), e.num_arrows()),
                (c.num_objects(), c.num_arrows())
            );
        }
    }

    #[test]
    fn representable_on_walking_arrow() {
        let w = Arc::new(named::walking_arrow());
        let b = w.find_object("b").unwrap();
        let e = category_of_elements(&yoneda(&w, b)).unwrap();
        assert_eq!(
            e.object_labels(),
            &["a:f".to_string(), "b:id_b".to_string()]
        );
        assert_eq!(e.num_arrows(), 3);
        assert!(validate_category(&e).is_ok());
        let f = e.find_arrow("f@id_b").unwrap();
        assert_eq!(e.object_label(e.dom(f)), "b:id_b");
        assert_eq!(e.object_label(e.cod(f)), "a:f");
    }

    #[test]
    fn empty_presheaf_gives_empty_category() {
        let w = Arc::new(named::walking_arrow());
        let empty = Presheaf::from_tables(w.clone(), vec![Default::default(); 2], vec![vec![]; 3]);
        let e = category_of_elements(&empty).unwrap();
        assert_eq!((e.num_objects(), e.num_arrows()), (0, 0));
    }

    #[test]
    fn always_a_category() {
        for c in [named::walking_arrow(), named::chain3()] {
            let c = Arc::new(c);
            for p in enumerate_presheaves(&c, 2, 10_000).unwrap() {
                assert!(validate_category(&category_of_elements(&p).unwrap()).is_ok());
            }
        }
    }
}
