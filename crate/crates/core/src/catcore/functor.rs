use std::sync::Arc;

use serde::Serialize;

use super::category::{validate_category, ArrId, FinCategory, ObjId};
use crate::report::Report;
use crate::{Error, Result};

pub(crate) fn same_category(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A functor between finite categories, given by its object and arrow tables.
#[derive(Clone, Debug)]
pub struct Functor {
    pub source: Arc<FinCategory>,
    pub target: Arc<FinCategory>,
    pub ob_map: Vec<ObjId>,
    pub arr_map: Vec<ArrId>,
}

impl PartialEq for Functor {
    fn eq(&self, other: &Self) -> bool {
        self.ob_map == other.ob_map
            && self.arr_map == other.arr_map
            && same_category(&self.source, &other.source)
            && same_category(&self.target, &other.target)
    }
}

impl Eq for Functor {}

impl Functor {
    pub fn ob(&self, x: ObjId) -> ObjId {
        self.ob_map[x.0]
    }

    pub fn arr(&self, f: ArrId) -> ArrId {
        self.arr_map[f.0]
    }
}

pub fn validate_functor(func: &Functor) -> Report {
    let mut r = Report::ok();
    let (c, d) = (&*func.source, &*func.target);
    if !validate_category(c).is_ok() {
        r.structural("source category invalid", validate_category(c).summary());
    }
    if !validate_category(d).is_ok() {
        r.structural("target category invalid", validate_category(d).summary());
    }
    if func.ob_map.len() != c.num_objects() {
        r.structural(
            "object map arity",
            format!(
                "{} entries for {} objects",
                func.ob_map.len(),
                c.num_objects()
            ),
        );
    }
    if func.arr_map.len() != c.num_arrows() {
        r.structural(
            "arrow map arity",
            format!(
                "{} entries for {} arrows",
                func.arr_map.len(),
                c.num_arrows()
            ),
        );
    }
    for (i, y) in func.ob_map.iter().enumerate() {
        if y.0 >= d.num_objects() {
            r.structural(
                "object map out of range",
                format!("object #{i} -> #{}", y.0),
            );
        }
    }
    for (i, g) in func.arr_map.iter().enumerate() {
        if g.0 >= d.num_arrows() {
            r.structural("arrow map out of range", format!("arrow #{i} -> #{}", g.0));
        }
    }
    if r.has_structural() {
        return r;
    }
    for f in c.arrow_ids() {
        let g = func.arr(f);
        let (want_dom, want_cod) = (func.ob(c.dom(f)), func.ob(c.cod(f)));
        if d.dom(g) != want_dom || d.cod(g) != want_cod {
            r.law(
                "dom/cod preservation",
                format!(
                    "{} maps to {}: {} -> {}, expected {} -> {}",
                    c.arrow_name(f),
                    d.arrow_name(g),
                    d.object_label(d.dom(g)),
                    d.object_label(d.cod(g)),
                    d.object_label(want_dom),
                    d.object_label(want_cod)
                ),
            );
        }
    }
    for x in c.objects() {
        let got = func.arr(c.id(x));
        let want = d.id(func.ob(x));
        if got != want {
            r.law(
                "identity preservation",
                format!(
                    "id_{} maps to {}, expected {}",
                    c.object_label(x),
                    d.arrow_name(got),
                    d.arrow_name(want)
                ),
            );
        }
    }
    if r.mentions("dom/cod preservation") {
        return r;
    }
    for (f, g, h) in c.composition_entries() {
        let lhs = func.arr(h);
        let rhs = d.comp(func.arr(f), func.arr(g));
        if lhs != rhs {
            r.law(
                "composition preservation",
                format!(
                    "F({};{}) = {} but F({});F({}) = {}",
                    c.arrow_name(f),
                    c.arrow_name(g),
                    d.arrow_name(lhs),
                    c.arrow_name(f),
                    c.arrow_name(g),
                    d.arrow_name(rhs)
                ),
            );
        }
    }
    r
}

pub fn identity_functor(c: &Arc<FinCategory>) -> Functor {
    Functor {
        source: c.clone(),
        target: c.clone(),
        ob_map: c.objects().collect(),
        arr_map: c.arrow_ids().collect(),
    }
}

/// `F` then `G`: objects go to `G(F(x))`.
pub fn compose_functors(f: &Functor, g: &Functor) -> Result<Functor> {
    if !same_category(&f.target, &g.source) {
        return Err(Error::CategoryMismatch(
            "target of the first functor is not the source of the second".into(),
        ));
    }
    Ok(Functor {
        source: f.source.clone(),
        target: g.target.clone(),
        ob_map: f.ob_map.iter().map(|&x| g.ob(x)).collect(),
        arr_map: f.arr_map.iter().map(|&a| g.arr(a)).collect(),
    })
}

/// A natural transformation `F => G`; the component at `A` is an arrow
/// `F(A) -> G(A)` of the target category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatTrans {
    pub from: Functor,
    pub to: Functor,
    pub components: Vec<ArrId>,
}

pub fn validate_nat_trans(t: &NatTrans) -> Report {
    let mut r = Report::ok();
    for (which, f) in [("source", &t.from), ("target", &t.to)] {
        let fr = validate_functor(f);
        if !fr.is_ok() {
            r.structural(format!("{which} functor invalid"), fr.summary());
        }
    }
    if r.has_structural() {
        return r;
    }
    if !same_category(&t.from.source, &t.to.source) || !same_category(&t.from.target, &t.to.target)
    {
        r.structural(
            "functor mismatch",
            "functors do not share source and target",
        );
        return r;
    }
    let (c, d) = (&*t.from.source, &*t.from.target);
    if t.components.len() != c.num_objects() {
        r.structural(
            "component arity",
            format!(
                "{} components for {} objects",
                t.components.len(),
                c.num_objects()
            ),
        );
        return r;
    }
    for x in c.objects() {
        let a = t.components[x.0];
        if a.0 >= d.num_arrows() {
            r.structural(
                "component out of range",
                format!("component at {} is #{}", c.object_label(x), a.0),
            );
            continue;
        }
        let (want_dom, want_cod) = (t.from.ob(x), t.to.ob(x));
        if d.dom(a) != want_dom || d.cod(a) != want_cod {
            r.structural(
                "component dom/cod",
                format!(
                    "component at {} is {}: {} -> {}, expected {} -> {}",
                    c.object_label(x),
                    d.arrow_name(a),
                    d.object_label(d.dom(a)),
                    d.object_label(d.cod(a)),
                    d.object_label(want_dom),
                    d.object_label(want_cod)
                ),
            );
        }
    }
    if r.has_structural() {
        return r;
    }
    for g in c.arrow_ids() {
        let (a, b) = (c.dom(g), c.cod(g));
        let lhs = d.comp(t.components[a.0], t.to.arr(g));
        let rhs = d.comp(t.from.arr(g), t.components[b.0]);
        if lhs != rhs {
            r.law(
                "naturality",
                format!(
                    "square at {} does not commute: {} vs {}",
                    c.arrow_name(g),
                    d.arrow_name(lhs),
                    d.arrow_name(rhs)
                ),
            );
        }
    }
    r
}

pub fn identity_trans(f: &Functor) -> NatTrans {
    let d = &f.target;
    NatTrans {
        from: f.clone(),
        to: f.clone(),
        components: f.source.objects().map(|x| d.id(f.ob(x))).collect(),
    }
}

/// Vertical composite: `t1: F => G` then `t2: G => H`, componentwise.
pub fn trans_comp(t1: &NatTrans, t2: &NatTrans) -> Result<NatTrans> {
    if t1.to != t2.from {
        return Err(Error::CategoryMismatch(
            "target functor of the first transformation is not the source of the second".into(),
        ));
    }
    let d = &t1.from.target;
    Ok(NatTrans {
        from: t1.from.clone(),
        to: t2.to.clone(),
        components: t1
            .components
            .iter()
            .zip(&t2.components)
            .map(|(&a, &b)| d.comp(a, b))
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomPairReport {
    pub x: String,
    pub y: String,
    pub injective: bool,
    pub surjective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FullFaithfulReport {
    pub full_and_faithful: bool,
    pub pairs: Vec<HomPairReport>,
}

/// Checks, for every ordered pair of source objects, that the functor maps
/// `hom(x, y)` bijectively onto `hom(F x, F y)`.
pub fn is_full_and_faithful(func: &Functor) -> FullFaithfulReport {
    let (c, d) = (&*func.source, &*func.target);
    let mut pairs = Vec::new();
    for x in c.objects() {
        for y in c.objects() {
            let mut images: Vec<ArrId> = c.hom(x, y).into_iter().map(|f| func.arr(f)).collect();
            let n = images.len();
            images.sort();
            images.dedup();
            let injective = images.len() == n;
            let surjective = images.len() == d.hom(func.ob(x), func.ob(y)).len();
            pairs.push(HomPairReport {
                x: c.object_label(x).to_string(),
                y: c.object_label(y).to_string(),
                injective,
                surjective,
            });
        }
    }
    FullFaithfulReport {
        full_and_faithful: pairs.iter().all(|p| p.injective && p.surjective),
        pairs,
    }
}

/// The constant functor at object `y`.
pub fn constant_functor(c: &Arc<FinCategory>, d: &Arc<FinCategory>, y: ObjId) -> Functor {
    Functor {
        source: c.clone(),
        target: d.clone(),
        ob_map: vec![y; c.num_objects()],
        arr_map: vec![d.id(y); c.num_arrows()],
    }
}
