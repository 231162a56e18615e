use std::sync::Arc;

use super::finset::FinSet;
use crate::catcore::{validate_category, ArrId, FinCategory, ObjId};
use crate::mutation::{self, Mutation};
use crate::report::Report;
use crate::{error, Error, Result};

/// A presheaf on a finite category: a finite set per object and, for every
/// arrow `f: J -> I`, a restriction table `set(I) -> set(J)`.
#[derive(Clone, Debug)]
pub struct Presheaf {
    base: Arc<FinCategory>,
    sets: Vec<FinSet>,
    /// `restrict[f][rho]` for `rho` in `set(cod f)`, an element of `set(dom f)`.
    restrict: Vec<Vec<usize>>,
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        self.sets == other.sets
            && self.restrict == other.restrict
            && (Arc::ptr_eq(&self.base, &other.base) || *self.base == *other.base)
    }
}

impl Eq for Presheaf {}

impl Presheaf {
    /// Raw constructor; run [`validate_presheaf`] before trusting the result.
    pub fn from_tables(
        base: Arc<FinCategory>,
        sets: Vec<FinSet>,
        restrict: Vec<Vec<usize>>,
    ) -> Self {
        Self {
            base,
            sets,
            restrict,
        }
    }

    /// Like [`Presheaf::from_tables`] but rejects anything that fails validation.
    pub fn new(
        base: Arc<FinCategory>,
        sets: Vec<FinSet>,
        restrict: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let p = Self::from_tables(base, sets, restrict);
        validate_presheaf(&p).into_result()?;
        Ok(p)
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn set(&self, i: ObjId) -> &FinSet {
        &self.sets[i.0]
    }

    pub fn sets(&self) -> &[FinSet] {
        &self.sets
    }

    pub fn size(&self, i: ObjId) -> usize {
        self.sets[i.0].size
    }

    /// Restriction of `rho` in `set(cod f)` along `f`.
    pub fn restrict(&self, f: ArrId, rho: usize) -> usize {
        self.restrict[f.0][rho]
    }

    pub fn table(&self, f: ArrId) -> &[usize] {
        &self.restrict[f.0]
    }

    pub fn tables(&self) -> &[Vec<usize>] {
        &self.restrict
    }

    pub fn total_elements(&self) -> usize {
        self.sets.iter().map(|s| s.size).sum()
    }

    /// Copy with one restriction entry replaced (for mutation tests).
    pub fn with_entry(&self, f: ArrId, rho: usize, value: usize) -> Self {
        let mut p = self.clone();
        p.restrict[f.0][rho] = value;
        p
    }
}

pub fn validate_presheaf(h: &Presheaf) -> Report {
    let mut r = Report::ok();
    let c = &*h.base;
    let base = validate_category(c);
    if !base.is_ok() {
        r.structural("base category invalid", base.summary());
        return r;
    }
    if h.sets.len() != c.num_objects() {
        r.structural(
            "set arity",
            format!("{} sets for {} objects", h.sets.len(), c.num_objects()),
        );
        return r;
    }
    if h.restrict.len() != c.num_arrows() {
        r.structural(
            "restriction arity",
            format!("{} tables for {} arrows", h.restrict.len(), c.num_arrows()),
        );
        return r;
    }
    for f in c.arrow_ids() {
        let (j, i) = (c.dom(f), c.cod(f));
        let t = &h.restrict[f.0];
        if t.len() != h.size(i) {
            r.structural(
                "restriction table size",
                format!(
                    "table for {} has {} entries, set({}) has {}",
                    c.arrow_name(f),
                    t.len(),
                    c.object_label(i),
                    h.size(i)
                ),
            );
            continue;
        }
        for (rho, &v) in t.iter().enumerate() {
            if v >= h.size(j) {
                r.structural(
                    "restriction out of range",
                    format!(
                        "{}({rho}) = {v} but set({}) has {} elements",
                        c.arrow_name(f),
                        c.object_label(j),
                        h.size(j)
                    ),
                );
            }
        }
    }
    if r.has_structural() {
        return r;
    }
    for i in c.objects() {
        let id = c.id(i);
        for rho in 0..h.size(i) {
            let v = h.restrict(id, rho);
            if v != rho {
                r.law(
                    "identity restriction",
                    format!("id_{}({rho}) = {v}", c.object_label(i)),
                );
            }
        }
    }
    // f: J -> I, g: K -> J, composite g;f : K -> I
    for (g, f, gf) in c.composition_entries() {
        let i = c.cod(f);
        for rho in 0..h.size(i) {
            let lhs = h.restrict(gf, rho);
            let rhs = h.restrict(g, h.restrict(f, rho));
            if lhs != rhs {
                r.law(
                    "composition restriction",
                    format!(
                        "restricting element {rho} of set({}) along {} gives {lhs}, but along {} then {} gives {rhs}",
                        c.object_label(i),
                        c.arrow_name(gf),
                        c.arrow_name(f),
                        c.arrow_name(g)
                    ),
                );
            }
        }
    }
    r
}

/// A natural transformation between presheaves on the same base, one total
/// table per object.
#[derive(Clone, Debug)]
pub struct PshMap {
    pub source: Arc<Presheaf>,
    pub target: Arc<Presheaf>,
    pub components: Vec<Vec<usize>>,
}

pub(crate) fn same_presheaf(a: &Arc<Presheaf>, b: &Arc<Presheaf>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl PartialEq for PshMap {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components
            && same_presheaf(&self.source, &other.source)
            && same_presheaf(&self.target, &other.target)
    }
}

impl Eq for PshMap {}

impl PshMap {
    pub fn apply(&self, i: ObjId, rho: usize) -> usize {
        self.components[i.0][rho]
    }
}

pub fn validate_pshmap(s: &PshMap) -> Report {
    let mut r = Report::ok();
    for (which, p) in [("source", &s.source), ("target", &s.target)] {
        let pr = validate_presheaf(p);
        if !pr.is_ok() {
            r.structural(format!("{which} presheaf invalid"), pr.summary());
        }
    }
    if r.has_structural() {
        return r;
    }
    let (h, g) = (&*s.source, &*s.target);
    if !(Arc::ptr_eq(&h.base, &g.base) || *h.base == *g.base) {
        r.structural(
            "base mismatch",
            "source and target live over different categories",
        );
        return r;
    }
    let c = &*h.base;
    if s.components.len() != c.num_objects() {
        r.structural(
            "component arity",
            format!(
                "{} components for {} objects",
                s.components.len(),
                c.num_objects()
            ),
        );
        return r;
    }
    for i in c.objects() {
        let t = &s.components[i.0];
        if t.len() != h.size(i) {
            r.structural(
                "component table size",
                format!(
                    "component at {} has {} entries, source set has {}",
                    c.object_label(i),
                    t.len(),
                    h.size(i)
                ),
            );
            continue;
        }
        for (rho, &v) in t.iter().enumerate() {
            if v >= g.size(i) {
                r.structural(
                    "component out of range",
                    format!(
                        "component at {} sends {rho} to {v}, target set has {}",
                        c.object_label(i),
                        g.size(i)
                    ),
                );
            }
        }
    }
    if r.has_structural() {
        return r;
    }
    for f in c.arrow_ids() {
        let (j, i) = (c.dom(f), c.cod(f));
        for rho in 0..h.size(i) {
            let lhs = s.apply(j, h.restrict(f, rho));
            let rhs = g.restrict(f, s.apply(i, rho));
            if lhs != rhs {
                r.law(
                    "naturality",
                    format!(
                        "at {} and element {rho} of source set({}): restrict-then-map gives {lhs}, map-then-restrict gives {rhs}",
                        c.arrow_name(f),
                        c.object_label(i)
                    ),
                );
            }
        }
    }
    r
}

pub fn identity_map(h: &Arc<Presheaf>) -> PshMap {
    PshMap {
        source: h.clone(),
        target: h.clone(),
        components: h.sets.iter().map(|s| (0..s.size).collect()).collect(),
    }
}

/// `sigma . delta`: first `delta: K -> H`, then `sigma: H -> G`.
pub fn compose_maps(sigma: &PshMap, delta: &PshMap) -> Result<PshMap> {
    if !same_presheaf(&delta.target, &sigma.source) {
        return Err(Error::ContextMismatch(
            "the inner map's target is not the outer map's source".into(),
        ));
    }
    if mutation::active(Mutation::SubCompOrder)
        && same_presheaf(&sigma.source, &sigma.target)
        && same_presheaf(&delta.source, &delta.target)
    {
        return Ok(PshMap {
            source: delta.source.clone(),
            target: sigma.target.clone(),
            components: sigma
                .components
                .iter()
                .zip(&delta.components)
                .map(|(s, d)| s.iter().map(|&x| d[x]).collect())
                .collect(),
        });
    }
    Ok(PshMap {
        source: delta.source.clone(),
        target: sigma.target.clone(),
        components: delta
            .components
            .iter()
            .zip(&sigma.components)
            .map(|(d, s)| d.iter().map(|&x| s[x]).collect())
            .collect(),
    })
}

/// Enumerates every presheaf map `H -> G`, lexicographic on the flattened
/// component tables (objects in index order, then elements).
pub fn enumerate_pshmaps(h: &Arc<Presheaf>, g: &Arc<Presheaf>, cap: usize) -> Result<Vec<PshMap>> {
    let mut out = Vec::new();
    for_each_pshmap(h, g, &mut |m| {
        if out.len() == cap {
            return Err(error::budget("presheaf maps", cap, out.len()));
        }
        out.push(m);
        Ok(true)
    })?;
    Ok(out)
}

/// Streams the maps of [`enumerate_pshmaps`]; the visitor returns `false` to stop.
pub fn for_each_pshmap(
    h: &Arc<Presheaf>,
    g: &Arc<Presheaf>,
    visit: &mut dyn FnMut(PshMap) -> Result<bool>,
) -> Result<()> {
    validate_presheaf(h).into_result()?;
    validate_presheaf(g).into_result()?;
    if !(Arc::ptr_eq(&h.base, &g.base) || *h.base == *g.base) {
        return Err(Error::ContextMismatch(
            "presheaves over different categories".into(),
        ));
    }
    let c = &*h.base;
    // flattened positions (object, element)
    let mut offset = Vec::with_capacity(c.num_objects());
    let mut slots = Vec::new();
    for i in c.objects() {
        offset.push(slots.len());
        for rho in 0..h.size(i) {
            slots.push((i, rho));
        }
    }
    // naturality constraints, grouped by the later of the two positions
    let mut constraints: Vec<Vec<(usize, usize, ArrId)>> = vec![Vec::new(); slots.len()];
    for f in c.arrow_ids() {
        let (j, i) = (c.dom(f), c.cod(f));
        for rho in 0..h.size(i) {
            let p = offset[i.0] + rho;
            let q = offset[j.0] + h.restrict(f, rho);
            constraints[p.max(q)].push((p, q, f));
        }
    }
    let mut assign = vec![0usize; slots.len()];
    /// Returns Ok(false) once the visitor asked to stop.
    fn go(
        k: usize,
        slots: &[(ObjId, usize)],
        constraints: &[Vec<(usize, usize, ArrId)>],
        g: &Presheaf,
        assign: &mut Vec<usize>,
        emit: &mut dyn FnMut(&[usize]) -> Result<bool>,
    ) -> Result<bool> {
        if k == slots.len() {
            return emit(assign);
        }
        let (i, _) = slots[k];
        for v in 0..g.size(i) {
            assign[k] = v;
            let ok = constraints[k]
                .iter()
                .all(|&(p, q, f)| assign[q] == g.restrict(f, assign[p]));
            if ok && !go(k + 1, slots, constraints, g, assign, emit)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
    go(0, &slots, &constraints, g, &mut assign, &mut |a| {
        let components = c
            .objects()
            .map(|i| a[offset[i.0]..offset[i.0] + h.size(i)].to_vec())
            .collect();
        visit(PshMap {
            source: h.clone(),
            target: g.clone(),
            components,
        })
    })?;
    Ok(())
}

/// The constant presheaf with every set `{0}`.
pub fn singleton_presheaf(c: &Arc<FinCategory>) -> Presheaf {
    Presheaf::from_tables(
        c.clone(),
        vec![FinSet::new(1); c.num_objects()],
        vec![vec![0]; c.num_arrows()],
    )
}

/// Every presheaf on `c` whose sets have at most `max_set` elements, ordered
/// by the size vector and then lexicographically by restriction tables.
pub fn enumerate_presheaves(
    c: &Arc<FinCategory>,
    max_set: usize,
    cap: usize,
) -> Result<Vec<Presheaf>> {
    let mut out = Vec::new();
    for_each_presheaf(c, max_set, &mut |p| {
        if out.len() == cap {
            return Err(error::budget("presheaves", cap, out.len()));
        }
        out.push(p);
        Ok(true)
    })?;
    Ok(out)
}

/// Streams presheaves in the order of [`enumerate_presheaves`]; the callback
/// returns `false` to stop early.
pub fn for_each_presheaf(
    c: &Arc<FinCategory>,
    max_set: usize,
    visit: &mut dyn FnMut(Presheaf) -> Result<bool>,
) -> Result<()> {
    validate_category(c).into_result()?;
    let no = c.num_objects();
    let na = c.num_arrows();
    let mut constraints: Vec<Vec<(ArrId, ArrId, ArrId)>> = vec![Vec::new(); na];
    // (g, f, g;f): restrict(g;f) = restrict(g) after restrict(f)
    for (g, f, gf) in c.composition_entries() {
        constraints[g.0.max(f.0).max(gf.0)].push((g, f, gf));
    }
    let mut sizes = vec![0usize; no];
    loop {
        let mut tables: Vec<Vec<usize>> = vec![Vec::new(); na];
        let mut stop = false;
        search_tables(c, &sizes, &constraints, 0, &mut tables, &mut |t| {
            let p = Presheaf::from_tables(
                c.clone(),
                sizes.iter().map(|&s| FinSet::new(s)).collect(),
                t.to_vec(),
            );
            let keep_going = visit(p)?;
            if !keep_going {
                stop = true;
            }
            Ok(keep_going)
        })?;
        if stop {
            return Ok(());
        }
        let mut i = no;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            sizes[i] += 1;
            if sizes[i] <= max_set {
                break;
            }
            sizes[i] = 0;
        }
    }
}

/// Returns Ok(false) when the visitor asked to stop.
fn search_tables(
    c: &FinCategory,
    sizes: &[usize],
    constraints: &[Vec<(ArrId, ArrId, ArrId)>],
    k: usize,
    tables: &mut Vec<Vec<usize>>,
    emit: &mut dyn FnMut(&[Vec<usize>]) -> Result<bool>,
) -> Result<bool> {
    if k == tables.len() {
        return emit(tables);
    }
    let f = ArrId(k);
    let (j, i) = (c.dom(f), c.cod(f));
    let (n_in, n_out) = (sizes[i.0], sizes[j.0]);
    if c.is_identity(f) {
        tables[k] = (0..n_in).collect();
        let ok = check(constraints, k, tables);
        return if ok {
            search_tables(c, sizes, constraints, k + 1, tables, emit)
        } else {
            Ok(true)
        };
    }
    if n_in > 0 && n_out == 0 {
        return Ok(true);
    }
    let mut t = vec![0usize; n_in];
    loop {
        tables[k] = t.clone();
        if check(constraints, k, tables)
            && !search_tables(c, sizes, constraints, k + 1, tables, emit)?
        {
            return Ok(false);
        }
        // next table, last entry fastest
        let mut p = n_in;
        loop {
            if p == 0 {
                return Ok(true);
            }
            p -= 1;
            t[p] += 1;
            if t[p] < n_out {
                break;
            }
            t[p] = 0;
        }
    }
}

fn check(constraints: &[Vec<(ArrId, ArrId, ArrId)>], k: usize, tables: &[Vec<usize>]) -> bool {
    constraints[k].iter().all(|&(g, f, gf)| {
        tables[gf.0]
            .iter()
            .enumerate()
            .all(|(rho, &v)| tables[g.0][tables[f.0][rho]] == v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catcore::named;

    fn arc<T>(x: T) -> Arc<T> {
        Arc::new(x)
    }

    #[test]
    fn constant_singleton_is_valid() {
        let w = arc(named::walking_arrow());
        assert!(validate_presheaf(&singleton_presheaf(&w)).is_ok());
    }

    #[test]
    fn size_mismatch_is_structural() {
        let w = arc(named::walking_arrow());
        let p = Presheaf::from_tables(
            w.clone(),
            vec![FinSet::new(1), FinSet::new(2)],
            vec![vec![0], vec![0, 1], vec![0]],
        );
        let r = validate_presheaf(&p);
        assert!(r.mentions("restriction table size"));
    }

    #[test]
    fn flipped_entry_breaks_composition() {
        let c = arc(named::chain3());
        let p = enumerate_presheaves(&c, 2, 10_000)
            .unwrap()
            .into_iter()
            .find(|p| {
                p.sets().iter().all(|s| s.size == 2)
                    && p.table(c.find_arrow("h").unwrap()) == [0, 1]
            })
            .unwrap();
        assert!(validate_presheaf(&p).is_ok());
        let h = c.find_arrow("h").unwrap();
        let m = p.with_entry(h, 0, 1);
        let r = validate_presheaf(&m);
        assert!(r
            .laws
            .iter()
            .any(|v| v.law == "composition restriction" && v.witness.contains("along h")));
    }

    #[test]
    fn identity_and_unique_maps() {
        let w = arc(named::walking_arrow());
        let p = arc(enumerate_presheaves(&w, 2, 1000).unwrap().pop().unwrap());
        assert!(validate_pshmap(&identity_map(&p)).is_ok());
        let one = arc(singleton_presheaf(&w));
        let maps = enumerate_pshmaps(&p, &one, 100).unwrap();
        assert_eq!(maps.len(), 1);
        assert!(validate_pshmap(&maps[0]).is_ok());
    }

    #[test]
    fn mutated_component_is_reported() {
        let w = arc(named::walking_arrow());
        let all: Vec<Arc<Presheaf>> = enumerate_presheaves(&w, 2, 1000)
            .unwrap()
            .into_iter()
            .map(arc)
            .collect();
        let mut checked = 0;
        for h in &all {
            for g in &all {
                for m in enumerate_pshmaps(h, g, 1000).unwrap() {
                    for i in 0..m.components.len() {
                        for rho in 0..m.components[i].len() {
                            for v in 0..g.size(ObjId(i)) {
                                if v == m.components[i][rho] {
                                    continue;
                                }
                                let mut bad = m.clone();
                                bad.components[i][rho] = v;
                                let valid = validate_pshmap(&bad).is_ok();
                                let listed = enumerate_pshmaps(h, g, 1000).unwrap().contains(&bad);
                                assert_eq!(valid, listed);
                                checked += 1;
                            }
                        }
                    }
                }
            }
            if checked > 2000 {
                break;
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn enumeration_matches_raw_filter() {
        let w = arc(named::walking_arrow());
        let fast = enumerate_presheaves(&w, 2, 1000).unwrap();
        // raw: sizes (a, b) each <= 2, all tables for id_a, id_b, f
        let mut slow = Vec::new();
        for sa in 0..=2usize {
            for sb in 0..=2usize {
                let tables_for = |n_in: usize, n_out: usize| -> Vec<Vec<usize>> {
                    let total = n_out.pow(n_in as u32);
                    (0..total)
                        .map(|k| {
                            (0..n_in)
                                .map(|p| k / n_out.pow((n_in - 1 - p) as u32) % n_out)
                                .collect()
                        })
                        .collect()
                };
                for ta in tables_for(sa, sa) {
                    for tb in tables_for(sb, sb) {
                        for tf in tables_for(sb, sa) {
                            let p = Presheaf::from_tables(
                                w.clone(),
                                vec![FinSet::new(sa), FinSet::new(sb)],
                                vec![ta.clone(), tb.clone(), tf],
                            );
                            if validate_presheaf(&p).is_ok() {
                                slow.push(p);
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(fast.len(), 11);
        assert_eq!(fast.len(), slow.len());
        for p in &slow {
            assert!(fast.contains(p));
        }
    }

    #[test]
    fn compose_maps_checks_contexts() {
        let w = arc(named::walking_arrow());
        let one = arc(singleton_presheaf(&w));
        let id = identity_map(&one);
        assert_eq!(compose_maps(&id, &id).unwrap(), id);
        let two = arc(Presheaf::new(
            w.clone(),
            vec![FinSet::new(2), FinSet::new(2)],
            vec![vec![0, 1], vec![0, 1], vec![0, 1]],
        )
        .unwrap());
        assert!(compose_maps(&id, &identity_map(&two)).is_err());
    }
}
