use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::report::Report;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObjId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArrId(pub usize);

impl fmt::Display for ObjId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for ArrId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub dom: ObjId,
    pub cod: ObjId,
}

/// A finite category given by explicit tables.
///
/// Composition is stored in diagrammatic order: `compose(f, g)` is "f then g"
/// and is defined exactly when `cod(f) = dom(g)`. Identities are ordinary
/// arrows designated by the identity map.
///
/// Values of this type are not necessarily lawful; run
/// [`validate_category`] on anything that did not come from one of the
/// checked constructors.
#[derive(Clone, Debug)]
pub struct FinCategory {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    ids: Vec<ArrId>,
    /// Row-major `arrows.len() x arrows.len()`.
    comp: Vec<Option<ArrId>>,
}

/// Structural equality: same tables, names ignored.
impl PartialEq for FinCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects.len() == other.objects.len()
            && self.ids == other.ids
            && self.comp == other.comp
            && self.arrows.len() == other.arrows.len()
            && self
                .arrows
                .iter()
                .zip(&other.arrows)
                .all(|(a, b)| a.dom == b.dom && a.cod == b.cod)
    }
}

impl Eq for FinCategory {}

impl FinCategory {
    /// Builds a category from raw tables without checking any law.
    ///
    /// Fails only if a composition entry names an arrow index outside the
    /// arrow list; everything else is left to [`validate_category`].
    pub fn from_tables(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        ids: Vec<ArrId>,
        compose: impl IntoIterator<Item = (ArrId, ArrId, ArrId)>,
    ) -> Result<Self> {
        let n = arrows.len();
        let mut comp = vec![None; n * n];
        for (f, g, h) in compose {
            if f.0 >= n || g.0 >= n || h.0 >= n {
                return Err(Error::OutOfRange(format!(
                    "composition entry ({f}, {g}) -> {h} with {n} arrows"
                )));
            }
            comp[f.0 * n + g.0] = Some(h);
        }
        Ok(Self {
            objects,
            arrows,
            ids,
            comp,
        })
    }

    /// Builds a category by names. Identity arrows `id_<object>` are created
    /// first (in object order), then the declared arrows; compositions with an
    /// identity are filled in automatically. Missing entries for composable
    /// pairs are left missing, for [`validate_category`] to report.
    pub fn from_names(
        objects: &[&str],
        arrows: &[(&str, &str, &str)],
        compose: &[(&str, &str, &str)],
    ) -> Result<Self> {
        let objects: Vec<String> = objects.iter().map(|s| s.to_string()).collect();
        let arrows: Vec<(String, String, String)> = arrows
            .iter()
            .map(|(n, d, c)| (n.to_string(), d.to_string(), c.to_string()))
            .collect();
        let compose: Vec<(String, String, String)> = compose
            .iter()
            .map(|(f, g, h)| (f.to_string(), g.to_string(), h.to_string()))
            .collect();
        Self::from_named_parts(objects, arrows, compose)
    }

    pub fn from_named_parts(
        objects: Vec<String>,
        arrows: Vec<(String, String, String)>,
        compose: Vec<(String, String, String)>,
    ) -> Result<Self> {
        let mut obj_index = HashMap::new();
        for (i, o) in objects.iter().enumerate() {
            if obj_index.insert(o.clone(), ObjId(i)).is_some() {
                return Err(Error::Load(format!("duplicate object name `{o}`")));
            }
        }
        let mut all = Vec::with_capacity(objects.len() + arrows.len());
        let mut ids = Vec::with_capacity(objects.len());
        for (i, o) in objects.iter().enumerate() {
            ids.push(ArrId(all.len()));
            all.push(Arrow {
                name: format!("id_{o}"),
                dom: ObjId(i),
                cod: ObjId(i),
            });
        }
        let lookup_obj = |name: &str| {
            obj_index
                .get(name)
                .copied()
                .ok_or_else(|| Error::Load(format!("unknown object `{name}`")))
        };
        for (name, dom, cod) in &arrows {
            all.push(Arrow {
                name: name.clone(),
                dom: lookup_obj(dom)?,
                cod: lookup_obj(cod)?,
            });
        }
        let mut arr_index = HashMap::new();
        for (i, a) in all.iter().enumerate() {
            if arr_index.insert(a.name.clone(), ArrId(i)).is_some() {
                return Err(Error::Load(format!("duplicate arrow name `{}`", a.name)));
            }
        }
        let lookup_arr = |name: &str| {
            arr_index
                .get(name)
                .copied()
                .ok_or_else(|| Error::Load(format!("unknown arrow `{name}`")))
        };
        let n = all.len();
        let mut comp = vec![None; n * n];
        for (x, &id) in ids.iter().enumerate() {
            for (i, a) in all.iter().enumerate() {
                if a.cod.0 == x {
                    comp[i * n + id.0] = Some(ArrId(i));
                }
                if a.dom.0 == x {
                    comp[id.0 * n + i] = Some(ArrId(i));
                }
            }
        }
        let mut seen = vec![false; n * n];
        for (f, g, h) in &compose {
            let (fi, gi, hi) = (lookup_arr(f)?, lookup_arr(g)?, lookup_arr(h)?);
            if ids.contains(&fi) || ids.contains(&gi) {
                return Err(Error::Load(format!(
                    "composition ({f}, {g}) involves an identity; those entries are implicit"
                )));
            }
            let slot = fi.0 * n + gi.0;
            if seen[slot] {
                return Err(Error::Load(format!(
                    "duplicate composition entry ({f}, {g})"
                )));
            }
            seen[slot] = true;
            comp[slot] = Some(hi);
        }
        Ok(Self {
            objects,
            arrows: all,
            ids,
            comp,
        })
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> + '_ {
        (0..self.objects.len()).map(ObjId)
    }

    pub fn arrow_ids(&self) -> impl Iterator<Item = ArrId> + '_ {
        (0..self.arrows.len()).map(ArrId)
    }

    pub fn object_label(&self, x: ObjId) -> &str {
        &self.objects[x.0]
    }

    pub fn object_labels(&self) -> &[String] {
        &self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, f: ArrId) -> &Arrow {
        &self.arrows[f.0]
    }

    pub fn arrow_name(&self, f: ArrId) -> &str {
        &self.arrows[f.0].name
    }

    pub fn dom(&self, f: ArrId) -> ObjId {
        self.arrows[f.0].dom
    }

    pub fn cod(&self, f: ArrId) -> ObjId {
        self.arrows[f.0].cod
    }

    pub fn id(&self, x: ObjId) -> ArrId {
        self.ids[x.0]
    }

    pub fn ids(&self) -> &[ArrId] {
        &self.ids
    }

    pub fn is_identity(&self, f: ArrId) -> bool {
        let d = self.dom(f);
        d.0 < self.ids.len() && self.ids[d.0] == f
    }

    /// `f` then `g`, if the table has an entry.
    pub fn compose(&self, f: ArrId, g: ArrId) -> Option<ArrId> {
        self.comp[f.0 * self.arrows.len() + g.0]
    }

    /// Composite of arrows known to be composable in a validated category.
    ///
    /// # Panics
    /// If the table has no entry for the pair.
    pub fn comp(&self, f: ArrId, g: ArrId) -> ArrId {
        self.compose(f, g).unwrap_or_else(|| {
            panic!(
                "no composite for ({}, {})",
                self.arrow_name(f),
                self.arrow_name(g)
            )
        })
    }

    /// Composition entries in row-major order.
    pub fn composition_entries(&self) -> impl Iterator<Item = (ArrId, ArrId, ArrId)> + '_ {
        let n = self.arrows.len();
        self.comp
            .iter()
            .enumerate()
            .filter_map(move |(i, h)| h.map(|h| (ArrId(i / n), ArrId(i % n), h)))
    }

    pub fn hom(&self, x: ObjId, y: ObjId) -> Vec<ArrId> {
        self.arrows
            .iter()
            .enumerate()
            .filter(|(_, a)| a.dom == x && a.cod == y)
            .map(|(i, _)| ArrId(i))
            .collect()
    }

    /// Arrows with codomain `x`, in index order.
    pub fn arrows_into(&self, x: ObjId) -> Vec<ArrId> {
        self.arrows
            .iter()
            .enumerate()
            .filter(|(_, a)| a.cod == x)
            .map(|(i, _)| ArrId(i))
            .collect()
    }

    /// `m[x][y] = |hom(x, y)|`.
    pub fn hom_sizes(&self) -> Vec<Vec<usize>> {
        let n = self.objects.len();
        let mut m = vec![vec![0; n]; n];
        for a in &self.arrows {
            if a.dom.0 < n && a.cod.0 < n {
                m[a.dom.0][a.cod.0] += 1;
            }
        }
        m
    }

    pub fn find_object(&self, label: &str) -> Option<ObjId> {
        self.objects.iter().position(|o| o == label).map(ObjId)
    }

    pub fn find_arrow(&self, name: &str) -> Option<ArrId> {
        self.arrows.iter().position(|a| a.name == name).map(ArrId)
    }

    /// Same category with every identity-free composition entry replaced.
    /// Used by tests that break a law on purpose.
    pub fn with_entry(&self, f: ArrId, g: ArrId, h: Option<ArrId>) -> Self {
        let mut c = self.clone();
        let n = c.arrows.len();
        c.comp[f.0 * n + g.0] = h;
        c
    }

    /// Is the underlying graph (ignoring direction) connected? The empty
    /// category counts as connected.
    pub fn is_connected(&self) -> bool {
        let n = self.objects.len();
        if n == 0 {
            return true;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for a in &self.arrows {
            let (x, y) = (find(&mut parent, a.dom.0), find(&mut parent, a.cod.0));
            parent[x] = y;
        }
        let root = find(&mut parent, 0);
        (0..n).all(|x| find(&mut parent, x) == root)
    }

    /// Number of connected components of the underlying undirected graph.
    pub fn component_count(&self) -> usize {
        let n = self.objects.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for a in &self.arrows {
            let (x, y) = (find(&mut parent, a.dom.0), find(&mut parent, a.cod.0));
            parent[x] = y;
        }
        (0..n).filter(|&x| find(&mut parent, x) == x).count()
    }
}

/// Checks every category law. Structural problems are reported first; law
/// checking only runs on a structurally sound table.
pub fn validate_category(c: &FinCategory) -> Report {
    let mut r = Report::ok();
    let no = c.objects.len();
    let na = c.arrows.len();
    for (i, a) in c.arrows.iter().enumerate() {
        if a.dom.0 >= no || a.cod.0 >= no {
            r.structural(
                "arrow endpoints out of range",
                format!(
                    "arrow {} ({}) has dom {} cod {} with {no} objects",
                    a.name, i, a.dom.0, a.cod.0
                ),
            );
        }
    }
    if c.ids.len() != no {
        r.structural(
            "identity map arity",
            format!("{} identities for {no} objects", c.ids.len()),
        );
    }
    for (x, id) in c.ids.iter().enumerate() {
        if id.0 >= na {
            r.structural(
                "identity out of range",
                format!("identity of object {x} is arrow #{} with {na} arrows", id.0),
            );
        }
    }
    if r.has_structural() {
        return r;
    }
    for f in 0..na {
        for g in 0..na {
            let composable = c.arrows[f].cod == c.arrows[g].dom;
            match (composable, c.comp[f * na + g]) {
                (true, None) => r.structural(
                    "missing composition",
                    format!(
                        "({}, {}) is composable but has no entry",
                        c.arrows[f].name, c.arrows[g].name
                    ),
                ),
                (false, Some(h)) => r.structural(
                    "composition of non-composable pair",
                    format!(
                        "({}, {}) -> {} but cod({}) != dom({})",
                        c.arrows[f].name,
                        c.arrows[g].name,
                        c.arrows[h.0].name,
                        c.arrows[f].name,
                        c.arrows[g].name
                    ),
                ),
                _ => {}
            }
        }
    }
    if r.has_structural() {
        return r;
    }
    let name = |f: ArrId| c.arrows[f.0].name.as_str();
    for x in c.objects() {
        let id = c.id(x);
        if c.dom(id) != x || c.cod(id) != x {
            r.law(
                "identity endpoints",
                format!(
                    "designated identity {} of {} is not an endomorphism of it",
                    name(id),
                    c.object_label(x)
                ),
            );
        }
    }
    for (f, g, h) in c.composition_entries() {
        if c.dom(h) != c.dom(f) || c.cod(h) != c.cod(g) {
            r.law(
                "composition endpoints",
                format!(
                    "({}, {}) -> {}: expected {} -> {}, got {} -> {}",
                    name(f),
                    name(g),
                    name(h),
                    c.object_label(c.dom(f)),
                    c.object_label(c.cod(g)),
                    c.object_label(c.dom(h)),
                    c.object_label(c.cod(h))
                ),
            );
        }
    }
    for f in c.arrow_ids() {
        let (x, y) = (c.dom(f), c.cod(f));
        let left = c.comp(c.id(x), f);
        if left != f {
            r.law(
                "left identity",
                format!(
                    "comp(id_{}, {}) = {} but should be {}",
                    c.object_label(x),
                    name(f),
                    name(left),
                    name(f)
                ),
            );
        }
        let right = c.comp(f, c.id(y));
        if right != f {
            r.law(
                "right identity",
                format!(
                    "comp({}, id_{}) = {} but should be {}",
                    name(f),
                    c.object_label(y),
                    name(right),
                    name(f)
                ),
            );
        }
    }
    // Associativity only makes sense once composites land where they should.
    if r.mentions("composition endpoints") {
        return r;
    }
    for f in c.arrow_ids() {
        for g in c.arrow_ids().filter(|&g| c.cod(f) == c.dom(g)) {
            let fg = c.comp(f, g);
            for h in c.arrow_ids().filter(|&h| c.cod(g) == c.dom(h)) {
                let lhs = c.comp(fg, h);
                let rhs = c.comp(f, c.comp(g, h));
                if lhs != rhs {
                    r.law(
                        "associativity",
                        format!(
                            "({}, {}, {}): comp(comp(f,g),h) = {} but comp(f,comp(g,h)) = {}",
                            name(f),
                            name(g),
                            name(h),
                            name(lhs),
                            name(rhs)
                        ),
                    );
                }
            }
        }
    }
    r
}

/// `n` objects and only their identities.
pub fn discrete_cat(n: usize) -> FinCategory {
    let labels: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    FinCategory::from_names(&refs, &[], &[]).expect("discrete category is well formed")
}

/// The opposite category: every arrow reversed, composition flipped.
pub fn op_cat(c: &FinCategory) -> Result<FinCategory> {
    validate_category(c).into_result()?;
    let arrows = c
        .arrows
        .iter()
        .map(|a| Arrow {
            name: a.name.clone(),
            dom: a.cod,
            cod: a.dom,
        })
        .collect();
    let entries: Vec<_> = c.composition_entries().map(|(f, g, h)| (g, f, h)).collect();
    FinCategory::from_tables(c.objects.clone(), arrows, c.ids.clone(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catcore::named;

    #[test]
    fn terminal_is_valid() {
        assert!(validate_category(&named::terminal()).is_ok());
    }

    #[test]
    fn walking_arrow_right_identity_broken() {
        let c = named::walking_arrow();
        let f = c.find_arrow("f").unwrap();
        let idb = c.find_arrow("id_b").unwrap();
        let broken = c.with_entry(f, idb, Some(idb));
        let r = validate_category(&broken);
        assert!(!r.is_ok());
        assert!(r
            .laws
            .iter()
            .any(|v| v.law == "right identity" && v.witness.contains("comp(f, id_b)")));
    }

    #[test]
    fn missing_and_extra_entries_are_structural() {
        let c = named::chain3();
        let f = c.find_arrow("f").unwrap();
        let g = c.find_arrow("g").unwrap();
        let missing = c.with_entry(f, g, None);
        let r = validate_category(&missing);
        assert!(r
            .structural
            .iter()
            .any(|v| v.law == "missing composition" && v.witness.contains("(f, g)")));
        assert!(r.laws.is_empty());
        let extra = c.with_entry(g, f, Some(f));
        assert!(validate_category(&extra).mentions("composition of non-composable pair"));
    }

    #[test]
    fn discrete_shapes() {
        let d0 = discrete_cat(0);
        assert_eq!((d0.num_objects(), d0.num_arrows()), (0, 0));
        assert!(validate_category(&d0).is_ok());
        let d2 = discrete_cat(2);
        assert_eq!((d2.num_objects(), d2.num_arrows()), (2, 2));
        assert_eq!(d2.composition_entries().count(), 2);
        assert!(validate_category(&d2).is_ok());
    }

    #[test]
    fn op_reverses_and_is_involutive() {
        let c = named::walking_arrow();
        let o = op_cat(&c).unwrap();
        let f = o.find_arrow("f").unwrap();
        assert_eq!(o.object_label(o.dom(f)), "b");
        assert_eq!(o.object_label(o.cod(f)), "a");
        assert!(validate_category(&o).is_ok());
        assert_eq!(op_cat(&o).unwrap(), c);
        assert_eq!(op_cat(&named::terminal()).unwrap(), named::terminal());

        let p = named::parallel_pair();
        let po = op_cat(&p).unwrap();
        let m = p.hom_sizes();
        let mo = po.hom_sizes();
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(m[x][y], mo[y][x]);
            }
        }
        assert_eq!(mo[1][0], 2);
    }

    #[test]
    fn op_rejects_invalid() {
        let c = named::walking_arrow();
        let f = c.find_arrow("f").unwrap();
        let idb = c.find_arrow("id_b").unwrap();
        assert!(op_cat(&c.with_entry(f, idb, Some(idb))).is_err());
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(FinCategory::from_names(&["a", "a"], &[], &[]).is_err());
        assert!(FinCategory::from_names(&["a"], &[("f", "a", "a"), ("f", "a", "a")], &[]).is_err());
        assert!(FinCategory::from_names(&["a"], &[("id_a", "a", "a")], &[]).is_err());
    }
}
