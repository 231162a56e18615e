use std::sync::Arc;

use serde::Serialize;

use crate::catcore::{ArrId, ObjId};
use crate::presheaf::{same_presheaf, validate_presheaf, FinSet, Presheaf};
use crate::report::Report;

/// Contexts are presheaves.
pub type Ctx = Presheaf;

/// Key of a dependent-function table at `(I, rho)`: an arrow `f: J -> I`
/// and an element `u` of `A(J, f(rho))`. Keys sort by (object, arrow, element).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PiKey {
    pub obj: ObjId,
    pub arrow: ArrId,
    pub elem: usize,
}

/// The elements of one `Pi` fiber: tables over a shared canonical key list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiFiber {
    pub keys: Arc<Vec<PiKey>>,
    pub tables: Vec<Vec<usize>>,
}

impl PiFiber {
    pub fn key_index(&self, key: &PiKey) -> Option<usize> {
        self.keys.binary_search(key).ok()
    }
}

/// One set `T(I, rho)`. Plain fibers are bare finite sets; fibers built by
/// the type formers remember how their elements decode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fiber {
    Atoms(FinSet),
    /// Dependent pairs `(u, v)` in lexicographic order.
    Pairs(Vec<(usize, usize)>),
    Funcs(PiFiber),
}

impl Fiber {
    pub fn atoms(n: usize) -> Self {
        Fiber::Atoms(FinSet::new(n))
    }

    pub fn len(&self) -> usize {
        match self {
            Fiber::Atoms(s) => s.size,
            Fiber::Pairs(p) => p.len(),
            Fiber::Funcs(f) => f.tables.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn label(&self, i: usize) -> String {
        match self {
            Fiber::Atoms(s) => s.label(i),
            Fiber::Pairs(p) => format!("({},{})", p[i].0, p[i].1),
            Fiber::Funcs(f) => {
                let body: Vec<String> = f
                    .keys
                    .iter()
                    .zip(&f.tables[i])
                    .map(|(k, v)| format!("{}:{}:{}->{}", k.obj.0, k.arrow.0, k.elem, v))
                    .collect();
                format!("fn[{}]", body.join(","))
            }
        }
    }
}

/// A type in context `H`: a set `T(I, rho)` for every `rho` in `H(I)`, and
/// for every `f: J -> I` a map `T(I, rho) -> T(J, f(rho))`.
#[derive(Clone, Debug)]
pub struct TyInCtx {
    pub(crate) ctx: Arc<Ctx>,
    /// `fibers[I][rho]`
    pub(crate) fibers: Vec<Vec<Fiber>>,
    /// `morph[f][rho][u]` for `f: J -> I`, `rho` in `H(I)`, `u` in `T(I, rho)`.
    pub(crate) morph: Vec<Vec<Vec<usize>>>,
}

impl PartialEq for TyInCtx {
    fn eq(&self, other: &Self) -> bool {
        self.fibers == other.fibers
            && self.morph == other.morph
            && same_presheaf(&self.ctx, &other.ctx)
    }
}

impl Eq for TyInCtx {}

impl TyInCtx {
    /// Raw constructor; see [`validate_ty`].
    pub fn from_tables(
        ctx: Arc<Ctx>,
        fibers: Vec<Vec<Fiber>>,
        morph: Vec<Vec<Vec<usize>>>,
    ) -> Self {
        Self { ctx, fibers, morph }
    }

    pub fn ctx(&self) -> &Arc<Ctx> {
        &self.ctx
    }

    pub fn fiber(&self, i: ObjId, rho: usize) -> &Fiber {
        &self.fibers[i.0][rho]
    }

    pub fn fibers(&self) -> &[Vec<Fiber>] {
        &self.fibers
    }

    pub fn size(&self, i: ObjId, rho: usize) -> usize {
        self.fibers[i.0][rho].len()
    }

    /// `T(I, J, f, rho, u)`.
    pub fn morph(&self, f: ArrId, rho: usize, u: usize) -> usize {
        self.morph[f.0][rho][u]
    }

    pub fn morph_table(&self, f: ArrId, rho: usize) -> &[usize] {
        &self.morph[f.0][rho]
    }

    pub fn morph_tables(&self) -> &[Vec<Vec<usize>>] {
        &self.morph
    }

    /// Copy with one morphism entry replaced (for mutation tests).
    pub fn with_morph_entry(&self, f: ArrId, rho: usize, u: usize, value: usize) -> Self {
        let mut t = self.clone();
        t.morph[f.0][rho][u] = value;
        t
    }
}

pub fn validate_ty(t: &TyInCtx) -> Report {
    let mut r = Report::ok();
    let h = &*t.ctx;
    let hr = validate_presheaf(h);
    if !hr.is_ok() {
        r.structural("context invalid", hr.summary());
        return r;
    }
    let c = h.base();
    if t.fibers.len() != c.num_objects() {
        r.structural(
            "fiber arity",
            format!(
                "{} fiber rows for {} objects",
                t.fibers.len(),
                c.num_objects()
            ),
        );
        return r;
    }
    for i in c.objects() {
        if t.fibers[i.0].len() != h.size(i) {
            r.structural(
                "fiber arity",
                format!(
                    "{} fibers at {} for {} environments",
                    t.fibers[i.0].len(),
                    c.object_label(i),
                    h.size(i)
                ),
            );
        }
    }
    if t.morph.len() != c.num_arrows() {
        r.structural(
            "morphism arity",
            format!("{} tables for {} arrows", t.morph.len(), c.num_arrows()),
        );
    }
    if r.has_structural() {
        return r;
    }
    for f in c.arrow_ids() {
        let (j, i) = (c.dom(f), c.cod(f));
        if t.morph[f.0].len() != h.size(i) {
            r.structural(
                "morphism arity",
                format!(
                    "{} has {} rows for {} environments",
                    c.arrow_name(f),
                    t.morph[f.0].len(),
                    h.size(i)
                ),
            );
            continue;
        }
        for rho in 0..h.size(i) {
            let row = &t.morph[f.0][rho];
            let target = t.size(j, h.restrict(f, rho));
            if row.len() != t.size(i, rho) {
                r.structural(
                    "morphism table size",
                    format!(
                        "{} at rho={rho} has {} entries for a fiber of {}",
                        c.arrow_name(f),
                        row.len(),
                        t.size(i, rho)
                    ),
                );
                continue;
            }
            for (u, &v) in row.iter().enumerate() {
                if v >= target {
                    r.structural(
                        "morphism out of range",
                        format!(
                            "T({}, rho={rho}, u={u}) = {v} but the target fiber has {target}",
                            c.arrow_name(f)
                        ),
                    );
                }
            }
        }
    }
    if r.has_structural() {
        return r;
    }
    for i in c.objects() {
        let id = c.id(i);
        for rho in 0..h.size(i) {
            for u in 0..t.size(i, rho) {
                let v = t.morph(id, rho, u);
                if v != u {
                    r.law(
                        "identity morphism",
                        format!("T(id_{}, rho={rho}, u={u}) = {v}", c.object_label(i)),
                    );
                }
            }
        }
    }
    // g: K -> J, f: J -> I, gf = g;f: K -> I
    for (g, f, gf) in c.composition_entries() {
        let i = c.cod(f);
        for rho in 0..h.size(i) {
            let f_rho = h.restrict(f, rho);
            for u in 0..t.size(i, rho) {
                let lhs = t.morph(gf, rho, u);
                let rhs = t.morph(g, f_rho, t.morph(f, rho, u));
                if lhs != rhs {
                    r.law(
                        "composition morphism",
                        format!(
                            "I={}, rho={rho}, u={u}: along {} gives {lhs}, along {} then {} gives {rhs}",
                            c.object_label(i),
                            c.arrow_name(gf),
                            c.arrow_name(f),
                            c.arrow_name(g)
                        ),
                    );
                }
            }
        }
    }
    r
}

/// A term: one element of `T(I, rho)` for every `(I, rho)`, compatible with
/// the morphism maps.
#[derive(Clone, Debug)]
pub struct TmInCtx {
    pub(crate) ty: Arc<TyInCtx>,
    /// `elem[I][rho]`
    pub(crate) elem: Vec<Vec<usize>>,
}

impl PartialEq for TmInCtx {
    fn eq(&self, other: &Self) -> bool {
        self.elem == other.elem && (Arc::ptr_eq(&self.ty, &other.ty) || *self.ty == *other.ty)
    }
}

impl Eq for TmInCtx {}

impl TmInCtx {
    pub fn from_tables(ty: Arc<TyInCtx>, elem: Vec<Vec<usize>>) -> Self {
        Self { ty, elem }
    }

    pub fn ty(&self) -> &Arc<TyInCtx> {
        &self.ty
    }

    pub fn ctx(&self) -> &Arc<Ctx> {
        &self.ty.ctx
    }

    pub fn at(&self, i: ObjId, rho: usize) -> usize {
        self.elem[i.0][rho]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.elem
    }

    pub fn with_elem(&self, i: ObjId, rho: usize, value: usize) -> Self {
        let mut t = self.clone();
        t.elem[i.0][rho] = value;
        t
    }
}

pub fn validate_tm(t: &TmInCtx) -> Report {
    let mut r = Report::ok();
    let tr = validate_ty(&t.ty);
    if !tr.is_ok() {
        r.structural("type invalid", tr.summary());
        return r;
    }
    let ty = &*t.ty;
    let h = &*ty.ctx;
    let c = h.base();
    if t.elem.len() != c.num_objects() {
        r.structural(
            "element arity",
            format!("{} rows for {} objects", t.elem.len(), c.num_objects()),
        );
        return r;
    }
    for i in c.objects() {
        if t.elem[i.0].len() != h.size(i) {
            r.structural(
                "element arity",
                format!(
                    "{} entries at {} for {} environments",
                    t.elem[i.0].len(),
                    c.object_label(i),
                    h.size(i)
                ),
            );
            continue;
        }
        for rho in 0..h.size(i) {
            let v = t.elem[i.0][rho];
            if v >= ty.size(i, rho) {
                r.structural(
                    "element out of range",
                    format!(
                        "t({}, rho={rho}) = {v} but the fiber has {}",
                        c.object_label(i),
                        ty.size(i, rho)
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
            let lhs = ty.morph(f, rho, t.elem[i.0][rho]);
            let rhs = t.elem[j.0][h.restrict(f, rho)];
            if lhs != rhs {
                r.law(
                    "term naturality",
                    format!(
                        "at {} from rho={rho} in {}: T(f)(t) = {lhs} but t(f(rho)) = {rhs}",
                        c.arrow_name(f),
                        c.object_label(i)
                    ),
                );
            }
        }
    }
    r
}
