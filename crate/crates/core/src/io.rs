//! JSON documents for categories, presheaves, types and terms.
//!
//! Every document carries a top-level `"kind"` field. Nested references
//! (the category of a presheaf, the context of a type, the type of a term)
//! are either inline documents or strings: a path relative to the referring
//! file, or `builtin:<name>` for the named categories.
//!
//! Loading is deliberately lax: only names and JSON shapes are checked here.
//! Table sizes, ranges and laws are left to the validators, so that a bad
//! file gets a full report rather than the first complaint.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::catcore::{named, validate_category, FinCategory, ObjId};
use crate::cwf::{ctx_extend, validate_tm, validate_ty, Ctx, Fiber, TmInCtx, TyInCtx};
use crate::presheaf::{validate_presheaf, yoneda, FinSet, Presheaf};
use crate::report::{Report, Violation};
use crate::{Error, Result};

/// A loaded document of any kind.
#[derive(Clone, Debug)]
pub enum Loaded {
    Category(Arc<FinCategory>),
    Presheaf(Arc<Presheaf>),
    Type(Arc<TyInCtx>),
    Term(Arc<TmInCtx>),
}

impl Loaded {
    pub fn kind(&self) -> &'static str {
        match self {
            Loaded::Category(_) => "category",
            Loaded::Presheaf(_) => "presheaf",
            Loaded::Type(_) => "type",
            Loaded::Term(_) => "term",
        }
    }

    /// Validates the document and everything it refers to, innermost first.
    /// An invalid layer stops the check, with its violations prefixed by the
    /// layer name.
    pub fn validate(&self) -> Report {
        fn layer(name: &str, r: Report) -> std::result::Result<(), Report> {
            if r.is_ok() {
                return Ok(());
            }
            let tag = |v: Violation| Violation::new(v.law, format!("{name}: {}", v.witness));
            Err(Report {
                structural: r.structural.into_iter().map(tag).collect(),
                laws: r.laws.into_iter().map(tag).collect(),
            })
        }
        let run = || -> std::result::Result<(), Report> {
            match self {
                Loaded::Category(c) => layer("category", validate_category(c)),
                Loaded::Presheaf(h) => {
                    layer("category", validate_category(h.base()))?;
                    layer("presheaf", validate_presheaf(h))
                }
                Loaded::Type(t) => {
                    layer("category", validate_category(t.ctx().base()))?;
                    layer("context", validate_presheaf(t.ctx()))?;
                    layer("type", validate_ty(t))
                }
                Loaded::Term(m) => {
                    layer("category", validate_category(m.ctx().base()))?;
                    layer("context", validate_presheaf(m.ctx()))?;
                    layer("type", validate_ty(m.ty()))?;
                    layer("term", validate_tm(m))
                }
            }
        };
        run().err().unwrap_or_default()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CategoryDoc {
    #[allow(dead_code)]
    kind: String,
    #[serde(default)]
    builtin: Option<String>,
    #[serde(default)]
    objects: Vec<String>,
    #[serde(default)]
    arrows: Vec<ArrowDoc>,
    /// `[f, g, h]`: `f` then `g` is `h`.
    #[serde(default)]
    compose: Vec<(String, String, String)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrowDoc {
    name: String,
    dom: String,
    cod: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SetDoc {
    Size(usize),
    Labels(Vec<String>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EntryDoc {
    Index(usize),
    Label(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PresheafDoc {
    #[allow(dead_code)]
    kind: String,
    category: Value,
    #[serde(default)]
    representable: Option<String>,
    #[serde(default)]
    sets: BTreeMap<String, SetDoc>,
    #[serde(default)]
    restrict: BTreeMap<String, Vec<EntryDoc>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TypeDoc {
    #[allow(dead_code)]
    kind: String,
    context: Value,
    /// Per object, one fiber per context element.
    fibers: BTreeMap<String, Vec<SetDoc>>,
    /// Per arrow `f: J -> I`, one table per element of the context at `I`.
    #[serde(default)]
    morph: BTreeMap<String, Vec<Vec<EntryDoc>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtensionDoc {
    #[allow(dead_code)]
    kind: String,
    #[serde(rename = "type")]
    ty: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    #[allow(dead_code)]
    kind: String,
    #[serde(rename = "type")]
    ty: Value,
    elem: BTreeMap<String, Vec<EntryDoc>>,
}

fn load_err(e: impl std::fmt::Display) -> Error {
    Error::Load(e.to_string())
}

fn finset(s: SetDoc) -> Result<FinSet> {
    match s {
        SetDoc::Size(n) => Ok(FinSet::new(n)),
        SetDoc::Labels(l) => FinSet::labelled(l).map_err(Error::Load),
    }
}

/// An entry as an index into `set`; out-of-range indices pass through for
/// the validator to report.
fn entry(e: &EntryDoc, set: Option<&FinSet>, what: &str) -> Result<usize> {
    match e {
        EntryDoc::Index(i) => Ok(*i),
        EntryDoc::Label(l) => set
            .and_then(|s| s.position(l))
            .ok_or_else(|| Error::Load(format!("{what}: unknown element `{l}`"))),
    }
}

fn object(c: &FinCategory, name: &str) -> Result<ObjId> {
    c.find_object(name)
        .ok_or_else(|| Error::Load(format!("unknown object `{name}`")))
}

/// Resolves documents relative to a directory.
#[derive(Clone, Debug)]
pub struct Loader {
    dir: PathBuf,
}

impl Loader {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// A loader for documents that refer relative to `path`.
    pub fn beside(path: &Path) -> Self {
        Self::new(path.parent().map(Path::to_path_buf).unwrap_or_default())
    }

    fn read(&self, rel: &str) -> Result<(Value, Loader)> {
        let path = self.dir.join(rel);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Load(format!("{}: {e}", path.display())))?;
        let v = serde_json::from_str(&text)
            .map_err(|e| Error::Load(format!("{}: {e}", path.display())))?;
        Ok((v, Loader::beside(&path)))
    }

    /// A reference: a path, `builtin:<name>`, or an inline document.
    fn deref(&self, v: &Value) -> Result<(Value, Loader)> {
        match v {
            Value::String(s) => self.read(s),
            other => Ok((other.clone(), self.clone())),
        }
    }

    pub fn category(&self, v: &Value) -> Result<Arc<FinCategory>> {
        if let Value::String(s) = v {
            if let Some(name) = s.strip_prefix("builtin:") {
                return builtin_category(name).map(Arc::new);
            }
        }
        let (v, _) = self.deref(v)?;
        expect_kind(&v, "category")?;
        let d: CategoryDoc = serde_json::from_value(v).map_err(load_err)?;
        if let Some(name) = d.builtin {
            return builtin_category(&name).map(Arc::new);
        }
        let arrows = d
            .arrows
            .into_iter()
            .map(|a| (a.name, a.dom, a.cod))
            .collect();
        FinCategory::from_named_parts(d.objects, arrows, d.compose).map(Arc::new)
    }

    /// A presheaf, or `{"kind": "extension", "type": T}` for the context
    /// extension `H.T` of a valid type `T` over `H`.
    pub fn presheaf(&self, v: &Value) -> Result<Arc<Presheaf>> {
        let (v, here) = self.deref(v)?;
        if v.get("kind").and_then(Value::as_str) == Some("extension") {
            let d: ExtensionDoc = serde_json::from_value(v).map_err(load_err)?;
            let t = here.ty(&d.ty)?;
            validate_ty(&t).into_result()?;
            return Ok(Arc::new(ctx_extend(&t)));
        }
        expect_kind(&v, "presheaf")?;
        let d: PresheafDoc = serde_json::from_value(v).map_err(load_err)?;
        let c = here.category(&d.category)?;
        if let Some(x) = d.representable {
            return Ok(Arc::new(yoneda(&c, object(&c, &x)?)));
        }
        let mut sets: Vec<Option<FinSet>> = vec![None; c.num_objects()];
        for (name, s) in d.sets {
            sets[object(&c, &name)?.0] = Some(finset(s)?);
        }
        let sets: Vec<FinSet> = sets
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                s.ok_or_else(|| {
                    Error::Load(format!("no set for object `{}`", c.object_label(ObjId(i))))
                })
            })
            .collect::<Result<_>>()?;
        let mut tables: Vec<Option<Vec<usize>>> = vec![None; c.num_arrows()];
        for (name, t) in &d.restrict {
            let f = c
                .find_arrow(name)
                .ok_or_else(|| Error::Load(format!("unknown arrow `{name}`")))?;
            let dom = &sets[c.dom(f).0];
            tables[f.0] = Some(
                t.iter()
                    .map(|e| entry(e, Some(dom), name))
                    .collect::<Result<_>>()?,
            );
        }
        let tables = c
            .arrow_ids()
            .map(|f| match tables[f.0].take() {
                Some(t) => t,
                None if c.is_identity(f) => (0..sets[c.cod(f).0].size).collect(),
                None => Vec::new(),
            })
            .collect();
        Ok(Arc::new(Presheaf::from_tables(c, sets, tables)))
    }

    pub fn ty(&self, v: &Value) -> Result<Arc<TyInCtx>> {
        let (v, here) = self.deref(v)?;
        expect_kind(&v, "type")?;
        let d: TypeDoc = serde_json::from_value(v).map_err(load_err)?;
        let h = here.presheaf(&d.context)?;
        let c = h.base().clone();
        let mut fibers: Vec<Vec<Fiber>> = vec![Vec::new(); c.num_objects()];
        for (name, row) in d.fibers {
            fibers[object(&c, &name)?.0] = row
                .into_iter()
                .map(|s| finset(s).map(Fiber::Atoms))
                .collect::<Result<_>>()?;
        }
        let mut morph: Vec<Option<Vec<Vec<usize>>>> = vec![None; c.num_arrows()];
        for (name, rows) in &d.morph {
            let f = c
                .find_arrow(name)
                .ok_or_else(|| Error::Load(format!("unknown arrow `{name}`")))?;
            let dom_row = &fibers[c.dom(f).0];
            let mut tables = Vec::with_capacity(rows.len());
            for (rho, row) in rows.iter().enumerate() {
                // labels resolve in the fiber over the restricted element
                let target = (rho < h.size(c.cod(f)))
                    .then(|| h.restrict(f, rho))
                    .and_then(|r| dom_row.get(r))
                    .and_then(|fb| match fb {
                        Fiber::Atoms(s) => Some(s),
                        _ => None,
                    });
                tables.push(
                    row.iter()
                        .map(|e| entry(e, target, name))
                        .collect::<Result<_>>()?,
                );
            }
            morph[f.0] = Some(tables);
        }
        let morph = c
            .arrow_ids()
            .map(|f| match morph[f.0].take() {
                Some(t) => t,
                None if c.is_identity(f) => fibers[c.cod(f).0]
                    .iter()
                    .map(|fb| (0..fb.len()).collect())
                    .collect(),
                None => Vec::new(),
            })
            .collect();
        Ok(Arc::new(TyInCtx::from_tables(h, fibers, morph)))
    }

    pub fn term(&self, v: &Value) -> Result<Arc<TmInCtx>> {
        let (v, here) = self.deref(v)?;
        expect_kind(&v, "term")?;
        let d: TermDoc = serde_json::from_value(v).map_err(load_err)?;
        let t = here.ty(&d.ty)?;
        let c = t.ctx().base().clone();
        let mut elem: Vec<Vec<usize>> = vec![Vec::new(); c.num_objects()];
        for (name, row) in &d.elem {
            let i = object(&c, name)?;
            elem[i.0] = row
                .iter()
                .enumerate()
                .map(|(rho, e)| {
                    let set = t.fibers()[i.0].get(rho).and_then(|fb| match fb {
                        Fiber::Atoms(s) => Some(s),
                        _ => None,
                    });
                    entry(e, set, name)
                })
                .collect::<Result<_>>()?;
        }
        Ok(Arc::new(TmInCtx::from_tables(t, elem)))
    }

    /// Any document, dispatched on its `kind`.
    pub fn any(&self, v: &Value) -> Result<Loaded> {
        let (v, here) = self.deref(v)?;
        match v.get("kind").and_then(Value::as_str) {
            Some("category") => here.category(&v).map(Loaded::Category),
            Some("presheaf") => here.presheaf(&v).map(Loaded::Presheaf),
            Some("type") => here.ty(&v).map(Loaded::Type),
            Some("term") => here.term(&v).map(Loaded::Term),
            Some(k) => Err(Error::Load(format!(
                "unknown kind `{k}` (expected category, presheaf, type or term)"
            ))),
            None => Err(Error::Load("missing string field `kind`".into())),
        }
    }
}

fn expect_kind(v: &Value, kind: &str) -> Result<()> {
    match v.get("kind").and_then(Value::as_str) {
        Some(k) if k == kind => Ok(()),
        Some(k) => Err(Error::Load(format!(
            "expected a {kind} document, found kind `{k}`"
        ))),
        None => Err(Error::Load(format!(
            "expected a {kind} document, found no `kind` field"
        ))),
    }
}

pub fn builtin_category(name: &str) -> Result<FinCategory> {
    named::by_name(name).ok_or_else(|| {
        Error::Load(format!(
            "unknown builtin category `{name}` (known: terminal, walking_arrow, parallel_pair, chain<n>, discrete<n>, empty)"
        ))
    })
}

/// Loads a document file of any kind.
pub fn load_path(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Load(format!("{}: {e}", path.display())))?;
    let v: Value =
        serde_json::from_str(&text).map_err(|e| Error::Load(format!("{}: {e}", path.display())))?;
    Loader::beside(path).any(&v).map_err(|e| match e {
        Error::Load(m) => Error::Load(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// A category reference as written on a command line: a builtin name, or a
/// path to a category document.
pub fn category_arg(arg: &str) -> Result<Arc<FinCategory>> {
    let name = arg.strip_prefix("builtin:").unwrap_or(arg);
    if let Some(c) = named::by_name(name) {
        return Ok(Arc::new(c));
    }
    match load_path(Path::new(arg))? {
        Loaded::Category(c) => Ok(c),
        other => Err(Error::Load(format!(
            "{arg}: expected a category, found a {}",
            other.kind()
        ))),
    }
}

/// Inline category document.
pub fn category_doc(c: &FinCategory) -> Value {
    let arrows: Vec<Value> = c
        .arrow_ids()
        .filter(|&f| !c.is_identity(f))
        .map(|f| json!({"name": c.arrow_name(f), "dom": c.object_label(c.dom(f)), "cod": c.object_label(c.cod(f))}))
        .collect();
    let compose: Vec<Value> = c
        .composition_entries()
        .filter(|(f, g, _)| !c.is_identity(*f) && !c.is_identity(*g))
        .map(|(f, g, h)| json!([c.arrow_name(f), c.arrow_name(g), c.arrow_name(h)]))
        .collect();
    json!({"kind": "category", "objects": c.object_labels(), "arrows": arrows, "compose": compose})
}

/// Inline presheaf document, with its category inline.
pub fn presheaf_doc(h: &Presheaf) -> Value {
    let c = h.base();
    let sets: serde_json::Map<String, Value> = c
        .objects()
        .map(|i| {
            let s = h.set(i);
            let v = match &s.labels {
                Some(l) => json!(l),
                None => json!(s.size),
            };
            (c.object_label(i).to_string(), v)
        })
        .collect();
    let restrict: serde_json::Map<String, Value> = c
        .arrow_ids()
        .filter(|&f| !c.is_identity(f))
        .map(|f| (c.arrow_name(f).to_string(), json!(h.table(f))))
        .collect();
    json!({"kind": "presheaf", "category": category_doc(c), "sets": sets, "restrict": restrict})
}

/// Inline document for a type whose fibers are plain sets.
pub fn type_doc(t: &TyInCtx) -> Value {
    let c = t.ctx().base();
    let fibers: serde_json::Map<String, Value> = c
        .objects()
        .map(|i| {
            (
                c.object_label(i).to_string(),
                json!(t.fibers()[i.0].iter().map(Fiber::len).collect::<Vec<_>>()),
            )
        })
        .collect();
    let morph: serde_json::Map<String, Value> = c
        .arrow_ids()
        .filter(|&f| !c.is_identity(f))
        .map(|f| (c.arrow_name(f).to_string(), json!(t.morph_tables()[f.0])))
        .collect();
    json!({"kind": "type", "context": presheaf_doc(t.ctx()), "fibers": fibers, "morph": morph})
}

/// Inline term document.
pub fn term_doc(m: &TmInCtx) -> Value {
    let c = m.ctx().base();
    let elem: serde_json::Map<String, Value> = c
        .objects()
        .map(|i| (c.object_label(i).to_string(), json!(m.table()[i.0])))
        .collect();
    json!({"kind": "term", "type": type_doc(m.ty()), "elem": elem})
}

/// The context presheaf of any loaded document that has one.
pub fn context_of(l: &Loaded) -> Option<&Arc<Ctx>> {
    match l {
        Loaded::Type(t) => Some(t.ctx()),
        Loaded::Term(m) => Some(m.ctx()),
        _ => None,
    }
}
