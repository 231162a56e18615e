use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use presheaf_cwf::catcore::{enumerate_functors, enumerate_nat_trans, FinCategory, Functor, ObjId};
use presheaf_cwf::cwf::{enumerate_terms, validate_ty, TmInCtx, TyInCtx};
use presheaf_cwf::formers::pi_ty;
use presheaf_cwf::io::{category_arg, load_path, Loaded};
use presheaf_cwf::presheaf::check_yoneda_lemma;
use presheaf_cwf::rules::{run_suite, RunOptions};
use presheaf_cwf::surface::{run_script, Output, ScriptOptions, TermOut};
use presheaf_cwf::{Error, Result};
use serde_json::{json, Value};

use crate::{Ctx, Enumerate, EvalArgs, RulesArgs, Status};

/// Default bound for functor, natural transformation and term enumeration.
const DEFAULT_CAP: usize = 100_000;

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

pub fn validate(ctx: &Ctx, paths: &[PathBuf]) -> Status {
    let mut entries = Vec::new();
    let (mut invalid, mut unreadable) = (false, false);
    for path in paths {
        let shown = path.display().to_string();
        match load_path(path) {
            Ok(doc) => {
                let report = doc.validate();
                invalid |= !report.is_ok();
                if !ctx.json {
                    let verdict = if report.is_ok() { "ok" } else { "invalid" };
                    println!("{shown}: {verdict} ({})", doc.kind());
                    for v in &report.structural {
                        println!("  structural {v}");
                    }
                    for v in &report.laws {
                        println!("  law {v}");
                    }
                }
                entries.push(json!({
                    "path": shown,
                    "kind": doc.kind(),
                    "ok": report.is_ok(),
                    "structural": report.structural,
                    "laws": report.laws,
                }));
            }
            Err(e) => {
                unreadable = true;
                if !ctx.json {
                    println!("{shown}: error: {e}");
                }
                entries.push(json!({"path": shown, "error": e.to_string()}));
            }
        }
    }
    if ctx.json {
        print_json(&json!({ "files": entries }));
    }
    if unreadable {
        Status::Input
    } else {
        Status::of(!invalid)
    }
}

pub fn yoneda(ctx: &Ctx, category: &str, cap: Option<usize>) -> Result<Status> {
    let c = category_arg(category)?;
    let report = check_yoneda_lemma(&c, cap.unwrap_or(DEFAULT_CAP), ctx.exec)?;
    if ctx.json {
        print_json(&serde_json::to_value(&report).expect("json"));
    } else {
        for p in &report.pairs {
            let verdict = if p.ok() { "bijective" } else { "NOT bijective" };
            println!(
                "hom({x}, {y}) -> Nat(y{x}, y{y}): {} arrows, {} maps, {verdict}",
                p.arrows,
                p.maps,
                x = p.x,
                y = p.y
            );
        }
        println!("Yoneda lemma {}", if report.ok { "holds" } else { "FAILS" });
    }
    Ok(Status::of(report.ok))
}

pub fn rules(ctx: &Ctx, args: &RulesArgs) -> Result<Status> {
    let mut cfg = ctx.config.clone();
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.mode {
        cfg.mode = v;
    }
    if let Some(v) = args.max_objects {
        cfg.max_objects = v;
    }
    if let Some(v) = args.max_arrows {
        cfg.max_arrows = v;
    }
    if let Some(v) = args.max_set {
        cfg.max_set = v;
    }
    if let Some(v) = args.pi_cap {
        cfg.pi_cap = v;
    }
    cfg.check().map_err(Error::Load)?;
    let opts = RunOptions {
        exec: ctx.exec,
        rules: args.rules.clone(),
        mutation: args.mutation,
        fail_fast: args.fail_fast,
    };
    let start = Instant::now();
    let report = run_suite(&cfg, &opts)?;
    if ctx.json {
        println!("{}", report.to_json());
    } else {
        for r in &report.rules {
            let verdict = if r.passed() {
                "pass"
            } else if r.failures > 0 {
                "FAIL"
            } else {
                "unchecked"
            };
            print!(
                "{:<4} {verdict:<9} checked {:>4}  failures {:>3}  skipped {:>3}",
                r.id, r.fixtures, r.failures, r.skipped
            );
            if let Some(cx) = &r.first_counterexample {
                print!("  first: {} ({:?}) {}", cx.fixture, cx.kind, cx.witness);
            }
            println!();
        }
        println!(
            "{}/{} rules passed, {} failures, {:.1}s",
            report.passed,
            report.total,
            report.failures(),
            start.elapsed().as_secs_f64()
        );
    }
    Ok(Status::of(report.ok()))
}

/// An object by label, or by index when no label matches.
fn object(c: &FinCategory, name: &str) -> Result<ObjId> {
    c.find_object(name)
        .or_else(|| {
            name.parse()
                .ok()
                .filter(|&i| i < c.num_objects())
                .map(ObjId)
        })
        .ok_or_else(|| {
            Error::OutOfRange(format!(
                "no object `{name}` (objects: {})",
                c.object_labels().join(", ")
            ))
        })
}

fn values(t: &TermOut, at: Option<ObjId>, env: Option<usize>) -> Result<Vec<Value>> {
    let m = &t.term;
    let c = m.ctx().base();
    let objects: Vec<ObjId> = match at {
        Some(i) => vec![i],
        None => c.objects().collect(),
    };
    let mut out = Vec::new();
    for i in objects {
        let n = m.ctx().size(i);
        let envs: Vec<usize> = match env {
            Some(rho) if rho >= n => {
                return Err(Error::OutOfRange(format!(
                    "environment {rho} at `{}` (the context has {n} elements there)",
                    c.object_label(i)
                )))
            }
            Some(rho) => vec![rho],
            None => (0..n).collect(),
        };
        for rho in envs {
            let v = m.at(i, rho);
            out.push(json!({
                "object": c.object_label(i),
                "env": rho,
                "index": v,
                "label": m.ty().fiber(i, rho).label(v),
            }));
        }
    }
    Ok(out)
}

pub fn eval(ctx: &Ctx, args: &EvalArgs) -> Result<Status> {
    let text = std::fs::read_to_string(&args.script)
        .map_err(|e| Error::Load(format!("{}: {e}", args.script.display())))?;
    let dir = args.script.parent().unwrap_or(Path::new("."));
    let opts = ScriptOptions {
        pi_cap: args.pi_cap.unwrap_or(ctx.config.pi_cap),
        exec: ctx.exec,
    };
    let run = run_script(&text, dir, opts)?;
    let names: Vec<String> = match &args.term {
        Some(n) => vec![n.clone()],
        None => {
            let evals: Vec<String> = run
                .outputs
                .iter()
                .filter_map(|o| match o {
                    Output::Eval(n) => Some(n.clone()),
                    _ => None,
                })
                .collect();
            if evals.is_empty() {
                run.terms
                    .last()
                    .map(|t| t.name.clone())
                    .into_iter()
                    .collect()
            } else {
                evals
            }
        }
    };
    let mut terms = Vec::new();
    for name in &names {
        let t = run
            .term(name)
            .ok_or_else(|| Error::Scope(format!("unknown term `{name}`")))?;
        let at = args
            .at
            .as_deref()
            .map(|a| object(t.term.ctx().base(), a))
            .transpose()?;
        let vals = values(t, at, args.env)?;
        if !ctx.json {
            println!("{} : {} = {}", t.name, t.ty_comb, t.combinator);
            for v in &vals {
                println!(
                    "  {} env {}: {} ({})",
                    v["object"].as_str().unwrap_or(""),
                    v["env"],
                    v["index"],
                    v["label"].as_str().unwrap_or("")
                );
            }
        }
        terms.push(json!({
            "name": t.name,
            "type": t.ty_comb.to_string(),
            "combinator": t.combinator.to_string(),
            "values": vals,
        }));
    }
    let mut checks = Vec::new();
    let mut ok = true;
    for o in &run.outputs {
        if let Output::Check { name, report } = o {
            ok &= report.is_ok();
            if !ctx.json {
                println!(
                    "check {name}: {}",
                    if report.is_ok() { "ok" } else { "INVALID" }
                );
                for v in report.violations() {
                    println!("  {v}");
                }
            }
            checks.push(json!({
                "name": name,
                "ok": report.is_ok(),
                "structural": report.structural,
                "laws": report.laws,
            }));
        }
    }
    if ctx.json {
        print_json(&json!({"terms": terms, "checks": checks}));
    }
    Ok(Status::of(ok))
}

fn load_type(path: &Path) -> Result<Arc<TyInCtx>> {
    match load_path(path)? {
        Loaded::Type(t) => {
            validate_ty(&t).into_result()?;
            Ok(t)
        }
        other => Err(Error::Load(format!(
            "{}: expected a type document, found a {}",
            path.display(),
            other.kind()
        ))),
    }
}

/// Prints a count with optional listing. A budget error becomes a partial
/// count and status 3.
fn counted<T>(
    ctx: &Ctx,
    what: &str,
    found: Result<Vec<T>>,
    list: bool,
    show: impl Fn(&T) -> Value,
) -> Result<Status> {
    let (items, partial, status) = match found {
        Ok(items) => (items, None, Status::Ok),
        Err(Error::BudgetExceeded { partial, .. }) => (Vec::new(), Some(partial), Status::Budget),
        Err(e) => return Err(e),
    };
    let count = partial.unwrap_or(items.len());
    let listed: Vec<Value> = if list {
        items.iter().map(show).collect()
    } else {
        Vec::new()
    };
    if ctx.json {
        let mut v = json!({"what": what, "count": count, "partial": partial.is_some()});
        if list {
            v["items"] = Value::Array(listed);
        }
        print_json(&v);
    } else {
        for (k, item) in listed.iter().enumerate() {
            println!("{k}: {}", compact(item));
        }
        match partial {
            Some(n) => println!("{what}: at least {n} (budget exceeded, count is partial)"),
            None => println!("{what}: {count}"),
        }
    }
    Ok(status)
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).expect("json")
}

fn functor_value(f: &Functor) -> Value {
    let (c, d) = (&f.source, &f.target);
    let objects: serde_json::Map<String, Value> = c
        .objects()
        .map(|x| {
            (
                c.object_label(x).to_string(),
                json!(d.object_label(f.ob(x))),
            )
        })
        .collect();
    let arrows: serde_json::Map<String, Value> = c
        .arrow_ids()
        .filter(|&a| !c.is_identity(a))
        .map(|a| (c.arrow_name(a).to_string(), json!(d.arrow_name(f.arr(a)))))
        .collect();
    json!({"objects": objects, "arrows": arrows})
}

fn term_value(m: &TmInCtx) -> Value {
    let c = m.ctx().base();
    let elem: serde_json::Map<String, Value> = c
        .objects()
        .map(|i| {
            let row: Vec<String> = (0..m.ctx().size(i))
                .map(|rho| m.ty().fiber(i, rho).label(m.at(i, rho)))
                .collect();
            (c.object_label(i).to_string(), json!(row))
        })
        .collect();
    Value::Object(elem)
}

pub fn enumerate(ctx: &Ctx, what: &Enumerate) -> Result<Status> {
    match what {
        Enumerate::Functors {
            source,
            target,
            opts,
        } => {
            let (c, d) = (category_arg(source)?, category_arg(target)?);
            let found = enumerate_functors(&c, &d, opts.cap.unwrap_or(DEFAULT_CAP));
            counted(ctx, "functors", found, opts.list, functor_value)
        }
        Enumerate::Nattrans {
            source,
            target,
            from,
            to,
            opts,
        } => {
            let (c, d) = (category_arg(source)?, category_arg(target)?);
            let cap = opts.cap.unwrap_or(DEFAULT_CAP);
            let functors = enumerate_functors(&c, &d, cap)?;
            let pick = |k: usize| {
                functors.get(k).ok_or_else(|| {
                    Error::OutOfRange(format!("functor {k} (there are {})", functors.len()))
                })
            };
            match (from, to) {
                (Some(i), Some(j)) => {
                    let found = enumerate_nat_trans(pick(*i)?, pick(*j)?, cap);
                    counted(ctx, "natural transformations", found, opts.list, |t| {
                        let comps: serde_json::Map<String, Value> = c
                            .objects()
                            .map(|x| {
                                (
                                    c.object_label(x).to_string(),
                                    json!(d.arrow_name(t.components[x.0])),
                                )
                            })
                            .collect();
                        Value::Object(comps)
                    })
                }
                _ => {
                    // every ordered pair of functors, in canonical order
                    let mut pairs = Vec::new();
                    let mut partial = false;
                    for f in &functors {
                        for g in &functors {
                            let n = match enumerate_nat_trans(f, g, cap) {
                                Ok(ts) => ts.len(),
                                Err(Error::BudgetExceeded { partial: n, .. }) => {
                                    partial = true;
                                    n
                                }
                                Err(e) => return Err(e),
                            };
                            pairs.push(n);
                        }
                    }
                    let total: usize = pairs.iter().sum();
                    let k = functors.len();
                    let listed: Vec<Value> = pairs
                        .iter()
                        .enumerate()
                        .map(|(p, n)| json!({"from": p / k.max(1), "to": p % k.max(1), "count": n}))
                        .collect();
                    if ctx.json {
                        let mut v = json!({"what": "natural transformations", "functors": k, "count": total, "partial": partial});
                        if opts.list {
                            v["items"] = Value::Array(listed);
                        }
                        print_json(&v);
                    } else {
                        if opts.list {
                            for v in &listed {
                                println!("{} -> {}: {}", v["from"], v["to"], v["count"]);
                            }
                        }
                        let note = if partial {
                            " (budget exceeded, count is partial)"
                        } else {
                            ""
                        };
                        println!("natural transformations between {k} functors: {total}{note}");
                    }
                    Ok(if partial { Status::Budget } else { Status::Ok })
                }
            }
        }
        Enumerate::Terms { ty, opts } => {
            let t = load_type(ty)?;
            let found = enumerate_terms(&t, opts.cap.unwrap_or(DEFAULT_CAP));
            counted(ctx, "terms", found, opts.list, term_value)
        }
        Enumerate::PiElements {
            dom,
            cod,
            pi_cap,
            list,
        } => {
            let (a, b) = (load_type(dom)?, load_type(cod)?);
            let cap = pi_cap.unwrap_or(ctx.config.pi_cap);
            let pi = pi_ty(&a, &b, cap, ctx.exec)?;
            let c = a.ctx().base();
            let mut fibers = Vec::new();
            for i in c.objects() {
                for rho in 0..a.ctx().size(i) {
                    let f = pi.ty.fiber(i, rho);
                    let mut v = json!({"object": c.object_label(i), "env": rho, "count": f.len()});
                    if *list {
                        v["elements"] = json!((0..f.len()).map(|k| f.label(k)).collect::<Vec<_>>());
                    }
                    fibers.push(v);
                }
            }
            let total: usize = fibers
                .iter()
                .map(|f| f["count"].as_u64().unwrap_or(0) as usize)
                .sum();
            if ctx.json {
                print_json(&json!({"what": "pi elements", "total": total, "fibers": fibers}));
            } else {
                for f in &fibers {
                    println!(
                        "{} env {}: {}",
                        f["object"].as_str().unwrap_or(""),
                        f["env"],
                        f["count"]
                    );
                    for e in f["elements"].as_array().into_iter().flatten() {
                        println!("  {}", e.as_str().unwrap_or(""));
                    }
                }
                println!("pi elements: {total}");
            }
            Ok(Status::Ok)
        }
    }
}
