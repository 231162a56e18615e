//! The acceptance criteria, one line each. Every expected value comes from
//! a brute-force count or a direct table comparison made here.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use presheaf_cwf::catcore::{discrete_cat, named, FinCategory, ObjId};
use presheaf_cwf::cwf::{
    ctx_extend, discrete_ty, enumerate_terms, proj_p_into, shift, sub_single, tm_subst, ty_subst,
    validate_tm, var_q_along, Ctx, Fiber, TmInCtx, TyInCtx,
};
use presheaf_cwf::formers::{
    app_tm, fst_tm, lambda_tm, pair_tm, pi_ty, sigma_ty, snd_tm, DEFAULT_PI_CAP,
};
use presheaf_cwf::mutation::Mutation;
use presheaf_cwf::par::{self, Exec};
use presheaf_cwf::presheaf::{
    category_of_elements, check_yoneda_lemma, enumerate_presheaves, singleton_presheaf, yoneda,
    FinSet, Presheaf,
};
use presheaf_cwf::rules::{base_family, gen_fixtures, run_suite, Fixture, RunOptions, SuiteConfig};
use presheaf_cwf::surface::{
    elaborate, interpret_in, print_combinator, ScriptOptions, SurfaceTerm, SurfaceType,
};
use presheaf_cwf::Error;

/// Terms enumerated per family in the beta/eta sweep.
const TERM_CAP: usize = 64;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s(e: Error) -> String {
    e.to_string()
}

fn suite_json(exec: Exec) -> Result<(String, bool, usize, usize, f64), String> {
    let start = Instant::now();
    let opts = RunOptions {
        exec,
        ..RunOptions::default()
    };
    let r = run_suite(&SuiteConfig::default(), &opts).map_err(e2s)?;
    Ok((
        r.to_json(),
        r.ok(),
        r.passed,
        r.failures(),
        start.elapsed().as_secs_f64(),
    ))
}

fn rule_suite() -> Verdict {
    let (json, ok, passed, failures, secs) = suite_json(Exec::Parallel)?;
    let v: serde_json::Value = serde_json::from_str(&json).map_err(|e| e.to_string())?;
    let ids: Vec<&str> = v["rules"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["id"].as_str().unwrap())
        .collect();
    let structural = ids.iter().filter(|i| i.starts_with('S')).count();
    let formers = ids.iter().filter(|i| i.starts_with('F')).count();
    let line = format!("{passed}/39 rules ({structural} structural, {formers} former), {failures} failures, {secs:.1}s");
    ensure(
        ok && passed == 39 && structural == 20 && formers == 19 && failures == 0 && secs < 120.0,
        || line.clone(),
    )?;
    Ok(line)
}

/// Natural transformations `h => g` by trying every family of functions.
fn brute_maps(h: &Presheaf, g: &Presheaf) -> usize {
    let c = h.base();
    let slots: Vec<(ObjId, usize)> = c
        .objects()
        .flat_map(|i| (0..h.size(i)).map(move |r| (i, r)))
        .collect();
    let radix: Vec<usize> = slots.iter().map(|(i, _)| g.size(*i)).collect();
    if radix.contains(&0) {
        return 0;
    }
    let at = |digits: &[usize], i: ObjId, rho: usize| {
        digits[slots.iter().position(|s| *s == (i, rho)).unwrap()]
    };
    let mut digits = vec![0; slots.len()];
    let mut count = 0;
    loop {
        let natural = c.arrow_ids().all(|f| {
            let (j, i) = (c.dom(f), c.cod(f));
            (0..h.size(i))
                .all(|rho| at(&digits, j, h.restrict(f, rho)) == g.restrict(f, at(&digits, i, rho)))
        });
        count += usize::from(natural);
        let mut k = 0;
        loop {
            if k == digits.len() {
                return count;
            }
            digits[k] += 1;
            if digits[k] < radix[k] {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

fn yoneda_lemma() -> Verdict {
    let cats: Vec<(&str, FinCategory)> = vec![
        ("terminal", named::terminal()),
        ("discrete2", discrete_cat(2)),
        ("walking_arrow", named::walking_arrow()),
        ("chain3", named::chain3()),
        ("parallel_pair", named::parallel_pair()),
    ];
    let mut pairs = 0;
    for (name, c) in cats {
        let c = Arc::new(c);
        let report = check_yoneda_lemma(&c, 100_000, Exec::Parallel).map_err(e2s)?;
        ensure(report.ok, || format!("{name}: not a bijection"))?;
        for p in &report.pairs {
            let (x, y) = (c.find_object(&p.x).unwrap(), c.find_object(&p.y).unwrap());
            let brute = brute_maps(&yoneda(&c, x), &yoneda(&c, y));
            let arrows = c.hom(x, y).len();
            ensure(
                p.maps == brute && p.arrows == arrows && brute == arrows,
                || {
                    format!(
                        "{name} ({}, {}): {} maps, brute force {brute}, {arrows} arrows",
                        p.x, p.y, p.maps
                    )
                },
            )?;
            pairs += 1;
        }
    }
    Ok(format!(
        "5 categories, {pairs} object pairs, counts match brute force"
    ))
}

/// `q` under `d` weakenings, written out.
fn weakened_q(d: usize) -> String {
    format!("{}q{}", "(".repeat(d), ")p".repeat(d))
}

/// Splits an element of `H.A1...An(I)` into its components, assuming pairs
/// `(rho, u)` are listed by `rho` and then `u`.
fn components(levels: &[Arc<TyInCtx>], i: ObjId, mut k: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for t in levels.iter().rev() {
        let sizes: Vec<usize> = (0..t.ctx().size(i)).map(|rho| t.size(i, rho)).collect();
        let mut rho = 0;
        while k >= sizes[rho] {
            k -= sizes[rho];
            rho += 1;
        }
        out.push(k);
        k = rho;
    }
    out.reverse();
    out
}

fn variables() -> Verdict {
    let names = ["x", "y", "z", "w"];
    let var = |n: &str| SurfaceTerm::Var(n.to_string());
    // the three-variable example, verbatim
    for (x, want) in [("x", "((q)p)p"), ("y", "(q)p"), ("z", "q")] {
        let got = print_combinator(&elaborate(&names[..3], &var(x)).map_err(e2s)?);
        ensure(got == want, || format!("{x} elaborated to {got}"))?;
    }
    let menu = [
        SurfaceType::Discrete(1),
        SurfaceType::Discrete(2),
        SurfaceType::Pi(
            "v".into(),
            Box::new(SurfaceType::Discrete(2)),
            Box::new(SurfaceType::Discrete(2)),
        ),
    ];
    let walking = Arc::new(named::walking_arrow());
    let chain = Arc::new(named::chain3());
    let mut bases: Vec<Arc<Ctx>> = vec![
        Arc::new(singleton_presheaf(&Arc::new(named::terminal()))),
        Arc::new(yoneda(&chain, ObjId(2))),
        Arc::new(yoneda(&Arc::new(named::parallel_pair()), ObjId(1))),
    ];
    bases.extend(
        enumerate_presheaves(&walking, 2, 1000)
            .map_err(e2s)?
            .into_iter()
            .map(Arc::new),
    );
    let (mut syntactic, mut semantic) = (0, 0);
    for n in 1..=4 {
        for i in 0..n {
            let got = print_combinator(&elaborate(&names[..n], &var(names[i])).map_err(e2s)?);
            ensure(got == weakened_q(n - 1 - i), || {
                format!("variable {i} of {n}: {got}")
            })?;
            syntactic += 1;
        }
        let shapes = (0..n).fold(vec![Vec::new()], |acc, _| {
            acc.into_iter()
                .flat_map(|p: Vec<usize>| {
                    (0..menu.len()).map(move |k| [p.clone(), vec![k]].concat())
                })
                .collect()
        });
        for shape in shapes {
            let binders: Vec<(String, SurfaceType)> = shape
                .iter()
                .zip(names)
                .map(|(&k, x)| (x.to_string(), menu[k].clone()))
                .collect();
            for h in &bases {
                for (i, (x, a)) in binders.iter().enumerate() {
                    let got = interpret_in(h, &binders, a, &var(x), ScriptOptions::default())
                        .map_err(e2s)?;
                    ensure(validate_tm(&got.term).is_ok(), || {
                        format!("{x} in {shape:?} does not validate")
                    })?;
                    let levels: Vec<Arc<TyInCtx>> =
                        got.binders.iter().map(|s| s.ty().clone()).collect();
                    let ctx = got.term.ctx();
                    for obj in ctx.base().objects() {
                        for k in 0..ctx.size(obj) {
                            let want = components(&levels, obj, k)[i];
                            ensure(got.term.at(obj, k) == want, || {
                                format!(
                                    "{x} in {shape:?} at ({obj:?}, {k}) is {}, expected {want}",
                                    got.term.at(obj, k)
                                )
                            })?;
                        }
                    }
                    semantic += 1;
                }
            }
        }
    }
    Ok(format!(
        "x, y, z -> ((q)p)p, (q)p, q; {syntactic} variables by syntax, {semantic} by evaluation over {} contexts",
        bases.len()
    ))
}

fn set_collapse() -> Verdict {
    let h = Arc::new(singleton_presheaf(&Arc::new(named::terminal())));
    let star = ObjId(0);
    let mut cases = 0;
    for n in 0..=3usize {
        let a = Arc::new(discrete_ty(&h, FinSet::new(n)));
        let ext = Arc::new(ctx_extend(&a));
        for code in 0..4usize.pow(n as u32) {
            let sizes: Vec<usize> = (0..n).map(|k| code / 4usize.pow(k as u32) % 4).collect();
            let fibers = vec![sizes
                .iter()
                .map(|&s| Fiber::Atoms(FinSet::new(s)))
                .collect()];
            let morph = vec![sizes.iter().map(|&s| (0..s).collect()).collect()];
            let b = Arc::new(TyInCtx::from_tables(ext.clone(), fibers, morph));
            // every choice function, one digit per element of A
            let mut functions = 0;
            let mut digits = vec![0; n];
            'count: loop {
                if digits.iter().zip(&sizes).all(|(d, s)| d < s) {
                    functions += 1;
                }
                for k in 0..n {
                    digits[k] += 1;
                    if digits[k] < sizes[k].max(1) {
                        continue 'count;
                    }
                    digits[k] = 0;
                }
                break;
            }
            let mut pairs = 0;
            for &s in &sizes {
                for _ in 0..s {
                    pairs += 1;
                }
            }
            let pi = pi_ty(&a, &b, DEFAULT_PI_CAP, Exec::Sequential).map_err(e2s)?;
            let sigma = sigma_ty(&a, &b).map_err(e2s)?;
            let (gp, gs) = (pi.ty.size(star, 0), sigma.ty.size(star, 0));
            ensure(gp == functions && gs == pairs, || {
                format!("B sizes {sizes:?}: Pi {gp} vs {functions}, Sigma {gs} vs {pairs}")
            })?;
            cases += 1;
        }
    }
    Ok(format!(
        "{cases} families over the terminal category, Pi and Sigma counts exact"
    ))
}

fn discreteness() -> Verdict {
    let mut bases: Vec<Arc<FinCategory>> = base_family(&SuiteConfig::default())
        .map_err(e2s)?
        .into_iter()
        .map(|(_, c)| c)
        .filter(|c| c.num_objects() > 0)
        .collect();
    bases.push(Arc::new(named::walking_arrow()));
    let mut fixtures = 0;
    for c in &bases {
        for h in enumerate_presheaves(c, 2, 100_000).map_err(e2s)? {
            let el = category_of_elements(&h).map_err(e2s)?;
            if el.num_objects() == 0 || !el.is_connected() {
                continue;
            }
            let h = Arc::new(h);
            for n in 0..=3 {
                let t = Arc::new(discrete_ty(&h, FinSet::new(n)));
                let terms = enumerate_terms(&t, 1000).map_err(e2s)?;
                let constant = terms.iter().all(|m| {
                    let first = m.table().iter().flatten().next();
                    m.table().iter().flatten().all(|v| Some(v) == first)
                });
                ensure(terms.len() == n && constant, || {
                    format!("{} terms of a {n}-element discrete type", terms.len())
                })?;
            }
            fixtures += 1;
        }
    }
    Ok(format!(
        "{fixtures} connected contexts, |A| <= 3: exactly |A| constant terms"
    ))
}

/// Terms of `t` within the cap, or `None` when there are more.
fn terms_of(t: &Arc<TyInCtx>) -> Result<Option<Vec<TmInCtx>>, String> {
    match enumerate_terms(t, TERM_CAP) {
        Ok(ts) => Ok(Some(ts)),
        Err(Error::BudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(e.to_string()),
    }
}

fn same(x: &TmInCtx, y: &TmInCtx) -> bool {
    x.table() == y.table() && **x.ty() == **y.ty()
}

#[derive(Default)]
struct Counts {
    beta: usize,
    eta: usize,
    sigma: usize,
    skipped: usize,
}

fn beta_eta_on(fx: &Fixture) -> Result<Counts, String> {
    let (a, b) = (&fx.a, &fx.b);
    let mut n = Counts::default();
    let pi = pi_ty(a, b, DEFAULT_PI_CAP, Exec::Sequential).map_err(e2s)?;
    let sigma = sigma_ty(a, b).map_err(e2s)?;
    let (Some(us), Some(bodies)) = (terms_of(a)?, terms_of(b)?) else {
        n.skipped += 1;
        return Ok(n);
    };
    for body in &bodies {
        let lam = lambda_tm(&pi, body).map_err(e2s)?;
        for u in &us {
            let lhs = app_tm(&pi, &lam, u).map_err(e2s)?;
            let rhs = tm_subst(body, &sub_single(u).map_err(e2s)?).map_err(e2s)?;
            ensure(same(&lhs, &rhs), || format!("{}: beta fails", fx.digest))?;
            n.beta += 1;
        }
    }
    // eta: f = lam(app((f)p, q)) with the application taken in G.A
    let ext = b.ctx().clone();
    let p = proj_p_into(a, &ext);
    let ap = Arc::new(ty_subst(a, &p).map_err(e2s)?);
    let bp = Arc::new(ty_subst(b, &shift(&p, a).map_err(e2s)?).map_err(e2s)?);
    let pi_p = pi_ty(&ap, &bp, DEFAULT_PI_CAP, Exec::Sequential).map_err(e2s)?;
    let q = var_q_along(a, &p).map_err(e2s)?;
    match terms_of(&pi.ty)? {
        Some(fs) => {
            for f in &fs {
                let fp = TmInCtx::from_tables(
                    pi_p.ty.clone(),
                    tm_subst(f, &p).map_err(e2s)?.table().to_vec(),
                );
                let applied = app_tm(&pi_p, &fp, &q).map_err(e2s)?;
                let body = TmInCtx::from_tables(b.clone(), applied.table().to_vec());
                ensure(**applied.ty() == **b, || {
                    format!("{}: B[shift(p)][q] is not B", fx.digest)
                })?;
                let back = lambda_tm(&pi, &body).map_err(e2s)?;
                ensure(same(&back, f), || format!("{}: eta fails", fx.digest))?;
                n.eta += 1;
            }
        }
        None => n.skipped += 1,
    }
    for u in &us {
        let bu = Arc::new(ty_subst(b, &sub_single(u).map_err(e2s)?).map_err(e2s)?);
        let Some(vs) = terms_of(&bu)? else {
            n.skipped += 1;
            continue;
        };
        for v in &vs {
            let pr = pair_tm(&sigma, u, v).map_err(e2s)?;
            let (l, r) = (
                fst_tm(&sigma, &pr).map_err(e2s)?,
                snd_tm(&sigma, &pr).map_err(e2s)?,
            );
            ensure(
                same(&l, u) && l.table() == u.table() && r.table() == v.table(),
                || format!("{}: projections of a pair", fx.digest),
            )?;
            n.sigma += 1;
        }
    }
    match terms_of(&sigma.ty)? {
        Some(prs) => {
            for pr in &prs {
                let l = fst_tm(&sigma, pr).map_err(e2s)?;
                let r = snd_tm(&sigma, pr).map_err(e2s)?;
                let back = pair_tm(&sigma, &l, &r).map_err(e2s)?;
                ensure(same(&back, pr), || {
                    format!("{}: surjective pairing fails", fx.digest)
                })?;
                n.sigma += 1;
            }
        }
        None => n.skipped += 1,
    }
    Ok(n)
}

fn beta_eta() -> Verdict {
    let fixtures = gen_fixtures(&SuiteConfig::default(), Exec::Parallel).map_err(e2s)?;
    let results = par::map(Exec::Parallel, &fixtures, beta_eta_on);
    let mut total = Counts::default();
    for r in results {
        let r = r?;
        total.beta += r.beta;
        total.eta += r.eta;
        total.sigma += r.sigma;
        total.skipped += r.skipped;
    }
    ensure(total.beta > 0 && total.eta > 0 && total.sigma > 0, || {
        "nothing was checked".into()
    })?;
    Ok(format!(
        "{} fixtures: {} beta, {} eta, {} sigma equations; {} families over the {TERM_CAP}-term cap",
        fixtures.len(),
        total.beta,
        total.eta,
        total.sigma,
        total.skipped
    ))
}

fn mutations() -> Verdict {
    let mut caught = Vec::new();
    let mut missed = Vec::new();
    for m in Mutation::ALL {
        let opts = RunOptions {
            mutation: Some(m),
            fail_fast: true,
            ..RunOptions::default()
        };
        let r = run_suite(&SuiteConfig::default(), &opts).map_err(e2s)?;
        match r.rules.iter().find(|s| s.failures > 0) {
            Some(s) => caught.push(format!("{}:{}", m.name(), s.id)),
            None => missed.push(m.name()),
        }
    }
    let line = format!(
        "{}/{} seeded bugs caught ({})",
        caught.len(),
        Mutation::ALL.len(),
        caught.join(", ")
    );
    ensure(missed.is_empty() && caught.len() >= 10, || {
        format!("{line}; missed {missed:?}")
    })?;
    Ok(line)
}

fn determinism() -> Verdict {
    let (first, ..) = suite_json(Exec::Parallel)?;
    let (second, ..) = suite_json(Exec::Parallel)?;
    let (sequential, ..) = suite_json(Exec::Sequential)?;
    ensure(first == second, || "two parallel runs differ".into())?;
    ensure(first == sequential, || {
        "parallel and sequential runs differ".into()
    })?;
    Ok(format!("three runs, {} identical bytes each", first.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("rule suite", rule_suite),
        ("Yoneda lemma", yoneda_lemma),
        ("variable elaboration", variables),
        ("set collapse", set_collapse),
        ("discreteness", discreteness),
        ("beta/eta", beta_eta),
        ("mutation sensitivity", mutations),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
