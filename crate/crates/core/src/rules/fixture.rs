use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Mode, SuiteConfig};
use super::sample::{sample_presheaf, some_maps, spread_presheaves, spread_terms};
use crate::catcore::{named, small_categories, FinCategory};
use crate::cwf::{
    ctx_extend, empty_ctx, sub_single, ty_from_presheaf, ty_subst, type_base, Ctx, Sub, TmInCtx,
    TyInCtx,
};
use crate::formers::{pi_ty, sigma_ty};
use crate::presheaf::yoneda;
use crate::{par, Error, Result};

/// One instance over which every rule is checked.
///
/// `sigma: H -> G`, `delta: K -> H`, `nu: K -> K`; `A` over `G` and `B`
/// over `G.A`. Term lists may be empty when a type has no global elements;
/// rules needing them then skip the fixture.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub digest: String,
    pub base: Arc<FinCategory>,
    pub g: Arc<Ctx>,
    pub h: Arc<Ctx>,
    pub k: Arc<Ctx>,
    pub sigma: Sub,
    pub delta: Sub,
    pub nu: Sub,
    pub a: Arc<TyInCtx>,
    pub b: Arc<TyInCtx>,
    /// `G |- t : A`
    pub ts: Vec<TmInCtx>,
    /// `G |- v : B[ts[i]]`, tagged with `i`
    pub vs: Vec<(usize, TmInCtx)>,
    /// `H |- u : (A)sigma`
    pub us: Vec<TmInCtx>,
    /// `G.A |- b : B`
    pub bodies: Vec<TmInCtx>,
    /// `G |- f : Pi(A, B)`
    pub fs: Vec<TmInCtx>,
    /// `G |- pr : Sigma(A, B)`
    pub prs: Vec<TmInCtx>,
}

/// The base categories of a suite run: every category within the object and
/// arrow bounds up to isomorphism, then the configured named extras.
pub fn base_family(cfg: &SuiteConfig) -> Result<Vec<(String, Arc<FinCategory>)>> {
    let mut out: Vec<(String, Arc<FinCategory>)> =
        small_categories(cfg.max_objects, cfg.max_arrows, 100_000)?
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                (
                    format!("c{i}:{}o{}a", c.num_objects(), c.num_arrows()),
                    Arc::new(c),
                )
            })
            .collect();
    for name in &cfg.extra_bases {
        let c = named::by_name(name)
            .ok_or_else(|| Error::Load(format!("unknown category `{name}`")))?;
        out.push((name.clone(), Arc::new(c)));
    }
    Ok(out)
}

fn ctx_sig(h: &Ctx) -> String {
    let sizes: Vec<String> = h.sets().iter().map(|s| s.size.to_string()).collect();
    format!("({})", sizes.join(","))
}

fn ty_sig(t: &TyInCtx) -> String {
    let rows: Vec<String> = t
        .fibers()
        .iter()
        .map(|row| {
            row.iter()
                .map(|f| f.len().to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    format!("[{}]", rows.join("|"))
}

/// Contexts considered over one base: the terminal context, the
/// representables that fit, and an even spread of all presheaves.
fn context_pool(c: &Arc<FinCategory>, cfg: &SuiteConfig) -> Result<Vec<Arc<Ctx>>> {
    let mut pool: Vec<Ctx> = vec![empty_ctx(c)];
    for x in c.objects() {
        let y = yoneda(c, x);
        if y.sets().iter().all(|s| s.size <= cfg.max_set) {
            pool.push(y);
        }
    }
    for p in spread_presheaves(c, cfg.max_set, cfg.contexts_per_base)? {
        pool.push(p);
    }
    let mut out: Vec<Ctx> = Vec::with_capacity(pool.len());
    for p in pool {
        if !out.contains(&p) {
            out.push(p);
        }
    }
    Ok(out.into_iter().map(Arc::new).collect())
}

fn sample_ty(
    h: &Arc<Ctx>,
    max_set: usize,
    rng: &mut ChaCha8Rng,
    rejection: bool,
) -> Result<TyInCtx> {
    let base = type_base(h)?;
    ty_from_presheaf(h, &sample_presheaf(&base, max_set, rng, rejection))
}

/// A map `x -> target` for some `x` in `pool`, trying pool entries from a
/// random start. The target itself is in the pool, so this always succeeds.
fn pick_map(pool: &[Arc<Ctx>], target: &Arc<Ctx>, rng: &mut ChaCha8Rng) -> Result<(usize, Sub)> {
    let start = rng.gen_range(0..pool.len());
    for step in 0..pool.len() {
        let at = (start + step) % pool.len();
        let maps = some_maps(&pool[at], target, 64)?;
        if !maps.is_empty() {
            let m = rng.gen_range(0..maps.len());
            return Ok((at, maps.into_iter().nth(m).expect("index in range")));
        }
    }
    Err(Error::Internal(
        "no context in the pool maps into the target".into(),
    ))
}

fn build(
    cfg: &SuiteConfig,
    label: &str,
    base: &Arc<FinCategory>,
    pool: &[Arc<Ctx>],
    g_at: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Fixture> {
    let rejection = cfg.mode == Mode::Random;
    let g = pool[g_at].clone();
    let (h_at, sigma) = pick_map(pool, &g, rng)?;
    let h = pool[h_at].clone();
    let (k_at, delta) = pick_map(pool, &h, rng)?;
    let k = pool[k_at].clone();
    let endos = some_maps(&k, &k, 64)?;
    let nu = endos[rng.gen_range(0..endos.len())].clone();

    // shrink the families until Pi(A, B) fits the cap
    let mut attempt = 0;
    let (a, b, pi, sigma_t) = loop {
        let m = match attempt {
            0..=3 => cfg.max_set,
            4..=7 => cfg.max_set.saturating_sub(1).max(1),
            _ => 1,
        };
        let a = Arc::new(sample_ty(&g, m, rng, rejection)?);
        let ext = Arc::new(ctx_extend(&a));
        let b = Arc::new(sample_ty(&ext, m, rng, rejection)?);
        match pi_ty(&a, &b, cfg.pi_cap, par::Exec::Sequential) {
            Ok(pi) => {
                let s = sigma_ty(&a, &b)?;
                break (a, b, pi, s);
            }
            Err(Error::BudgetExceeded { .. }) if attempt < 12 => attempt += 1,
            Err(e) => return Err(e),
        }
    };

    let n = cfg.terms_per_fixture;
    let scan = cfg.term_scan;
    let ts = spread_terms(&a, n, scan)?;
    let mut vs = Vec::new();
    for (i, t) in ts.iter().enumerate() {
        let bt = Arc::new(ty_subst(&b, &sub_single(t)?)?);
        let cands = spread_terms(&bt, n, scan)?;
        if !cands.is_empty() {
            let pick = i % cands.len();
            vs.push((i, cands.into_iter().nth(pick).expect("index in range")));
        }
    }
    let us = spread_terms(&Arc::new(ty_subst(&a, &sigma)?), n, scan)?;
    let bodies = spread_terms(&b, n, scan)?;
    let fs = spread_terms(&pi.ty, n, scan)?;
    let prs = spread_terms(&sigma_t.ty, n, scan)?;

    let digest = format!(
        "{label} G#{g_at}{} H#{h_at}{} K#{k_at}{} A{} B{}",
        ctx_sig(&g),
        ctx_sig(&h),
        ctx_sig(&k),
        ty_sig(&a),
        ty_sig(&b)
    );
    Ok(Fixture {
        digest,
        base: base.clone(),
        g,
        h,
        k,
        sigma,
        delta,
        nu,
        a,
        b,
        ts,
        vs,
        us,
        bodies,
        fs,
        prs,
    })
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generates the fixtures of a suite run, deterministically for a fixed
/// config. Exhaustive mode covers every base category of [`base_family`];
/// random mode draws bases and contexts from the seed.
pub fn gen_fixtures(cfg: &SuiteConfig, exec: par::Exec) -> Result<Vec<Fixture>> {
    cfg.check().map_err(Error::Load)?;
    let bases = base_family(cfg)?;
    match cfg.mode {
        Mode::Exhaustive => {
            let per_base = par::map(
                exec,
                &bases.iter().enumerate().collect::<Vec<_>>(),
                |&(bi, (label, c))| {
                    let pool = context_pool(c, cfg)?;
                    (0..cfg.fixtures_per_base)
                        .map(|j| {
                            let mut rng = rng_for(cfg.seed, (bi as u64) << 32 | j as u64);
                            let g_at = j * pool.len() / cfg.fixtures_per_base;
                            build(
                                cfg,
                                &format!("{label}/{j}"),
                                c,
                                &pool,
                                g_at % pool.len(),
                                &mut rng,
                            )
                        })
                        .collect::<Result<Vec<_>>>()
                },
            );
            let mut out = Vec::new();
            for r in per_base {
                out.extend(r?);
            }
            Ok(out)
        }
        Mode::Random => par::map_range(exec, cfg.random_fixtures, |i| {
            let mut rng = rng_for(cfg.seed, i as u64);
            let (label, c) = &bases[rng.gen_range(0..bases.len())];
            let pool: Vec<Arc<Ctx>> = (0..3)
                .map(|_| Arc::new(sample_presheaf(c, cfg.max_set, &mut rng, true)))
                .chain(std::iter::once(Arc::new(empty_ctx(c))))
                .collect();
            build(cfg, &format!("{label}/r{i}"), c, &pool, 0, &mut rng)
        })
        .into_iter()
        .collect(),
    }
}
