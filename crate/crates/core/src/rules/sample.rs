//! Deterministic selection and seeded sampling of presheaves, maps and terms.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::catcore::{ArrId, FinCategory};
use crate::cwf::{for_each_term, TmInCtx, TyInCtx};
use crate::presheaf::{
    for_each_presheaf, for_each_pshmap, singleton_presheaf, validate_presheaf, FinSet, Presheaf,
    PshMap,
};
use crate::Result;

/// `k` evenly spaced indices of `0..n`, always including both ends.
pub fn spread(n: usize, k: usize) -> Vec<usize> {
    if k == 0 || n == 0 {
        return Vec::new();
    }
    if k >= n {
        return (0..n).collect();
    }
    if k == 1 {
        return vec![0];
    }
    let mut out: Vec<usize> = (0..k).map(|i| i * (n - 1) / (k - 1)).collect();
    out.dedup();
    out
}

/// Every presheaf on `c` with sets of at most `max_set` elements, reduced to
/// `k` evenly spaced representatives of the canonical order.
pub fn spread_presheaves(c: &Arc<FinCategory>, max_set: usize, k: usize) -> Result<Vec<Presheaf>> {
    let mut n = 0usize;
    for_each_presheaf(c, max_set, &mut |_| {
        n += 1;
        Ok(true)
    })?;
    let picks = spread(n, k);
    let mut out = Vec::with_capacity(picks.len());
    let mut at = 0usize;
    let mut next = 0usize;
    for_each_presheaf(c, max_set, &mut |p| {
        if next < picks.len() && picks[next] == at {
            out.push(p);
            next += 1;
        }
        at += 1;
        Ok(next < picks.len())
    })?;
    Ok(out)
}

/// Up to `scan` maps `h -> g` in canonical order.
pub fn some_maps(h: &Arc<Presheaf>, g: &Arc<Presheaf>, scan: usize) -> Result<Vec<PshMap>> {
    let mut out = Vec::new();
    for_each_pshmap(h, g, &mut |m| {
        out.push(m);
        Ok(out.len() < scan)
    })?;
    Ok(out)
}

/// `k` evenly spaced terms among the first `scan` terms of `t`.
pub fn spread_terms(t: &Arc<TyInCtx>, k: usize, scan: usize) -> Result<Vec<TmInCtx>> {
    let mut all: Vec<Vec<Vec<usize>>> = Vec::new();
    for_each_term(t, &mut |e| {
        all.push(e.to_vec());
        Ok(all.len() < scan)
    })?;
    Ok(spread(all.len(), k)
        .into_iter()
        .map(|i| TmInCtx::from_tables(t.clone(), std::mem::take(&mut all[i])))
        .collect())
}

/// Raises sizes until every arrow out of a nonempty set lands in a
/// nonempty set, so that some restriction tables exist.
fn close_sizes(c: &FinCategory, sizes: &mut [usize]) {
    loop {
        let mut changed = false;
        for f in c.arrow_ids() {
            let (j, i) = (c.dom(f), c.cod(f));
            if sizes[i.0] > 0 && sizes[j.0] == 0 {
                sizes[j.0] = 1;
                changed = true;
            }
        }
        if !changed {
            return;
        }
    }
}

struct Filler {
    /// flattened entries `(arrow, position)` of the non-identity tables
    entries: Vec<(ArrId, usize)>,
    /// value order per entry
    orders: Vec<Vec<usize>>,
    /// composition constraints touching each arrow
    touching: Vec<Vec<(ArrId, ArrId, ArrId)>>,
    tables: Vec<Vec<usize>>,
    assigned: Vec<Vec<bool>>,
    steps: usize,
    budget: usize,
}

impl Filler {
    /// Every composition constraint touching `f` holds where all three
    /// entries involved are assigned.
    fn holds(&self, f: ArrId) -> bool {
        self.touching[f.0].iter().all(|&(g, h, gh)| {
            (0..self.tables[h.0].len()).all(|x| {
                let y = self.tables[h.0][x];
                !(self.assigned[h.0][x] && self.assigned[gh.0][x] && self.assigned[g.0][y])
                    || self.tables[gh.0][x] == self.tables[g.0][y]
            })
        })
    }

    /// `None` once the step budget runs out.
    fn go(&mut self, k: usize) -> Option<bool> {
        if k == self.entries.len() {
            return Some(true);
        }
        let (f, x) = self.entries[k];
        self.assigned[f.0][x] = true;
        for n in 0..self.orders[k].len() {
            self.steps += 1;
            if self.steps > self.budget {
                return None;
            }
            self.tables[f.0][x] = self.orders[k][n];
            if self.holds(f) && self.go(k + 1)? {
                return Some(true);
            }
        }
        self.assigned[f.0][x] = false;
        Some(false)
    }
}

/// Fills restriction tables for fixed sizes. Values are tried in a shuffled
/// order while `rng` is present; the search gives up after `budget` steps.
fn fill_tables(
    c: &FinCategory,
    sizes: &[usize],
    rng: Option<&mut ChaCha8Rng>,
    budget: usize,
) -> Option<Vec<Vec<usize>>> {
    let mut entries = Vec::new();
    let mut tables: Vec<Vec<usize>> = Vec::with_capacity(c.num_arrows());
    let mut assigned = Vec::with_capacity(c.num_arrows());
    for f in c.arrow_ids() {
        let n = sizes[c.cod(f).0];
        if c.is_identity(f) {
            tables.push((0..n).collect());
            assigned.push(vec![true; n]);
        } else {
            tables.push(vec![0; n]);
            assigned.push(vec![false; n]);
            entries.extend((0..n).map(|x| (f, x)));
        }
    }
    let mut touching = vec![Vec::new(); c.num_arrows()];
    for (g, h, gh) in c.composition_entries() {
        for f in [g, h, gh] {
            if !touching[f.0].contains(&(g, h, gh)) {
                touching[f.0].push((g, h, gh));
            }
        }
    }
    let mut orders: Vec<Vec<usize>> = entries
        .iter()
        .map(|&(f, _)| (0..sizes[c.dom(f).0]).collect())
        .collect();
    if let Some(rng) = rng {
        for o in &mut orders {
            o.shuffle(rng);
        }
    }
    let mut filler = Filler {
        entries,
        orders,
        touching,
        tables,
        assigned,
        steps: 0,
        budget,
    };
    match filler.go(0) {
        Some(true) => Some(filler.tables),
        _ => None,
    }
}

/// Seeded presheaf on `c` with sets of at most `max_set` elements, mostly
/// inhabited. With `rejection` set, raw uniform tables are tried first and
/// kept only if they validate.
pub fn sample_presheaf(
    c: &Arc<FinCategory>,
    max_set: usize,
    rng: &mut ChaCha8Rng,
    rejection: bool,
) -> Presheaf {
    let n = c.num_objects();
    if rejection {
        for _ in 0..64 {
            let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=max_set)).collect();
            let tables = c
                .arrow_ids()
                .map(|f| {
                    let (j, i) = (c.dom(f), c.cod(f));
                    if c.is_identity(f) {
                        (0..sizes[i.0]).collect()
                    } else {
                        (0..sizes[i.0])
                            .map(|_| rng.gen_range(0..sizes[j.0].max(1)))
                            .collect()
                    }
                })
                .collect();
            let p = Presheaf::from_tables(
                c.clone(),
                sizes.iter().map(|&s| FinSet::new(s)).collect(),
                tables,
            );
            if validate_presheaf(&p).is_ok() {
                return p;
            }
        }
    }
    // sizes may admit no tables at all (isomorphic objects need equal sets)
    for _ in 0..32 {
        let mut sizes: Vec<usize> = (0..n)
            .map(|_| {
                if max_set == 0 || rng.gen_ratio(1, 8) {
                    0
                } else {
                    rng.gen_range(1..=max_set)
                }
            })
            .collect();
        close_sizes(c, &mut sizes);
        if let Some(tables) = fill_tables(c, &sizes, Some(rng), 20_000)
            .or_else(|| fill_tables(c, &sizes, None, 200_000))
        {
            return Presheaf::from_tables(
                c.clone(),
                sizes.into_iter().map(FinSet::new).collect(),
                tables,
            );
        }
    }
    singleton_presheaf(c)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;
    use crate::catcore::{named, small_categories};

    #[test]
    fn spread_hits_both_ends() {
        assert_eq!(spread(10, 3), vec![0, 4, 9]);
        assert_eq!(spread(2, 5), vec![0, 1]);
        assert_eq!(spread(7, 1), vec![0]);
        assert!(spread(0, 3).is_empty());
    }

    #[test]
    fn samples_are_valid_and_seeded() {
        let mut cats: Vec<Arc<FinCategory>> = small_categories(2, 4, 1000)
            .unwrap()
            .into_iter()
            .map(Arc::new)
            .collect();
        cats.push(Arc::new(named::chain3()));
        for (k, c) in cats.iter().enumerate() {
            for rejection in [false, true] {
                let mut r1 = ChaCha8Rng::seed_from_u64(k as u64);
                let mut r2 = ChaCha8Rng::seed_from_u64(k as u64);
                let p = sample_presheaf(c, 3, &mut r1, rejection);
                assert!(validate_presheaf(&p).is_ok(), "{k}");
                assert!(p.sets().iter().all(|s| s.size <= 3));
                assert_eq!(p, sample_presheaf(c, 3, &mut r2, rejection));
            }
        }
    }

    #[test]
    fn spread_presheaves_are_distinct() {
        let w = Arc::new(named::walking_arrow());
        let ps = spread_presheaves(&w, 2, 4).unwrap();
        assert_eq!(ps.len(), 4);
        for i in 0..4 {
            for j in i + 1..4 {
                assert_ne!(ps[i], ps[j]);
            }
        }
    }
}
