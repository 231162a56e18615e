//! Exhaustive generation of small finite categories, one per isomorphism
//! class.

use std::collections::BTreeSet;

use super::category::{ArrId, Arrow, FinCategory, ObjId};
use crate::{error, Result};

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Every hom-count matrix with non-negative entries summing to at most `budget`,
/// in row-major lexicographic order.
fn hom_matrices(n: usize, budget: usize) -> Vec<Vec<usize>> {
    fn go(cells: usize, budget: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == cells {
            out.push(cur.clone());
            return;
        }
        for v in 0..=budget {
            cur.push(v);
            go(cells, budget - v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n * n, budget, &mut Vec::new(), &mut out);
    out
}

fn permute_matrix(m: &[usize], n: usize, pi: &[usize]) -> Vec<usize> {
    let mut out = vec![0; n * n];
    for x in 0..n {
        for y in 0..n {
            out[pi[x] * n + pi[y]] = m[x * n + y];
        }
    }
    out
}

struct Shape {
    n: usize,
    arrows: Vec<Arrow>,
    /// hom[x*n+y] = arrows x -> y, identities included.
    hom: Vec<Vec<usize>>,
    /// Composable pairs of non-identity arrows, in canonical order.
    slots: Vec<(usize, usize)>,
    /// slot_of[f * arrows + g] = position of (f, g) in `slots`.
    slot_of: Vec<Option<usize>>,
}

impl Shape {
    fn new(n: usize, m: &[usize]) -> Self {
        let mut arrows = Vec::new();
        for x in 0..n {
            arrows.push(Arrow {
                name: format!("id_x{x}"),
                dom: ObjId(x),
                cod: ObjId(x),
            });
        }
        let mut k = 0;
        for x in 0..n {
            for y in 0..n {
                for _ in 0..m[x * n + y] {
                    k += 1;
                    arrows.push(Arrow {
                        name: format!("m{k}"),
                        dom: ObjId(x),
                        cod: ObjId(y),
                    });
                }
            }
        }
        let mut hom = vec![Vec::new(); n * n];
        for (i, a) in arrows.iter().enumerate() {
            hom[a.dom.0 * n + a.cod.0].push(i);
        }
        let mut slots = Vec::new();
        for f in n..arrows.len() {
            for g in n..arrows.len() {
                if arrows[f].cod == arrows[g].dom {
                    slots.push((f, g));
                }
            }
        }
        let na = arrows.len();
        let mut slot_of = vec![None; na * na];
        for (i, &(f, g)) in slots.iter().enumerate() {
            slot_of[f * na + g] = Some(i);
        }
        Self {
            n,
            arrows,
            hom,
            slots,
            slot_of,
        }
    }

    fn comp(&self, table: &[Option<usize>], f: usize, g: usize) -> Option<usize> {
        if f < self.n {
            return Some(g);
        }
        if g < self.n {
            return Some(f);
        }
        table[self.slot_of[f * self.arrows.len() + g]?]
    }

    fn associative_so_far(&self, table: &[Option<usize>]) -> bool {
        let na = self.arrows.len();
        for f in self.n..na {
            for g in self.n..na {
                if self.arrows[f].cod != self.arrows[g].dom {
                    continue;
                }
                for h in self.n..na {
                    if self.arrows[g].cod != self.arrows[h].dom {
                        continue;
                    }
                    let lhs = self
                        .comp(table, f, g)
                        .and_then(|fg| self.comp(table, fg, h));
                    let rhs = self
                        .comp(table, g, h)
                        .and_then(|gh| self.comp(table, f, gh));
                    if let (Some(l), Some(r)) = (lhs, rhs) {
                        if l != r {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Every relabelling of arrows induced by an object automorphism of the
    /// hom-count matrix and a permutation inside each hom-set.
    fn relabellings(&self, m: &[usize]) -> Vec<Vec<usize>> {
        let n = self.n;
        let mut out = Vec::new();
        for pi in permutations(n) {
            if permute_matrix(m, n, &pi) != m {
                continue;
            }
            // For each (x, y), choose a bijection of the non-identity part of
            // hom(x,y) onto the non-identity part of hom(pi x, pi y).
            let cells: Vec<(usize, usize)> =
                (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect();
            let per_cell: Vec<Vec<Vec<usize>>> = cells
                .iter()
                .map(|&(x, y)| permutations(m[x * n + y]))
                .collect();
            let mut choice = vec![0usize; cells.len()];
            loop {
                let mut phi = vec![0usize; self.arrows.len()];
                for (x, p) in phi.iter_mut().enumerate().take(n) {
                    *p = pi[x];
                }
                for (ci, &(x, y)) in cells.iter().enumerate() {
                    let src: Vec<usize> = self.hom[x * n + y]
                        .iter()
                        .copied()
                        .filter(|&a| a >= n)
                        .collect();
                    let dst: Vec<usize> = self.hom[pi[x] * n + pi[y]]
                        .iter()
                        .copied()
                        .filter(|&a| a >= n)
                        .collect();
                    let perm = &per_cell[ci][choice[ci]];
                    for (t, &a) in src.iter().enumerate() {
                        phi[a] = dst[perm[t]];
                    }
                }
                out.push(phi);
                // odometer
                let mut i = 0;
                loop {
                    if i == cells.len() {
                        break;
                    }
                    choice[i] += 1;
                    if choice[i] < per_cell[i].len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == cells.len() {
                    break;
                }
            }
        }
        out
    }

    fn canonical_key(&self, table: &[Option<usize>], relabellings: &[Vec<usize>]) -> Vec<usize> {
        let mut best: Option<Vec<usize>> = None;
        for phi in relabellings {
            let mut inv = vec![0; phi.len()];
            for (a, &b) in phi.iter().enumerate() {
                inv[b] = a;
            }
            let key: Vec<usize> = self
                .slots
                .iter()
                .map(|&(f, g)| {
                    let h = self.comp(table, inv[f], inv[g]).expect("complete table");
                    phi[h]
                })
                .collect();
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
        best.unwrap_or_default()
    }

    fn build(&self, table: &[Option<usize>]) -> FinCategory {
        let objects = (0..self.n).map(|x| format!("x{x}")).collect();
        let ids = (0..self.n).map(ArrId).collect();
        let na = self.arrows.len();
        let mut entries = Vec::new();
        for f in 0..na {
            for g in 0..na {
                if self.arrows[f].cod == self.arrows[g].dom {
                    let h = self.comp(table, f, g).expect("complete table");
                    entries.push((ArrId(f), ArrId(g), ArrId(h)));
                }
            }
        }
        FinCategory::from_tables(objects, self.arrows.clone(), ids, entries)
            .expect("generated tables in range")
    }
}

/// All categories with at most `max_objects` objects and at most `max_arrows`
/// arrows (identities included), one representative per isomorphism class, in
/// a deterministic order (object count, then hom-count matrix, then table).
///
/// `cap` bounds the number of categories returned.
pub fn small_categories(
    max_objects: usize,
    max_arrows: usize,
    cap: usize,
) -> Result<Vec<FinCategory>> {
    let mut out = Vec::new();
    for n in 0..=max_objects.min(max_arrows) {
        let budget = max_arrows - n;
        let perms = permutations(n);
        for m in hom_matrices(n, budget) {
            // Only the lexicographically smallest matrix of each object orbit.
            if perms.iter().any(|pi| permute_matrix(&m, n, pi) < m) {
                continue;
            }
            let shape = Shape::new(n, &m);
            let candidates: Vec<Vec<usize>> = shape
                .slots
                .iter()
                .map(|&(f, g)| {
                    let (x, y) = (shape.arrows[f].dom.0, shape.arrows[g].cod.0);
                    shape.hom[x * n + y].clone()
                })
                .collect();
            if candidates.iter().any(|c| c.is_empty()) {
                continue;
            }
            let relabellings = shape.relabellings(&m);
            let mut seen = BTreeSet::new();
            let mut table = vec![None; shape.slots.len()];
            let mut found = Vec::new();
            search(&shape, &candidates, 0, &mut table, &mut |t| {
                let key = shape.canonical_key(t, &relabellings);
                if seen.insert(key) {
                    found.push(shape.build(t));
                }
            });
            for c in found {
                if out.len() == cap {
                    return Err(error::budget("small categories", cap, out.len()));
                }
                out.push(c);
            }
        }
    }
    Ok(out)
}

fn search(
    shape: &Shape,
    candidates: &[Vec<usize>],
    i: usize,
    table: &mut Vec<Option<usize>>,
    emit: &mut dyn FnMut(&[Option<usize>]),
) {
    if i == table.len() {
        emit(table);
        return;
    }
    for &h in &candidates[i] {
        table[i] = Some(h);
        if shape.associative_so_far(table) {
            search(shape, candidates, i + 1, table, emit);
        }
    }
    table[i] = None;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catcore::validate_category;

    fn monoids_of_order(k: usize) -> usize {
        small_categories(1, k, 10_000)
            .unwrap()
            .iter()
            .filter(|c| c.num_objects() == 1 && c.num_arrows() == k)
            .count()
    }

    #[test]
    fn monoid_counts_match_known_sequence() {
        // Monoids up to isomorphism: 1, 2, 7, 35.
        assert_eq!(monoids_of_order(1), 1);
        assert_eq!(monoids_of_order(2), 2);
        assert_eq!(monoids_of_order(3), 7);
        assert_eq!(monoids_of_order(4), 35);
    }

    #[test]
    fn generated_categories_are_valid_and_distinct() {
        let cats = small_categories(2, 4, 10_000).unwrap();
        for c in &cats {
            assert!(validate_category(c).is_ok());
        }
        for (i, a) in cats.iter().enumerate() {
            for b in &cats[i + 1..] {
                assert_ne!(a, b);
            }
        }
        // empty category is first
        assert_eq!(cats[0].num_objects(), 0);
    }

    #[test]
    fn two_object_posets_present() {
        let cats = small_categories(2, 3, 10_000).unwrap();
        let two: Vec<_> = cats.iter().filter(|c| c.num_objects() == 2).collect();
        // discrete(2), walking arrow, and the two-object monoid sums with an
        // endomorphism on one object (idempotent or involution).
        assert_eq!(two.len(), 4);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(small_categories(1, 4, 5).is_err());
    }
}
