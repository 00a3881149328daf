//! Hitting-set instances and an exact branch-and-bound solver.

use crate::error::{input_err, Result};
use crate::numkit::DenseMatrix;

/// A universe `{1, ..., m}` and a collection of non-empty subsets covering it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HittingSetInstance {
    m: usize,
    sets: Vec<Vec<usize>>,
}

impl HittingSetInstance {
    /// Validates and normalizes (sorts, dedups) the sets. Elements are 1-based.
    pub fn new(m: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        if m == 0 {
            return Err(input_err("universe must be non-empty"));
        }
        if sets.is_empty() {
            return Err(input_err("collection must contain at least one set"));
        }
        let mut seen = vec![false; m];
        let mut norm = Vec::with_capacity(sets.len());
        for (k, mut s) in sets.into_iter().enumerate() {
            if s.is_empty() {
                return Err(input_err(format!("set {} is empty", k + 1)));
            }
            if let Some(&bad) = s.iter().find(|&&e| e == 0 || e > m) {
                return Err(input_err(format!(
                    "set {} has element {bad} outside 1..={m}",
                    k + 1
                )));
            }
            s.sort_unstable();
            s.dedup();
            for &e in &s {
                seen[e - 1] = true;
            }
            norm.push(s);
        }
        if let Some(missing) = seen.iter().position(|&x| !x) {
            return Err(input_err(format!(
                "element {} appears in no set",
                missing + 1
            )));
        }
        Ok(Self { m, sets: norm })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of sets in the collection.
    pub fn p(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn is_hitting_set(&self, elements: &[usize]) -> bool {
        self.sets
            .iter()
            .all(|s| s.iter().any(|e| elements.contains(e)))
    }

    pub fn incidence(&self) -> IncidenceMatrix {
        let mut phi = DenseMatrix::zeros(self.p(), self.m);
        for (i, s) in self.sets.iter().enumerate() {
            for &e in s {
                phi[(i, e - 1)] = 1.0;
            }
        }
        IncidenceMatrix { phi }
    }
}

/// `phi[(i, j)] == 1` iff set `i` contains element `j + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceMatrix {
    pub phi: DenseMatrix,
}

/// A minimum hitting set, lexicographically smallest among those of minimum
/// cardinality, as sorted 1-based elements.
pub fn min_hitting_set(instance: &HittingSetInstance) -> Vec<usize> {
    let m = instance.m();
    // Membership bitmask of each set over elements (bit e-1).
    let masks: Vec<u128> = instance
        .sets()
        .iter()
        .map(|s| s.iter().fold(0u128, |acc, &e| acc | 1 << (e - 1)))
        .collect();
    assert!(m <= 128, "solver supports universes of up to 128 elements");

    let mut chosen = Vec::new();
    for budget in 0..=m {
        if search(&masks, m, 0, budget, &mut chosen) {
            return chosen.iter().map(|e| e + 1).collect();
        }
    }
    unreachable!("the whole universe hits every set")
}

// Depth-first over elements in increasing order, so the first success at a
// given budget is the lexicographically smallest hitting set of that size.
fn search(masks: &[u128], m: usize, next: usize, budget: usize, chosen: &mut Vec<usize>) -> bool {
    let hit = chosen.iter().fold(0u128, |acc, &e| acc | 1 << e);
    let open: Vec<u128> = masks.iter().copied().filter(|s| s & hit == 0).collect();
    if open.is_empty() {
        return true;
    }
    if budget == 0 {
        return false;
    }
    let reachable = if next >= 128 { 0 } else { !0u128 << next };
    // A set with no element at or after `next` can no longer be hit.
    if open.iter().any(|s| s & reachable == 0) {
        return false;
    }
    if disjoint_lower_bound(&open) > budget {
        return false;
    }
    for e in next..m {
        // Only branch on elements of some open set.
        if open.iter().all(|s| s >> e & 1 == 0) {
            continue;
        }
        chosen.push(e);
        if search(masks, m, e + 1, budget - 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

// Size of a greedily built family of pairwise disjoint open sets; each needs
// its own element.
fn disjoint_lower_bound(open: &[u128]) -> usize {
    let mut used = 0u128;
    let mut count = 0;
    let mut by_size: Vec<u128> = open.to_vec();
    by_size.sort_by_key(|s| s.count_ones());
    for s in by_size {
        if s & used == 0 {
            used |= s;
            count += 1;
        }
    }
    count
}
