//! Independent oracles and fixtures shared by the integration tests.
//!
//! The oracles work on raw `u64` membership masks and share no code with the
//! library's solvers.

#![allow(dead_code)]

use std::collections::BTreeSet;

use littlestone::concept::ConceptClass;
use rand::Rng;

/// Membership masks of every concept, bit `x` set iff `x` is in the concept.
pub fn masks(class: &ConceptClass) -> Vec<u64> {
    (0..class.len())
        .map(|c| {
            (0..class.n_elements())
                .filter(|&x| class.contains(c, x))
                .fold(0u64, |m, x| m | 1 << x)
        })
        .collect()
}

/// Largest shattered set found by trying every subset of the universe.
pub fn vc_oracle(class: &ConceptClass) -> Option<usize> {
    let rows = masks(class);
    if rows.is_empty() {
        return None;
    }
    let n = class.n_elements();
    let mut best = 0;
    for s in 0u64..(1 << n) {
        let size = s.count_ones() as usize;
        if size <= best {
            continue;
        }
        let traces: BTreeSet<u64> = rows.iter().map(|&c| c & s).collect();
        if traces.len() == 1 << size {
            best = size;
        }
    }
    Some(best)
}

/// True iff a mistake tree of depth `d` exists whose every path agrees with
/// some concept in `rows`, searched without memoization.
pub fn tree_exists(rows: &[u64], n: usize, d: usize) -> bool {
    if rows.is_empty() {
        return false;
    }
    if d == 0 {
        return true;
    }
    (0..n).any(|x| {
        let ones: Vec<u64> = rows.iter().copied().filter(|c| c >> x & 1 == 1).collect();
        let zeros: Vec<u64> = rows.iter().copied().filter(|c| c >> x & 1 == 0).collect();
        tree_exists(&ones, n, d - 1) && tree_exists(&zeros, n, d - 1)
    })
}

/// Maximum depth of a mistake tree by exhaustive search.
pub fn ls_oracle(class: &ConceptClass) -> Option<usize> {
    let mut rows = masks(class);
    rows.sort_unstable();
    rows.dedup();
    if rows.is_empty() {
        return None;
    }
    let n = class.n_elements();
    let mut d = 0;
    while tree_exists(&rows, n, d + 1) {
        d += 1;
    }
    Some(d)
}

/// Random class over `n` elements with `m` rows drawn uniformly (duplicates
/// allowed).
pub fn random_class(rng: &mut impl Rng, n: usize, m: usize) -> ConceptClass {
    let labels: Vec<String> = (0..n).map(|i| format!("u{i}")).collect();
    let rows: Vec<Vec<bool>> = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_bool(0.5)).collect())
        .collect();
    ConceptClass::new(labels, &rows).expect("well-formed class")
}

/// Random class with `1 ≤ |U| ≤ max_n` and `1 ≤ distinct |C| ≤ max_distinct`.
pub fn random_small_class(rng: &mut impl Rng, max_n: usize, max_distinct: usize) -> ConceptClass {
    let n = rng.gen_range(1..=max_n);
    let cap = max_distinct.min(1 << n);
    let m = rng.gen_range(1..=cap);
    loop {
        let class = random_class(rng, n, m);
        if class.distinct_len() <= max_distinct {
            return class;
        }
    }
}

/// Builds a class from `u64` masks over `n` elements.
pub fn class_from_masks(n: usize, rows: &[u64]) -> ConceptClass {
    let labels: Vec<String> = (0..n).map(|i| format!("u{i}")).collect();
    let rows: Vec<Vec<bool>> = rows
        .iter()
        .map(|&m| (0..n).map(|x| m >> x & 1 == 1).collect())
        .collect();
    ConceptClass::new(labels, &rows).expect("well-formed class")
}

/// Floor of log2 for positive integers, computed by repeated halving.
pub fn log2_floor(mut m: usize) -> usize {
    let mut k = 0;
    while m > 1 {
        m /= 2;
        k += 1;
    }
    k
}
