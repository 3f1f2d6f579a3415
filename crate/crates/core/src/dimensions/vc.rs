use crate::concept::{ConceptClass, ShatterWitness};
use crate::error::Result;

use super::{floor_log2, Dimension};

/// Returns a witness iff `set` is shattered by `class`. For each subset the
/// witness names the lowest-index concept realizing it.
pub fn is_shattered(class: &ConceptClass, set: &[usize]) -> Result<Option<ShatterWitness>> {
    class.check_distinct(set)?;
    if set.len() >= 63 || class.len() < 1usize << set.len() {
        return Ok(None);
    }
    let mut assignments = vec![usize::MAX; 1 << set.len()];
    let mut filled = 0;
    for c in 0..class.len() {
        let mask = pattern(class, c, set);
        if assignments[mask] == usize::MAX {
            assignments[mask] = c;
            filled += 1;
        }
    }
    Ok((filled == assignments.len()).then(|| ShatterWitness {
        set: set.to_vec(),
        assignments,
    }))
}

fn pattern(class: &ConceptClass, c: usize, set: &[usize]) -> usize {
    set.iter()
        .enumerate()
        .fold(0, |m, (t, &x)| m | (class.contains(c, x) as usize) << t)
}

/// Exact VC dimension. The certificate is the lexicographically smallest
/// shattered set of maximum size.
///
/// Search is bounded by `⌊log2 #distinct concepts⌋`. Shattering is closed
/// under taking subsets, so the depth-first search only extends sets that
/// are already shattered.
pub fn vc_dimension(class: &ConceptClass) -> Dimension<ShatterWitness> {
    if class.is_empty() {
        return Dimension::Undefined;
    }
    let (distinct, _) = class.dedup();
    let cap = floor_log2(distinct.len());
    // Elements on which every concept agrees cannot belong to a shattered set.
    let candidates: Vec<usize> = (0..class.n_elements())
        .filter(|&x| {
            let ones = (0..distinct.len())
                .filter(|&c| distinct.contains(c, x))
                .count();
            ones > 0 && ones < distinct.len()
        })
        .collect();

    let mut search = Search {
        class: &distinct,
        candidates: &candidates,
        cap,
        best: Vec::new(),
        current: Vec::new(),
        marks: Vec::new(),
    };
    let patterns = vec![0u64; distinct.len()];
    search.extend(0, &patterns);

    let set = search.best;
    let witness = is_shattered(class, &set)
        .expect("positions are valid")
        .expect("search only returns shattered sets");
    Dimension::Defined {
        value: set.len(),
        certificate: witness,
    }
}

struct Search<'a> {
    class: &'a ConceptClass,
    candidates: &'a [usize],
    cap: usize,
    best: Vec<usize>,
    current: Vec<usize>,
    marks: Vec<u64>,
}

impl Search<'_> {
    /// `patterns[c]` is the trace of concept `c` on `current`.
    fn extend(&mut self, from: usize, patterns: &[u64]) {
        if self.best.len() == self.cap {
            return;
        }
        for k in from..self.candidates.len() {
            if self.current.len() + (self.candidates.len() - k) <= self.best.len() {
                return;
            }
            let x = self.candidates[k];
            let bit = self.current.len();
            let next: Vec<u64> = patterns
                .iter()
                .enumerate()
                .map(|(c, &p)| p | (self.class.contains(c, x) as u64) << bit)
                .collect();
            if !self.all_patterns_present(&next, bit + 1) {
                continue;
            }
            self.current.push(x);
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
            self.extend(k + 1, &next);
            self.current.pop();
            if self.best.len() == self.cap {
                return;
            }
        }
    }

    fn all_patterns_present(&mut self, patterns: &[u64], size: usize) -> bool {
        let total = 1usize << size;
        if patterns.len() < total {
            return false;
        }
        self.marks.clear();
        self.marks.resize(total.div_ceil(64), 0);
        let mut seen = 0;
        for &p in patterns {
            let (w, b) = (p as usize / 64, p % 64);
            if self.marks[w] >> b & 1 == 0 {
                self.marks[w] |= 1 << b;
                seen += 1;
                if seen == total {
                    return true;
                }
            }
        }
        false
    }
}
