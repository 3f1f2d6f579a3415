//! Label Cover instances, assignment values, an exact optimum oracle, and
//! random balanced block partitions.
//!
//! Vertices are numbered globally: `A` occupies `0..|A|` and `B` occupies
//! `|A|..|A|+|B|`. The alphabet is `{0, .., q-1}` and every projection is an
//! explicit lookup table of length `q`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Symbol = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    /// Global id of the `A` endpoint.
    pub a: usize,
    /// Global id of the `B` endpoint.
    pub b: usize,
    pub pi: Vec<Symbol>,
}

impl Edge {
    #[inline]
    pub fn satisfied(&self, a_value: Symbol, b_value: Symbol) -> bool {
        self.pi[a_value as usize] == b_value
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LabelCoverFile", into = "LabelCoverFile")]
pub struct LabelCoverInstance {
    a_labels: Vec<String>,
    b_labels: Vec<String>,
    alphabet_size: usize,
    edges: Vec<Edge>,
    incident: Vec<Vec<usize>>,
}

impl LabelCoverInstance {
    /// `edges` are `(index in A, index in B, projection table)`.
    pub fn new(
        a_labels: Vec<String>,
        b_labels: Vec<String>,
        alphabet_size: usize,
        edges: Vec<(usize, usize, Vec<Symbol>)>,
    ) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::Input("alphabet must be nonempty".into()));
        }
        let mut seen = BTreeSet::new();
        for label in a_labels.iter().chain(&b_labels) {
            if !seen.insert(label.as_str()) {
                return Err(Error::Label(format!("duplicate vertex label {label:?}")));
            }
        }
        let n_a = a_labels.len();
        let n = n_a + b_labels.len();
        let mut out = Vec::with_capacity(edges.len());
        for (e, (a, b, pi)) in edges.into_iter().enumerate() {
            if a >= n_a || b >= b_labels.len() {
                return Err(Error::Input(format!(
                    "edge {e} references a missing vertex ({a}, {b})"
                )));
            }
            if pi.len() != alphabet_size || pi.iter().any(|&s| s as usize >= alphabet_size) {
                return Err(Error::Input(format!(
                    "projection of edge {e} is not a total map on {{0..{}}}",
                    alphabet_size - 1
                )));
            }
            out.push(Edge { a, b: n_a + b, pi });
        }
        let mut incident = vec![Vec::new(); n];
        for (e, edge) in out.iter().enumerate() {
            incident[edge.a].push(e);
            incident[edge.b].push(e);
        }
        Ok(LabelCoverInstance {
            a_labels,
            b_labels,
            alphabet_size,
            edges: out,
            incident,
        })
    }

    pub fn n(&self) -> usize {
        self.a_labels.len() + self.b_labels.len()
    }

    pub fn n_a(&self) -> usize {
        self.a_labels.len()
    }

    pub fn n_b(&self) -> usize {
        self.b_labels.len()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Indices of the edges touching vertex `v`.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn is_a(&self, v: usize) -> bool {
        v < self.n_a()
    }

    pub fn vertex_label(&self, v: usize) -> &str {
        if self.is_a(v) {
            &self.a_labels[v]
        } else {
            &self.b_labels[v - self.n_a()]
        }
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.a_labels.iter().position(|l| l == label).or_else(|| {
            self.b_labels
                .iter()
                .position(|l| l == label)
                .map(|j| self.n_a() + j)
        })
    }

    /// Every `A` vertex has the same degree, and likewise for `B`.
    pub fn is_bi_regular(&self) -> bool {
        let uniform = |range: std::ops::Range<usize>| {
            let mut degrees = range.map(|v| self.incident[v].len());
            match degrees.next() {
                Some(d) => degrees.all(|x| x == d),
                None => true,
            }
        };
        uniform(0..self.n_a()) && uniform(self.n_a()..self.n())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct LabelCoverFile {
    #[serde(rename = "A")]
    a: Vec<String>,
    #[serde(rename = "B")]
    b: Vec<String>,
    alphabet_size: usize,
    edges: Vec<EdgeRecord>,
}

#[derive(Serialize, Deserialize)]
struct EdgeRecord {
    a: String,
    b: String,
    pi: Vec<Symbol>,
}

impl TryFrom<LabelCoverFile> for LabelCoverInstance {
    type Error = Error;

    fn try_from(file: LabelCoverFile) -> Result<Self> {
        let a_index: BTreeMap<&str, usize> = file
            .a
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let b_index: BTreeMap<&str, usize> = file
            .b
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let edges = file
            .edges
            .iter()
            .map(|e| {
                let a = *a_index
                    .get(e.a.as_str())
                    .ok_or_else(|| Error::Input(format!("edge endpoint {:?} is not in A", e.a)))?;
                let b = *b_index
                    .get(e.b.as_str())
                    .ok_or_else(|| Error::Input(format!("edge endpoint {:?} is not in B", e.b)))?;
                Ok((a, b, e.pi.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        LabelCoverInstance::new(file.a, file.b, file.alphabet_size, edges)
    }
}

impl From<LabelCoverInstance> for LabelCoverFile {
    fn from(l: LabelCoverInstance) -> Self {
        let edges = l
            .edges
            .iter()
            .map(|e| EdgeRecord {
                a: l.vertex_label(e.a).to_string(),
                b: l.vertex_label(e.b).to_string(),
                pi: e.pi.clone(),
            })
            .collect();
        LabelCoverFile {
            a: l.a_labels,
            b: l.b_labels,
            alphabet_size: l.alphabet_size,
            edges,
        }
    }
}

/// Map from vertex to symbol, defined on any subset of `A ∪ B`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialAssignment {
    values: BTreeMap<usize, Symbol>,
}

impl PartialAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Total assignment from a dense vector indexed by vertex.
    pub fn from_dense(values: &[Symbol]) -> Self {
        PartialAssignment {
            values: values.iter().copied().enumerate().collect(),
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Symbol)>) -> Self {
        PartialAssignment {
            values: pairs.into_iter().collect(),
        }
    }

    pub fn get(&self, v: usize) -> Option<Symbol> {
        self.values.get(&v).copied()
    }

    pub fn set(&mut self, v: usize, s: Symbol) {
        self.values.insert(v, s);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Symbol)> + '_ {
        self.values.iter().map(|(&v, &s)| (v, s))
    }

    pub fn restrict_to(&self, vertices: &[usize]) -> PartialAssignment {
        PartialAssignment {
            values: vertices
                .iter()
                .filter_map(|&v| self.get(v).map(|s| (v, s)))
                .collect(),
        }
    }

    pub fn is_total(&self, l: &LabelCoverInstance) -> bool {
        (0..l.n()).all(|v| self.values.contains_key(&v))
    }

    /// Checks domain and range against an instance.
    pub fn validate(&self, l: &LabelCoverInstance) -> Result<()> {
        for (v, s) in self.iter() {
            if v >= l.n() {
                return Err(Error::Input(format!("assignment names missing vertex {v}")));
            }
            if s as usize >= l.alphabet_size() {
                return Err(Error::Input(format!(
                    "symbol {s} outside alphabet of size {}",
                    l.alphabet_size()
                )));
            }
        }
        Ok(())
    }

    pub fn to_labeled(&self, l: &LabelCoverInstance) -> BTreeMap<String, Symbol> {
        self.iter()
            .map(|(v, s)| (l.vertex_label(v).to_string(), s))
            .collect()
    }

    pub fn from_labeled(l: &LabelCoverInstance, map: &BTreeMap<String, Symbol>) -> Result<Self> {
        let mut out = PartialAssignment::new();
        for (label, &s) in map {
            let v = l
                .vertex_by_label(label)
                .ok_or_else(|| Error::Input(format!("unknown vertex {label:?}")))?;
            out.set(v, s);
        }
        out.validate(l)?;
        Ok(out)
    }
}

pub fn satisfied_edges(l: &LabelCoverInstance, phi: &PartialAssignment) -> Result<usize> {
    phi.validate(l)?;
    if !phi.is_total(l) {
        return Err(Error::Input(
            "value requires a total assignment; use passes_test for partial ones".into(),
        ));
    }
    Ok(l.edges()
        .iter()
        .filter(|e| e.satisfied(phi.get(e.a).unwrap(), phi.get(e.b).unwrap()))
        .count())
}

/// Fraction of satisfied edges. An instance without edges has value 1.
pub fn value(l: &LabelCoverInstance, phi: &PartialAssignment) -> Result<f64> {
    let sat = satisfied_edges(l, phi)?;
    Ok(if l.edges().is_empty() {
        1.0
    } else {
        sat as f64 / l.edges().len() as f64
    })
}

/// Default limit on enumerated assignments for [`brute_force_optimum`].
pub const DEFAULT_BRUTE_FORCE_BUDGET: u128 = 1 << 24;

/// Exact `val(L)` together with an optimal assignment.
///
/// Constraints only join `A` to `B`, so once one side is fixed every vertex
/// on the other side can be optimized independently. The smaller side is
/// enumerated exhaustively (`q^min(|A|,|B|)` assignments, which must fit in
/// `budget`). Ties resolve to the first assignment in enumeration order and
/// the lowest symbol.
pub fn brute_force_optimum(
    l: &LabelCoverInstance,
    budget: u128,
) -> Result<(f64, PartialAssignment)> {
    let q = l.alphabet_size();
    let enumerate_a = l.n_a() <= l.n_b();
    let (fixed, free): (Vec<usize>, Vec<usize>) = if enumerate_a {
        ((0..l.n_a()).collect(), (l.n_a()..l.n()).collect())
    } else {
        ((l.n_a()..l.n()).collect(), (0..l.n_a()).collect())
    };
    let count = (q as u128).checked_pow(fixed.len() as u32);
    match count {
        Some(c) if c <= budget => {}
        _ => {
            return Err(Error::resource(
                "brute-force Label Cover optimum",
                format!("{q}^{} assignments", fixed.len()),
                budget,
            ))
        }
    }

    let mut current = vec![0 as Symbol; l.n()];
    let mut best_dense = current.clone();
    let mut best_sat = None;
    let mut tally = vec![0usize; q];
    let mut digits = vec![0 as Symbol; fixed.len()];
    loop {
        for (&v, &s) in fixed.iter().zip(&digits) {
            current[v] = s;
        }
        let mut sat = 0;
        for &v in &free {
            tally.iter_mut().for_each(|t| *t = 0);
            for &e in l.incident(v) {
                let edge = &l.edges()[e];
                if enumerate_a {
                    tally[edge.pi[current[edge.a] as usize] as usize] += 1;
                } else {
                    for (t, &image) in tally.iter_mut().zip(&edge.pi) {
                        if image == current[edge.b] {
                            *t += 1;
                        }
                    }
                }
            }
            let (best_symbol, best_count) = tally
                .iter()
                .enumerate()
                .fold((0, 0), |acc, (s, &t)| if t > acc.1 { (s, t) } else { acc });
            current[v] = best_symbol as Symbol;
            sat += best_count;
        }
        if best_sat.is_none_or(|b| sat > b) {
            best_sat = Some(sat);
            best_dense.copy_from_slice(&current);
            if sat == l.edges().len() {
                break;
            }
        }
        // Odometer over the enumerated side, last vertex fastest.
        let mut k = digits.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            digits[k] += 1;
            if (digits[k] as usize) < q {
                break;
            }
            digits[k] = 0;
            if k == 0 {
                k = usize::MAX;
                break;
            }
        }
        if k == usize::MAX || digits.is_empty() {
            break;
        }
    }
    let best = PartialAssignment::from_dense(&best_dense);
    Ok((value(l, &best)?, best))
}

/// True iff no edge with both endpoints in `tested ∩ dom(phi)` is violated.
pub fn passes_test(l: &LabelCoverInstance, phi: &PartialAssignment, tested: &[usize]) -> bool {
    let mut in_test = vec![false; l.n()];
    for &v in tested {
        if v < l.n() {
            in_test[v] = true;
        }
    }
    l.edges().iter().all(|e| {
        if !(in_test[e.a] && in_test[e.b]) {
            return true;
        }
        match (phi.get(e.a), phi.get(e.b)) {
            (Some(sa), Some(sb)) => e.satisfied(sa, sb),
            _ => true,
        }
    })
}

/// Sizes and pairwise edge counts of a partition, checked against
/// `n/2r ≤ |U_i| ≤ 2n/r` and `|E|/2r² ≤ |(U_i × U_j) ∩ E| ≤ 2|E|/r²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionQuality {
    pub sizes: Vec<usize>,
    pub size_bounds: (f64, f64),
    pub sizes_ok: bool,
    /// `edge_counts[i][j]` counts edges with the `A` endpoint in block `i`
    /// and the `B` endpoint in block `j`.
    pub edge_counts: Vec<Vec<usize>>,
    pub edge_bounds: (f64, f64),
    pub edges_ok: bool,
    pub bi_regular: bool,
    pub violations: usize,
    pub attempts: usize,
}

impl PartitionQuality {
    pub fn passes(&self) -> bool {
        self.sizes_ok && self.edges_ok
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockPartition {
    pub blocks: Vec<Vec<usize>>,
    pub block_of: Vec<usize>,
    /// `neighbor_index[i][j]` = vertices of `U_i` with a neighbor in `U_j`
    /// (empty on the diagonal).
    pub neighbor_index: Vec<Vec<Vec<usize>>>,
    pub quality: PartitionQuality,
    /// Number of trailing empty blocks appended to make the count even.
    #[serde(default)]
    pub padded_blocks: usize,
}

impl BlockPartition {
    /// Builds a partition from explicit blocks, which must cover every
    /// vertex exactly once. Blocks are stored sorted.
    pub fn from_blocks(l: &LabelCoverInstance, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut block_of = vec![usize::MAX; l.n()];
        for (i, block) in blocks.iter().enumerate() {
            for &v in block {
                if v >= l.n() {
                    return Err(Error::Input(format!("block {i} names missing vertex {v}")));
                }
                if block_of[v] != usize::MAX {
                    return Err(Error::Input(format!("vertex {v} appears in two blocks")));
                }
                block_of[v] = i;
            }
        }
        if let Some(v) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::Input(format!("vertex {v} is in no block")));
        }
        let blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        let r = blocks.len();
        let mut neighbors = vec![vec![BTreeSet::new(); r]; r];
        for e in l.edges() {
            let (ia, ib) = (block_of[e.a], block_of[e.b]);
            if ia != ib {
                neighbors[ia][ib].insert(e.a);
                neighbors[ib][ia].insert(e.b);
            }
        }
        let neighbor_index = neighbors
            .into_iter()
            .map(|row| row.into_iter().map(|s| s.into_iter().collect()).collect())
            .collect();
        let quality = assess(l, &blocks, &block_of);
        Ok(BlockPartition {
            blocks,
            block_of,
            neighbor_index,
            quality,
            padded_blocks: 0,
        })
    }

    pub fn r(&self) -> usize {
        self.blocks.len()
    }

    /// `N_i(j)`.
    pub fn neighbors(&self, i: usize, j: usize) -> &[usize] {
        &self.neighbor_index[i][j]
    }

    /// `N_i(J) = ∪_{j ∈ J} N_i(j)`, sorted.
    pub fn neighbors_of_set(&self, i: usize, js: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let set: BTreeSet<usize> = js
            .into_iter()
            .flat_map(|j| self.neighbors(i, j).iter().copied())
            .collect();
        set.into_iter().collect()
    }

    /// Appends one empty block when the block count is odd.
    pub fn pad_to_even(&mut self) {
        if self.r() % 2 == 1 {
            for row in &mut self.neighbor_index {
                row.push(Vec::new());
            }
            self.blocks.push(Vec::new());
            self.neighbor_index
                .push(vec![Vec::new(); self.blocks.len()]);
            self.padded_blocks += 1;
        }
    }
}

fn assess(l: &LabelCoverInstance, blocks: &[Vec<usize>], block_of: &[usize]) -> PartitionQuality {
    let r = blocks.len();
    let n = l.n() as f64;
    let m = l.edges().len() as f64;
    let rf = r as f64;
    let size_bounds = (n / (2.0 * rf), 2.0 * n / rf);
    let edge_bounds = (m / (2.0 * rf * rf), 2.0 * m / (rf * rf));
    let sizes: Vec<usize> = blocks.iter().map(Vec::len).collect();
    let mut edge_counts = vec![vec![0usize; r]; r];
    for e in l.edges() {
        edge_counts[block_of[e.a]][block_of[e.b]] += 1;
    }
    let size_violations = sizes
        .iter()
        .filter(|&&s| (s as f64) < size_bounds.0 || (s as f64) > size_bounds.1)
        .count();
    let mut edge_violations = 0;
    for (i, row) in edge_counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if i != j && ((c as f64) < edge_bounds.0 || (c as f64) > edge_bounds.1) {
                edge_violations += 1;
            }
        }
    }
    PartitionQuality {
        sizes,
        size_bounds,
        sizes_ok: size_violations == 0,
        edge_counts,
        edge_bounds,
        edges_ok: edge_violations == 0,
        bi_regular: l.is_bi_regular(),
        violations: size_violations + edge_violations,
        attempts: 0,
    }
}

pub const DEFAULT_PARTITION_ATTEMPTS: usize = 100;

/// Random balanced partition into `r` blocks.
pub fn partition_blocks(l: &LabelCoverInstance, r: usize, seed: u64) -> Result<BlockPartition> {
    partition_blocks_with_attempts(l, r, seed, DEFAULT_PARTITION_ATTEMPTS)
}

/// Shuffles the vertices and deals them round-robin into `r` blocks, so
/// block sizes differ by at most one. Resamples until both size and
/// edge-count bounds pass or `max_attempts` is reached, then returns the
/// attempt with the fewest violated bounds.
pub fn partition_blocks_with_attempts(
    l: &LabelCoverInstance,
    r: usize,
    seed: u64,
    max_attempts: usize,
) -> Result<BlockPartition> {
    if r == 0 || r > l.n() {
        return Err(Error::Input(format!(
            "block count {r} outside 1..={}",
            l.n()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..l.n()).collect();
    let mut best: Option<BlockPartition> = None;
    for attempt in 1..=max_attempts.max(1) {
        order.shuffle(&mut rng);
        let mut blocks = vec![Vec::new(); r];
        for (k, &v) in order.iter().enumerate() {
            blocks[k % r].push(v);
        }
        let candidate = BlockPartition::from_blocks(l, blocks)?;
        let better = best
            .as_ref()
            .is_none_or(|b| candidate.quality.violations < b.quality.violations);
        if better {
            best = Some(candidate);
        }
        let done = best.as_ref().is_some_and(|b| b.quality.passes());
        if let Some(b) = best.as_mut() {
            b.quality.attempts = attempt;
        }
        if done {
            break;
        }
    }
    Ok(best.expect("at least one attempt"))
}

/// Random instance families used by tests, examples and audits.
pub mod generators {
    use rand::Rng;

    use super::*;

    /// Random bipartite instance with a planted satisfying assignment.
    /// Every vertex gets at least one edge. Returns the instance and the
    /// planted assignment.
    pub fn planted_satisfiable(
        seed: u64,
        n_a: usize,
        n_b: usize,
        alphabet_size: usize,
        edge_probability: f64,
    ) -> (LabelCoverInstance, PartialAssignment) {
        assert!(n_a > 0 && n_b > 0 && alphabet_size > 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = alphabet_size as Symbol;
        let planted: Vec<Symbol> = (0..n_a + n_b).map(|_| rng.gen_range(0..q)).collect();
        let mut pairs = BTreeSet::new();
        for a in 0..n_a {
            for b in 0..n_b {
                if rng.gen_bool(edge_probability) {
                    pairs.insert((a, b));
                }
            }
        }
        for a in 0..n_a {
            if !pairs.iter().any(|&(x, _)| x == a) {
                pairs.insert((a, rng.gen_range(0..n_b)));
            }
        }
        for b in 0..n_b {
            if !pairs.iter().any(|&(_, y)| y == b) {
                pairs.insert((rng.gen_range(0..n_a), b));
            }
        }
        let edges = pairs
            .into_iter()
            .map(|(a, b)| {
                let mut pi: Vec<Symbol> = (0..alphabet_size).map(|_| rng.gen_range(0..q)).collect();
                pi[planted[a] as usize] = planted[n_a + b];
                (a, b, pi)
            })
            .collect();
        let l = LabelCoverInstance::new(
            (0..n_a).map(|i| format!("a{i}")).collect(),
            (0..n_b).map(|i| format!("b{i}")).collect(),
            alphabet_size,
            edges,
        )
        .expect("generated instance is well-formed");
        (l, PartialAssignment::from_dense(&planted))
    }

    /// Low-value family: every `B` vertex is joined to every `A` vertex by
    /// `q` parallel edges whose projections are shifts `s ↦ s + t (mod q)`
    /// for a random permutation of offsets `t`. For any fixed labels on `A`
    /// the `q` edges from one `A` vertex hit `q` distinct symbols, so each
    /// `B` vertex satisfies at most `|A|` of its `|A|·q` edges and the value
    /// is at most `1/q`.
    pub fn shifted_parallel(
        seed: u64,
        n_a: usize,
        n_b: usize,
        alphabet_size: usize,
    ) -> LabelCoverInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = alphabet_size;
        let mut edges = Vec::with_capacity(n_a * n_b * q);
        for b in 0..n_b {
            for a in 0..n_a {
                let mut offsets: Vec<usize> = (0..q).collect();
                offsets.shuffle(&mut rng);
                for t in offsets {
                    let pi = (0..q).map(|s| ((s + t) % q) as Symbol).collect();
                    edges.push((a, b, pi));
                }
            }
        }
        LabelCoverInstance::new(
            (0..n_a).map(|i| format!("a{i}")).collect(),
            (0..n_b).map(|i| format!("b{i}")).collect(),
            alphabet_size,
            edges,
        )
        .expect("generated instance is well-formed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(q: usize) -> Vec<Symbol> {
        (0..q as Symbol).collect()
    }

    fn single_edge() -> LabelCoverInstance {
        LabelCoverInstance::new(
            vec!["a".into()],
            vec!["b".into()],
            2,
            vec![(0, 0, identity(2))],
        )
        .unwrap()
    }

    #[test]
    fn value_single_edge() {
        let l = single_edge();
        assert_eq!(
            value(&l, &PartialAssignment::from_dense(&[0, 0])).unwrap(),
            1.0
        );
        assert_eq!(
            value(&l, &PartialAssignment::from_dense(&[0, 1])).unwrap(),
            0.0
        );
    }

    #[test]
    fn value_constant_projections_ignore_a() {
        let l = LabelCoverInstance::new(
            vec!["a0".into(), "a1".into()],
            vec!["b".into()],
            2,
            vec![(0, 0, vec![0, 0]), (1, 0, vec![0, 0])],
        )
        .unwrap();
        for a0 in 0..2 {
            for a1 in 0..2 {
                assert_eq!(
                    value(&l, &PartialAssignment::from_dense(&[a0, a1, 0])).unwrap(),
                    1.0
                );
            }
        }
    }

    #[test]
    fn value_rejects_partial() {
        let l = single_edge();
        let phi = PartialAssignment::from_pairs([(0, 0)]);
        assert!(matches!(value(&l, &phi), Err(Error::Input(_))));
    }

    #[test]
    fn brute_force_examples() {
        // Identity constraints on a perfect matching are satisfiable.
        let l = LabelCoverInstance::new(
            vec!["a0".into(), "a1".into()],
            vec!["b0".into(), "b1".into()],
            3,
            vec![(0, 0, identity(3)), (1, 1, identity(3))],
        )
        .unwrap();
        let (val, phi) = brute_force_optimum(&l, DEFAULT_BRUTE_FORCE_BUDGET).unwrap();
        assert_eq!(val, 1.0);
        assert_eq!(value(&l, &phi).unwrap(), 1.0);

        assert_eq!(brute_force_optimum(&single_edge(), 16).unwrap().0, 1.0);

        // Parallel identity and swap edges: at most one holds.
        let l = LabelCoverInstance::new(
            vec!["a".into()],
            vec!["b".into()],
            2,
            vec![(0, 0, vec![0, 1]), (0, 0, vec![1, 0])],
        )
        .unwrap();
        assert_eq!(brute_force_optimum(&l, 16).unwrap().0, 0.5);
    }

    #[test]
    fn brute_force_enumerates_smaller_side() {
        // Two A vertices, one B vertex: enumerating B (2 assignments) must
        // still pick the best A labels.
        let l = LabelCoverInstance::new(
            vec!["a0".into(), "a1".into()],
            vec!["b".into()],
            2,
            vec![(0, 0, vec![1, 0]), (1, 0, vec![1, 1])],
        )
        .unwrap();
        let (val, phi) = brute_force_optimum(&l, 2).unwrap();
        assert_eq!(val, 1.0);
        assert_eq!(phi.get(2), Some(1));
    }

    #[test]
    fn brute_force_budget() {
        let l = generators::shifted_parallel(0, 3, 3, 10);
        let err = brute_force_optimum(&l, 999).unwrap_err();
        assert!(matches!(err, Error::Resource { .. }));
        assert!(err.to_string().contains("10^3"));
    }

    #[test]
    fn shifted_parallel_value_is_one_over_q() {
        let l = generators::shifted_parallel(3, 2, 3, 8);
        let (val, _) = brute_force_optimum(&l, DEFAULT_BRUTE_FORCE_BUDGET).unwrap();
        assert_eq!(val, 1.0 / 8.0);
    }

    #[test]
    fn passes_test_examples() {
        let l = single_edge();
        let bad = PartialAssignment::from_dense(&[0, 1]);
        assert!(passes_test(&l, &bad, &[]));
        assert!(!passes_test(&l, &bad, &[0, 1]));
        assert!(passes_test(&l, &bad, &[0]));
        let good = PartialAssignment::from_dense(&[1, 1]);
        assert!(passes_test(&l, &good, &[0, 1]));
        // Unassigned endpoints never count as violations.
        assert!(passes_test(
            &l,
            &PartialAssignment::from_pairs([(0, 0)]),
            &[0, 1]
        ));
    }

    #[test]
    fn planted_instances_are_satisfied() {
        for seed in 0..20 {
            let (l, sigma) = generators::planted_satisfiable(seed, 3, 3, 2, 0.5);
            assert_eq!(value(&l, &sigma).unwrap(), 1.0);
            assert!((0..l.n()).all(|v| !l.incident(v).is_empty()));
        }
    }

    fn four_by_four() -> LabelCoverInstance {
        // 2-regular on both sides.
        let edges = (0..4)
            .flat_map(|a| [(a, a, identity(2)), (a, (a + 1) % 4, identity(2))])
            .collect();
        LabelCoverInstance::new(
            (0..4).map(|i| format!("a{i}")).collect(),
            (0..4).map(|i| format!("b{i}")).collect(),
            2,
            edges,
        )
        .unwrap()
    }

    #[test]
    fn partition_examples() {
        let l = four_by_four();
        assert!(l.is_bi_regular());

        let p = partition_blocks(&l, 1, 5).unwrap();
        assert_eq!(p.blocks, vec![(0..8).collect::<Vec<_>>()]);
        assert!(p.quality.sizes_ok);

        let p = partition_blocks(&l, 2, 5).unwrap();
        assert!(p.blocks.iter().all(|b| (2..=8).contains(&b.len())));
        assert!(p.quality.sizes_ok);

        let p = partition_blocks(&l, 8, 5).unwrap();
        assert!(p.blocks.iter().all(|b| b.len() == 1));
        assert_eq!(p.quality.attempts, DEFAULT_PARTITION_ATTEMPTS);
        assert!(!p.quality.edges_ok);

        assert!(partition_blocks(&l, 0, 5).is_err());
        assert!(partition_blocks(&l, 9, 5).is_err());
    }

    #[test]
    fn neighbor_index_is_consistent() {
        let l = four_by_four();
        let p = partition_blocks(&l, 3, 11).unwrap();
        for i in 0..p.r() {
            for j in 0..p.r() {
                for &v in p.neighbors(i, j) {
                    assert_eq!(p.block_of[v], i);
                    let has_edge = l.incident(v).iter().any(|&e| {
                        let edge = &l.edges()[e];
                        let other = if edge.a == v { edge.b } else { edge.a };
                        p.block_of[other] == j
                    });
                    assert!(has_edge);
                }
            }
        }
    }

    #[test]
    fn padding_adds_empty_block() {
        let l = four_by_four();
        let mut p = partition_blocks(&l, 3, 1).unwrap();
        p.pad_to_even();
        assert_eq!(p.r(), 4);
        assert!(p.blocks[3].is_empty());
        assert_eq!(p.padded_blocks, 1);
        assert!(p.neighbors(0, 3).is_empty() && p.neighbors(3, 0).is_empty());
    }

    #[test]
    fn json_round_trip() {
        let l = four_by_four();
        let text = serde_json::to_string(&l).unwrap();
        assert!(text.contains("\"A\""));
        let back: LabelCoverInstance = serde_json::from_str(&text).unwrap();
        assert_eq!(back, l);
        let bad = r#"{"A":["a"],"B":["b"],"alphabet_size":2,"edges":[{"a":"a","b":"b","pi":[0]}]}"#;
        assert!(serde_json::from_str::<LabelCoverInstance>(bad).is_err());
    }
}
