//! Randomized reductions from Label Cover to VC dimension and to
//! Littlestone's dimension, with their completeness certificates.
//!
//! Both constructions partition the vertices into `r` blocks, draw `ℓ` random
//! perfect matchings of the blocks per seed-set, and emit one concept per
//! inclusion set, seed-set and constraint-respecting assignment of the tested
//! vertices.
//!
//! Label grammar (bijective with the element and concept indices):
//!
//! * assignment elements `x:<i>:<sigma>` (VC) and `x:<i>:<sigma>:<j>` (LS),
//!   where `<sigma>` lists the symbols of block `i` in vertex order;
//! * test-selection elements `y:<i>` (VC) and `y:<i>:<I-bits>:<j>` (LS);
//! * concepts `c:<I-bits>:<H-bits>:<sigma_H>`, with `<sigma_H>` over the
//!   tested vertices of the seed-set in vertex order.
//!
//! Symbols are single digits when the alphabet has at most ten symbols and
//! `.`-separated decimals otherwise. Bit strings put position `p` at
//! character `p`; in the LS reduction pair `(i, j)` has position `i·k + j`.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::concept::{ConceptClass, ShatterWitness, Universe};
use crate::dimensions::MistakeTree;
use crate::error::{Error, Result};
use crate::labelcover::{self, BlockPartition, LabelCoverInstance, PartialAssignment, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionKind {
    Vc,
    Ls,
}

impl ReductionKind {
    pub fn name(self) -> &'static str {
        match self {
            ReductionKind::Vc => "vc",
            ReductionKind::Ls => "ls",
        }
    }
}

/// Hard limits on generated sizes. Exceeding any of them is a resource error
/// raised before the expensive work starts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Caps {
    pub max_universe: usize,
    pub max_concepts: usize,
    pub max_rk: usize,
    pub max_ell: usize,
    /// Bound on `|U| · |C|`, the size of the membership matrix.
    pub max_matrix_bits: u64,
    /// Bound on `2^r · ℓ · r`, the number of stored permutation entries.
    pub max_plan_entries: u64,
    pub max_tree_depth: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_universe: 100_000,
            max_concepts: 100_000,
            max_rk: 16,
            max_ell: 10_000,
            max_matrix_bits: 1 << 31,
            max_plan_entries: 10_000_000,
            max_tree_depth: 24,
        }
    }
}

/// Requested parameters; unset values take the defaults of the construction,
/// clamped by the caps.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReductionParams {
    pub r: Option<usize>,
    pub delta: Option<f64>,
    pub ell: Option<usize>,
    pub k: Option<usize>,
    pub seed: u64,
    pub caps: Caps,
}

/// Parameters actually used, with every default or clamp spelled out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedParams {
    pub kind: ReductionKind,
    pub n: usize,
    /// Block count before padding.
    pub r: usize,
    /// Block count after padding to an even number.
    pub r_padded: usize,
    pub delta: f64,
    pub ell: usize,
    pub k: usize,
    pub seed: u64,
    pub caps: Caps,
    pub overrides: Vec<String>,
}

/// Random matchings drawn for one seed-set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedTest {
    /// Bit mask of the seed-set (`H ⊆ Y` or `H̃ ⊆ [r]`).
    pub seed_set: u64,
    pub permutations: Vec<Vec<usize>>,
    /// `M(i)`: blocks matched with `i` in any of the matchings.
    pub matched: Vec<Vec<usize>>,
    /// `N_i(M(i))`.
    pub block_tests: Vec<Vec<usize>>,
    /// `T = ∪_i N_i(M(i))`, sorted.
    pub tested: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestPlan {
    /// Indexed by seed-set mask.
    pub seed_sets: Vec<SeedTest>,
}

impl TestPlan {
    pub fn get(&self, seed_set: u64) -> &SeedTest {
        &self.seed_sets[seed_set as usize]
    }

    pub fn len(&self) -> usize {
        self.seed_sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seed_sets.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub partition_stream: String,
    pub seed_set_streams: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElementKind {
    Assignment {
        block: usize,
        sigma: Vec<Symbol>,
        copy: Option<usize>,
    },
    TestSelection {
        block: usize,
        inclusion: Option<u64>,
        copy: Option<usize>,
    },
}

impl ElementKind {
    pub fn is_assignment(&self) -> bool {
        matches!(self, ElementKind::Assignment { .. })
    }

    pub fn block(&self) -> usize {
        match self {
            ElementKind::Assignment { block, .. } | ElementKind::TestSelection { block, .. } => {
                *block
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConceptKey {
    /// `I`, over blocks (VC) or block-copy pairs (LS).
    pub inclusion: u64,
    /// `H`, over test-selection indices (VC) or block-copy pairs (LS).
    pub seed: u64,
    /// Assignment to the tested vertices of the seed-set used.
    pub sigma: Vec<Symbol>,
}

/// Everything needed to reload and audit a generated class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionMeta {
    pub kind: ReductionKind,
    pub params: ResolvedParams,
    pub instance: LabelCoverInstance,
    pub partition: BlockPartition,
    pub test_plan: TestPlan,
    pub provenance: Provenance,
    pub concept_labels: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct ReductionOutput {
    pub class: ConceptClass,
    pub meta: ReductionMeta,
    pub element_kinds: Vec<ElementKind>,
    pub concept_keys: Vec<ConceptKey>,
}

impl ReductionOutput {
    pub fn kind(&self) -> ReductionKind {
        self.meta.kind
    }

    pub fn instance(&self) -> &LabelCoverInstance {
        &self.meta.instance
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.meta.partition
    }

    pub fn plan(&self) -> &TestPlan {
        &self.meta.test_plan
    }

    /// Effective (padded) block count.
    pub fn r(&self) -> usize {
        self.meta.partition.r()
    }

    pub fn k(&self) -> usize {
        self.meta.params.k
    }

    /// Seed-set whose test plan concept `c` was built from: `H` for the VC
    /// reduction, `τ(H)` for the LS reduction.
    pub fn plan_seed_of(&self, c: usize) -> u64 {
        let key = &self.concept_keys[c];
        match self.kind() {
            ReductionKind::Vc => key.seed,
            ReductionKind::Ls => tau_mask(key.seed, self.r(), self.k()),
        }
    }

    pub fn concept_index(&self, label: &str) -> Option<usize> {
        self.meta.concept_labels.iter().position(|l| l == label)
    }

    /// Re-derives membership of element `x` in concept `c` from the keys and
    /// the test plan, independently of the stored matrix.
    pub fn rule_membership(&self, c: usize, x: usize) -> bool {
        let key = &self.concept_keys[c];
        let k = self.k();
        match (&self.element_kinds[x], self.kind()) {
            (ElementKind::TestSelection { block, .. }, ReductionKind::Vc) => {
                key.seed >> block & 1 == 1
            }
            (
                ElementKind::TestSelection {
                    block,
                    inclusion,
                    copy,
                },
                ReductionKind::Ls,
            ) => {
                let p = block * k + copy.unwrap_or(0);
                *inclusion == Some(key.inclusion) && key.seed >> p & 1 == 1
            }
            (ElementKind::Assignment { block, sigma, copy }, kind) => {
                let p = match kind {
                    ReductionKind::Vc => *block,
                    ReductionKind::Ls => block * k + copy.unwrap_or(0),
                };
                if key.inclusion >> p & 1 == 0 {
                    return false;
                }
                let test = self.plan().get(self.plan_seed_of(c));
                let members = &self.partition().blocks[*block];
                test.block_tests[*block].iter().all(|v| {
                    let in_block = members
                        .binary_search(v)
                        .expect("tested vertex lies in its block");
                    let in_test = test
                        .tested
                        .binary_search(v)
                        .expect("block test is part of T");
                    sigma[in_block] == key.sigma[in_test]
                })
            }
        }
    }

    pub fn save(&self, prefix: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
        let (cc, meta) = sidecar_paths(prefix.as_ref());
        fs::write(&cc, self.class.to_text())?;
        fs::write(&meta, serde_json::to_string_pretty(&self.meta)? + "\n")?;
        Ok((cc, meta))
    }

    /// Loads `<prefix>.cc` and `<prefix>.meta.json`. Either file path may be
    /// given in place of the prefix.
    pub fn load(prefix: impl AsRef<Path>) -> Result<Self> {
        let (cc, meta_path) = sidecar_paths(prefix.as_ref());
        let class = ConceptClass::load(&cc)?;
        let meta: ReductionMeta = serde_json::from_str(&fs::read_to_string(&meta_path)?)?;
        if meta.concept_labels.len() != class.len() {
            return Err(Error::Input(format!(
                "metadata lists {} concepts, class file has {}",
                meta.concept_labels.len(),
                class.len()
            )));
        }
        let class = class.with_concept_labels(meta.concept_labels.clone())?;
        Self::from_parts(class, meta)
    }

    fn from_parts(class: ConceptClass, meta: ReductionMeta) -> Result<Self> {
        let q = meta.instance.alphabet_size();
        let rk = meta.partition.r() * meta.params.k;
        let element_kinds = class
            .universe()
            .labels()
            .iter()
            .map(|l| parse_element_label(l, meta.kind, q, rk))
            .collect::<Result<Vec<_>>>()?;
        let width = match meta.kind {
            ReductionKind::Vc => meta.partition.r(),
            ReductionKind::Ls => rk,
        };
        let concept_keys = meta
            .concept_labels
            .iter()
            .map(|l| parse_concept_label(l, q, width))
            .collect::<Result<Vec<_>>>()?;
        Ok(ReductionOutput {
            class,
            meta,
            element_kinds,
            concept_keys,
        })
    }
}

/// `(<prefix>.cc, <prefix>.meta.json)`; a trailing `.cc` or `.meta.json` on
/// the argument is stripped first.
pub fn sidecar_paths(prefix: &Path) -> (PathBuf, PathBuf) {
    let s = prefix.to_string_lossy();
    let base = s
        .strip_suffix(".meta.json")
        .or_else(|| s.strip_suffix(".cc"))
        .unwrap_or(&s)
        .to_string();
    (
        PathBuf::from(format!("{base}.cc")),
        PathBuf::from(format!("{base}.meta.json")),
    )
}

// ---- labels ----------------------------------------------------------------

fn sigma_string(sigma: &[Symbol], q: usize) -> String {
    if q <= 10 {
        sigma.iter().map(|s| char::from(b'0' + *s as u8)).collect()
    } else {
        sigma
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

fn parse_sigma(text: &str, q: usize) -> Result<Vec<Symbol>> {
    let bad = || Error::Label(format!("malformed assignment {text:?}"));
    let symbols: Vec<Symbol> = if text.is_empty() {
        Vec::new()
    } else if q <= 10 {
        text.chars()
            .map(|c| c.to_digit(10).ok_or_else(bad))
            .collect::<Result<_>>()?
    } else {
        text.split('.')
            .map(|t| t.parse().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if symbols.iter().any(|&s| s as usize >= q) {
        return Err(bad());
    }
    Ok(symbols)
}

fn mask_string(mask: u64, width: usize) -> String {
    (0..width)
        .map(|p| if mask >> p & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn parse_mask(text: &str, width: usize) -> Result<u64> {
    if text.len() != width {
        return Err(Error::Label(format!(
            "bit string {text:?} should have {width} characters"
        )));
    }
    text.chars()
        .enumerate()
        .try_fold(0u64, |m, (p, c)| match c {
            '0' => Ok(m),
            '1' => Ok(m | 1 << p),
            _ => Err(Error::Label(format!("malformed bit string {text:?}"))),
        })
}

fn parse_index(text: &str) -> Result<usize> {
    text.parse()
        .map_err(|_| Error::Label(format!("malformed index {text:?}")))
}

pub fn element_label(kind: &ElementKind, q: usize, rk: usize) -> String {
    match kind {
        ElementKind::Assignment { block, sigma, copy } => match copy {
            None => format!("x:{block}:{}", sigma_string(sigma, q)),
            Some(j) => format!("x:{block}:{}:{j}", sigma_string(sigma, q)),
        },
        ElementKind::TestSelection {
            block,
            inclusion,
            copy,
        } => match (inclusion, copy) {
            (Some(i), Some(j)) => format!("y:{block}:{}:{j}", mask_string(*i, rk)),
            _ => format!("y:{block}"),
        },
    }
}

pub fn parse_element_label(
    label: &str,
    kind: ReductionKind,
    q: usize,
    rk: usize,
) -> Result<ElementKind> {
    let parts: Vec<&str> = label.split(':').collect();
    let bad = || {
        Error::Label(format!(
            "unrecognized {} element label {label:?}",
            kind.name()
        ))
    };
    match (kind, parts.as_slice()) {
        (ReductionKind::Vc, ["x", i, s]) => Ok(ElementKind::Assignment {
            block: parse_index(i)?,
            sigma: parse_sigma(s, q)?,
            copy: None,
        }),
        (ReductionKind::Ls, ["x", i, s, j]) => Ok(ElementKind::Assignment {
            block: parse_index(i)?,
            sigma: parse_sigma(s, q)?,
            copy: Some(parse_index(j)?),
        }),
        (ReductionKind::Vc, ["y", i]) => Ok(ElementKind::TestSelection {
            block: parse_index(i)?,
            inclusion: None,
            copy: None,
        }),
        (ReductionKind::Ls, ["y", i, m, j]) => Ok(ElementKind::TestSelection {
            block: parse_index(i)?,
            inclusion: Some(parse_mask(m, rk)?),
            copy: Some(parse_index(j)?),
        }),
        _ => Err(bad()),
    }
}

pub fn concept_label(key: &ConceptKey, q: usize, width: usize) -> String {
    format!(
        "c:{}:{}:{}",
        mask_string(key.inclusion, width),
        mask_string(key.seed, width),
        sigma_string(&key.sigma, q)
    )
}

pub fn parse_concept_label(label: &str, q: usize, width: usize) -> Result<ConceptKey> {
    let parts: Vec<&str> = label.split(':').collect();
    let ["c", i, h, s] = parts.as_slice() else {
        return Err(Error::Label(format!(
            "unrecognized concept label {label:?}"
        )));
    };
    Ok(ConceptKey {
        inclusion: parse_mask(i, width)?,
        seed: parse_mask(h, width)?,
        sigma: parse_sigma(s, q)?,
    })
}

// ---- parameters ------------------------------------------------------------

fn resolve(
    kind: ReductionKind,
    l: &LabelCoverInstance,
    params: &ReductionParams,
) -> Result<ResolvedParams> {
    let n = l.n();
    if n < 2 {
        return Err(Error::Input("reductions need at least two vertices".into()));
    }
    let log_n = (n as f64).log2();
    let mut overrides = Vec::new();

    let r = match params.r {
        Some(r) if r < 2 => return Err(Error::Input(format!("r = {r} must be at least 2"))),
        Some(r) if r > n => return Err(Error::Input(format!("r = {r} exceeds the {n} vertices"))),
        Some(r) => r,
        None => {
            let raw = ((n as f64).sqrt() / log_n).floor() as usize;
            let r = raw.max(2);
            if r != raw {
                overrides.push(format!(
                    "r: default floor(sqrt(n)/log2 n) = {raw} raised to 2"
                ));
            }
            r
        }
    };
    let r_padded = r + r % 2;
    if r_padded != r {
        overrides.push(format!(
            "r: odd value {r} padded with one empty block to {r_padded}"
        ));
    }

    let delta = match params.delta {
        Some(d) if !(d.is_finite() && d > 0.0) => {
            return Err(Error::Input(format!("delta = {d} must be positive")))
        }
        Some(d) => d,
        None => {
            let d = (1.0 / log_n).min(1.0);
            overrides.push(format!("delta: default 1/log2 n = {d}"));
            d
        }
    };

    let ell = match params.ell {
        Some(0) => return Err(Error::Input("ell must be at least 1".into())),
        Some(e) if e > params.caps.max_ell => {
            return Err(Error::resource(
                "matchings per seed-set",
                format!("ell = {e}"),
                params.caps.max_ell,
            ))
        }
        Some(e) => e,
        None => {
            let (name, raw) = match kind {
                ReductionKind::Vc => ("ceil(80/delta^3)", (80.0 / delta.powi(3)).ceil()),
                ReductionKind::Ls => ("1000", 1000.0),
            };
            if raw > params.caps.max_ell as f64 {
                overrides.push(format!(
                    "ell: default {name} = {raw} clamped to {}",
                    params.caps.max_ell
                ));
                params.caps.max_ell
            } else {
                raw as usize
            }
        }
    };

    let k = match kind {
        ReductionKind::Vc => {
            if params.k.is_some() {
                overrides.push("k: ignored by the vc reduction".into());
            }
            1
        }
        ReductionKind::Ls => {
            let max_k = params.caps.max_rk / r_padded;
            match params.k {
                Some(0) => return Err(Error::Input("k must be at least 1".into())),
                Some(k) if r_padded * k > params.caps.max_rk => {
                    return Err(Error::resource(
                        "ls reduction copies",
                        format!("r*k = {r_padded}*{k} = {}", r_padded * k),
                        params.caps.max_rk,
                    ))
                }
                Some(k) => k,
                None => {
                    if max_k == 0 {
                        return Err(Error::resource(
                            "ls reduction copies",
                            format!("r*k >= {r_padded}"),
                            params.caps.max_rk,
                        ));
                    }
                    let q = l.alphabet_size() as f64;
                    let raw = (1e10 * l.edges().len() as f64 * q.log2()
                        / (r_padded * r_padded) as f64)
                        .ceil();
                    let k = (raw.max(1.0) as usize).min(max_k);
                    if k as f64 != raw {
                        overrides.push(format!(
                            "k: default ceil(1e10*|E|*log2|Sigma|/r^2) = {raw} clamped to {k}"
                        ));
                    }
                    k
                }
            }
        }
    };

    Ok(ResolvedParams {
        kind,
        n,
        r,
        r_padded,
        delta,
        ell,
        k,
        seed: params.seed,
        caps: params.caps.clone(),
        overrides,
    })
}

// ---- shared construction ---------------------------------------------------

/// RNG for the test plan of one seed-set, independent of generation order.
pub fn seed_set_rng(seed: u64, seed_set: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(seed_set + 1);
    rng
}

/// `ℓ` random perfect matchings of the blocks and the vertices they test.
pub fn draw_seed_test(
    partition: &BlockPartition,
    ell: usize,
    seed_set: u64,
    rng: &mut ChaCha8Rng,
) -> SeedTest {
    let r = partition.r();
    let mut matched = vec![BTreeSet::new(); r];
    let mut permutations = Vec::with_capacity(ell);
    for _ in 0..ell {
        let mut perm: Vec<usize> = (0..r).collect();
        perm.shuffle(rng);
        for pair in perm.chunks_exact(2) {
            matched[pair[0]].insert(pair[1]);
            matched[pair[1]].insert(pair[0]);
        }
        permutations.push(perm);
    }
    seed_test_from_matched(partition, seed_set, permutations, matched)
}

fn seed_test_from_matched(
    partition: &BlockPartition,
    seed_set: u64,
    permutations: Vec<Vec<usize>>,
    matched: Vec<BTreeSet<usize>>,
) -> SeedTest {
    let block_tests: Vec<Vec<usize>> = matched
        .iter()
        .enumerate()
        .map(|(i, m)| partition.neighbors_of_set(i, m.iter().copied()))
        .collect();
    let tested: BTreeSet<usize> = block_tests.iter().flatten().copied().collect();
    SeedTest {
        seed_set,
        permutations,
        matched: matched
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect(),
        block_tests,
        tested: tested.into_iter().collect(),
    }
}

fn build_plan(partition: &BlockPartition, params: &ResolvedParams) -> Result<TestPlan> {
    let r = partition.r();
    let entries = (1u128 << r) * params.ell as u128 * r as u128;
    if entries > params.caps.max_plan_entries as u128 {
        return Err(Error::resource(
            "test plan",
            format!(
                "2^r*ell*r = 2^{r}*{}*{r} = {entries} permutation entries",
                params.ell
            ),
            params.caps.max_plan_entries,
        ));
    }
    let seed_sets = (0..1u64 << r)
        .map(|h| draw_seed_test(partition, params.ell, h, &mut seed_set_rng(params.seed, h)))
        .collect();
    Ok(TestPlan { seed_sets })
}

/// All assignments to `tested` (sorted) that violate no constraint with both
/// endpoints in `tested`, in lexicographic order. Fails once more than
/// `limit` are found.
pub fn non_violating_assignments(
    l: &LabelCoverInstance,
    tested: &[usize],
    limit: usize,
) -> std::result::Result<Vec<Vec<Symbol>>, usize> {
    let pos: HashMap<usize, usize> = tested.iter().enumerate().map(|(p, &v)| (v, p)).collect();
    // For each position, edges back to earlier positions: (edge, other position).
    let mut back: Vec<Vec<(usize, usize)>> = vec![Vec::new(); tested.len()];
    for (e, edge) in l.edges().iter().enumerate() {
        if let (Some(&pa), Some(&pb)) = (pos.get(&edge.a), pos.get(&edge.b)) {
            back[pa.max(pb)].push((e, pa.min(pb)));
        }
    }
    let q = l.alphabet_size() as Symbol;
    let mut out = Vec::new();
    let mut current = vec![0 as Symbol; tested.len()];
    struct Search<'a> {
        l: &'a LabelCoverInstance,
        tested: &'a [usize],
        back: &'a [Vec<(usize, usize)>],
        q: Symbol,
        limit: usize,
    }
    impl Search<'_> {
        fn rec(
            &self,
            p: usize,
            current: &mut Vec<Symbol>,
            out: &mut Vec<Vec<Symbol>>,
        ) -> std::result::Result<(), usize> {
            if p == self.tested.len() {
                if out.len() == self.limit {
                    return Err(self.limit + 1);
                }
                out.push(current.clone());
                return Ok(());
            }
            for s in 0..self.q {
                current[p] = s;
                let ok = self.back[p].iter().all(|&(e, other)| {
                    let edge = &self.l.edges()[e];
                    let (sa, sb) = if edge.a == self.tested[p] {
                        (s, current[other])
                    } else {
                        (current[other], s)
                    };
                    edge.satisfied(sa, sb)
                });
                if ok {
                    self.rec(p + 1, current, out)?;
                }
            }
            Ok(())
        }
    }
    let search = Search {
        l,
        tested,
        back: &back,
        q,
        limit,
    };
    search.rec(0, &mut current, &mut out)?;
    Ok(out)
}

/// Assignments `Σ^{U_i}` of one block in lexicographic order.
fn block_assignments(q: usize, len: usize) -> Vec<Vec<Symbol>> {
    let count = q.pow(len as u32);
    (0..count)
        .map(|mut idx| {
            let mut sigma = vec![0 as Symbol; len];
            for slot in sigma.iter_mut().rev() {
                *slot = (idx % q) as Symbol;
                idx /= q;
            }
            sigma
        })
        .collect()
}

fn checked_assignment_count(q: usize, partition: &BlockPartition) -> Option<usize> {
    partition.blocks.iter().try_fold(0usize, |acc, b| {
        acc.checked_add(q.checked_pow(b.len() as u32)?)
    })
}

/// For a concept's assignment `sigma` over `test.tested`, the indices of the
/// block assignments of each block that agree with it on `N_i(M(i))`.
fn consistent_assignments(
    partition: &BlockPartition,
    test: &SeedTest,
    sigma: &[Symbol],
    block_sigmas: &[Vec<Vec<Symbol>>],
) -> Vec<Vec<usize>> {
    (0..partition.r())
        .map(|i| {
            let members = &partition.blocks[i];
            let checks: Vec<(usize, Symbol)> = test.block_tests[i]
                .iter()
                .map(|v| {
                    let in_block = members
                        .binary_search(v)
                        .expect("tested vertex lies in its block");
                    let in_test = test
                        .tested
                        .binary_search(v)
                        .expect("block test is part of T");
                    (in_block, sigma[in_test])
                })
                .collect();
            block_sigmas[i]
                .iter()
                .enumerate()
                .filter(|(_, s)| checks.iter().all(|&(p, v)| s[p] == v))
                .map(|(a, _)| a)
                .collect()
        })
        .collect()
}

struct Prepared {
    params: ResolvedParams,
    partition: BlockPartition,
    plan: TestPlan,
    block_sigmas: Vec<Vec<Vec<Symbol>>>,
    /// Non-violating assignments per plan seed-set.
    sigmas: Vec<Vec<Vec<Symbol>>>,
}

fn prepare(
    kind: ReductionKind,
    l: &LabelCoverInstance,
    params: &ReductionParams,
    universe_size: impl Fn(usize, usize, usize) -> Option<usize>,
    universe_formula: &str,
) -> Result<Prepared> {
    let resolved = resolve(kind, l, params)?;
    let caps = &resolved.caps;
    let mut partition = labelcover::partition_blocks(l, resolved.r, resolved.seed)?;
    partition.pad_to_even();
    let r = partition.r();
    if r > 62 {
        return Err(Error::resource("seed-set masks", format!("r = {r}"), 62));
    }
    let q = l.alphabet_size();
    let universe =
        checked_assignment_count(q, &partition).and_then(|x| universe_size(x, r, resolved.k));
    match universe {
        Some(u) if u <= caps.max_universe => {}
        _ => {
            let shown = universe.map_or("overflow".to_string(), |u| u.to_string());
            return Err(Error::resource(
                "universe",
                format!("{universe_formula} = {shown}"),
                caps.max_universe,
            ));
        }
    }
    let plan = build_plan(&partition, &resolved)?;
    let mut sigmas = Vec::with_capacity(plan.len());
    for test in &plan.seed_sets {
        let list =
            non_violating_assignments(l, &test.tested, caps.max_concepts).map_err(|found| {
                Error::resource(
                    "concepts",
                    format!(
                        "more than {} non-violating assignments for seed-set {} (|T| = {})",
                        found - 1,
                        test.seed_set,
                        test.tested.len()
                    ),
                    caps.max_concepts,
                )
            })?;
        sigmas.push(list);
    }
    let block_sigmas = partition
        .blocks
        .iter()
        .map(|b| block_assignments(q, b.len()))
        .collect();
    Ok(Prepared {
        params: resolved,
        partition,
        plan,
        block_sigmas,
        sigmas,
    })
}

fn check_sizes(caps: &Caps, concepts: u128, formula: String, universe: usize) -> Result<()> {
    if concepts > caps.max_concepts as u128 {
        return Err(Error::resource(
            "concepts",
            format!("{formula} = {concepts}"),
            caps.max_concepts,
        ));
    }
    let bits = concepts * universe as u128;
    if bits > caps.max_matrix_bits as u128 {
        return Err(Error::resource(
            "membership matrix",
            format!("|U|*|C| = {universe}*{concepts} = {bits} bits"),
            caps.max_matrix_bits,
        ));
    }
    Ok(())
}

fn provenance(seed: u64) -> Provenance {
    Provenance {
        generator: "ChaCha8".into(),
        partition_stream: format!("seed {seed}, stream 0"),
        seed_set_streams: format!("seed {seed}, stream 1 + seed-set mask"),
    }
}

fn assemble(
    kind: ReductionKind,
    l: &LabelCoverInstance,
    prepared: Prepared,
    kinds: Vec<ElementKind>,
    rows: Vec<BitSet>,
    keys: Vec<ConceptKey>,
) -> Result<ReductionOutput> {
    let q = l.alphabet_size();
    let r = prepared.partition.r();
    let rk = r * prepared.params.k;
    let width = if kind == ReductionKind::Vc { r } else { rk };
    let labels: Vec<String> = kinds.iter().map(|e| element_label(e, q, rk)).collect();
    let concept_labels: Vec<String> = keys
        .iter()
        .map(|key| concept_label(key, q, width))
        .collect();
    let class = ConceptClass::from_rows(Universe::new(labels)?, rows)?
        .with_concept_labels(concept_labels.clone())?;
    let meta = ReductionMeta {
        kind,
        provenance: provenance(prepared.params.seed),
        params: prepared.params,
        instance: l.clone(),
        partition: prepared.partition,
        test_plan: prepared.plan,
        concept_labels,
    };
    Ok(ReductionOutput {
        class,
        meta,
        element_kinds: kinds,
        concept_keys: keys,
    })
}

// ---- VC --------------------------------------------------------------------

/// Label Cover to VC dimension.
///
/// Universe: `x_{i,σ_i}` for every block `i` and `σ_i ∈ Σ^{U_i}`, then
/// `y_0..y_{r-1}`. Concept `C_{I,H,σ_H}` contains `x_{i,σ_i}` iff `i ∈ I` and
/// `σ_i` agrees with `σ_H` on `N_i(M_H(i))`, and `y_i` iff `i ∈ H`.
pub fn vc_reduction(l: &LabelCoverInstance, params: &ReductionParams) -> Result<ReductionOutput> {
    let prepared = prepare(
        ReductionKind::Vc,
        l,
        params,
        |x, r, _| x.checked_add(r),
        "sum_i |Sigma|^|U_i| + r",
    )?;
    let r = prepared.partition.r();
    let n_x: usize = prepared.block_sigmas.iter().map(Vec::len).sum();
    let n_u = n_x + r;
    let listed: u128 = prepared.sigmas.iter().map(|s| s.len() as u128).sum();
    check_sizes(
        &prepared.params.caps,
        (1u128 << r) * listed,
        format!("2^r * sum_H #sigma_H = 2^{r} * {listed}"),
        n_u,
    )?;

    let mut kinds = Vec::with_capacity(n_u);
    let mut x_offset = Vec::with_capacity(r);
    for (i, sigmas) in prepared.block_sigmas.iter().enumerate() {
        x_offset.push(kinds.len());
        for sigma in sigmas {
            kinds.push(ElementKind::Assignment {
                block: i,
                sigma: sigma.clone(),
                copy: None,
            });
        }
    }
    for i in 0..r {
        kinds.push(ElementKind::TestSelection {
            block: i,
            inclusion: None,
            copy: None,
        });
    }

    let mut rows = Vec::new();
    let mut keys = Vec::new();
    for (h, test) in prepared.plan.seed_sets.iter().enumerate() {
        for sigma in &prepared.sigmas[h] {
            let consistent =
                consistent_assignments(&prepared.partition, test, sigma, &prepared.block_sigmas);
            for inclusion in 0..1u64 << r {
                let mut row = BitSet::new(n_u);
                for i in (0..r).filter(|i| inclusion >> i & 1 == 1) {
                    for &a in &consistent[i] {
                        row.insert(x_offset[i] + a);
                    }
                }
                for i in (0..r).filter(|i| h >> i & 1 == 1) {
                    row.insert(n_x + i);
                }
                rows.push(row);
                keys.push(ConceptKey {
                    inclusion,
                    seed: h as u64,
                    sigma: sigma.clone(),
                });
            }
        }
    }
    assemble(ReductionKind::Vc, l, prepared, kinds, rows, keys)
}

fn require_satisfying(l: &LabelCoverInstance, sigma_star: &PartialAssignment) -> Result<()> {
    sigma_star
        .validate(l)
        .map_err(|e| Error::Certificate(format!("invalid assignment: {e}")))?;
    if !sigma_star.is_total(l) {
        return Err(Error::Certificate("assignment is not total".into()));
    }
    let sat = labelcover::satisfied_edges(l, sigma_star)?;
    if sat != l.edges().len() {
        return Err(Error::Certificate(format!(
            "assignment satisfies {sat} of {} constraints",
            l.edges().len()
        )));
    }
    Ok(())
}

fn restrict_to(sigma: &PartialAssignment, vertices: &[usize]) -> Vec<Symbol> {
    vertices
        .iter()
        .map(|&v| sigma.get(v).expect("total assignment"))
        .collect()
}

fn position_of(out: &ReductionOutput, label: &str) -> Result<usize> {
    out.class
        .universe()
        .position(label)
        .ok_or_else(|| Error::Certificate(format!("element {label} missing from universe")))
}

fn concept_lookup(out: &ReductionOutput) -> HashMap<&str, usize> {
    out.meta
        .concept_labels
        .iter()
        .enumerate()
        .map(|(c, l)| (l.as_str(), c))
        .collect()
}

fn require_kind(out: &ReductionOutput, kind: ReductionKind) -> Result<()> {
    if out.kind() != kind {
        return Err(Error::Input(format!(
            "expected a {} reduction, found {}",
            kind.name(),
            out.kind().name()
        )));
    }
    Ok(())
}

/// `S_{σ*} = {x_{i,σ*|U_i}} ∪ Y`, listed block by block and then `y_0..`.
pub fn vc_completeness_certificate(
    out: &ReductionOutput,
    sigma_star: &PartialAssignment,
) -> Result<Vec<usize>> {
    require_kind(out, ReductionKind::Vc)?;
    require_satisfying(out.instance(), sigma_star)?;
    let q = out.instance().alphabet_size();
    let r = out.r();
    let mut set = Vec::with_capacity(2 * r);
    for (i, block) in out.partition().blocks.iter().enumerate() {
        let kind = ElementKind::Assignment {
            block: i,
            sigma: restrict_to(sigma_star, block),
            copy: None,
        };
        set.push(position_of(out, &element_label(&kind, q, r))?);
    }
    for i in 0..r {
        set.push(position_of(out, &format!("y:{i}"))?);
    }
    Ok(set)
}

/// The shattering witness for `S_{σ*}`: subset `S̃` maps to
/// `C_{I(S̃), S̃ ∩ Y, σ*|T}`.
pub fn vc_completeness_witness(
    out: &ReductionOutput,
    sigma_star: &PartialAssignment,
) -> Result<ShatterWitness> {
    let set = vc_completeness_certificate(out, sigma_star)?;
    let r = out.r();
    let q = out.instance().alphabet_size();
    let lookup = concept_lookup(out);
    let mut assignments = Vec::with_capacity(1 << set.len());
    for mask in 0..1u64 << set.len() {
        let inclusion = mask & ((1 << r) - 1);
        let seed = mask >> r;
        let key = ConceptKey {
            inclusion,
            seed,
            sigma: restrict_to(sigma_star, &out.plan().get(seed).tested),
        };
        let label = concept_label(&key, q, r);
        let c = *lookup
            .get(label.as_str())
            .ok_or_else(|| Error::Certificate(format!("concept {label} missing from class")))?;
        assignments.push(c);
    }
    Ok(ShatterWitness { set, assignments })
}

// ---- LS --------------------------------------------------------------------

/// `τ(H) = {i : |{j : (i, j) ∈ H}| ≥ k/2}`.
pub fn threshold_projection(h: &[(usize, usize)], r: usize, k: usize) -> Vec<usize> {
    let mut counts = vec![BTreeSet::new(); r];
    for &(i, j) in h {
        if i < r && j < k {
            counts[i].insert(j);
        }
    }
    (0..r).filter(|&i| 2 * counts[i].len() >= k).collect()
}

/// [`threshold_projection`] on bit masks, pair `(i, j)` at bit `i·k + j`.
pub fn tau_mask(h: u64, r: usize, k: usize) -> u64 {
    let row = (1u64 << k) - 1;
    (0..r)
        .filter(|&i| 2 * (h >> (i * k) & row).count_ones() as usize >= k)
        .fold(0, |m, i| m | 1 << i)
}

/// Label Cover to Littlestone's dimension.
///
/// Universe: `x_{i,σ_i,j}` (block, block assignment, copy), then
/// `y_{I,i,j}` for `I ⊆ [r]×[k]` ordered by `I`, `i`, `j`. Concept
/// `C_{I,H,σ}` uses the test plan of `τ(H)`; it contains `x_{i,σ_i,j}` iff
/// `(i, j) ∈ I` and `σ_i` agrees with `σ` on `N_i(M_{τ(H)}(i))`, and
/// `y_{I',i,j}` iff `(i, j) ∈ H` and `I' = I`.
pub fn ls_reduction(l: &LabelCoverInstance, params: &ReductionParams) -> Result<ReductionOutput> {
    let prepared = prepare(
        ReductionKind::Ls,
        l,
        params,
        |x, r, k| {
            let rk = r.checked_mul(k)?;
            let y = rk.checked_mul(1usize.checked_shl(rk as u32)?)?;
            x.checked_mul(k)?.checked_add(y)
        },
        "k * sum_i |Sigma|^|U_i| + rk * 2^rk",
    )?;
    let r = prepared.partition.r();
    let k = prepared.params.k;
    let rk = r * k;
    let n_x: usize = prepared.block_sigmas.iter().map(|s| s.len() * k).sum();
    let n_u = n_x + rk * (1 << rk);
    let listed: u128 = (0..1u64 << rk)
        .map(|h| prepared.sigmas[tau_mask(h, r, k) as usize].len() as u128)
        .sum();
    check_sizes(
        &prepared.params.caps,
        (1u128 << rk) * listed,
        format!("2^rk * sum_H #sigma_tau(H) = 2^{rk} * {listed}"),
        n_u,
    )?;

    let mut kinds = Vec::with_capacity(n_u);
    let mut x_offset = Vec::with_capacity(r);
    for (i, sigmas) in prepared.block_sigmas.iter().enumerate() {
        x_offset.push(kinds.len());
        for sigma in sigmas {
            for j in 0..k {
                kinds.push(ElementKind::Assignment {
                    block: i,
                    sigma: sigma.clone(),
                    copy: Some(j),
                });
            }
        }
    }
    for inclusion in 0..1u64 << rk {
        for i in 0..r {
            for j in 0..k {
                kinds.push(ElementKind::TestSelection {
                    block: i,
                    inclusion: Some(inclusion),
                    copy: Some(j),
                });
            }
        }
    }
    let y_pos = |inclusion: u64, p: usize| n_x + inclusion as usize * rk + p;

    let mut consistent_cache: HashMap<(u64, usize), Vec<Vec<usize>>> = HashMap::new();
    let mut rows = Vec::new();
    let mut keys = Vec::new();
    for h in 0..1u64 << rk {
        let seed_set = tau_mask(h, r, k);
        let test = prepared.plan.get(seed_set);
        for (s, sigma) in prepared.sigmas[seed_set as usize].iter().enumerate() {
            let consistent = consistent_cache.entry((seed_set, s)).or_insert_with(|| {
                consistent_assignments(&prepared.partition, test, sigma, &prepared.block_sigmas)
            });
            for inclusion in 0..1u64 << rk {
                let mut row = BitSet::new(n_u);
                for p in (0..rk).filter(|p| inclusion >> p & 1 == 1) {
                    let (i, j) = (p / k, p % k);
                    for &a in &consistent[i] {
                        row.insert(x_offset[i] + a * k + j);
                    }
                }
                for p in (0..rk).filter(|p| h >> p & 1 == 1) {
                    row.insert(y_pos(inclusion, p));
                }
                rows.push(row);
                keys.push(ConceptKey {
                    inclusion,
                    seed: h,
                    sigma: sigma.clone(),
                });
            }
        }
    }
    assemble(ReductionKind::Ls, l, prepared, kinds, rows, keys)
}

/// Depth-`2rk` mistake tree. Layer `i·k + j` holds `x_{i,σ*|U_i,j}`; layer
/// `rk + i·k + j` holds `y_{I,i,j}` where `I` is read off the first `rk`
/// answers on the path. The leaf with answers `(I, H)` is witnessed by
/// `C_{I,H,σ*}`.
pub fn ls_completeness_tree(
    out: &ReductionOutput,
    sigma_star: &PartialAssignment,
) -> Result<MistakeTree> {
    require_kind(out, ReductionKind::Ls)?;
    require_satisfying(out.instance(), sigma_star)?;
    let r = out.r();
    let k = out.k();
    let rk = r * k;
    let depth = 2 * rk;
    let cap = out.meta.params.caps.max_tree_depth;
    if depth > cap {
        return Err(Error::resource(
            "completeness tree",
            format!("depth 2rk = {depth}"),
            cap,
        ));
    }
    let q = out.instance().alphabet_size();

    let mut x_layer = Vec::with_capacity(rk);
    for p in 0..rk {
        let (i, j) = (p / k, p % k);
        let kind = ElementKind::Assignment {
            block: i,
            sigma: restrict_to(sigma_star, &out.partition().blocks[i]),
            copy: Some(j),
        };
        x_layer.push(position_of(out, &element_label(&kind, q, rk))?);
    }
    // Path bits are stored most significant first; the first `rk` answers
    // give `I` with answer `p` at bit `p`.
    let read_mask = |value: usize, len: usize, from: usize, count: usize| -> u64 {
        (0..count).fold(0u64, |m, p| {
            m | ((value >> (len - 1 - (from + p)) & 1) as u64) << p
        })
    };

    let mut nodes = Vec::with_capacity((1 << depth) - 1);
    for len in 0..depth {
        for value in 0..1usize << len {
            if let Some(&x) = x_layer.get(len) {
                nodes.push(x);
            } else {
                let p = len - rk;
                let inclusion = read_mask(value, len, 0, rk);
                let kind = ElementKind::TestSelection {
                    block: p / k,
                    inclusion: Some(inclusion),
                    copy: Some(p % k),
                };
                nodes.push(position_of(out, &element_label(&kind, q, rk))?);
            }
        }
    }

    let lookup = concept_lookup(out);
    let sigmas: Vec<Vec<Symbol>> = out
        .plan()
        .seed_sets
        .iter()
        .map(|t| restrict_to(sigma_star, &t.tested))
        .collect();
    let mut leaves = Vec::with_capacity(1 << depth);
    for value in 0..1usize << depth {
        let inclusion = read_mask(value, depth, 0, rk);
        let seed = read_mask(value, depth, rk, rk);
        let key = ConceptKey {
            inclusion,
            seed,
            sigma: sigmas[tau_mask(seed, r, k) as usize].clone(),
        };
        let label = concept_label(&key, q, rk);
        let c = *lookup
            .get(label.as_str())
            .ok_or_else(|| Error::Certificate(format!("concept {label} missing from class")))?;
        leaves.push(c);
    }
    MistakeTree::new(depth, nodes, leaves)
}
