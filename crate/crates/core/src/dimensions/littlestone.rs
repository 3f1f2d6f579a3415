use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::concept::ConceptClass;
use crate::error::{Error, Result};

use super::{floor_log2, Dimension};

/// Depth-`d` instance-labelled full binary tree with a witness concept per
/// leaf.
///
/// Nodes are stored in heap order: the node reached by path `s` (a bit
/// string, `true` = "element is in the concept") sits at index
/// `2^|s| - 1 + value(s)` with the first step as the most significant bit.
/// Leaves use the same convention relative to `2^d - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MistakeTree {
    depth: usize,
    node_elements: Vec<usize>,
    leaf_witnesses: Vec<usize>,
}

impl MistakeTree {
    /// Checks that the tree is full: `2^d - 1` nodes and `2^d` leaves.
    pub fn new(
        depth: usize,
        node_elements: Vec<usize>,
        leaf_witnesses: Vec<usize>,
    ) -> Result<Self> {
        let tree = MistakeTree {
            depth,
            node_elements,
            leaf_witnesses,
        };
        tree.check_shape()?;
        Ok(tree)
    }

    fn check_shape(&self) -> Result<()> {
        if self.depth >= usize::BITS as usize - 1 {
            return Err(Error::Validation(format!(
                "tree depth {} too large",
                self.depth
            )));
        }
        let leaves = 1usize << self.depth;
        if self.node_elements.len() != leaves - 1 || self.leaf_witnesses.len() != leaves {
            return Err(Error::Validation(format!(
                "depth-{} tree needs {} nodes and {} leaves, has {} and {}",
                self.depth,
                leaves - 1,
                leaves,
                self.node_elements.len(),
                self.leaf_witnesses.len()
            )));
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn node_elements(&self) -> &[usize] {
        &self.node_elements
    }

    pub fn leaf_witnesses(&self) -> &[usize] {
        &self.leaf_witnesses
    }

    pub fn node_index(path: &[bool]) -> usize {
        (1usize << path.len()) - 1 + bits_value(path)
    }

    /// Element `v_s` at internal node `s`.
    pub fn element(&self, path: &[bool]) -> usize {
        assert!(path.len() < self.depth);
        self.node_elements[Self::node_index(path)]
    }

    pub fn witness(&self, leaf: &[bool]) -> usize {
        assert_eq!(leaf.len(), self.depth);
        self.leaf_witnesses[bits_value(leaf)]
    }

    /// Labelled path `ρ_s` from the root to `s` (excluding `s` itself).
    pub fn path_labels(&self, path: &[bool]) -> Vec<(usize, bool)> {
        (0..path.len())
            .map(|i| (self.element(&path[..i]), path[i]))
            .collect()
    }

    /// All leaf paths, in leaf-index order.
    pub fn leaves(&self) -> impl Iterator<Item = Vec<bool>> + '_ {
        (0..1usize << self.depth).map(move |v| value_bits(v, self.depth))
    }
}

fn bits_value(path: &[bool]) -> usize {
    path.iter().fold(0, |v, &b| v << 1 | b as usize)
}

fn value_bits(v: usize, len: usize) -> Vec<bool> {
    (0..len).map(|i| v >> (len - 1 - i) & 1 == 1).collect()
}

/// Memoized decision procedure for Littlestone's dimension over the distinct
/// concepts of a class.
///
/// Version spaces are bitsets over distinct concepts. The memo stores, per
/// version space, the tightest proven bounds `LS ≤ a` and `LS > b`, so answers
/// for one `d` are reused for every other `d`.
pub struct LsSolver {
    columns: Vec<BitSet>,
    representative: Vec<usize>,
    distinct_of: Vec<usize>,
    memo: HashMap<BitSet, Bounds>,
    nodes: u64,
}

#[derive(Clone, Copy, Default)]
struct Bounds {
    at_most: Option<usize>,
    exceeds: Option<usize>,
}

impl LsSolver {
    pub fn new(class: &ConceptClass) -> Self {
        let (distinct, kept) = class.dedup();
        let mut id_of: HashMap<&BitSet, usize> = HashMap::new();
        for (id, row) in distinct.rows().iter().enumerate() {
            id_of.insert(row, id);
        }
        let distinct_of = class.rows().iter().map(|r| id_of[r]).collect();
        LsSolver {
            columns: distinct.columns(),
            representative: kept,
            distinct_of,
            memo: HashMap::new(),
            nodes: 0,
        }
    }

    pub fn n_distinct(&self) -> usize {
        self.representative.len()
    }

    /// Every distinct concept.
    pub fn all(&self) -> BitSet {
        BitSet::full(self.n_distinct())
    }

    /// Version space spanned by the given original concept indices.
    pub fn live_from_indices(&self, indices: &[usize]) -> BitSet {
        BitSet::from_indices(
            self.n_distinct(),
            indices.iter().map(|&c| self.distinct_of[c]),
        )
    }

    /// `(C[x → 0], C[x → 1])`.
    pub fn split(&self, live: &BitSet, x: usize) -> (BitSet, BitSet) {
        (
            live.difference(&self.columns[x]),
            live.intersection(&self.columns[x]),
        )
    }

    /// Recursive calls made so far, memo hits included.
    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    pub fn reset_counters(&mut self) {
        self.nodes = 0;
    }

    /// Decides `LS(live) ≤ d`.
    ///
    /// An element that lies in some but not all live concepts can root a tree
    /// of depth `1 + min(LS(C[x→0]), LS(C[x→1]))`; the answer is NO exactly
    /// when some such element has both restrictions answering NO at `d - 1`.
    pub fn at_most(&mut self, live: &BitSet, d: usize) -> bool {
        self.nodes += 1;
        if live.count() <= 1 {
            return true;
        }
        if d == 0 {
            return false;
        }
        if let Some(bounds) = self.memo.get(live) {
            if bounds.at_most.is_some_and(|a| a <= d) {
                return true;
            }
            if bounds.exceeds.is_some_and(|b| b >= d) {
                return false;
            }
        }
        let mut answer = true;
        for x in 0..self.columns.len() {
            let (without, with) = self.split(live, x);
            if without.is_empty() || with.is_empty() {
                continue;
            }
            if !self.at_most(&without, d - 1) && !self.at_most(&with, d - 1) {
                answer = false;
                break;
            }
        }
        let bounds = self.memo.entry(live.clone()).or_default();
        if answer {
            bounds.at_most = Some(bounds.at_most.map_or(d, |a| a.min(d)));
        } else {
            bounds.exceeds = Some(bounds.exceeds.map_or(d, |b| b.max(d)));
        }
        answer
    }

    /// Exact `LS(live)`; `None` for an empty version space.
    pub fn dimension(&mut self, live: &BitSet) -> Option<usize> {
        if live.is_empty() {
            return None;
        }
        let cap = floor_log2(live.count());
        (0..=cap).find(|&d| self.at_most(live, d)).or(Some(cap))
    }

    /// Builds a depth-`depth` mistake tree for `live`. Requires
    /// `LS(live) ≥ depth`. Roots are chosen as the lowest element position
    /// whose two restrictions both keep dimension `≥ depth - 1`.
    pub fn tree(&mut self, live: &BitSet, depth: usize) -> MistakeTree {
        let leaves = 1usize << depth;
        let mut nodes = vec![usize::MAX; leaves - 1];
        let mut witnesses = vec![usize::MAX; leaves];
        self.fill(live, depth, 0, 0, &mut nodes, &mut witnesses);
        MistakeTree {
            depth,
            node_elements: nodes,
            leaf_witnesses: witnesses,
        }
    }

    fn fill(
        &mut self,
        live: &BitSet,
        depth: usize,
        level: usize,
        offset: usize,
        nodes: &mut [usize],
        leaves: &mut [usize],
    ) {
        if depth == 0 {
            let id = live.first().expect("nonempty version space");
            leaves[offset] = self.representative[id];
            return;
        }
        let root = (0..self.columns.len())
            .find(|&x| {
                let (without, with) = self.split(live, x);
                if without.is_empty() || with.is_empty() {
                    return false;
                }
                depth == 1
                    || (!self.at_most(&without, depth - 2) && !self.at_most(&with, depth - 2))
            })
            .expect("version space has the requested dimension");
        nodes[(1usize << level) - 1 + offset] = root;
        let (without, with) = self.split(live, root);
        self.fill(&without, depth - 1, level + 1, offset << 1, nodes, leaves);
        self.fill(&with, depth - 1, level + 1, offset << 1 | 1, nodes, leaves);
    }
}

/// Decides whether `LS(class) ≤ d`.
pub fn ls_at_most(class: &ConceptClass, d: usize) -> bool {
    ls_at_most_counted(class, d).0
}

/// Like [`ls_at_most`], also returning the number of recursive calls made by
/// a fresh solver.
pub fn ls_at_most_counted(class: &ConceptClass, d: usize) -> (bool, u64) {
    let mut solver = LsSolver::new(class);
    let all = solver.all();
    let answer = solver.at_most(&all, d);
    (answer, solver.nodes())
}

/// Exact Littlestone's dimension with a maximum-depth mistake tree.
pub fn ls_dimension(class: &ConceptClass) -> Dimension<MistakeTree> {
    if class.is_empty() {
        return Dimension::Undefined;
    }
    let mut solver = LsSolver::new(class);
    let all = solver.all();
    let value = solver.dimension(&all).expect("nonempty");
    let tree = solver.tree(&all, value);
    Dimension::Defined {
        value,
        certificate: tree,
    }
}

/// True iff every leaf witness agrees with its root-to-leaf path.
pub fn verify_mistake_tree(class: &ConceptClass, tree: &MistakeTree) -> Result<bool> {
    tree.check_shape()?;
    if let Some(&x) = tree
        .node_elements
        .iter()
        .find(|&&x| x >= class.n_elements())
    {
        return Err(Error::Validation(format!(
            "node element {x} outside universe of size {}",
            class.n_elements()
        )));
    }
    if let Some(&c) = tree.leaf_witnesses.iter().find(|&&c| c >= class.len()) {
        return Err(Error::Validation(format!(
            "leaf witness {c} outside class of size {}",
            class.len()
        )));
    }
    Ok(tree.leaves().all(|leaf| {
        let witness = tree.witness(&leaf);
        tree.path_labels(&leaf)
            .into_iter()
            .all(|(x, b)| class.contains(witness, x) == b)
    }))
}
