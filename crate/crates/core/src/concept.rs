//! Universes, concepts and explicit concept classes.
//!
//! A [`ConceptClass`] is a binary membership matrix: one packed row per
//! concept, one column per universe element. Element positions are the
//! canonical handles everywhere; labels only matter for I/O.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// Ordered list of uniquely labelled elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl Universe {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() || label.chars().any(char::is_whitespace) {
                return Err(Error::Label(format!(
                    "element label {label:?} is empty or contains whitespace"
                )));
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::Label(format!("duplicate element label {label:?}")));
            }
        }
        Ok(Universe { labels, index })
    }

    /// Universe labelled `0..n`.
    pub fn numbered(n: usize) -> Self {
        Universe::new((0..n).map(|i| i.to_string())).expect("numeric labels are unique")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, position: usize) -> &str {
        &self.labels[position]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn check(&self, position: usize) -> Result<()> {
        if position < self.len() {
            Ok(())
        } else {
            Err(Error::Position {
                position,
                len: self.len(),
            })
        }
    }
}

/// Partial labelling `ρ` of universe elements, with distinct domain.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledAssignment {
    pairs: BTreeMap<usize, bool>,
}

impl LabeledAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fails if the same element appears twice.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, bool)>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (x, b) in pairs {
            if out.insert(x, b).is_some() {
                return Err(Error::Input(format!("element {x} labelled twice")));
            }
        }
        Ok(LabeledAssignment { pairs: out })
    }

    pub fn insert(&mut self, x: usize, b: bool) -> Result<()> {
        if self.pairs.insert(x, b).is_some() {
            return Err(Error::Input(format!("element {x} labelled twice")));
        }
        Ok(())
    }

    pub fn get(&self, x: usize) -> Option<bool> {
        self.pairs.get(&x).copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.pairs.iter().map(|(&x, &b)| (x, b))
    }
}

/// Certificate that `set` is shattered: `assignments[mask]` is a concept whose
/// trace on `set` is exactly the subset selected by `mask` (bit `t` of `mask`
/// stands for `set[t]`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShatterWitness {
    pub set: Vec<usize>,
    pub assignments: Vec<usize>,
}

impl ShatterWitness {
    /// Checks totality and that every mapped concept reproduces its key.
    pub fn is_valid(&self, class: &ConceptClass) -> bool {
        let s = self.set.len();
        if s >= usize::BITS as usize || self.assignments.len() != 1usize << s {
            return false;
        }
        if self.set.iter().any(|&x| x >= class.n_elements()) {
            return false;
        }
        let distinct: BTreeSet<_> = self.set.iter().collect();
        if distinct.len() != s {
            return false;
        }
        self.assignments.iter().enumerate().all(|(mask, &c)| {
            c < class.len()
                && self
                    .set
                    .iter()
                    .enumerate()
                    .all(|(t, &x)| class.contains(c, x) == (mask >> t & 1 == 1))
        })
    }
}

/// Duplicate rows found in a class: `(duplicate index, first occurrence)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DedupReport {
    pub distinct: usize,
    pub duplicates: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConceptClass {
    universe: Universe,
    rows: Vec<BitSet>,
    concept_labels: Option<Vec<String>>,
}

impl ConceptClass {
    /// Validating constructor from element labels and 0/1 rows.
    pub fn new<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        rows: &[Vec<bool>],
    ) -> Result<Self> {
        let universe = Universe::new(labels)?;
        let n = universe.len();
        let rows = rows
            .iter()
            .enumerate()
            .map(|(row, bits)| {
                if bits.len() != n {
                    Err(Error::DimensionMismatch {
                        row,
                        expected: n,
                        found: bits.len(),
                    })
                } else {
                    Ok(BitSet::from_bools(bits))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConceptClass {
            universe,
            rows,
            concept_labels: None,
        })
    }

    pub fn from_rows(universe: Universe, rows: Vec<BitSet>) -> Result<Self> {
        for (row, bits) in rows.iter().enumerate() {
            if bits.len() != universe.len() {
                return Err(Error::DimensionMismatch {
                    row,
                    expected: universe.len(),
                    found: bits.len(),
                });
            }
        }
        Ok(ConceptClass {
            universe,
            rows,
            concept_labels: None,
        })
    }

    pub fn with_concept_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.rows.len() {
            return Err(Error::Label(format!(
                "{} concept labels for {} concepts",
                labels.len(),
                self.rows.len()
            )));
        }
        self.concept_labels = Some(labels);
        Ok(self)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    /// Number of concepts (with multiplicity).
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_elements(&self) -> usize {
        self.universe.len()
    }

    pub fn row(&self, concept: usize) -> &BitSet {
        &self.rows[concept]
    }

    pub fn rows(&self) -> &[BitSet] {
        &self.rows
    }

    pub fn concept_labels(&self) -> Option<&[String]> {
        self.concept_labels.as_deref()
    }

    #[inline]
    pub fn contains(&self, concept: usize, element: usize) -> bool {
        self.rows[concept].contains(element)
    }

    /// Column view: for every element, the set of concepts containing it.
    pub fn columns(&self) -> Vec<BitSet> {
        let mut cols = vec![BitSet::new(self.len()); self.n_elements()];
        for (c, row) in self.rows.iter().enumerate() {
            for x in row.ones() {
                cols[x].insert(c);
            }
        }
        cols
    }

    pub fn duplicate_report(&self) -> DedupReport {
        let mut first: HashMap<&BitSet, usize> = HashMap::new();
        let mut duplicates = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            match first.get(row) {
                Some(&j) => duplicates.push((i, j)),
                None => {
                    first.insert(row, i);
                }
            }
        }
        DedupReport {
            distinct: first.len(),
            duplicates,
        }
    }

    /// Keeps the first occurrence of every distinct row. Returns the
    /// deduplicated class and, for each kept row, its original index.
    pub fn dedup(&self) -> (ConceptClass, Vec<usize>) {
        let mut seen = BTreeSet::new();
        let kept: Vec<usize> = (0..self.len())
            .filter(|&i| seen.insert(&self.rows[i]))
            .collect();
        (self.select(&kept), kept)
    }

    pub fn distinct_len(&self) -> usize {
        self.rows.iter().collect::<BTreeSet<_>>().len()
    }

    /// Subclass made of the given concept indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> ConceptClass {
        ConceptClass {
            universe: self.universe.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            concept_labels: self
                .concept_labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i].clone()).collect()),
        }
    }

    /// Same concepts traced onto the sub-universe `positions` (in that order).
    pub fn project(&self, positions: &[usize]) -> Result<ConceptClass> {
        self.check_distinct(positions)?;
        let universe = Universe::new(
            positions
                .iter()
                .map(|&x| self.universe.label(x).to_string()),
        )?;
        let rows = self
            .rows
            .iter()
            .map(|row| {
                BitSet::from_indices(
                    positions.len(),
                    (0..positions.len()).filter(|&t| row.contains(positions[t])),
                )
            })
            .collect();
        Ok(ConceptClass {
            universe,
            rows,
            concept_labels: self.concept_labels.clone(),
        })
    }

    pub fn restrict_indices(&self, x: usize, b: bool) -> Result<Vec<usize>> {
        self.universe.check(x)?;
        Ok((0..self.len())
            .filter(|&c| self.contains(c, x) == b)
            .collect())
    }

    /// `C[x → b]`: concepts whose bit at `x` equals `b`.
    pub fn restrict(&self, x: usize, b: bool) -> Result<ConceptClass> {
        Ok(self.select(&self.restrict_indices(x, b)?))
    }

    /// Distinct restrictions `C ∩ S`, as bit patterns in the order of `set`.
    pub fn trace(&self, set: &[usize]) -> Result<BTreeSet<Vec<bool>>> {
        self.check_distinct(set)?;
        Ok(self
            .rows
            .iter()
            .map(|row| set.iter().map(|&x| row.contains(x)).collect())
            .collect())
    }

    pub fn agreeing_indices(&self, rho: &LabeledAssignment) -> Result<Vec<usize>> {
        for (x, _) in rho.iter() {
            self.universe.check(x)?;
        }
        Ok((0..self.len())
            .filter(|&c| rho.iter().all(|(x, b)| self.contains(c, x) == b))
            .collect())
    }

    /// `C[ρ]`: concepts agreeing with every pair of `rho`.
    pub fn class_agreeing_with(&self, rho: &LabeledAssignment) -> Result<ConceptClass> {
        Ok(self.select(&self.agreeing_indices(rho)?))
    }

    pub(crate) fn check_distinct(&self, set: &[usize]) -> Result<()> {
        let mut seen = BTreeSet::new();
        for &x in set {
            self.universe.check(x)?;
            if !seen.insert(x) {
                return Err(Error::Input(format!(
                    "position {x} repeated in element set"
                )));
            }
        }
        Ok(())
    }

    // ---- I/O -------------------------------------------------------------

    /// Parses the bit-matrix text format:
    ///
    /// ```text
    /// n_elements n_concepts
    /// label_1 ... label_n
    /// 0101...      (one line per concept, n characters each)
    /// ```
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let parse_err = |line: usize, msg: String| Error::Parse {
            line: line + 1,
            msg,
        };

        let (ln, header) = lines
            .next()
            .ok_or_else(|| parse_err(0, "empty input".into()))?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        let [n, m] = dims.as_slice() else {
            return Err(parse_err(
                ln,
                format!("expected `n_elements n_concepts`, got {header:?}"),
            ));
        };
        let n: usize = n
            .parse()
            .map_err(|e| parse_err(ln, format!("n_elements: {e}")))?;
        let m: usize = m
            .parse()
            .map_err(|e| parse_err(ln, format!("n_concepts: {e}")))?;

        let (ln, label_line) = lines.next().unwrap_or((1, ""));
        let labels: Vec<&str> = label_line.split_whitespace().collect();
        if labels.len() != n {
            return Err(parse_err(
                ln,
                format!("expected {n} labels, found {}", labels.len()),
            ));
        }
        let universe = Universe::new(labels.iter().copied())?;

        let mut rows = Vec::with_capacity(m);
        for row in 0..m {
            let (ln, line) = lines.next().unwrap_or((row + 2, ""));
            let line = line.trim_end_matches('\r');
            if line.chars().count() != n {
                return Err(Error::DimensionMismatch {
                    row,
                    expected: n,
                    found: line.chars().count(),
                });
            }
            let mut bits = BitSet::new(n);
            for (x, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => bits.insert(x),
                    other => return Err(parse_err(ln, format!("unexpected character {other:?}"))),
                }
            }
            rows.push(bits);
        }
        if let Some((ln, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(parse_err(ln, format!("trailing content {extra:?}")));
        }
        ConceptClass::from_rows(universe, rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n_elements(), self.len());
        let _ = writeln!(out, "{}", self.universe.labels().join(" "));
        for row in &self.rows {
            let _ = writeln!(out, "{row}");
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ClassFile = serde_json::from_str(text)?;
        let rows = file
            .concepts
            .iter()
            .enumerate()
            .map(|(row, s)| {
                s.chars()
                    .map(|ch| match ch {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        other => Err(Error::Parse {
                            line: row + 1,
                            msg: format!("unexpected character {other:?} in concept {row}"),
                        }),
                    })
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let class = ConceptClass::new(file.elements, &rows)?;
        match file.concept_labels {
            Some(labels) => class.with_concept_labels(labels),
            None => Ok(class),
        }
    }

    pub fn to_json(&self) -> String {
        let file = ClassFile {
            elements: self.universe.labels().to_vec(),
            concepts: self.rows.iter().map(|r| r.to_string()).collect(),
            concept_labels: self.concept_labels.clone(),
        };
        serde_json::to_string_pretty(&file).expect("class serializes")
    }

    /// Reads a class file; `.json` selects the structured format, anything
    /// else the bit-matrix text format.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        if is_json(path) {
            Self::from_json(&text)
        } else {
            Self::from_text(&text)
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = if is_json(path) {
            self.to_json()
        } else {
            self.to_text()
        };
        fs::write(path, text)?;
        Ok(())
    }
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

#[derive(Serialize, Deserialize)]
struct ClassFile {
    elements: Vec<String>,
    concepts: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    concept_labels: Option<Vec<String>>,
}

pub fn make_class(element_labels: &[&str], rows: &[Vec<bool>]) -> Result<ConceptClass> {
    ConceptClass::new(element_labels.iter().copied(), rows)
}

pub fn restrict(class: &ConceptClass, x: usize, b: bool) -> Result<ConceptClass> {
    class.restrict(x, b)
}

pub fn trace(class: &ConceptClass, set: &[usize]) -> Result<BTreeSet<Vec<bool>>> {
    class.trace(set)
}

pub fn class_agreeing_with(class: &ConceptClass, rho: &LabeledAssignment) -> Result<ConceptClass> {
    class.class_agreeing_with(rho)
}

/// Standard families used in tests, examples and documentation.
pub mod families {
    use super::*;

    /// All `2^n` subsets of an `n`-element universe, concept `m` = bits of `m`.
    pub fn power_set(n: usize) -> ConceptClass {
        assert!(n < 24, "power set too large");
        let rows: Vec<Vec<bool>> = (0..1usize << n)
            .map(|m| (0..n).map(|x| m >> x & 1 == 1).collect())
            .collect();
        ConceptClass::new(Universe::numbered(n).labels().to_vec(), &rows).expect("well-formed")
    }

    /// Singletons `{x}` for every element.
    pub fn singletons(n: usize) -> ConceptClass {
        let rows: Vec<Vec<bool>> = (0..n).map(|c| (0..n).map(|x| x == c).collect()).collect();
        ConceptClass::new(Universe::numbered(n).labels().to_vec(), &rows).expect("well-formed")
    }

    /// Thresholds `{x ≤ t}` over elements `1..=n`, for `t = 0..=n`.
    pub fn thresholds(n: usize) -> ConceptClass {
        let labels: Vec<String> = (1..=n).map(|x| x.to_string()).collect();
        let rows: Vec<Vec<bool>> = (0..=n).map(|t| (1..=n).map(|x| x <= t).collect()).collect();
        ConceptClass::new(labels, &rows).expect("well-formed")
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn make_class_identity() {
        let c = make_class(&["a", "b"], &[bits("10"), bits("01")]).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.n_elements(), 2);
    }

    #[test]
    fn make_class_rejects_ragged_rows() {
        let err = make_class(&["a", "b"], &[bits("101")]).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                row: 0,
                expected: 2,
                found: 3
            }
        ));
    }

    #[test]
    fn make_class_rejects_duplicate_labels() {
        assert!(matches!(make_class(&["a", "a"], &[]), Err(Error::Label(_))));
    }

    #[test]
    fn power_set_has_eight_concepts() {
        let rows: Vec<Vec<bool>> = (0..8)
            .map(|m| (0..3).map(|x| m >> x & 1 == 1).collect())
            .collect();
        let c = make_class(&["a", "b", "c"], &rows).unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!(c.duplicate_report().duplicates, vec![]);
    }

    #[test]
    fn duplicates_are_reported_not_rejected() {
        let c = make_class(&["a"], &[bits("1"), bits("0"), bits("1")]).unwrap();
        let report = c.duplicate_report();
        assert_eq!(report.distinct, 2);
        assert_eq!(report.duplicates, vec![(2, 0)]);
        let (d, kept) = c.dedup();
        assert_eq!(d.len(), 2);
        assert_eq!(kept, vec![0, 1]);
    }

    #[test]
    fn restrict_examples() {
        let p = power_set(2);
        assert_eq!(p.restrict(0, true).unwrap().len(), 2);

        let s = singletons(3);
        let r = s.restrict(0, true).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.row(0).to_string(), "100");

        let all_b = make_class(&["a", "b"], &[bits("01"), bits("11")]).unwrap();
        assert!(all_b.restrict(1, false).unwrap().is_empty());

        assert!(matches!(
            s.restrict(3, true),
            Err(Error::Position {
                position: 3,
                len: 3
            })
        ));
    }

    #[test]
    fn trace_examples() {
        assert_eq!(power_set(3).trace(&[0, 2]).unwrap().len(), 4);
        let t = singletons(3).trace(&[0, 1]).unwrap();
        let expected: BTreeSet<Vec<bool>> =
            [bits("10"), bits("01"), bits("00")].into_iter().collect();
        assert_eq!(t, expected);
        let empty = power_set(3).trace(&[]).unwrap();
        assert_eq!(empty.len(), 1);
        assert!(empty.contains(&vec![]));
        assert!(matches!(power_set(3).trace(&[1, 1]), Err(Error::Input(_))));
    }

    #[test]
    fn agreeing_with_examples() {
        let p = power_set(2);
        assert_eq!(p.class_agreeing_with(&LabeledAssignment::new()).unwrap(), p);
        let rho = LabeledAssignment::from_pairs([(0, true)]).unwrap();
        assert_eq!(p.class_agreeing_with(&rho).unwrap().len(), 2);
        assert!(LabeledAssignment::from_pairs([(0, true), (0, false)]).is_err());
        let bad = LabeledAssignment::from_pairs([(5, true)]).unwrap();
        assert!(matches!(
            p.class_agreeing_with(&bad),
            Err(Error::Position { .. })
        ));
    }

    #[test]
    fn text_format_parses_and_writes() {
        let text = "3 2\na b c\n101\n010\n";
        let c = ConceptClass::from_text(text).unwrap();
        assert_eq!(c.to_text(), text);
        assert_eq!(ConceptClass::from_json(&c.to_json()).unwrap(), c);

        assert!(matches!(
            ConceptClass::from_text("2 1\na b\n101\n"),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            ConceptClass::from_text("2 1\na b\n1x\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            ConceptClass::from_text("2 1\na\n10\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn empty_universe_round_trips() {
        let c = make_class(&[], &[vec![], vec![]]).unwrap();
        let back = ConceptClass::from_text(&c.to_text()).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back.n_elements(), 0);
    }

    #[test]
    fn project_traces_rows() {
        let t = thresholds(3);
        let p = t.project(&[2, 0]).unwrap();
        assert_eq!(p.universe().labels(), &["3".to_string(), "1".to_string()]);
        assert_eq!(p.row(3).to_string(), "11");
        assert_eq!(p.row(1).to_string(), "01");
    }

    #[test]
    fn witness_validation() {
        let p = power_set(2);
        let w = ShatterWitness {
            set: vec![0, 1],
            assignments: vec![0, 1, 2, 3],
        };
        assert!(w.is_valid(&p));
        let bad = ShatterWitness {
            set: vec![0, 1],
            assignments: vec![0, 2, 1, 3],
        };
        assert!(!bad.is_valid(&p));
    }
}
