//! Finite posets stored as Hasse data, their morphisms, disjointness
//! relations and finite symmetry actions.

mod action;
mod bitset;
mod morphism;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::OnceLock;

use thiserror::Error;

use crate::report::{Check, Report};
pub(crate) use bitset::BitSet;

pub use action::{FiniteGroup, GroupAction};
pub use morphism::{Disjointness, PosetMorphism};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("empty poset")]
    Empty,
    #[error("duplicate element label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("cover digraph has a cycle through {0:?}")]
    CycleDetected(Vec<String>),
    #[error("cover ({lo:?}, {hi:?}) is implied by transitivity")]
    RedundantCover { lo: String, hi: String },
    #[error("relation is not antisymmetric on ({0:?}, {1:?})")]
    NotAntisymmetric(String, String),
    #[error("map is not order preserving on ({lo:?}, {hi:?})")]
    NotOrderPreserving { lo: String, hi: String },
    #[error("morphisms are not composable")]
    NotComposable,
    #[error("map has wrong length: expected {expected}, got {got}")]
    BadMapLength { expected: usize, got: usize },
    #[error("disjointness is not symmetric on ({0:?}, {1:?})")]
    NotSymmetric(String, String),
    #[error("downward stability violated: {upper:?} ⊥ {other:?} and {lower:?} <= {upper:?} but not {lower:?} ⊥ {other:?}")]
    DownwardStabilityViolated {
        lower: String,
        upper: String,
        other: String,
    },
    #[error("group element {element} does not act as an automorphism: {detail}")]
    NotAutomorphism { element: usize, detail: String },
    #[error("group table inconsistent: {0}")]
    TableInconsistent(String),
}

/// A finite poset given by its cover relation.
///
/// The full order is the reflexive-transitive closure of the covers and is
/// computed lazily on first use.
#[derive(Debug, Clone)]
pub struct Poset {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    covers: Vec<(usize, usize)>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    reach: OnceLock<Vec<BitSet>>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.covers == other.covers
    }
}

impl Poset {
    /// Build from labels and cover pairs `(lower, upper)` given by label.
    pub fn new<S: AsRef<str>>(
        labels: Vec<String>,
        covers: &[(S, S)],
    ) -> Result<Self, PosetError> {
        let index = Self::index_labels(&labels)?;
        let mut idx_covers = Vec::with_capacity(covers.len());
        for (lo, hi) in covers {
            let lo = *index
                .get(lo.as_ref())
                .ok_or_else(|| PosetError::UnknownElement(lo.as_ref().to_string()))?;
            let hi = *index
                .get(hi.as_ref())
                .ok_or_else(|| PosetError::UnknownElement(hi.as_ref().to_string()))?;
            idx_covers.push((lo, hi));
        }
        Ok(Self::assemble(labels, index, idx_covers))
    }

    /// Build from labels and cover pairs given by index.
    pub fn from_indices(
        labels: Vec<String>,
        covers: Vec<(usize, usize)>,
    ) -> Result<Self, PosetError> {
        let index = Self::index_labels(&labels)?;
        if let Some(&(a, b)) = covers
            .iter()
            .find(|(a, b)| *a >= labels.len() || *b >= labels.len())
        {
            return Err(PosetError::UnknownElement(format!("#{}", a.max(b))));
        }
        Ok(Self::assemble(labels, index, covers))
    }

    /// Build from a full order relation by transitive reduction.
    ///
    /// `leq` must be reflexive, antisymmetric and transitive; antisymmetry is
    /// checked.
    pub fn from_order<F>(labels: Vec<String>, leq: F) -> Result<Self, PosetError>
    where
        F: Fn(usize, usize) -> bool,
    {
        let n = labels.len();
        let mut rel = vec![BitSet::new(n); n];
        for (i, row) in rel.iter_mut().enumerate() {
            for j in 0..n {
                if i != j && leq(i, j) {
                    row.insert(j);
                }
            }
        }
        for i in 0..n {
            for j in rel[i].iter() {
                if rel[j].contains(i) {
                    return Err(PosetError::NotAntisymmetric(
                        labels[i].clone(),
                        labels[j].clone(),
                    ));
                }
            }
        }
        let mut covers = Vec::new();
        for i in 0..n {
            let above: Vec<usize> = rel[i].iter().collect();
            for &j in &above {
                let between = above.iter().any(|&k| k != j && rel[k].contains(j));
                if !between {
                    covers.push((i, j));
                }
            }
        }
        Self::from_indices(labels, covers)
    }

    fn index_labels(labels: &[String]) -> Result<HashMap<String, usize>, PosetError> {
        if labels.is_empty() {
            return Err(PosetError::Empty);
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(PosetError::DuplicateLabel(l.clone()));
            }
        }
        Ok(index)
    }

    fn assemble(
        labels: Vec<String>,
        index: HashMap<String, usize>,
        mut covers: Vec<(usize, usize)>,
    ) -> Self {
        covers.sort_unstable();
        covers.dedup();
        let n = labels.len();
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        for &(a, b) in &covers {
            up[a].push(b);
            down[b].push(a);
        }
        Poset {
            labels,
            index,
            covers,
            up,
            down,
            reach: OnceLock::new(),
        }
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

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, PosetError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| PosetError::UnknownElement(label.to_string()))
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn is_cover(&self, lo: usize, hi: usize) -> bool {
        self.covers.binary_search(&(lo, hi)).is_ok()
    }

    pub fn upper_covers(&self, i: usize) -> &[usize] {
        &self.up[i]
    }

    pub fn lower_covers(&self, i: usize) -> &[usize] {
        &self.down[i]
    }

    fn reach(&self) -> &[BitSet] {
        self.reach.get_or_init(|| {
            let n = self.len();
            let mut reach: Vec<Option<BitSet>> = vec![None; n];
            // iterative post-order DFS; a node still on the stack is treated
            // as already visited so cyclic input terminates
            let mut on_stack = vec![false; n];
            for root in 0..n {
                if reach[root].is_some() {
                    continue;
                }
                let mut stack = vec![(root, 0usize)];
                on_stack[root] = true;
                while let Some(&mut (v, ref mut k)) = stack.last_mut() {
                    if *k < self.up[v].len() {
                        let w = self.up[v][*k];
                        *k += 1;
                        if reach[w].is_none() && !on_stack[w] {
                            on_stack[w] = true;
                            stack.push((w, 0));
                        }
                    } else {
                        let mut set = BitSet::new(n);
                        set.insert(v);
                        for &w in &self.up[v] {
                            if let Some(r) = &reach[w] {
                                set.union_with(r);
                            } else {
                                set.insert(w);
                            }
                        }
                        reach[v] = Some(set);
                        on_stack[v] = false;
                        stack.pop();
                    }
                }
            }
            reach.into_iter().map(|r| r.expect("all visited")).collect()
        })
    }

    /// `a <= b` by index.
    #[inline]
    pub fn leq_idx(&self, a: usize, b: usize) -> bool {
        self.reach()[a].contains(b)
    }

    #[inline]
    pub fn lt_idx(&self, a: usize, b: usize) -> bool {
        a != b && self.leq_idx(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq_idx(a, b) || self.leq_idx(b, a)
    }

    /// `a <= b` by label.
    pub fn leq(&self, a: &str, b: &str) -> Result<bool, PosetError> {
        Ok(self.leq_idx(self.index_of(a)?, self.index_of(b)?))
    }

    /// Elements `>= a`, including `a`.
    pub fn up_set(&self, a: usize) -> Vec<usize> {
        self.reach()[a].iter().collect()
    }

    /// All strictly comparable pairs `(a, b)` with `a < b`, sorted.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|a| {
                self.reach()[a]
                    .iter()
                    .filter(move |&b| b != a)
                    .map(move |b| (a, b))
            })
            .collect()
    }

    pub fn maximal(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.up[i].is_empty()).collect()
    }

    pub fn minimal(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.down[i].is_empty()).collect()
    }

    /// Whether every pair in `subset` has an upper bound inside `subset`.
    pub fn is_upward_directed(&self, subset: &[usize]) -> bool {
        let members: BTreeSet<usize> = subset.iter().copied().collect();
        let members: Vec<usize> = members.into_iter().collect();
        for (k, &a) in members.iter().enumerate() {
            for &b in &members[k + 1..] {
                let bounded = members
                    .iter()
                    .any(|&c| self.leq_idx(a, c) && self.leq_idx(b, c));
                if !bounded {
                    return false;
                }
            }
        }
        true
    }

    /// Elements in a linear extension of the order (Kahn); `None` on a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut indeg: Vec<usize> = self.down.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &self.up[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    fn find_cycle(&self) -> Option<Vec<usize>> {
        // colour DFS; returns the vertices of one cycle
        let n = self.len();
        let mut colour = vec![0u8; n];
        let mut parent = vec![usize::MAX; n];
        for root in 0..n {
            if colour[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            colour[root] = 1;
            while let Some(&mut (v, ref mut k)) = stack.last_mut() {
                if *k < self.up[v].len() {
                    let w = self.up[v][*k];
                    *k += 1;
                    match colour[w] {
                        0 => {
                            colour[w] = 1;
                            parent[w] = v;
                            stack.push((w, 0));
                        }
                        1 => {
                            let mut cycle = vec![w];
                            let mut x = v;
                            while x != w {
                                cycle.push(x);
                                x = parent[x];
                            }
                            cycle.reverse();
                            return Some(cycle);
                        }
                        _ => {}
                    }
                } else {
                    colour[v] = 2;
                    stack.pop();
                }
            }
        }
        None
    }

    /// Check that the covers form an acyclic, transitively reduced digraph.
    pub fn validate(&self) -> Report<PosetError> {
        let mut report = Report::new();
        let cycle = self.find_cycle();
        report.push_check(Check::exact("acyclic", cycle.is_none()));
        if let Some(c) = cycle {
            report.push_violation(PosetError::CycleDetected(
                c.into_iter().map(|i| self.labels[i].clone()).collect(),
            ));
            return report;
        }
        let mut reduced = true;
        for &(a, b) in &self.covers {
            let implied = self.up[a]
                .iter()
                .any(|&c| c != b && self.leq_idx(c, b));
            if implied {
                reduced = false;
                report.push_violation(PosetError::RedundantCover {
                    lo: self.labels[a].clone(),
                    hi: self.labels[b].clone(),
                });
            }
        }
        report.push_check(Check::exact("transitively reduced", reduced));
        report
    }

    /// The induced subposet on `subset` (order restricted, then reduced).
    pub fn subposet(&self, subset: &[usize]) -> Result<(Poset, Vec<usize>), PosetError> {
        let members: Vec<usize> = subset
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let labels = members.iter().map(|&i| self.labels[i].clone()).collect();
        let sub = Poset::from_order(labels, |a, b| self.leq_idx(members[a], members[b]))?;
        Ok((sub, members))
    }

    /// Graphviz rendering: one node per element, one edge per cover.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph poset {\n");
        for l in &self.labels {
            let _ = writeln!(out, "  {};", dot_quote(l));
        }
        for &(a, b) in &self.covers {
            let _ = writeln!(
                out,
                "  {} -> {};",
                dot_quote(&self.labels[a]),
                dot_quote(&self.labels[b])
            );
        }
        out.push_str("}\n");
        out
    }
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn chain3() -> Poset {
        Poset::new(labels(&["1", "2", "3"]), &[("1", "2"), ("2", "3")]).unwrap()
    }

    #[test]
    fn chain_validates() {
        let p = chain3();
        assert!(p.validate().passed());
        assert!(p.leq("1", "3").unwrap());
        assert!(!p.leq("3", "1").unwrap());
        assert!(p.leq("2", "2").unwrap());
        assert!(p.is_upward_directed(&[0, 1, 2]));
    }

    #[test]
    fn two_cycle_is_detected() {
        let p = Poset::new(labels(&["1", "2"]), &[("1", "2"), ("2", "1")]).unwrap();
        let r = p.validate();
        assert!(matches!(
            r.violations.as_slice(),
            [PosetError::CycleDetected(_)]
        ));
    }

    #[test]
    fn redundant_cover_is_reported() {
        let p = Poset::new(
            labels(&["1", "2", "3"]),
            &[("1", "2"), ("2", "3"), ("1", "3")],
        )
        .unwrap();
        let r = p.validate();
        assert_eq!(
            r.violations,
            vec![PosetError::RedundantCover {
                lo: "1".into(),
                hi: "3".into()
            }]
        );
    }

    #[test]
    fn unknown_and_empty_are_rejected() {
        assert_eq!(
            Poset::new::<&str>(vec![], &[]).unwrap_err(),
            PosetError::Empty
        );
        assert!(matches!(
            chain3().leq("1", "9"),
            Err(PosetError::UnknownElement(_))
        ));
        assert!(matches!(
            Poset::new(labels(&["a", "a"]), &[] as &[(&str, &str)]),
            Err(PosetError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn incomparable_maxima_not_directed() {
        let p = Poset::new(labels(&["b", "x", "y"]), &[("b", "x"), ("b", "y")]).unwrap();
        assert!(!p.is_upward_directed(&[0, 1, 2]));
        assert!(p.is_upward_directed(&[0, 1]));
        assert_eq!(p.maximal(), vec![1, 2]);
        assert_eq!(p.minimal(), vec![0]);
    }

    #[test]
    fn from_order_reduces() {
        // divisibility on 1..=6
        let ls: Vec<String> = (1..=6).map(|i| i.to_string()).collect();
        let p = Poset::from_order(ls, |a, b| (b + 1) % (a + 1) == 0).unwrap();
        assert!(p.validate().passed());
        assert!(p.is_cover(0, 1)); // 1 | 2
        assert!(!p.is_cover(0, 3)); // 1 | 4 through 2
        assert!(p.is_cover(1, 3)); // 2 | 4
        assert!(p.leq_idx(0, 5));
    }

    #[test]
    fn dot_has_one_edge_per_cover() {
        let dot = chain3().to_dot();
        assert_eq!(dot.matches("->").count(), 2);
        assert!(dot.contains("\"1\" -> \"2\""));
    }
}
