//! Connectedness, edge-paths and the edge-path presentation of the
//! fundamental group of a poset, computed on the 2-skeleton of its nerve.

pub mod snf;
mod tietze;
pub mod words;

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::poset::Poset;
pub use tietze::{SimplifiedPresentation, TietzeBudget};
use words::{abelianize, free_reduce, letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomotopyError {
    #[error("poset is not pathwise connected")]
    NotConnected,
    #[error("paths have different endpoints")]
    DifferentEndpoints,
    #[error("invalid edge-path: {0}")]
    InvalidPath(String),
    #[error("element index {0} out of range")]
    UnknownElement(usize),
}

/// Whether the comparability graph (equivalently the undirected Hasse
/// diagram) is connected.
pub fn is_pathwise_connected(p: &Poset) -> bool {
    let n = p.len();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &w in p.upper_covers(v).iter().chain(p.lower_covers(v)) {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == n
}

/// Vertices, edges (strict comparable pairs) and triangles (strict 2-chains)
/// of the order complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NerveSkeleton {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub triangles: Vec<(usize, usize, usize)>,
}

pub fn nerve_two_skeleton(p: &Poset) -> NerveSkeleton {
    let edges = p.strict_pairs();
    let mut triangles = Vec::new();
    for a in 0..p.len() {
        for b in p.up_set(a) {
            if b == a {
                continue;
            }
            for c in p.up_set(b) {
                if c != b {
                    triangles.push((a, b, c));
                }
            }
        }
    }
    NerveSkeleton {
        vertices: p.len(),
        edges,
        triangles,
    }
}

/// An edge-path `a₁, o₁, a₂, …, oₙ, aₙ₊₁` with `aᵢ, aᵢ₊₁ <= oᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgePath {
    points: Vec<usize>,
}

impl EdgePath {
    pub fn new(p: &Poset, points: Vec<usize>) -> Result<Self, HomotopyError> {
        if points.len() % 2 == 0 {
            return Err(HomotopyError::InvalidPath(
                "an edge-path has an odd number of points".into(),
            ));
        }
        if let Some(&bad) = points.iter().find(|&&x| x >= p.len()) {
            return Err(HomotopyError::UnknownElement(bad));
        }
        for k in (1..points.len()).step_by(2) {
            let (a, o, b) = (points[k - 1], points[k], points[k + 1]);
            if !p.leq_idx(a, o) || !p.leq_idx(b, o) {
                return Err(HomotopyError::InvalidPath(format!(
                    "{} and {} are not both below {}",
                    p.label(a),
                    p.label(b),
                    p.label(o)
                )));
            }
        }
        Ok(EdgePath { points })
    }

    /// The constant path at `a`.
    pub fn constant(a: usize) -> Self {
        EdgePath { points: vec![a] }
    }

    /// Edge-path through a sequence of pairwise-consecutive comparable
    /// elements.
    pub fn from_chain(p: &Poset, chain: &[usize]) -> Result<Self, HomotopyError> {
        let first = *chain
            .first()
            .ok_or_else(|| HomotopyError::InvalidPath("empty chain".into()))?;
        let mut points = vec![first];
        for w in chain.windows(2) {
            let (x, y) = (w[0], w[1]);
            let top = if p.leq_idx(x, y) {
                y
            } else if p.leq_idx(y, x) {
                x
            } else {
                return Err(HomotopyError::InvalidPath(format!(
                    "{} and {} are not comparable",
                    p.label(x),
                    p.label(y)
                )));
            };
            points.push(top);
            points.push(y);
        }
        Self::new(p, points)
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn start(&self) -> usize {
        self.points[0]
    }

    pub fn end(&self) -> usize {
        *self.points.last().expect("nonempty")
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        EdgePath { points }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &EdgePath) -> Result<Self, HomotopyError> {
        if self.end() != next.start() {
            return Err(HomotopyError::DifferentEndpoints);
        }
        let mut points = self.points.clone();
        points.push(next.start()); // a degenerate step end <= end >= start
        points.extend_from_slice(&next.points);
        Ok(EdgePath { points })
    }
}

/// The edge-path presentation of π₁ at a base point.
///
/// Generators are the comparability edges outside a breadth-first spanning
/// tree; relators come from the triangles of the nerve.
#[derive(Debug, Clone)]
pub struct GroupPresentation {
    pub poset: Arc<Poset>,
    pub base: usize,
    /// Tree parent of every vertex (`usize::MAX` at the base).
    pub tree_parent: Vec<usize>,
    /// Non-tree comparability edges `(lower, upper)`.
    pub generators: Vec<(usize, usize)>,
    pub relators: Vec<Word>,
    gen_index: HashMap<(usize, usize), usize>,
}

/// Free rank and torsion coefficients of H₁.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct H1 {
    pub free_rank: usize,
    pub torsion: Vec<i64>,
}

impl H1 {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

/// Outcome of the homotopy decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum HomotopyVerdict {
    Homotopic,
    NotHomotopic,
    /// Abelian invariants agree but bounded rewriting did not finish.
    Undecided,
}

impl GroupPresentation {
    pub fn new(poset: Arc<Poset>, base: usize) -> Result<Self, HomotopyError> {
        let p = &*poset;
        if base >= p.len() {
            return Err(HomotopyError::UnknownElement(base));
        }
        if !is_pathwise_connected(p) {
            return Err(HomotopyError::NotConnected);
        }
        let n = p.len();
        // comparability neighbours in canonical label order
        let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (a, b) in p.strict_pairs() {
            nbrs[a].push(b);
            nbrs[b].push(a);
        }
        for list in nbrs.iter_mut() {
            list.sort_by(|&x, &y| p.label(x).cmp(p.label(y)));
        }
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        seen[base] = true;
        let mut queue = VecDeque::from([base]);
        while let Some(v) = queue.pop_front() {
            for &w in &nbrs[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        let is_tree = |a: usize, b: usize| parent[a] == b || parent[b] == a;
        let generators: Vec<(usize, usize)> = p
            .strict_pairs()
            .into_iter()
            .filter(|&(a, b)| !is_tree(a, b))
            .collect();
        let gen_index: HashMap<(usize, usize), usize> =
            generators.iter().enumerate().map(|(k, &e)| (e, k)).collect();
        let edge = |a: usize, b: usize| -> Option<i32> {
            gen_index.get(&(a, b)).map(|&g| letter(g, false))
        };
        let mut relators = Vec::new();
        for (a, b, c) in nerve_two_skeleton(p).triangles {
            // path a -> b -> c equals the edge a -> c
            let mut w: Word = Vec::with_capacity(3);
            w.extend(edge(a, b));
            w.extend(edge(b, c));
            w.extend(edge(a, c).map(|l| -l));
            if !free_reduce(&w).is_empty() {
                relators.push(w);
            }
        }
        Ok(GroupPresentation {
            poset,
            base,
            tree_parent: parent,
            generators,
            relators,
            gen_index,
        })
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// Letter for traversing the comparability edge `x -- y` from `x` to
    /// `y`; `None` for tree edges.
    pub fn edge_letter(&self, x: usize, y: usize) -> Option<i32> {
        if let Some(&g) = self.gen_index.get(&(x, y)) {
            Some(letter(g, false))
        } else {
            self.gen_index.get(&(y, x)).map(|&g| letter(g, true))
        }
    }

    /// Word of a walk whose consecutive vertices are comparable or equal.
    pub fn walk_word(&self, walk: &[usize]) -> Word {
        let w: Word = walk
            .windows(2)
            .filter(|s| s[0] != s[1])
            .filter_map(|s| self.edge_letter(s[0], s[1]))
            .collect();
        free_reduce(&w)
    }

    pub fn path_word(&self, path: &EdgePath) -> Word {
        self.walk_word(path.points())
    }

    /// Tree path from the base to `v` (inclusive at both ends).
    pub fn tree_path_from_base(&self, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut x = v;
        while self.tree_parent[x] != usize::MAX {
            x = self.tree_parent[x];
            path.push(x);
        }
        path.reverse();
        path
    }

    /// The based loop of generator `g`: tree path to its lower end, the
    /// edge, and the tree path back from its upper end.
    pub fn generator_loop(&self, g: usize) -> Vec<usize> {
        let (a, b) = self.generators[g];
        let mut walk = self.tree_path_from_base(a);
        let mut back = self.tree_path_from_base(b);
        back.reverse();
        walk.extend(back);
        walk
    }

    /// Abelianized relator matrix, one sparse row per relator.
    pub fn relator_matrix(&self) -> Vec<Vec<(usize, i64)>> {
        let ng = self.num_generators();
        self.relators
            .iter()
            .map(|r| {
                abelianize(r, ng)
                    .into_iter()
                    .enumerate()
                    .filter(|&(_, v)| v != 0)
                    .collect()
            })
            .collect()
    }

    /// Free rank and torsion of the abelianization.
    pub fn h1_invariants(&self) -> H1 {
        let factors = snf::invariant_factors(&self.relator_matrix(), self.num_generators());
        H1 {
            free_rank: self.num_generators() - factors.len(),
            torsion: factors.into_iter().filter(|&d| d > 1).collect(),
        }
    }

    pub fn simplify(&self, budget: TietzeBudget) -> SimplifiedPresentation {
        SimplifiedPresentation::from_presentation(self, budget)
    }

    /// Decide whether two edge-paths with common endpoints are homotopic.
    pub fn homotopy_reduce(
        &self,
        p1: &EdgePath,
        p2: &EdgePath,
        budget: TietzeBudget,
    ) -> Result<HomotopyVerdict, HomotopyError> {
        if p1.start() != p2.start() || p1.end() != p2.end() {
            return Err(HomotopyError::DifferentEndpoints);
        }
        let lp = p1.then(&p2.reversed())?;
        let w = self.path_word(&lp);
        if w.is_empty() {
            return Ok(HomotopyVerdict::Homotopic);
        }
        Ok(self.simplify(budget).decide(&w))
    }

    /// Human-readable labels of generators, e.g. `"a<b"`.
    pub fn generator_labels(&self) -> Vec<String> {
        self.generators
            .iter()
            .map(|&(a, b)| format!("{}<{}", self.poset.label(a), self.poset.label(b)))
            .collect()
    }

    /// Relators spelled with generator labels.
    pub fn relator_strings(&self) -> Vec<String> {
        let names = self.generator_labels();
        self.relators
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&l| {
                        let g = words::generator_of(l);
                        if l > 0 {
                            format!("[{}]", names[g])
                        } else {
                            format!("[{}]^-1", names[g])
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }
}

/// Number of elements on each side of the nerve, keyed by simplex dimension.
pub fn nerve_counts(p: &Poset) -> BTreeMap<usize, usize> {
    let s = nerve_two_skeleton(p);
    BTreeMap::from([(0, s.vertices), (1, s.edges.len()), (2, s.triangles.len())])
}
