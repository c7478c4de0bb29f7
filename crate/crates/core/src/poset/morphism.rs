use std::collections::BTreeSet;
use std::sync::Arc;

use super::{Poset, PosetError};
use crate::report::{Check, Report};

/// An element-to-element map between two posets.
#[derive(Debug, Clone)]
pub struct PosetMorphism {
    pub source: Arc<Poset>,
    pub target: Arc<Poset>,
    pub map: Vec<usize>,
}

impl PosetMorphism {
    pub fn new(
        source: Arc<Poset>,
        target: Arc<Poset>,
        map: Vec<usize>,
    ) -> Result<Self, PosetError> {
        if map.len() != source.len() {
            return Err(PosetError::BadMapLength {
                expected: source.len(),
                got: map.len(),
            });
        }
        if let Some(&bad) = map.iter().find(|&&m| m >= target.len()) {
            return Err(PosetError::UnknownElement(format!("#{bad}")));
        }
        Ok(PosetMorphism {
            source,
            target,
            map,
        })
    }

    pub fn identity(p: Arc<Poset>) -> Self {
        let map = (0..p.len()).collect();
        PosetMorphism {
            source: p.clone(),
            target: p,
            map,
        }
    }

    /// Build from a label-to-label function.
    pub fn from_labels<F>(
        source: Arc<Poset>,
        target: Arc<Poset>,
        f: F,
    ) -> Result<Self, PosetError>
    where
        F: Fn(&str) -> String,
    {
        let map = source
            .labels()
            .iter()
            .map(|l| target.index_of(&f(l)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(source, target, map)
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    /// Order preservation, checked on covers (enough by transitivity).
    pub fn validate(&self) -> Report<PosetError> {
        let mut report = Report::new();
        let mut ok = true;
        for &(a, b) in self.source.covers() {
            if !self.target.leq_idx(self.map[a], self.map[b]) {
                ok = false;
                report.push_violation(PosetError::NotOrderPreserving {
                    lo: self.source.label(a).to_string(),
                    hi: self.source.label(b).to_string(),
                });
            }
        }
        report.push_check(Check::exact("order preserving", ok));
        report
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &PosetMorphism) -> Result<PosetMorphism, PosetError> {
        if *first.target != *self.source {
            return Err(PosetError::NotComposable);
        }
        Ok(PosetMorphism {
            source: first.source.clone(),
            target: self.target.clone(),
            map: first.map.iter().map(|&i| self.map[i]).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        let image: BTreeSet<usize> = self.map.iter().copied().collect();
        image.len() == self.map.len()
    }

    /// Bijective with order-reflecting inverse.
    pub fn is_isomorphism(&self) -> bool {
        self.source.len() == self.target.len()
            && self.is_injective()
            && self.validate().passed()
            && self.inverse().is_some_and(|inv| inv.validate().passed())
    }

    pub fn inverse(&self) -> Option<PosetMorphism> {
        if self.source.len() != self.target.len() || !self.is_injective() {
            return None;
        }
        let mut inv = vec![0; self.map.len()];
        for (i, &m) in self.map.iter().enumerate() {
            inv[m] = i;
        }
        Some(PosetMorphism {
            source: self.target.clone(),
            target: self.source.clone(),
            map: inv,
        })
    }
}

/// A disjointness relation on a poset.
#[derive(Debug, Clone)]
pub struct Disjointness {
    pub poset: Arc<Poset>,
    pairs: BTreeSet<(usize, usize)>,
}

impl Disjointness {
    pub fn new(poset: Arc<Poset>, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Disjointness {
            poset,
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn empty(poset: Arc<Poset>) -> Self {
        Self::new(poset, [])
    }

    /// Symmetric closure of the given pairs.
    pub fn symmetric(poset: Arc<Poset>, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let pairs = pairs.into_iter().flat_map(|(a, b)| [(a, b), (b, a)]);
        Self::new(poset, pairs)
    }

    pub fn from_labels<S: AsRef<str>>(
        poset: Arc<Poset>,
        pairs: &[(S, S)],
    ) -> Result<Self, PosetError> {
        let idx = pairs
            .iter()
            .map(|(a, b)| Ok((poset.index_of(a.as_ref())?, poset.index_of(b.as_ref())?)))
            .collect::<Result<Vec<_>, PosetError>>()?;
        Ok(Self::new(poset, idx))
    }

    pub fn is_disjoint(&self, a: usize, b: usize) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Symmetry and downward stability.
    pub fn validate(&self) -> Report<PosetError> {
        let p = &self.poset;
        let mut report = Report::new();
        let mut symmetric = true;
        for &(a, b) in &self.pairs {
            if !self.pairs.contains(&(b, a)) {
                symmetric = false;
                report.push_violation(PosetError::NotSymmetric(
                    p.label(a).to_string(),
                    p.label(b).to_string(),
                ));
            }
        }
        report.push_check(Check::exact("symmetric", symmetric));
        let mut stable = true;
        for &(upper, other) in &self.pairs {
            for &lower in p.lower_covers(upper) {
                if !self.pairs.contains(&(lower, other)) {
                    stable = false;
                    report.push_violation(PosetError::DownwardStabilityViolated {
                        lower: p.label(lower).to_string(),
                        upper: p.label(upper).to_string(),
                        other: p.label(other).to_string(),
                    });
                }
            }
        }
        report.push_check(Check::exact("downward stable", stable));
        report
    }
}
