use std::collections::BTreeMap;
use std::sync::Arc;

use super::LimitError;
use crate::algebra::StarHom;
use crate::net::{Net, NetError, NetMorphism, HOM_TOL};
use crate::poset::{Poset, PosetMorphism};
use crate::report::{Check, Report};

/// Stage posets over a finite index poset with links on its covers.
#[derive(Debug, Clone)]
pub struct PosetSystem {
    pub index: Arc<Poset>,
    pub stages: Vec<Arc<Poset>>,
    pub links: BTreeMap<(usize, usize), PosetMorphism>,
}

fn link_name(index: &Poset, a: usize, s: usize) -> String {
    format!("{}->{}", index.label(a), index.label(s))
}

impl PosetSystem {
    pub fn new(
        index: Arc<Poset>,
        stages: Vec<Arc<Poset>>,
        links: BTreeMap<(usize, usize), PosetMorphism>,
    ) -> Result<Self, LimitError> {
        if stages.len() != index.len() {
            return Err(LimitError::IncoherentSystem(format!(
                "{} stages for {} indices",
                stages.len(),
                index.len()
            )));
        }
        for &(a, s) in index.covers() {
            if !links.contains_key(&(a, s)) {
                return Err(LimitError::MissingLink(link_name(&index, a, s)));
            }
        }
        for (&(a, s), f) in &links {
            if !index.is_cover(a, s) {
                return Err(LimitError::IncoherentSystem(format!(
                    "link {} is not on a cover",
                    link_name(&index, a, s)
                )));
            }
            if *f.source != *stages[a] || *f.target != *stages[s] {
                return Err(LimitError::IncoherentSystem(format!(
                    "link {} does not join its stages",
                    link_name(&index, a, s)
                )));
            }
        }
        Ok(PosetSystem {
            index,
            stages,
            links,
        })
    }

    /// The maximum of the index poset, if there is one.
    pub fn top(&self) -> Option<usize> {
        match self.index.maximal()[..] {
            [t] if (0..self.index.len()).all(|a| self.index.leq_idx(a, t)) => Some(t),
            _ => None,
        }
    }

    /// Index path `a = a₀ ⋖ a₁ ⋖ … ⋖ s`.
    pub(crate) fn index_path(&self, a: usize, s: usize) -> Result<Vec<usize>, LimitError> {
        if !self.index.leq_idx(a, s) {
            return Err(LimitError::MissingLink(link_name(&self.index, a, s)));
        }
        let mut path = vec![a];
        let mut cur = a;
        while cur != s {
            cur = *self
                .index
                .upper_covers(cur)
                .iter()
                .find(|&&b| self.index.leq_idx(b, s))
                .expect("a cover below s");
            path.push(cur);
        }
        Ok(path)
    }

    /// `𝔣^{σα}` composed along a cover path.
    pub fn link(&self, a: usize, s: usize) -> Result<PosetMorphism, LimitError> {
        let path = self.index_path(a, s)?;
        let mut f = PosetMorphism::identity(self.stages[a].clone());
        for w in path.windows(2) {
            f = self.links[&(w[0], w[1])].compose(&f)?;
        }
        Ok(f)
    }

    /// Directed index, injective order-preserving links, and path independence.
    pub fn validate(&self) -> Report<LimitError> {
        let mut report = Report::new();
        let all: Vec<usize> = (0..self.index.len()).collect();
        let directed = self.index.is_upward_directed(&all);
        report.push_check(Check::exact("index poset upward directed", directed));
        if !directed {
            report.push_violation(LimitError::NotDirected);
        }
        let mut injective = true;
        for (&(a, s), f) in &self.links {
            report.merge(f.validate().map_violations(LimitError::from));
            if !f.is_injective() {
                injective = false;
                report.push_violation(LimitError::NotInjective(link_name(&self.index, a, s)));
            }
        }
        report.push_check(Check::exact("links injective", injective));
        if !report.passed() {
            return report;
        }
        let mut coherent = true;
        for (&(a, b), f) in &self.links {
            for s in self.index.up_set(b) {
                let ok = match (self.link(b, s), self.link(a, s)) {
                    (Ok(g), Ok(h)) => g.compose(f).map(|c| c.map == h.map).unwrap_or(false),
                    _ => false,
                };
                if !ok {
                    coherent = false;
                    report.push_violation(LimitError::IncoherentSystem(format!(
                        "paths from {} to {} disagree",
                        self.index.label(a),
                        self.index.label(s)
                    )));
                }
            }
        }
        report.push_check(Check::exact("links coherent", coherent));
        report
    }
}

/// Stage nets over a finite index poset with net morphisms on its covers.
#[derive(Debug, Clone)]
pub struct NetSystem {
    pub posets: PosetSystem,
    pub nets: Vec<Arc<Net>>,
    pub links: BTreeMap<(usize, usize), NetMorphism>,
}

impl NetSystem {
    pub fn new(
        index: Arc<Poset>,
        nets: Vec<Arc<Net>>,
        links: BTreeMap<(usize, usize), NetMorphism>,
    ) -> Result<Self, LimitError> {
        let stages = nets.iter().map(|n| n.poset().clone()).collect();
        let poset_links = links
            .iter()
            .map(|(&k, m)| (k, m.poset_map.clone()))
            .collect();
        let posets = PosetSystem::new(index, stages, poset_links)?;
        for (&(a, s), m) in &links {
            if m.source.fibres() != nets[a].fibres() || m.target.fibres() != nets[s].fibres() {
                return Err(LimitError::IncoherentSystem(format!(
                    "link {} does not join its stage nets",
                    link_name(&posets.index, a, s)
                )));
            }
        }
        Ok(NetSystem {
            posets,
            nets,
            links,
        })
    }

    /// `(ψ^{σα}, 𝔣^{σα})` composed along a cover path.
    pub fn link(&self, a: usize, s: usize) -> Result<NetMorphism, LimitError> {
        let path = self.posets.index_path(a, s)?;
        let mut m = NetMorphism::identity(self.nets[a].clone());
        for w in path.windows(2) {
            m = self.links[&(w[0], w[1])].compose(&m)?;
        }
        Ok(m)
    }

    /// Every link injective on the poset and on every fibre.
    pub fn is_monomorphic(&self) -> bool {
        self.links
            .values()
            .all(|m| m.poset_map.is_injective() && m.is_faithful())
    }

    pub fn validate(&self) -> Report<LimitError> {
        self.validate_with(HOM_TOL)
    }

    /// Poset system valid, each link a net morphism, and composites
    /// independent of the path.
    pub fn validate_with(&self, tol: f64) -> Report<LimitError> {
        let mut report = self.posets.validate();
        for m in self.links.values() {
            report.merge(m.validate_with(tol).map_violations(LimitError::from));
        }
        if !report.passed() {
            return report;
        }
        let index = &self.posets.index;
        let mut worst: f64 = 0.0;
        for (&(a, b), f) in &self.links {
            for s in index.up_set(b) {
                let r = self
                    .link(b, s)
                    .and_then(|g| Ok(g.compose(f)?))
                    .and_then(|c| Ok(c.distance(&self.link(a, s)?)));
                match r {
                    Ok(r) => {
                        worst = worst.max(r);
                        if r.is_nan() || r > tol {
                            report.push_violation(LimitError::IncoherentSystem(format!(
                                "paths from {} to {} differ by {r:.3e}",
                                index.label(a),
                                index.label(s)
                            )));
                        }
                    }
                    Err(e) => report.push_violation(e),
                }
            }
        }
        report.push_check(Check::numeric("net links coherent", worst, tol));
        report
    }
}

/// The net restricted to a poset whose labels are a subset of the net's,
/// with inclusions derived in the full net. Returns the label map too.
pub fn restrict_net(net: &Net, sub: Arc<Poset>) -> Result<(Net, Vec<usize>), LimitError> {
    let map = sub
        .labels()
        .iter()
        .map(|l| net.poset().index_of(l))
        .collect::<Result<Vec<_>, _>>()?;
    let fibres = map.iter().map(|&o| net.fibre(o).clone()).collect();
    let inc = sub
        .covers()
        .iter()
        .map(|&(lo, hi)| Ok(((lo, hi), net.derived_inclusion(map[lo], map[hi])?)))
        .collect::<Result<BTreeMap<_, _>, NetError>>()?;
    Ok((Net::new(sub, fibres, inc)?, map))
}

/// The chain of restrictions of `net` to nested subposets
/// `K¹ ⊆ K² ⊆ …` (by label), linked by the inclusions.
pub fn restriction_system(net: &Net, subs: Vec<Arc<Poset>>) -> Result<NetSystem, LimitError> {
    let k = subs.len();
    let labels: Vec<String> = (1..=k).map(|i| i.to_string()).collect();
    let covers: Vec<(String, String)> = labels
        .windows(2)
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect();
    let index = Arc::new(Poset::new(labels, &covers)?);
    let nets = subs
        .into_iter()
        .map(|p| Ok(Arc::new(restrict_net(net, p)?.0)))
        .collect::<Result<Vec<_>, LimitError>>()?;
    let mut links = BTreeMap::new();
    for a in 0..k.saturating_sub(1) {
        let (lo, hi) = (&nets[a], &nets[a + 1]);
        let f = PosetMorphism::from_labels(lo.poset().clone(), hi.poset().clone(), |l| {
            l.to_string()
        })?;
        let homs = lo.fibres().iter().map(StarHom::identity).collect();
        links.insert((a, a + 1), NetMorphism::new(lo.clone(), hi.clone(), f, homs)?);
    }
    NetSystem::new(index, nets, links)
}
