//! Inductive systems of posets and nets over a finite index poset, their
//! limits, norm profiles, factorization and the injectivity transfer check.

mod system;

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::algebra::AlgElement;
use crate::net::{Net, NetError, NetMorphism, SymbolicNetRep, HOM_TOL};
use crate::poset::{Poset, PosetError, PosetMorphism};
use crate::report::{Check, Report};
use crate::Exec;

pub use system::{restrict_net, restriction_system, NetSystem, PosetSystem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LimitError {
    #[error("index poset is not upward directed")]
    NotDirected,
    #[error("missing link {0}")]
    MissingLink(String),
    #[error("link {0} is not injective")]
    NotInjective(String),
    #[error("incoherent system: {0}")]
    IncoherentSystem(String),
    #[error("the truncated index poset has no maximum stage; extend the truncation")]
    NoMaximumStage,
    #[error("incompatible family: {0}")]
    IncompatibleFamily(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("θ not isometric at stage {stage}, element {element}: residual {residual:.3e}")]
    IsometryViolated {
        stage: String,
        element: String,
        residual: f64,
    },
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// The colimit poset with its stage embeddings `F^α`.
#[derive(Debug, Clone)]
pub struct LimitPoset {
    pub poset: Arc<Poset>,
    pub embeddings: Vec<PosetMorphism>,
    /// `Λ_o` for every limit element.
    pub index_sets: Vec<Vec<usize>>,
    /// `o_α` for every `α ∈ Λ_o`.
    pub sections: Vec<BTreeMap<usize, usize>>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Labeled union of the stages modulo `x ~ 𝔣^{σα}(x)`. With a maximum stage
/// the limit is that stage itself.
pub fn limit_poset(sys: &PosetSystem) -> Result<LimitPoset, LimitError> {
    sys.validate().into_result()?;
    let index = &sys.index;
    let (poset, embeddings) = match sys.top() {
        Some(top) => {
            let emb = (0..index.len())
                .map(|a| sys.link(a, top))
                .collect::<Result<Vec<_>, _>>()?;
            (sys.stages[top].clone(), emb)
        }
        None => union_poset(sys)?,
    };
    let mut index_sets = vec![Vec::new(); poset.len()];
    let mut sections = vec![BTreeMap::new(); poset.len()];
    for (a, f) in embeddings.iter().enumerate() {
        for x in 0..f.source.len() {
            let o = f.apply(x);
            index_sets[o].push(a);
            sections[o].insert(a, x);
        }
    }
    let lim = LimitPoset {
        poset,
        embeddings,
        index_sets,
        sections,
    };
    lim.validate(sys).into_result()?;
    Ok(lim)
}

/// The labeled union of all stages modulo the links, with its embeddings.
pub fn union_poset(sys: &PosetSystem) -> Result<(Arc<Poset>, Vec<PosetMorphism>), LimitError> {
    let index = &sys.index;
    let mut offset = Vec::with_capacity(index.len() + 1);
    offset.push(0);
    for s in &sys.stages {
        offset.push(offset.last().unwrap() + s.len());
    }
    let total = *offset.last().unwrap();
    let mut parent: Vec<usize> = (0..total).collect();
    for (&(a, s), f) in &sys.links {
        for x in 0..f.source.len() {
            let (p, q) = (find(&mut parent, offset[a] + x), find(&mut parent, offset[s] + f.apply(x)));
            parent[p] = q;
        }
    }
    let topo = index.topological_order().ok_or(LimitError::NotDirected)?;
    let mut rank = vec![0; index.len()];
    for (r, &a) in topo.iter().enumerate() {
        rank[a] = r;
    }
    // each class is represented in its latest stage
    let mut rep: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for a in 0..index.len() {
        for x in 0..sys.stages[a].len() {
            let c = find(&mut parent, offset[a] + x);
            let e = rep.entry(c).or_insert((a, x));
            if rank[a] > rank[e.0] {
                *e = (a, x);
            }
        }
    }
    let mut classes: Vec<(usize, (usize, usize))> = rep.into_iter().collect();
    classes.sort_by_key(|&(_, (a, x))| (std::cmp::Reverse(rank[a]), x));
    let class_index: BTreeMap<usize, usize> =
        classes.iter().enumerate().map(|(i, &(c, _))| (c, i)).collect();
    let n = classes.len();
    let mut labels: Vec<String> = classes
        .iter()
        .map(|&(_, (a, x))| sys.stages[a].label(x).to_string())
        .collect();
    let mut seen = BTreeMap::new();
    for l in &labels {
        *seen.entry(l.clone()).or_insert(0) += 1;
    }
    for (i, &(_, (a, _))) in classes.iter().enumerate() {
        if seen[&labels[i]] > 1 {
            labels[i] = format!("{}@{}", labels[i], index.label(a));
        }
    }
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    let mut emb_maps = Vec::with_capacity(index.len());
    for a in 0..index.len() {
        let k = &sys.stages[a];
        let map: Vec<usize> = (0..k.len())
            .map(|x| class_index[&find(&mut parent, offset[a] + x)])
            .collect();
        for (x, y) in k.strict_pairs() {
            leq[map[x]][map[y]] = true;
        }
        emb_maps.push(map);
    }
    for m in 0..n {
        for i in 0..n {
            if leq[i][m] {
                for j in 0..n {
                    if leq[m][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
    }
    let poset = Arc::new(
        Poset::from_order(labels, |i, j| leq[i][j])
            .map_err(|e| LimitError::IncoherentSystem(e.to_string()))?,
    );
    let embeddings = emb_maps
        .into_iter()
        .enumerate()
        .map(|(a, map)| PosetMorphism::new(sys.stages[a].clone(), poset.clone(), map))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((poset, embeddings))
}

impl LimitPoset {
    /// `K = ∪ F^α(K^α)`, `F^σ ∘ 𝔣^{σα} = F^α`, and every `Λ_o` upper and
    /// upward directed.
    pub fn validate(&self, sys: &PosetSystem) -> Report<LimitError> {
        let mut report = Report::new();
        let covered = self.index_sets.iter().all(|s| !s.is_empty());
        report.push_check(Check::exact("limit is the union of the stage images", covered));
        if !covered {
            report.push_violation(LimitError::IncoherentSystem("uncovered limit element".into()));
        }
        let mut compatible = true;
        for (&(a, s), f) in &sys.links {
            let ok = (0..f.source.len())
                .all(|x| self.embeddings[s].apply(f.apply(x)) == self.embeddings[a].apply(x));
            if !ok {
                compatible = false;
                report.push_violation(LimitError::IncoherentSystem(format!(
                    "F^{} ∘ link ≠ F^{}",
                    sys.index.label(s),
                    sys.index.label(a)
                )));
            }
        }
        report.push_check(Check::exact("stage embeddings compatible", compatible));
        let index = &sys.index;
        let upper = self.index_sets.iter().all(|set| {
            set.iter()
                .all(|&a| index.up_set(a).iter().all(|s| set.contains(s)))
        });
        let directed = self.index_sets.iter().all(|set| index.is_upward_directed(set));
        report.push_check(Check::exact("every Λ_o is an upper set", upper));
        report.push_check(Check::exact("every Λ_o is upward directed", directed));
        if !upper || !directed {
            report.push_violation(LimitError::NotDirected);
        }
        report
    }

    /// The unique `H` with `H ∘ F^α = H^α`.
    pub fn factor(&self, family: &[PosetMorphism]) -> Result<PosetMorphism, LimitError> {
        if family.len() != self.embeddings.len() {
            return Err(LimitError::IncompatibleFamily(format!(
                "{} maps for {} stages",
                family.len(),
                self.embeddings.len()
            )));
        }
        let target = family
            .first()
            .map(|h| h.target.clone())
            .ok_or_else(|| LimitError::IncompatibleFamily("empty family".into()))?;
        if family.iter().any(|h| *h.target != *target) {
            return Err(LimitError::IncompatibleFamily("different target posets".into()));
        }
        let mut map = Vec::with_capacity(self.poset.len());
        for (o, sec) in self.sections.iter().enumerate() {
            let mut values = sec.iter().map(|(&a, &x)| family[a].apply(x));
            let v = values.next().expect("sections are nonempty");
            if values.any(|w| w != v) {
                return Err(LimitError::IncompatibleFamily(format!(
                    "stages disagree at {}",
                    self.poset.label(o)
                )));
            }
            map.push(v);
        }
        let h = PosetMorphism::new(self.poset.clone(), target, map)?;
        h.validate().into_result()?;
        Ok(h)
    }
}

/// The limit net at a maximum stage, with `Ψ^α = ψ^{top,α}`.
#[derive(Debug, Clone)]
pub struct LimitNet {
    pub net: Arc<Net>,
    pub top: usize,
    pub stage_maps: Vec<NetMorphism>,
}

pub fn limit_net(sys: &NetSystem) -> Result<LimitNet, LimitError> {
    let top = sys.posets.top().ok_or(LimitError::NoMaximumStage)?;
    let stage_maps = (0..sys.nets.len())
        .map(|a| sys.link(a, top))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LimitNet {
        net: sys.nets[top].clone(),
        top,
        stage_maps,
    })
}

impl LimitNet {
    /// `Ψ^σ ∘ ψ^{σα} = Ψ^α` for all `α ⪯ σ`, and each `Ψ^α` a net morphism.
    pub fn check(&self, sys: &NetSystem, tol: f64) -> Report<LimitError> {
        let mut report = Report::new();
        let index = &sys.posets.index;
        let mut worst: f64 = 0.0;
        for a in 0..index.len() {
            let m = self.stage_maps[a].validate_with(tol).map_violations(LimitError::from);
            report.merge(m);
            for s in index.up_set(a) {
                let r = sys
                    .link(a, s)
                    .and_then(|l| Ok(self.stage_maps[s].compose(&l)?))
                    .map(|c| c.distance(&self.stage_maps[a]));
                match r {
                    Ok(r) => {
                        worst = worst.max(r);
                        if r.is_nan() || r > tol {
                            report.push_violation(LimitError::IncoherentSystem(format!(
                                "Ψ^{} ∘ ψ ≠ Ψ^{} by {r:.3e}",
                                index.label(s),
                                index.label(a)
                            )));
                        }
                    }
                    Err(e) => report.push_violation(e),
                }
            }
        }
        report.push_check(Check::numeric("stage maps compatible with links", worst, tol));
        report
    }
}

/// Norms `‖ψ^{σα}_o(A)‖` for `σ ⪰ α`, in topological order.
#[derive(Debug, Clone, PartialEq)]
pub struct NormProfile {
    pub stages: Vec<(usize, f64)>,
    pub nonincreasing: bool,
    /// Running minimum; exact when the index poset has a maximum.
    pub limit_norm: f64,
    /// The minimum is already reached below some later stage.
    pub stabilized: bool,
}

pub fn limit_norm_profile(
    sys: &NetSystem,
    alpha: usize,
    o: usize,
    a: &AlgElement,
) -> Result<NormProfile, LimitError> {
    let index = &sys.posets.index;
    if a.algebra() != *sys.nets[alpha].fibre(o) {
        return Err(NetError::DimensionMismatch(format!(
            "element of {} is not in the fibre {}",
            a.algebra(),
            sys.nets[alpha].fibre(o)
        ))
        .into());
    }
    let topo = index.topological_order().ok_or(LimitError::NotDirected)?;
    let stages = topo
        .into_iter()
        .filter(|&s| index.leq_idx(alpha, s))
        .map(|s| Ok((s, sys.link(alpha, s)?.homs[o].apply(a).norm())))
        .collect::<Result<Vec<_>, LimitError>>()?;
    let mut nonincreasing = true;
    for &(s, ns) in &stages {
        for &(t, nt) in &stages {
            if index.lt_idx(s, t) && nt > ns + HOM_TOL {
                nonincreasing = false;
            }
        }
    }
    let limit_norm = match sys.posets.top() {
        Some(top) => stages.iter().find(|&&(s, _)| s == top).map(|p| p.1).unwrap_or(0.0),
        None => stages.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
    };
    let stabilized = stages.iter().any(|&(s, ns)| {
        (ns - limit_norm).abs() <= HOM_TOL
            && stages.iter().any(|&(t, _)| index.lt_idx(s, t))
    });
    Ok(NormProfile {
        stages,
        nonincreasing,
        limit_norm,
        stabilized,
    })
}

/// The unique `Φ` with `Φ ∘ Ψ^α = Φ^α` for a compatible family.
pub fn factor_through_limit(
    sys: &NetSystem,
    targets: &[NetMorphism],
    tol: f64,
) -> Result<NetMorphism, LimitError> {
    let lim = limit_net(sys)?;
    if targets.len() != sys.nets.len() {
        return Err(LimitError::IncompatibleFamily(format!(
            "{} morphisms for {} stages",
            targets.len(),
            sys.nets.len()
        )));
    }
    let target = &targets[0].target;
    for (a, t) in targets.iter().enumerate() {
        if !Arc::ptr_eq(&t.source, &sys.nets[a]) && *t.source.poset() != *sys.nets[a].poset() {
            return Err(LimitError::IncompatibleFamily(format!(
                "morphism {} does not start at its stage",
                sys.posets.index.label(a)
            )));
        }
        if t.target.poset() != target.poset() || t.target.fibres() != target.fibres() {
            return Err(LimitError::IncompatibleFamily("different target nets".into()));
        }
    }
    for (&(a, s), l) in &sys.links {
        let d = targets[s].compose(l)?.distance(&targets[a]);
        if d.is_nan() || d > tol {
            return Err(LimitError::IncompatibleFamily(format!(
                "Φ^{} ∘ ψ ≠ Φ^{} by {d:.3e}",
                sys.posets.index.label(s),
                sys.posets.index.label(a)
            )));
        }
    }
    let phi = targets[lim.top].clone();
    for (a, psi) in lim.stage_maps.iter().enumerate() {
        let d = phi.compose(psi)?.distance(&targets[a]);
        if d.is_nan() || d > tol {
            return Err(LimitError::IncompatibleFamily(format!(
                "no factorization at stage {}",
                sys.posets.index.label(a)
            )));
        }
    }
    Ok(phi)
}

/// With monomorphic links and a faithful representation per stage, the map
/// `θ` of every stage fibre into the limit is isometric on random samples.
/// Failed preconditions are reported as such and stop the check.
pub fn injectivity_transfer_check<R: Rng + ?Sized>(
    sys: &NetSystem,
    witnesses: &[SymbolicNetRep],
    samples: usize,
    tol: f64,
    rng: &mut R,
    exec: Exec,
) -> Report<LimitError> {
    let mut report = Report::new();
    let index = &sys.posets.index;
    let mut gate = Vec::new();
    if !sys.is_monomorphic() {
        gate.push("a linking morphism is not a monomorphism".to_string());
    }
    if witnesses.len() != sys.nets.len() {
        gate.push(format!("{} witnesses for {} stages", witnesses.len(), sys.nets.len()));
    } else {
        for (a, w) in witnesses.iter().enumerate() {
            let net = &sys.nets[a];
            if w.net().poset() != net.poset() || w.net().fibres() != net.fibres() {
                gate.push(format!("witness {} is over another net", index.label(a)));
            } else if !w.is_faithful() {
                gate.push(format!("witness {} is not faithful", index.label(a)));
            }
        }
    }
    report.push_check(Check::exact("preconditions", gate.is_empty()));
    if !gate.is_empty() {
        for g in gate {
            report.push_violation(LimitError::PreconditionFailed(g));
        }
        return report;
    }
    let lim = match limit_net(sys) {
        Ok(l) => l,
        Err(e) => {
            report.push_violation(e);
            return report;
        }
    };
    let picks: Vec<(usize, usize, AlgElement)> = (0..samples)
        .map(|_| {
            let a = rng.random_range(0..sys.nets.len());
            let o = rng.random_range(0..sys.nets[a].poset().len());
            let x = sys.nets[a].fibre(o).random_element(rng);
            (a, o, x)
        })
        .collect();
    let residuals = exec.map(&picks, |(a, o, x)| {
        let n = x.norm();
        let image = lim.stage_maps[*a].homs[*o].apply(x).norm();
        let rep = witnesses[*a].pi(*o).hom().apply(x).norm();
        (n - image).abs().max((n - rep).abs())
    });
    let mut worst: f64 = 0.0;
    for ((a, o, _), r) in picks.iter().zip(residuals) {
        worst = worst.max(r);
        if r.is_nan() || r > tol {
            report.push_violation(LimitError::IsometryViolated {
                stage: index.label(*a).into(),
                element: sys.nets[*a].label(*o).into(),
                residual: r,
            });
        }
    }
    report.push_check(Check::numeric("θ isometric on samples", worst, tol));
    report
}
