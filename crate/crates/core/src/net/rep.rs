//! Representations `(π, U)` of a net: a representation per element and a
//! unitary inclusion operator per cover.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::{Net, NetError, NetMorphism, HOM_TOL};
use crate::algebra::matrix::{identity, op_norm};
use crate::algebra::{CMat, FinRep};
use crate::cmrep::{intertwining_residual, BasisIndex, CmRep, SparseVec, SymbolicUnitary};
use crate::par::Exec;
use crate::report::{Check, Report};

/// A representation on `ℂ^d`, the same `d` at every element.
#[derive(Debug, Clone)]
pub struct NetRep {
    net: Arc<Net>,
    pi: Vec<FinRep>,
    u: BTreeMap<(usize, usize), CMat>,
}

impl NetRep {
    pub fn new(
        net: Arc<Net>,
        pi: Vec<FinRep>,
        u: BTreeMap<(usize, usize), CMat>,
    ) -> Result<Self, NetError> {
        let p = net.poset();
        if pi.len() != p.len() {
            return Err(NetError::DimensionMismatch(format!(
                "{} representations for {} elements",
                pi.len(),
                p.len()
            )));
        }
        for (o, r) in pi.iter().enumerate() {
            if r.source() != net.fibre(o) {
                return Err(NetError::DimensionMismatch(format!(
                    "representation at {} is not of its fibre",
                    net.label(o)
                )));
            }
        }
        let d = pi[0].dim();
        if let Some(o) = pi.iter().position(|r| r.dim() != d) {
            return Err(NetError::DimensionMismatch(format!(
                "dimension {} at {} differs from {d}",
                pi[o].dim(),
                net.label(o)
            )));
        }
        for &(lo, hi) in p.covers() {
            match u.get(&(lo, hi)) {
                None => {
                    return Err(NetError::MissingInclusion {
                        lo: net.label(lo).into(),
                        hi: net.label(hi).into(),
                    })
                }
                Some(m) if m.shape() != (d, d) => {
                    return Err(NetError::DimensionMismatch(format!(
                        "operator {} -> {} is {:?}",
                        net.label(lo),
                        net.label(hi),
                        m.shape()
                    )))
                }
                _ => {}
            }
        }
        Ok(NetRep { net, pi, u })
    }

    /// The same representation everywhere with identity operators; only
    /// meaningful over a constant net.
    pub fn constant(net: Arc<Net>, rep: FinRep) -> Result<Self, NetError> {
        let d = rep.dim();
        let pi = vec![rep; net.poset().len()];
        let u = net
            .poset()
            .covers()
            .iter()
            .map(|&c| (c, identity(d)))
            .collect();
        Self::new(net, pi, u)
    }

    pub fn net(&self) -> &Arc<Net> {
        &self.net
    }

    pub fn pi(&self, o: usize) -> &FinRep {
        &self.pi[o]
    }

    pub fn operator(&self, lo: usize, hi: usize) -> Option<&CMat> {
        self.u.get(&(lo, hi))
    }

    pub fn dim(&self) -> usize {
        self.pi[0].dim()
    }

    pub fn is_faithful(&self) -> bool {
        self.pi.iter().all(FinRep::is_faithful)
    }

    /// Composed inclusion operators `U_{ao}` for all `o <= a`.
    pub fn operator_table(&self) -> Result<HashMap<(usize, usize), CMat>, NetError> {
        let d = self.dim();
        self.net
            .path_table(|_| Ok(identity(d)), |o, b, above| Ok(above * &self.u[&(o, b)]))
    }

    pub fn validate(&self) -> Report<NetError> {
        self.validate_with(HOM_TOL, Exec::default())
    }

    /// Intertwining on covers and path independence of composed operators.
    pub fn validate_with(&self, tol: f64, exec: Exec) -> Report<NetError> {
        let net = &self.net;
        let mut report = Report::new();
        let covers = net.poset().covers().to_vec();
        let res = exec.map(&covers, |&(lo, hi)| {
            let j = net.inclusion(lo, hi).expect("validated net");
            let u = &self.u[&(lo, hi)];
            let alg = net.fibre(lo);
            alg.matrix_units()
                .into_iter()
                .map(|(s, i, k)| {
                    let e = alg.unit_element(s, i, k);
                    let lhs = u * self.pi[lo].act(&e);
                    let rhs = self.pi[hi].act(&j.apply(&e)) * u;
                    op_norm(&(lhs - rhs))
                })
                .fold(0.0, f64::max)
        });
        let mut worst: f64 = 0.0;
        for (&(lo, hi), &r) in covers.iter().zip(&res) {
            worst = worst.max(r);
            if r.is_nan() || r > tol {
                report.push_violation(NetError::IntertwineViolated {
                    lo: net.label(lo).into(),
                    hi: net.label(hi).into(),
                    residual: r,
                });
            }
        }
        report.push_check(Check::numeric("intertwining on covers", worst, tol));
        let table = match self.operator_table() {
            Ok(t) => t,
            Err(e) => {
                report.push_violation(e);
                return report;
            }
        };
        let triples = net.branch_triples();
        let res = exec.map(&triples, |&(o, b, a)| {
            let other = &table[&(b, a)] * &self.u[&(o, b)];
            op_norm(&(other - &table[&(o, a)]))
        });
        let mut worst: f64 = 0.0;
        for (&(o, _, a), &r) in triples.iter().zip(&res) {
            worst = worst.max(r);
            if r.is_nan() || r > tol {
                report.push_violation(NetError::CocycleViolated {
                    lo: net.label(o).into(),
                    hi: net.label(a).into(),
                    residual: r,
                });
            }
        }
        report.push_check(Check::numeric("cocycle path independence", worst, tol));
        report
    }
}

/// A representation by countable-multiplicity representations and symbolic
/// inclusion operators.
#[derive(Debug, Clone)]
pub struct SymbolicNetRep {
    net: Arc<Net>,
    pi: Vec<CmRep>,
    v: BTreeMap<(usize, usize), SymbolicUnitary>,
}

impl SymbolicNetRep {
    pub fn new(
        net: Arc<Net>,
        pi: Vec<CmRep>,
        v: BTreeMap<(usize, usize), SymbolicUnitary>,
    ) -> Result<Self, NetError> {
        let p = net.poset();
        if pi.len() != p.len() {
            return Err(NetError::DimensionMismatch(format!(
                "{} representations for {} elements",
                pi.len(),
                p.len()
            )));
        }
        for (o, r) in pi.iter().enumerate() {
            if r.algebra() != net.fibre(o) {
                return Err(NetError::DimensionMismatch(format!(
                    "representation at {} is not of its fibre",
                    net.label(o)
                )));
            }
        }
        for &(lo, hi) in p.covers() {
            let w = v.get(&(lo, hi)).ok_or_else(|| NetError::MissingInclusion {
                lo: net.label(lo).into(),
                hi: net.label(hi).into(),
            })?;
            if w.domain() != pi[lo].carrier().blocks() || w.codomain() != pi[hi].carrier().blocks()
            {
                return Err(NetError::DimensionMismatch(format!(
                    "operator {} -> {} does not map between the carriers",
                    net.label(lo),
                    net.label(hi)
                )));
            }
        }
        Ok(SymbolicNetRep { net, pi, v })
    }

    pub fn net(&self) -> &Arc<Net> {
        &self.net
    }

    pub fn pi(&self, o: usize) -> &CmRep {
        &self.pi[o]
    }

    pub fn operator(&self, lo: usize, hi: usize) -> Option<&SymbolicUnitary> {
        self.v.get(&(lo, hi))
    }

    pub fn operators(&self) -> &BTreeMap<(usize, usize), SymbolicUnitary> {
        &self.v
    }

    pub fn is_faithful(&self) -> bool {
        self.pi.iter().all(CmRep::is_faithful)
    }

    /// Composite of the operators along a cover path.
    pub fn compose_path(&self, path: &[usize]) -> Result<SymbolicUnitary, NetError> {
        let mut w = SymbolicUnitary::identity(self.pi[path[0]].carrier().blocks().to_vec());
        for s in path.windows(2) {
            let step = self.v.get(&(s[0], s[1])).ok_or_else(|| NetError::MissingInclusion {
                lo: self.net.label(s[0]).into(),
                hi: self.net.label(s[1]).into(),
            })?;
            w = step.after(&w)?;
        }
        Ok(w)
    }

    pub fn operator_table(&self) -> Result<HashMap<(usize, usize), SymbolicUnitary>, NetError> {
        self.net.path_table(
            |o| Ok(SymbolicUnitary::identity(self.pi[o].carrier().blocks().to_vec())),
            |o, b, above: &SymbolicUnitary| Ok(above.after(&self.v[&(o, b)])?),
        )
    }

    /// The representation `π_{𝔣(o)} ∘ ψ_o` of the source net of `m`, with
    /// composite operators of `self` along the image of each cover.
    pub fn pullback(&self, m: &NetMorphism) -> Result<SymbolicNetRep, NetError> {
        if **m.target.poset() != **self.net.poset() {
            return Err(NetError::DimensionMismatch(
                "morphism does not land in the represented net".into(),
            ));
        }
        let f = &m.poset_map;
        let pi = m
            .homs
            .iter()
            .enumerate()
            .map(|(o, h)| Ok(self.pi[f.apply(o)].restrict(h)?.0))
            .collect::<Result<Vec<_>, NetError>>()?;
        let v = m
            .source
            .poset()
            .covers()
            .iter()
            .map(|&(lo, hi)| {
                let path = self.net.cover_path(f.apply(lo), f.apply(hi))?;
                Ok(((lo, hi), self.compose_path(&path)?))
            })
            .collect::<Result<BTreeMap<_, _>, NetError>>()?;
        SymbolicNetRep::new(m.source.clone(), pi, v)
    }

    pub fn validate(&self, depth: u64) -> Report<NetError> {
        self.validate_with(depth, HOM_TOL, Exec::default())
    }

    /// Intertwining on covers and cocycle path independence, both on basis
    /// probes of copy depth `depth`.
    pub fn validate_with(&self, depth: u64, tol: f64, exec: Exec) -> Report<NetError> {
        let net = &self.net;
        let mut report = Report::new();
        let covers = net.poset().covers().to_vec();
        let res = exec.map(&covers, |&(lo, hi)| {
            let j = net.inclusion(lo, hi).expect("validated net");
            match self.pi[hi].restrict(j) {
                Ok((pulled, _)) => intertwining_residual(
                    &self.v[&(lo, hi)],
                    &self.pi[lo],
                    &pulled,
                    depth,
                    Exec::Sequential,
                ),
                Err(_) => f64::INFINITY,
            }
        });
        let mut worst: f64 = 0.0;
        for (&(lo, hi), &r) in covers.iter().zip(&res) {
            worst = worst.max(r);
            if r.is_nan() || r > tol {
                report.push_violation(NetError::IntertwineViolated {
                    lo: net.label(lo).into(),
                    hi: net.label(hi).into(),
                    residual: r,
                });
            }
        }
        report.push_check(Check::numeric("intertwining on covers (probes)", worst, tol));
        let table = match self.operator_table() {
            Ok(t) => t,
            Err(e) => {
                report.push_violation(e);
                return report;
            }
        };
        let triples = net.branch_triples();
        let res = exec.map(&triples, |&(o, b, a)| {
            match table[&(b, a)].after(&self.v[&(o, b)]) {
                Ok(other) => probe_distance(&other, &table[&(o, a)], &self.pi[o], depth),
                Err(_) => f64::INFINITY,
            }
        });
        let mut worst: f64 = 0.0;
        for (&(o, _, a), &r) in triples.iter().zip(&res) {
            worst = worst.max(r);
            if r.is_nan() || r > tol {
                report.push_violation(NetError::CocycleViolated {
                    lo: net.label(o).into(),
                    hi: net.label(a).into(),
                    residual: r,
                });
            }
        }
        report.push_check(Check::numeric("cocycle path independence (probes)", worst, tol));
        report
    }
}

/// `max ‖x e − y e‖` over basis probes `e` of the carrier of `r`.
pub fn probe_distance(
    x: &SymbolicUnitary,
    y: &SymbolicUnitary,
    r: &CmRep,
    depth: u64,
) -> f64 {
    r.probes(depth)
        .into_iter()
        .map(|ix: BasisIndex| {
            let v = SparseVec::basis(ix);
            x.apply(&v).sub(&y.apply(&v)).norm()
        })
        .fold(0.0, f64::max)
}
