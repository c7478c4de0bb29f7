use std::sync::Arc;

use super::{Net, NetError, HOM_TOL};
use crate::algebra::StarHom;
use crate::poset::PosetMorphism;
use crate::report::{Check, Report};

/// A net morphism `(ψ, 𝔣)`: a poset morphism and a fibre homomorphism
/// `ψ_o : 𝒜_o → 𝒜'_{𝔣(o)}` per element.
#[derive(Debug, Clone)]
pub struct NetMorphism {
    pub source: Arc<Net>,
    pub target: Arc<Net>,
    pub poset_map: PosetMorphism,
    pub homs: Vec<StarHom>,
}

impl NetMorphism {
    pub fn new(
        source: Arc<Net>,
        target: Arc<Net>,
        poset_map: PosetMorphism,
        homs: Vec<StarHom>,
    ) -> Result<Self, NetError> {
        if homs.len() != source.poset().len() {
            return Err(NetError::DimensionMismatch(format!(
                "{} fibre maps for {} elements",
                homs.len(),
                source.poset().len()
            )));
        }
        for (o, h) in homs.iter().enumerate() {
            let img = poset_map.apply(o);
            if h.source() != source.fibre(o) || h.target() != target.fibre(img) {
                return Err(NetError::DimensionMismatch(format!(
                    "fibre map at {} does not go from {} to {}",
                    source.label(o),
                    source.fibre(o),
                    target.fibre(img)
                )));
            }
        }
        Ok(NetMorphism {
            source,
            target,
            poset_map,
            homs,
        })
    }

    pub fn identity(net: Arc<Net>) -> Self {
        let homs = net.fibres().iter().map(StarHom::identity).collect();
        let poset_map = PosetMorphism::identity(net.poset().clone());
        NetMorphism {
            source: net.clone(),
            target: net,
            poset_map,
            homs,
        }
    }

    pub fn validate(&self) -> Report<NetError> {
        self.validate_with(HOM_TOL)
    }

    /// Order preservation and `ψ_õ ∘ ȷ_{õo} = ȷ'_{𝔣(õ)𝔣(o)} ∘ ψ_o` on covers.
    pub fn validate_with(&self, tol: f64) -> Report<NetError> {
        let mut report = self.poset_map.validate().map_violations(NetError::from);
        if !report.passed() {
            return report;
        }
        let src = &self.source;
        let mut worst: f64 = 0.0;
        for &(lo, hi) in src.poset().covers() {
            let (flo, fhi) = (self.poset_map.apply(lo), self.poset_map.apply(hi));
            let r = self.target.derived_inclusion(flo, fhi).and_then(|jt| {
                let left = self.homs[hi].compose(src.inclusion(lo, hi).expect("cover"))?;
                let right = jt.compose(&self.homs[lo])?;
                Ok(left.distance(&right))
            });
            match r {
                Ok(r) => {
                    worst = worst.max(r);
                    if r.is_nan() || r > tol {
                        report.push_violation(NetError::MorphismViolated {
                            lo: src.label(lo).into(),
                            hi: src.label(hi).into(),
                            residual: r,
                        });
                    }
                }
                Err(e) => report.push_violation(e),
            }
        }
        report.push_check(Check::numeric("morphism commutes with inclusions", worst, tol));
        report
    }

    /// Every fibre map is injective.
    pub fn is_faithful(&self) -> bool {
        self.homs.iter().all(StarHom::is_injective)
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &NetMorphism) -> Result<NetMorphism, NetError> {
        let poset_map = self.poset_map.compose(&first.poset_map)?;
        let homs = first
            .homs
            .iter()
            .enumerate()
            .map(|(o, h)| self.homs[first.poset_map.apply(o)].compose(h))
            .collect::<Result<Vec<_>, _>>()?;
        NetMorphism::new(first.source.clone(), self.target.clone(), poset_map, homs)
    }

    /// Largest distance between the fibre maps of two morphisms with the
    /// same underlying poset map.
    pub fn distance(&self, other: &NetMorphism) -> f64 {
        if self.poset_map.map != other.poset_map.map {
            return f64::INFINITY;
        }
        self.homs
            .iter()
            .zip(&other.homs)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }
}
