use std::sync::Arc;

use super::holonomy::{bundle_holonomy, walk_transport};
use super::{Net, NetError, STATE_TOL};
use crate::algebra::State;
use crate::homotopy::GroupPresentation;
use crate::report::{Check, Report};

/// A state per fibre.
#[derive(Debug, Clone)]
pub struct NetState {
    pub net: Arc<Net>,
    pub states: Vec<State>,
}

impl NetState {
    pub fn new(net: Arc<Net>, states: Vec<State>) -> Result<Self, NetError> {
        if states.len() != net.poset().len() {
            return Err(NetError::DimensionMismatch(format!(
                "{} states for {} elements",
                states.len(),
                net.poset().len()
            )));
        }
        for (o, s) in states.iter().enumerate() {
            if s.algebra() != net.fibre(o) {
                return Err(NetError::DimensionMismatch(format!(
                    "state at {} is not on its fibre",
                    net.label(o)
                )));
            }
        }
        Ok(NetState { net, states })
    }

    pub fn validate(&self) -> Report<NetError> {
        self.validate_with(STATE_TOL)
    }

    /// State axioms per fibre and `ω_o = ω_õ ∘ ȷ_{õo}` on covers, which
    /// gives the identity for all comparable pairs.
    pub fn validate_with(&self, tol: f64) -> Report<NetError> {
        let net = &self.net;
        let mut report = Report::new();
        let mut axioms = true;
        for s in &self.states {
            if let Err(e) = s.check(tol) {
                axioms = false;
                report.push_violation(e.into());
            }
        }
        report.push_check(Check::exact("fibre states are states", axioms));
        let mut worst: f64 = 0.0;
        for (&(lo, hi), j) in net.inclusions() {
            let r = match self.states[hi].pullback(j) {
                Ok(back) => back.distance(&self.states[lo]),
                Err(e) => {
                    report.push_violation(e.into());
                    continue;
                }
            };
            worst = worst.max(r);
            if r.is_nan() || r > tol {
                report.push_violation(NetError::StateIncoherent {
                    lo: net.label(lo).into(),
                    hi: net.label(hi).into(),
                    residual: r,
                });
            }
        }
        report.push_check(Check::numeric("coherence on covers", worst, tol));
        report
    }
}

/// The net state of a bundle determined by a state on the base fibre that
/// every holonomy automorphism fixes; fibres are reached along the
/// spanning tree of `pres`.
pub fn state_from_holonomy(
    net: Arc<Net>,
    pres: &GroupPresentation,
    omega: &State,
) -> Result<NetState, NetError> {
    let hol = bundle_holonomy(&net, pres)?;
    for (generator, g) in hol.generators.iter().enumerate() {
        let r = omega.pullback(g)?.distance(omega);
        if r.is_nan() || r > STATE_TOL {
            return Err(NetError::NotHolonomyInvariant {
                generator,
                residual: r,
            });
        }
    }
    let table = net.inclusion_table()?;
    let states = (0..net.poset().len())
        .map(|x| {
            let t = walk_transport(&net, &table, &pres.tree_path_from_base(x))?;
            Ok(omega.pullback(&t.inverse()?)?)
        })
        .collect::<Result<Vec<_>, NetError>>()?;
    NetState::new(net, states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AlgElement, FinDimAlgebra, StarHom};
    use crate::poset::Poset;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn crown() -> Arc<Poset> {
        Arc::new(
            Poset::new(
                ["a", "b", "c", "d"].map(String::from).to_vec(),
                &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
            )
            .unwrap(),
        )
    }

    fn planted(u: &AlgElement) -> Net {
        let a = u.algebra();
        let p = crown();
        let mut inc: BTreeMap<_, _> =
            p.covers().iter().map(|&c| (c, StarHom::identity(&a))).collect();
        inc.insert((1, 3), StarHom::inner(&a, u).unwrap());
        Net::new(p, vec![a; 4], inc).unwrap()
    }

    #[test]
    fn constant_state_is_coherent_and_perturbation_is_not() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = FinDimAlgebra::new(vec![2, 1]).unwrap();
        let net = Arc::new(Net::constant(crown(), &a));
        let w = State::random(&a, &mut rng);
        let mut s = NetState::new(net, vec![w; 4]).unwrap();
        assert!(s.validate().passed());
        s.states[2] = State::trace(&a);
        assert!(matches!(
            s.validate().violations[0],
            NetError::StateIncoherent { .. }
        ));
    }

    #[test]
    fn trace_state_on_planted_bundle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = FinDimAlgebra::matrix(3);
        let net = Arc::new(planted(&a.random_unitary(&mut rng)));
        let pres = GroupPresentation::new(net.poset().clone(), 0).unwrap();
        let s = state_from_holonomy(net.clone(), &pres, &State::trace(&a)).unwrap();
        let r = s.validate();
        assert!(r.passed(), "{:?}", r.violations);
        let pure = State::random(&a, &mut rng);
        assert!(matches!(
            state_from_holonomy(net, &pres, &pure),
            Err(NetError::NotHolonomyInvariant { .. })
        ));
    }
}
