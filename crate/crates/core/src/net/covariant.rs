use std::sync::Arc;

use super::{Net, NetError, NetState, HOM_TOL};
use crate::algebra::{State, StarHom};
use crate::poset::GroupAction;
use crate::report::{Check, Report};

/// A net with a finite group acting on its poset and fibre isomorphisms
/// `α^g_o : 𝒜_o → 𝒜_{go}`, stored as `alpha[g][o]`.
#[derive(Debug, Clone)]
pub struct CovariantNet {
    pub net: Arc<Net>,
    pub action: GroupAction,
    pub alpha: Vec<Vec<StarHom>>,
}

impl CovariantNet {
    pub fn new(
        net: Arc<Net>,
        action: GroupAction,
        alpha: Vec<Vec<StarHom>>,
    ) -> Result<Self, NetError> {
        let n = net.poset().len();
        if alpha.len() != action.group.order() || alpha.iter().any(|row| row.len() != n) {
            return Err(NetError::DimensionMismatch(
                "one fibre map per group element and poset element".into(),
            ));
        }
        for (g, row) in alpha.iter().enumerate() {
            for (o, h) in row.iter().enumerate() {
                if h.source() != net.fibre(o) || h.target() != net.fibre(action.act(g, o)) {
                    return Err(NetError::DimensionMismatch(format!(
                        "α for group element {g} at {} has the wrong fibres",
                        net.label(o)
                    )));
                }
            }
        }
        Ok(CovariantNet { net, action, alpha })
    }

    /// The action with identity fibre maps; needs `𝒜_{go} = 𝒜_o`.
    pub fn with_identity_maps(net: Arc<Net>, action: GroupAction) -> Result<Self, NetError> {
        let alpha = (0..action.group.order())
            .map(|_| net.fibres().iter().map(StarHom::identity).collect())
            .collect();
        Self::new(net, action, alpha)
    }

    pub fn validate(&self) -> Report<NetError> {
        self.validate_with(HOM_TOL)
    }

    /// Automorphic action on the poset, isomorphic fibre maps,
    /// `α^g_õ ∘ ȷ_{õo} = ȷ_{gõ,go} ∘ α^g_o` and `α^h_{go} ∘ α^g_o = α^{hg}_o`.
    pub fn validate_with(&self, tol: f64) -> Report<NetError> {
        let net = &self.net;
        let mut report = self.action.validate(None).map_violations(NetError::from);
        if !report.passed() {
            return report;
        }
        let bad = |m: String| NetError::CovarianceViolated(m);
        let mut iso = true;
        for (g, row) in self.alpha.iter().enumerate() {
            for (o, h) in row.iter().enumerate() {
                if !h.is_isomorphism() {
                    iso = false;
                    report.push_violation(bad(format!(
                        "α for {g} at {} is not an isomorphism",
                        net.label(o)
                    )));
                }
            }
        }
        report.push_check(Check::exact("fibre maps are isomorphisms", iso));
        let mut worst: f64 = 0.0;
        for g in 0..self.alpha.len() {
            for (&(lo, hi), j) in net.inclusions() {
                let (glo, ghi) = (self.action.act(g, lo), self.action.act(g, hi));
                let r = net.derived_inclusion(glo, ghi).and_then(|jg| {
                    let left = self.alpha[g][hi].compose(j)?;
                    let right = jg.compose(&self.alpha[g][lo])?;
                    Ok(left.distance(&right))
                });
                match r {
                    Ok(r) => {
                        worst = worst.max(r);
                        if r.is_nan() || r > tol {
                            report.push_violation(bad(format!(
                                "inclusion {} -> {} under group element {g} (residual {r:e})",
                                net.label(lo),
                                net.label(hi)
                            )));
                        }
                    }
                    Err(e) => report.push_violation(e),
                }
            }
        }
        report.push_check(Check::numeric("covariance on covers", worst, tol));
        let mut worst: f64 = 0.0;
        let group = &self.action.group;
        for g in 0..group.order() {
            for h in 0..group.order() {
                let hg = group.mul(h, g);
                for o in 0..net.poset().len() {
                    let go = self.action.act(g, o);
                    let r = match self.alpha[h][go].compose(&self.alpha[g][o]) {
                        Ok(x) => x.distance(&self.alpha[hg][o]),
                        Err(e) => {
                            report.push_violation(e.into());
                            continue;
                        }
                    };
                    worst = worst.max(r);
                    if r.is_nan() || r > tol {
                        report.push_violation(bad(format!(
                            "cocycle of ({h}, {g}) at {} (residual {r:e})",
                            net.label(o)
                        )));
                    }
                }
            }
        }
        report.push_check(Check::numeric("group law on fibre maps", worst, tol));
        report
    }
}

/// `ω'_o = (1/|G|) Σ_g ω_{go} ∘ α^g_o`, re-validated as a net state.
pub fn invariant_net_state(cn: &CovariantNet, s: &NetState) -> Result<NetState, NetError> {
    let n = cn.net.poset().len();
    let order = cn.action.group.order();
    let weights = vec![1.0 / order as f64; order];
    let states = (0..n)
        .map(|o| {
            let pulled = (0..order)
                .map(|g| s.states[cn.action.act(g, o)].pullback(&cn.alpha[g][o]))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(State::mix(&pulled, &weights)?)
        })
        .collect::<Result<Vec<_>, NetError>>()?;
    let out = NetState::new(cn.net.clone(), states)?;
    out.validate().into_result()?;
    Ok(out)
}
