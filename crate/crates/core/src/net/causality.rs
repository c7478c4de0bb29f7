use super::{Net, NetError};
use crate::algebra::matrix::op_norm;
use crate::algebra::AlgElement;
use crate::par::Exec;
use crate::poset::Disjointness;
use crate::report::{Check, Report};

/// Tolerance for commutator norms.
pub const CAUSALITY_TOL: f64 = 1e-10;

pub fn check_causality(net: &Net, d: &Disjointness) -> Report<NetError> {
    check_causality_with(net, d, CAUSALITY_TOL, Exec::default())
}

/// `[ȷ_{ao}(e), ȷ_{aõ}(f)] = 0` for matrix units `e`, `f`, every disjoint
/// pair `o ⊥ õ` and every common upper bound `a`.
pub fn check_causality_with(net: &Net, d: &Disjointness, tol: f64, exec: Exec) -> Report<NetError> {
    let mut report = Report::new();
    let table = match net.inclusion_table() {
        Ok(t) => t,
        Err(e) => {
            report.push_violation(e);
            return report;
        }
    };
    let p = net.poset();
    let mut jobs = Vec::new();
    for (o, q) in d.pairs() {
        if o >= q {
            continue;
        }
        let ups = p.up_set(o);
        jobs.extend(ups.into_iter().filter(|&a| p.leq_idx(q, a)).map(|a| (o, q, a)));
    }
    let res = exec.map(&jobs, |&(o, q, a)| {
        let images = |x: usize| -> Vec<AlgElement> {
            let alg = net.fibre(x);
            let j = &table[&(x, a)];
            alg.matrix_units()
                .into_iter()
                .map(|(s, i, k)| j.apply(&alg.unit_element(s, i, k)))
                .collect()
        };
        let (left, right) = (images(o), images(q));
        let mut worst: f64 = 0.0;
        for x in &left {
            for y in &right {
                let c = x.mul(y).sub(&y.mul(x));
                worst = worst.max(c.blocks.iter().map(op_norm).fold(0.0, f64::max));
            }
        }
        worst
    });
    let mut worst: f64 = 0.0;
    for (&(o, q, a), &r) in jobs.iter().zip(&res) {
        worst = worst.max(r);
        if r.is_nan() || r > tol {
            report.push_violation(NetError::CausalityViolated {
                o: net.label(o).into(),
                other: net.label(q).into(),
                upper: net.label(a).into(),
                residual: r,
            });
        }
    }
    report.push_check(Check::numeric("disjoint images commute", worst, tol));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FinDimAlgebra, StarHom};
    use crate::algebra::matrix::{identity, unit};
    use crate::poset::Poset;
    use std::collections::BTreeMap;
    use std::sync::Arc;

    fn vee() -> Arc<Poset> {
        Arc::new(
            Poset::new(
                ["l", "r", "t"].map(String::from).to_vec(),
                &[("l", "t"), ("r", "t")],
            )
            .unwrap(),
        )
    }

    #[test]
    fn commutative_fibres_pass() {
        let net = Net::constant(vee(), &FinDimAlgebra::commutative(3));
        let d = Disjointness::symmetric(vee(), [(0, 1)]);
        assert!(check_causality(&net, &d).passed());
    }

    #[test]
    fn constant_matrix_net_fails() {
        let net = Net::constant(vee(), &FinDimAlgebra::matrix(2));
        let d = Disjointness::symmetric(vee(), [(0, 1)]);
        let r = check_causality(&net, &d);
        assert!(matches!(r.violations[0], NetError::CausalityViolated { .. }));
    }

    #[test]
    fn tensor_legs_commute() {
        // M_2 → M_2 ⊗ M_2 as a ⊗ 1 and as 1 ⊗ a
        let m2 = FinDimAlgebra::matrix(2);
        let m4 = FinDimAlgebra::matrix(4);
        let left = StarHom::standard(m2.clone(), m4.clone(), vec![vec![2]]).unwrap();
        // 1 ⊗ a is a ⊗ 1 conjugated by the swap of tensor factors
        let mut swap = identity(4) * num_complex::Complex64::new(0.0, 0.0);
        for (x, y) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap += unit(4, x, y);
        }
        let right = StarHom::new(m2.clone(), m4.clone(), vec![vec![2]], vec![swap]).unwrap();
        let inc: BTreeMap<_, _> = [((0, 2), left), ((1, 2), right)].into_iter().collect();
        let net = Net::new(vee(), vec![m2.clone(), m2, m4], inc).unwrap();
        let d = Disjointness::symmetric(vee(), [(0, 1)]);
        let r = check_causality(&net, &d);
        assert!(r.passed(), "{:?}", r.violations);
    }
}
