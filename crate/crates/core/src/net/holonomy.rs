//! Holonomy of net bundles and of representations along loops.

use std::collections::HashMap;

use super::{Net, NetError, NetRep, HOM_TOL};
use crate::algebra::matrix::{identity, op_norm};
use crate::algebra::{CMat, StarHom};
use crate::homotopy::words::generator_of;
use crate::homotopy::GroupPresentation;

/// Per-generator holonomy and the worst relator residual.
#[derive(Debug, Clone)]
pub struct Holonomy<T> {
    pub generators: Vec<T>,
    pub relator_residual: f64,
}

fn bundle_check(net: &Net) -> Result<(), NetError> {
    for (&(lo, hi), h) in net.inclusions() {
        if !h.is_isomorphism() {
            return Err(NetError::NotABundle {
                lo: net.label(lo).into(),
                hi: net.label(hi).into(),
            });
        }
    }
    Ok(())
}

/// Transport along a walk of comparable elements: upward steps use the
/// derived inclusion, downward steps its inverse. The result maps the
/// fibre at the start to the fibre at the end.
pub fn walk_transport(
    net: &Net,
    table: &HashMap<(usize, usize), StarHom>,
    walk: &[usize],
) -> Result<StarHom, NetError> {
    let mut t = StarHom::identity(net.fibre(walk[0]));
    for s in walk.windows(2) {
        let (x, y) = (s[0], s[1]);
        let step = if let Some(h) = table.get(&(x, y)) {
            h.clone()
        } else if let Some(h) = table.get(&(y, x)) {
            h.inverse()?
        } else {
            return Err(NetError::NotComparable {
                lo: net.label(x).into(),
                hi: net.label(y).into(),
            });
        };
        t = step.compose(&t)?;
    }
    Ok(t)
}

/// Same as [`walk_transport`] for the inclusion operators of a
/// representation; downward steps use adjoints.
pub fn walk_unitary(
    rep: &NetRep,
    table: &HashMap<(usize, usize), CMat>,
    walk: &[usize],
) -> Result<CMat, NetError> {
    let net = rep.net();
    let mut t = identity(rep.dim());
    for s in walk.windows(2) {
        let (x, y) = (s[0], s[1]);
        let step = if let Some(u) = table.get(&(x, y)) {
            u.clone()
        } else if let Some(u) = table.get(&(y, x)) {
            u.adjoint()
        } else {
            return Err(NetError::NotComparable {
                lo: net.label(x).into(),
                hi: net.label(y).into(),
            });
        };
        t = step * t;
    }
    Ok(t)
}

/// Evaluate a word on generator images; letters apply left to right.
fn eval_word<T, C, I>(word: &[i32], gens: &[T], id: T, inv: I, compose: C) -> T
where
    T: Clone,
    C: Fn(&T, &T) -> T,
    I: Fn(&T) -> T,
{
    let mut acc = id;
    for &l in word {
        let g = &gens[generator_of(l)];
        let step = if l > 0 { g.clone() } else { inv(g) };
        acc = compose(&step, &acc);
    }
    acc
}

/// The automorphism of the base fibre for every generator loop of `pres`;
/// fails unless every relator evaluates to the identity within 1e−12.
pub fn bundle_holonomy(
    net: &Net,
    pres: &GroupPresentation,
) -> Result<Holonomy<StarHom>, NetError> {
    bundle_check(net)?;
    let table = net.inclusion_table()?;
    let generators = (0..pres.num_generators())
        .map(|g| walk_transport(net, &table, &pres.generator_loop(g)))
        .collect::<Result<Vec<_>, _>>()?;
    let base = net.fibre(pres.base);
    let id = StarHom::identity(base);
    let mut worst: f64 = 0.0;
    for (index, rel) in pres.relators.iter().enumerate() {
        let h = eval_word(
            rel,
            &generators,
            id.clone(),
            |g| g.inverse().expect("bundle automorphism"),
            |a, b| a.compose(b).expect("same fibre"),
        );
        let r = h.distance(&id);
        worst = worst.max(r);
        if r.is_nan() || r > HOM_TOL {
            return Err(NetError::RelatorViolated { index, residual: r });
        }
    }
    Ok(Holonomy {
        generators,
        relator_residual: worst,
    })
}

/// The unitary on the representation space for every generator loop.
pub fn rep_holonomy(rep: &NetRep, pres: &GroupPresentation) -> Result<Holonomy<CMat>, NetError> {
    let table = rep.operator_table()?;
    let generators = (0..pres.num_generators())
        .map(|g| walk_unitary(rep, &table, &pres.generator_loop(g)))
        .collect::<Result<Vec<_>, _>>()?;
    let id = identity(rep.dim());
    let mut worst: f64 = 0.0;
    for (index, rel) in pres.relators.iter().enumerate() {
        let h = eval_word(rel, &generators, id.clone(), |g| g.adjoint(), |a, b| a * b);
        let r = op_norm(&(h - &id));
        worst = worst.max(r);
        if r.is_nan() || r > HOM_TOL {
            return Err(NetError::RelatorViolated { index, residual: r });
        }
    }
    Ok(Holonomy {
        generators,
        relator_residual: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::matrix::random_unitary;
    use crate::algebra::{AlgElement, FinDimAlgebra, FinRep};
    use crate::poset::Poset;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;
    use std::sync::Arc;

    /// The crown: two minimal and two maximal elements, all four covers.
    fn crown() -> Arc<Poset> {
        Arc::new(
            Poset::new(
                ["a", "b", "c", "d"].map(String::from).to_vec(),
                &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
            )
            .unwrap(),
        )
    }

    #[test]
    fn identity_bundle_has_trivial_holonomy() {
        let a = FinDimAlgebra::matrix(2);
        let net = Net::constant(crown(), &a);
        let pres = GroupPresentation::new(crown(), 0).unwrap();
        let h = bundle_holonomy(&net, &pres).unwrap();
        assert_eq!(h.generators.len(), 1);
        assert!(h.generators[0].distance(&StarHom::identity(&a)) < 1e-15);
    }

    #[test]
    fn planted_unitary_is_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = FinDimAlgebra::matrix(2);
        let p = crown();
        let u = AlgElement {
            blocks: vec![random_unitary(2, &mut rng)],
        };
        let mut inc: BTreeMap<_, _> =
            p.covers().iter().map(|&c| (c, StarHom::identity(&a))).collect();
        inc.insert((1, 3), StarHom::inner(&a, &u).unwrap());
        let net = Net::new(p.clone(), vec![a.clone(); 4], inc).unwrap();
        assert!(net.validate().passed());
        let pres = GroupPresentation::new(p, 0).unwrap();
        let g = &bundle_holonomy(&net, &pres).unwrap().generators[0];
        // oracle: the loop a-c-b-d-a by hand
        let ad = StarHom::inner(&a, &u).unwrap();
        let by_hand = ad.inverse().unwrap();
        let fwd = by_hand.distance(g);
        let bwd = ad.distance(g);
        assert!(fwd.min(bwd) < 1e-12, "{fwd} {bwd}");
    }

    #[test]
    fn rep_holonomy_of_phase_loop() {
        let a = FinDimAlgebra::matrix(1);
        let p = crown();
        let net = Arc::new(Net::constant(p.clone(), &a));
        let rep = NetRep::new(
            net,
            vec![FinRep::new(StarHom::identity(&a)).unwrap(); 4],
            p.covers()
                .iter()
                .map(|&c| {
                    let z = if c == (1, 3) {
                        num_complex::Complex64::from_polar(1.0, 0.7)
                    } else {
                        num_complex::Complex64::new(1.0, 0.0)
                    };
                    (c, identity(1) * z)
                })
                .collect(),
        )
        .unwrap();
        let pres = GroupPresentation::new(p, 0).unwrap();
        let h = rep_holonomy(&rep, &pres).unwrap();
        assert!((h.generators[0][(0, 0)].arg().abs() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn non_bundle_is_rejected() {
        let p = Arc::new(Poset::new(["1", "2"].map(String::from).to_vec(), &[("1", "2")]).unwrap());
        let a = FinDimAlgebra::matrix(1);
        let b = FinDimAlgebra::matrix(2);
        let inc = [((0, 1), StarHom::standard(a.clone(), b.clone(), vec![vec![2]]).unwrap())]
            .into_iter()
            .collect();
        let net = Net::new(p.clone(), vec![a, b], inc).unwrap();
        let pres = GroupPresentation::new(p, 0).unwrap();
        assert!(matches!(
            bundle_holonomy(&net, &pres),
            Err(NetError::NotABundle { .. })
        ));
    }
}
