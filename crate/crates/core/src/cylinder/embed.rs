use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::circle::{Arc as CircleArc, GridPoset, IntervalPoset};
use super::CylinderError;
use crate::algebra::StarHom;
use crate::net::{Net, NetMorphism};
use crate::poset::PosetMorphism;

/// A net over `P_N` together with the morphism from the grid net.
#[derive(Debug, Clone)]
pub struct PnEmbedding {
    pub pn: IntervalPoset,
    pub net: Arc<Net>,
    pub morphism: NetMorphism,
    /// For each element of `P_N`, the grid element whose fibre it carries.
    pub maxima: Vec<usize>,
}

/// Push a net forward along a poset isomorphism; the returned morphism has
/// identity fibre maps.
pub fn transport_net(
    net: Arc<Net>,
    iso: &PosetMorphism,
) -> Result<(Arc<Net>, NetMorphism), CylinderError> {
    if *iso.source != **net.poset() || !iso.is_isomorphism() {
        return Err(CylinderError::NotACylinder(
            "transport needs an isomorphism out of the net's poset".into(),
        ));
    }
    let n = net.poset().len();
    let mut fibres = vec![None; n];
    for o in 0..n {
        fibres[iso.apply(o)] = Some(net.fibre(o).clone());
    }
    let fibres = fibres.into_iter().map(|f| f.expect("bijection")).collect();
    let inc: BTreeMap<_, _> = net
        .inclusions()
        .iter()
        .map(|(&(lo, hi), h)| ((iso.apply(lo), iso.apply(hi)), h.clone()))
        .collect();
    let out = Arc::new(Net::new(iso.target.clone(), fibres, inc)?);
    let homs = net.fibres().iter().map(StarHom::identity).collect();
    let m = NetMorphism::new(net, out.clone(), iso.clone(), homs)?;
    Ok((out, m))
}

/// The net over `P_N` whose fibre at `(x_i, x_k)` is the fibre at the
/// maximum of `{o : cl(o) ⊂ (x_i, x_k)}`, with `η_o` the inclusion of `o`
/// into the maximum for `rf(o)`.
pub fn embed_into_pn(grid: &GridPoset, net: Arc<Net>) -> Result<PnEmbedding, CylinderError> {
    if **net.poset() != *grid.poset {
        return Err(CylinderError::NotACylinder(
            "the net does not live on the grid poset".into(),
        ));
    }
    let circle = &grid.circle;
    if let Some(a) = grid.arcs.iter().find(|a| !circle.in_in(a)) {
        return Err(CylinderError::NotInIN(a.to_string()));
    }
    let pn = IntervalPoset::new(circle.clone())?;
    let n = circle.n();
    let points = circle.grid().expect("grid poset has a grid");
    let by_arc: HashMap<CircleArc, usize> =
        grid.arcs.iter().enumerate().map(|(o, a)| (*a, o)).collect();
    let p = net.poset();
    let mut maxima = vec![0; n * n];
    for i in 1..=n {
        for k in 1..=n {
            let target = circle.interval(i, k);
            let inside: Vec<_> = points.iter().copied().filter(|&x| target.contains(x)).collect();
            // first and last grid points strictly inside, clockwise from x_i
            let first = inside
                .iter()
                .copied()
                .min_by_key(|&x| super::circle::gap(target.start, x));
            let last = inside
                .iter()
                .copied()
                .max_by_key(|&x| super::circle::gap(target.start, x));
            let top = match (first, last) {
                (Some(u), Some(v)) if u != v => by_arc.get(&CircleArc::new(u, v)).copied(),
                _ => None,
            };
            let set = grid.truncated_set(i, k);
            let top = top.filter(|t| set.contains(t) && set.iter().all(|&o| p.leq_idx(o, *t)));
            maxima[pn.index(i, k)] = top.ok_or_else(|| {
                CylinderError::GridTooCoarse(format!("no maximum below {}", target))
            })?;
        }
    }
    let fibres = maxima.iter().map(|&m| net.fibre(m).clone()).collect();
    let inc = pn
        .poset
        .covers()
        .iter()
        .map(|&(lo, hi)| Ok(((lo, hi), net.derived_inclusion(maxima[lo], maxima[hi])?)))
        .collect::<Result<BTreeMap<_, _>, CylinderError>>()?;
    let pn_net = Arc::new(Net::new(pn.poset.clone(), fibres, inc)?);
    let rf = grid.quotient_map()?;
    let map: Vec<usize> = rf.iter().map(|&(i, k)| pn.index(i, k)).collect();
    let homs = (0..p.len())
        .map(|o| net.derived_inclusion(o, maxima[map[o]]))
        .collect::<Result<Vec<_>, _>>()?;
    let poset_map = PosetMorphism::new(p.clone(), pn.poset.clone(), map)?;
    let morphism = NetMorphism::new(net, pn_net.clone(), poset_map, homs)?;
    Ok(PnEmbedding {
        pn,
        net: pn_net,
        morphism,
        maxima,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FinDimAlgebra;
    use crate::cylinder::MarkedCircle;

    #[test]
    fn constant_grid_net_embeds() {
        let c = MarkedCircle::uniform(3).unwrap().with_uniform_grid(9).unwrap();
        let grid = GridPoset::new(c, true).unwrap();
        let a = FinDimAlgebra::new(vec![1, 2]).unwrap();
        let net = Arc::new(Net::constant(grid.poset.clone(), &a));
        let e = embed_into_pn(&grid, net).unwrap();
        assert!(e.net.validate().passed());
        let r = e.morphism.validate();
        assert!(r.passed(), "{:?}", r.violations);
        assert!(e.morphism.is_faithful());
    }

    #[test]
    fn full_grid_is_rejected() {
        let c = MarkedCircle::uniform(2).unwrap().with_uniform_grid(6).unwrap();
        let grid = GridPoset::new(c, false).unwrap();
        let net = Arc::new(Net::constant(grid.poset.clone(), &FinDimAlgebra::matrix(1)));
        assert!(matches!(
            embed_into_pn(&grid, net),
            Err(CylinderError::NotInIN(_))
        ));
    }
}
