//! The cylinder posets `C_N`, marked circles and their interval posets, and
//! the faithful representation builder over `C_N`.

pub mod circle;
mod embed;

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::cmrep::{cm_rep, solve_intertwiner_cm, CmError, SymbolicUnitary};
use crate::net::{Net, NetError, SymbolicNetRep};
use crate::poset::{Poset, PosetError};

pub use circle::{iso_pn_cn, GridPoset, IntervalPoset, MarkedCircle, Turn};
pub use embed::{embed_into_pn, transport_net, PnEmbedding};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CylinderError {
    #[error("N = {0} is too small; need N >= 2")]
    NTooSmall(usize),
    #[error("two markers coincide")]
    RepeatedMarker,
    #[error("cannot read {0:?} as a rational number")]
    BadNumber(String),
    #[error("arc {0} is not in I_N: its closure meets every marker")]
    NotInIN(String),
    #[error("no admissible marker interval for arc {0}")]
    NoAdmissibleTarget(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("not a cylinder poset: {0}")]
    NotACylinder(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Cm(#[from] CmError),
}

/// `(x)_N`: the representative of `x` mod `N` in `1..=N`.
pub fn modn(x: i64, n: usize) -> usize {
    let n = n as i64;
    let r = x.rem_euclid(n);
    if r == 0 {
        n as usize
    } else {
        r as usize
    }
}

pub fn cylinder_label(i: usize, l: usize) -> String {
    format!("({i},{l})")
}

pub fn parse_cylinder_label(s: &str) -> Option<(usize, usize)> {
    let t = s.strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = t.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// Index of `(i, l)` in [`cylinder_poset`].
pub fn cylinder_index(n: usize, i: usize, l: usize) -> usize {
    (i - 1) * n + (l - 1)
}

/// `C_N`: elements `(i, l)` with covers `(i, l) < (i, l+1)` and
/// `(i, l) < ((i−1)_N, l+1)`.
pub fn cylinder_poset(n: usize) -> Result<Poset, CylinderError> {
    if n < 2 {
        return Err(CylinderError::NTooSmall(n));
    }
    let mut labels = Vec::with_capacity(n * n);
    for i in 1..=n {
        for l in 1..=n {
            labels.push(cylinder_label(i, l));
        }
    }
    let mut covers = Vec::with_capacity(2 * n * (n - 1));
    for i in 1..=n {
        for l in 1..n {
            let lo = cylinder_index(n, i, l);
            covers.push((lo, cylinder_index(n, i, l + 1)));
            covers.push((lo, cylinder_index(n, modn(i as i64 - 1, n), l + 1)));
        }
    }
    Ok(Poset::from_indices(labels, covers)?)
}

/// `N` with `p == cylinder_poset(N)`.
pub fn cylinder_size(p: &Poset) -> Result<usize, CylinderError> {
    let n = (p.len() as f64).sqrt().round() as usize;
    if n < 2 || n * n != p.len() || *p != cylinder_poset(n)? {
        return Err(CylinderError::NotACylinder(format!(
            "{} elements, not C_N in canonical labelling",
            p.len()
        )));
    }
    Ok(n)
}

/// The column steps `i → i'` with `i' ≠ i` taken along a walk of covers.
pub fn column_transitions(n: usize, path: &[usize]) -> Vec<(usize, usize)> {
    path.windows(2)
        .filter_map(|w| {
            let (i, j) = (w[0] / n + 1, w[1] / n + 1);
            (i != j).then_some((i, j))
        })
        .collect()
}

/// The transition sequence `i₁ → (i₁−1)_N → … → i_k` forced on every cover
/// path from `(i₁, l₁)` up to `(i_k, l_k)`.
pub fn expected_transitions(n: usize, from: (usize, usize), to: (usize, usize)) -> Vec<(usize, usize)> {
    let steps = (from.0 as i64 - to.0 as i64).rem_euclid(n as i64) as usize;
    (0..steps)
        .map(|s| {
            let a = modn(from.0 as i64 - s as i64, n);
            (a, modn(a as i64 - 1, n))
        })
        .collect()
}

/// The representation of a net over `C_N` built column by column: `ρ_i` is
/// the countable-multiplicity representation of the top fibre `𝒜_{(i,N)}`,
/// `π_{(i,l)} = ρ_i ∘ ȷ_{(i,N)(i,l)}`, operators inside a column are the
/// identity and every cross cover out of column `i` uses one unitary
/// intertwining the two restrictions at row `N−1`.
pub fn build_cylinder_rep(net: Arc<Net>) -> Result<SymbolicNetRep, CylinderError> {
    let n = cylinder_size(net.poset())?;
    net.validate().into_result()?;
    let table = net.inclusion_table()?;
    let idx = |i: usize, l: usize| cylinder_index(n, i, l);
    let rho: Vec<_> = (1..=n).map(|i| cm_rep(net.fibre(idx(i, n)))).collect();
    let mut pi = vec![None; n * n];
    for i in 1..=n {
        for l in 1..=n {
            let j = &table[&(idx(i, l), idx(i, n))];
            pi[idx(i, l)] = Some(rho[i - 1].restrict(j)?.0);
        }
    }
    let pi: Vec<_> = pi.into_iter().map(|p| p.expect("every element")).collect();
    // cross unitary out of column i into column (i−1)_N
    let mut cross = Vec::with_capacity(n);
    for i in 1..=n {
        let left = modn(i as i64 - 1, n);
        let below = idx(i, n - 1);
        let (other, _) = rho[left - 1].restrict(&table[&(below, idx(left, n))])?;
        cross.push(solve_intertwiner_cm(&pi[below], &other)?);
    }
    let mut v = BTreeMap::new();
    for &(lo, hi) in net.poset().covers() {
        let (i, j) = (lo / n + 1, hi / n + 1);
        let w = if i == j {
            SymbolicUnitary::identity(rho[i - 1].carrier().blocks().to_vec())
        } else {
            cross[i - 1].clone()
        };
        v.insert((lo, hi), w);
    }
    Ok(SymbolicNetRep::new(net, pi, v)?)
}

/// A faithful representation of a net over a grid poset: embed into `P_N`,
/// move to `C_N`, build the cylinder representation and pull it back.
pub fn faithful_grid_rep(grid: &GridPoset, net: Arc<Net>) -> Result<SymbolicNetRep, CylinderError> {
    let e = embed_into_pn(grid, net)?;
    let cn = Arc::new(cylinder_poset(e.pn.n())?);
    let (fwd, _) = iso_pn_cn(&e.pn, &cn)?;
    let (cn_net, to_cn) = transport_net(e.net.clone(), &fwd)?;
    let rep = build_cylinder_rep(cn_net)?;
    let m = to_cn.compose(&e.morphism)?;
    Ok(rep.pullback(&m)?)
}
