//! Invariant states under a single automorphism (Cesàro means) and under
//! finite groups (exact averaging).

use num_complex::Complex64;

use super::matrix::{identity, ZERO};
use super::{hom_equal, AlgebraError, CMat, State, StarHom};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantOptions {
    /// Required `‖ω∘α − ω‖`.
    pub tol: f64,
    /// Largest number of averaged iterates.
    pub max_steps: u64,
}

impl Default for InvariantOptions {
    fn default() -> Self {
        InvariantOptions {
            tol: 1e-8,
            max_steps: 1 << 40,
        }
    }
}

/// `Σ_{q<k} z^q` for `|z| = 1`.
fn geometric(z: Complex64, k: u64) -> Complex64 {
    if (z - 1.0).norm() < 1e-13 {
        return Complex64::new(k as f64, 0.0);
    }
    let zk = Complex64::from_polar(1.0, z.arg() * k as f64);
    (Complex64::new(1.0, 0.0) - zk) / (Complex64::new(1.0, 0.0) - z)
}

/// Orbit data of one block under the dual action.
struct Cycle {
    /// `blocks[r]` is where the density of `blocks[0]` sits after `r` steps.
    blocks: Vec<usize>,
    /// `transport[r] = u_{b_0} ⋯ u_{b_{r−1}}`.
    transport: Vec<CMat>,
    /// Schur vectors and unit eigenvalues of the return map.
    q: CMat,
    eig: Vec<Complex64>,
}

fn cycles(alpha: &StarHom) -> Result<Vec<Cycle>, AlgebraError> {
    let sigma = alpha.automorphism_blocks()?;
    let u = alpha.conj();
    let mut out = Vec::new();
    for start in 0..sigma.len() {
        // every block starts its own orbit; densities are linear per block
        let mut blocks = vec![start];
        let mut transport = vec![identity(u[start].nrows())];
        let mut cur = start;
        loop {
            let w = transport.last().expect("nonempty") * &u[cur];
            cur = sigma[cur];
            if cur == start {
                let (q, t) = w.schur().unpack();
                let eig = (0..t.nrows())
                    .map(|a| {
                        let l = t[(a, a)];
                        l / l.norm()
                    })
                    .collect();
                out.push(Cycle {
                    blocks,
                    transport,
                    q,
                    eig,
                });
                break;
            }
            blocks.push(cur);
            transport.push(w);
        }
    }
    Ok(out)
}

/// `(1/m) Σ_{n<m} ω₀ ∘ αⁿ` in closed form.
fn cesaro_mean(omega0: &State, cycles: &[Cycle], m: u64) -> State {
    let alg = omega0.algebra();
    let mut dens: Vec<CMat> = alg.blocks().iter().map(|&n| CMat::zeros(n, n)).collect();
    for (start, cyc) in cycles.iter().enumerate() {
        let rho = &omega0.densities()[start];
        let len = cyc.blocks.len() as u64;
        let rho_q = cyc.q.adjoint() * rho * &cyc.q;
        let n = rho.nrows();
        for (r, (&b, w)) in cyc.blocks.iter().zip(&cyc.transport).enumerate() {
            let r = r as u64;
            if r >= m {
                break;
            }
            let k = (m - r).div_ceil(len);
            // Σ_q H^{-q} ρ H^q in the Schur basis
            let summed = CMat::from_fn(n, n, |a, c| {
                if rho_q[(a, c)] == ZERO {
                    return ZERO;
                }
                rho_q[(a, c)] * geometric(cyc.eig[a].conj() * cyc.eig[c], k)
            });
            let back = &cyc.q * summed * cyc.q.adjoint();
            dens[b] += w.adjoint() * back * w;
        }
    }
    let scale = Complex64::new(1.0 / m as f64, 0.0);
    for d in dens.iter_mut() {
        *d *= scale;
        // remove the anti-Hermitian rounding residue
        *d = (&*d + d.adjoint()) * Complex64::new(0.5, 0.0);
    }
    State::from_parts_unchecked(alg.clone(), dens)
}

/// A state fixed by the automorphism `α` up to `opts.tol`, obtained as a
/// Cesàro mean of `ω₀ ∘ αⁿ` over a doubling number of iterates.
pub fn invariant_state(
    alpha: &StarHom,
    omega0: &State,
    opts: InvariantOptions,
) -> Result<State, AlgebraError> {
    if alpha.source() != omega0.algebra() {
        return Err(AlgebraError::Incomposable);
    }
    let cyc = cycles(alpha)?;
    let mut m: u64 = 1;
    let mut best: Option<(f64, State)> = None;
    while m <= opts.max_steps {
        let mean = cesaro_mean(omega0, &cyc, m);
        let residual = mean.pullback(alpha)?.distance(&mean);
        if residual <= opts.tol {
            return Ok(mean);
        }
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, mean));
        }
        m *= 2;
    }
    let (residual, best) = best.expect("at least one mean is formed");
    Err(AlgebraError::BudgetExceeded {
        steps: m / 2,
        residual,
        best: Box::new(best),
    })
}

/// `(1/|G|) Σ_g ω₀ ∘ α_g` after checking that the automorphisms are closed
/// under composition and contain the identity.
pub fn average_state_group(group: &[StarHom], omega0: &State) -> Result<State, AlgebraError> {
    let alg = omega0.algebra();
    if group.is_empty() {
        return Err(AlgebraError::NotAGroup("empty set".into()));
    }
    for g in group {
        if g.source() != alg || g.target() != alg || !g.is_isomorphism() {
            return Err(AlgebraError::NotAGroup("not all automorphisms".into()));
        }
    }
    let id = StarHom::identity(alg);
    if !group.iter().any(|g| hom_equal(g, &id, 1e-10)) {
        return Err(AlgebraError::NotAGroup("identity missing".into()));
    }
    for (a, g) in group.iter().enumerate() {
        for (b, h) in group.iter().enumerate() {
            let gh = g.compose(h)?;
            if !group.iter().any(|k| hom_equal(k, &gh, 1e-10)) {
                return Err(AlgebraError::NotAGroup(format!(
                    "product of elements {a} and {b} is missing"
                )));
            }
        }
    }
    let pulled = group
        .iter()
        .map(|g| omega0.pullback(g))
        .collect::<Result<Vec<_>, _>>()?;
    let w = vec![1.0 / group.len() as f64; group.len()];
    State::mix(&pulled, &w)
}
