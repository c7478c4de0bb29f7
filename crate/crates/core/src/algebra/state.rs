use num_complex::Complex64;
use rand::Rng;

use super::matrix::{positive_eigenspace, random_density, trace_norm, ZERO};
use super::rep::decompose_numeric;
use super::{AlgElement, AlgebraError, CMat, CVec, FinDimAlgebra, FinRep, StarHom};

/// A state `ω(a) = Σ_s tr(ρ_s a_s)` given by its density blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    algebra: FinDimAlgebra,
    densities: Vec<CMat>,
}

impl State {
    /// Checks positivity (eigenvalues ≥ −`tol`) and normalization
    /// (`|ω(1) − 1| ≤ tol`).
    pub fn new(
        algebra: FinDimAlgebra,
        densities: Vec<CMat>,
        tol: f64,
    ) -> Result<Self, AlgebraError> {
        let st = State { algebra, densities };
        st.check(tol)?;
        Ok(st)
    }

    pub(crate) fn from_parts_unchecked(algebra: FinDimAlgebra, densities: Vec<CMat>) -> Self {
        State { algebra, densities }
    }

    pub fn check(&self, tol: f64) -> Result<(), AlgebraError> {
        let bad = |m: String| Err(AlgebraError::InvalidState(m));
        if self.densities.len() != self.algebra.num_blocks() {
            return bad("one density block per algebra block".into());
        }
        let mut total = 0.0;
        for (s, rho) in self.densities.iter().enumerate() {
            let n = self.algebra.block(s);
            if rho.nrows() != n || rho.ncols() != n {
                return bad(format!("density block {s} has the wrong shape"));
            }
            let herm = super::matrix::op_norm(&(rho - rho.adjoint()));
            if herm > tol {
                return bad(format!("density block {s} is not Hermitian ({herm:e})"));
            }
            let h = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
            let min = h.symmetric_eigenvalues().min();
            if min < -tol {
                return bad(format!("density block {s} has eigenvalue {min:e}"));
            }
            total += rho.trace().re;
        }
        if (total - 1.0).abs() > tol {
            return bad(format!("ω(1) = {total}"));
        }
        Ok(())
    }

    pub fn algebra(&self) -> &FinDimAlgebra {
        &self.algebra
    }

    pub fn densities(&self) -> &[CMat] {
        &self.densities
    }

    /// The trace of the defining representation, normalized.
    pub fn trace(algebra: &FinDimAlgebra) -> Self {
        let d = algebra.rows() as f64;
        let densities = algebra
            .blocks()
            .iter()
            .map(|&n| CMat::identity(n, n) / Complex64::new(d, 0.0))
            .collect();
        State::from_parts_unchecked(algebra.clone(), densities)
    }

    /// Block weights with maximally mixed blocks.
    pub fn block_weights(algebra: &FinDimAlgebra, weights: &[f64]) -> Result<Self, AlgebraError> {
        if weights.len() != algebra.num_blocks() {
            return Err(AlgebraError::InvalidState("one weight per block".into()));
        }
        let densities = algebra
            .blocks()
            .iter()
            .zip(weights)
            .map(|(&n, &w)| CMat::identity(n, n) * Complex64::new(w / n as f64, 0.0))
            .collect();
        State::new(algebra.clone(), densities, 1e-12)
    }

    /// The vector state `a ↦ ⟨v, a_s v⟩` on block `s`.
    pub fn vector(algebra: &FinDimAlgebra, s: usize, v: &CVec) -> Result<Self, AlgebraError> {
        let nrm = v.norm();
        if v.len() != algebra.block(s) || nrm == 0.0 {
            return Err(AlgebraError::InvalidState("bad vector".into()));
        }
        let v = v / Complex64::new(nrm, 0.0);
        let mut densities: Vec<CMat> = algebra
            .blocks()
            .iter()
            .map(|&n| CMat::zeros(n, n))
            .collect();
        densities[s] = &v * v.adjoint();
        Ok(State::from_parts_unchecked(algebra.clone(), densities))
    }

    /// A faithful random state with weights drawn uniformly.
    pub fn random<R: Rng + ?Sized>(algebra: &FinDimAlgebra, rng: &mut R) -> Self {
        let w: Vec<f64> = (0..algebra.num_blocks())
            .map(|_| rng.random_range(0.1..1.0))
            .collect();
        let total: f64 = w.iter().sum();
        let densities = algebra
            .blocks()
            .iter()
            .zip(&w)
            .map(|(&n, &wi)| random_density(n, rng) * Complex64::new(wi / total, 0.0))
            .collect();
        State::from_parts_unchecked(algebra.clone(), densities)
    }

    pub fn eval(&self, a: &AlgElement) -> Complex64 {
        self.densities
            .iter()
            .zip(&a.blocks)
            .map(|(rho, x)| (rho * x).trace())
            .sum()
    }

    /// `ω ∘ φ` for `φ` into the algebra of `self`.
    pub fn pullback(&self, phi: &StarHom) -> Result<State, AlgebraError> {
        if phi.target() != &self.algebra {
            return Err(AlgebraError::Incomposable);
        }
        let src = phi.source();
        let mut densities: Vec<CMat> = src.blocks().iter().map(|&n| CMat::zeros(n, n)).collect();
        for (t, rho) in self.densities.iter().enumerate() {
            let u = &phi.conj()[t];
            let sigma = u.adjoint() * rho * u;
            for (s, _, off) in phi.layout(t) {
                let n = src.block(s);
                densities[s] += sigma.view((off, off), (n, n));
            }
        }
        Ok(State::from_parts_unchecked(src.clone(), densities))
    }

    /// Functional norm `‖ω − ν‖`, the sum of blockwise trace norms.
    pub fn distance(&self, other: &State) -> f64 {
        if self.algebra != other.algebra {
            return f64::INFINITY;
        }
        self.densities
            .iter()
            .zip(&other.densities)
            .map(|(a, b)| trace_norm(&(a - b)))
            .sum()
    }

    /// Convex combination with weights that sum to one.
    pub fn mix(states: &[State], weights: &[f64]) -> Result<State, AlgebraError> {
        let first = states
            .first()
            .ok_or_else(|| AlgebraError::InvalidState("nothing to mix".into()))?;
        let mut densities: Vec<CMat> = first
            .algebra
            .blocks()
            .iter()
            .map(|&n| CMat::zeros(n, n))
            .collect();
        for (st, &w) in states.iter().zip(weights) {
            if st.algebra != first.algebra {
                return Err(AlgebraError::ShapeMismatch("states on different algebras".into()));
            }
            for (acc, rho) in densities.iter_mut().zip(&st.densities) {
                *acc += rho * Complex64::new(w, 0.0);
            }
        }
        Ok(State::from_parts_unchecked(first.algebra.clone(), densities))
    }
}

/// Output of the GNS construction.
#[derive(Debug, Clone)]
pub struct Gns {
    pub rep: FinRep,
    pub cyclic: CVec,
}

/// GNS representation of `ω`, decomposed into structural form.
///
/// The Hilbert space is the algebra modulo `{a : ω(a*a) = 0}`; the Gram
/// matrix of the matrix-unit basis is diagonalized and eigenvalues below
/// `1e−12` are treated as null directions.
pub fn gns(omega: &State) -> Result<Gns, AlgebraError> {
    let alg = omega.algebra();
    let units = alg.matrix_units();
    let dim = units.len();
    let index = |s: usize, i: usize, j: usize| -> usize {
        let off: usize = alg.blocks()[..s].iter().map(|n| n * n).sum();
        off + i * alg.block(s) + j
    };
    // ⟨e^s_ij, e^s_kl⟩ = ω(e^s_ji e^s_kl) = δ_ik ω(e^s_jl) = δ_ik ρ_s[l][j]
    let mut gram = CMat::zeros(dim, dim);
    for &(s, i, j) in &units {
        for l in 0..alg.block(s) {
            gram[(index(s, i, j), index(s, i, l))] = omega.densities[s][(l, j)];
        }
    }
    let (vals, vecs) = positive_eigenspace(&gram, 1e-12);
    let r = vals.len();
    let sqrt = CMat::from_diagonal(&CVec::from_iterator(
        r,
        vals.iter().map(|v| Complex64::new(v.sqrt(), 0.0)),
    ));
    let inv_sqrt = CMat::from_diagonal(&CVec::from_iterator(
        r,
        vals.iter().map(|v| Complex64::new(1.0 / v.sqrt(), 0.0)),
    ));
    let to_h = &sqrt * vecs.adjoint(); // coefficients -> H
    let from_h = &vecs * &inv_sqrt; // H -> coefficients
    let coeffs = |a: &AlgElement| -> CVec {
        let mut v = CVec::from_element(dim, ZERO);
        for &(s, i, j) in &units {
            v[index(s, i, j)] = a.blocks[s][(i, j)];
        }
        v
    };
    let left = |a: &AlgElement| -> CMat {
        let mut m = CMat::zeros(dim, dim);
        for &(s, i, j) in &units {
            let prod = a.mul(&alg.unit_element(s, i, j));
            m.set_column(index(s, i, j), &coeffs(&prod));
        }
        &to_h * m * &from_h
    };
    let images: Vec<CMat> = units
        .iter()
        .map(|&(s, i, j)| left(&alg.unit_element(s, i, j)))
        .collect();
    let hom = decompose_numeric(alg, r, |s, i, j| images[index(s, i, j)].clone())?;
    let rep = FinRep::new(hom)?;
    let cyclic = &to_h * coeffs(&alg.one());
    Ok(Gns { rep, cyclic })
}

impl Gns {
    /// `⟨Ω, π(a) Ω⟩`.
    pub fn expectation(&self, a: &AlgElement) -> Complex64 {
        let v = self.rep.act(a) * &self.cyclic;
        self.cyclic.dotc(&v)
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn alg(b: &[usize]) -> FinDimAlgebra {
        FinDimAlgebra::new(b.to_vec()).unwrap()
    }

    use crate::algebra::matrix::ONE;

    fn basis(n: usize, k: usize) -> CVec {
        CVec::from_fn(n, |i, _| if i == k { ONE } else { ZERO })
    }

    #[test]
    fn state_axioms_are_checked() {
        let a = alg(&[2]);
        assert!(State::new(a.clone(), vec![CMat::identity(2, 2)], 1e-12).is_err());
        let st = State::trace(&a);
        st.check(1e-12).unwrap();
        assert!((st.eval(&a.one()) - ONE).norm() < 1e-15);
    }

    #[test]
    fn gns_dimensions_match_gram_rank() {
        let c2 = alg(&[1, 1]);
        let st = State::block_weights(&c2, &[1.0, 0.0]).unwrap();
        assert_eq!(gns(&st).unwrap().dim(), 1);
        let m2 = alg(&[2]);
        assert_eq!(gns(&State::trace(&m2)).unwrap().dim(), 4);
        let pure = State::vector(&m2, 0, &basis(2, 0)).unwrap();
        assert_eq!(gns(&pure).unwrap().dim(), 2);
    }

    #[test]
    fn gns_reproduces_the_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = alg(&[1, 2]);
        let st = State::random(&a, &mut rng);
        let g = gns(&st).unwrap();
        for _ in 0..5 {
            let x = a.random_element(&mut rng);
            assert!((g.expectation(&x) - st.eval(&x)).norm() < 1e-10);
        }
    }

    #[test]
    fn pullback_along_amplification() {
        let a = alg(&[2]);
        let amp = StarHom::amplify(&a, 3);
        let st = State::trace(amp.target());
        let back = st.pullback(&amp).unwrap();
        assert!(back.distance(&State::trace(&a)) < 1e-14);
    }
}
