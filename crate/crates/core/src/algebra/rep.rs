use num_complex::Complex64;

use super::matrix::{positive_eigenspace, unitarity_residual};
use super::{AlgElement, AlgebraError, CMat, FinDimAlgebra, StarHom};

/// A unital representation on `ℂ^d`: a [`StarHom`] into `M_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinRep {
    hom: StarHom,
}

impl FinRep {
    pub fn new(hom: StarHom) -> Result<Self, AlgebraError> {
        if hom.target().num_blocks() != 1 {
            return Err(AlgebraError::ShapeMismatch(format!(
                "a representation targets one matrix block, not {}",
                hom.target()
            )));
        }
        Ok(FinRep { hom })
    }

    /// `ρ ⊕ ρ ⊕ …` style representation from multiplicities alone.
    pub fn from_multiplicities(
        algebra: &FinDimAlgebra,
        mult: Vec<usize>,
    ) -> Result<Self, AlgebraError> {
        let d: usize = mult.iter().zip(algebra.blocks()).map(|(m, n)| m * n).sum();
        let target = FinDimAlgebra::new(vec![d]).map_err(|_| {
            AlgebraError::ShapeMismatch("representation of dimension zero".into())
        })?;
        Self::new(StarHom::standard(algebra.clone(), target, vec![mult])?)
    }

    pub fn hom(&self) -> &StarHom {
        &self.hom
    }

    pub fn source(&self) -> &FinDimAlgebra {
        self.hom.source()
    }

    pub fn dim(&self) -> usize {
        self.hom.target().block(0)
    }

    pub fn act(&self, a: &AlgElement) -> CMat {
        self.hom.apply(a).blocks.swap_remove(0)
    }

    /// How often each irreducible block occurs.
    pub fn multiplicity_vector(&self) -> Vec<usize> {
        self.hom.mult()[0].clone()
    }

    pub fn is_faithful(&self) -> bool {
        self.hom.is_injective()
    }

    /// `ρ₁ ⊕ ρ₂`.
    pub fn direct_sum(&self, other: &FinRep) -> Result<FinRep, AlgebraError> {
        if self.source() != other.source() {
            return Err(AlgebraError::Incomposable);
        }
        let mult: Vec<usize> = self
            .multiplicity_vector()
            .iter()
            .zip(other.multiplicity_vector())
            .map(|(a, b)| a + b)
            .collect();
        let plain = FinRep::from_multiplicities(self.source(), mult)?;
        // u₁ ⊕ u₂ followed by the shuffle that interleaves copies by block
        let images = |s, i, j| {
            let e = self.source().unit_element(s, i, j);
            super::matrix::direct_sum(&[&self.act(&e), &other.act(&e)])
        };
        let hom = decompose_numeric(self.source(), plain.dim(), images)?;
        debug_assert_eq!(hom.mult(), plain.hom.mult());
        FinRep::new(hom)
    }
}

/// Recover the structural form of a representation given numerically by
/// the images of the matrix units.
///
/// For each block `s` an orthonormal basis `v_k` of the range of `π(e^s_00)`
/// is chosen; the columns `π(e^s_r0) v_k`, ordered by block, copy and row,
/// form the conjugating unitary.
pub fn decompose_numeric<F>(
    algebra: &FinDimAlgebra,
    d: usize,
    images: F,
) -> Result<StarHom, AlgebraError>
where
    F: Fn(usize, usize, usize) -> CMat,
{
    let mut u = CMat::zeros(d, d);
    let mut col = 0;
    let mut mult = vec![0; algebra.num_blocks()];
    for (s, &n) in algebra.blocks().iter().enumerate() {
        let p = images(s, 0, 0);
        if p.nrows() != d || p.ncols() != d {
            return Err(AlgebraError::ShapeMismatch(format!(
                "image of a matrix unit is {:?}, expected {d}x{d}",
                p.shape()
            )));
        }
        let h = (&p + p.adjoint()) * Complex64::new(0.5, 0.0);
        let (_, range) = positive_eigenspace(&h, 0.5);
        mult[s] = range.ncols();
        let lifts: Vec<CMat> = (0..n).map(|r| images(s, r, 0)).collect();
        for k in 0..range.ncols() {
            let v = range.column(k);
            for lift in &lifts {
                if col >= d {
                    return Err(AlgebraError::NotARepresentation(
                        "matrix units span more than the space".into(),
                    ));
                }
                u.set_column(col, &(lift * v));
                col += 1;
            }
        }
    }
    if col != d {
        return Err(AlgebraError::NotARepresentation(format!(
            "not unital: matrix units span {col} of {d} dimensions"
        )));
    }
    let residual = unitarity_residual(&u);
    if residual > 1e-8 {
        return Err(AlgebraError::NotARepresentation(format!(
            "recovered basis is not orthonormal ({residual:e})"
        )));
    }
    let target = FinDimAlgebra::new(vec![d]).map_err(|_| {
        AlgebraError::ShapeMismatch("representation of dimension zero".into())
    })?;
    StarHom::new(algebra.clone(), target, vec![mult], vec![u])
}

/// A unitary `w` with `w ρ₁(a) = ρ₂(a) w`, checked on matrix units.
pub fn solve_intertwiner_fin(r1: &FinRep, r2: &FinRep, tol: f64) -> Result<CMat, AlgebraError> {
    if r1.source() != r2.source() {
        return Err(AlgebraError::Incomposable);
    }
    let (m1, m2) = (r1.multiplicity_vector(), r2.multiplicity_vector());
    if m1 != m2 {
        return Err(AlgebraError::NotUnitarilyEquivalent(m1, m2));
    }
    // both are u_i D(a) u_i*, with the same D
    let w = &r2.hom().conj()[0] * r1.hom().conj()[0].adjoint();
    let residual = intertwining_residual(r1, r2, &w);
    if residual > tol {
        return Err(AlgebraError::NotARepresentation(format!(
            "intertwiner residual {residual:e} exceeds {tol:e}"
        )));
    }
    Ok(w)
}

/// `max_e ‖w ρ₁(e) − ρ₂(e) w‖` over matrix units.
pub fn intertwining_residual(r1: &FinRep, r2: &FinRep, w: &CMat) -> f64 {
    let alg = r1.source();
    alg.matrix_units()
        .into_iter()
        .map(|(s, i, j)| {
            let e = alg.unit_element(s, i, j);
            super::matrix::op_norm(&(w * r1.act(&e) - r2.act(&e) * w))
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::matrix::random_unitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn alg(b: &[usize]) -> FinDimAlgebra {
        FinDimAlgebra::new(b.to_vec()).unwrap()
    }

    /// Commutant dimension by brute force: the null space of
    /// `X ↦ [π(e), X]` over all matrix units.
    fn commutant_dim(r: &FinRep) -> usize {
        let d = r.dim();
        let alg = r.source();
        let units = alg.matrix_units();
        let mut rows = CMat::zeros(units.len() * d * d, d * d);
        for (k, &(s, i, j)) in units.iter().enumerate() {
            let p = r.act(&alg.unit_element(s, i, j));
            for x in 0..d * d {
                let mut basis = CMat::zeros(d, d);
                basis[(x / d, x % d)] = Complex64::new(1.0, 0.0);
                let c = &p * &basis - &basis * &p;
                for y in 0..d * d {
                    rows[(k * d * d + y, x)] = c[(y / d, y % d)];
                }
            }
        }
        let sv = rows.singular_values();
        sv.iter().filter(|&&v| v < 1e-9).count() + (d * d).saturating_sub(sv.len())
    }

    #[test]
    fn identity_rep_and_doubling() {
        let m3 = alg(&[3]);
        let id = FinRep::new(StarHom::identity(&m3)).unwrap();
        assert_eq!(id.multiplicity_vector(), vec![1]);
        assert_eq!(id.direct_sum(&id).unwrap().multiplicity_vector(), vec![2]);
    }

    #[test]
    fn restriction_along_diagonal_embedding() {
        let j = StarHom::standard(alg(&[2]), alg(&[4]), vec![vec![2]]).unwrap();
        let r = FinRep::new(j).unwrap();
        assert_eq!(r.multiplicity_vector(), vec![2]);
        // Σ m_s² from the commutant oracle
        assert_eq!(commutant_dim(&r), 4);
    }

    #[test]
    fn multiplicities_agree_with_commutant() {
        let a = alg(&[1, 2]);
        let r = FinRep::from_multiplicities(&a, vec![2, 1]).unwrap();
        assert_eq!(commutant_dim(&r), 5);
    }

    #[test]
    fn intertwiners() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = alg(&[1, 2]);
        let r1 = FinRep::from_multiplicities(&a, vec![1, 2]).unwrap();
        let u = AlgElement {
            blocks: vec![random_unitary(5, &mut rng)],
        };
        let r2 = FinRep::new(r1.hom().then_inner(&u).unwrap()).unwrap();
        let w = solve_intertwiner_fin(&r1, &r2, 1e-10).unwrap();
        assert!(intertwining_residual(&r1, &r2, &w) <= 1e-10);
        let same = solve_intertwiner_fin(&r1, &r1, 1e-12).unwrap();
        assert!((same - CMat::identity(5, 5)).norm() < 1e-14);
        let other = FinRep::from_multiplicities(&a, vec![3, 1]).unwrap();
        assert!(matches!(
            solve_intertwiner_fin(&r1, &other, 1e-10),
            Err(AlgebraError::NotUnitarilyEquivalent(..))
        ));
    }

    #[test]
    fn numeric_decomposition_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = alg(&[2, 1]);
        let r = FinRep::from_multiplicities(&a, vec![1, 2]).unwrap();
        let u = AlgElement {
            blocks: vec![random_unitary(4, &mut rng)],
        };
        let twisted = FinRep::new(r.hom().then_inner(&u).unwrap()).unwrap();
        let hom = decompose_numeric(&a, 4, |s, i, j| twisted.act(&a.unit_element(s, i, j)))
            .unwrap();
        assert_eq!(hom.mult(), &[vec![1, 2]]);
        assert!(hom.distance(twisted.hom()) < 1e-10);
    }
}
