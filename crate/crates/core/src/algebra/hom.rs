use super::matrix::{direct_sum, identity, max_abs_diff, permutation, unitarity_residual};
use super::{AlgElement, AlgebraError, CMat, FinDimAlgebra};

/// Unitaries are accepted when `‖u*u − 1‖` is below this.
const UNITARY_TOL: f64 = 1e-9;

/// A unital *-homomorphism `φ: A → B` in structural form.
///
/// On target block `t`, `φ(a)_t = u_t · D_t(a) · u_t*` where `D_t(a)` is the
/// block-diagonal matrix holding `mult[t][s]` copies of `a_s`, ordered by
/// source block and then copy.
#[derive(Debug, Clone, PartialEq)]
pub struct StarHom {
    source: FinDimAlgebra,
    target: FinDimAlgebra,
    mult: Vec<Vec<usize>>,
    conj: Vec<CMat>,
}

impl StarHom {
    pub fn new(
        source: FinDimAlgebra,
        target: FinDimAlgebra,
        mult: Vec<Vec<usize>>,
        conj: Vec<CMat>,
    ) -> Result<Self, AlgebraError> {
        let (ks, kt) = (source.num_blocks(), target.num_blocks());
        if mult.len() != kt || mult.iter().any(|row| row.len() != ks) {
            return Err(AlgebraError::ShapeMismatch(format!(
                "multiplicity matrix must be {kt}x{ks}"
            )));
        }
        if conj.len() != kt {
            return Err(AlgebraError::ShapeMismatch(format!(
                "{} conjugating unitaries for {kt} target blocks",
                conj.len()
            )));
        }
        for (t, row) in mult.iter().enumerate() {
            let got: usize = row.iter().zip(source.blocks()).map(|(m, n)| m * n).sum();
            if got != target.block(t) {
                return Err(AlgebraError::NotUnital {
                    block: t,
                    expected: target.block(t),
                    got,
                });
            }
            let u = &conj[t];
            if u.nrows() != target.block(t) || u.ncols() != target.block(t) {
                return Err(AlgebraError::ShapeMismatch(format!(
                    "conjugating unitary {t} has shape {:?}",
                    u.shape()
                )));
            }
            let residual = unitarity_residual(u);
            if residual.is_nan() || residual > UNITARY_TOL {
                return Err(AlgebraError::NotUnitary { block: t, residual });
            }
        }
        Ok(StarHom {
            source,
            target,
            mult,
            conj,
        })
    }

    /// Multiplicities with identity conjugation.
    pub fn standard(
        source: FinDimAlgebra,
        target: FinDimAlgebra,
        mult: Vec<Vec<usize>>,
    ) -> Result<Self, AlgebraError> {
        let conj = target.blocks().iter().map(|&n| identity(n)).collect();
        Self::new(source, target, mult, conj)
    }

    pub fn identity(a: &FinDimAlgebra) -> Self {
        let k = a.num_blocks();
        let mult = (0..k)
            .map(|t| (0..k).map(|s| usize::from(s == t)).collect())
            .collect();
        Self::standard(a.clone(), a.clone(), mult).expect("identity is unital")
    }

    /// `a ↦ diag(a, …, a)` with `k` copies in every block.
    pub fn amplify(a: &FinDimAlgebra, k: usize) -> Self {
        let target =
            FinDimAlgebra::new(a.blocks().iter().map(|n| n * k).collect()).expect("k >= 1");
        let kb = a.num_blocks();
        let mult = (0..kb)
            .map(|t| (0..kb).map(|s| if s == t { k } else { 0 }).collect())
            .collect();
        Self::standard(a.clone(), target, mult).expect("amplification is unital")
    }

    /// The inner automorphism `Ad(g)` for a unitary `g`.
    pub fn inner(a: &FinDimAlgebra, g: &AlgElement) -> Result<Self, AlgebraError> {
        Self::identity(a).then_inner(g)
    }

    /// The automorphism `a ↦ (a_{perm[0]}, a_{perm[1]}, …)`.
    pub fn block_permutation(a: &FinDimAlgebra, perm: &[usize]) -> Result<Self, AlgebraError> {
        let k = a.num_blocks();
        let mut seen = vec![false; k];
        if perm.len() != k {
            return Err(AlgebraError::ShapeMismatch("permutation length".into()));
        }
        for &p in perm {
            if p >= k || seen[p] {
                return Err(AlgebraError::ShapeMismatch("not a permutation".into()));
            }
            seen[p] = true;
        }
        let mult = (0..k)
            .map(|t| (0..k).map(|s| usize::from(s == perm[t])).collect())
            .collect();
        Self::standard(a.clone(), a.clone(), mult)
    }

    pub fn source(&self) -> &FinDimAlgebra {
        &self.source
    }

    pub fn target(&self) -> &FinDimAlgebra {
        &self.target
    }

    pub fn mult(&self) -> &[Vec<usize>] {
        &self.mult
    }

    pub fn conj(&self) -> &[CMat] {
        &self.conj
    }

    /// `(source block, copy, row offset)` for every copy inside target
    /// block `t`, in canonical order.
    pub fn layout(&self, t: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        let mut off = 0;
        for (s, &m) in self.mult[t].iter().enumerate() {
            for c in 0..m {
                out.push((s, c, off));
                off += self.source.block(s);
            }
        }
        out
    }

    /// `D_t(a)`, the copies of `a` before conjugation.
    pub fn copies(&self, a: &AlgElement, t: usize) -> CMat {
        let parts: Vec<&CMat> = self
            .layout(t)
            .into_iter()
            .map(|(s, _, _)| &a.blocks[s])
            .collect();
        direct_sum(&parts)
    }

    pub fn apply(&self, a: &AlgElement) -> AlgElement {
        debug_assert!(self.source.contains(a));
        AlgElement {
            blocks: (0..self.target.num_blocks())
                .map(|t| {
                    let u = &self.conj[t];
                    u * self.copies(a, t) * u.adjoint()
                })
                .collect(),
        }
    }

    /// `Ad(g) ∘ self`.
    pub fn then_inner(&self, g: &AlgElement) -> Result<Self, AlgebraError> {
        if !self.target.contains(g) {
            return Err(AlgebraError::ShapeMismatch("unitary not in target".into()));
        }
        let conj = self
            .conj
            .iter()
            .zip(&g.blocks)
            .map(|(u, gt)| gt * u)
            .collect();
        Self::new(
            self.source.clone(),
            self.target.clone(),
            self.mult.clone(),
            conj,
        )
    }

    /// `self ∘ Ad(h)`.
    pub fn after_inner(&self, h: &AlgElement) -> Result<Self, AlgebraError> {
        if !self.source.contains(h) {
            return Err(AlgebraError::ShapeMismatch("unitary not in source".into()));
        }
        let conj = (0..self.target.num_blocks())
            .map(|t| &self.conj[t] * self.copies(h, t))
            .collect();
        Self::new(
            self.source.clone(),
            self.target.clone(),
            self.mult.clone(),
            conj,
        )
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &StarHom) -> Result<StarHom, AlgebraError> {
        if first.target != self.source {
            return Err(AlgebraError::Incomposable);
        }
        let a = &first.source;
        let kt = self.target.num_blocks();
        let ka = a.num_blocks();
        let mut mult = vec![vec![0; ka]; kt];
        let mut conj = Vec::with_capacity(kt);
        for t in 0..kt {
            // inner layout runs over (mid block, copy, source block, copy)
            let mut inner_offsets: Vec<Vec<usize>> = vec![Vec::new(); ka];
            let mut wraps: Vec<&CMat> = Vec::new();
            let mut off = 0;
            for (mid, &m) in self.mult[t].iter().enumerate() {
                for _ in 0..m {
                    wraps.push(&first.conj[mid]);
                    for (s, &fm) in first.mult[mid].iter().enumerate() {
                        for _ in 0..fm {
                            inner_offsets[s].push(off);
                            off += a.block(s);
                        }
                    }
                }
            }
            let mut perm = Vec::with_capacity(off);
            for (s, offs) in inner_offsets.iter().enumerate() {
                mult[t][s] = offs.len();
                for &o in offs {
                    perm.extend(o..o + a.block(s));
                }
            }
            conj.push(&self.conj[t] * direct_sum(&wraps) * permutation(&perm));
        }
        StarHom::new(a.clone(), self.target.clone(), mult, conj)
    }

    /// Every source block reaches some target block.
    pub fn is_injective(&self) -> bool {
        self.first_killed_block().is_none()
    }

    pub fn first_killed_block(&self) -> Option<usize> {
        (0..self.source.num_blocks()).find(|&s| self.mult.iter().all(|row| row[s] == 0))
    }

    pub fn check_mono(&self) -> Result<(), AlgebraError> {
        match self.first_killed_block() {
            Some(s) => Err(AlgebraError::NotMono(s)),
            None => Ok(()),
        }
    }

    /// Bijective: the multiplicity matrix is a permutation matrix.
    pub fn is_isomorphism(&self) -> bool {
        let k = self.source.num_blocks();
        self.target.num_blocks() == k
            && self.mult.iter().all(|row| row.iter().sum::<usize>() == 1)
            && (0..k).all(|s| self.mult.iter().map(|row| row[s]).sum::<usize>() == 1)
    }

    /// Source block feeding each target block of an isomorphism.
    fn block_map(&self) -> Option<Vec<usize>> {
        if !self.is_isomorphism() {
            return None;
        }
        Some(
            self.mult
                .iter()
                .map(|row| row.iter().position(|&m| m == 1).expect("permutation row"))
                .collect(),
        )
    }

    pub fn inverse(&self) -> Result<StarHom, AlgebraError> {
        let sigma = self.block_map().ok_or(AlgebraError::NotAutomorphism)?;
        let k = sigma.len();
        let mut mult = vec![vec![0; k]; k];
        let mut conj = vec![CMat::zeros(0, 0); k];
        for (t, &s) in sigma.iter().enumerate() {
            mult[s][t] = 1;
            conj[s] = self.conj[t].adjoint();
        }
        StarHom::new(self.target.clone(), self.source.clone(), mult, conj)
    }

    /// Source block sent onto each target block, for automorphisms.
    pub fn automorphism_blocks(&self) -> Result<Vec<usize>, AlgebraError> {
        if self.source != self.target {
            return Err(AlgebraError::NotAutomorphism);
        }
        self.block_map().ok_or(AlgebraError::NotAutomorphism)
    }

    /// Largest `‖φ(e) − ψ(e)‖` over matrix units `e`.
    pub fn distance(&self, other: &StarHom) -> f64 {
        if self.source != other.source || self.target != other.target {
            return f64::INFINITY;
        }
        self.source
            .matrix_units()
            .into_iter()
            .map(|(s, i, j)| {
                let e = self.source.unit_element(s, i, j);
                let (x, y) = (self.apply(&e), other.apply(&e));
                x.blocks
                    .iter()
                    .zip(&y.blocks)
                    .map(|(p, q)| max_abs_diff(p, q))
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Agreement on every matrix unit within `tol`.
pub fn hom_equal(f: &StarHom, g: &StarHom, tol: f64) -> bool {
    f.distance(g) <= tol
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

    fn random_hom(
        source: &FinDimAlgebra,
        target_mult: Vec<Vec<usize>>,
        rng: &mut ChaCha8Rng,
    ) -> StarHom {
        let blocks: Vec<usize> = target_mult
            .iter()
            .map(|row| row.iter().zip(source.blocks()).map(|(m, n)| m * n).sum())
            .collect();
        let target = alg(&blocks);
        let conj = blocks.iter().map(|&n| random_unitary(n, rng)).collect();
        StarHom::new(source.clone(), target, target_mult, conj).unwrap()
    }

    #[test]
    fn unitality_is_enforced() {
        let r = StarHom::standard(alg(&[1]), alg(&[3]), vec![vec![2]]);
        assert!(matches!(r, Err(AlgebraError::NotUnital { .. })));
        let r = StarHom::new(
            alg(&[1]),
            alg(&[2]),
            vec![vec![2]],
            vec![identity(2) * num_complex::Complex64::new(2.0, 0.0)],
        );
        assert!(matches!(r, Err(AlgebraError::NotUnitary { .. })));
    }

    #[test]
    fn multiplicative_star_preserving_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = alg(&[1, 2]);
        let f = random_hom(&a, vec![vec![1, 1], vec![2, 0], vec![0, 2]], &mut rng);
        for _ in 0..10 {
            let x = a.random_element(&mut rng);
            let y = a.random_element(&mut rng);
            let lhs = f.apply(&x.mul(&y));
            let rhs = f.apply(&x).mul(&f.apply(&y));
            assert!(lhs.distance(&rhs) < 1e-10);
            assert!(f.apply(&x.adjoint()).distance(&f.apply(&x).adjoint()) < 1e-10);
            assert!((f.apply(&x).norm() - x.norm()).abs() < 1e-10 * x.norm());
        }
        assert!(f.apply(&a.one()).distance(&f.target().one()) < 1e-12);
    }

    #[test]
    fn composition_multiplies_multiplicities_and_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = alg(&[1, 2]);
        let f = random_hom(&a, vec![vec![1, 1], vec![0, 1]], &mut rng);
        let g = random_hom(f.target(), vec![vec![2, 1], vec![1, 0]], &mut rng);
        let gf = g.compose(&f).unwrap();
        assert_eq!(gf.mult(), &[vec![2, 3], vec![1, 1]]);
        for (s, i, j) in a.matrix_units() {
            let e = a.unit_element(s, i, j);
            assert!(gf.apply(&e).distance(&g.apply(&f.apply(&e))) < 1e-12);
        }
        assert_eq!(f.compose(&f), Err(AlgebraError::Incomposable));
    }

    #[test]
    fn diagonal_chain_c_m2_m4() {
        let c = alg(&[1]);
        let f = StarHom::standard(c.clone(), alg(&[2]), vec![vec![2]]).unwrap();
        let g = StarHom::standard(alg(&[2]), alg(&[4]), vec![vec![2]]).unwrap();
        let gf = g.compose(&f).unwrap();
        assert_eq!(gf.mult(), &[vec![4]]);
        let one = gf.apply(&c.one());
        assert!(max_abs_diff(&one.blocks[0], &identity(4)) < 1e-15);
    }

    #[test]
    fn commutant_conjugation_is_invisible() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m2 = alg(&[2]);
        let f = StarHom::standard(m2.clone(), alg(&[4]), vec![vec![2]]).unwrap();
        // swapping the two copies commutes with every diag(a, a)
        let swap = permutation(&[2, 3, 0, 1]);
        let in_commutant = AlgElement {
            blocks: vec![swap],
        };
        assert!(hom_equal(&f, &f.then_inner(&in_commutant).unwrap(), 1e-12));
        let generic = AlgElement {
            blocks: vec![random_unitary(4, &mut rng)],
        };
        assert!(!hom_equal(&f, &f.then_inner(&generic).unwrap(), 1e-10));
    }

    #[test]
    fn inverse_of_automorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = alg(&[2, 2, 1]);
        let sigma = StarHom::block_permutation(&a, &[1, 0, 2]).unwrap();
        let alpha = sigma.then_inner(&a.random_unitary(&mut rng)).unwrap();
        let inv = alpha.inverse().unwrap();
        assert!(hom_equal(
            &inv.compose(&alpha).unwrap(),
            &StarHom::identity(&a),
            1e-12
        ));
        assert!(hom_equal(
            &alpha.compose(&inv).unwrap(),
            &StarHom::identity(&a),
            1e-12
        ));
    }

    #[test]
    fn injectivity_from_columns() {
        let h = StarHom::standard(alg(&[1, 1]), alg(&[1]), vec![vec![1, 0]]).unwrap();
        assert!(!h.is_injective());
        assert_eq!(h.check_mono(), Err(AlgebraError::NotMono(1)));
        assert!(StarHom::amplify(&alg(&[2, 1]), 3).is_injective());
    }
}
