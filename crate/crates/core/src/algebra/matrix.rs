//! Dense complex matrix helpers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// The matrix unit `E_ij` of size `n`.
pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = ONE;
    m
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Sum of singular values.
pub fn trace_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().sum()
}

/// `‖u*u − 1‖`.
pub fn unitarity_residual(u: &CMat) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    op_norm(&(u.adjoint() * u - identity(u.nrows())))
}

/// Block-diagonal sum.
pub fn direct_sum(blocks: &[&CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        out.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(*b);
        off += b.nrows();
    }
    out
}

/// Permutation matrix sending basis vector `j` to `perm[j]`.
pub fn permutation(perm: &[usize]) -> CMat {
    let n = perm.len();
    let mut p = CMat::zeros(n, n);
    for (j, &i) in perm.iter().enumerate() {
        p[(i, j)] = ONE;
    }
    p
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> CMat {
    CMat::from_fn(n, m, |_, _| random_complex(rng))
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of `R`
/// divided out.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let qr = random_matrix(n, n, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random positive definite matrix with unit trace.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let g = random_matrix(n, n, rng);
    let p = &g * g.adjoint();
    let t = p.trace().re;
    p / Complex64::new(t, 0.0)
}

/// Orthonormal basis of the eigenspace of a Hermitian matrix for
/// eigenvalues above `threshold`, with those eigenvalues.
pub fn positive_eigenspace(h: &CMat, threshold: f64) -> (Vec<f64>, CMat) {
    let eig = h.clone().symmetric_eigen();
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&k| eig.eigenvalues[k] > threshold)
        .collect();
    let mut vecs = CMat::zeros(h.nrows(), keep.len());
    for (c, &k) in keep.iter().enumerate() {
        vecs.set_column(c, &eig.eigenvectors.column(k));
    }
    (keep.iter().map(|&k| eig.eigenvalues[k]).collect(), vecs)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    op_norm(&(a - b))
}
