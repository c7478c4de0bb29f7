//! Representations in which every irreducible block occurs with countably
//! infinite multiplicity, acting on finitely supported vectors, together
//! with unitaries given as words of exactly invertible elementary moves.

mod pairing;
mod unitary;

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{AlgElement, AlgebraError, FinDimAlgebra, StarHom};
use crate::par::Exec;

pub use pairing::{cantor_pair, cantor_unpair, interleave, uninterleave};
pub use unitary::{Elementary, Repack, SymbolicUnitary};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CmError {
    #[error("restriction along a homomorphism that kills source block {0}")]
    NotInjectiveHom(usize),
    #[error("representations act on different algebras")]
    DifferentAlgebras,
    #[error("unitaries are not composable")]
    Incomposable,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Basis vector `e_row ⊗ δ_copy` inside block `block`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex {
    pub block: usize,
    pub row: usize,
    pub copy: u64,
}

impl BasisIndex {
    pub fn new(block: usize, row: usize, copy: u64) -> Self {
        BasisIndex { block, row, copy }
    }
}

/// A finitely supported vector.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVec {
    entries: BTreeMap<BasisIndex, Complex64>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis(ix: BasisIndex) -> Self {
        let mut v = Self::new();
        v.add(ix, Complex64::new(1.0, 0.0));
        v
    }

    pub fn add(&mut self, ix: BasisIndex, z: Complex64) {
        *self.entries.entry(ix).or_insert(Complex64::new(0.0, 0.0)) += z;
    }

    pub fn get(&self, ix: &BasisIndex) -> Complex64 {
        self.entries
            .get(ix)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisIndex, &Complex64)> {
        self.entries.iter()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn norm(&self) -> f64 {
        self.entries.values().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &SparseVec) -> Complex64 {
        self.entries
            .iter()
            .map(|(ix, z)| z.conj() * other.get(ix))
            .sum()
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        for (ix, z) in other.iter() {
            out.add(*ix, -z);
        }
        out
    }

    /// Entries whose magnitude is exactly zero are dropped.
    pub fn prune(mut self) -> SparseVec {
        self.entries.retain(|_, z| z.norm_sqr() != 0.0);
        self
    }
}

impl FromIterator<(BasisIndex, Complex64)> for SparseVec {
    fn from_iter<I: IntoIterator<Item = (BasisIndex, Complex64)>>(iter: I) -> Self {
        let mut v = SparseVec::new();
        for (ix, z) in iter {
            v.add(ix, z);
        }
        v
    }
}

/// `b ↦ φ(b) ⊗ 1_{ℓ²}` on `⊕_t ℂ^{n_t} ⊗ ℓ²`, for a unital `φ` from the
/// represented algebra into the carrier algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct CmRep {
    hom: StarHom,
}

/// Every block of `a` with countable multiplicity.
pub fn cm_rep(a: &FinDimAlgebra) -> CmRep {
    CmRep {
        hom: StarHom::identity(a),
    }
}

impl CmRep {
    pub fn algebra(&self) -> &FinDimAlgebra {
        self.hom.source()
    }

    pub fn carrier(&self) -> &FinDimAlgebra {
        self.hom.target()
    }

    pub fn hom(&self) -> &StarHom {
        &self.hom
    }

    /// `ρ ∘ j` together with the unitary carrying it onto the canonical
    /// form `cm_rep(source of j)`.
    pub fn restrict(&self, j: &StarHom) -> Result<(CmRep, SymbolicUnitary), CmError> {
        if let Some(s) = j.first_killed_block() {
            return Err(CmError::NotInjectiveHom(s));
        }
        let hom = self.hom.compose(j)?;
        let r = CmRep { hom };
        let w = r.decomposition();
        Ok((r, w))
    }

    /// The unitary `W` with `W ρ(b) W⁻¹ = cm_rep(algebra)(b)`: undo the
    /// conjugation blockwise, then repack copies by the pairing
    /// `(q, c) ↦ c·M_s + q`.
    pub fn decomposition(&self) -> SymbolicUnitary {
        let carrier = self.carrier().blocks().to_vec();
        let adj = self.hom.conj().iter().map(|u| u.adjoint()).collect();
        let repack = Repack::canonical(&self.hom);
        SymbolicUnitary::from_ops(
            carrier,
            self.algebra().blocks().to_vec(),
            vec![Elementary::Blockwise(adj), Elementary::Repack(repack, false)],
        )
    }

    /// Whether every block of the represented algebra acts nontrivially.
    pub fn is_faithful(&self) -> bool {
        self.hom.is_injective()
    }

    /// `ρ(b) v`.
    pub fn act(&self, b: &AlgElement, v: &SparseVec) -> SparseVec {
        let image = self.hom.apply(b);
        act_blockwise(&image.blocks, v)
    }

    /// Same as [`act`](Self::act) with the image `φ(b)` precomputed.
    pub fn act_image(image: &AlgElement, v: &SparseVec) -> SparseVec {
        act_blockwise(&image.blocks, v)
    }

    /// Basis probes `(t, r, c)` with `c < depth` over the carrier.
    pub fn probes(&self, depth: u64) -> Vec<BasisIndex> {
        probes(self.carrier(), depth)
    }
}

pub(crate) fn act_blockwise(mats: &[crate::algebra::CMat], v: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (ix, &z) in v.iter() {
        let m = &mats[ix.block];
        for r in 0..m.nrows() {
            let c = m[(r, ix.row)];
            if c.norm_sqr() != 0.0 {
                out.add(BasisIndex::new(ix.block, r, ix.copy), c * z);
            }
        }
    }
    out
}

pub fn probes(carrier: &FinDimAlgebra, depth: u64) -> Vec<BasisIndex> {
    let mut out = Vec::new();
    for (t, &n) in carrier.blocks().iter().enumerate() {
        for r in 0..n {
            for c in 0..depth {
                out.push(BasisIndex::new(t, r, c));
            }
        }
    }
    out
}

/// `w ρ₁(b) = ρ₂(b) w` for representations of the same algebra.
pub fn solve_intertwiner_cm(r1: &CmRep, r2: &CmRep) -> Result<SymbolicUnitary, CmError> {
    if r1.algebra() != r2.algebra() {
        return Err(CmError::DifferentAlgebras);
    }
    if r1 == r2 {
        return Ok(SymbolicUnitary::identity(r1.carrier().blocks().to_vec()));
    }
    r2.decomposition().inverse().after(&r1.decomposition())
}

/// `max ‖w ρ₁(e) v − ρ₂(e) w v‖` over matrix units `e` and basis probes `v`
/// of copy depth `depth`.
pub fn intertwining_residual(
    w: &SymbolicUnitary,
    r1: &CmRep,
    r2: &CmRep,
    depth: u64,
    exec: Exec,
) -> f64 {
    let alg = r1.algebra();
    let units = alg.matrix_units();
    let images: Vec<(AlgElement, AlgElement)> = units
        .iter()
        .map(|&(s, i, j)| {
            let e = alg.unit_element(s, i, j);
            (r1.hom().apply(&e), r2.hom().apply(&e))
        })
        .collect();
    let probes = r1.probes(depth);
    exec.map(&probes, |&ix| {
        let v = SparseVec::basis(ix);
        let wv = w.apply(&v);
        images
            .iter()
            .map(|(i1, i2)| {
                let lhs = w.apply(&CmRep::act_image(i1, &v));
                let rhs = CmRep::act_image(i2, &wv);
                lhs.sub(&rhs).norm()
            })
            .fold(0.0, f64::max)
    })
    .into_iter()
    .fold(0.0, f64::max)
}
