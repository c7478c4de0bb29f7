use num_complex::Complex64;

use super::{act_blockwise, BasisIndex, CmError, SparseVec};
use crate::algebra::{CMat, StarHom};

/// Re-indexing of the copy coordinate that splits each carrier block into
/// the irreducible pieces of a homomorphism's layout.
///
/// Row `p` of carrier block `t` lies in some copy of source block `s` at
/// row offset `start`; it goes to `(s, p − start, c·M_s + q)` where `q`
/// numbers the copies of `s` across all carrier blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repack {
    /// Per carrier block: `(start, len, s, q)` row segments.
    segments: Vec<Vec<(usize, usize, usize, u64)>>,
    /// Per source block: the `(t, start)` of every copy, indexed by `q`.
    copies: Vec<Vec<(usize, usize)>>,
}

impl Repack {
    pub fn canonical(hom: &StarHom) -> Self {
        let ks = hom.source().num_blocks();
        let kt = hom.target().num_blocks();
        let mut copies: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ks];
        let mut segments = vec![Vec::new(); kt];
        for (t, seg) in segments.iter_mut().enumerate() {
            for (s, _, off) in hom.layout(t) {
                let q = copies[s].len() as u64;
                copies[s].push((t, off));
                seg.push((off, hom.source().block(s), s, q));
            }
        }
        Repack { segments, copies }
    }

    fn forward(&self, ix: BasisIndex) -> BasisIndex {
        let &(start, _, s, q) = self.segments[ix.block]
            .iter()
            .find(|&&(start, len, _, _)| ix.row >= start && ix.row < start + len)
            .expect("row inside carrier block");
        let m = self.copies[s].len() as u64;
        BasisIndex::new(s, ix.row - start, super::interleave(q, ix.copy, m))
    }

    fn backward(&self, ix: BasisIndex) -> BasisIndex {
        let m = self.copies[ix.block].len() as u64;
        let (q, c) = super::uninterleave(ix.copy, m);
        let (t, start) = self.copies[ix.block][q as usize];
        BasisIndex::new(t, start + ix.row, c)
    }
}

fn is_exact_identity(m: &CMat) -> bool {
    *m == CMat::identity(m.nrows(), m.ncols())
}

/// One invertible move.
#[derive(Debug, Clone, PartialEq)]
pub enum Elementary {
    /// A unitary per block acting on rows, the same on every copy.
    Blockwise(Vec<CMat>),
    /// A basis bijection, inverted when the flag is set.
    Repack(Repack, bool),
}

impl Elementary {
    fn apply(&self, v: &SparseVec) -> SparseVec {
        match self {
            Elementary::Blockwise(mats) => act_blockwise(mats, v),
            Elementary::Repack(r, inverse) => v
                .iter()
                .map(|(&ix, &z)| {
                    let to = if *inverse { r.backward(ix) } else { r.forward(ix) };
                    (to, z)
                })
                .collect(),
        }
    }

    fn inverse(&self) -> Elementary {
        match self {
            Elementary::Blockwise(mats) => {
                Elementary::Blockwise(mats.iter().map(|m| m.adjoint()).collect())
            }
            Elementary::Repack(r, inv) => Elementary::Repack(r.clone(), !inv),
        }
    }

    fn is_permutation(&self) -> bool {
        matches!(self, Elementary::Repack(..))
    }
}

/// A unitary between countable-multiplicity carriers, stored as a word of
/// elementary moves applied left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicUnitary {
    domain: Vec<usize>,
    codomain: Vec<usize>,
    ops: Vec<Elementary>,
}

impl SymbolicUnitary {
    pub fn identity(blocks: Vec<usize>) -> Self {
        SymbolicUnitary {
            domain: blocks.clone(),
            codomain: blocks,
            ops: Vec::new(),
        }
    }

    pub fn from_ops(domain: Vec<usize>, codomain: Vec<usize>, ops: Vec<Elementary>) -> Self {
        let mut u = SymbolicUnitary {
            domain,
            codomain,
            ops: Vec::new(),
        };
        for op in ops {
            u.push(op);
        }
        u
    }

    /// Append with cancellation of inverse repacks and merging of adjacent
    /// blockwise moves; exact identities are dropped.
    fn push(&mut self, op: Elementary) {
        if let Elementary::Blockwise(mats) = &op {
            if mats.iter().all(is_exact_identity) {
                return;
            }
        }
        match (self.ops.last_mut(), op) {
            (Some(Elementary::Repack(a, ia)), Elementary::Repack(b, ib))
                if *a == b && *ia != ib =>
            {
                self.ops.pop();
            }
            (Some(Elementary::Blockwise(prev)), Elementary::Blockwise(next))
                if prev.len() == next.len() =>
            {
                for (p, n) in prev.iter_mut().zip(&next) {
                    *p = n * &*p;
                }
                if prev.iter().all(is_exact_identity) {
                    self.ops.pop();
                }
            }
            (_, op) => self.ops.push(op),
        }
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn codomain(&self) -> &[usize] {
        &self.codomain
    }

    pub fn ops(&self) -> &[Elementary] {
        &self.ops
    }

    pub fn is_identity_word(&self) -> bool {
        self.ops.is_empty()
    }

    /// Only basis bijections: unitarity then holds exactly.
    pub fn is_permutation_word(&self) -> bool {
        self.ops.iter().all(Elementary::is_permutation)
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut cur = v.clone();
        for op in &self.ops {
            cur = op.apply(&cur);
        }
        cur
    }

    pub fn inverse(&self) -> SymbolicUnitary {
        SymbolicUnitary::from_ops(
            self.codomain.clone(),
            self.domain.clone(),
            self.ops.iter().rev().map(Elementary::inverse).collect(),
        )
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &SymbolicUnitary) -> Result<SymbolicUnitary, CmError> {
        if first.codomain != self.domain {
            return Err(CmError::Incomposable);
        }
        let mut out = first.clone();
        out.codomain = self.codomain.clone();
        for op in &self.ops {
            out.push(op.clone());
        }
        Ok(out)
    }

    /// Image of one basis vector.
    pub fn apply_basis(&self, ix: BasisIndex) -> SparseVec {
        self.apply(&SparseVec::basis(ix))
    }

    /// `max |⟨u e_a, u e_b⟩ − δ_ab|` over the given basis probes.
    pub fn unitarity_residual(&self, probes: &[BasisIndex]) -> f64 {
        let images: Vec<SparseVec> = probes.iter().map(|&ix| self.apply_basis(ix)).collect();
        let mut worst: f64 = 0.0;
        for (a, ua) in images.iter().enumerate() {
            for (b, ub) in images.iter().enumerate() {
                let expect = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((ua.inner(ub) - Complex64::new(expect, 0.0)).norm());
            }
        }
        worst
    }
}
