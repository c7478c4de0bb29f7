//! Finite-dimensional C*-algebras `⊕ M_{n_j}`, their unital
//! *-homomorphisms, states and representations.

mod hom;
mod invariant;
pub mod matrix;
mod rep;
mod state;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use hom::{hom_equal, StarHom};
pub use invariant::{average_state_group, invariant_state, InvariantOptions};
pub use matrix::{CMat, CVec};
pub use rep::{decompose_numeric, solve_intertwiner_fin, FinRep};
pub use state::{gns, Gns, State};

use matrix::{op_norm, random_matrix, ONE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("an algebra needs at least one block")]
    NoBlocks,
    #[error("block {0} has size zero")]
    ZeroBlock(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("homomorphisms are not composable")]
    Incomposable,
    #[error("target block {block} has size {expected} but the multiplicities fill {got}")]
    NotUnital {
        block: usize,
        expected: usize,
        got: usize,
    },
    #[error("conjugating matrix of block {block} is not unitary (residual {residual:e})")]
    NotUnitary { block: usize, residual: f64 },
    #[error("source block {0} is sent to zero")]
    NotMono(usize),
    #[error("not an automorphism")]
    NotAutomorphism,
    #[error("representations are not unitarily equivalent: multiplicities {0:?} vs {1:?}")]
    NotUnitarilyEquivalent(Vec<usize>, Vec<usize>),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("no invariant state within {steps} averaging steps (residual {residual:e})")]
    BudgetExceeded {
        steps: u64,
        residual: f64,
        best: Box<State>,
    },
    #[error("automorphisms do not form a group: {0}")]
    NotAGroup(String),
    #[error("representation matrices do not decompose: {0}")]
    NotARepresentation(String),
}

/// `⊕_j M_{n_j}` over ℂ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinDimAlgebra {
    blocks: Vec<usize>,
}

impl FinDimAlgebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self, AlgebraError> {
        if blocks.is_empty() {
            return Err(AlgebraError::NoBlocks);
        }
        if let Some(j) = blocks.iter().position(|&n| n == 0) {
            return Err(AlgebraError::ZeroBlock(j));
        }
        Ok(FinDimAlgebra { blocks })
    }

    /// The full matrix algebra `M_n`.
    pub fn matrix(n: usize) -> Self {
        Self::new(vec![n]).expect("n >= 1")
    }

    /// `ℂ^k`.
    pub fn commutative(k: usize) -> Self {
        Self::new(vec![1; k]).expect("k >= 1")
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, s: usize) -> usize {
        self.blocks[s]
    }

    /// Vector-space dimension `Σ n_j²`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    /// Size of the defining representation, `Σ n_j`.
    pub fn rows(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn is_commutative(&self) -> bool {
        self.blocks.iter().all(|&n| n == 1)
    }

    /// Matrix-unit labels `(block, i, j)` in canonical order.
    pub fn matrix_units(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.dim());
        for (s, &n) in self.blocks.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    out.push((s, i, j));
                }
            }
        }
        out
    }

    pub fn unit_element(&self, s: usize, i: usize, j: usize) -> AlgElement {
        let mut a = self.zero();
        a.blocks[s][(i, j)] = ONE;
        a
    }

    pub fn zero(&self) -> AlgElement {
        AlgElement {
            blocks: self.blocks.iter().map(|&n| CMat::zeros(n, n)).collect(),
        }
    }

    pub fn one(&self) -> AlgElement {
        AlgElement {
            blocks: self.blocks.iter().map(|&n| CMat::identity(n, n)).collect(),
        }
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> AlgElement {
        AlgElement {
            blocks: self
                .blocks
                .iter()
                .map(|&n| random_matrix(n, n, rng))
                .collect(),
        }
    }

    pub fn random_unitary<R: Rng + ?Sized>(&self, rng: &mut R) -> AlgElement {
        AlgElement {
            blocks: self
                .blocks
                .iter()
                .map(|&n| matrix::random_unitary(n, rng))
                .collect(),
        }
    }

    /// Whether `a` has one block of the right size per algebra block.
    pub fn contains(&self, a: &AlgElement) -> bool {
        a.blocks.len() == self.blocks.len()
            && a
                .blocks
                .iter()
                .zip(&self.blocks)
                .all(|(m, &n)| m.nrows() == n && m.ncols() == n)
    }
}

impl fmt::Display for FinDimAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|&n| if n == 1 { "C".into() } else { format!("M{n}") })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// An element of a [`FinDimAlgebra`]: one square matrix per block.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgElement {
    pub blocks: Vec<CMat>,
}

impl AlgElement {
    pub fn algebra(&self) -> FinDimAlgebra {
        FinDimAlgebra {
            blocks: self.blocks.iter().map(|m| m.nrows()).collect(),
        }
    }

    pub fn adjoint(&self) -> AlgElement {
        AlgElement {
            blocks: self.blocks.iter().map(|m| m.adjoint()).collect(),
        }
    }

    /// C*-norm: the largest block operator norm.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(op_norm).fold(0.0, f64::max)
    }

    pub fn mul(&self, other: &AlgElement) -> AlgElement {
        AlgElement {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn add(&self, other: &AlgElement) -> AlgElement {
        AlgElement {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &AlgElement) -> AlgElement {
        AlgElement {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: num_complex::Complex64) -> AlgElement {
        AlgElement {
            blocks: self.blocks.iter().map(|a| a * c).collect(),
        }
    }

    /// `‖self − other‖`, infinite on shape mismatch.
    pub fn distance(&self, other: &AlgElement) -> f64 {
        if self.algebra() != other.algebra() {
            return f64::INFINITY;
        }
        self.sub(other).norm()
    }

    /// The block-diagonal matrix in the defining representation.
    pub fn to_matrix(&self) -> CMat {
        let refs: Vec<&CMat> = self.blocks.iter().collect();
        matrix::direct_sum(&refs)
    }
}
