//! Eigenvalue algorithms as integrable flows, and the random-matrix
//! distributions that describe their halting statistics.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense symmetric kernels (Householder reduction, implicit QL
//!   eigensolver, QR factorization, matrix functions, small characteristic
//!   polynomials).
//! * [`ensembles`]: seeded GOE / GUE / Bernoulli–Wigner sampling and uniform
//!   permutations.
//! * [`flows`]: Flaschka variables, the Toda Lax flow, general `H_G` flows,
//!   shiftless QR and the chopped integrals of full symmetric Toda.
//! * [`deflation`]: deflation times and the universality / gap-law harness.
//! * [`fredholm`]: Nyström determinants of integrable kernels, Airy,
//!   Hastings–McLeod and Tracy–Widom, the XY autocorrelation.
//! * [`lis`]: longest increasing subsequences and the Ulam Monte Carlo.
//! * [`harness`]: experiment configuration, presets and result files.
//! * [`traces`]: per-step CSV traces of the flows.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod deflation;
pub mod ensembles;
pub mod error;
pub mod flows;
pub mod fredholm;
pub mod harness;
pub mod linalg;
pub mod lis;
pub mod stats;
pub mod traces;

pub use error::{Error, Result};
pub use linalg::{HermitianMatrix, Matrix, Spectrum, SymmetricMatrix, TridiagonalMatrix};
