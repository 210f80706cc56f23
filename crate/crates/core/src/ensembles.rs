//! Seeded random inputs: Wigner ensembles and uniform permutations.
//!
//! Every sample is a pure function of `(kind, n, master seed, trial index)`.
//! The per-trial stream is a ChaCha8 generator keyed by
//! [`derive_trial_seed`], so trials can run on any thread in any order.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, Matrix, SymmetricMatrix, TridiagonalMatrix};
use crate::lis::Permutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnsembleKind {
    /// `(A + Aᵀ)/2`, `A` with i.i.d. standard normal entries.
    #[serde(alias = "goe")]
    GOE,
    /// `(A + A*)/2`, `A` with i.i.d. standard complex normal entries.
    #[serde(alias = "gue")]
    GUE,
    /// Symmetric matrix of i.i.d. ±1 signs on and above the diagonal.
    #[serde(alias = "BE", alias = "bernoulli")]
    BernoulliWigner,
}

impl EnsembleKind {
    pub fn label(self) -> &'static str {
        match self {
            EnsembleKind::GOE => "GOE",
            EnsembleKind::GUE => "GUE",
            EnsembleKind::BernoulliWigner => "BE",
        }
    }
}

impl std::fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("N", "dimension must be at least 1"));
        }
        Ok(EnsembleSpec { kind, n, seed })
    }

    fn expect(&self, kind: EnsembleKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::config("kind", format!("expected {kind}, spec is {}", self.kind)))
        }
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index` under `master`.
///
/// `index ↦ mix(mix(master) + (index+1)·γ)` with `γ` odd and `mix` a
/// bijection of `u64`, so distinct indices never collide for a fixed master.
pub fn derive_trial_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master).wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// The generator for one trial.
pub fn trial_rng(master: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_trial_seed(master, index))
}

pub fn sample_goe(spec: &EnsembleSpec, trial: u64) -> Result<SymmetricMatrix> {
    spec.expect(EnsembleKind::GOE)?;
    let n = spec.n;
    let mut rng = trial_rng(spec.seed, trial);
    let a = Matrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    Ok(a.symmetric_part())
}

pub fn sample_bernoulli(spec: &EnsembleSpec, trial: u64) -> Result<SymmetricMatrix> {
    spec.expect(EnsembleKind::BernoulliWigner)?;
    let mut rng = trial_rng(spec.seed, trial);
    Ok(SymmetricMatrix::from_lower_fn(spec.n, |_, _| {
        if rng.random::<bool>() {
            1.0
        } else {
            -1.0
        }
    }))
}

pub fn sample_gue(spec: &EnsembleSpec, trial: u64) -> Result<HermitianMatrix> {
    spec.expect(EnsembleKind::GUE)?;
    let n = spec.n;
    let mut rng = trial_rng(spec.seed, trial);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let a: Vec<Complex64> = (0..n * n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(s * re, s * im)
        })
        .collect();
    Ok(HermitianMatrix::from_lower_fn(n, |i, j| {
        0.5 * (a[i * n + j] + a[j * n + i].conj())
    }))
}

/// Real symmetric sample for the GOE and Bernoulli ensembles.
pub fn sample_real(spec: &EnsembleSpec, trial: u64) -> Result<SymmetricMatrix> {
    match spec.kind {
        EnsembleKind::GOE => sample_goe(spec, trial),
        EnsembleKind::BernoulliWigner => sample_bernoulli(spec, trial),
        EnsembleKind::GUE => Err(Error::config("kind", "GUE samples are complex Hermitian")),
    }
}

/// Random positive-definite Jacobi matrix: off-diagonals uniform in
/// `±[0.1, 1]`, diagonals uniform in `[0.5, 2]` plus the adjacent
/// off-diagonal magnitudes (strict diagonal dominance).
pub fn sample_positive_jacobi(n: usize, seed: u64, trial: u64) -> Result<TridiagonalMatrix> {
    if n == 0 {
        return Err(Error::config("N", "dimension must be at least 1"));
    }
    let mut rng = trial_rng(seed, trial);
    let b: Vec<f64> = (1..n)
        .map(|_| {
            let m = rng.random_range(0.1..1.0);
            if rng.random::<bool>() {
                m
            } else {
                -m
            }
        })
        .collect();
    let a: Vec<f64> = (0..n)
        .map(|i| {
            let left = if i > 0 { b[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { b[i].abs() } else { 0.0 };
            rng.random_range(0.5..2.0) + left + right
        })
        .collect();
    TridiagonalMatrix::new(a, b)
}

/// Uniform permutation of `1..=n` by Fisher–Yates.
pub fn random_permutation(n: usize, seed: u64, trial: u64) -> Result<Permutation> {
    if n == 0 {
        return Err(Error::config("n", "permutation size must be at least 1"));
    }
    let mut rng = trial_rng(seed, trial);
    let mut v: Vec<u32> = (1..=n as u32).collect();
    v.shuffle(&mut rng);
    Permutation::new(v)
}
