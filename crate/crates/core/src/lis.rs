//! Longest increasing subsequences of permutations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::random_permutation;
use crate::error::{Error, Result};

/// A bijection of `{1, …, N}` in one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n];
        for &v in &values {
            let idx = (v as usize).wrapping_sub(1);
            if idx >= n || seen[idx] {
                return Err(Error::Domain(format!("{values:?} is not a permutation of 1..={n}")));
            }
            seen[idx] = true;
        }
        Ok(Permutation(values))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n as u32).collect())
    }

    /// Parses one-line notation with single-digit entries, e.g. `"315624"`.
    pub fn from_digits(s: &str) -> Result<Self> {
        let values = s
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .ok_or_else(|| Error::Domain(format!("`{c}` is not a digit")))
            })
            .collect::<Result<Vec<u32>>>()?;
        Permutation::new(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn reversed(&self) -> Permutation {
        Permutation(self.0.iter().rev().copied().collect())
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Vec<u32> {
        p.0
    }
}

/// Patience sorting: pile tops stay sorted, each element binary-searches its
/// pile. `O(N log N)`.
pub fn lis_length(p: &Permutation) -> usize {
    lis_of_slice(p.values())
}

fn lis_of_slice(values: &[u32]) -> usize {
    let mut tops: Vec<u32> = Vec::new();
    for &v in values {
        let pile = tops.partition_point(|&t| t < v);
        if pile == tops.len() {
            tops.push(v);
        } else {
            tops[pile] = v;
        }
    }
    tops.len()
}

/// Longest decreasing subsequence.
pub fn lds_length(p: &Permutation) -> usize {
    lis_length(&p.reversed())
}

/// Quadratic dynamic program over all index pairs; independent of
/// [`lis_length`]. Limited to `N ≤ 12`.
pub fn lis_bruteforce(p: &Permutation) -> Result<usize> {
    const CAP: usize = 12;
    let v = p.values();
    if v.len() > CAP {
        return Err(Error::UnsupportedSize { n: v.len(), max: CAP });
    }
    let mut best = vec![1usize; v.len()];
    for i in 0..v.len() {
        for j in 0..i {
            if v[j] < v[i] {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    Ok(best.into_iter().max().unwrap_or(0))
}

/// Scaled Ulam statistic `(ℓ_N − 2√N)/N^{1/6}`.
pub fn scale_lis(lis: usize, n: usize) -> f64 {
    let nf = n as f64;
    (lis as f64 - 2.0 * nf.sqrt()) / nf.powf(1.0 / 6.0)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LisTrial {
    pub trial: u64,
    pub lis: usize,
    pub scaled: f64,
}

/// Monte Carlo sample of the scaled statistic over uniform permutations.
#[derive(Clone, Debug)]
pub struct LisSample {
    pub n: usize,
    pub trials: Vec<LisTrial>,
    sorted: Vec<f64>,
}

impl LisSample {
    pub fn sorted_scaled(&self) -> &[f64] {
        &self.sorted
    }

    /// Empirical CDF of the scaled statistic at `t`.
    pub fn cdf(&self, t: f64) -> f64 {
        self.sorted.partition_point(|&x| x <= t) as f64 / self.sorted.len() as f64
    }

    pub fn mean_lis_over_sqrt_n(&self) -> f64 {
        let s: f64 = self.trials.iter().map(|t| t.lis as f64).sum();
        s / self.trials.len() as f64 / (self.n as f64).sqrt()
    }
}

pub fn lis_monte_carlo(n: usize, trials: usize, seed: u64) -> Result<LisSample> {
    if trials == 0 {
        return Err(Error::config("trials", "must be at least 1"));
    }
    let records = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let p = random_permutation(n, seed, t)?;
            let lis = lis_length(&p);
            Ok(LisTrial {
                trial: t,
                lis,
                scaled: scale_lis(lis, n),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sorted: Vec<f64> = records.iter().map(|r| r.scaled).collect();
    sorted.sort_by(f64::total_cmp);
    Ok(LisSample {
        n,
        trials: records,
        sorted,
    })
}
