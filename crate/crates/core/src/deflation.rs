//! Deflation times of the unshifted QR algorithm and the Toda flow, and the
//! Monte Carlo experiments built on them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{sample_real, EnsembleKind, EnsembleSpec};
use crate::error::{Error, Result};
use crate::flows::{qr_step_tridiagonal, TodaLattice};
use crate::linalg::{
    householder_tridiagonalize, symmetric_eigen, tridiagonal_eigen, SymmetricMatrix, TridiagonalMatrix,
};
use crate::stats::{self, Histogram};

pub use crate::stats::{ks_distance, normalize_times};

/// Halting data of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeflationRecord {
    pub trial: u64,
    /// Iteration count (QR) or flow time (Toda).
    #[serde(rename = "T")]
    pub t: f64,
    /// 1-based block index achieving the minimum.
    pub k_hat: usize,
    pub top_gap: f64,
    pub epsilon: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "QR", alias = "qr")]
    Qr,
    #[serde(rename = "Toda", alias = "toda")]
    Toda,
}

/// Frobenius norm of the `k × (N−k)` upper-right block, `1 ≤ k ≤ N−1`.
pub fn block_offdiag_norm(m: &SymmetricMatrix, k: usize) -> Result<f64> {
    let n = m.n();
    if k == 0 || k >= n {
        return Err(Error::Range(format!(
            "block index {k} outside 1..={}",
            n.saturating_sub(1)
        )));
    }
    let mut s = 0.0;
    for i in 0..k {
        for j in k..n {
            s += m[(i, j)] * m[(i, j)];
        }
    }
    Ok(s.sqrt())
}

/// All block norms `k = 1..N−1`.
pub fn block_profile(m: &SymmetricMatrix) -> Vec<f64> {
    let n = m.n();
    // moving the split from k to k+1 drops column k above it and adds row k to its right
    let mut profile = Vec::with_capacity(n.saturating_sub(1));
    let mut s = 0.0;
    for k in 0..n.saturating_sub(1) {
        for i in 0..k {
            s -= m[(i, k)] * m[(i, k)];
        }
        for j in k + 1..n {
            s += m[(k, j)] * m[(k, j)];
        }
        profile.push(s.max(0.0).sqrt());
    }
    profile
}

/// `(min, argmin)` over the profile, 1-based, ties to the smallest index.
fn min_block(profile: &[f64]) -> (f64, usize) {
    let mut best = (f64::INFINITY, 1);
    for (i, &v) in profile.iter().enumerate() {
        if v < best.0 {
            best = (v, i + 1);
        }
    }
    best
}

fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::config("epsilon", format!("must be positive, got {eps}")))
    }
}

fn top_gap(values: &[f64]) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => values[n - 1] - values[n - 2],
    }
}

/// Iterates `step` from `m0` until some block norm drops below `ε`.
///
/// `T` is the number of steps taken. The returned record has `trial = 0`
/// and `top_gap` from the eigensolver.
pub fn deflation_time_discrete<F>(
    m0: &SymmetricMatrix,
    mut step: F,
    eps: f64,
    max_iter: usize,
) -> Result<(DeflationRecord, SymmetricMatrix)>
where
    F: FnMut(&SymmetricMatrix) -> Result<SymmetricMatrix>,
{
    check_epsilon(eps)?;
    if m0.n() < 2 {
        return Err(Error::Range("deflation needs N ≥ 2".into()));
    }
    let gap = top_gap(&crate::linalg::symmetric_eigenvalues(m0)?);
    let mut x = m0.clone();
    for m in 0..=max_iter {
        let profile = block_profile(&x);
        let (d, k) = min_block(&profile);
        if d < eps {
            let rec = DeflationRecord {
                trial: 0,
                t: m as f64,
                k_hat: k,
                top_gap: gap,
                epsilon: eps,
            };
            return Ok((rec, x));
        }
        if m == max_iter {
            return Err(Error::NonHalting {
                limit: max_iter as f64,
                profile,
            });
        }
        x = step(&x)?;
    }
    unreachable!()
}

/// Unshifted QR on a Jacobi matrix, where block `k` has norm `|b_k|`.
pub fn deflation_time_qr_tridiagonal(
    m0: &TridiagonalMatrix,
    eps: f64,
    max_iter: usize,
) -> Result<(DeflationRecord, TridiagonalMatrix)> {
    check_epsilon(eps)?;
    if m0.n() < 2 {
        return Err(Error::Range("deflation needs N ≥ 2".into()));
    }
    let gap = top_gap(&tridiagonal_eigen(m0, false)?.values);
    let mut x = m0.clone();
    for m in 0..=max_iter {
        let profile: Vec<f64> = x.b.iter().map(|b| b.abs()).collect();
        let (d, k) = min_block(&profile);
        if d < eps {
            let rec = DeflationRecord {
                trial: 0,
                t: m as f64,
                k_hat: k,
                top_gap: gap,
                epsilon: eps,
            };
            return Ok((rec, x));
        }
        if m == max_iter {
            return Err(Error::NonHalting {
                limit: max_iter as f64,
                profile,
            });
        }
        x = qr_step_tridiagonal(&x)?;
    }
    unreachable!()
}

/// Bisection steps after the coarse bracket.
const BISECTIONS: usize = 40;

/// Toda flow until `d(t) = min_k ‖X₁₂⁽ᵏ⁾(t)‖ < ε`.
///
/// `d` is sampled every `coarse_dt`; the first bracket where it drops
/// below `ε` is bisected and `T` is its right end, so `d(T) ≤ ε`.
pub fn deflation_time_toda(
    m0: &TridiagonalMatrix,
    eps: f64,
    t_max: f64,
    coarse_dt: f64,
) -> Result<(DeflationRecord, TridiagonalMatrix)> {
    check_epsilon(eps)?;
    if !(coarse_dt > 0.0) {
        return Err(Error::config("coarse_dt", "must be positive"));
    }
    if m0.n() < 2 {
        return Err(Error::Range("deflation needs N ≥ 2".into()));
    }
    let gap = top_gap(&tridiagonal_eigen(m0, false)?.values);
    let d_of = |lat: &TodaLattice| min_block(&lat.offdiag_abs());
    let record = |t: f64, k: usize| DeflationRecord {
        trial: 0,
        t,
        k_hat: k,
        top_gap: gap,
        epsilon: eps,
    };

    let mut lat = TodaLattice::new(m0);
    let (d0, k0) = d_of(&lat);
    if d0 < eps {
        return Ok((record(0.0, k0), lat.matrix()));
    }
    let mut left = lat.clone();
    let mut i = 0u64;
    loop {
        i += 1;
        let t = (i as f64 * coarse_dt).min(t_max);
        lat.advance_to(t);
        if d_of(&lat).0 <= eps {
            break;
        }
        if t >= t_max {
            return Err(Error::NonHalting {
                limit: t_max,
                profile: lat.offdiag_abs(),
            });
        }
        left = lat.clone();
    }
    let mut right = lat;
    for _ in 0..BISECTIONS {
        let mid_t = 0.5 * (left.time() + right.time());
        let mut mid = left.clone();
        mid.advance_to(mid_t);
        if d_of(&mid).0 <= eps {
            right = mid;
        } else {
            left = mid;
        }
    }
    let (_, k) = d_of(&right);
    Ok((record(right.time(), k), right.matrix()))
}

/// Result of running Toda until the first row decouples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneDeflation {
    pub t1: f64,
    /// `X₁₁(T⁽¹⁾)`.
    pub top_entry: f64,
    pub lambda_max: f64,
}

/// First row of the Toda flow in the eigenbasis of `M0`.
///
/// `X(t)e₁ ∝ e^{tM0}e₁`, so with `M0 = VΛVᵀ` and `u = Vᵀe₁` the weights
/// `pᵢ ∝ uᵢ²e^{2tλᵢ}` give `X₁₁ = Σpᵢλᵢ` and `E(t) = Σ_{j≥2}X₁ⱼ² = Σpᵢ(λᵢ − X₁₁)²`.
struct FirstRow {
    /// `λᵢ − λ_top`, `λ_top` the largest eigenvalue with `uᵢ ≠ 0`.
    shifted: Vec<f64>,
    log_u2: Vec<f64>,
    lambda_top: f64,
}

impl FirstRow {
    fn new(m0: &SymmetricMatrix) -> Result<Self> {
        let spec = symmetric_eigen(m0)?;
        let v = spec.vectors.as_ref().expect("vectors requested");
        let n = m0.n();
        let mut lambdas = Vec::new();
        let mut log_u2 = Vec::new();
        for i in 0..n {
            let u = v[(0, i)];
            if u != 0.0 {
                lambdas.push(spec.values[i]);
                log_u2.push(2.0 * u.abs().ln());
            }
        }
        let lambda_top = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(FirstRow {
            shifted: lambdas.iter().map(|l| l - lambda_top).collect(),
            log_u2,
            lambda_top,
        })
    }

    /// `(E(t), X₁₁(t) − λ_top)`.
    fn eval(&self, t: f64) -> (f64, f64) {
        let w: Vec<f64> = self
            .shifted
            .iter()
            .zip(&self.log_u2)
            .map(|(s, l)| (l + 2.0 * t * s).exp())
            .collect();
        let z: f64 = w.iter().sum();
        let mu: f64 = w.iter().zip(&self.shifted).map(|(w, s)| w * s).sum::<f64>() / z;
        let e: f64 = w
            .iter()
            .zip(&self.shifted)
            .map(|(w, s)| w * (s - mu) * (s - mu))
            .sum::<f64>()
            / z;
        (e, mu)
    }
}

/// First time `E(t) < ε²`, by a coarse scan of step 0.05 and bisection.
pub fn one_deflation_time(m0: &SymmetricMatrix, eps: f64, t_max: f64) -> Result<OneDeflation> {
    check_epsilon(eps)?;
    let row = FirstRow::new(m0)?;
    let eps2 = eps * eps;
    let out = |t: f64| {
        let (_, mu) = row.eval(t);
        OneDeflation {
            t1: t,
            top_entry: row.lambda_top + mu,
            lambda_max: row.lambda_top,
        }
    };
    if row.eval(0.0).0 < eps2 {
        return Ok(out(0.0));
    }
    let dt = 0.05;
    let mut left = 0.0;
    let mut right;
    let mut i = 0u64;
    loop {
        i += 1;
        right = (i as f64 * dt).min(t_max);
        if row.eval(right).0 < eps2 {
            break;
        }
        if right >= t_max {
            return Err(Error::NonHalting {
                limit: t_max,
                profile: vec![row.eval(right).0.sqrt()],
            });
        }
        left = right;
    }
    for _ in 0..BISECTIONS {
        let mid = 0.5 * (left + right);
        if row.eval(mid).0 < eps2 {
            right = mid;
        } else {
            left = mid;
        }
    }
    Ok(out(right))
}

/// Parameters of a universality run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniversalityConfig {
    pub algorithm: Algorithm,
    pub ensembles: Vec<EnsembleKind>,
    pub n: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub bins: usize,
    /// QR iteration cap.
    pub max_iter: usize,
    /// Toda flow-time cap.
    pub t_max: f64,
}

impl UniversalityConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::config("N", "must be at least 2"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::config("epsilon", "must lie in (0, 1)"));
        }
        if self.trials < 2 {
            return Err(Error::config("trials", "must be at least 2"));
        }
        if self.bins == 0 {
            return Err(Error::config("bins", "must be at least 1"));
        }
        if self.ensembles.is_empty() {
            return Err(Error::config("ensembles", "must name at least one ensemble"));
        }
        if self.ensembles.contains(&EnsembleKind::GUE) {
            return Err(Error::config("ensembles", "only GOE and BernoulliWigner are supported"));
        }
        if !(self.t_max > 0.0) {
            return Err(Error::config("t_max", "must be positive"));
        }
        Ok(())
    }
}

/// Outcome of one trial of the universality experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TrialOutcome {
    Halted(DeflationRecord),
    /// Non-halting or singular trial, excluded from the statistics.
    Excluded {
        trial: u64,
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub ensemble: EnsembleKind,
    pub records: Vec<DeflationRecord>,
    pub excluded: Vec<(u64, String)>,
    pub mean: f64,
    pub variance: f64,
    /// `T̃` in trial order.
    pub normalized: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsPair {
    pub a: EnsembleKind,
    pub b: EnsembleKind,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniversalityResult {
    pub ensembles: Vec<EnsembleSummary>,
    pub histogram: Histogram,
    pub ks: Vec<KsPair>,
}

/// One trial: sample, reduce to Jacobi form, run the algorithm to deflation.
pub fn deflation_trial(cfg: &UniversalityConfig, kind: EnsembleKind, trial: u64) -> Result<DeflationRecord> {
    let spec = EnsembleSpec::new(kind, cfg.n, cfg.master_seed)?;
    let h = sample_real(&spec, trial)?;
    let t = householder_tridiagonalize(&h).tridiagonal;
    let (mut rec, _) = match cfg.algorithm {
        Algorithm::Qr => deflation_time_qr_tridiagonal(&t, cfg.epsilon, cfg.max_iter)?,
        Algorithm::Toda => deflation_time_toda(&t, cfg.epsilon, cfg.t_max, 0.05)?,
    };
    rec.trial = trial;
    Ok(rec)
}

/// Deflation times per ensemble, normalized and compared pairwise by KS.
pub fn universality_experiment(cfg: &UniversalityConfig) -> Result<UniversalityResult> {
    cfg.validate()?;
    let mut summaries = Vec::new();
    for &kind in &cfg.ensembles {
        let outcomes: Vec<TrialOutcome> = (0..cfg.trials as u64)
            .into_par_iter()
            .map(|trial| match deflation_trial(cfg, kind, trial) {
                Ok(r) => Ok(TrialOutcome::Halted(r)),
                Err(e @ (Error::NonHalting { .. } | Error::Singular { .. })) => Ok(TrialOutcome::Excluded {
                    trial,
                    reason: e.to_string(),
                }),
                Err(e) => Err(e),
            })
            .collect::<Result<_>>()?;
        let mut records = Vec::new();
        let mut excluded = Vec::new();
        for o in outcomes {
            match o {
                TrialOutcome::Halted(r) => records.push(r),
                TrialOutcome::Excluded { trial, reason } => excluded.push((trial, reason)),
            }
        }
        let times: Vec<f64> = records.iter().map(|r| r.t).collect();
        let normalized = normalize_times(&times)?;
        summaries.push(EnsembleSummary {
            ensemble: kind,
            mean: stats::mean(&times),
            variance: stats::sample_variance(&times),
            records,
            excluded,
            normalized,
        });
    }
    let samples: Vec<&[f64]> = summaries.iter().map(|s| s.normalized.as_slice()).collect();
    let histogram = stats::histogram(&samples, cfg.bins);
    let mut ks = Vec::new();
    for i in 0..summaries.len() {
        for j in i + 1..summaries.len() {
            ks.push(KsPair {
                a: summaries[i].ensemble,
                b: summaries[j].ensemble,
                distance: ks_distance(&summaries[i].normalized, &summaries[j].normalized),
            });
        }
    }
    Ok(UniversalityResult {
        ensembles: summaries,
        histogram,
        ks,
    })
}

/// `ℒ = log ε⁻¹ / log N` against the threshold `5/3 + σ/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingCheck {
    pub ell: f64,
    pub threshold: f64,
    pub inside: bool,
}

pub fn scaling_region(eps: f64, n: usize, sigma: f64) -> ScalingCheck {
    let ell = (1.0 / eps).ln() / (n as f64).ln();
    let threshold = 5.0 / 3.0 + sigma / 2.0;
    ScalingCheck {
        ell,
        threshold,
        inside: ell >= threshold,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapLawConfig {
    pub ensemble: EnsembleKind,
    pub n: usize,
    pub epsilon: f64,
    pub sigma: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub bins: usize,
    pub t_max: f64,
}

impl GapLawConfig {
    pub fn validate(&self) -> Result<ScalingCheck> {
        if self.n < 2 {
            return Err(Error::config("N", "must be at least 2"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::config("epsilon", "must lie in (0, 1)"));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::config("sigma", "must be positive"));
        }
        if self.trials < 2 {
            return Err(Error::config("trials", "must be at least 2"));
        }
        if self.bins == 0 {
            return Err(Error::config("bins", "must be at least 1"));
        }
        if self.ensemble == EnsembleKind::GUE {
            return Err(Error::config("ensemble", "only GOE and BernoulliWigner are supported"));
        }
        let check = scaling_region(self.epsilon, self.n, self.sigma);
        if !check.inside {
            return Err(Error::config(
                "epsilon",
                format!(
                    "(epsilon, N) outside the scaling region: log(1/epsilon)/log N = {:.4} < {:.4}",
                    check.ell, check.threshold
                ),
            ));
        }
        Ok(check)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    pub trial: u64,
    pub t1: f64,
    pub top_entry: f64,
    pub lambda_max: f64,
    pub top_gap: f64,
    /// `T⁽¹⁾ / (N^{2/3}(log ε⁻¹ − ⅔ log N))`.
    pub scaled_t1: f64,
    /// `1 / (2^{−2/3} N^{2/3} (λ_N − λ_{N−1}))`.
    pub scaled_inverse_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapLawResult {
    pub scaling: ScalingCheck,
    pub records: Vec<GapRecord>,
    pub excluded: Vec<(u64, String)>,
    /// Trials with `|X₁₁(T⁽¹⁾) − λ_max| ≥ ε`.
    pub contract_violations: usize,
    /// KS between scaled `T⁽¹⁾` rescaled to the inverse-gap median and the
    /// scaled inverse gap.
    pub median_matched_ks: f64,
    pub spearman: f64,
    pub histogram: Histogram,
}

/// `T⁽¹⁾` against the inverse top gap. Samples are scaled by `1/√N` so the
/// spectrum stays bounded as `N` grows.
pub fn gap_statistic_experiment(cfg: &GapLawConfig) -> Result<GapLawResult> {
    let scaling = cfg.validate()?;
    let nf = cfg.n as f64;
    let n23 = nf.powf(2.0 / 3.0);
    let t_scale = n23 * ((1.0 / cfg.epsilon).ln() - (2.0 / 3.0) * nf.ln());
    let spec = EnsembleSpec::new(cfg.ensemble, cfg.n, cfg.master_seed)?;
    let outcomes: Vec<std::result::Result<GapRecord, (u64, String)>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let h = sample_real(&spec, trial)?;
            let h = SymmetricMatrix::new(h.scale(1.0 / nf.sqrt()))?;
            let values = crate::linalg::symmetric_eigenvalues(&h)?;
            let gap = top_gap(&values);
            match one_deflation_time(&h, cfg.epsilon, cfg.t_max) {
                Ok(one) => Ok(Ok(GapRecord {
                    trial,
                    t1: one.t1,
                    top_entry: one.top_entry,
                    lambda_max: values[values.len() - 1],
                    top_gap: gap,
                    scaled_t1: one.t1 / t_scale,
                    scaled_inverse_gap: 1.0 / (2f64.powf(-2.0 / 3.0) * n23 * gap),
                })),
                Err(e @ Error::NonHalting { .. }) => Ok(Err((trial, e.to_string()))),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let mut records = Vec::new();
    let mut excluded = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => records.push(r),
            Err(x) => excluded.push(x),
        }
    }
    if records.len() < 2 {
        return Err(Error::DegenerateSample("fewer than 2 halted trials".into()));
    }
    let contract_violations = records
        .iter()
        .filter(|r| !((r.top_entry - r.lambda_max).abs() < cfg.epsilon))
        .count();
    let t1: Vec<f64> = records.iter().map(|r| r.scaled_t1).collect();
    let inv: Vec<f64> = records.iter().map(|r| r.scaled_inverse_gap).collect();
    let ratio = stats::median(&inv) / stats::median(&t1);
    let matched: Vec<f64> = t1.iter().map(|x| x * ratio).collect();
    let median_matched_ks = ks_distance(&matched, &inv);
    let raw_t1: Vec<f64> = records.iter().map(|r| r.t1).collect();
    let raw_inv: Vec<f64> = records.iter().map(|r| 1.0 / r.top_gap).collect();
    let spearman = stats::spearman(&raw_t1, &raw_inv);
    let histogram = stats::histogram(&[&matched, &inv], cfg.bins);
    Ok(GapLawResult {
        scaling,
        records,
        excluded,
        contract_violations,
        median_matched_ks,
        spearman,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::sample_goe;
    use crate::flows::qr_step;
    use crate::linalg::{hausdorff_distance, spectrum_distance, symmetric_eigenvalues};

    fn sym(rows: &[Vec<f64>]) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(rows).unwrap()
    }

    fn jacobi(a: &[f64], b: &[f64]) -> TridiagonalMatrix {
        TridiagonalMatrix::new(a.to_vec(), b.to_vec()).unwrap()
    }

    #[test]
    fn block_norm_examples() {
        let m = SymmetricMatrix::from_diag(&[1.0, 2.0, 3.0]);
        assert_eq!(block_offdiag_norm(&m, 1).unwrap(), 0.0);
        let c = sym(&[vec![0.0, -0.7], vec![-0.7, 0.0]]);
        assert_eq!(block_offdiag_norm(&c, 1).unwrap(), 0.7);
        assert!(block_offdiag_norm(&c, 0).is_err());
        assert!(block_offdiag_norm(&c, 2).is_err());
    }

    #[test]
    fn block_norm_matches_direct_sum() {
        let spec = EnsembleSpec::new(EnsembleKind::GOE, 5, 8).unwrap();
        let m = sample_goe(&spec, 0).unwrap();
        let mut s = 0.0;
        for i in 0..2 {
            for j in 2..5 {
                s += m[(i, j)].powi(2);
            }
        }
        assert!((block_offdiag_norm(&m, 2).unwrap() - s.sqrt()).abs() < 1e-15);
        assert_eq!(block_profile(&m)[1], block_offdiag_norm(&m, 2).unwrap());
    }

    #[test]
    fn diagonal_input_is_already_deflated() {
        let m = SymmetricMatrix::from_diag(&[3.0, -1.0, 2.0]);
        let (r, _) = deflation_time_discrete(&m, qr_step, 1e-8, 10).unwrap();
        assert_eq!((r.t, r.k_hat), (0.0, 1));
        let t = jacobi(&[3.0, -1.0, 2.0], &[0.0, 0.0]);
        assert_eq!(deflation_time_qr_tridiagonal(&t, 1e-8, 10).unwrap().0.t, 0.0);
        assert_eq!(deflation_time_toda(&t, 1e-8, 10.0, 0.05).unwrap().0.t, 0.0);
        let one = one_deflation_time(&m, 1e-8, 10.0).unwrap();
        assert_eq!((one.t1, one.top_entry), (0.0, 3.0));
    }

    #[test]
    fn swap_matrix_never_deflates_under_qr() {
        let m = sym(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        match deflation_time_discrete(&m, qr_step, 1e-8, 50) {
            Err(Error::NonHalting { limit, profile }) => {
                assert_eq!(limit, 50.0);
                assert_eq!(profile, vec![1.0]);
            }
            other => panic!("{other:?}"),
        }
        let t = jacobi(&[0.0, 0.0], &[1.0]);
        assert!(matches!(
            deflation_time_qr_tridiagonal(&t, 1e-8, 50),
            Err(Error::NonHalting { .. })
        ));
    }

    #[test]
    fn qr_deflated_blocks_carry_the_spectrum() {
        let t = jacobi(&[4.0, 1.0, -2.5, 0.3], &[0.9, 1.1, 0.6]);
        let eps = 1e-8;
        let exact = symmetric_eigenvalues(&t.to_dense()).unwrap();
        let (rec, x) = deflation_time_qr_tridiagonal(&t, eps, 100_000).unwrap();
        let k = rec.k_hat;
        let mut blocks = tridiagonal_eigen(&jacobi(&x.a[..k], &x.b[..k - 1]), false)
            .unwrap()
            .values;
        blocks.extend(tridiagonal_eigen(&jacobi(&x.a[k..], &x.b[k..]), false).unwrap().values);
        assert!(hausdorff_distance(&blocks, &exact) <= eps);

        let dense = t.to_dense();
        let (rd, _) = deflation_time_discrete(&dense, qr_step, eps, 100_000).unwrap();
        assert_eq!((rd.t, rd.k_hat), (rec.t, rec.k_hat));
    }

    #[test]
    fn toda_two_by_two_matches_closed_form() {
        // b(t) = 1/cosh 2t, so |b(T)| = ε at T = acosh(1/ε)/2
        let eps = 1e-4;
        let t = jacobi(&[0.0, 0.0], &[1.0]);
        let (rec, x) = deflation_time_toda(&t, eps, 100.0, 0.05).unwrap();
        let mut scan: f64 = 0.0;
        while 1.0 / (2.0 * scan).cosh() > eps {
            scan += 1e-6;
        }
        assert!((rec.t - scan).abs() / scan < 1e-3, "{} vs {scan}", rec.t);
        let d = x.b[0].abs();
        assert!(d <= eps && d >= eps * (1.0 - 1e-3), "d(T) = {d}");
    }

    #[test]
    fn toda_deflated_blocks_carry_the_spectrum() {
        let t = jacobi(&[0.5, -1.0, 2.0, 0.0, 1.2], &[1.0, 0.5, 0.8, 1.3]);
        let eps = 1e-8;
        let exact = tridiagonal_eigen(&t, false).unwrap().values;
        let (rec, x) = deflation_time_toda(&t, eps, 1e4, 0.05).unwrap();
        let d = x.b[rec.k_hat - 1].abs();
        assert!(d <= eps && d >= eps * (1.0 - 1e-3));
        let k = rec.k_hat;
        let mut blocks = tridiagonal_eigen(&jacobi(&x.a[..k], &x.b[..k - 1]), false)
            .unwrap()
            .values;
        blocks.extend(tridiagonal_eigen(&jacobi(&x.a[k..], &x.b[k..]), false).unwrap().values);
        // Weyl's bound holds for the integrated matrix; its drift from the
        // exact spectrum is the integrator's error
        let computed = tridiagonal_eigen(&x, false).unwrap().values;
        assert!(hausdorff_distance(&blocks, &computed) <= eps);
        assert!(spectrum_distance(&computed, &exact) < 1e-6);
    }

    #[test]
    fn toda_runs_out_of_time() {
        let t = jacobi(&[0.0, 0.0], &[1.0]);
        assert!(matches!(
            deflation_time_toda(&t, 1e-8, 1.0, 0.05),
            Err(Error::NonHalting { .. })
        ));
    }

    #[test]
    fn one_deflation_contract_on_goe() {
        let spec = EnsembleSpec::new(EnsembleKind::GOE, 20, 5).unwrap();
        for trial in 0..5 {
            let m = sample_goe(&spec, trial).unwrap();
            let lmax = *symmetric_eigenvalues(&m).unwrap().last().unwrap();
            let one = one_deflation_time(&m, 1e-6, 1e5).unwrap();
            assert!((one.top_entry - lmax).abs() < 1e-6);
            let loose = one_deflation_time(&m, 1e-4, 1e5).unwrap();
            assert!(loose.t1 <= one.t1);
        }
    }

    #[test]
    fn one_deflation_agrees_with_the_flow() {
        let spec = EnsembleSpec::new(EnsembleKind::GOE, 6, 17).unwrap();
        let m = sample_goe(&spec, 0).unwrap();
        let eps = 1e-5;
        let one = one_deflation_time(&m, eps, 1e4).unwrap();
        let x = crate::flows::g_flow(&m, &crate::flows::FlowSpec::toda(one.t1)).unwrap();
        let e: f64 = (1..6).map(|j| x[(0, j)].powi(2)).sum();
        assert!((e.sqrt() - eps).abs() < 1e-3 * eps, "{}", e.sqrt());
        assert!((x[(0, 0)] - one.top_entry).abs() < 1e-9);
    }

    #[test]
    fn first_row_matches_toda_two_by_two() {
        // E(t) = b(t)² = 1/cosh²(2t)
        let m = sym(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let row = FirstRow::new(&m).unwrap();
        for &t in &[0.0, 0.3, 2.0, 9.0] {
            let (e, _) = row.eval(t);
            let exact = 1.0 / (2.0 * t).cosh().powi(2);
            assert!((e - exact).abs() <= 1e-12 * exact, "t={t}");
        }
    }

    #[test]
    fn scaling_region_examples() {
        let a = scaling_region(1e-16, 10_000, 0.1);
        assert!((a.ell - 4.0).abs() < 1e-12 && a.inside);
        let b = scaling_region(1e-1, 100, 0.1);
        assert!((b.ell - 0.5).abs() < 1e-12 && !b.inside);
        let cfg = GapLawConfig {
            ensemble: EnsembleKind::GOE,
            n: 100,
            epsilon: 0.1,
            sigma: 0.1,
            trials: 10,
            master_seed: 0,
            bins: 10,
            t_max: 1e4,
        };
        match cfg.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "epsilon"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn universality_small_run_is_deterministic() {
        let cfg = UniversalityConfig {
            algorithm: Algorithm::Qr,
            ensembles: vec![EnsembleKind::GOE, EnsembleKind::BernoulliWigner],
            n: 12,
            epsilon: 1e-8,
            trials: 40,
            master_seed: 3,
            bins: 8,
            max_iter: 200_000,
            t_max: 1e4,
        };
        let a = universality_experiment(&cfg).unwrap();
        let b = universality_experiment(&cfg).unwrap();
        assert_eq!(a, b);
        for s in &a.ensembles {
            assert!(stats::mean(&s.normalized).abs() < 1e-12);
            assert!((stats::sample_variance(&s.normalized) - 1.0).abs() < 1e-12);
            assert_eq!(s.records.len() + s.excluded.len(), 40);
        }
        assert_eq!(a.ks.len(), 1);
    }
}
