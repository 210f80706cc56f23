//! Sample statistics: moments, empirical CDF distances, rank correlation,
//! histograms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with the `1/(n−1)` convention.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// `(Tᵢ − ⟨T⟩)/σ` with sample mean and `1/(n−1)` standard deviation.
pub fn normalize_times(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.len() < 2 {
        return Err(Error::DegenerateSample(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    let m = mean(samples);
    let sd = sample_variance(samples).sqrt();
    if !(sd > 0.0) {
        return Err(Error::DegenerateSample("zero sample variance".into()));
    }
    Ok(samples.iter().map(|t| (t - m) / sd).collect())
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a − F_b|`.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "KS distance needs non-empty samples");
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// One-sample KS statistic against a continuous CDF.
pub fn ks_against_cdf(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let xs = sorted(xs);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs()).max((j as f64 / n - f).abs());
        i = j;
    }
    d
}

/// Linear-interpolated quantile of an unsorted sample, `q ∈ [0, 1]`.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let s = sorted(xs);
    let pos = q.clamp(0.0, 1.0) * (s.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    s[lo] + (s[hi] - s[lo]) * (pos - lo as f64)
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Average ranks (1-based), ties sharing their mean rank.
fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    let mut r = vec![0.0; xs.len()];
    let mut k = 0;
    while k < idx.len() {
        let mut l = k;
        while l + 1 < idx.len() && xs[idx[l + 1]] == xs[idx[k]] {
            l += 1;
        }
        let avg = (k + l) as f64 / 2.0 + 1.0;
        for &i in &idx[k..=l] {
            r[i] = avg;
        }
        k = l + 1;
    }
    r
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

/// Spearman rank correlation.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    pearson(&ranks(x), &ranks(y))
}

/// Least-squares slope of `y` on `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let num: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    /// `counts[s][k]` is the count of sample `s` in bin `k`.
    pub counts: Vec<Vec<u64>>,
}

/// Shared fixed-count bins over the central 99% of the pooled samples.
/// Values outside the range are not counted.
pub fn histogram(samples: &[&[f64]], bins: usize) -> Histogram {
    let pooled: Vec<f64> = samples.iter().flat_map(|s| s.iter().copied()).collect();
    let lo = quantile(&pooled, 0.005);
    let hi = quantile(&pooled, 0.995);
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|k| lo + width * k as f64).collect();
    let counts = samples
        .iter()
        .map(|s| {
            let mut c = vec![0u64; bins];
            for &x in s.iter() {
                if x < lo || x > hi {
                    continue;
                }
                let k = (((x - lo) / width) as usize).min(bins - 1);
                c[k] += 1;
            }
            c
        })
        .collect();
    Histogram { edges, counts }
}
