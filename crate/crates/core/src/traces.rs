//! Per-step CSV traces of the flows, as emitted by the trace subcommands.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::deflation::block_profile;
use crate::ensembles::{sample_gue, sample_positive_jacobi, sample_real, EnsembleKind, EnsembleSpec};
use crate::error::{Error, Result};
use crate::flows::{chopped_spectrum, chopped_trace, g_flow, qr_step, stroboscope_check, FlowSpec};
use crate::linalg::{format_f64, spectrum_distance, symmetric_eigenvalues, SymmetricMatrix};

/// One ensemble draw as CSV (row count, then rows). GUE draws are written as
/// their real `2N × 2N` embedding.
pub fn sample_ensemble_csv(kind: EnsembleKind, n: usize, seed: u64, trial: u64) -> Result<String> {
    let spec = EnsembleSpec::new(kind, n, seed)?;
    let m = match kind {
        EnsembleKind::GUE => sample_gue(&spec, trial)?.real_embedding(),
        _ => sample_real(&spec, trial)?,
    };
    Ok(m.as_matrix().to_csv())
}

/// Largest level `j ≥ 1` with a non-trivial chopped determinant.
fn chop_levels(n: usize) -> usize {
    if n <= 8 {
        n.saturating_sub(1) / 2
    } else {
        0
    }
}

fn chopped_traces(m: &SymmetricMatrix) -> Option<Vec<Complex64>> {
    let levels = chop_levels(m.n());
    if levels == 0 {
        return None;
    }
    (1..=levels)
        .map(|j| chopped_spectrum(m, j).ok().map(|r| chopped_trace(&r)))
        .collect()
}

struct Tracer {
    n: usize,
    spectrum0: Vec<f64>,
    chopped0: Option<Vec<Complex64>>,
    out: String,
}

impl Tracer {
    fn new(m0: &SymmetricMatrix, label: &str) -> Result<Self> {
        let n = m0.n();
        let mut out = String::from(label);
        for i in 1..=n {
            let _ = write!(out, ",d{i}");
        }
        for k in 1..n {
            let _ = write!(out, ",offdiag_norm{k}");
        }
        out.push_str(",spectrum_drift,chopped_drift\n");
        Ok(Tracer {
            n,
            spectrum0: symmetric_eigenvalues(m0)?,
            chopped0: chopped_traces(m0),
            out,
        })
    }

    fn row(&mut self, label: String, m: &SymmetricMatrix) -> Result<()> {
        let mut fields = vec![label];
        fields.extend((0..self.n).map(|i| format_f64(m[(i, i)])));
        fields.extend(block_profile(m).into_iter().map(format_f64));
        fields.push(format_f64(spectrum_distance(
            &symmetric_eigenvalues(m)?,
            &self.spectrum0,
        )));
        let chopped = match (&self.chopped0, chopped_traces(m)) {
            (Some(c0), Some(c)) => format_f64(c.iter().zip(c0).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))),
            _ => String::new(),
        };
        fields.push(chopped);
        self.out.push_str(&fields.join(","));
        self.out.push('\n');
        Ok(())
    }
}

/// Toda flow from `m0` sampled at `0, dt, 2dt, …, t_max` by the
/// factorization solution. Chopped drift is the largest change in a
/// chopped-root sum and is left empty for `n > 8` or degenerate levels.
pub fn toda_trace(m0: &SymmetricMatrix, t_max: f64, dt: f64) -> Result<String> {
    if !(dt > 0.0) {
        return Err(Error::config("dt", "must be positive"));
    }
    if !(t_max >= 0.0) {
        return Err(Error::config("t_max", "must be non-negative"));
    }
    let mut tr = Tracer::new(m0, "t")?;
    let steps = (t_max / dt).round() as usize;
    for s in 0..=steps {
        let t = s as f64 * dt;
        let m = g_flow(m0, &FlowSpec::toda(t))?;
        tr.row(format_f64(t), &m)?;
    }
    Ok(tr.out)
}

/// `steps` unshifted QR iterations from `m0`, one row per iterate.
pub fn qr_trace(m0: &SymmetricMatrix, steps: usize) -> Result<String> {
    let mut tr = Tracer::new(m0, "k")?;
    let mut m = m0.clone();
    tr.row("0".into(), &m)?;
    for k in 1..=steps {
        m = qr_step(&m)?;
        tr.row(k.to_string(), &m)?;
    }
    Ok(tr.out)
}

/// Stroboscope deviations on `count` random positive-definite Jacobi
/// matrices: `sample,k,deviation,bound` with bound `1e-8·k·‖M₀‖_F`.
/// Returns the CSV and the largest `deviation / bound`.
pub fn strobe_table(count: usize, n: usize, k_max: usize, seed: u64) -> Result<(String, f64)> {
    let mut out = String::from("sample,k,deviation,bound\n");
    let mut worst = 0.0f64;
    for s in 0..count as u64 {
        let m0 = sample_positive_jacobi(n, seed, s)?;
        let norm = m0.frobenius_norm();
        for k in 1..=k_max {
            let dev = stroboscope_check(&m0, k)?;
            let bound = 1e-8 * k as f64 * norm;
            worst = worst.max(dev / bound);
            let _ = writeln!(out, "{s},{k},{},{}", format_f64(dev), format_f64(bound));
        }
    }
    Ok((out, worst))
}
