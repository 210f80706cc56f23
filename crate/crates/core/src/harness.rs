//! Experiment configuration, named presets, dispatch and result files.
//!
//! A run is a pure function of its [`ExperimentConfig`]: per-trial seeds are
//! derived from `master_seed`, trials are reduced in index order, and the
//! thread count only changes how fast the same bytes are produced.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::deflation::{
    gap_statistic_experiment, universality_experiment, Algorithm, GapLawConfig, GapLawResult, UniversalityConfig,
    UniversalityResult,
};
use crate::ensembles::EnsembleKind;
use crate::error::{Error, Result};
use crate::fredholm::{
    airy_kernel_det, fredholm_det, kernel_eigenvalues, painleve2_hastings_mcleod, sine_kernel, tracy_widom_pii,
    xy_asymptotic_slope, xy_determinant, TracyWidom, XY_IMAG_TOL,
};
use crate::linalg::format_f64;
use crate::lis::{lis_monte_carlo, LisSample};
use crate::stats::{self, Histogram};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    DeflateUniversality,
    GapLaw,
    TwTable,
    SineGap,
    Xy,
    LisMc,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::DeflateUniversality => "deflate-universality",
            Experiment::GapLaw => "gap-law",
            Experiment::TwTable => "tw-table",
            Experiment::SineGap => "sine-gap",
            Experiment::Xy => "xy",
            Experiment::LisMc => "lis-mc",
        }
    }
}

/// Everything a run needs. Fields not used by the chosen experiment may be
/// omitted; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<Algorithm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensembles: Option<Vec<EnsembleKind>>,
    #[serde(rename = "N", alias = "n", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worker_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// Quadrature nodes for Fredholm determinants.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    /// Tabulated `t,F(t)` CSV used as the reference CDF by `lis-mc`; the
    /// built-in Painlevé solution is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tw_table: Option<PathBuf>,
}

fn default_bins() -> usize {
    40
}

pub const PRESETS: [&str; 7] = [
    "fig3a-qr",
    "fig3b-toda",
    "gap-law",
    "tw-table",
    "lis-mc",
    "xy",
    "sine-gap",
];

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

impl ExperimentConfig {
    fn empty(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            algorithm: None,
            ensembles: None,
            n: None,
            epsilon: None,
            sigma: None,
            trials: None,
            master_seed: 0,
            worker_count: None,
            output_dir: None,
            bins: default_bins(),
            max_iter: None,
            t_max: None,
            m: None,
            beta: None,
            t_values: None,
            s_values: None,
            grid_n: None,
            tw_table: None,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        let mut c;
        match name {
            "fig3a-qr" | "fig3b-toda" => {
                c = Self::empty(Experiment::DeflateUniversality);
                let qr = name == "fig3a-qr";
                c.algorithm = Some(if qr { Algorithm::Qr } else { Algorithm::Toda });
                c.ensembles = Some(vec![EnsembleKind::GOE, EnsembleKind::BernoulliWigner]);
                c.n = Some(100);
                c.epsilon = Some(if qr { 1e-10 } else { 1e-8 });
                c.trials = Some(2000);
                c.master_seed = 20_140_101;
            }
            "gap-law" => {
                c = Self::empty(Experiment::GapLaw);
                c.ensembles = Some(vec![EnsembleKind::GOE]);
                c.n = Some(50);
                c.epsilon = Some(1e-8);
                c.sigma = Some(0.1);
                c.trials = Some(500);
                c.master_seed = 20_160_101;
            }
            "tw-table" => {
                c = Self::empty(Experiment::TwTable);
                c.t_values = Some(grid(-5.0, 2.0, 0.5));
                c.m = Some(60);
            }
            "lis-mc" => {
                c = Self::empty(Experiment::LisMc);
                c.n = Some(1000);
                c.trials = Some(10_000);
                c.master_seed = 19_990_101;
            }
            "xy" => {
                c = Self::empty(Experiment::Xy);
                c.beta = Some(1.0);
                c.t_values = Some(grid(0.0, 10.0, 0.5));
                c.m = Some(60);
            }
            "sine-gap" => {
                c = Self::empty(Experiment::SineGap);
                c.s_values = Some(vec![0.25, 0.5, 1.0]);
                c.m = Some(50);
            }
            other => {
                return Err(Error::config(
                    "preset",
                    format!("unknown preset `{other}`; expected one of {}", PRESETS.join(", ")),
                ))
            }
        }
        Ok(c)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text).map_err(json_field_error)?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every field the experiment uses.
    pub fn validate(&self) -> Result<Job> {
        if let Some(w) = self.worker_count {
            if w == 0 {
                return Err(Error::config("worker_count", "must be at least 1"));
            }
        }
        if self.bins == 0 {
            return Err(Error::config("bins", "must be at least 1"));
        }
        let job = match self.experiment {
            Experiment::DeflateUniversality => {
                let cfg = UniversalityConfig {
                    algorithm: require(self.algorithm, "algorithm")?,
                    ensembles: require(self.ensembles.clone(), "ensembles")?,
                    n: require(self.n, "N")?,
                    epsilon: require(self.epsilon, "epsilon")?,
                    trials: require(self.trials, "trials")?,
                    master_seed: self.master_seed,
                    bins: self.bins,
                    max_iter: self.max_iter.unwrap_or(1_000_000),
                    t_max: self.t_max.unwrap_or(1e4),
                };
                cfg.validate()?;
                Job::Universality(cfg)
            }
            Experiment::GapLaw => {
                let ensembles = self.ensembles.clone().unwrap_or_else(|| vec![EnsembleKind::GOE]);
                if ensembles.len() != 1 {
                    return Err(Error::config("ensembles", "gap-law takes exactly one ensemble"));
                }
                let cfg = GapLawConfig {
                    ensemble: ensembles[0],
                    n: require(self.n, "N")?,
                    epsilon: require(self.epsilon, "epsilon")?,
                    sigma: self.sigma.unwrap_or(0.1),
                    trials: require(self.trials, "trials")?,
                    master_seed: self.master_seed,
                    bins: self.bins,
                    t_max: self.t_max.unwrap_or(1e6),
                };
                cfg.validate()?;
                Job::GapLaw(cfg)
            }
            Experiment::TwTable => {
                let t_values = require(self.t_values.clone(), "t_values")?;
                let grid_n = self.grid_n.unwrap_or(2000);
                if grid_n < 400 {
                    return Err(Error::config("grid_n", "must be at least 400"));
                }
                for &t in &t_values {
                    if !(-9.0..=7.0).contains(&t) {
                        return Err(Error::config("t_values", format!("{t} outside [-9, 7]")));
                    }
                }
                Job::TwTable {
                    t_values,
                    m: positive_m(self.m, 60)?,
                    grid_n,
                }
            }
            Experiment::SineGap => {
                let s_values = require(self.s_values.clone(), "s_values")?;
                if s_values.iter().any(|s| !(*s >= 0.0)) {
                    return Err(Error::config("s_values", "must be non-negative"));
                }
                Job::SineGap {
                    s_values,
                    m: positive_m(self.m, 50)?,
                }
            }
            Experiment::Xy => {
                let t_values = require(self.t_values.clone(), "t_values")?;
                if t_values.iter().any(|t| !(*t >= 0.0)) {
                    return Err(Error::config("t_values", "must be non-negative"));
                }
                let beta = self.beta.unwrap_or(1.0);
                if !(beta > 0.0) {
                    return Err(Error::config("beta", "must be positive"));
                }
                Job::Xy {
                    t_values,
                    beta,
                    m: positive_m(self.m, 60)?,
                }
            }
            Experiment::LisMc => {
                let n = require(self.n, "N")?;
                if n == 0 {
                    return Err(Error::config("N", "must be at least 1"));
                }
                let trials = require(self.trials, "trials")?;
                if trials < 2 {
                    return Err(Error::config("trials", "must be at least 2"));
                }
                Job::LisMc {
                    n,
                    trials,
                    seed: self.master_seed,
                    bins: self.bins,
                    tw_table: self.tw_table.clone(),
                }
            }
        };
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::config("epsilon", "must lie in (0, 1)"));
            }
        }
        Ok(job)
    }
}

fn require<T>(v: Option<T>, field: &str) -> Result<T> {
    v.ok_or_else(|| Error::config(field, "required but missing"))
}

fn positive_m(m: Option<usize>, default: usize) -> Result<usize> {
    let m = m.unwrap_or(default);
    if m < 2 {
        return Err(Error::config("m", "needs at least 2 nodes"));
    }
    Ok(m)
}

/// Turns serde's "unknown field `x`" / "missing field `x`" into a config
/// error naming `x`.
fn json_field_error(e: serde_json::Error) -> Error {
    let msg = e.to_string();
    if let Some(start) = msg.find('`') {
        if let Some(len) = msg[start + 1..].find('`') {
            let field = &msg[start + 1..start + 1 + len];
            return Error::config(field, msg.clone());
        }
    }
    Error::Json(e)
}

/// A validated experiment with all parameters resolved.
#[derive(Clone, Debug, PartialEq)]
pub enum Job {
    Universality(UniversalityConfig),
    GapLaw(GapLawConfig),
    TwTable {
        t_values: Vec<f64>,
        m: usize,
        grid_n: usize,
    },
    SineGap {
        s_values: Vec<f64>,
        m: usize,
    },
    Xy {
        t_values: Vec<f64>,
        beta: f64,
        m: usize,
    },
    LisMc {
        n: usize,
        trials: usize,
        seed: u64,
        bins: usize,
        tw_table: Option<PathBuf>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwRow {
    pub t: f64,
    pub f_pii: f64,
    pub f_airy: f64,
    pub diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SineRow {
    pub s: f64,
    pub p: f64,
    /// `|det − Π(1 − λᵢ)|`.
    pub product_residual: f64,
    pub resolution_change: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XyRow {
    pub t: f64,
    /// `e^{−t²/2} Re det(1 − K_t)`.
    pub x: f64,
    pub det_re: f64,
    pub det_im: f64,
    /// `−t²/2 + log|det(1 − K_t)|`.
    pub log_abs_x: f64,
    pub resolution_change: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XySummary {
    pub rows: Vec<XyRow>,
    pub beta: f64,
    pub target_slope: f64,
    /// Least-squares slope of `log|X|` over the rows with `5 ≤ t ≤ 10`.
    pub fitted_slope: Option<f64>,
    pub max_abs_imag: f64,
    pub non_real_points: usize,
}

#[derive(Clone, Debug)]
pub struct LisSummary {
    pub sample: LisSample,
    pub ks_vs_tracy_widom: f64,
    pub histogram: Histogram,
}

/// Typed result of one experiment.
#[derive(Clone, Debug)]
pub enum Outcome {
    Universality(UniversalityResult),
    GapLaw(GapLawResult),
    TwTable { rows: Vec<TwRow>, painleve_residual: f64 },
    SineGap(Vec<SineRow>),
    Xy(XySummary),
    LisMc(LisSummary),
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub config: ExperimentConfig,
    pub outcome: Outcome,
    pub tool_version: &'static str,
    pub wall_time_s: f64,
}

/// Validates and runs `config`, on `worker_count` threads when given.
pub fn run(config: &ExperimentConfig) -> Result<RunResult> {
    let job = config.validate()?;
    let start = Instant::now();
    let outcome = match config.worker_count {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::config("worker_count", e.to_string()))?
            .install(|| run_job(&job))?,
        None => run_job(&job)?,
    };
    Ok(RunResult {
        config: config.clone(),
        outcome,
        tool_version: TOOL_VERSION,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

pub fn run_job(job: &Job) -> Result<Outcome> {
    Ok(match job {
        Job::Universality(cfg) => Outcome::Universality(universality_experiment(cfg)?),
        Job::GapLaw(cfg) => Outcome::GapLaw(gap_statistic_experiment(cfg)?),
        Job::TwTable { t_values, m, grid_n } => {
            let sol = painleve2_hastings_mcleod(10.0, 8.0, *grid_n)?;
            let rows = t_values
                .iter()
                .map(|&t| {
                    let f_pii = tracy_widom_pii(t, &sol)?;
                    let f_airy = airy_kernel_det(t, *m)?.value.re;
                    Ok(TwRow {
                        t,
                        f_pii,
                        f_airy,
                        diff: (f_pii - f_airy).abs(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Outcome::TwTable {
                rows,
                painleve_residual: sol.residual,
            }
        }
        Job::SineGap { s_values, m } => {
            let rows = s_values
                .iter()
                .map(|&s| {
                    if s == 0.0 {
                        return Ok(SineRow {
                            s,
                            p: 1.0,
                            product_residual: 0.0,
                            resolution_change: 0.0,
                        });
                    }
                    let k = sine_kernel(s)?;
                    let d = fredholm_det(&k, *m)?;
                    let prod: f64 = kernel_eigenvalues(&k, *m)?.iter().map(|l| 1.0 - l).product();
                    Ok(SineRow {
                        s,
                        p: d.value.re,
                        product_residual: (d.value.re - prod).abs(),
                        resolution_change: d.change,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Outcome::SineGap(rows)
        }
        Job::Xy { t_values, beta, m } => Outcome::Xy(xy_table(t_values, *beta, *m)?),
        Job::LisMc {
            n,
            trials,
            seed,
            bins,
            tw_table,
        } => {
            let sample = lis_monte_carlo(*n, *trials, *seed)?;
            let ks = match tw_table {
                Some(path) => {
                    let table = read_cdf_table(path)?;
                    stats::ks_against_cdf(sample.sorted_scaled(), |t| interpolate_cdf(&table, t))
                }
                None => {
                    let tw = TracyWidom::new()?;
                    stats::ks_against_cdf(sample.sorted_scaled(), |t| tw.cdf(t))
                }
            };
            let histogram = stats::histogram(&[sample.sorted_scaled()], *bins);
            Outcome::LisMc(LisSummary {
                sample,
                ks_vs_tracy_widom: ks,
                histogram,
            })
        }
    })
}

/// Reads a `t,F` table (an optional header line is skipped) with strictly
/// increasing `t`.
pub fn read_cdf_table(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path)?;
    let mut table: Vec<(f64, f64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let parsed = match (parts.next(), parts.next()) {
            (Some(a), Some(b)) => a.parse::<f64>().ok().zip(b.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some(p) => {
                if table.last().is_some_and(|q| q.0 >= p.0) {
                    return Err(Error::config("tw_table", format!("line {}: t not increasing", i + 1)));
                }
                table.push(p);
            }
            None if i == 0 => continue,
            None => return Err(Error::config("tw_table", format!("line {}: expected `t,F`", i + 1))),
        }
    }
    if table.len() < 2 {
        return Err(Error::config("tw_table", "needs at least two rows"));
    }
    Ok(table)
}

/// Piecewise-linear CDF through `table`, clamped to 0 and 1 outside it.
pub fn interpolate_cdf(table: &[(f64, f64)], t: f64) -> f64 {
    let first = table[0];
    let last = table[table.len() - 1];
    if t <= first.0 {
        return if t < first.0 { 0.0 } else { first.1 };
    }
    if t >= last.0 {
        return if t > last.0 { 1.0 } else { last.1 };
    }
    let k = table.partition_point(|p| p.0 <= t);
    let (t0, f0) = table[k - 1];
    let (t1, f1) = table[k];
    f0 + (f1 - f0) * (t - t0) / (t1 - t0)
}

/// The XY determinant along `t_values`, with the realness diagnostics.
pub fn xy_table(t_values: &[f64], beta: f64, m: usize) -> Result<XySummary> {
    let mut rows = Vec::new();
    for &t in t_values {
        let d = xy_determinant(t, beta, m)?;
        rows.push(XyRow {
            t,
            x: (-t * t / 2.0).exp() * d.value.re,
            det_re: d.value.re,
            det_im: d.value.im,
            log_abs_x: -t * t / 2.0 + d.value.norm().ln(),
            resolution_change: d.change,
        });
    }
    let (ts, ls): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| (5.0..=10.0).contains(&r.t))
        .map(|r| (r.t, r.log_abs_x))
        .unzip();
    let fitted_slope = (ts.len() >= 2).then(|| stats::fit_slope(&ts, &ls));
    Ok(XySummary {
        beta,
        target_slope: xy_asymptotic_slope(beta)?,
        fitted_slope,
        max_abs_imag: rows.iter().fold(0.0, |m, r| m.max(r.det_im.abs())),
        non_real_points: rows.iter().filter(|r| r.det_im.abs() >= XY_IMAG_TOL).count(),
        rows,
    })
}

fn csv_line(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

fn f(v: f64) -> String {
    format_f64(v)
}

impl RunResult {
    /// One row per trial or table point.
    pub fn records_csv(&self) -> String {
        let mut out = String::new();
        match &self.outcome {
            Outcome::Universality(r) => {
                out.push_str("ensemble,trial,T,k_hat,top_gap,epsilon,T_normalized\n");
                for s in &r.ensembles {
                    for (rec, z) in s.records.iter().zip(&s.normalized) {
                        out.push_str(&csv_line(&[
                            s.ensemble.label().to_string(),
                            rec.trial.to_string(),
                            f(rec.t),
                            rec.k_hat.to_string(),
                            f(rec.top_gap),
                            f(rec.epsilon),
                            f(*z),
                        ]));
                    }
                }
            }
            Outcome::GapLaw(r) => {
                out.push_str("trial,T1,top_entry,lambda_max,top_gap,scaled_T1,scaled_inverse_gap\n");
                for g in &r.records {
                    out.push_str(&csv_line(&[
                        g.trial.to_string(),
                        f(g.t1),
                        f(g.top_entry),
                        f(g.lambda_max),
                        f(g.top_gap),
                        f(g.scaled_t1),
                        f(g.scaled_inverse_gap),
                    ]));
                }
            }
            Outcome::TwTable { rows, .. } => {
                out.push_str("t,F_pii,F_airy,abs_diff\n");
                for r in rows {
                    out.push_str(&csv_line(&[f(r.t), f(r.f_pii), f(r.f_airy), f(r.diff)]));
                }
            }
            Outcome::SineGap(rows) => {
                out.push_str("s,P,product_residual,resolution_change\n");
                for r in rows {
                    out.push_str(&csv_line(&[
                        f(r.s),
                        f(r.p),
                        f(r.product_residual),
                        f(r.resolution_change),
                    ]));
                }
            }
            Outcome::Xy(x) => {
                out.push_str("t,X,det_re,det_im,log_abs_X,resolution_change\n");
                for r in &x.rows {
                    out.push_str(&csv_line(&[
                        f(r.t),
                        f(r.x),
                        f(r.det_re),
                        f(r.det_im),
                        f(r.log_abs_x),
                        f(r.resolution_change),
                    ]));
                }
            }
            Outcome::LisMc(l) => {
                out.push_str("trial,lis,scaled\n");
                for t in &l.sample.trials {
                    out.push_str(&csv_line(&[t.trial.to_string(), t.lis.to_string(), f(t.scaled)]));
                }
            }
        }
        out
    }

    /// `bin_left,bin_right,count_<sample>…` when the experiment has one.
    pub fn histogram_csv(&self) -> Option<String> {
        let (h, names): (&Histogram, Vec<String>) = match &self.outcome {
            Outcome::Universality(r) => (
                &r.histogram,
                r.ensembles.iter().map(|s| s.ensemble.label().to_string()).collect(),
            ),
            Outcome::GapLaw(r) => (&r.histogram, vec!["scaled_T1".into(), "scaled_inverse_gap".into()]),
            Outcome::LisMc(l) => (&l.histogram, vec!["scaled_lis".into()]),
            _ => return None,
        };
        let mut out = String::from("bin_left,bin_right");
        for n in &names {
            let _ = write!(out, ",count_{n}");
        }
        out.push('\n');
        for k in 0..h.edges.len() - 1 {
            let mut row = vec![f(h.edges[k]), f(h.edges[k + 1])];
            row.extend(h.counts.iter().map(|c| c[k].to_string()));
            out.push_str(&csv_line(&row));
        }
        Some(out)
    }

    pub fn summary(&self) -> Value {
        let body = match &self.outcome {
            Outcome::Universality(r) => json!({
                "ensembles": r.ensembles.iter().map(|s| json!({
                    "ensemble": s.ensemble.label(),
                    "halted": s.records.len(),
                    "non_halting": s.excluded.len(),
                    "excluded_trials": s.excluded.iter().map(|(t, why)| json!({ "trial": t, "reason": why })).collect::<Vec<_>>(),
                    "mean": s.mean,
                    "variance": s.variance,
                })).collect::<Vec<_>>(),
                "ks": r.ks.iter().map(|k| json!({
                    "a": k.a.label(), "b": k.b.label(), "distance": k.distance,
                })).collect::<Vec<_>>(),
            }),
            Outcome::GapLaw(r) => json!({
                "scaling_region": r.scaling,
                "halted": r.records.len(),
                "non_halting": r.excluded.len(),
                "contract_violations": r.contract_violations,
                "median_matched_ks": r.median_matched_ks,
                "spearman_t1_vs_inverse_gap": r.spearman,
            }),
            Outcome::TwTable {
                rows,
                painleve_residual,
            } => json!({
                "painleve_residual": painleve_residual,
                "max_abs_diff": rows.iter().fold(0.0f64, |m, r| m.max(r.diff)),
            }),
            Outcome::SineGap(rows) => json!({
                "max_product_residual": rows.iter().fold(0.0f64, |m, r| m.max(r.product_residual)),
                "max_resolution_change": rows.iter().fold(0.0f64, |m, r| m.max(r.resolution_change)),
            }),
            Outcome::Xy(x) => json!({
                "beta": x.beta,
                "target_slope": x.target_slope,
                "fitted_slope_log_abs_X": x.fitted_slope,
                "max_abs_imag_det": x.max_abs_imag,
                "non_real_points": x.non_real_points,
                "imag_tolerance": XY_IMAG_TOL,
            }),
            Outcome::LisMc(l) => json!({
                "N": l.sample.n,
                "trials": l.sample.trials.len(),
                "mean_lis_over_sqrt_n": l.sample.mean_lis_over_sqrt_n(),
                "ks_vs_tracy_widom": l.ks_vs_tracy_widom,
            }),
        };
        json!({
            "experiment": self.config.experiment.name(),
            "config": self.config,
            "tool_version": self.tool_version,
            "wall_time_s": self.wall_time_s,
            "results": body,
        })
    }

    /// Pretty-printed [`summary`](Self::summary) with a trailing newline.
    pub fn summary_text(&self) -> String {
        serde_json::to_string_pretty(&self.summary()).expect("summary serializes") + "\n"
    }

    /// Writes `records.csv`, `histogram.csv` (when present) and
    /// `summary.json` into `dir`, each through a temporary file and a rename.
    /// The summary goes last, so its presence marks a complete run.
    pub fn write_outputs(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = vec![write_atomic(dir, "records.csv", &self.records_csv())?];
        if let Some(h) = self.histogram_csv() {
            written.push(write_atomic(dir, "histogram.csv", &h)?);
        }
        written.push(write_atomic(dir, "summary.json", &self.summary_text())?);
        Ok(written)
    }
}

pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, &target)?;
    Ok(target)
}

/// Machine-readable error report.
pub fn error_json(e: &Error) -> String {
    let mut obj = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
    if let Error::Config { field, .. } = e {
        obj["error"]["field"] = json!(field);
    }
    serde_json::to_string(&obj).expect("error serializes")
}
