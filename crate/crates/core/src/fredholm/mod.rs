//! Fredholm determinants of integrable kernels by Nyström discretization,
//! and the distributions built from them.

mod airy;
mod painleve;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, Matrix};

pub use airy::{airy_ai, airy_ai_prime, AIRY_RANGE};
pub use painleve::{hastings_mcleod_left, painleve2_hastings_mcleod, tracy_widom_pii, PainleveSolution, TracyWidom};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// `m`-point Gauss–Legendre rule on `[a, b]`, nodes ascending.
pub fn gauss_legendre(m: usize, a: f64, b: f64) -> QuadratureRule {
    assert!(m >= 1 && a < b, "need m ≥ 1 and a < b");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_m and P_m′ by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if m == 1 { x } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if m == 1 {
            x = 0.0;
            dp = 1.0;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[m - 1 - i] = mid + half * x;
        nodes[i] = mid - half * x;
        weights[i] = half * w;
        weights[m - 1 - i] = half * w;
    }
    QuadratureRule { nodes, weights }
}

type Component = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
type Direct = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

/// Change of variable applied before Gauss–Legendre.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Substitution {
    None,
    /// `z = sin θ` on `(−1, 1)`, which smooths `√(1 − z²)` endpoint behaviour.
    Sine,
}

/// `K(x, y) = Σ fᵢ(x)gᵢ(y)/(x − y)` on `[a, b]`.
///
/// The diagonal is the limit `−Σ fᵢ(x)gᵢ′(x)`, valid when `Σ fᵢgᵢ = 0`.
/// An optional direct formula replaces the quotient off the diagonal
/// where it is better conditioned.
#[derive(Clone)]
pub struct IntegrableKernel {
    pub f: Vec<Component>,
    pub g: Vec<Component>,
    pub dg: Vec<Component>,
    pub interval: (f64, f64),
    pub substitution: Substitution,
    direct: Option<Direct>,
}

impl std::fmt::Debug for IntegrableKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IntegrableKernel")
            .field("components", &self.f.len())
            .field("interval", &self.interval)
            .field("substitution", &self.substitution)
            .finish()
    }
}

impl IntegrableKernel {
    pub fn new(f: Vec<Component>, g: Vec<Component>, dg: Vec<Component>, interval: (f64, f64)) -> Result<Self> {
        if f.len() != g.len() || g.len() != dg.len() {
            return Err(Error::Shape("f, g and g′ need equal lengths".into()));
        }
        if !(interval.0 <= interval.1) {
            return Err(Error::Domain(format!("empty interval {interval:?}")));
        }
        Ok(IntegrableKernel {
            f,
            g,
            dg,
            interval,
            substitution: Substitution::None,
            direct: None,
        })
    }

    pub fn with_substitution(mut self, s: Substitution) -> Self {
        self.substitution = s;
        self
    }

    fn with_direct(mut self, d: Direct) -> Self {
        self.direct = Some(d);
        self
    }

    /// Off-diagonal value from the components alone.
    pub fn component_value(&self, x: f64, y: f64) -> Complex64 {
        if x == y {
            return self.diagonal(x);
        }
        let s: Complex64 = self.f.iter().zip(&self.g).map(|(f, g)| f(x) * g(y)).sum();
        s / (x - y)
    }

    pub fn diagonal(&self, x: f64) -> Complex64 {
        -self
            .f
            .iter()
            .zip(&self.dg)
            .map(|(f, dg)| f(x) * dg(x))
            .sum::<Complex64>()
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        if x == y {
            return self.diagonal(x);
        }
        match &self.direct {
            Some(d) => d(x, y),
            None => self.component_value(x, y),
        }
    }

    /// Quadrature in the kernel's variable, substitution applied.
    pub fn quadrature(&self, m: usize) -> QuadratureRule {
        let (a, b) = self.interval;
        match self.substitution {
            Substitution::None => gauss_legendre(m, a, b),
            Substitution::Sine => {
                let r = gauss_legendre(m, a.asin(), b.asin());
                QuadratureRule {
                    nodes: r.nodes.iter().map(|t| t.sin()).collect(),
                    weights: r.nodes.iter().zip(&r.weights).map(|(t, w)| w * t.cos()).collect(),
                }
            }
        }
    }

    /// `√wᵢ K(xᵢ, xⱼ) √wⱼ`, row-major.
    pub fn nystrom_matrix(&self, m: usize) -> Vec<Complex64> {
        let rule = self.quadrature(m);
        nystrom(&|x, y| self.eval(x, y), &rule)
    }
}

fn nystrom(k: &dyn Fn(f64, f64) -> Complex64, rule: &QuadratureRule) -> Vec<Complex64> {
    let m = rule.len();
    let sw: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let mut a = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            a.push(sw[i] * k(rule.nodes[i], rule.nodes[j]) * sw[j]);
        }
    }
    a
}

/// Determinant of a dense complex matrix by LU with partial pivoting.
pub fn complex_det(mut a: Vec<Complex64>, n: usize) -> Complex64 {
    assert_eq!(a.len(), n * n);
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm()))
            .expect("non-empty range");
        if a[p * n + k].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det *= pivot;
        for i in k + 1..n {
            let l = a[i * n + k] / pivot;
            if l.norm() == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let v = a[k * n + j];
                a[i * n + j] -= l * v;
            }
        }
    }
    det
}

/// `det(I − A)` for a row-major `m × m` matrix `A`.
fn det_one_minus(a: &[Complex64], m: usize) -> Complex64 {
    let mut b: Vec<Complex64> = a.iter().map(|v| -v).collect();
    for i in 0..m {
        b[i * m + i] += 1.0;
    }
    complex_det(b, m)
}

/// A Nyström determinant with its resolution check at `2m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FredholmDet {
    pub value: Complex64,
    pub m: usize,
    pub refined: Complex64,
    /// `|refined − value| / max(1, |refined|)`.
    pub change: f64,
    pub converged: bool,
}

/// Doubling tolerance on the relative change.
pub const RESOLUTION_TOL: f64 = 1e-8;

/// `det(1 − K)` at `m` nodes, checked against `2m` nodes.
pub fn fredholm_det(kernel: &IntegrableKernel, m: usize) -> Result<FredholmDet> {
    fredholm_det_fn(&|x, y| kernel.eval(x, y), &|m| kernel.quadrature(m), m)
}

/// `det(1 − K)` for any kernel given as a closure and a rule family.
pub fn fredholm_det_fn(
    k: &dyn Fn(f64, f64) -> Complex64,
    rule: &dyn Fn(usize) -> QuadratureRule,
    m: usize,
) -> Result<FredholmDet> {
    if m < 2 {
        return Err(Error::config("m", "needs at least 2 nodes"));
    }
    let value = det_one_minus(&nystrom(k, &rule(m)), m);
    let refined = det_one_minus(&nystrom(k, &rule(2 * m)), 2 * m);
    let change = (refined - value).norm() / refined.norm().max(1.0);
    Ok(FredholmDet {
        value,
        m,
        refined,
        change,
        converged: change < RESOLUTION_TOL,
    })
}

/// Eigenvalues of the symmetrized Nyström matrix, descending.
pub fn kernel_eigenvalues(kernel: &IntegrableKernel, m: usize) -> Result<Vec<f64>> {
    let a = kernel.nystrom_matrix(m);
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.norm())).max(1.0);
    for i in 0..m {
        for j in 0..m {
            let v = a[i * m + j];
            if v.im.abs() > 1e-13 * scale || (v - a[j * m + i]).norm() > 1e-12 * scale {
                return Err(Error::Domain("kernel matrix is not real symmetric".into()));
            }
        }
    }
    let real = Matrix::from_fn(m, m, |i, j| a[i * m + j].re).symmetric_part();
    let mut values = symmetric_eigenvalues(&real)?;
    values.reverse();
    Ok(values)
}

/// `sin(x − y)/π(x − y)` on `[0, 2s]` in the components
/// `(e^{ix}, −e^{−ix})/2πi` and `(e^{−iy}, e^{iy})`.
pub fn sine_kernel(s: f64) -> Result<IntegrableKernel> {
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("s must be non-negative, got {s}")));
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let i = Complex64::i();
    let f: Vec<Component> = vec![
        Arc::new(move |x| (i * x).exp() / two_pi_i),
        Arc::new(move |x| -(-i * x).exp() / two_pi_i),
    ];
    let g: Vec<Component> = vec![Arc::new(move |y| (-i * y).exp()), Arc::new(move |y| (i * y).exp())];
    let dg: Vec<Component> = vec![
        Arc::new(move |y| -i * (-i * y).exp()),
        Arc::new(move |y| i * (i * y).exp()),
    ];
    Ok(IntegrableKernel::new(f, g, dg, (0.0, 2.0 * s))?
        .with_direct(Arc::new(|x, y| Complex64::new((x - y).sin() / (PI * (x - y)), 0.0))))
}

/// Gap probability `det(1 − K_s)`. Exactly 1 at `s = 0`.
pub fn sine_kernel_gap(s: f64, m: usize) -> Result<f64> {
    if s == 0.0 {
        return Ok(1.0);
    }
    Ok(fredholm_det(&sine_kernel(s)?, m)?.value.re)
}

/// `(Ai(x)Ai′(y) − Ai′(x)Ai(y))/(x − y)` on `[t, t + length]`.
pub fn airy_kernel(t: f64, length: f64) -> Result<IntegrableKernel> {
    if !(t >= -8.0) {
        return Err(Error::Domain(format!("Airy kernel needs t ≥ −8, got {t}")));
    }
    let ai = |x: f64| Complex64::new(airy::airy_pair(x).0, 0.0);
    let aip = |x: f64| Complex64::new(airy::airy_pair(x).1, 0.0);
    let f: Vec<Component> = vec![Arc::new(ai), Arc::new(move |x| -aip(x))];
    let g: Vec<Component> = vec![Arc::new(aip), Arc::new(ai)];
    // g₁′ = Ai″ = x·Ai
    let dg: Vec<Component> = vec![Arc::new(move |x| x * ai(x)), Arc::new(aip)];
    IntegrableKernel::new(f, g, dg, (t, t + length))
}

/// Truncated length of the Airy kernel's interval.
pub const AIRY_WINDOW: f64 = 12.0;

/// `det(1 − A_t)` on `[t, t + 12]`.
pub fn airy_kernel_det(t: f64, m: usize) -> Result<FredholmDet> {
    fredholm_det(&airy_kernel(t, AIRY_WINDOW)?, m)
}

/// `φ(z)·sin(it(z − z′))/π(z − z′)` on `(−1, 1)` with `φ(z) = tanh(β√(1 − z²))`,
/// in the components `f = −(e^{tz}φ, e^{−tz}φ)/2πi`, `g = (e^{−tz}, −e^{tz})`.
pub fn xy_kernel(t: f64, beta: f64) -> Result<IntegrableKernel> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be non-negative, got {t}")));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let phi = move |z: f64| (beta * (1.0 - z * z).max(0.0).sqrt()).tanh();
    let f: Vec<Component> = vec![
        Arc::new(move |z| -(t * z).exp() * phi(z) / two_pi_i),
        Arc::new(move |z| -(-t * z).exp() * phi(z) / two_pi_i),
    ];
    let g: Vec<Component> = vec![
        Arc::new(move |z| Complex64::new((-t * z).exp(), 0.0)),
        Arc::new(move |z| Complex64::new(-(t * z).exp(), 0.0)),
    ];
    let dg: Vec<Component> = vec![
        Arc::new(move |z| Complex64::new(-t * (-t * z).exp(), 0.0)),
        Arc::new(move |z| Complex64::new(-t * (t * z).exp(), 0.0)),
    ];
    // sin(iw) = i·sinh(w)
    let direct: Direct = Arc::new(move |z, w| {
        let d = z - w;
        Complex64::new(0.0, phi(z) * (t * d).sinh() / (PI * d))
    });
    Ok(IntegrableKernel::new(f, g, dg, (-1.0, 1.0))?
        .with_substitution(Substitution::Sine)
        .with_direct(direct))
}

/// `det(1 − K_t)` for the XY kernel, complex as computed.
pub fn xy_determinant(t: f64, beta: f64, m: usize) -> Result<FredholmDet> {
    fredholm_det(&xy_kernel(t, beta)?, m)
}

/// Tolerance on `|Im det(1 − K_t)|`.
pub const XY_IMAG_TOL: f64 = 1e-8;

/// `X(t) = e^{−t²/2} Re det(1 − K_t)`, refusing when the determinant is not real.
pub fn xy_autocorrelation(t: f64, beta: f64, m: usize) -> Result<f64> {
    let d = xy_determinant(t, beta, m)?;
    if d.value.im.abs() >= XY_IMAG_TOL {
        return Err(Error::Representation(format!(
            "det(1 - K_t) at t = {t}, beta = {beta} has imaginary part {:.3e}",
            d.value.im
        )));
    }
    Ok((-t * t / 2.0).exp() * d.value.re)
}

/// `(1/π)∫₋₁¹ log|tanh βs| ds`.
///
/// The integrand is even; on `[0, 1]` the split
/// `log tanh βs = log βs + log(tanh βs/βs)` integrates the singular part
/// exactly and leaves a smooth remainder, summed over geometric panels.
pub fn xy_asymptotic_slope(beta: f64) -> Result<f64> {
    xy_slope_with(beta, 24)
}

fn xy_slope_with(beta: f64, order: usize) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    let smooth = |s: f64| {
        let x = beta * s;
        if x < 1e-4 {
            // log(tanh x / x) = −x²/3 + 7x⁴/90 − …
            -x * x / 3.0 + 7.0 * x.powi(4) / 90.0
        } else {
            (x.tanh() / x).ln()
        }
    };
    let mut edges = vec![0.0];
    let mut e = 1.0 / beta;
    while e < 1.0 {
        edges.push(e);
        e *= 2.0;
    }
    edges.push(1.0);
    let mut total = beta.ln() - 1.0;
    for w in edges.windows(2) {
        total += gauss_legendre(order, w[0], w[1]).integrate(smooth);
    }
    Ok(2.0 * total / PI)
}
