//! Hastings–McLeod solution of Painlevé II and the Tracy–Widom distribution.

use serde::{Deserialize, Serialize};

use super::airy::{airy_pair, airy_square_tails};
use super::gauss_legendre;
use crate::error::{Error, Result};

/// Solution of `u″ = 2u³ + xu` on a uniform grid over `[−L₋, L₊]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PainleveSolution {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub l_minus: f64,
    pub l_plus: f64,
    /// `max |δ²u/h² − (2u³ + xu)|` in the Numerov weighting, interior nodes.
    pub residual: f64,
    pub newton_iterations: usize,
}

/// `√(−x/2)(1 + x⁻³/8 − 73x⁻⁶/128)`, the `x → −∞` expansion.
pub fn hastings_mcleod_left(x: f64) -> f64 {
    let x3 = x * x * x;
    (-x / 2.0).sqrt() * (1.0 + 1.0 / (8.0 * x3) - 73.0 / (128.0 * x3 * x3))
}

fn rhs(x: f64, u: f64) -> f64 {
    2.0 * u * u * u + x * u
}

fn rhs_u(x: f64, u: f64) -> f64 {
    6.0 * u * u + x
}

/// Solves the tridiagonal system `lower·x_{i−1} + diag·x_i + upper·x_{i+1} = r`.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], r: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = r[0] / diag[0];
    for i in 1..n {
        let den = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / den } else { 0.0 };
        d[i] = (r[i] - lower[i] * d[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Boundary-value solve with Newton on the Numerov discretization
/// `u_{i+1} − 2u_i + u_{i−1} = h²/12 (F_{i+1} + 10F_i + F_{i−1})`.
///
/// Boundary values are `Ai(L₊)` on the right and the three-term left
/// expansion at `−L₋`. The initial guess is `max(Ai(x), √(−x/2))`.
pub fn painleve2_hastings_mcleod(l_minus: f64, l_plus: f64, grid_n: usize) -> Result<PainleveSolution> {
    if !(l_minus >= 4.0) {
        return Err(Error::config("L_minus", "must be at least 4"));
    }
    if !(l_plus >= 6.0) {
        return Err(Error::config("L_plus", "must be at least 6"));
    }
    if grid_n < 400 {
        return Err(Error::config("grid_n", "must be at least 400"));
    }
    let n = grid_n;
    let h = (l_minus + l_plus) / n as f64;
    let x: Vec<f64> = (0..=n).map(|i| -l_minus + h * i as f64).collect();
    let mut u: Vec<f64> = x
        .iter()
        .map(|&xi| {
            let ai = airy_pair(xi).0;
            if xi < 0.0 {
                ai.max((-xi / 2.0).sqrt())
            } else {
                ai
            }
        })
        .collect();
    u[0] = hastings_mcleod_left(-l_minus);
    u[n] = airy_pair(l_plus).0;

    let h2 = h * h / 12.0;
    let residual_of = |u: &[f64]| -> Vec<f64> {
        (1..n)
            .map(|i| {
                u[i + 1] - 2.0 * u[i] + u[i - 1]
                    - h2 * (rhs(x[i + 1], u[i + 1]) + 10.0 * rhs(x[i], u[i]) + rhs(x[i - 1], u[i - 1]))
            })
            .collect()
    };
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        let r = residual_of(&u);
        let norm = r.iter().fold(0.0f64, |m, v| m.max(v.abs())) / (h * h);
        history.push(norm);
        if norm < 1e-11 {
            break;
        }
        if iterations >= 60 || !norm.is_finite() {
            return Err(Error::NewtonFailed { history });
        }
        let m = n - 1;
        let mut lower = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        for k in 0..m {
            let i = k + 1;
            lower[k] = 1.0 - h2 * rhs_u(x[i - 1], u[i - 1]);
            diag[k] = -2.0 - 10.0 * h2 * rhs_u(x[i], u[i]);
            upper[k] = 1.0 - h2 * rhs_u(x[i + 1], u[i + 1]);
        }
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let du = thomas(&lower, &diag, &upper, &neg);
        for k in 0..m {
            u[k + 1] += du[k];
        }
        iterations += 1;
    }
    let residual = *history.last().expect("at least one evaluation");
    let du = derivative(&u, h);
    Ok(PainleveSolution {
        x,
        u,
        du,
        l_minus,
        l_plus,
        residual,
        newton_iterations: iterations,
    })
}

/// Fourth-order differences, one-sided at the ends.
fn derivative(u: &[f64], h: f64) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| {
            if i >= 2 && i + 2 < n {
                (u[i - 2] - 8.0 * u[i - 1] + 8.0 * u[i + 1] - u[i + 2]) / (12.0 * h)
            } else if i < 2 {
                (-25.0 * u[i] + 48.0 * u[i + 1] - 36.0 * u[i + 2] + 16.0 * u[i + 3] - 3.0 * u[i + 4]) / (12.0 * h)
            } else {
                (25.0 * u[i] - 48.0 * u[i - 1] + 36.0 * u[i - 2] - 16.0 * u[i - 3] + 3.0 * u[i - 4]) / (12.0 * h)
            }
        })
        .collect()
}

impl PainleveSolution {
    pub fn step(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    /// Cubic Hermite interpolation of `u` on the grid.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t < self.x[0] || t > *self.x.last().expect("non-empty grid") {
            return Err(Error::Range(format!(
                "{t} outside [{}, {}]",
                -self.l_minus, self.l_plus
            )));
        }
        let h = self.step();
        let i = (((t - self.x[0]) / h) as usize).min(self.x.len() - 2);
        Ok(self.hermite(i, t))
    }

    fn hermite(&self, i: usize, t: f64) -> f64 {
        let h = self.step();
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.u[i] + h10 * h * self.du[i] + h01 * self.u[i + 1] + h11 * h * self.du[i + 1]
    }

    /// `(∫_t^∞ u², ∫_t^∞ x·u²)`, with `u = Ai` past `L₊`.
    pub fn square_moments(&self, t: f64) -> Result<(f64, f64)> {
        if t < -self.l_minus + 1.0 || t > self.l_plus - 1.0 {
            return Err(Error::Range(format!(
                "t = {t} outside [{}, {}]",
                -self.l_minus + 1.0,
                self.l_plus - 1.0
            )));
        }
        let rule = gauss_legendre(6, 0.0, 1.0);
        let h = self.step();
        let first = ((t - self.x[0]) / h) as usize;
        let (mut i0, mut i1) = airy_square_tails(self.l_plus);
        for i in first..self.x.len() - 1 {
            let a = self.x[i].max(t);
            let b = self.x[i + 1];
            if b <= a {
                continue;
            }
            for (node, w) in rule.nodes.iter().zip(&rule.weights) {
                let xx = a + (b - a) * node;
                let v = self.hermite(i, xx);
                i0 += w * (b - a) * v * v;
                i1 += w * (b - a) * xx * v * v;
            }
        }
        Ok((i0, i1))
    }
}

/// `F(t) = exp(−∫_t^∞ (x − t)u²(x) dx)`.
pub fn tracy_widom_pii(t: f64, sol: &PainleveSolution) -> Result<f64> {
    let (i0, i1) = sol.square_moments(t)?;
    Ok((-(i1 - t * i0)).exp())
}

/// A solved Hastings–McLeod profile packaged as a CDF.
#[derive(Clone, Debug)]
pub struct TracyWidom {
    solution: PainleveSolution,
}

impl TracyWidom {
    /// Window `[−10, 8]`, 2000 cells.
    pub fn new() -> Result<Self> {
        Ok(TracyWidom {
            solution: painleve2_hastings_mcleod(10.0, 8.0, 2000)?,
        })
    }

    pub fn from_solution(solution: PainleveSolution) -> Self {
        TracyWidom { solution }
    }

    pub fn solution(&self) -> &PainleveSolution {
        &self.solution
    }

    /// `F(t)`, returning 0 left of the window and 1 right of it. At the
    /// window edges `F(−9) < 10⁻¹⁰` and `1 − F(7) < 10⁻¹⁰`.
    pub fn cdf(&self, t: f64) -> f64 {
        let lo = -self.solution.l_minus + 1.0;
        let hi = self.solution.l_plus - 1.0;
        if t < lo {
            0.0
        } else if t > hi {
            1.0
        } else {
            tracy_widom_pii(t, &self.solution).expect("t inside the window")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solution() -> PainleveSolution {
        painleve2_hastings_mcleod(10.0, 8.0, 2000).unwrap()
    }

    #[test]
    fn residual_and_boundaries() {
        let s = solution();
        assert!(s.residual < 1e-8, "residual {}", s.residual);
        assert_eq!(*s.u.last().unwrap(), airy_pair(8.0).0);
        assert!(s.u.iter().all(|&v| v > 0.0));
        assert!(s.u.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn right_tail_follows_airy() {
        let s = solution();
        for (x, u) in s.x.iter().zip(&s.u) {
            if *x >= 6.0 {
                assert!((u - airy_pair(*x).0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn dominates_airy_near_origin() {
        let s = solution();
        for (x, u) in s.x.iter().zip(&s.u) {
            if (-2.0..=2.0).contains(x) {
                assert!(*u > airy_pair(*x).0, "x = {x}");
            }
        }
    }

    #[test]
    fn grid_self_convergence() {
        let a = painleve2_hastings_mcleod(10.0, 8.0, 800).unwrap();
        let b = painleve2_hastings_mcleod(10.0, 8.0, 1600).unwrap();
        assert!((a.eval(0.0).unwrap() - b.eval(0.0).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn cdf_shape() {
        let s = solution();
        assert!(tracy_widom_pii(7.0, &s).unwrap() > 0.9999);
        assert!(tracy_widom_pii(-6.0, &s).unwrap() < 1e-3);
        let mut prev = 0.0;
        for i in 0..=30 {
            let f = tracy_widom_pii(-6.0 + 0.4 * i as f64, &s).unwrap();
            assert!(f > prev);
            prev = f;
        }
        assert!(tracy_widom_pii(-9.5, &s).is_err());
        assert!(tracy_widom_pii(7.5, &s).is_err());
    }

    #[test]
    fn known_moment() {
        // mean of the β = 2 Tracy–Widom law is −1.7710868074
        let tw = TracyWidom::new().unwrap();
        let rule = gauss_legendre(400, -9.0, 7.0);
        let mean: f64 = -9.0
            + rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(t, w)| w * (1.0 - tw.cdf(*t)))
                .sum::<f64>();
        assert!((mean + 1.771_086_807_4).abs() < 1e-6, "mean {mean}");
    }

    #[test]
    fn bad_parameters() {
        assert!(painleve2_hastings_mcleod(3.0, 8.0, 800).is_err());
        assert!(painleve2_hastings_mcleod(10.0, 5.0, 800).is_err());
        assert!(painleve2_hastings_mcleod(10.0, 8.0, 100).is_err());
    }
}
