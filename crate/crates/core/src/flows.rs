//! Isospectral flows on symmetric matrices.
//!
//! The Toda lattice in Flaschka variables is the Lax equation
//! `dM/dt = [M, B(M)]` with `B(M) = M₋ − M₋ᵀ` (strictly lower part minus its
//! transpose). More generally `H_G(M) = tr G(M)` generates
//! `dM/dt = [M, B(g(M))]` with `g = G′`, solved exactly by
//! `exp(t·g(M₀)) = QR`, `M(t) = QᵀM₀Q`. With `g = log` the flow passes
//! through the unshifted QR iterates at integer times.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    poly_roots, qr_factorize, symmetric_eigen, Matrix, RootSet, ScalarFn, SymmetricMatrix, TridiagonalMatrix,
};

/// Positions and momenta of the open Toda lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlaschkaState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl FlaschkaState {
    /// `H_T = ½Σ yᵢ² + Σ e^{xᵢ − xᵢ₊₁}`.
    pub fn hamiltonian(&self) -> f64 {
        let kinetic: f64 = self.y.iter().map(|y| 0.5 * y * y).sum();
        let potential: f64 = self.x.windows(2).map(|w| (w[0] - w[1]).exp()).sum();
        kinetic + potential
    }
}

/// `a_k = −y_k/2`, `b_k = ½·e^{(x_k − x_{k+1})/2}`.
pub fn flaschka(state: &FlaschkaState) -> Result<TridiagonalMatrix> {
    if state.x.len() != state.y.len() || state.x.is_empty() {
        return Err(Error::Shape("x and y must have the same non-zero length".into()));
    }
    let a = state.y.iter().map(|y| -0.5 * y).collect();
    let b = state
        .x
        .windows(2)
        .map(|w| {
            let v = 0.5 * (0.5 * (w[0] - w[1])).exp();
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(Error::Range(format!(
                    "x_k − x_k+1 = {} puts b_k outside the positive floats",
                    w[0] - w[1]
                )))
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    TridiagonalMatrix::new(a, b)
}

/// Inverse of [`flaschka`] in the gauge `Σ x_k = 0`.
pub fn inverse_flaschka(t: &TridiagonalMatrix) -> Result<FlaschkaState> {
    if let Some((k, b)) = t.b.iter().enumerate().find(|(_, &b)| !(b > 0.0)) {
        return Err(Error::Domain(format!("b_{k} = {b} must be positive")));
    }
    let n = t.n();
    let y = t.a.iter().map(|a| -2.0 * a).collect();
    let mut x = vec![0.0; n];
    for k in 0..n - 1 {
        x[k + 1] = x[k] - 2.0 * (2.0 * t.b[k]).ln();
    }
    let shift = x.iter().sum::<f64>() / n as f64;
    for v in &mut x {
        *v -= shift;
    }
    Ok(FlaschkaState { x, y })
}

/// `B(M) = M₋ − M₋ᵀ`.
pub fn skew_part(m: &Matrix) -> Matrix {
    let n = m.rows();
    Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => m[(i, j)],
        std::cmp::Ordering::Less => -m[(j, i)],
        std::cmp::Ordering::Equal => 0.0,
    })
}

/// Commutator `[M, B(G)]`, mirrored from its lower triangle.
fn lax_commutator(m: &SymmetricMatrix, g: &Matrix) -> SymmetricMatrix {
    let b = skew_part(g);
    let c = m.matmul(&b).sub(&b.matmul(m));
    let n = m.n();
    SymmetricMatrix::from_lower_fn(n, |i, j| c[(i, j)])
}

/// Toda vector field `[M, B(M)]`.
pub fn lax_rhs(m: &SymmetricMatrix) -> SymmetricMatrix {
    lax_commutator(m, m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Factorization,
    Rk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSpec {
    pub g: ScalarFn,
    pub t: f64,
    pub integrator: Integrator,
    pub dt: f64,
}

impl FlowSpec {
    pub fn toda(t: f64) -> Self {
        FlowSpec {
            g: ScalarFn::Identity,
            t,
            integrator: Integrator::Factorization,
            dt: 1e-3,
        }
    }

    pub fn qr(t: f64) -> Self {
        FlowSpec {
            g: ScalarFn::Log,
            ..FlowSpec::toda(t)
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t >= 0.0) {
            return Err(Error::config("t", "flow time must be non-negative"));
        }
        if self.integrator == Integrator::Rk4 && !(self.dt > 0.0) {
            return Err(Error::config("dt", "RK4 step must be positive"));
        }
        Ok(())
    }
}

/// Time-`t` map of the `H_G` flow starting at `M₀`.
pub fn g_flow(m0: &SymmetricMatrix, spec: &FlowSpec) -> Result<SymmetricMatrix> {
    spec.validate()?;
    if spec.t == 0.0 {
        return Ok(m0.clone());
    }
    match spec.integrator {
        Integrator::Factorization => {
            let q = flow_orthogonal_factor(m0, &spec.g, spec.t)?;
            Ok(m0.congruence(&q))
        }
        Integrator::Rk4 => {
            let g = spec.g.clone();
            rk4(m0, spec.t, spec.dt, |m| {
                let gm = match g {
                    ScalarFn::Identity => m.clone(),
                    _ => crate::linalg::matrix_function(m, &g)?,
                };
                Ok(lax_commutator(m, &gm))
            })
        }
    }
}

/// Orthogonal factor `Q` of `exp(t·g(M₀)) = QR`.
///
/// The exponential is never formed. With eigenpairs sorted so that
/// `g(λ₁) ≥ … ≥ g(λ_n)` and `D = diag(e^{t(g(λᵢ) − g(λ₁))})`, write
/// `Vᵀ = LU` (no pivoting). Then `exp(t·g(M₀)) ∝ V·(DLD⁻¹)·DU` where
/// `DLD⁻¹` is unit lower triangular with entries bounded by those of `L`, so
/// `Q` is the QR factor of `V·DLD⁻¹` up to the signs of `U`'s diagonal. When
/// `Vᵀ` has no usable LU (reducible `M₀`, e.g. diagonal) the shifted
/// exponential is factored directly.
pub fn flow_orthogonal_factor(m0: &SymmetricMatrix, g: &ScalarFn, t: f64) -> Result<Matrix> {
    let n = m0.n();
    let spec = symmetric_eigen(m0)?;
    let v = spec.vectors.expect("vectors requested");
    let gv = spec.values.iter().map(|&l| g.apply(l)).collect::<Result<Vec<f64>>>()?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| gv[j].total_cmp(&gv[i]));
    let vs = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    let gs: Vec<f64> = order.iter().map(|&i| gv[i]).collect();

    if let Some((l, u_signs)) = lu_no_pivot(&vs.transpose()) {
        let w = Matrix::from_fn(n, n, |r, c| {
            (c..n)
                .map(|k| {
                    let lkc = if k == c {
                        1.0
                    } else {
                        l[(k, c)] * (t * (gs[k] - gs[c])).exp()
                    };
                    vs[(r, k)] * lkc
                })
                .sum()
        });
        let mut q = qr_factorize(&w)?.q;
        for (c, s) in u_signs.iter().enumerate() {
            if *s < 0.0 {
                for r in 0..n {
                    q[(r, c)] = -q[(r, c)];
                }
            }
        }
        Ok(q)
    } else {
        let d: Vec<f64> = gs.iter().map(|g| (t * (g - gs[0])).exp()).collect();
        let f = crate::linalg::funcs::spectral_synthesis(&vs, &d);
        Ok(qr_factorize(f.as_matrix())?.q)
    }
}

/// Doolittle LU without pivoting. Returns `L` and the signs of `U`'s diagonal,
/// or `None` when a pivot is tiny or `L` grows large.
fn lu_no_pivot(a: &Matrix) -> Option<(Matrix, Vec<f64>)> {
    let n = a.rows();
    let mut u = a.clone();
    let mut l = Matrix::identity(n);
    let mut signs = Vec::with_capacity(n);
    for k in 0..n {
        let p = u[(k, k)];
        if p.abs() < 1e-8 {
            return None;
        }
        signs.push(p.signum());
        for i in (k + 1)..n {
            let f = u[(i, k)] / p;
            if f.abs() > 1e8 {
                return None;
            }
            l[(i, k)] = f;
            for j in k..n {
                u[(i, j)] -= f * u[(k, j)];
            }
        }
    }
    Some((l, signs))
}

fn rk4(
    m0: &SymmetricMatrix,
    t: f64,
    dt: f64,
    mut rhs: impl FnMut(&SymmetricMatrix) -> Result<SymmetricMatrix>,
) -> Result<SymmetricMatrix> {
    let steps = (t / dt).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let mut m = m0.clone();
    for _ in 0..steps {
        let k1 = rhs(&m)?;
        let k2 = rhs(&m.add(&k1.scale(0.5 * h)).symmetric_part())?;
        let k3 = rhs(&m.add(&k2.scale(0.5 * h)).symmetric_part())?;
        let k4 = rhs(&m.add(&k3.scale(h)).symmetric_part())?;
        let incr = k1.add(&k2.scale(2.0)).add(&k3.scale(2.0)).add(&k4);
        m = m.add(&incr.scale(h / 6.0)).symmetric_part();
    }
    Ok(m)
}

/// Classical RK4 on the Toda Lax equation, symmetrized every step.
pub fn toda_flow_rk4(m0: &SymmetricMatrix, t: f64, dt: f64) -> Result<SymmetricMatrix> {
    if !(dt > 0.0) {
        return Err(Error::config("dt", "RK4 step must be positive"));
    }
    if !(t >= 0.0) {
        return Err(Error::config("t", "flow time must be non-negative"));
    }
    if t == 0.0 {
        return Ok(m0.clone());
    }
    rk4(m0, t, dt, |m| Ok(lax_rhs(m)))
}

/// One unshifted QR step `M′ = RQ = QᵀMQ`, mirrored from the lower triangle
/// so that tridiagonal input stays exactly tridiagonal.
pub fn qr_step(m: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let f = qr_factorize(m.as_matrix())?;
    let rq = f.r.matmul(&f.q);
    Ok(SymmetricMatrix::from_lower_fn(m.n(), |i, j| rq[(i, j)]))
}

pub fn qr_iterate(m: &SymmetricMatrix, k: usize) -> Result<SymmetricMatrix> {
    let mut cur = m.clone();
    for _ in 0..k {
        cur = qr_step(&cur)?;
    }
    Ok(cur)
}

/// Unshifted QR step on a symmetric tridiagonal matrix with Givens rotations,
/// `O(n)`. Uses the same `R_ii > 0` normalisation as [`qr_factorize`].
pub fn qr_step_tridiagonal(t: &TridiagonalMatrix) -> Result<TridiagonalMatrix> {
    let n = t.n();
    if n == 1 {
        if t.a[0] == 0.0 {
            return Err(Error::Singular { index: 0, value: 0.0 });
        }
        return Ok(t.clone());
    }
    let norm = t.frobenius_norm();
    let mut r_diag = vec![0.0; n];
    let mut r_sup = vec![0.0; n - 1];
    let mut cs = vec![0.0; n - 1];
    let mut sn = vec![0.0; n - 1];
    let mut x = t.a[0];
    let mut y = t.b[0];
    for k in 0..n - 1 {
        let sub = t.b[k];
        let r = x.hypot(sub);
        if !(r >= 1e-14 * norm) || r == 0.0 {
            return Err(Error::Singular { index: k, value: r });
        }
        let (c, s) = (x / r, sub / r);
        cs[k] = c;
        sn[k] = s;
        r_diag[k] = r;
        r_sup[k] = c * y + s * t.a[k + 1];
        x = -s * y + c * t.a[k + 1];
        y = if k + 1 < n - 1 { c * t.b[k + 1] } else { 0.0 };
    }
    r_diag[n - 1] = x;
    if !(x.abs() >= 1e-14 * norm) || x == 0.0 {
        return Err(Error::Singular {
            index: n - 1,
            value: x.abs(),
        });
    }
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n - 1];
    let mut c_prev = 1.0;
    for k in 0..n - 1 {
        a[k] = cs[k] * c_prev * r_diag[k] + sn[k] * r_sup[k];
        b[k] = sn[k] * r_diag[k + 1];
        c_prev = cs[k];
    }
    a[n - 1] = c_prev * r_diag[n - 1];
    if r_diag[n - 1] < 0.0 {
        b[n - 2] = -b[n - 2];
    }
    TridiagonalMatrix::new(a, b)
}

/// `‖M_QR(k) − M_k‖_F`: the `g = log` flow at time `k` against `k` QR steps.
pub fn stroboscope_check(m0: &TridiagonalMatrix, k: usize) -> Result<f64> {
    if k == 0 {
        return Ok(0.0);
    }
    let dense = m0.to_dense();
    let flow = g_flow(&dense, &FlowSpec::qr(k as f64))?;
    let iter = qr_iterate(&dense, k)?;
    Ok(flow.sub(&iter).frobenius_norm())
}

/// Coefficients of `det((M − z)_j)`, where `(M − z)_j` drops the first `j`
/// rows and last `j` columns of `M − z`.
pub fn chopped_polynomial(m: &SymmetricMatrix, j: usize) -> Result<Vec<f64>> {
    const MAX_N: usize = 8;
    let n = m.n();
    if n > MAX_N {
        return Err(Error::UnsupportedSize { n, max: MAX_N });
    }
    if 2 * j >= n && !(j == 0 && n > 0) {
        return Err(Error::Range(format!(
            "chop level {j} leaves no z-dependence for n = {n}"
        )));
    }
    let size = n - j;
    let a = m.block(j, n, 0, size);
    let b = Matrix::from_fn(size, size, |r, c| if r + j == c { -1.0 } else { 0.0 });
    Ok(crate::linalg::charpoly::pencil_determinant(&a, &b))
}

/// Roots `λ_{j1}, …, λ_{j,n−2j}` of `det((M − z)_j) = 0`; `j = 0` gives the
/// spectrum. An identically-zero determinant is [`Error::Degenerate`].
pub fn chopped_spectrum(m: &SymmetricMatrix, j: usize) -> Result<RootSet> {
    let p = chopped_polynomial(m, j)?;
    poly_roots(&p).map_err(|e| match e {
        Error::Degenerate(_) => Error::Degenerate(format!("det((M − z)_{j}) vanishes identically")),
        other => other,
    })
}

/// Sum of chopped roots at level `j` (a "trace" of the chopped matrix).
pub fn chopped_trace(roots: &[Complex64]) -> Complex64 {
    roots.iter().sum()
}

/// Open Toda lattice on a Jacobi matrix integrated with classical RK4 in
/// `(a, log b)`, which keeps relative accuracy in the decaying off-diagonals.
#[derive(Clone, Debug)]
pub struct TodaLattice {
    a: Vec<f64>,
    log_b: Vec<f64>,
    signs: Vec<f64>,
    t: f64,
    h: f64,
    adaptive: bool,
}

impl TodaLattice {
    /// Adaptive step: each call to [`advance_to`](Self::advance_to) uses
    /// `h = min(0.05, 0.02/β)` with `β = max_k(|b_{k−1}| + |b_k|)`. Only the
    /// off-diagonals couple the equations, so `a` does not restrict the step.
    pub fn new(m0: &TridiagonalMatrix) -> Self {
        let mut lat = Self::with_step(m0, 0.05);
        lat.adaptive = true;
        lat
    }

    /// Fixed step `h`.
    pub fn with_step(m0: &TridiagonalMatrix, h: f64) -> Self {
        TodaLattice {
            a: m0.a.clone(),
            log_b: m0.b.iter().map(|b| b.abs().ln()).collect(),
            signs: m0.b.iter().map(|b| if *b < 0.0 { -1.0 } else { 1.0 }).collect(),
            t: 0.0,
            h,
            adaptive: false,
        }
    }

    fn coupling(&self) -> f64 {
        let b: Vec<f64> = self.offdiag_abs();
        (0..=b.len())
            .map(|k| {
                let left = if k > 0 { b[k - 1] } else { 0.0 };
                let right = b.get(k).copied().unwrap_or(0.0);
                left + right
            })
            .fold(0.0, f64::max)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.a
    }

    /// `|b_k|`.
    pub fn offdiag_abs(&self) -> Vec<f64> {
        self.log_b.iter().map(|c| c.exp()).collect()
    }

    pub fn matrix(&self) -> TridiagonalMatrix {
        TridiagonalMatrix {
            a: self.a.clone(),
            b: self.log_b.iter().zip(&self.signs).map(|(c, s)| s * c.exp()).collect(),
        }
    }

    fn field(a: &[f64], log_b: &[f64], da: &mut [f64], dc: &mut [f64]) {
        let n = a.len();
        let mut prev = 0.0;
        for k in 0..n {
            let cur = if k + 1 < n { (2.0 * log_b[k]).exp() } else { 0.0 };
            da[k] = 2.0 * (cur - prev);
            prev = cur;
        }
        for k in 0..n.saturating_sub(1) {
            dc[k] = a[k + 1] - a[k];
        }
    }

    fn rk4_step(&mut self, h: f64) {
        let (n, m) = (self.a.len(), self.log_b.len());
        let (mut k1a, mut k1c) = (vec![0.0; n], vec![0.0; m]);
        let (mut k2a, mut k2c) = (vec![0.0; n], vec![0.0; m]);
        let (mut k3a, mut k3c) = (vec![0.0; n], vec![0.0; m]);
        let (mut k4a, mut k4c) = (vec![0.0; n], vec![0.0; m]);
        let shifted =
            |base: &[f64], k: &[f64], f: f64| -> Vec<f64> { base.iter().zip(k).map(|(x, d)| x + f * d).collect() };
        Self::field(&self.a, &self.log_b, &mut k1a, &mut k1c);
        Self::field(
            &shifted(&self.a, &k1a, 0.5 * h),
            &shifted(&self.log_b, &k1c, 0.5 * h),
            &mut k2a,
            &mut k2c,
        );
        Self::field(
            &shifted(&self.a, &k2a, 0.5 * h),
            &shifted(&self.log_b, &k2c, 0.5 * h),
            &mut k3a,
            &mut k3c,
        );
        Self::field(
            &shifted(&self.a, &k3a, h),
            &shifted(&self.log_b, &k3c, h),
            &mut k4a,
            &mut k4c,
        );
        for i in 0..n {
            self.a[i] += h / 6.0 * (k1a[i] + 2.0 * k2a[i] + 2.0 * k3a[i] + k4a[i]);
        }
        for i in 0..m {
            self.log_b[i] += h / 6.0 * (k1c[i] + 2.0 * k2c[i] + 2.0 * k3c[i] + k4c[i]);
        }
        self.t += h;
    }

    /// Integrates forward to `target` in equal sub-steps no longer than `h`.
    pub fn advance_to(&mut self, target: f64) {
        let span = target - self.t;
        if span <= 0.0 {
            return;
        }
        if self.adaptive {
            let beta = self.coupling();
            self.h = if beta > 0.0 { (0.02 / beta).min(0.05) } else { 0.05 };
        }
        let steps = (span / self.h).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for _ in 0..steps {
            self.rk4_step(h);
        }
        self.t = target;
    }
}
