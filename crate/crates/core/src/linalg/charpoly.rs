use num_complex::Complex64;

use super::Matrix;
use crate::error::{Error, Result};

/// Roots of a polynomial, sorted by real part then imaginary part.
pub type RootSet = Vec<Complex64>;

/// Coefficients (constant term first) of `det(M − z·I)` by Faddeev–LeVerrier.
pub fn charpoly_coefficients(m: &Matrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Shape("characteristic polynomial needs a square matrix".into()));
    }
    let n = m.rows();
    // det(zI − M) = zⁿ + c_{n−1} z^{n−1} + … + c₀
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut mk = Matrix::zeros(n, n);
    for k in 1..=n {
        // M_k = M·M_{k−1} + c_{n−k+1} I
        let mut next = m.matmul(&mk);
        for i in 0..n {
            next[(i, i)] += c[n - k + 1];
        }
        mk = next;
        c[n - k] = -m.matmul(&mk).trace() / k as f64;
    }
    if n % 2 == 1 {
        for x in &mut c {
            *x = -*x;
        }
    }
    Ok(c)
}

/// Roots of `det(M − z)` for `n ≤ 4`: closed form up to degree two,
/// Aberth–Ehrlich iteration with Newton polishing above.
pub fn charpoly_roots_small(m: &Matrix) -> Result<RootSet> {
    if m.rows() > 4 {
        return Err(Error::UnsupportedSize { n: m.rows(), max: 4 });
    }
    poly_roots(&charpoly_coefficients(m)?)
}

/// All complex roots of the real polynomial `Σ coeffs[k]·z^k`.
///
/// Trailing coefficients below `1e-13` of the largest are treated as zero;
/// an identically-zero polynomial is [`Error::Degenerate`].
pub fn poly_roots(coeffs: &[f64]) -> Result<RootSet> {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return Err(Error::Degenerate("polynomial is identically zero".into()));
    }
    let mut deg = coeffs.len() - 1;
    while coeffs[deg].abs() <= 1e-13 * scale {
        deg -= 1;
    }
    let p: Vec<f64> = coeffs[..=deg].iter().map(|c| c / coeffs[deg]).collect();
    let mut roots = match deg {
        0 => Vec::new(),
        1 => vec![Complex64::new(-p[0], 0.0)],
        2 => quadratic(p[0], p[1]),
        _ => aberth(&p),
    };
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Roots of `z² + bz + c`.
fn quadratic(c: f64, b: f64) -> Vec<Complex64> {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        // avoid cancellation: q = −(b + sign(b)√disc)/2, roots q and c/q
        let q = -0.5 * (b + if b >= 0.0 { s } else { -s });
        if q == 0.0 {
            return vec![Complex64::new(0.0, 0.0); 2];
        }
        vec![Complex64::new(q, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let im = 0.5 * (-disc).sqrt();
        vec![Complex64::new(-0.5 * b, -im), Complex64::new(-0.5 * b, im)]
    }
}

fn horner(p: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut val = Complex64::new(0.0, 0.0);
    let mut der = Complex64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        der = der * z + val;
        val = val * z + c;
    }
    (val, der)
}

fn aberth(monic: &[f64]) -> Vec<Complex64> {
    let deg = monic.len() - 1;
    // Cauchy bound on root moduli
    let radius = 1.0 + monic[..deg].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            Complex64::from_polar(
                0.5 * radius,
                2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64,
            )
        })
        .collect();
    for _ in 0..500 {
        let mut biggest = 0.0f64;
        for k in 0..deg {
            let (val, der) = horner(monic, z[k]);
            if val.norm() == 0.0 {
                continue;
            }
            let ratio = val / der;
            let repulsion: Complex64 = (0..deg).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                biggest = biggest.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if biggest < 1e-16 {
            break;
        }
    }
    for r in &mut z {
        for _ in 0..3 {
            let (val, der) = horner(monic, *r);
            if der.norm() == 0.0 {
                break;
            }
            let step = val / der;
            if step.is_finite() {
                *r -= step;
            }
        }
    }
    z
}

/// Coefficients of `det(A + z·B)` for square `A`, `B` of equal size, computed
/// exactly in `z` by Laplace expansion over column subsets.
pub(crate) fn pencil_determinant(a: &Matrix, b: &Matrix) -> Vec<f64> {
    let n = a.rows();
    assert!(n <= 20, "pencil_determinant is exponential in n");
    let full = 1usize << n;
    let mut dp: Vec<Option<Vec<f64>>> = vec![None; full];
    dp[0] = Some(vec![1.0]);
    for mask in 0..full {
        let Some(poly) = dp[mask].take() else { continue };
        let row = mask.count_ones() as usize;
        if row == n {
            dp[mask] = Some(poly);
            continue;
        }
        for col in 0..n {
            if mask & (1 << col) != 0 {
                continue;
            }
            let (a0, b0) = (a[(row, col)], b[(row, col)]);
            if a0 == 0.0 && b0 == 0.0 {
                continue;
            }
            let inversions = (mask >> (col + 1)).count_ones();
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            let mut term = vec![0.0; poly.len() + 1];
            for (k, &c) in poly.iter().enumerate() {
                term[k] += sign * a0 * c;
                term[k + 1] += sign * b0 * c;
            }
            let slot = dp[mask | (1 << col)].get_or_insert_with(Vec::new);
            if slot.len() < term.len() {
                slot.resize(term.len(), 0.0);
            }
            for (s, t) in slot.iter_mut().zip(&term) {
                *s += t;
            }
        }
    }
    let mut out = dp[full - 1].take().unwrap_or_default();
    out.resize(n + 1, 0.0);
    out
}
