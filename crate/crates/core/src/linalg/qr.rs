use super::Matrix;
use crate::error::{Error, Result};

/// `M = QR` with `Q` orthogonal and `R` upper triangular, `R_ii > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct QrFactors {
    pub q: Matrix,
    pub r: Matrix,
}

/// Householder QR of a square matrix, normalised so that `R` has a positive
/// diagonal. That normalisation makes the factorization unique for invertible
/// input.
///
/// A pivot with `|R_ii| < 1e-14·‖M‖_F` is reported as [`Error::Singular`].
pub fn qr_factorize(m: &Matrix) -> Result<QrFactors> {
    if !m.is_square() {
        return Err(Error::Shape(format!("{}x{} is not square", m.rows(), m.cols())));
    }
    let n = m.rows();
    let norm = m.frobenius_norm();
    let mut r = m.clone();
    let mut q = Matrix::identity(n);

    for k in 0..n.saturating_sub(1) {
        let tail: f64 = ((k + 1)..n).map(|i| r[(i, k)] * r[(i, k)]).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = r[(k, k)];
        let xnorm = (x0 * x0 + tail).sqrt();
        let alpha = if x0 >= 0.0 { -xnorm } else { xnorm };
        let len = n - k;
        let mut v = vec![0.0; len];
        v[0] = x0 - alpha;
        for i in 1..len {
            v[i] = r[(k + i, k)];
        }
        let beta = 2.0 / v.iter().map(|x| x * x).sum::<f64>();

        // R ← HR on rows k..n
        for j in k..n {
            let s: f64 = (0..len).map(|i| v[i] * r[(k + i, j)]).sum::<f64>() * beta;
            for i in 0..len {
                r[(k + i, j)] -= s * v[i];
            }
        }
        r[(k, k)] = alpha;
        for i in (k + 1)..n {
            r[(i, k)] = 0.0;
        }
        // Q ← QH
        for row in 0..n {
            let s: f64 = (0..len).map(|i| q[(row, k + i)] * v[i]).sum::<f64>() * beta;
            for i in 0..len {
                q[(row, k + i)] -= s * v[i];
            }
        }
    }

    for i in 0..n {
        let d = r[(i, i)];
        if !(d.abs() >= 1e-14 * norm) || d == 0.0 {
            return Err(Error::Singular {
                index: i,
                value: d.abs(),
            });
        }
        if d < 0.0 {
            for j in i..n {
                r[(i, j)] = -r[(i, j)];
            }
            for row in 0..n {
                q[(row, i)] = -q[(row, i)];
            }
        }
    }
    Ok(QrFactors { q, r })
}
