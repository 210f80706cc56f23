use super::{householder_tridiagonalize, HermitianMatrix, Matrix, Spectrum, SymmetricMatrix, TridiagonalMatrix};
use crate::error::{Error, Result};

/// Full symmetric eigendecomposition: Householder reduction followed by
/// implicit-shift QL on the tridiagonal. Eigenvalues ascending, eigenvectors
/// as the columns of `vectors`.
pub fn symmetric_eigen(m: &SymmetricMatrix) -> Result<Spectrum> {
    let red = householder_tridiagonalize(m);
    tql(red.tridiagonal, Some(red.q))
}

/// Eigenvalues only, ascending.
pub fn symmetric_eigenvalues(m: &SymmetricMatrix) -> Result<Vec<f64>> {
    let red = householder_tridiagonalize(m);
    Ok(tql(red.tridiagonal, None)?.values)
}

/// Eigen-decomposition of a symmetric tridiagonal matrix.
pub fn tridiagonal_eigen(t: &TridiagonalMatrix, vectors: bool) -> Result<Spectrum> {
    let z = vectors.then(|| Matrix::identity(t.n()));
    tql(t.clone(), z)
}

/// Eigenvalues of a Hermitian matrix via its real symmetric embedding, in
/// which each eigenvalue appears twice.
pub fn hermitian_eigenvalues(h: &HermitianMatrix) -> Result<Vec<f64>> {
    let doubled = symmetric_eigenvalues(&h.real_embedding())?;
    Ok(doubled.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

fn tql(t: TridiagonalMatrix, mut z: Option<Matrix>) -> Result<Spectrum> {
    let n = t.n();
    let mut d = t.a;
    let mut e = t.b;
    e.push(0.0);
    let cap = 50 * n.max(1);
    let mut total = 0usize;

    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            total += 1;
            if total > cap {
                return Err(Error::NoConvergence {
                    what: "implicit QL",
                    iterations: total,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_mut() {
                    for k in 0..z.rows() {
                        let f = z[(k, i + 1)];
                        z[(k, i + 1)] = s * z[(k, i)] + c * f;
                        z[(k, i)] = c * z[(k, i)] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = z.map(|z| Matrix::from_fn(z.rows(), n, |r, c| z[(r, order[c])]));
    Ok(Spectrum { values, vectors })
}
