use super::{Matrix, SymmetricMatrix, TridiagonalMatrix};

/// Result of an orthogonal reduction `QᵀMQ = T`.
#[derive(Clone, Debug)]
pub struct Tridiagonalization {
    pub tridiagonal: TridiagonalMatrix,
    pub q: Matrix,
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
///
/// Columns whose entries below the subdiagonal are already zero are skipped,
/// so a tridiagonal input comes back bit-for-bit unchanged with `Q = I`.
pub fn householder_tridiagonalize(m: &SymmetricMatrix) -> Tridiagonalization {
    let n = m.n();
    let mut a = m.as_matrix().clone();
    let mut q = Matrix::identity(n);

    for k in 0..n.saturating_sub(2) {
        let tail: f64 = ((k + 2)..n).map(|i| a[(i, k)] * a[(i, k)]).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let alpha = -x0.signum() * (x0 * x0 + tail).sqrt();
        let alpha = if x0 == 0.0 { -(tail.sqrt()) } else { alpha };

        // v = x − αe₁ over rows k+1..n
        let len = n - k - 1;
        let mut v = vec![0.0; len];
        v[0] = x0 - alpha;
        for i in 1..len {
            v[i] = a[(k + 1 + i, k)];
        }
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        let beta = 2.0 / vtv;

        // Symmetric rank-2 update on the trailing block: A ← HAH.
        let off = k + 1;
        let mut p = vec![0.0; len];
        for i in 0..len {
            let mut s = 0.0;
            for j in 0..len {
                s += a[(off + i, off + j)] * v[j];
            }
            p[i] = beta * s;
        }
        let ptv: f64 = p.iter().zip(&v).map(|(x, y)| x * y).sum();
        let c = 0.5 * beta * ptv;
        let w: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - c * vi).collect();
        for i in 0..len {
            for j in 0..=i {
                let val = a[(off + i, off + j)] - v[i] * w[j] - w[i] * v[j];
                a[(off + i, off + j)] = val;
                a[(off + j, off + i)] = val;
            }
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha;
        for i in (k + 2)..n {
            a[(i, k)] = 0.0;
            a[(k, i)] = 0.0;
        }

        // Q ← QH
        for r in 0..n {
            let s: f64 = (0..len).map(|i| q[(r, off + i)] * v[i]).sum();
            let s = beta * s;
            for i in 0..len {
                q[(r, off + i)] -= s * v[i];
            }
        }
    }

    let tridiagonal = TridiagonalMatrix {
        a: (0..n).map(|i| a[(i, i)]).collect(),
        b: (0..n.saturating_sub(1)).map(|i| a[(i + 1, i)]).collect(),
    };
    Tridiagonalization { tridiagonal, q }
}
