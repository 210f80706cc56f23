//! Dense real kernels used throughout the crate.
//!
//! Everything here is self-contained on purpose: the eigensolver is the
//! oracle that the isospectral flows are checked against, so it must not
//! share code paths with them.

pub(crate) mod charpoly;
mod eigen;
pub(crate) mod funcs;
mod householder;
mod qr;

use std::fmt::Write as _;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use charpoly::{charpoly_coefficients, charpoly_roots_small, poly_roots, RootSet};
pub use eigen::{hermitian_eigenvalues, symmetric_eigen, symmetric_eigenvalues, tridiagonal_eigen};
pub use funcs::{matrix_function, ScalarFn};
pub use householder::{householder_tridiagonalize, Tridiagonalization};
pub use qr::{qr_factorize, QrFactors};

/// Row-major dense real matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Matrix::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `selfᵀ · other` without materialising the transpose.
    pub fn tr_matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "tr_matmul shape mismatch");
        let mut out = Matrix::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let a_row = self.row(k);
            let b_row = other.row(k);
            for (i, &a) in a_row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Submatrix of rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        Matrix::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    /// `(self + selfᵀ)/2`, bitwise symmetric.
    pub fn symmetric_part(&self) -> SymmetricMatrix {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self[(i, i)];
            for j in 0..i {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymmetricMatrix(m)
    }

    /// `‖QᵀQ − I‖_F`.
    pub fn orthogonality_defect(&self) -> f64 {
        self.tr_matmul(self).sub(&Matrix::identity(self.cols)).frobenius_norm()
    }

    /// CSV with a leading `n` line followed by one comma-separated row per line.
    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n", self.rows);
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| format_f64(*v)).collect();
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Matrix> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Shape("empty matrix CSV".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::Shape(format!("bad header `{header}`")))?;
        let rows = lines
            .map(|l| {
                l.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Shape(format!("bad entry `{t}`")))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if rows.len() != n {
            return Err(Error::Shape(format!("header says {n} rows, found {}", rows.len())));
        }
        Matrix::from_rows(&rows)
    }
}

/// Fixed 17-significant-digit formatting used by every CSV writer.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Real symmetric matrix. Symmetry is exact: `m[i][j]` and `m[j][i]` are the
/// same bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Matrix", into = "Matrix")]
pub struct SymmetricMatrix(Matrix);

impl SymmetricMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape(format!("{}x{} is not square", m.rows, m.cols)));
        }
        for i in 0..m.rows {
            for j in 0..i {
                if m[(i, j)].to_bits() != m[(j, i)].to_bits() {
                    return Err(Error::Shape(format!("entry ({i},{j}) differs from ({j},{i})")));
                }
            }
        }
        Ok(SymmetricMatrix(m))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        SymmetricMatrix::new(Matrix::from_rows(rows)?)
    }

    pub fn from_diag(d: &[f64]) -> Self {
        SymmetricMatrix(Matrix::from_diag(d))
    }

    pub fn identity(n: usize) -> Self {
        SymmetricMatrix(Matrix::identity(n))
    }

    /// Builds from the lower triangle produced by `f(i, j)` with `i >= j`.
    pub fn from_lower_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymmetricMatrix(m)
    }

    pub fn n(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// `Qᵀ · self · Q`, symmetrized.
    pub fn congruence(&self, q: &Matrix) -> SymmetricMatrix {
        q.tr_matmul(&self.0.matmul(q)).symmetric_part()
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| i == j || self.0[(i, j)] == 0.0))
    }

    pub fn is_tridiagonal(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| i.abs_diff(j) <= 1 || self.0[(i, j)] == 0.0))
    }

    pub fn shift(&self, c: f64) -> SymmetricMatrix {
        let mut m = self.0.clone();
        for i in 0..m.rows {
            m[(i, i)] += c;
        }
        SymmetricMatrix(m)
    }
}

impl std::ops::Deref for SymmetricMatrix {
    type Target = Matrix;
    fn deref(&self) -> &Matrix {
        &self.0
    }
}

impl TryFrom<Matrix> for SymmetricMatrix {
    type Error = Error;
    fn try_from(m: Matrix) -> Result<Self> {
        SymmetricMatrix::new(m)
    }
}

impl From<SymmetricMatrix> for Matrix {
    fn from(s: SymmetricMatrix) -> Matrix {
        s.0
    }
}

/// Symmetric tridiagonal (Jacobi) matrix: diagonal `a`, off-diagonal `b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalMatrix {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || b.len() + 1 != a.len() {
            return Err(Error::Shape(format!(
                "diagonal length {} needs off-diagonal length {}, got {}",
                a.len(),
                a.len().saturating_sub(1),
                b.len()
            )));
        }
        Ok(TridiagonalMatrix { a, b })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn to_dense(&self) -> SymmetricMatrix {
        let n = self.n();
        let mut m = Matrix::zeros(n, n);
        for (i, &v) in self.a.iter().enumerate() {
            m[(i, i)] = v;
        }
        for (i, &v) in self.b.iter().enumerate() {
            m[(i, i + 1)] = v;
            m[(i + 1, i)] = v;
        }
        SymmetricMatrix(m)
    }

    /// Reads the three central bands of a dense symmetric matrix.
    pub fn from_dense(m: &SymmetricMatrix) -> Self {
        let n = m.n();
        TridiagonalMatrix {
            a: (0..n).map(|i| m[(i, i)]).collect(),
            b: (0..n.saturating_sub(1)).map(|i| m[(i, i + 1)]).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        let d: f64 = self.a.iter().map(|x| x * x).sum();
        let o: f64 = self.b.iter().map(|x| x * x).sum();
        (d + 2.0 * o).sqrt()
    }

    /// Flips signs of off-diagonals to make them non-negative. This is an
    /// orthogonal similarity by a diagonal ±1 matrix, so the spectrum is kept.
    pub fn with_nonnegative_offdiag(mut self) -> Self {
        for b in &mut self.b {
            *b = b.abs();
        }
        self
    }
}

/// Complex Hermitian matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Builds from the lower triangle; the diagonal's imaginary part is dropped.
    pub fn from_lower_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                if i == j {
                    data[i * n + i] = Complex64::new(v.re, 0.0);
                } else {
                    data[i * n + j] = v;
                    data[j * n + i] = v.conj();
                }
            }
        }
        HermitianMatrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// Real symmetric `2n × 2n` embedding `[[Re, −Im], [Im, Re]]`; every
    /// eigenvalue of `self` appears twice in it.
    pub fn real_embedding(&self) -> SymmetricMatrix {
        let n = self.n;
        SymmetricMatrix::from_lower_fn(2 * n, |i, j| {
            let (bi, ii) = (i / n, i % n);
            let (bj, jj) = (j / n, j % n);
            let z = self.get(ii, jj);
            match (bi, bj) {
                (0, 0) | (1, 1) => z.re,
                (1, 0) => z.im,
                _ => -z.im,
            }
        })
    }
}

/// Sorted eigenvalues, optionally with orthonormal eigenvectors as columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Option<Matrix>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("empty spectrum")
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    /// `λ_N − λ_{N−1}`; zero for a 1×1 matrix.
    pub fn top_gap(&self) -> f64 {
        let n = self.values.len();
        if n < 2 {
            0.0
        } else {
            self.values[n - 1] - self.values[n - 2]
        }
    }
}

/// Largest absolute difference between two sorted spectra of equal length.
pub fn spectrum_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Hausdorff distance between two finite point sets on the line.
pub fn hausdorff_distance(a: &[f64], b: &[f64]) -> f64 {
    let one_way = |p: &[f64], q: &[f64]| {
        p.iter()
            .map(|x| q.iter().fold(f64::INFINITY, |m, y| m.min((x - y).abs())))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}
