use serde::{Deserialize, Serialize};

use super::{symmetric_eigen, Matrix, SymmetricMatrix};
use crate::error::{Error, Result};

/// Scalar function applied to a symmetric matrix through its spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarFn {
    Identity,
    Log,
    Exp,
    /// Piecewise-linear interpolation through `(x, y)` knots sorted by `x`.
    Tabulated(Vec<(f64, f64)>),
}

impl ScalarFn {
    pub fn apply(&self, x: f64) -> Result<f64> {
        match self {
            ScalarFn::Identity => Ok(x),
            ScalarFn::Exp => Ok(x.exp()),
            ScalarFn::Log => {
                if x > 0.0 {
                    Ok(x.ln())
                } else {
                    Err(Error::Domain(format!("log of non-positive eigenvalue {x:e}")))
                }
            }
            ScalarFn::Tabulated(knots) => {
                let (first, last) = match (knots.first(), knots.last()) {
                    (Some(f), Some(l)) if knots.len() >= 2 => (f, l),
                    _ => return Err(Error::Domain("tabulated function needs two knots".into())),
                };
                if x < first.0 || x > last.0 {
                    return Err(Error::Domain(format!(
                        "eigenvalue {x:e} outside table [{}, {}]",
                        first.0, last.0
                    )));
                }
                let i = knots.partition_point(|k| k.0 <= x).clamp(1, knots.len() - 1);
                let (x0, y0) = knots[i - 1];
                let (x1, y1) = knots[i];
                Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
            }
        }
    }
}

/// `g(M) = V·diag(g(λᵢ))·Vᵀ`, symmetrized after reconstruction.
pub fn matrix_function(m: &SymmetricMatrix, g: &ScalarFn) -> Result<SymmetricMatrix> {
    let spec = symmetric_eigen(m)?;
    let gv = spec.values.iter().map(|&l| g.apply(l)).collect::<Result<Vec<f64>>>()?;
    let v = spec.vectors.expect("vectors requested");
    Ok(spectral_synthesis(&v, &gv))
}

/// `V·diag(d)·Vᵀ`.
pub(crate) fn spectral_synthesis(v: &Matrix, d: &[f64]) -> SymmetricMatrix {
    let n = v.rows();
    let scaled = Matrix::from_fn(n, d.len(), |i, k| v[(i, k)] * d[k]);
    scaled.matmul(&v.transpose()).symmetric_part()
}
