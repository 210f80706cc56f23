//! Benchmark inputs shared by the criterion targets.

use isoflow::ensembles::{sample_real, EnsembleKind, EnsembleSpec};
use isoflow::linalg::householder_tridiagonalize;
use isoflow::{SymmetricMatrix, TridiagonalMatrix};

pub fn goe(n: usize) -> SymmetricMatrix {
    let spec = EnsembleSpec::new(EnsembleKind::GOE, n, 7).expect("n > 0");
    sample_real(&spec, 0).expect("GOE draw")
}

pub fn goe_jacobi(n: usize) -> TridiagonalMatrix {
    householder_tridiagonalize(&goe(n)).tridiagonal
}
