use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const EIGENVALUE_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;

/// Hermitian, positive-semidefinite, unit-trace operator on a labeled
/// tensor-product space. `dims` lists the subsystem dimensions in the order
/// used by the Kronecker products that built the matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity, the spectrum and the trace before accepting.
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        linalg::ensure_square(&matrix)?;
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || total != matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: total,
            });
        }
        let herm = linalg::hermiticity_residual(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual: herm });
        }
        let tr = linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min_eig = linalg::eigvalsh(&matrix)[0];
        if min_eig < -EIGENVALUE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { matrix, dims })
    }

    /// Single-factor state.
    pub fn single(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows();
        Self::new(matrix, vec![n])
    }

    /// Skips the spectral check; for states produced by unitary conjugation
    /// or partial traces of already validated states.
    pub(crate) fn from_trusted(matrix: CMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.nrows());
        let matrix = (&matrix + matrix.adjoint()).scale(0.5);
        Self { matrix, dims }
    }

    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            populations.len(),
            populations.iter().map(|&p| linalg::cr(p)),
        ));
        Self::single(m)
    }

    /// Pure state |ψ⟩⟨ψ|; the vector is normalized here.
    pub fn pure(amplitudes: &[Complex64], dims: Vec<usize>) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v = v.unscale(norm);
        Self::new(&v * v.adjoint(), dims)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// ⟨A⟩ = Tr(A ρ)
    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        linalg::trace_product(op, &self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.matrix)
    }

    /// ρ_A ⊗ ρ_B with the factor lists concatenated.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix::from_trusted(linalg::kron(&self.matrix, &other.matrix), dims)
    }

    /// U ρ U†. `u` must be unitary within 1e-10.
    pub fn conjugate(&self, u: &CMatrix) -> Result<DensityMatrix> {
        if u.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.nrows(),
            });
        }
        linalg::ensure_unitary(u, 1e-10)?;
        Ok(self.conjugate_unchecked(u))
    }

    pub(crate) fn conjugate_unchecked(&self, u: &CMatrix) -> DensityMatrix {
        DensityMatrix::from_trusted(u * &self.matrix * u.adjoint(), self.dims.clone())
    }

    /// Reduced state on the factors listed in `keep` (in ascending order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }
}

/// Traces out every factor not listed in `keep`. `keep` must be a nonempty
/// proper subset of the factor indices.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let dims = rho.dims();
    let n = dims.len();
    if n < 2 {
        return Err(Error::InvalidParameter("partial trace needs at least two factors".into()));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&k| k >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    if keep.is_empty() || keep.len() == n {
        return Err(Error::InvalidParameter(
            "keep must be a nonempty proper subset of the factors".into(),
        ));
    }
    let traced: Vec<usize> = (0..n).filter(|k| !keep.contains(k)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    // Row-major strides of the full index.
    let mut strides = vec![1usize; n];
    for k in (0..n - 1).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let offset = |kept_idx: usize, traced_idx: usize| -> usize {
        let mut full = 0;
        let mut rem = kept_idx;
        for (pos, &k) in keep.iter().enumerate().rev() {
            full += (rem % kept_dims[pos]) * strides[k];
            rem /= kept_dims[pos];
        }
        let mut rem = traced_idx;
        for (pos, &k) in traced.iter().enumerate().rev() {
            full += (rem % traced_dims[pos]) * strides[k];
            rem /= traced_dims[pos];
        }
        full
    };

    let m = rho.matrix();
    let mut out = CMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..dt {
                acc += m[(offset(i, t), offset(j, t))];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix::from_trusted(out, kept_dims))
}
