//! Dense complex linear algebra shared by every module.
//!
//! Everything here works on [`CMatrix`], a heap-allocated square complex
//! matrix. Functions of Hermitian matrices (exponentials, Gibbs operators,
//! logarithms inside entropies) all go through [`eigh`], so unitarity and
//! Hermiticity are preserved to machine precision rather than to the accuracy
//! of a series truncation.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// ‖M†M − 1‖_max
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_abs(&(m.adjoint() * m - identity(n)))
}

pub fn ensure_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    if !is_finite(m) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    Ok(())
}

pub fn ensure_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    ensure_square(m)?;
    let residual = hermiticity_residual(m);
    if residual > tol {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

pub fn ensure_unitary(m: &CMatrix, tol: f64) -> Result<()> {
    ensure_square(m)?;
    let residual = unitarity_residual(m);
    if residual > tol {
        return Err(Error::NotUnitary { residual, tol });
    }
    Ok(())
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Tr(A B) without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Eigen-decomposition of a Hermitian matrix: ascending real eigenvalues and
/// the unitary whose columns are the matching eigenvectors.
pub struct Eigh {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

impl Eigh {
    /// Reassemble V f(Λ) V† for a real-valued spectral function.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let fj = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Hermitian eigen-decomposition. The input is symmetrized first so that
/// round-off asymmetry never leaks into the spectrum.
pub fn eigh(m: &CMatrix) -> Eigh {
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Eigh { values, vectors }
}

pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    eigh(m).values.iter().copied().collect()
}

/// exp(−i t H) for Hermitian H.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    eigh(h).map(|lam| Complex64::from_polar(1.0, -lam * t))
}

/// exp(−β H) for Hermitian H (unnormalized Gibbs operator).
pub fn gibbs_operator(h: &CMatrix, beta: f64) -> CMatrix {
    eigh(h).map(|lam| cr((-beta * lam).exp()))
}

/// exp(G) for anti-Hermitian G, computed through the Hermitian matrix iG.
pub fn expm_antihermitian(g: &CMatrix) -> CMatrix {
    let h = g.map(|z| I * z);
    expm_hermitian(&h, 1.0)
}

/// Haar-random unitary via QR of a complex Ginibre matrix with the phases of
/// R's diagonal folded back into Q.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| c(standard_normal(rng), standard_normal(rng)));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { cr(1.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| c(standard_normal(rng), standard_normal(rng)));
    (&g + g.adjoint()).scale(0.5 * scale)
}

/// Random full-rank density matrix G G† / Tr(G G†).
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| c(standard_normal(rng), standard_normal(rng)));
    let m = &g * g.adjoint();
    let tr = trace(&m).re;
    let mut m = m.unscale(tr);
    // Exact Hermiticity.
    m = (&m + m.adjoint()).scale(0.5);
    m
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}
