//! Adaptive Gauss–Kronrod (7/15) integration of complex integrands and
//! Gauss–Legendre rules for fixed composite quadrature.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss weights for the odd-indexed Kronrod nodes (the 7-point rule).
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    /// Sum over panels of |K15 − G7|.
    pub error: f64,
    pub panels: usize,
}

fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx)? + f(c + dx)?;
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    Ok((kron * h, ((kron - gauss) * h).norm()))
}

/// Globally adaptive integration over [a, b]. The range is first split into
/// `initial_panels` equal pieces; afterwards the panel with the largest error
/// is bisected until the summed error is at most `tol`.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64, max_panels: usize, initial_panels: usize) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if a == b {
        return Ok(QuadratureResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            panels: 0,
        });
    }
    let n0 = initial_panels.clamp(1, max_panels.max(1));
    // (lo, hi, value, error)
    let mut panels: Vec<(f64, f64, Complex64, f64)> = Vec::with_capacity(n0 * 2);
    let width = (b - a) / n0 as f64;
    for i in 0..n0 {
        let lo = a + width * i as f64;
        let hi = if i + 1 == n0 { b } else { lo + width };
        let (v, e) = gk15(&f, lo, hi)?;
        panels.push((lo, hi, v, e));
    }
    loop {
        let total_err: f64 = panels.iter().map(|p| p.3).sum();
        if total_err <= tol {
            let value = panels.iter().map(|p| p.2).sum();
            return Ok(QuadratureResult {
                value,
                error: total_err,
                panels: panels.len(),
            });
        }
        if panels.len() >= max_panels {
            return Err(Error::QuadratureNonConvergence {
                error: total_err,
                tol,
                subdivisions: panels.len(),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            return Err(Error::QuadratureNonConvergence {
                error: total_err,
                tol,
                subdivisions: panels.len() + 1,
            });
        }
        let (v1, e1) = gk15(&f, lo, mid)?;
        let (v2, e2) = gk15(&f, mid, hi)?;
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
}

/// n-point Gauss–Legendre nodes and weights on [−1, 1] from the eigen-
/// decomposition of the Jacobi matrix.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let off = kf / (4.0 * kf * kf - 1.0).sqrt();
        jacobi[(k, k - 1)] = off;
        jacobi[(k - 1, k)] = off;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| (eig.eigenvalues[j], 2.0 * eig.eigenvectors[(0, j)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Enforce the rule's mirror symmetry.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (pairs[j].0 - pairs[i].0);
        let w = 0.5 * (pairs[i].1 + pairs[j].1);
        pairs[i] = (-x, w);
        pairs[j] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    pairs.into_iter().unzip()
}

/// Nodes and weights of a composite Gauss–Legendre rule with `panels`
/// equal panels of `order` points on [a, b].
pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let c = a + h * (p as f64 + 0.5);
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(c + 0.5 * h * xi);
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // ∫ x^14 = 2/15
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn legendre_three_point_nodes() {
        let (x, w) = gauss_legendre(3);
        assert!((x[2] - (0.6f64).sqrt()).abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn oscillatory_exponential() {
        let k = 37.0;
        let res = integrate(|t| Ok(Complex64::from_polar(1.0, k * t)), 0.0, 3.0, 1e-12, 2000, 1).unwrap();
        let exact = (Complex64::from_polar(1.0, 3.0 * k) - 1.0) / Complex64::new(0.0, k);
        assert!((res.value - exact).norm() < 1e-12);
        assert!(res.error <= 1e-12);
    }

    #[test]
    fn error_estimate_bounds_true_error() {
        let res = integrate(|t| Ok(Complex64::new((t * t).sin(), t.cos())), 0.0, 2.0 * PI, 1e-9, 1000, 1).unwrap();
        let tight = integrate(|t| Ok(Complex64::new((t * t).sin(), t.cos())), 0.0, 2.0 * PI, 1e-14, 4000, 1).unwrap();
        assert!((res.value - tight.value).norm() <= res.error.max(1e-14));
    }

    #[test]
    fn reports_nonconvergence() {
        let err = integrate(|t| Ok(Complex64::from_polar(1.0, 1e4 * t * t)), 0.0, 10.0, 1e-12, 8, 1).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn composite_rule_on_interval() {
        let (x, w) = composite_gauss_legendre(1.0, 3.0, 4, 5);
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.exp()).sum();
        assert!((v - (3f64.exp() - 1f64.exp())).abs() < 1e-12);
    }
}
