//! Single bosonic mode on a truncated Fock space.
//!
//! A cutoff of `n_max` keeps the number states |0⟩ … |n_max − 1⟩, so every
//! operator here is an `n_max × n_max` matrix.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, cr, CMatrix};
use crate::quantum::state::DensityMatrix;

pub const DEFAULT_TRACE_DEFICIT_TOL: f64 = 1e-8;
pub const SQUEEZE_UNITARITY_TOL: f64 = 1e-10;

/// Fraction (1/EDGE_FRACTION) of the Fock levels at the top of the space whose
/// population counts as truncation leakage of a squeezed state.
const EDGE_FRACTION: usize = 8;

/// Growth factor and ceiling for automatic cutoff selection.
const AUTO_GROWTH: f64 = 1.25;
const AUTO_MAX_LEVELS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockCutoff {
    n_max: usize,
    trace_deficit_tol: f64,
}

impl FockCutoff {
    pub fn new(n_max: usize) -> Result<Self> {
        Self::with_tol(n_max, DEFAULT_TRACE_DEFICIT_TOL)
    }

    pub fn with_tol(n_max: usize, trace_deficit_tol: f64) -> Result<Self> {
        if n_max < 2 {
            return Err(invalid(format!("Fock cutoff must be at least 2, got {n_max}")));
        }
        if !(trace_deficit_tol > 0.0) {
            return Err(invalid("trace deficit tolerance must be positive"));
        }
        Ok(Self {
            n_max,
            trace_deficit_tol,
        })
    }

    /// n_max = ⌈m + 10√(m(m+1)) + 20⌉ with m = n̄ cosh 2r + sinh² r, the mean
    /// occupation of the squeezed thermal state.
    pub fn auto(nbar: f64, r: f64) -> Result<Self> {
        if !(nbar >= 0.0) || !(r >= 0.0) {
            return Err(invalid("auto cutoff needs n̄ ≥ 0 and r ≥ 0"));
        }
        let m = nbar * (2.0 * r).cosh() + r.sinh().powi(2);
        let n = (m + 10.0 * (m * (m + 1.0)).sqrt() + 20.0).ceil() as usize;
        Self::new(n)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.n_max
    }

    pub fn trace_deficit_tol(&self) -> f64 {
        self.trace_deficit_tol
    }

    pub fn grown(&self, extra: usize) -> Self {
        Self {
            n_max: self.n_max + extra,
            ..*self
        }
    }
}

/// Annihilation and creation operators: a|n⟩ = √n |n−1⟩, a† = (a)†.
pub fn ladder_operators(cutoff: FockCutoff) -> (CMatrix, CMatrix) {
    let n = cutoff.dim();
    let mut a = CMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = cr((k as f64).sqrt());
    }
    let ad = a.adjoint();
    (a, ad)
}

pub fn number_operator(cutoff: FockCutoff) -> CMatrix {
    let n = cutoff.dim();
    CMatrix::from_fn(n, n, |i, j| if i == j { cr(i as f64) } else { cr(0.0) })
}

/// S(ξ) = exp(½ξ* a² − ½ξ (a†)²), ξ = r e^{iθ}, exponentiated on the
/// truncated space so that the result is exactly unitary there.
pub fn squeeze_operator(cutoff: FockCutoff, r: f64, theta: f64) -> Result<CMatrix> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(invalid(format!("squeezing strength must be ≥ 0, got {r}")));
    }
    if !theta.is_finite() {
        return Err(invalid("squeezing phase must be finite"));
    }
    let n = cutoff.dim();
    if r == 0.0 {
        return Ok(linalg::identity(n));
    }
    let (a, ad) = ladder_operators(cutoff);
    let xi = Complex64::from_polar(r, theta);
    let a2 = &a * &a;
    let ad2 = &ad * &ad;
    let generator = a2 * (0.5 * xi.conj()) - ad2 * (0.5 * xi);
    let s = linalg::expm_antihermitian(&generator);
    let residual = linalg::unitarity_residual(&s);
    if residual > SQUEEZE_UNITARITY_TOL {
        return Err(Error::NotUnitary {
            residual,
            tol: SQUEEZE_UNITARITY_TOL,
        });
    }
    Ok(s)
}

/// Gibbs state of ω a†a on the truncated space, renormalized. The realized
/// deficit is the infinite-space population above the cutoff, e^{−βω n_max}.
pub fn thermal_state(cutoff: FockCutoff, beta: f64, omega: f64) -> Result<DensityMatrix> {
    let (rho, deficit) = thermal_populations(cutoff, beta, omega)?;
    if deficit > cutoff.trace_deficit_tol() {
        return Err(Error::CutoffTooSmall {
            n_max: cutoff.n_max(),
            deficit,
            tol: cutoff.trace_deficit_tol(),
        });
    }
    Ok(rho)
}

fn thermal_populations(cutoff: FockCutoff, beta: f64, omega: f64) -> Result<(DensityMatrix, f64)> {
    if !(beta > 0.0) || !(omega > 0.0) || !(beta * omega).is_finite() {
        return Err(invalid(format!("thermal state needs βω > 0, got β = {beta}, ω = {omega}")));
    }
    let x = beta * omega;
    let n = cutoff.dim();
    let weights: Vec<f64> = (0..n).map(|k| (-x * k as f64).exp()).collect();
    let z: f64 = weights.iter().sum();
    let deficit = (-x * n as f64).exp();
    let diag = nalgebra::DVector::from_iterator(n, weights.iter().map(|&w| cr(w / z)));
    let rho = DensityMatrix::from_trusted(CMatrix::from_diagonal(&diag), vec![n]);
    Ok((rho, deficit))
}

/// Squeezed thermal state S ρ_th S† at the given cutoff.
pub fn squeezed_thermal_state(cutoff: FockCutoff, beta: f64, omega: f64, r: f64, theta: f64) -> Result<DensityMatrix> {
    squeezed_thermal_state_with_deficit(cutoff, beta, omega, r, theta).map(|(rho, _)| rho)
}

/// As [`squeezed_thermal_state`], also returning the realized truncation
/// deficit: the thermal tail above the cutoff plus the population that the
/// squeeze pushed onto the top Fock levels.
pub fn squeezed_thermal_state_with_deficit(
    cutoff: FockCutoff,
    beta: f64,
    omega: f64,
    r: f64,
    theta: f64,
) -> Result<(DensityMatrix, f64)> {
    let (thermal, tail) = thermal_populations(cutoff, beta, omega)?;
    let s = squeeze_operator(cutoff, r, theta)?;
    let rho = thermal.conjugate_unchecked(&s);
    let deficit = if r == 0.0 { tail } else { tail + edge_leakage(&rho) };
    if deficit > cutoff.trace_deficit_tol() {
        return Err(Error::CutoffTooSmall {
            n_max: cutoff.n_max(),
            deficit,
            tol: cutoff.trace_deficit_tol(),
        });
    }
    Ok((rho, deficit))
}

/// n_max times the population on the top ⌈n_max/8⌉ levels. Weighting by the
/// occupation makes this bound the error of the first and second moments,
/// which is what truncation actually spoils.
fn edge_leakage(rho: &DensityMatrix) -> f64 {
    let n = rho.dim();
    let width = n.div_ceil(EDGE_FRACTION).max(1);
    let mass: f64 = (n - width..n).map(|k| rho.matrix()[(k, k)].re.max(0.0)).sum();
    n as f64 * mass
}

/// Smallest cutoff, starting from [`FockCutoff::auto`] and growing
/// geometrically, at which the squeezed thermal state passes its deficit check.
pub fn auto_cutoff(beta: f64, omega: f64, r: f64, theta: f64, tol: f64) -> Result<FockCutoff> {
    if !(beta > 0.0) || !(omega > 0.0) {
        return Err(invalid("auto cutoff needs β > 0 and ω > 0"));
    }
    let nbar = crate::sts::bose_einstein(beta, omega)?;
    let mut cutoff = FockCutoff::with_tol(FockCutoff::auto(nbar, r)?.n_max(), tol)?;
    loop {
        match squeezed_thermal_state_with_deficit(cutoff, beta, omega, r, theta) {
            Ok(_) => return Ok(cutoff),
            Err(Error::CutoffTooSmall { deficit, .. }) => {
                let next = ((cutoff.n_max() as f64) * AUTO_GROWTH).ceil() as usize;
                if next > AUTO_MAX_LEVELS {
                    return Err(Error::CutoffTooSmall {
                        n_max: cutoff.n_max(),
                        deficit,
                        tol,
                    });
                }
                cutoff = FockCutoff::with_tol(next, tol)?;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Second moments ⟨a²⟩, ⟨a†a⟩, ⟨a a†⟩ of a single-mode state, by trace.
pub fn fock_moments(rho: &DensityMatrix) -> (Complex64, f64, f64) {
    let n = rho.dim();
    let cutoff = FockCutoff {
        n_max: n,
        trace_deficit_tol: DEFAULT_TRACE_DEFICIT_TOL,
    };
    let (a, ad) = ladder_operators(cutoff);
    let aa = rho.expectation(&(&a * &a));
    let ada = rho.expectation(&(&ad * &a)).re;
    let aad = rho.expectation(&(&a * &ad)).re;
    (aa, ada, aad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::quantum::entropy::von_neumann_entropy;
    use std::f64::consts::PI;

    #[test]
    fn cutoff_validation() {
        assert!(FockCutoff::new(1).is_err());
        assert!(FockCutoff::new(2).is_ok());
        assert!(FockCutoff::with_tol(4, 0.0).is_err());
    }

    #[test]
    fn auto_cutoff_formula() {
        // m = 1·cosh 1 + sinh² 0.5
        let m = 1f64.cosh() + 0.5f64.sinh().powi(2);
        let expected = (m + 10.0 * (m * (m + 1.0)).sqrt() + 20.0).ceil() as usize;
        assert_eq!(FockCutoff::auto(1.0, 0.5).unwrap().n_max(), expected);
        assert_eq!(FockCutoff::auto(0.0, 0.0).unwrap().n_max(), 20);
    }

    #[test]
    fn ladder_at_cutoff_two() {
        let (a, ad) = ladder_operators(FockCutoff::new(2).unwrap());
        let expected = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(0.0), cr(0.0)]);
        assert_eq!(a, expected);
        assert_eq!(ad, expected.adjoint());
    }

    #[test]
    fn vacuum_is_annihilated() {
        for n in [2, 5, 30] {
            let (a, ad) = ladder_operators(FockCutoff::new(n).unwrap());
            let num = &ad * &a;
            assert_eq!(num[(0, 0)], cr(0.0));
        }
    }

    #[test]
    fn truncated_commutator_defect_sits_in_corner() {
        let n = 16;
        let (a, ad) = ladder_operators(FockCutoff::new(n).unwrap());
        let comm = &a * &ad - &ad * &a;
        let mut expected = linalg::identity(n);
        expected[(n - 1, n - 1)] = cr(1.0 - n as f64);
        assert!(max_abs(&(comm - expected)) < 1e-13);
    }

    #[test]
    fn zero_squeeze_is_identity() {
        let cut = FockCutoff::new(10).unwrap();
        assert_eq!(squeeze_operator(cut, 0.0, 1.3).unwrap(), linalg::identity(10));
    }

    #[test]
    fn squeeze_rejects_negative_strength() {
        let cut = FockCutoff::new(10).unwrap();
        assert!(squeeze_operator(cut, -0.1, 0.0).is_err());
    }

    #[test]
    fn squeeze_is_unitary_and_phase_periodic() {
        let cut = FockCutoff::new(30).unwrap();
        let s1 = squeeze_operator(cut, 0.5, PI / 3.0).unwrap();
        let s2 = squeeze_operator(cut, 0.5, PI / 3.0 + 2.0 * PI).unwrap();
        assert!(linalg::unitarity_residual(&s1) < 1e-10);
        assert!(max_abs(&(s1 - s2)) < 1e-12);
    }

    #[test]
    fn squeeze_reproduces_bogoliubov_relation_on_low_levels() {
        // Exponentiating the truncated generator needs ~80 levels before the
        // lowest ten are accurate to 1e-8 at r = 0.5.
        let cut = FockCutoff::new(80).unwrap();
        let (r, theta) = (0.5_f64, 0.0_f64);
        let s = squeeze_operator(cut, r, theta).unwrap();
        let (a, ad) = ladder_operators(cut);
        let lhs = s.adjoint() * &a * &s;
        let rhs = &a * cr(r.cosh()) - &ad * (Complex64::from_polar(1.0, theta) * r.sinh());
        let low = 10;
        let diff = (lhs - rhs).view((0, 0), (low, low)).into_owned();
        assert!(max_abs(&diff) < 1e-8, "{}", max_abs(&diff));
    }

    #[test]
    fn bogoliubov_relation_with_nonzero_phase() {
        let cut = FockCutoff::new(80).unwrap();
        let (r, theta) = (0.4_f64, 1.1_f64);
        let s = squeeze_operator(cut, r, theta).unwrap();
        let (a, ad) = ladder_operators(cut);
        let lhs = s.adjoint() * &ad * &s;
        let rhs = &ad * cr(r.cosh()) - &a * (Complex64::from_polar(1.0, -theta) * r.sinh());
        let diff = (lhs - rhs).view((0, 0), (10, 10)).into_owned();
        assert!(max_abs(&diff) < 1e-8);
    }

    #[test]
    fn frozen_thermal_state_is_ground_projector() {
        let cut = FockCutoff::new(8).unwrap();
        let rho = thermal_state(cut, 50.0, 1.0).unwrap();
        let mut ground = CMatrix::zeros(8, 8);
        ground[(0, 0)] = cr(1.0);
        assert!(max_abs(&(rho.matrix() - ground)) < 1e-20);
    }

    #[test]
    fn thermal_occupation_and_entropy() {
        let cut = FockCutoff::new(40).unwrap();
        let rho = thermal_state(cut, 1.0, 1.0).unwrap();
        let nbar = 1.0 / (1f64.exp() - 1.0);
        let (_, ada, _) = fock_moments(&rho);
        assert!((ada - nbar).abs() < 1e-9);
        assert!((ada - 0.581977).abs() < 1e-6);
        let s_closed = (nbar + 1.0) * (nbar + 1.0).ln() - nbar * nbar.ln();
        assert!((von_neumann_entropy(&rho) - s_closed).abs() < 1e-8);
    }

    #[test]
    fn thermal_state_reports_small_cutoff() {
        let cut = FockCutoff::new(5).unwrap();
        assert!(matches!(
            thermal_state(cut, 1.0, 1.0),
            Err(Error::CutoffTooSmall { n_max: 5, .. })
        ));
        assert!(thermal_state(cut, 0.0, 1.0).is_err());
    }

    #[test]
    fn unsqueezed_state_equals_thermal_state() {
        let cut = FockCutoff::new(30).unwrap();
        let th = thermal_state(cut, 1.3, 0.9).unwrap();
        let sts = squeezed_thermal_state(cut, 1.3, 0.9, 0.0, 0.7).unwrap();
        assert!(max_abs(&(th.matrix() - sts.matrix())) < 1e-15);
    }

    #[test]
    fn squeezed_thermal_moments_match_closed_forms() {
        // n̄ = 1 ⇔ βω = ln 2
        let (r, theta) = (0.5_f64, PI / 3.0);
        let cut = auto_cutoff(2f64.ln(), 1.0, r, theta, 1e-8).unwrap();
        let rho = squeezed_thermal_state(cut, 2f64.ln(), 1.0, r, theta).unwrap();
        let tr = linalg::trace(rho.matrix());
        assert!((tr - cr(1.0)).norm() < 1e-10);
        assert!(linalg::hermiticity_residual(rho.matrix()) < 1e-12);
        let (aa, ada, aad) = fock_moments(&rho);
        let expected_ada = 1f64.cosh() + r.sinh().powi(2);
        assert!((ada - expected_ada).abs() < 1e-7);
        assert!((expected_ada - 1.814621).abs() < 1e-6);
        let expected_aa = Complex64::from_polar(-0.5 * 3.0 * 1f64.sinh(), theta);
        assert!((aa - expected_aa).norm() < 1e-7);
        assert!((aad - ada - 1.0).abs() < 1e-7);
    }

    #[test]
    fn squeezed_state_reports_leakage_at_small_cutoff() {
        let cut = FockCutoff::new(12).unwrap();
        assert!(matches!(
            squeezed_thermal_state(cut, 0.5, 1.0, 1.2, 0.0),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn cutoff_sixty_is_too_small_for_moderate_squeezing() {
        let cut = FockCutoff::new(60).unwrap();
        assert!(matches!(
            squeezed_thermal_state(cut, 2f64.ln(), 1.0, 0.5, PI / 3.0),
            Err(Error::CutoffTooSmall { n_max: 60, .. })
        ));
    }

    #[test]
    fn occupation_converges_between_auto_cutoff_and_double() {
        for &(nbar, r) in &[(0.0_f64, 1.0), (1.0, 0.5), (0.5, 0.8), (0.156, 0.5)] {
            let beta_omega = if nbar == 0.0 { 40.0 } else { (1.0 + 1.0 / nbar).ln() };
            let cut = auto_cutoff(beta_omega, 1.0, r, 0.3, 1e-8).unwrap();
            let big = FockCutoff::new(2 * cut.n_max()).unwrap();
            let (_, n1, _) = fock_moments(&squeezed_thermal_state(cut, beta_omega, 1.0, r, 0.3).unwrap());
            let (_, n2, _) = fock_moments(&squeezed_thermal_state(big, beta_omega, 1.0, r, 0.3).unwrap());
            assert!((n1 - n2).abs() < cut.trace_deficit_tol(), "n̄={nbar} r={r}: {n1} vs {n2}");
        }
    }
}
