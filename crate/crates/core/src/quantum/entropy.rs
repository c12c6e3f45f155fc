//! Entropy functionals in nats.
//!
//! Truncated Fock spaces produce eigenvalues that are spuriously negative or
//! tiny; everything below [`EIGEN_FLOOR`] is treated as zero when weighting
//! and floored (then renormalized) when a logarithm of the reference state
//! is needed.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::quantum::state::DensityMatrix;

pub const EIGEN_FLOOR: f64 = 1e-14;

/// Weight that a state may place on the floored part of a reference state's
/// spectrum before the relative entropy is declared infinite.
pub const SUPPORT_WEIGHT_TOL: f64 = 1e-10;

/// Entropy of a spectrum, 0·ln 0 = 0.
pub fn shannon_entropy(eigenvalues: &[f64]) -> f64 {
    eigenvalues.iter().filter(|&&l| l > EIGEN_FLOOR).map(|&l| -l * l.ln()).sum()
}

/// S(ρ) = −Tr ρ ln ρ.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(&rho.eigenvalues()).max(0.0)
}

/// Relative entropy together with how much the eigenvalue floor moved it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeEntropy {
    pub value: f64,
    /// Upper estimate of |D_floored − D_exact| from reference eigenvalues
    /// that were raised to the floor.
    pub clamp_shift: f64,
}

/// D(ρ‖σ) = Tr ρ (ln ρ − ln σ).
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    relative_entropy_detailed(rho, sigma).map(|d| d.value)
}

pub fn relative_entropy_detailed(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<RelativeEntropy> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let eig = linalg::eigh(sigma.matrix());
    relative_entropy_spectral(rho, eig.values.as_slice(), &eig.vectors)
}

/// D(ρ‖σ) for σ = Σ_j λ_j |v_j⟩⟨v_j| given by its spectral decomposition.
pub fn relative_entropy_spectral(rho: &DensityMatrix, values: &[f64], vectors: &CMatrix) -> Result<RelativeEntropy> {
    if vectors.nrows() != rho.dim() || vectors.ncols() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: vectors.nrows(),
        });
    }
    let neg_entropy = -shannon_entropy(&rho.eigenvalues());
    let floored: Vec<f64> = values.iter().map(|&l| l.max(EIGEN_FLOOR)).collect();
    let norm: f64 = floored.iter().sum();
    let rho_m = rho.matrix();

    let mut cross = 0.0;
    let mut clamp_shift = 0.0;
    for (j, &raw) in values.iter().enumerate() {
        let v = vectors.column(j);
        // ⟨v_j|ρ|v_j⟩
        let w = (v.adjoint() * rho_m * v)[(0, 0)].re.max(0.0);
        if raw < EIGEN_FLOOR {
            if w > SUPPORT_WEIGHT_TOL {
                return Err(Error::SupportViolation {
                    eigenvalue: raw,
                    weight: w,
                });
            }
            let true_log = raw.max(f64::MIN_POSITIVE).ln();
            clamp_shift += w * (EIGEN_FLOOR.ln() - true_log).abs();
        }
        cross += w * (floored[j] / norm).ln();
    }
    Ok(RelativeEntropy {
        value: neg_entropy - cross,
        clamp_shift,
    })
}

/// I(A:B) = S(ρ_A) + S(ρ_B) − S(ρ_AB) for a two-factor state.
pub fn mutual_information(rho_ab: &DensityMatrix) -> Result<f64> {
    if rho_ab.dims().len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "mutual information needs a bipartite state, got {} factors",
            rho_ab.dims().len()
        )));
    }
    let a = rho_ab.partial_trace(&[0])?;
    let b = rho_ab.partial_trace(&[1])?;
    Ok(von_neumann_entropy(&a) + von_neumann_entropy(&b) - von_neumann_entropy(rho_ab))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cr, random_density, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    #[test]
    fn pure_state_has_zero_entropy() {
        let psi = DensityMatrix::pure(&[cr(0.6), cr(0.8)], vec![2]).unwrap();
        assert!(von_neumann_entropy(&psi).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_qubit() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        assert!((von_neumann_entropy(&rho) - LN_2).abs() < 1e-15);
    }

    #[test]
    fn diagonal_entropy_matches_scalar_formula() {
        let rho = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let expected = -0.3_f64 * 0.3_f64.ln() - 0.7_f64 * 0.7_f64.ln();
        assert!((von_neumann_entropy(&rho) - expected).abs() < 1e-15);
        assert!((expected - 0.610864).abs() < 1e-6);
    }

    #[test]
    fn relative_entropy_of_identical_states_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let rho = DensityMatrix::single(random_density(5, &mut rng)).unwrap();
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-11);
    }

    #[test]
    fn relative_entropy_diagonal_pair() {
        let rho = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let sigma = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        let expected = 0.3 * 0.6_f64.ln() + 0.7 * 1.4_f64.ln();
        assert!((relative_entropy(&rho, &sigma).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 0.082282).abs() < 1e-6);
    }

    #[test]
    fn relative_entropy_positive_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..50 {
            let rho = DensityMatrix::single(random_density(4, &mut rng)).unwrap();
            let sigma = DensityMatrix::single(random_density(4, &mut rng)).unwrap();
            assert!(relative_entropy(&rho, &sigma).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn support_violation_names_eigenvalue() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        let sigma = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        match relative_entropy(&rho, &sigma) {
            Err(Error::SupportViolation { eigenvalue, weight }) => {
                assert_eq!(eigenvalue, 0.0);
                assert!((weight - 0.5).abs() < 1e-15);
            }
            other => panic!("expected support violation, got {other:?}"),
        }
    }

    #[test]
    fn floored_reference_with_matching_support_is_finite() {
        let rho = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let sigma = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let d = relative_entropy_detailed(&rho, &sigma).unwrap();
        assert!(d.value.abs() < 1e-12);
        assert_eq!(d.clamp_shift, 0.0);
    }

    #[test]
    fn product_state_has_no_mutual_information() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let a = DensityMatrix::single(random_density(2, &mut rng)).unwrap();
        let b = DensityMatrix::single(random_density(3, &mut rng)).unwrap();
        assert!(mutual_information(&a.tensor(&b)).unwrap().abs() < 1e-10);
    }

    #[test]
    fn bell_state_mutual_information_is_two_ln_two() {
        let h = FRAC_1_SQRT_2;
        let bell = DensityMatrix::pure(&[cr(h), cr(0.0), cr(0.0), cr(h)], vec![2, 2]).unwrap();
        assert!((mutual_information(&bell).unwrap() - 2.0 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_non_negative_after_global_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..20 {
            let a = DensityMatrix::single(random_density(2, &mut rng)).unwrap();
            let b = DensityMatrix::single(random_density(3, &mut rng)).unwrap();
            let u = random_unitary(6, &mut rng);
            let ab = a.tensor(&b).conjugate(&u).unwrap();
            assert!(mutual_information(&ab).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn mutual_information_requires_bipartite_state() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        assert!(mutual_information(&rho).is_err());
    }
}
