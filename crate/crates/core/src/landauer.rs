//! Generalized Landauer budget for a reservoir prepared as O ρ_th O†.
//!
//! With H_eff = O H_R O† the reservoir is the Gibbs state of H_eff, and for
//! any global unitary U the heat βTr[H_eff(ρ'_R − ρ_R)] splits exactly into
//! ΔS + I(S':R') + D(ρ'_R‖ρ_R).

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, cr, CMatrix};
use crate::quantum::entropy::{mutual_information, relative_entropy_spectral, von_neumann_entropy};
use crate::quantum::state::DensityMatrix;

pub const HAMILTONIAN_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-10;

/// Clamping of the reference spectrum may move D by at most this much before
/// a budget is flagged.
pub const CLAMP_FLAG_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirSpec {
    h_r: CMatrix,
    beta: f64,
    o: CMatrix,
}

impl ReservoirSpec {
    pub fn new(h_r: CMatrix, beta: f64, o: CMatrix) -> Result<Self> {
        linalg::ensure_hermitian(&h_r, HAMILTONIAN_TOL)?;
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(invalid(format!("β must be positive, got {beta}")));
        }
        if o.nrows() != h_r.nrows() {
            return Err(Error::DimensionMismatch {
                expected: h_r.nrows(),
                found: o.nrows(),
            });
        }
        linalg::ensure_unitary(&o, UNITARY_TOL)?;
        Ok(Self { h_r, beta, o })
    }

    /// Canonical thermal reservoir, O = 1.
    pub fn thermal(h_r: CMatrix, beta: f64) -> Result<Self> {
        let n = h_r.nrows();
        Self::new(h_r, beta, linalg::identity(n))
    }

    pub fn h_r(&self) -> &CMatrix {
        &self.h_r
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn o(&self) -> &CMatrix {
        &self.o
    }

    pub fn dim(&self) -> usize {
        self.h_r.nrows()
    }

    /// ρ_R = O (e^{−βH_R}/Z) O†.
    pub fn reservoir_state(&self) -> DensityMatrix {
        let g = linalg::gibbs_operator(&self.h_r, self.beta);
        let z = linalg::trace(&g).re;
        let rho = g.unscale(z);
        DensityMatrix::from_trusted(&self.o * rho * self.o.adjoint(), vec![self.dim()])
    }

    /// Eigenvalues and eigenvectors of ρ_R: Gibbs weights of H_R and the
    /// columns of O V_R.
    pub fn reservoir_spectrum(&self) -> (Vec<f64>, CMatrix) {
        let eig = linalg::eigh(&self.h_r);
        let e_min = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
        let raw: Vec<f64> = eig.values.iter().map(|e| (-self.beta * (e - e_min)).exp()).collect();
        let z: f64 = raw.iter().sum();
        (raw.iter().map(|w| w / z).collect(), &self.o * eig.vectors)
    }
}

/// H_eff = O H_R O†.
pub fn effective_hamiltonian(spec: &ReservoirSpec) -> CMatrix {
    let h = &spec.o * &spec.h_r * spec.o.adjoint();
    (&h + h.adjoint()).scale(0.5)
}

/// ‖O e^{−βH_R} O† − e^{−βH_eff}‖_max.
pub fn gibbs_conjugation_check(spec: &ReservoirSpec) -> f64 {
    let lhs = &spec.o * linalg::gibbs_operator(&spec.h_r, spec.beta) * spec.o.adjoint();
    let rhs = linalg::gibbs_operator(&effective_hamiltonian(spec), spec.beta);
    linalg::max_abs(&(lhs - rhs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandauerBudget {
    /// βTr[H_eff(ρ'_R − ρ_R)].
    pub heat: f64,
    /// S(ρ_S) − S(ρ'_S).
    pub entropy_change: f64,
    pub mutual_info: f64,
    pub rel_entropy: f64,
    /// heat − (ΔS + I + D).
    pub equality_residual: f64,
    /// heat − ΔS.
    pub sigma: f64,
    /// Bound on how far eigenvalue flooring moved D.
    pub clamp_shift: f64,
    pub clamp_flagged: bool,
    pub final_state: DensityMatrix,
}

impl LandauerBudget {
    /// |σ − (I + D)|; equals |equality_residual| up to round-off.
    pub fn decomposition_gap(&self) -> f64 {
        (self.sigma - self.mutual_info - self.rel_entropy).abs()
    }
}

/// Evolves ρ_S ⊗ ρ_R with `u` and evaluates every term of the budget.
pub fn landauer_budget(rho_s: &DensityMatrix, spec: &ReservoirSpec, u: &CMatrix) -> Result<LandauerBudget> {
    let ds = rho_s.dim();
    let dr = spec.dim();
    if u.nrows() != ds * dr || u.ncols() != ds * dr {
        return Err(Error::DimensionMismatch {
            expected: ds * dr,
            found: u.nrows(),
        });
    }
    linalg::ensure_unitary(u, UNITARY_TOL)?;

    let rho_s = DensityMatrix::from_trusted(rho_s.matrix().clone(), vec![ds]);
    let rho_r = spec.reservoir_state();
    let joint = rho_s.tensor(&rho_r).conjugate_unchecked(u);
    let s_after = joint.partial_trace(&[0])?;
    let r_after = joint.partial_trace(&[1])?;

    let h_eff = effective_hamiltonian(spec);
    let heat = spec.beta * (r_after.expectation(&h_eff).re - rho_r.expectation(&h_eff).re);
    let entropy_change = von_neumann_entropy(&rho_s) - von_neumann_entropy(&s_after);
    let mutual_info = mutual_information(&joint)?;
    let (weights, vectors) = spec.reservoir_spectrum();
    let d = relative_entropy_spectral(&r_after, &weights, &vectors)?;

    let sigma = heat - entropy_change;
    Ok(LandauerBudget {
        heat,
        entropy_change,
        mutual_info,
        rel_entropy: d.value,
        equality_residual: heat - (entropy_change + mutual_info + d.value),
        sigma,
        clamp_shift: d.clamp_shift,
        clamp_flagged: d.clamp_shift > CLAMP_FLAG_TOL,
        final_state: joint,
    })
}

/// βTr[H_R(ρ'_R − ρ_R)], the heat of the canonical budget.
pub fn standard_heat(h_r: &CMatrix, beta: f64, before: &DensityMatrix, after: &DensityMatrix) -> f64 {
    let diff = after.matrix() - before.matrix();
    beta * linalg::trace_product(h_r, &diff).re
}

/// Swap of two equal-dimension factors.
pub fn swap_unitary(dim: usize) -> CMatrix {
    let n = dim * dim;
    let mut u = CMatrix::zeros(n, n);
    for i in 0..dim {
        for j in 0..dim {
            u[(j * dim + i, i * dim + j)] = cr(1.0);
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, random_hermitian, random_unitary};
    use crate::quantum::entropy::relative_entropy;
    use crate::quantum::fock::{ladder_operators, number_operator, squeeze_operator, FockCutoff};
    use crate::sts::{effective_hamiltonian_expansion, ModeSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn qubit_h(omega: f64) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![cr(omega), cr(0.0)]))
    }

    #[test]
    fn identity_o_returns_h_r() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_hermitian(5, 1.0, &mut rng);
        let spec = ReservoirSpec::thermal(h.clone(), 1.0).unwrap();
        assert!(max_abs(&(effective_hamiltonian(&spec) - h)) < 1e-15);
        assert!(gibbs_conjugation_check(&spec) < 1e-13);
    }

    #[test]
    fn spectrum_preserved_under_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = random_hermitian(6, 2.0, &mut rng);
        let o = random_unitary(6, &mut rng);
        let spec = ReservoirSpec::new(h.clone(), 0.5, o).unwrap();
        let a = linalg::eigvalsh(&h);
        let b = linalg::eigvalsh(&effective_hamiltonian(&spec));
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn squeezed_number_operator_matches_expansion() {
        let cut = FockCutoff::new(80).unwrap();
        let (r, theta) = (0.5, 0.7);
        let h = number_operator(cut);
        let o = squeeze_operator(cut, r, theta).unwrap();
        let spec = ReservoirSpec::new(h, 1.0, o).unwrap();
        let conj = effective_hamiltonian(&spec);
        let mode = ModeSpec::new(1.0, 1.0, 1.0, 1.0, r, theta).unwrap();
        let expanded = effective_hamiltonian_expansion(cut, &mode);
        for i in 0..10 {
            for j in 0..10 {
                assert!((conj[(i, j)] - expanded[(i, j)]).norm() < 1e-8, "({i},{j})");
            }
        }
    }

    #[test]
    fn gibbs_identity_random_spec() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(4, 1.0, &mut rng);
        let o = random_unitary(4, &mut rng);
        let spec = ReservoirSpec::new(h, 0.7, o).unwrap();
        assert!(gibbs_conjugation_check(&spec) <= 1e-10);
    }

    #[test]
    fn gibbs_identity_squeeze_at_cutoff_forty() {
        let cut = FockCutoff::new(40).unwrap();
        let spec = ReservoirSpec::new(number_operator(cut), 1.0, squeeze_operator(cut, 0.6, 0.0).unwrap()).unwrap();
        assert!(gibbs_conjugation_check(&spec) <= 1e-8);
    }

    #[test]
    fn spec_validation() {
        let bad = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(0.0), cr(0.0)]);
        assert!(ReservoirSpec::thermal(bad, 1.0).is_err());
        assert!(ReservoirSpec::thermal(qubit_h(1.0), 0.0).is_err());
        let non_unitary = linalg::identity(2).scale(2.0);
        assert!(ReservoirSpec::new(qubit_h(1.0), 1.0, non_unitary).is_err());
        assert!(ReservoirSpec::new(qubit_h(1.0), 1.0, linalg::identity(3)).is_err());
    }

    #[test]
    fn identity_evolution_has_empty_budget() {
        let rho_s = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let cut = FockCutoff::new(8).unwrap();
        let spec = ReservoirSpec::new(number_operator(cut), 1.0, squeeze_operator(cut, 0.3, 0.2).unwrap()).unwrap();
        let b = landauer_budget(&rho_s, &spec, &linalg::identity(16)).unwrap();
        for v in [b.heat, b.entropy_change, b.mutual_info, b.rel_entropy, b.sigma] {
            assert!(v.abs() < 1e-10, "{b:?}");
        }
    }

    #[test]
    fn swap_budget_matches_spectra() {
        let rho_s = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let spec = ReservoirSpec::thermal(qubit_h(1.0), 1.0).unwrap();
        let rho_r = spec.reservoir_state();
        let b = landauer_budget(&rho_s, &spec, &swap_unitary(2)).unwrap();
        assert!(b.equality_residual.abs() <= 1e-11);
        // After a swap the reservoir holds ρ_S and the factors stay uncorrelated.
        let d = relative_entropy(&rho_s, &rho_r).unwrap();
        assert!((b.sigma - d).abs() < 1e-11);
        assert!(b.mutual_info.abs() < 1e-11);
    }

    #[test]
    fn random_qubit_mode_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cut = FockCutoff::new(12).unwrap();
        let spec = ReservoirSpec::new(number_operator(cut), 1.0, squeeze_operator(cut, 0.4, 1.0).unwrap()).unwrap();
        let rho_s = DensityMatrix::diagonal(&[0.2, 0.8]).unwrap();
        let u = random_unitary(24, &mut rng);
        let b = landauer_budget(&rho_s, &spec, &u).unwrap();
        assert!(b.equality_residual.abs() <= 1e-9, "{}", b.equality_residual);
        assert!(b.sigma >= -1e-10);
        assert!(!b.clamp_flagged);
        assert!(b.decomposition_gap() < 1e-9);
    }

    #[test]
    fn canonical_budget_reduces_to_standard_heat() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cut = FockCutoff::new(6).unwrap();
        let (a, ad) = ladder_operators(cut);
        let h = &ad * &a;
        let spec = ReservoirSpec::thermal(h.clone(), 0.8).unwrap();
        let rho_s = DensityMatrix::diagonal(&[0.6, 0.4]).unwrap();
        let b = landauer_budget(&rho_s, &spec, &random_unitary(12, &mut rng)).unwrap();
        let after = b.final_state.partial_trace(&[1]).unwrap();
        let q = standard_heat(&h, 0.8, &spec.reservoir_state(), &after);
        assert!((b.heat - q).abs() < 1e-11);
    }

    #[test]
    fn budget_rejects_bad_unitaries() {
        let rho_s = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        let spec = ReservoirSpec::thermal(qubit_h(1.0), 1.0).unwrap();
        assert!(matches!(
            landauer_budget(&rho_s, &spec, &linalg::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            landauer_budget(&rho_s, &spec, &linalg::identity(4).scale(1.1)),
            Err(Error::NotUnitary { .. })
        ));
    }
}
