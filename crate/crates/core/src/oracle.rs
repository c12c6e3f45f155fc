//! Exact propagation of qubit ⊗ one truncated mode under
//! H(τ) = λ σx(τ) ⊗ (a f(τ) + a† f*(τ)), with σx(τ) = σ₊e^{iΩτ} + σ₋e^{−iΩτ}
//! and f(τ) = e^{−iωt(τ)} u(x(τ)).

use num_complex::Complex64;

use crate::detector::{self, DetectorSpec, InteractionWindow, Trajectory};
use crate::error::{invalid, Error, Result};
use crate::landauer::{landauer_budget, LandauerBudget, ReservoirSpec};
use crate::linalg::{self, cr, CMatrix};
use crate::quantum::fock::{
    auto_cutoff, ladder_operators, number_operator, squeeze_operator, squeezed_thermal_state, FockCutoff,
};
use crate::quantum::state::DensityMatrix;
use crate::sts::ModeSpec;

pub const DEFAULT_STEP_TOL: f64 = 1e-9;
pub const MIN_STEPS: usize = 16;
pub const CUTOFF_HEADROOM: usize = 10;
pub const CUTOFF_CHECK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Refinement {
    Fixed,
    #[default]
    AutoHalving,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Exponential of H at the step midpoint; second order.
    Midpoint,
    /// Two-point Gauss Magnus expansion with the commutator term; fourth order.
    #[default]
    Magnus4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConfig {
    pub steps: usize,
    pub refinement: Refinement,
    pub step_tol: f64,
    pub cutoff: FockCutoff,
    pub scheme: Scheme,
    /// Refinement stops with an error beyond this many steps.
    pub max_steps: usize,
}

impl PropagationConfig {
    pub fn new(cutoff: FockCutoff) -> Self {
        Self {
            steps: 64,
            refinement: Refinement::AutoHalving,
            step_tol: DEFAULT_STEP_TOL,
            cutoff,
            scheme: Scheme::Magnus4,
            max_steps: 1 << 16,
        }
    }

    /// Auto cutoff of the mode's reservoir state plus headroom.
    pub fn for_mode(mode: &ModeSpec) -> Result<Self> {
        Ok(Self::new(oracle_cutoff(
            mode,
            crate::quantum::fock::DEFAULT_TRACE_DEFICIT_TOL,
        )?))
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < MIN_STEPS {
            return Err(invalid(format!(
                "propagation needs at least {MIN_STEPS} steps, got {}",
                self.steps
            )));
        }
        if !(self.step_tol > 0.0) {
            return Err(invalid("step tolerance must be positive"));
        }
        if self.max_steps < self.steps {
            return Err(invalid("max_steps must be at least steps"));
        }
        Ok(())
    }
}

/// Auto-selected cutoff (with deficit tolerance `tol`) plus
/// [`CUTOFF_HEADROOM`] levels.
pub fn oracle_cutoff(mode: &ModeSpec, tol: f64) -> Result<FockCutoff> {
    Ok(auto_cutoff(mode.beta, mode.omega, mode.r, mode.theta, tol)?.grown(CUTOFF_HEADROOM))
}

/// Time-dependent interaction Hamiltonian on qubit ⊗ mode.
#[derive(Debug, Clone)]
pub struct InteractionModel {
    pub coupling: f64,
    gap: f64,
    mode: ModeSpec,
    traj: Trajectory,
    sigma_plus: CMatrix,
    a: CMatrix,
    ad: CMatrix,
}

impl InteractionModel {
    pub fn new(det: &DetectorSpec, mode: &ModeSpec, traj: &Trajectory, cutoff: FockCutoff) -> Result<Self> {
        det.validate()?;
        mode.validate()?;
        traj.validate()?;
        let (a, ad) = ladder_operators(cutoff);
        let sigma_plus = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(0.0), cr(0.0)]);
        Ok(Self {
            coupling: det.coupling,
            gap: det.gap,
            mode: *mode,
            traj: traj.clone(),
            sigma_plus,
            a,
            ad,
        })
    }

    pub fn dim(&self) -> usize {
        2 * self.a.nrows()
    }

    pub fn at(&self, tau: f64) -> Result<CMatrix> {
        let (t, x) = self.traj.eval(tau)?;
        let f = Complex64::from_polar(1.0, -self.mode.omega * t) * detector::mode_function(&self.mode, x);
        let sp = self.sigma_plus.map(|z| z * Complex64::from_polar(1.0, self.gap * tau));
        let sx = &sp + sp.adjoint();
        let field = self.a.map(|z| z * f) + self.ad.map(|z| z * f.conj());
        Ok(linalg::kron(&sx, &field).map(|z| z * self.coupling))
    }
}

pub fn interaction_hamiltonian_at(
    tau: f64,
    det: &DetectorSpec,
    mode: &ModeSpec,
    traj: &Trajectory,
    cutoff: FockCutoff,
) -> Result<CMatrix> {
    InteractionModel::new(det, mode, traj, cutoff)?.at(tau)
}

/// Ordered product of per-step exponentials over [0, s].
pub fn propagator(model: &InteractionModel, s: f64, steps: usize, scheme: Scheme) -> Result<CMatrix> {
    let n = model.dim();
    let mut u = linalg::identity(n);
    if model.coupling == 0.0 {
        return Ok(u);
    }
    let h = s / steps as f64;
    let offset = 3f64.sqrt() / 6.0;
    for k in 0..steps {
        let t0 = h * k as f64;
        let exponent = match scheme {
            Scheme::Midpoint => Sparse::from_dense(&model.at(t0 + 0.5 * h)?).scaled(Complex64::new(0.0, -h)),
            Scheme::Magnus4 => {
                let h1 = Sparse::from_dense(&model.at(t0 + (0.5 - offset) * h)?);
                let h2 = Sparse::from_dense(&model.at(t0 + (0.5 + offset) * h)?);
                // Ω = −i(h/2)(H₁ + H₂) − (√3/12)h²[H₂, H₁]
                let comm = h2.mul(&h1).sub(&h1.mul(&h2));
                h1.add(&h2)
                    .scaled(Complex64::new(0.0, -0.5 * h))
                    .sub(&comm.scaled(cr(3f64.sqrt() / 12.0 * h * h)))
            }
        };
        u = exponent.expm_apply(&u);
    }
    Ok(u)
}

/// Row-compressed operator for the per-step exponents, which have a handful
/// of nonzeros per row.
#[derive(Debug, Clone)]
struct Sparse {
    n: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl Sparse {
    fn from_dense(m: &CMatrix) -> Self {
        let n = m.nrows();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .filter_map(|j| {
                        let z = m[(i, j)];
                        (z != Complex64::new(0.0, 0.0)).then_some((j, z))
                    })
                    .collect()
            })
            .collect();
        Self { n, rows }
    }

    fn scaled(mut self, c: Complex64) -> Self {
        for row in &mut self.rows {
            for e in row.iter_mut() {
                e.1 *= c;
            }
        }
        self
    }

    fn combine(&self, other: &Sparse, sign: f64) -> Sparse {
        let mut acc = vec![Complex64::new(0.0, 0.0); self.n];
        let mut touched = Vec::new();
        let rows = (0..self.n)
            .map(|i| {
                for &(j, z) in &self.rows[i] {
                    if acc[j] == Complex64::new(0.0, 0.0) {
                        touched.push(j);
                    }
                    acc[j] += z;
                }
                for &(j, z) in &other.rows[i] {
                    if acc[j] == Complex64::new(0.0, 0.0) {
                        touched.push(j);
                    }
                    acc[j] += z * sign;
                }
                Self::drain(&mut acc, &mut touched)
            })
            .collect();
        Sparse { n: self.n, rows }
    }

    fn add(&self, other: &Sparse) -> Sparse {
        self.combine(other, 1.0)
    }

    fn sub(&self, other: &Sparse) -> Sparse {
        self.combine(other, -1.0)
    }

    fn mul(&self, other: &Sparse) -> Sparse {
        let mut acc = vec![Complex64::new(0.0, 0.0); self.n];
        let mut touched = Vec::new();
        let rows = (0..self.n)
            .map(|i| {
                for &(k, a) in &self.rows[i] {
                    for &(j, b) in &other.rows[k] {
                        if acc[j] == Complex64::new(0.0, 0.0) {
                            touched.push(j);
                        }
                        acc[j] += a * b;
                    }
                }
                Self::drain(&mut acc, &mut touched)
            })
            .collect();
        Sparse { n: self.n, rows }
    }

    fn drain(acc: &mut [Complex64], touched: &mut Vec<usize>) -> Vec<(usize, Complex64)> {
        touched.sort_unstable();
        touched.dedup();
        let row = touched
            .iter()
            .filter_map(|&j| {
                let z = std::mem::replace(&mut acc[j], Complex64::new(0.0, 0.0));
                (z != Complex64::new(0.0, 0.0)).then_some((j, z))
            })
            .collect();
        touched.clear();
        row
    }

    fn apply(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.n, m.ncols());
        for (i, row) in self.rows.iter().enumerate() {
            for &(k, a) in row {
                for c in 0..m.ncols() {
                    out[(i, c)] += a * m[(k, c)];
                }
            }
        }
        out
    }

    fn row_sum_norm(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| row.iter().map(|e| e.1.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// exp(self)·m. The exponent is split into 2^k equal parts of row-sum
    /// norm ≤ ½, each applied by a Taylor series summed to round-off.
    fn expm_apply(&self, m: &CMatrix) -> CMatrix {
        let norm = self.row_sum_norm();
        if norm > 0.5 {
            let parts = (norm / 0.5).log2().ceil() as i32;
            let piece = self.clone().scaled(cr(0.5f64.powi(parts)));
            let mut out = m.clone();
            for _ in 0..(1usize << parts) {
                out = piece.taylor_apply(&out);
            }
            return out;
        }
        self.taylor_apply(m)
    }

    fn taylor_apply(&self, m: &CMatrix) -> CMatrix {
        let scale = linalg::max_abs(m).max(1.0);
        let mut term = m.clone();
        let mut acc = m.clone();
        for k in 1..40 {
            term = self.apply(&term).unscale(k as f64);
            acc += &term;
            if linalg::max_abs(&term) < 1e-18 * scale {
                break;
            }
        }
        acc
    }
}

#[derive(Debug, Clone)]
pub struct ExactEvolution {
    pub state: DensityMatrix,
    pub propagator: CMatrix,
    pub steps: usize,
    /// max |ρ(N) − ρ(N/2)| at the accepted step count; zero for fixed runs.
    pub change: f64,
}

impl ExactEvolution {
    /// Excited-state population of the reduced detector state.
    pub fn excited_population(&self) -> Result<f64> {
        Ok(self.state.partial_trace(&[0])?.matrix()[(0, 0)].re)
    }
}

/// Initial state diag(p, 1−p) ⊗ squeezed thermal mode.
pub fn initial_state(det: &DetectorSpec, mode: &ModeSpec, cutoff: FockCutoff) -> Result<DensityMatrix> {
    let qubit = DensityMatrix::diagonal(&[det.p, 1.0 - det.p])?;
    let field = squeezed_thermal_state(cutoff, mode.beta, mode.omega, mode.r, mode.theta)?;
    Ok(qubit.tensor(&field))
}

pub fn evolve_exact(
    rho0: &DensityMatrix,
    det: &DetectorSpec,
    mode: &ModeSpec,
    traj: &Trajectory,
    win: &InteractionWindow,
    cfg: &PropagationConfig,
) -> Result<ExactEvolution> {
    let model = InteractionModel::new(det, mode, traj, cfg.cutoff)?;
    evolve_model(rho0, &model, win, cfg)
}

pub fn evolve_model(
    rho0: &DensityMatrix,
    model: &InteractionModel,
    win: &InteractionWindow,
    cfg: &PropagationConfig,
) -> Result<ExactEvolution> {
    cfg.validate()?;
    win.validate()?;
    if rho0.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: rho0.dim(),
        });
    }
    let run = |steps: usize| -> Result<(CMatrix, DensityMatrix)> {
        let u = propagator(model, win.s, steps, cfg.scheme)?;
        let rho = rho0.conjugate_unchecked(&u);
        Ok((u, rho))
    };
    let mut steps = cfg.steps;
    let (mut u, mut rho) = run(steps)?;
    if cfg.refinement == Refinement::Fixed || model.coupling == 0.0 {
        return Ok(ExactEvolution {
            state: rho,
            propagator: u,
            steps,
            change: 0.0,
        });
    }
    loop {
        let next_steps = steps * 2;
        if next_steps > cfg.max_steps {
            let (_, probe) = run(next_steps.min(cfg.max_steps))?;
            return Err(Error::PropagationNonConvergence {
                change: linalg::max_abs(&(probe.matrix() - rho.matrix())),
                tol: cfg.step_tol,
                steps,
            });
        }
        let (u2, rho2) = run(next_steps)?;
        let change = linalg::max_abs(&(rho2.matrix() - rho.matrix()));
        u = u2;
        rho = rho2;
        steps = next_steps;
        if change < cfg.step_tol {
            return Ok(ExactEvolution {
                state: rho,
                propagator: u,
                steps,
                change,
            });
        }
    }
}

/// The reservoir of the oracle as a budget spec: H_R = ω a†a, O = S(ξ).
pub fn reservoir_spec(mode: &ModeSpec, cutoff: FockCutoff) -> Result<ReservoirSpec> {
    let h = number_operator(cutoff).map(|z| z * mode.omega);
    ReservoirSpec::new(h, mode.beta, squeeze_operator(cutoff, mode.r, mode.theta)?)
}

/// Landauer budget of the exact evolution.
pub fn exact_budget(det: &DetectorSpec, mode: &ModeSpec, evo: &ExactEvolution, cutoff: FockCutoff) -> Result<LandauerBudget> {
    let rho_s = DensityMatrix::diagonal(&[det.p, 1.0 - det.p])?;
    landauer_budget(&rho_s, &reservoir_spec(mode, cutoff)?, &evo.propagator)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPoint {
    pub lambda: f64,
    pub dp_exact: f64,
    pub dp_pert: f64,
    /// |δp_exact − δp_pert|.
    pub residual: f64,
    pub sigma_exact: f64,
    pub sigma_pert: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope of ln|δp_exact − δp_pert| against ln λ.
    pub slope: f64,
    /// λ values dropped because the perturbative-validity flag fired.
    pub trimmed: Vec<f64>,
    pub cutoff: usize,
    /// δp_exact change when the cutoff grows by [`CUTOFF_HEADROOM`] levels.
    pub cutoff_change: f64,
}

impl ScalingReport {
    pub fn slope_in(&self, lo: f64, hi: f64) -> bool {
        self.slope >= lo && self.slope <= hi
    }

    /// Ratios |σ_exact − σ_pert|(2λ) / |σ_exact − σ_pert|(λ) for consecutive
    /// points of a doubling ladder.
    pub fn sigma_shrink_ratios(&self) -> Vec<f64> {
        self.points
            .windows(2)
            .map(|w| (w[1].sigma_exact - w[1].sigma_pert).abs() / (w[0].sigma_exact - w[0].sigma_pert).abs())
            .collect()
    }
}

pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Exact-minus-perturbative residuals over a list of couplings.
pub fn exact_vs_perturbative(
    det: &DetectorSpec,
    mode: &ModeSpec,
    traj: &Trajectory,
    win: &InteractionWindow,
    lambdas: &[f64],
    cfg: &PropagationConfig,
) -> Result<ScalingReport> {
    let mut lambdas: Vec<f64> = lambdas.to_vec();
    if lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(invalid("couplings must be finite and ≥ 0"));
    }
    lambdas.sort_by(f64::total_cmp);
    lambdas.retain(|&l| l > 0.0);
    check_span(&lambdas)?;

    // Trim couplings whose perturbative evaluation is flagged invalid.
    let mut trimmed = Vec::new();
    while let Some(&top) = lambdas.last() {
        let ev = detector::evaluate(&det.with_coupling(top), &[*mode], traj, win)?;
        if ev.validity.is_valid() {
            break;
        }
        trimmed.push(top);
        lambdas.pop();
    }
    check_span(&lambdas)?;

    let rho0 = initial_state(det, mode, cfg.cutoff)?;
    let mut points = Vec::with_capacity(lambdas.len());
    for &lambda in &lambdas {
        let d = det.with_coupling(lambda);
        let evo = evolve_exact(&rho0, &d, mode, traj, win, cfg)?;
        let dp_exact = evo.excited_population()? - det.p;
        let ev = detector::evaluate(&d, &[*mode], traj, win)?;
        let budget = exact_budget(&d, mode, &evo, cfg.cutoff)?;
        points.push(ScalingPoint {
            lambda,
            dp_exact,
            dp_pert: ev.delta_p,
            residual: (dp_exact - ev.delta_p).abs(),
            sigma_exact: budget.sigma,
            sigma_pert: ev.sigma,
            steps: evo.steps,
        });
    }
    let fit: Vec<&ScalingPoint> = points.iter().filter(|p| p.residual > 0.0).collect();
    let slope = if fit.len() >= 2 {
        log_log_slope(
            &fit.iter().map(|p| p.lambda).collect::<Vec<_>>(),
            &fit.iter().map(|p| p.residual).collect::<Vec<_>>(),
        )
    } else {
        f64::NAN
    };

    let top = *lambdas.last().unwrap();
    let bigger = cfg.cutoff.grown(CUTOFF_HEADROOM);
    let big_cfg = PropagationConfig { cutoff: bigger, ..*cfg };
    let evo = evolve_exact(
        &initial_state(det, mode, bigger)?,
        &det.with_coupling(top),
        mode,
        traj,
        win,
        &big_cfg,
    )?;
    let dp_big = evo.excited_population()? - det.p;
    let dp_ref = points.last().unwrap().dp_exact;

    Ok(ScalingReport {
        points,
        slope,
        trimmed,
        cutoff: cfg.cutoff.n_max(),
        cutoff_change: (dp_big - dp_ref).abs(),
    })
}

fn check_span(lambdas: &[f64]) -> Result<()> {
    if lambdas.len() < 3 {
        return Err(invalid("scaling study needs at least three nonzero couplings"));
    }
    if lambdas[lambdas.len() - 1] < 4.0 * lambdas[0] {
        return Err(invalid("couplings must span at least a factor of 4"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    fn setup(r: f64, theta: f64) -> (DetectorSpec, ModeSpec, Trajectory, InteractionWindow) {
        (
            DetectorSpec::new(1.0, 0.3, 0.1).unwrap(),
            ModeSpec::new(1.0, 1.0, TAU, 2.0, r, theta).unwrap(),
            Trajectory::static_at(0.0),
            InteractionWindow::new(PI).unwrap(),
        )
    }

    #[test]
    fn zero_coupling_gives_zero_hamiltonian_and_identity() {
        let (det, mode, tr, win) = setup(0.0, 0.0);
        let det = det.with_coupling(0.0);
        let cut = FockCutoff::new(6).unwrap();
        let h = interaction_hamiltonian_at(0.7, &det, &mode, &tr, cut).unwrap();
        assert_eq!(max_abs(&h), 0.0);
        let rho0 = initial_state(&det, &mode, FockCutoff::new(20).unwrap()).unwrap();
        let cfg = PropagationConfig::new(FockCutoff::new(20).unwrap());
        let evo = evolve_exact(&rho0, &det, &mode, &tr, &win, &cfg).unwrap();
        assert_eq!(evo.state, rho0);
    }

    #[test]
    fn origin_hamiltonian_is_sigma_x_times_quadrature() {
        let (det, mode, tr, _) = setup(0.0, 0.0);
        let cut = FockCutoff::new(5).unwrap();
        let h = interaction_hamiltonian_at(0.0, &det, &mode, &tr, cut).unwrap();
        let (a, ad) = ladder_operators(cut);
        let sx = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)]);
        let u0 = detector::mode_function(&mode, 0.0);
        assert!(u0.im == 0.0);
        let expected = linalg::kron(&sx, &(a + ad)).map(|z| z * u0 * det.coupling);
        assert!(max_abs(&(h - expected)) < 1e-15);
    }

    #[test]
    fn hamiltonian_is_hermitian_at_random_times() {
        let (det, mode, _, _) = setup(0.5, 1.0);
        let tr = Trajectory::UniformlyAccelerated {
            acceleration: 0.4,
            t0: 0.2,
            x0: 0.1,
        };
        let model = InteractionModel::new(&det, &mode, &tr, FockCutoff::new(10).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let h = model.at(rng.random_range(0.0..5.0)).unwrap();
            assert!(linalg::hermiticity_residual(&h) <= 1e-12);
        }
    }

    #[test]
    fn propagation_preserves_trace_and_hermiticity() {
        let (det, mode, tr, win) = setup(0.5, 1.0);
        let cfg = PropagationConfig::for_mode(&mode).unwrap();
        let rho0 = initial_state(&det, &mode, cfg.cutoff).unwrap();
        let evo = evolve_exact(&rho0, &det, &mode, &tr, &win, &cfg).unwrap();
        let tr_val = linalg::trace(evo.state.matrix());
        assert!((tr_val - cr(1.0)).norm() < 1e-10);
        assert!(linalg::hermiticity_residual(evo.state.matrix()) < 1e-10);
        assert!(evo.change < cfg.step_tol);
    }

    #[test]
    fn doubling_steps_is_self_consistent() {
        let (det, mode, tr, win) = setup(0.0, 0.0);
        let mut cfg = PropagationConfig::for_mode(&mode).unwrap();
        cfg.refinement = Refinement::Fixed;
        cfg.steps = 256;
        let rho0 = initial_state(&det, &mode, cfg.cutoff).unwrap();
        let a = evolve_exact(&rho0, &det, &mode, &tr, &win, &cfg).unwrap();
        cfg.steps = 512;
        let b = evolve_exact(&rho0, &det, &mode, &tr, &win, &cfg).unwrap();
        let da = a.excited_population().unwrap();
        let db = b.excited_population().unwrap();
        assert!((da - db).abs() < cfg.step_tol);
    }

    #[test]
    fn midpoint_and_magnus_agree() {
        let (det, mode, tr, win) = setup(0.5, 1.0);
        let mut cfg = PropagationConfig::for_mode(&mode).unwrap();
        cfg.step_tol = 1e-8;
        let rho0 = initial_state(&det, &mode, cfg.cutoff).unwrap();
        let m4 = evolve_exact(&rho0, &det, &mode, &tr, &win, &cfg).unwrap();
        cfg.scheme = Scheme::Midpoint;
        let m2 = evolve_exact(&rho0, &det, &mode, &tr, &win, &cfg).unwrap();
        assert!(max_abs(&(m4.state.matrix() - m2.state.matrix())) < 1e-7);
        assert!(m2.steps > m4.steps);
    }

    #[test]
    fn odd_orders_cancel() {
        let (det, mode, tr, win) = setup(0.5, 1.0);
        let mut cfg = PropagationConfig::for_mode(&mode).unwrap();
        cfg.refinement = Refinement::Fixed;
        cfg.steps = 128;
        let rho0 = initial_state(&det, &mode, cfg.cutoff).unwrap();
        let mut model = InteractionModel::new(&det, &mode, &tr, cfg.cutoff).unwrap();
        let plus = evolve_model(&rho0, &model, &win, &cfg).unwrap().excited_population().unwrap();
        model.coupling = -model.coupling;
        let minus = evolve_model(&rho0, &model, &win, &cfg).unwrap().excited_population().unwrap();
        assert!((plus - minus).abs() < 1e-10);
    }

    #[test]
    fn config_validation() {
        let mut cfg = PropagationConfig::new(FockCutoff::new(10).unwrap());
        cfg.steps = 8;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn nonconvergence_is_reported() {
        let (det, mode, tr, win) = setup(0.0, 0.0);
        let mut cfg = PropagationConfig::new(FockCutoff::new(20).unwrap());
        cfg.step_tol = 1e-18;
        cfg.max_steps = 64;
        let rho0 = initial_state(&det, &mode, cfg.cutoff).unwrap();
        assert!(matches!(
            evolve_exact(&rho0, &det, &mode, &tr, &win, &cfg),
            Err(Error::PropagationNonConvergence { .. })
        ));
    }

    #[test]
    fn slope_fit_recovers_power() {
        let xs = [0.01, 0.02, 0.04, 0.08];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powi(4)).collect();
        assert!((log_log_slope(&xs, &ys) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn scaling_requires_span() {
        let (det, mode, tr, win) = setup(0.0, 0.0);
        let cfg = PropagationConfig::new(FockCutoff::new(20).unwrap());
        assert!(exact_vs_perturbative(&det, &mode, &tr, &win, &[0.01, 0.02], &cfg).is_err());
        assert!(exact_vs_perturbative(&det, &mode, &tr, &win, &[0.01, 0.015, 0.02], &cfg).is_err());
    }
}
