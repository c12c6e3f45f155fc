//! Perturbative (λ²) response of a two-level detector coupled to a set of
//! squeezed thermal field modes along a worldline.
//!
//! Conventions: the qubit basis is (|e⟩, |g⟩), the detector starts in
//! diag(p, 1 − p), and each mode contributes f_j(τ) = e^{−iω_j t(τ)} u_j(x(τ))
//! to the field φ(τ) = Σ_j a_j f_j + a_j† f_j*.

pub mod quadrature;
pub mod trajectory;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::sts::{self, Coefficients, ModeSpec, Moments};

pub use trajectory::{SampledTrajectory, Trajectory};

pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_SUBDIVISIONS: usize = 4000;
pub const VALIDITY_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSpec {
    /// Energy gap Ω.
    pub gap: f64,
    /// Initial excited-state population.
    pub p: f64,
    /// Coupling λ.
    pub coupling: f64,
}

impl DetectorSpec {
    pub fn new(gap: f64, p: f64, coupling: f64) -> Result<Self> {
        let d = Self { gap, p, coupling };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gap > 0.0) || !self.gap.is_finite() {
            return Err(invalid(format!("detector gap must be positive, got {}", self.gap)));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(invalid(format!("excited population must lie in (0, 1), got {}", self.p)));
        }
        if !(self.coupling >= 0.0) || !self.coupling.is_finite() {
            return Err(invalid(format!("coupling must be ≥ 0, got {}", self.coupling)));
        }
        Ok(())
    }

    pub fn with_coupling(&self, coupling: f64) -> Self {
        Self { coupling, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionWindow {
    /// Proper-time duration s; the window is [0, s].
    pub s: f64,
    pub quadrature_tol: f64,
    pub max_subdivisions: usize,
}

impl InteractionWindow {
    pub fn new(s: f64) -> Result<Self> {
        Self::with_tol(s, DEFAULT_QUADRATURE_TOL)
    }

    pub fn with_tol(s: f64, quadrature_tol: f64) -> Result<Self> {
        let w = Self {
            s,
            quadrature_tol,
            max_subdivisions: DEFAULT_MAX_SUBDIVISIONS,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0) || !self.s.is_finite() {
            return Err(invalid(format!("interaction window must be positive, got {}", self.s)));
        }
        if !(self.quadrature_tol > 0.0) {
            return Err(invalid("quadrature tolerance must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(invalid("max_subdivisions must be positive"));
        }
        Ok(())
    }
}

/// A mode together with its second moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldMode {
    pub spec: ModeSpec,
    pub moments: Moments,
}

impl FieldMode {
    pub fn new(spec: ModeSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            spec,
            moments: sts::sts_moments(&spec),
        })
    }
}

pub fn field_modes(specs: &[ModeSpec]) -> Result<Vec<FieldMode>> {
    specs.iter().map(|m| FieldMode::new(*m)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeResponse {
    pub iplus: Complex64,
    pub iminus: Complex64,
    pub err_plus: f64,
    pub err_minus: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseIntegrals {
    pub modes: Vec<ModeResponse>,
}

/// u(x) = e^{ikx}/√(2ωL).
pub fn mode_function(mode: &ModeSpec, x: f64) -> Complex64 {
    Complex64::from_polar(mode_amplitude(mode), mode.k * x)
}

fn mode_amplitude(mode: &ModeSpec) -> f64 {
    1.0 / (2.0 * mode.omega * mode.length).sqrt()
}

/// I± = ∫₀^s e^{i(±Ωτ + ωt(τ))} u*(x(τ)) dτ by adaptive quadrature.
pub fn mode_response(traj: &Trajectory, mode: &ModeSpec, det: &DetectorSpec, win: &InteractionWindow) -> Result<ModeResponse> {
    let amp = mode_amplitude(mode);
    let (t_rate, x_rate) = traj.max_rates(win.s);
    let rate = det.gap + mode.omega * t_rate + mode.k.abs() * x_rate;
    let panels = ((rate * win.s / std::f64::consts::PI).ceil() as usize).max(1);
    let one = |sign: f64| {
        integrate_phase(traj, win, panels, |tau, t, x| {
            sign * det.gap * tau + mode.omega * t - mode.k * x
        })
        .map(|r| (r.value * amp, r.error * amp))
    };
    let (iplus, err_plus) = one(1.0)?;
    let (iminus, err_minus) = one(-1.0)?;
    Ok(ModeResponse {
        iplus,
        iminus,
        err_plus,
        err_minus,
    })
}

fn integrate_phase(
    traj: &Trajectory,
    win: &InteractionWindow,
    panels: usize,
    phase: impl Fn(f64, f64, f64) -> f64,
) -> Result<quadrature::QuadratureResult> {
    quadrature::integrate(
        |tau| {
            let (t, x) = traj.eval(tau)?;
            Ok(Complex64::from_polar(1.0, phase(tau, t, x)))
        },
        0.0,
        win.s,
        win.quadrature_tol,
        win.max_subdivisions,
        panels,
    )
}

pub fn response_integrals(
    traj: &Trajectory,
    modes: &[ModeSpec],
    det: &DetectorSpec,
    win: &InteractionWindow,
) -> Result<ResponseIntegrals> {
    traj.validate()?;
    win.validate()?;
    let modes = modes
        .iter()
        .map(|m| mode_response(traj, m, det, win))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResponseIntegrals { modes })
}

/// Closed form of I± for a static detector at (x₀, t₀):
/// u*(x₀) e^{iωt₀} (e^{iνs} − 1)/(iν) with ν = ω ± Ω.
pub fn static_response_closed_form(mode: &ModeSpec, gap: f64, x0: f64, t0: f64, s: f64) -> (Complex64, Complex64) {
    let pref = mode_function(mode, x0).conj() * Complex64::from_polar(1.0, mode.omega * t0);
    let window = |nu: f64| {
        if nu == 0.0 {
            Complex64::new(s, 0.0)
        } else {
            (Complex64::from_polar(1.0, nu * s) - 1.0) / Complex64::new(0.0, nu)
        }
    };
    (pref * window(mode.omega + gap), pref * window(mode.omega - gap))
}

fn check_aligned(modes: &[FieldMode], r: &ResponseIntegrals) -> Result<()> {
    if modes.len() != r.modes.len() {
        return Err(Error::DimensionMismatch {
            expected: modes.len(),
            found: r.modes.len(),
        });
    }
    Ok(())
}

/// Per-mode bracket of δp without the λ² prefactor.
pub fn delta_p_mode(p: f64, m: &Moments, r: &ModeResponse) -> f64 {
    let ip2 = r.iplus.norm_sqr();
    let im2 = r.iminus.norm_sqr();
    ((1.0 - p) * m.aad - p * m.ada) * ip2
        + ((1.0 - p) * m.ada - p * m.aad) * im2
        + 2.0 * (1.0 - 2.0 * p) * (m.adag_sq() * r.iplus * r.iminus).re
}

/// Excited-population change δp; the detector correction is diag(δp, −δp).
pub fn delta_p(det: &DetectorSpec, modes: &[FieldMode], r: &ResponseIntegrals) -> Result<f64> {
    check_aligned(modes, r)?;
    let sum: f64 = modes
        .iter()
        .zip(&r.modes)
        .map(|(m, resp)| delta_p_mode(det.p, &m.moments, resp))
        .sum();
    Ok(det.coupling.powi(2) * sum)
}

/// ΔS = −ln((1−p)/p)·δp.
pub fn entropy_change_perturbative(delta_p: f64, p: f64) -> f64 {
    -((1.0 - p) / p).ln() * delta_p
}

/// Re(e^{−iθ} I₊ I₋).
fn cross_term(theta: f64, r: &ModeResponse) -> f64 {
    (Complex64::from_polar(1.0, -theta) * r.iplus * r.iminus).re
}

/// ΔH_eff of one mode, without the λ² prefactor.
pub fn field_heat_mode(p: f64, mode: &ModeSpec, r: &ModeResponse) -> f64 {
    let nbar = mode.nbar();
    let sh2 = mode.r.sinh().powi(2);
    let w_minus = (1.0 - p) * (sh2 - nbar) + p * (nbar + 1.0 + sh2);
    let w_plus = (1.0 - p) * (nbar + 1.0 + sh2) + p * (sh2 - nbar);
    mode.omega * (w_minus * r.iminus.norm_sqr() + w_plus * r.iplus.norm_sqr() - (2.0 * mode.r).sinh() * cross_term(mode.theta, r))
}

/// ΔH_eff = Σ_j ΔH_eff,j.
pub fn field_heat_perturbative(det: &DetectorSpec, modes: &[FieldMode], r: &ResponseIntegrals) -> Result<f64> {
    check_aligned(modes, r)?;
    let sum: f64 = modes
        .iter()
        .zip(&r.modes)
        .map(|(m, resp)| field_heat_mode(det.p, &m.spec, resp))
        .sum();
    Ok(det.coupling.powi(2) * sum)
}

/// Σ_j β_j ΔH_eff,j: the heat term with each mode at its own temperature.
pub fn heat_term(det: &DetectorSpec, modes: &[FieldMode], r: &ResponseIntegrals) -> Result<f64> {
    check_aligned(modes, r)?;
    let sum: f64 = modes
        .iter()
        .zip(&r.modes)
        .map(|(m, resp)| m.spec.beta * field_heat_mode(det.p, &m.spec, resp))
        .sum();
    Ok(det.coupling.powi(2) * sum)
}

/// Per-mode entropy production without λ², using the completed square
/// A|I₋ − (C/2A) I₊* e^{iθ}|² + (B − C²/4A)|I₊|², or the unregrouped form
/// A|I₋|² + B|I₊|² − C Re(e^{−iθ}I₊I₋) when A vanishes.
pub fn entropy_production_mode(c: &Coefficients, theta: f64, r: &ModeResponse) -> f64 {
    let scale = c.a.abs() + c.b.abs() + c.c.abs();
    if c.a.abs() <= 1e-14 * scale || c.a == 0.0 {
        return entropy_production_unregrouped(c, theta, r);
    }
    let shifted = r.iminus - r.iplus.conj() * Complex64::from_polar(c.c / (2.0 * c.a), theta);
    c.a * shifted.norm_sqr() + (c.b - c.c * c.c / (4.0 * c.a)) * r.iplus.norm_sqr()
}

pub fn entropy_production_unregrouped(c: &Coefficients, theta: f64, r: &ModeResponse) -> f64 {
    c.a * r.iminus.norm_sqr() + c.b * r.iplus.norm_sqr() - c.c * cross_term(theta, r)
}

pub fn mode_coefficients(det: &DetectorSpec, modes: &[FieldMode]) -> Result<Vec<Coefficients>> {
    modes.iter().map(|m| Coefficients::for_mode(&m.spec, det.p)).collect()
}

/// σ = λ² Σ_j σ_j.
pub fn entropy_production(det: &DetectorSpec, modes: &[FieldMode], r: &ResponseIntegrals) -> Result<f64> {
    check_aligned(modes, r)?;
    let coeffs = mode_coefficients(det, modes)?;
    let sum: f64 = modes
        .iter()
        .zip(&coeffs)
        .zip(&r.modes)
        .map(|((m, c), resp)| entropy_production_mode(c, m.spec.theta, resp))
        .sum();
    Ok(det.coupling.powi(2) * sum)
}

/// Perturbative-validity diagnostics. Both measures should stay below
/// [`VALIDITY_THRESHOLD`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validity {
    /// λ² Σ_j (|I₊|² + |I₋|²)(⟨a a†⟩ + |⟨a²⟩|).
    pub coupling_measure: f64,
    /// |δp| / min(p, 1 − p).
    pub population_ratio: f64,
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        self.coupling_measure < VALIDITY_THRESHOLD && self.population_ratio <= VALIDITY_THRESHOLD
    }
}

pub fn validity(det: &DetectorSpec, modes: &[FieldMode], r: &ResponseIntegrals, delta_p: f64) -> Validity {
    let coupling_measure = det.coupling.powi(2)
        * modes
            .iter()
            .zip(&r.modes)
            .map(|(m, resp)| (resp.iplus.norm_sqr() + resp.iminus.norm_sqr()) * (m.moments.aad + m.moments.aa.norm()))
            .sum::<f64>();
    Validity {
        coupling_measure,
        population_ratio: delta_p.abs() / det.p.min(1.0 - det.p),
    }
}

/// Complete λ² evaluation of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub responses: ResponseIntegrals,
    pub coefficients: Vec<Coefficients>,
    pub delta_p: f64,
    pub entropy_change: f64,
    /// ΔH_eff.
    pub field_heat: f64,
    /// Σ_j β_j ΔH_eff,j.
    pub heat: f64,
    /// Completed-square form.
    pub sigma: f64,
    /// heat − ΔS.
    pub sigma_dual: f64,
    /// |sigma − sigma_dual| / max(|heat|, |ΔS|, |sigma|).
    pub dual_relative: f64,
    pub validity: Validity,
}

pub fn evaluate(det: &DetectorSpec, specs: &[ModeSpec], traj: &Trajectory, win: &InteractionWindow) -> Result<Evaluation> {
    det.validate()?;
    if specs.is_empty() {
        return Err(invalid("at least one field mode is required"));
    }
    let modes = field_modes(specs)?;
    let responses = response_integrals(traj, specs, det, win)?;
    evaluate_with(det, &modes, responses)
}

pub fn evaluate_with(det: &DetectorSpec, modes: &[FieldMode], responses: ResponseIntegrals) -> Result<Evaluation> {
    let dp = delta_p(det, modes, &responses)?;
    let entropy_change = entropy_change_perturbative(dp, det.p);
    let field_heat = field_heat_perturbative(det, modes, &responses)?;
    let heat = heat_term(det, modes, &responses)?;
    let sigma = entropy_production(det, modes, &responses)?;
    let sigma_dual = heat - entropy_change;
    let scale = heat.abs().max(entropy_change.abs()).max(sigma.abs());
    let dual_relative = if scale == 0.0 {
        0.0
    } else {
        (sigma - sigma_dual).abs() / scale
    };
    Ok(Evaluation {
        coefficients: mode_coefficients(det, modes)?,
        validity: validity(det, modes, &responses, dp),
        responses,
        delta_p: dp,
        entropy_change,
        field_heat,
        heat,
        sigma,
        sigma_dual,
        dual_relative,
    })
}

/// δp from the double integral over the window of
/// [(1−p)e^{−iΩΔτ} − p e^{iΩΔτ}]⟨φ(τ₁)φ(τ₂)⟩, with the two-point function
/// assembled term by term and a composite Gauss–Legendre tensor rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForce {
    pub value: f64,
    /// Change against the previous refinement level.
    pub change: f64,
    /// Imaginary part of the final double sum; zero up to round-off.
    pub imag: f64,
    pub nodes: usize,
}

const BRUTE_ORDER: usize = 16;
const BRUTE_MAX_DOUBLINGS: usize = 5;

pub fn delta_p_bruteforce(
    det: &DetectorSpec,
    modes: &[FieldMode],
    traj: &Trajectory,
    win: &InteractionWindow,
) -> Result<BruteForce> {
    det.validate()?;
    traj.validate()?;
    win.validate()?;
    let (t_rate, x_rate) = traj.max_rates(win.s);
    let rate = modes
        .iter()
        .map(|m| det.gap + m.spec.omega * t_rate + m.spec.k.abs() * x_rate)
        .fold(det.gap, f64::max);
    let mut panels = ((rate * win.s / 2.0).ceil() as usize).max(1) + 2;
    let scale: f64 = det.coupling.powi(2)
        * win.s.powi(2)
        * modes
            .iter()
            .map(|m| (m.moments.aad + m.moments.ada + 2.0 * m.moments.aa.norm()) * mode_amplitude(&m.spec).powi(2))
            .sum::<f64>();

    let mut prev = double_sum(det, modes, traj, win, panels)?;
    for _ in 0..BRUTE_MAX_DOUBLINGS {
        panels *= 2;
        let next = double_sum(det, modes, traj, win, panels)?;
        let change = (next.0.re - prev.0.re).abs();
        if change <= 1e-13 * scale + 1e-11 * next.0.re.abs() {
            return Ok(BruteForce {
                value: next.0.re,
                change,
                imag: next.0.im,
                nodes: next.1,
            });
        }
        prev = next;
    }
    Err(Error::QuadratureNonConvergence {
        error: (prev.0.re).abs(),
        tol: 1e-13 * scale,
        subdivisions: panels,
    })
}

fn double_sum(
    det: &DetectorSpec,
    modes: &[FieldMode],
    traj: &Trajectory,
    win: &InteractionWindow,
    panels: usize,
) -> Result<(Complex64, usize)> {
    let (nodes, weights) = quadrature::composite_gauss_legendre(0.0, win.s, panels, BRUTE_ORDER);
    let n = nodes.len();
    // f_j(τ_i) = e^{−iω_j t_i} u_j(x_i)
    let mut f = vec![vec![Complex64::new(0.0, 0.0); n]; modes.len()];
    for (i, &tau) in nodes.iter().enumerate() {
        let (t, x) = traj.eval(tau)?;
        for (j, m) in modes.iter().enumerate() {
            f[j][i] = Complex64::from_polar(1.0, -m.spec.omega * t) * mode_function(&m.spec, x);
        }
    }
    let p = det.p;
    let mut acc = Complex64::new(0.0, 0.0);
    for i1 in 0..n {
        let mut row = Complex64::new(0.0, 0.0);
        for i2 in 0..n {
            let dtau = nodes[i1] - nodes[i2];
            let kernel = Complex64::from_polar(1.0 - p, -det.gap * dtau) - Complex64::from_polar(p, det.gap * dtau);
            let mut w = Complex64::new(0.0, 0.0);
            for (j, m) in modes.iter().enumerate() {
                let (f1, f2) = (f[j][i1], f[j][i2]);
                let anomalous = m.moments.adag_sq() * f1.conj() * f2.conj();
                w += m.moments.aad * f1 * f2.conj() + m.moments.ada * f1.conj() * f2 + 2.0 * anomalous.re;
            }
            row += kernel * w * weights[i2];
        }
        acc += row * weights[i1];
    }
    Ok((acc * det.coupling.powi(2), n))
}
