//! Squeezed-thermal-state moments and the entropy-production coefficients.
//!
//! Per mode, the λ² entropy production is the quadratic form
//! `A|I₋|² + B|I₊|² − C Re(e^{−iθ} I₊ I₋)`. `A` and `B` are the unsqueezed
//! (canonical thermal) coefficients shifted by `sinh²r·(A_min + B_min)`, and
//! `C = sinh(2r)·(A_min + B_min)`. Their discriminant is the identity
//! `4AB − C² = 4·A_min·B_min`, which makes the form positive semidefinite.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::linalg::{self, cr, CMatrix};
use crate::quantum::fock::{ladder_operators, FockCutoff};

/// Mode-function normalization convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Plane waves on a periodic box of length L: u(x) = e^{ikx}/√(2ωL).
    #[default]
    BoxPeriodic,
}

/// One field mode prepared in a squeezed thermal state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    /// Angular frequency ω.
    pub omega: f64,
    /// Wavenumber k.
    pub k: f64,
    /// Squeezing strength r ≥ 0.
    pub r: f64,
    /// Squeezing phase θ (radians).
    pub theta: f64,
    /// Inverse temperature of the thermal state before squeezing.
    pub beta: f64,
    /// Quantization length L.
    pub length: f64,
    pub normalization: Normalization,
}

impl ModeSpec {
    pub fn new(omega: f64, k: f64, length: f64, beta: f64, r: f64, theta: f64) -> Result<Self> {
        let mode = Self {
            omega,
            k,
            r,
            theta,
            beta,
            length,
            normalization: Normalization::BoxPeriodic,
        };
        mode.validate()?;
        Ok(mode)
    }

    /// The j-th right-moving box mode: k = 2πj/L, ω = |k|.
    pub fn box_mode(j: i64, length: f64, beta: f64, r: f64, theta: f64) -> Result<Self> {
        if j == 0 {
            return Err(invalid("box mode index must be nonzero (ω = 0 mode excluded)"));
        }
        let k = TAU * j as f64 / length;
        Self::new(k.abs(), k, length, beta, r, theta)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(invalid(format!("mode frequency must be positive, got {}", self.omega)));
        }
        if !self.k.is_finite() {
            return Err(invalid("wavenumber must be finite"));
        }
        if !(self.r >= 0.0) || !self.r.is_finite() {
            return Err(invalid(format!("squeezing strength must be ≥ 0, got {}", self.r)));
        }
        if !self.theta.is_finite() {
            return Err(invalid("squeezing phase must be finite"));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(invalid(format!("β must be positive, got {}", self.beta)));
        }
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(invalid(format!("quantization length must be positive, got {}", self.length)));
        }
        Ok(())
    }

    /// Thermal occupation before squeezing.
    pub fn nbar(&self) -> f64 {
        bose_einstein(self.beta, self.omega).unwrap_or(0.0)
    }

    pub fn xi(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }
}

/// ⟨a²⟩, ⟨a†a⟩, ⟨a a†⟩ of a squeezed thermal mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub aa: Complex64,
    pub ada: f64,
    pub aad: f64,
}

impl Moments {
    /// ⟨(a†)²⟩ = ⟨a²⟩*.
    pub fn adag_sq(&self) -> Complex64 {
        self.aa.conj()
    }

    /// |⟨a²⟩| ≤ ⟨a†a⟩ + ½, required of any physical Gaussian state.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.aa.norm() <= self.ada + 0.5 + tol && (self.aad - self.ada - 1.0).abs() <= tol
    }
}

/// Per-mode entropy-production coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub a_min: f64,
    pub b_min: f64,
}

impl Coefficients {
    pub fn for_mode(mode: &ModeSpec, p: f64) -> Result<Self> {
        let (a_min, b_min) = min_coefficients(mode.nbar(), p, mode.beta, mode.omega)?;
        Ok(sts_coefficients(a_min, b_min, mode.r))
    }
}

/// n̄ = 1/(e^{βω} − 1).
pub fn bose_einstein(beta: f64, omega: f64) -> Result<f64> {
    let x = beta * omega;
    if !(x > 0.0) || !x.is_finite() {
        return Err(invalid(format!("Bose–Einstein occupation needs βω > 0, got {x}")));
    }
    Ok(1.0 / x.exp_m1())
}

pub fn sts_moments(mode: &ModeSpec) -> Moments {
    let nbar = mode.nbar();
    let r = mode.r;
    let ada = nbar * (2.0 * r).cosh() + r.sinh().powi(2);
    Moments {
        aa: Complex64::from_polar(-0.5 * (2.0 * nbar + 1.0) * (2.0 * r).sinh(), mode.theta),
        ada,
        aad: ada + 1.0,
    }
}

/// Coefficients of the canonical (unsqueezed) thermal reservoir. Both are
/// non-negative whenever βω = ln((n̄+1)/n̄), i.e. n̄ is the thermal occupation.
pub fn min_coefficients(nbar: f64, p: f64, beta: f64, omega: f64) -> Result<(f64, f64)> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("excited population must lie in (0, 1), got {p}")));
    }
    if !(nbar >= 0.0) {
        return Err(invalid(format!("occupation must be ≥ 0, got {nbar}")));
    }
    let bw = beta * omega;
    let log_ratio = ((1.0 - p) / p).ln();
    let a_min = ((nbar + 1.0) * p - nbar * (1.0 - p)) * (bw - log_ratio);
    let b_min = ((nbar + 1.0) * (1.0 - p) - nbar * p) * (bw + log_ratio);
    Ok((a_min, b_min))
}

pub fn sts_coefficients(a_min: f64, b_min: f64, r: f64) -> Coefficients {
    let sh2 = r.sinh().powi(2);
    let sum = a_min + b_min;
    Coefficients {
        a: sh2 * sum + a_min,
        b: sh2 * sum + b_min,
        c: 2.0 * (sh2 * (1.0 + sh2)).sqrt() * sum,
        a_min,
        b_min,
    }
}

/// 4AB − C² − 4·A_min·B_min; zero up to round-off.
pub fn positivity_certificate(c: &Coefficients) -> f64 {
    4.0 * c.a * c.b - c.c * c.c - 4.0 * c.a_min * c.b_min
}

/// Tolerance on [`positivity_certificate`]: 1e-12·(1 + 4AB).
pub fn certificate_tolerance(c: &Coefficients) -> f64 {
    1e-12 * (1.0 + 4.0 * (c.a * c.b).abs())
}

/// Expanded effective Hamiltonian of one mode,
/// ω[cosh 2r a†a + ½ sinh 2r (e^{iθ}(a†)² + e^{−iθ}a²) + sinh² r],
/// assembled directly on the truncated space.
pub fn effective_hamiltonian_expansion(cutoff: FockCutoff, mode: &ModeSpec) -> CMatrix {
    let (a, ad) = ladder_operators(cutoff);
    let n = cutoff.dim();
    let r = mode.r;
    let number = &ad * &a;
    let pair = (&ad * &ad) * Complex64::from_polar(1.0, mode.theta) + (&a * &a) * Complex64::from_polar(1.0, -mode.theta);
    let h = number * cr((2.0 * r).cosh()) + pair * cr(0.5 * (2.0 * r).sinh()) + linalg::identity(n) * cr(r.sinh().powi(2));
    h * cr(mode.omega)
}
