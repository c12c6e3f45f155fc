//! Detector worldlines τ ↦ (t(τ), x(τ)) in 1+1 dimensions, c = 1.

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Trajectory {
    /// t = τ + t₀, x = x₀.
    Static {
        x0: f64,
        t0: f64,
    },
    /// t = γτ + t₀, x = x₀ + γvτ.
    Inertial {
        x0: f64,
        velocity: f64,
        t0: f64,
    },
    /// Rindler form t = a⁻¹ sinh(aτ) + t₀, x = a⁻¹ cosh(aτ) + x₀.
    UniformlyAccelerated {
        acceleration: f64,
        t0: f64,
        x0: f64,
    },
    Sampled(SampledTrajectory),
}

impl Trajectory {
    pub fn static_at(x0: f64) -> Self {
        Trajectory::Static { x0, t0: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Trajectory::Static { x0, t0 } => finite(&[x0, t0]),
            Trajectory::Inertial { x0, velocity, t0 } => {
                finite(&[x0, velocity, t0])?;
                if velocity.abs() >= 1.0 {
                    return Err(invalid(format!("inertial speed must satisfy |v| < 1, got {velocity}")));
                }
                Ok(())
            }
            Trajectory::UniformlyAccelerated { acceleration, t0, x0 } => {
                finite(&[acceleration, t0, x0])?;
                if !(acceleration > 0.0) {
                    return Err(invalid(format!("acceleration must be positive, got {acceleration}")));
                }
                Ok(())
            }
            Trajectory::Sampled(ref s) => s.validate(),
        }
    }

    /// (t(τ), x(τ)).
    pub fn eval(&self, tau: f64) -> Result<(f64, f64)> {
        match *self {
            Trajectory::Static { x0, t0 } => Ok((tau + t0, x0)),
            Trajectory::Inertial { x0, velocity, t0 } => {
                let gamma = 1.0 / (1.0 - velocity * velocity).sqrt();
                Ok((gamma * tau + t0, x0 + gamma * velocity * tau))
            }
            Trajectory::UniformlyAccelerated { acceleration: a, t0, x0 } => {
                Ok(((a * tau).sinh() / a + t0, (a * tau).cosh() / a + x0))
            }
            Trajectory::Sampled(ref s) => s.eval(tau),
        }
    }

    /// Same worldline with every coordinate time moved by `dt`.
    pub fn shifted(&self, dt: f64) -> Self {
        let mut out = self.clone();
        match out {
            Trajectory::Static { ref mut t0, .. }
            | Trajectory::Inertial { ref mut t0, .. }
            | Trajectory::UniformlyAccelerated { ref mut t0, .. } => *t0 += dt,
            Trajectory::Sampled(ref mut s) => s.shift_time(dt),
        }
        out
    }

    /// Upper bound on |dt/dτ| and |dx/dτ| over [0, s], used to size
    /// quadrature panels.
    pub fn max_rates(&self, s: f64) -> (f64, f64) {
        match *self {
            Trajectory::Static { .. } => (1.0, 0.0),
            Trajectory::Inertial { velocity, .. } => {
                let gamma = 1.0 / (1.0 - velocity * velocity).sqrt();
                (gamma, gamma * velocity.abs())
            }
            Trajectory::UniformlyAccelerated { acceleration: a, .. } => {
                let c = (a * s).cosh();
                (c, (a * s).sinh().abs())
            }
            Trajectory::Sampled(ref sp) => sp.max_rates(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Trajectory::Static { .. } => "static",
            Trajectory::Inertial { .. } => "inertial",
            Trajectory::UniformlyAccelerated { .. } => "uniformly_accelerated",
            Trajectory::Sampled(_) => "sampled",
        }
    }
}

fn finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(invalid("trajectory parameters must be finite"))
    }
}

/// Tabulated worldline with natural cubic-spline interpolation of t and x.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTrajectory {
    tau: Vec<f64>,
    t: Spline,
    x: Spline,
}

impl SampledTrajectory {
    pub fn new(tau: Vec<f64>, t: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        if tau.len() < 2 || tau.len() != t.len() || tau.len() != x.len() {
            return Err(invalid("sampled trajectory needs ≥ 2 rows of equal length"));
        }
        if tau.iter().chain(&t).chain(&x).any(|v| !v.is_finite()) {
            return Err(invalid("sampled trajectory contains non-finite values"));
        }
        if tau.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("sampled proper-time grid must be strictly increasing"));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("sampled coordinate time must be strictly increasing"));
        }
        let ts = Spline::natural(&tau, &t);
        let xs = Spline::natural(&tau, &x);
        Ok(Self { tau, t: ts, x: xs })
    }

    /// Parses whitespace- or comma-separated rows `τ t x`; `#` starts a comment.
    pub fn parse_table(text: &str) -> Result<Self> {
        let (mut tau, mut t, mut x) = (Vec::new(), Vec::new(), Vec::new());
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|f| !f.is_empty())
                .collect();
            if fields.len() != 3 {
                return Err(invalid(format!(
                    "trajectory table line {}: expected 3 columns (τ t x), found {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let mut vals = [0.0; 3];
            for (v, f) in vals.iter_mut().zip(&fields) {
                *v = f
                    .parse()
                    .map_err(|_| invalid(format!("trajectory table line {}: cannot parse {f:?}", lineno + 1)))?;
            }
            tau.push(vals[0]);
            t.push(vals[1]);
            x.push(vals[2]);
        }
        Self::new(tau, t, x)
    }

    /// Samples an analytic trajectory on a uniform grid over [0, s].
    pub fn from_trajectory(traj: &Trajectory, s: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(invalid("need at least two sample points"));
        }
        let mut tau = Vec::with_capacity(points);
        let mut t = Vec::with_capacity(points);
        let mut x = Vec::with_capacity(points);
        for i in 0..points {
            let tv = s * i as f64 / (points - 1) as f64;
            let (a, b) = traj.eval(tv)?;
            tau.push(tv);
            t.push(a);
            x.push(b);
        }
        Self::new(tau, t, x)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("# tau t x\n");
        for i in 0..self.tau.len() {
            out.push_str(&format!("{:e} {:e} {:e}\n", self.tau[i], self.t.y[i], self.x.y[i]));
        }
        out
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.tau[0], *self.tau.last().unwrap())
    }

    fn validate(&self) -> Result<()> {
        Ok(())
    }

    fn eval(&self, tau: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.domain();
        let slack = 1e-12 * (hi - lo).max(1.0);
        if !(tau >= lo - slack && tau <= hi + slack) {
            return Err(Error::OutOfDomain { tau, lo, hi });
        }
        let tau = tau.clamp(lo, hi);
        Ok((self.t.eval(&self.tau, tau), self.x.eval(&self.tau, tau)))
    }

    fn shift_time(&mut self, dt: f64) {
        for v in &mut self.t.y {
            *v += dt;
        }
    }

    fn max_rates(&self) -> (f64, f64) {
        let slope = |y: &[f64]| {
            self.tau
                .windows(2)
                .zip(y.windows(2))
                .map(|(a, b)| ((b[1] - b[0]) / (a[1] - a[0])).abs())
                .fold(0.0_f64, f64::max)
        };
        // Spline overshoot between knots is bounded by a small factor.
        (1.5 * slope(&self.t.y), 1.5 * slope(&self.x.y))
    }
}

/// Natural cubic spline: second derivatives vanish at both ends.
#[derive(Debug, Clone, PartialEq)]
struct Spline {
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Spline {
    fn natural(xs: &[f64], ys: &[f64]) -> Self {
        let n = xs.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm for the interior second derivatives.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            let mut upper = vec![0.0; k];
            for i in 0..k {
                let h0 = xs[i + 1] - xs[i];
                let h1 = xs[i + 2] - xs[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0);
            }
            for i in 1..k {
                let lower = xs[i + 1] - xs[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            let mut sol = vec![0.0; k];
            sol[k - 1] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                sol[i] = (rhs[i] - upper[i] * sol[i + 1]) / diag[i];
            }
            m[1..n - 1].copy_from_slice(&sol);
        }
        Self { y: ys.to_vec(), m }
    }

    fn eval(&self, xs: &[f64], x: f64) -> f64 {
        let n = xs.len();
        let i = match xs.partition_point(|&v| v <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = xs[i + 1] - xs[i];
        let a = (xs[i + 1] - x) / h;
        let b = (x - xs[i]) / h;
        a * self.y[i] + b * self.y[i + 1] + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}
