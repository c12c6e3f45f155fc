//! Scenario files: flat `key = value` lines with dotted key paths such as
//! `detector.gap` or `modes[0].r`. Blank lines and `#` comments are ignored;
//! list values are comma separated.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use landauer_core::detector::{
    DetectorSpec, InteractionWindow, SampledTrajectory, Trajectory, DEFAULT_MAX_SUBDIVISIONS, DEFAULT_QUADRATURE_TOL,
};
use landauer_core::oracle::{self, PropagationConfig, Scheme};
use landauer_core::sts::ModeSpec;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    pub gap: f64,
    pub p: f64,
    pub coupling: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeConfig {
    pub omega: f64,
    pub k: f64,
    pub length: f64,
    pub beta: f64,
    pub r: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryConfig {
    Static { x0: f64, t0: f64 },
    Inertial { x0: f64, velocity: f64, t0: f64 },
    Accelerated { acceleration: f64, x0: f64, t0: f64 },
    Sampled { table: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowConfig {
    pub s: f64,
    pub quadrature_tol: f64,
    pub max_subdivisions: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub lambdas: Vec<f64>,
    pub step_tol: f64,
    /// Trace-deficit tolerance for the automatic cutoff.
    pub cutoff_tol: f64,
    pub scheme: Scheme,
    pub steps: usize,
    pub max_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub detector: DetectorConfig,
    pub modes: Vec<ModeConfig>,
    pub trajectory: TrajectoryConfig,
    pub window: WindowConfig,
    pub oracle: Option<OracleConfig>,
    pub sweep: Option<SweepConfig>,
}

pub type KeyMap = BTreeMap<String, String>;

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Splits the text into key/value pairs, rejecting duplicates.
pub fn parse_pairs(text: &str) -> CliResult<KeyMap> {
    let mut map = KeyMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(format!("line {}: expected `key = value`", n + 1)))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(config_err(format!("line {}: empty key", n + 1)));
        }
        if map.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(config_err(format!("line {}: duplicate key `{key}`", n + 1)));
        }
    }
    Ok(map)
}

struct Reader {
    map: KeyMap,
}

impl Reader {
    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn string(&mut self, key: &str) -> CliResult<String> {
        self.take(key).ok_or_else(|| config_err(format!("missing key `{key}`")))
    }

    fn f64_or(&mut self, key: &str, default: Option<f64>) -> CliResult<f64> {
        match self.take(key) {
            Some(v) => parse_f64(key, &v),
            None => default.ok_or_else(|| config_err(format!("missing key `{key}`"))),
        }
    }

    fn f64(&mut self, key: &str) -> CliResult<f64> {
        self.f64_or(key, None)
    }

    fn usize_or(&mut self, key: &str, default: usize) -> CliResult<usize> {
        match self.take(key) {
            Some(v) => v
                .parse()
                .map_err(|_| config_err(format!("`{key}`: expected a non-negative integer, got `{v}`"))),
            None => Ok(default),
        }
    }

    fn list(&mut self, key: &str) -> CliResult<Vec<f64>> {
        let v = self.string(key)?;
        let values = v
            .split(',')
            .map(|x| parse_f64(key, x.trim()))
            .collect::<CliResult<Vec<f64>>>()?;
        if values.is_empty() {
            return Err(config_err(format!("`{key}`: empty list")));
        }
        Ok(values)
    }

    fn has_prefix(&self, prefix: &str) -> bool {
        self.map.keys().any(|k| k.starts_with(prefix))
    }
}

fn parse_f64(key: &str, v: &str) -> CliResult<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| config_err(format!("`{key}`: expected a number, got `{v}`")))?;
    if !x.is_finite() {
        return Err(config_err(format!("`{key}`: value must be finite")));
    }
    Ok(x)
}

fn fmt_list(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

fn scheme_name(s: Scheme) -> &'static str {
    match s {
        Scheme::Midpoint => "midpoint",
        Scheme::Magnus4 => "magnus4",
    }
}

impl Scenario {
    pub fn parse(text: &str) -> CliResult<Self> {
        let s = Self::from_map(parse_pairs(text)?)?;
        s.validate()?;
        Ok(s)
    }

    /// Reads a scenario file; a relative trajectory table path is taken
    /// relative to the file's directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let mut s = Self::parse(&text)?;
        if let TrajectoryConfig::Sampled { table } = &mut s.trajectory {
            if table.is_relative() {
                if let Some(dir) = path.parent() {
                    *table = dir.join(&*table);
                }
            }
        }
        Ok(s)
    }

    pub fn from_map(map: KeyMap) -> CliResult<Self> {
        let mut r = Reader { map };
        let name = r.string("name")?;
        let seed = r.usize_or("seed", 0)? as u64;
        let detector = DetectorConfig {
            gap: r.f64("detector.gap")?,
            p: r.f64("detector.p")?,
            coupling: r.f64("detector.coupling")?,
        };

        let mut modes = Vec::new();
        while r.has_prefix(&format!("modes[{}].", modes.len())) {
            let pre = format!("modes[{}]", modes.len());
            let omega = r.f64(&format!("{pre}.omega"))?;
            modes.push(ModeConfig {
                omega,
                k: r.f64_or(&format!("{pre}.k"), Some(omega))?,
                length: r.f64(&format!("{pre}.length"))?,
                beta: r.f64(&format!("{pre}.beta"))?,
                r: r.f64_or(&format!("{pre}.r"), Some(0.0))?,
                theta: r.f64_or(&format!("{pre}.theta"), Some(0.0))?,
            });
        }
        if modes.is_empty() {
            return Err(config_err("no modes configured (expected `modes[0].omega` …)"));
        }

        let kind = r.string("trajectory.kind")?;
        let trajectory = match kind.as_str() {
            "static" => TrajectoryConfig::Static {
                x0: r.f64_or("trajectory.x0", Some(0.0))?,
                t0: r.f64_or("trajectory.t0", Some(0.0))?,
            },
            "inertial" => TrajectoryConfig::Inertial {
                x0: r.f64_or("trajectory.x0", Some(0.0))?,
                velocity: r.f64("trajectory.velocity")?,
                t0: r.f64_or("trajectory.t0", Some(0.0))?,
            },
            "accelerated" => TrajectoryConfig::Accelerated {
                acceleration: r.f64("trajectory.acceleration")?,
                x0: r.f64_or("trajectory.x0", Some(0.0))?,
                t0: r.f64_or("trajectory.t0", Some(0.0))?,
            },
            "sampled" => TrajectoryConfig::Sampled {
                table: PathBuf::from(r.string("trajectory.table")?),
            },
            other => return Err(config_err(format!("unknown trajectory kind `{other}`"))),
        };

        let window = WindowConfig {
            s: r.f64("window.s")?,
            quadrature_tol: r.f64_or("window.quadrature_tol", Some(DEFAULT_QUADRATURE_TOL))?,
            max_subdivisions: r.usize_or("window.max_subdivisions", DEFAULT_MAX_SUBDIVISIONS)?,
        };

        let oracle = if r.has_prefix("oracle.") {
            let scheme = match r.take("oracle.scheme").as_deref() {
                None | Some("magnus4") => Scheme::Magnus4,
                Some("midpoint") => Scheme::Midpoint,
                Some(other) => return Err(config_err(format!("unknown oracle scheme `{other}`"))),
            };
            Some(OracleConfig {
                lambdas: r.list("oracle.lambdas")?,
                step_tol: r.f64_or("oracle.step_tol", Some(oracle::DEFAULT_STEP_TOL))?,
                cutoff_tol: r.f64_or("oracle.cutoff_tol", Some(1e-10))?,
                scheme,
                steps: r.usize_or("oracle.steps", 64)?,
                max_steps: r.usize_or("oracle.max_steps", 1 << 16)?,
            })
        } else {
            None
        };

        let sweep = if r.has_prefix("sweep.") {
            Some(SweepConfig {
                parameter: r.string("sweep.parameter")?,
                values: r.list("sweep.values")?,
            })
        } else {
            None
        };

        if let Some(key) = r.map.keys().next() {
            return Err(config_err(format!("unknown key `{key}`")));
        }
        Ok(Self {
            name,
            seed,
            detector,
            modes,
            trajectory,
            window,
            oracle,
            sweep,
        })
    }

    /// Every field as a dotted key, defaults included.
    pub fn to_map(&self) -> KeyMap {
        let mut m = KeyMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("name", self.name.clone());
        put("seed", self.seed.to_string());
        put("detector.gap", self.detector.gap.to_string());
        put("detector.p", self.detector.p.to_string());
        put("detector.coupling", self.detector.coupling.to_string());
        for (i, md) in self.modes.iter().enumerate() {
            put(&format!("modes[{i}].omega"), md.omega.to_string());
            put(&format!("modes[{i}].k"), md.k.to_string());
            put(&format!("modes[{i}].length"), md.length.to_string());
            put(&format!("modes[{i}].beta"), md.beta.to_string());
            put(&format!("modes[{i}].r"), md.r.to_string());
            put(&format!("modes[{i}].theta"), md.theta.to_string());
        }
        match &self.trajectory {
            TrajectoryConfig::Static { x0, t0 } => {
                put("trajectory.kind", "static".into());
                put("trajectory.x0", x0.to_string());
                put("trajectory.t0", t0.to_string());
            }
            TrajectoryConfig::Inertial { x0, velocity, t0 } => {
                put("trajectory.kind", "inertial".into());
                put("trajectory.x0", x0.to_string());
                put("trajectory.velocity", velocity.to_string());
                put("trajectory.t0", t0.to_string());
            }
            TrajectoryConfig::Accelerated { acceleration, x0, t0 } => {
                put("trajectory.kind", "accelerated".into());
                put("trajectory.acceleration", acceleration.to_string());
                put("trajectory.x0", x0.to_string());
                put("trajectory.t0", t0.to_string());
            }
            TrajectoryConfig::Sampled { table } => {
                put("trajectory.kind", "sampled".into());
                put("trajectory.table", table.display().to_string());
            }
        }
        put("window.s", self.window.s.to_string());
        put("window.quadrature_tol", self.window.quadrature_tol.to_string());
        put("window.max_subdivisions", self.window.max_subdivisions.to_string());
        if let Some(o) = &self.oracle {
            put("oracle.lambdas", fmt_list(&o.lambdas));
            put("oracle.step_tol", o.step_tol.to_string());
            put("oracle.cutoff_tol", o.cutoff_tol.to_string());
            put("oracle.scheme", scheme_name(o.scheme).into());
            put("oracle.steps", o.steps.to_string());
            put("oracle.max_steps", o.max_steps.to_string());
        }
        if let Some(sw) = &self.sweep {
            put("sweep.parameter", sw.parameter.clone());
            put("sweep.values", fmt_list(&sw.values));
        }
        m
    }

    /// Canonical text form, grouped by section.
    pub fn emit(&self) -> String {
        let map = self.to_map();
        let mut out = String::new();
        let mut last_section = String::new();
        let order = |k: &str| -> usize {
            match k.split(['.', '[']).next().unwrap_or("") {
                "name" => 0,
                "seed" => 1,
                "detector" => 2,
                "modes" => 3,
                "trajectory" => 4,
                "window" => 5,
                "oracle" => 6,
                _ => 7,
            }
        };
        let mut keys: Vec<&String> = map.keys().collect();
        keys.sort_by_key(|k| (order(k), mode_index(k), (*k).clone()));
        for k in keys {
            let section = k.split('.').next().unwrap_or("").to_string();
            if section != last_section && k.contains('.') && !out.is_empty() {
                out.push('\n');
            }
            last_section = section;
            let _ = writeln!(out, "{k} = {}", map[k]);
        }
        out
    }

    /// Copy with one numeric parameter replaced.
    pub fn with_parameter(&self, path: &str, value: f64) -> CliResult<Self> {
        let mut map = self.to_map();
        match map.get(path) {
            Some(old) if old.parse::<f64>().is_ok() && !path.starts_with("sweep.") => {}
            Some(_) => return Err(config_err(format!("sweep parameter `{path}` is not numeric"))),
            None => return Err(config_err(format!("sweep parameter `{path}` does not exist"))),
        }
        map.insert(path.to_string(), value.to_string());
        map.remove("sweep.parameter");
        map.remove("sweep.values");
        let s = Self::from_map(map)?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.detector_spec()?;
        self.mode_specs()?;
        self.window()?;
        if !matches!(self.trajectory, TrajectoryConfig::Sampled { .. }) {
            self.trajectory()?;
        }
        if let Some(o) = &self.oracle {
            if self.modes.len() != 1 {
                return Err(config_err("the oracle comparison needs exactly one mode"));
            }
            if o.steps < oracle::MIN_STEPS {
                return Err(config_err(format!("`oracle.steps` must be ≥ {}", oracle::MIN_STEPS)));
            }
            if !(o.step_tol > 0.0 && o.cutoff_tol > 0.0) {
                return Err(config_err("oracle tolerances must be positive"));
            }
        }
        if let Some(sw) = &self.sweep {
            let map = self.to_map();
            match map.get(&sw.parameter) {
                Some(v) if v.parse::<f64>().is_ok() && !sw.parameter.starts_with("sweep.") => {}
                Some(_) => return Err(config_err(format!("sweep parameter `{}` is not numeric", sw.parameter))),
                None => return Err(config_err(format!("sweep parameter `{}` does not exist", sw.parameter))),
            }
        }
        Ok(())
    }

    pub fn detector_spec(&self) -> CliResult<DetectorSpec> {
        Ok(DetectorSpec::new(self.detector.gap, self.detector.p, self.detector.coupling)?)
    }

    pub fn mode_specs(&self) -> CliResult<Vec<ModeSpec>> {
        self.modes
            .iter()
            .map(|m| Ok(ModeSpec::new(m.omega, m.k, m.length, m.beta, m.r, m.theta)?))
            .collect()
    }

    pub fn window(&self) -> CliResult<InteractionWindow> {
        let w = InteractionWindow {
            s: self.window.s,
            quadrature_tol: self.window.quadrature_tol,
            max_subdivisions: self.window.max_subdivisions,
        };
        w.validate()?;
        Ok(w)
    }

    /// Builds the worldline, reading the table of a sampled trajectory.
    pub fn trajectory(&self) -> CliResult<Trajectory> {
        let t = match &self.trajectory {
            TrajectoryConfig::Static { x0, t0 } => Trajectory::Static { x0: *x0, t0: *t0 },
            TrajectoryConfig::Inertial { x0, velocity, t0 } => Trajectory::Inertial {
                x0: *x0,
                velocity: *velocity,
                t0: *t0,
            },
            TrajectoryConfig::Accelerated { acceleration, x0, t0 } => Trajectory::UniformlyAccelerated {
                acceleration: *acceleration,
                t0: *t0,
                x0: *x0,
            },
            TrajectoryConfig::Sampled { table } => {
                let text = std::fs::read_to_string(table).map_err(|e| config_err(format!("{}: {e}", table.display())))?;
                Trajectory::Sampled(SampledTrajectory::parse_table(&text)?)
            }
        };
        t.validate()?;
        Ok(t)
    }

    pub fn propagation(&self, mode: &ModeSpec) -> CliResult<PropagationConfig> {
        let o = self.oracle.as_ref().ok_or_else(|| config_err("no oracle block"))?;
        let mut cfg = PropagationConfig::new(oracle::oracle_cutoff(mode, o.cutoff_tol)?);
        cfg.step_tol = o.step_tol;
        cfg.scheme = o.scheme;
        cfg.steps = o.steps;
        cfg.max_steps = o.max_steps;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn mode_index(key: &str) -> usize {
    key.strip_prefix("modes[")
        .and_then(|rest| rest.split(']').next())
        .and_then(|i| i.parse().ok())
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
        name = t
        detector.gap = 1
        detector.p = 0.3
        detector.coupling = 0.05
        modes[0].omega = 1
        modes[0].length = 6.5
        modes[0].beta = 2
        trajectory.kind = static
        window.s = 3
    ";

    #[test]
    fn defaults_fill_optional_keys() {
        let s = Scenario::parse(MINIMAL).unwrap();
        assert_eq!(s.modes[0].k, 1.0);
        assert_eq!(s.modes[0].r, 0.0);
        assert_eq!(s.window.quadrature_tol, DEFAULT_QUADRATURE_TOL);
        assert_eq!(s.trajectory, TrajectoryConfig::Static { x0: 0.0, t0: 0.0 });
        assert!(s.oracle.is_none() && s.sweep.is_none());
    }

    #[test]
    fn emit_then_parse_is_identity() {
        let mut s = Scenario::parse(MINIMAL).unwrap();
        s.modes.push(ModeConfig {
            omega: 0.1 + 0.2,
            k: -0.3,
            length: 7.0,
            beta: 1.0 / 3.0,
            r: 0.5,
            theta: 1e-17,
        });
        s.sweep = Some(SweepConfig {
            parameter: "modes[1].r".into(),
            values: vec![0.0, 0.25],
        });
        assert_eq!(Scenario::parse(&s.emit()).unwrap(), s);
    }

    #[test]
    fn rejects_bad_input() {
        for (text, needle) in [
            (format!("{MINIMAL}\nfoo.bar = 1"), "unknown key"),
            (format!("{MINIMAL}\nname = again"), "duplicate"),
            (MINIMAL.replace("detector.p = 0.3", "detector.p = 1.3"), "invalid parameter"),
            (MINIMAL.replace("window.s = 3", "window.s = x"), "expected a number"),
            (
                format!("{MINIMAL}\nsweep.parameter = modes[3].r\nsweep.values = 1"),
                "does not exist",
            ),
            (format!("{MINIMAL}\nsweep.parameter = name\nsweep.values = 1"), "not numeric"),
            (
                format!("{MINIMAL}\nsweep.parameter = detector.p\nsweep.values ="),
                "expected a number",
            ),
            (
                MINIMAL.replace("trajectory.kind = static", "trajectory.kind = circular"),
                "unknown trajectory",
            ),
        ] {
            let err = Scenario::parse(&text).unwrap_err().to_string();
            assert!(err.contains(needle), "{err} lacks {needle}");
        }
    }

    #[test]
    fn parameter_override() {
        let s = Scenario::parse(MINIMAL).unwrap();
        let t = s.with_parameter("trajectory.t0", 2.0).unwrap();
        assert_eq!(t.trajectory, TrajectoryConfig::Static { x0: 0.0, t0: 2.0 });
        assert!(s.with_parameter("detector.p", 2.0).is_err());
    }
}
