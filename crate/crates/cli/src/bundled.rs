//! Scenarios shipped with the tool.

use std::path::Path;

use crate::config::{Scenario, TrajectoryConfig};
use crate::error::{CliError, CliResult};

pub const SCENARIO_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios");

pub const BUNDLED: &[(&str, &str)] = &[
    ("thermal_baseline", include_str!("../scenarios/thermal_baseline.conf")),
    ("squeezed_resonant", include_str!("../scenarios/squeezed_resonant.conf")),
    ("oracle_scaling", include_str!("../scenarios/oracle_scaling.conf")),
    ("accelerated_sampled", include_str!("../scenarios/accelerated_sampled.conf")),
    ("sweep_r", include_str!("../scenarios/sweep_r.conf")),
    ("sweep_t0_thermal", include_str!("../scenarios/sweep_t0_thermal.conf")),
    ("sweep_t0_squeezed", include_str!("../scenarios/sweep_t0_squeezed.conf")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

pub fn text(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Parses a bundled scenario; table paths resolve against the scenario directory.
pub fn load(name: &str) -> CliResult<Scenario> {
    let text = text(name).ok_or_else(|| {
        CliError::Config(format!(
            "unknown bundled scenario `{name}` (available: {})",
            names().collect::<Vec<_>>().join(", ")
        ))
    })?;
    let mut sc = Scenario::parse(text)?;
    if let TrajectoryConfig::Sampled { table } = &mut sc.trajectory {
        if table.is_relative() {
            *table = Path::new(SCENARIO_DIR).join(&*table);
        }
    }
    Ok(sc)
}
