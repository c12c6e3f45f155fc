//! Result records and their JSON / CSV encodings.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::CliResult;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Dual-path mismatch above which a record is marked failed.
pub const DUAL_PATH_TOL: f64 = 1e-9;
pub const SLOPE_WINDOW: (f64, f64) = (3.5, 4.5);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRecord {
    pub index: usize,
    pub omega: f64,
    pub k: f64,
    pub r: f64,
    pub theta: f64,
    pub beta: f64,
    /// [re, im]
    pub iplus: [f64; 2],
    pub iminus: [f64; 2],
    pub iplus_error: f64,
    pub iminus_error: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub a_min: f64,
    pub b_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// |σ − (βΔH_eff − ΔS)| / max(|βΔH_eff|, |ΔS|, |σ|).
    pub dual_path_relative: f64,
    /// Largest |4AB − C² − 4A_min B_min| over the modes.
    pub positivity_certificate: f64,
    pub max_quadrature_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityRecord {
    pub coupling_measure: f64,
    pub population_ratio: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OraclePoint {
    pub lambda: f64,
    pub delta_p_exact: f64,
    pub delta_p_perturbative: f64,
    pub residual: f64,
    pub sigma_exact: f64,
    pub sigma_perturbative: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub slope: f64,
    pub cutoff: usize,
    pub cutoff_change: f64,
    pub trimmed: Vec<f64>,
    pub sigma_shrink_ratios: Vec<f64>,
    pub points: Vec<OraclePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub tool_version: String,
    pub timestamp: String,
    pub scenario: String,
    pub seed: u64,
    pub inputs: BTreeMap<String, String>,
    pub passed: bool,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
    pub modes: Vec<ModeRecord>,
    pub delta_p: f64,
    pub entropy_change: f64,
    pub field_heat: f64,
    /// Σ_j β_j ΔH_eff,j.
    pub heat: f64,
    pub sigma: f64,
    pub sigma_dual: f64,
    pub residuals: Residuals,
    pub validity: ValidityRecord,
    pub oracle: Option<OracleRecord>,
}

/// One sweep point: the record, or the error that stopped it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub value: f64,
    pub record: Option<ResultRecord>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn passed(&self) -> bool {
        self.record.as_ref().is_some_and(|r| r.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub scenario: String,
    pub parameter: String,
    pub rows: Vec<SweepRow>,
}

/// CSV columns, in order.
pub const CSV_COLUMNS: [&str; 20] = [
    "schema_version",
    "scenario",
    "index",
    "parameter",
    "value",
    "status",
    "delta_p",
    "entropy_change",
    "field_heat",
    "heat",
    "sigma",
    "sigma_dual",
    "dual_path_relative",
    "positivity_certificate",
    "max_quadrature_error",
    "coupling_measure",
    "population_ratio",
    "valid",
    "oracle_slope",
    "message",
];

/// Shortest round-trip form; exponent notation outside [1e-4, 1e6).
pub fn fmt_number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn row_fields(
    scenario: &str,
    index: usize,
    parameter: &str,
    value: Option<f64>,
    rec: Option<&ResultRecord>,
    error: Option<&str>,
) -> Vec<String> {
    let value = value.map(fmt_number).unwrap_or_default();
    let mut out = vec![
        SCHEMA_VERSION.to_string(),
        scenario.to_string(),
        index.to_string(),
        parameter.to_string(),
        value,
    ];
    match rec {
        Some(r) => {
            out.push(if r.passed { "ok" } else { "failed" }.to_string());
            out.extend(
                [
                    r.delta_p,
                    r.entropy_change,
                    r.field_heat,
                    r.heat,
                    r.sigma,
                    r.sigma_dual,
                    r.residuals.dual_path_relative,
                    r.residuals.positivity_certificate,
                    r.residuals.max_quadrature_error,
                    r.validity.coupling_measure,
                    r.validity.population_ratio,
                ]
                .map(fmt_number),
            );
            out.push(r.validity.valid.to_string());
            out.push(r.oracle.as_ref().map(|o| fmt_number(o.slope)).unwrap_or_default());
            out.push(r.failures.join("; "));
        }
        None => {
            out.push("error".to_string());
            out.extend(std::iter::repeat_n(String::new(), 13));
            out.push(error.unwrap_or("").to_string());
        }
    }
    out
}

pub fn write_record_csv<W: Write>(w: W, rec: &ResultRecord) -> CliResult<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(CSV_COLUMNS)?;
    wr.write_record(row_fields(&rec.scenario, 0, "", None, Some(rec), None))?;
    wr.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(w: W, rep: &SweepReport) -> CliResult<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(CSV_COLUMNS)?;
    for row in &rep.rows {
        wr.write_record(row_fields(
            &rep.scenario,
            row.index,
            &rep.parameter,
            Some(row.value),
            row.record.as_ref(),
            row.error.as_deref(),
        ))?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_rows_keep_the_column_count() {
        let fields = row_fields("s", 3, "modes[0].r", Some(0.5), None, Some("boom"));
        assert_eq!(fields.len(), CSV_COLUMNS.len());
        assert_eq!(fields[5], "error");
        assert_eq!(fields[19], "boom");
    }
}
