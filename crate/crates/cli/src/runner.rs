use rayon::prelude::*;

use landauer_core::detector::{self, Evaluation};
use landauer_core::oracle::{self, exact_vs_perturbative, ScalingReport};
use landauer_core::sts::positivity_certificate;

use crate::config::Scenario;
use crate::error::{CliError, CliResult};
use crate::record::{
    ModeRecord, OraclePoint, OracleRecord, Residuals, ResultRecord, SweepReport, SweepRow, ValidityRecord, DUAL_PATH_TOL,
    SCHEMA_VERSION, SLOPE_WINDOW, TOOL_VERSION,
};

/// Evaluates one scenario, including the oracle comparison if configured.
pub fn run_scenario(sc: &Scenario) -> CliResult<ResultRecord> {
    sc.validate()?;
    let det = sc.detector_spec()?;
    let modes = sc.mode_specs()?;
    let traj = sc.trajectory()?;
    let win = sc.window()?;
    let ev = detector::evaluate(&det, &modes, &traj, &win)?;

    let oracle = match &sc.oracle {
        Some(o) => {
            let cfg = sc.propagation(&modes[0])?;
            Some(exact_vs_perturbative(&det, &modes[0], &traj, &win, &o.lambdas, &cfg)?)
        }
        None => None,
    };
    Ok(build_record(sc, &ev, oracle.as_ref()))
}

fn build_record(sc: &Scenario, ev: &Evaluation, oracle: Option<&ScalingReport>) -> ResultRecord {
    let modes: Vec<ModeRecord> = sc
        .modes
        .iter()
        .zip(&ev.responses.modes)
        .zip(&ev.coefficients)
        .enumerate()
        .map(|(index, ((m, resp), c))| ModeRecord {
            index,
            omega: m.omega,
            k: m.k,
            r: m.r,
            theta: m.theta,
            beta: m.beta,
            iplus: [resp.iplus.re, resp.iplus.im],
            iminus: [resp.iminus.re, resp.iminus.im],
            iplus_error: resp.err_plus,
            iminus_error: resp.err_minus,
            a: c.a,
            b: c.b,
            c: c.c,
            a_min: c.a_min,
            b_min: c.b_min,
        })
        .collect();

    let residuals = Residuals {
        dual_path_relative: ev.dual_relative,
        positivity_certificate: ev
            .coefficients
            .iter()
            .map(|c| positivity_certificate(c).abs())
            .fold(0.0, f64::max),
        max_quadrature_error: ev
            .responses
            .modes
            .iter()
            .map(|m| m.err_plus.max(m.err_minus))
            .fold(0.0, f64::max),
    };

    let mut failures = Vec::new();
    let mut warnings = Vec::new();
    if !(ev.dual_relative <= DUAL_PATH_TOL) {
        failures.push(format!(
            "dual-path mismatch {:.3e} exceeds {DUAL_PATH_TOL:.0e}",
            ev.dual_relative
        ));
    }
    if !ev.validity.is_valid() {
        warnings.push(format!(
            "perturbative validity flag: coupling measure {:.3e}, population ratio {:.3e}",
            ev.validity.coupling_measure, ev.validity.population_ratio
        ));
    }

    let oracle = oracle.map(|rep| {
        if !rep.slope_in(SLOPE_WINDOW.0, SLOPE_WINDOW.1) {
            failures.push(format!(
                "oracle slope {:.3} outside [{}, {}]",
                rep.slope, SLOPE_WINDOW.0, SLOPE_WINDOW.1
            ));
        }
        if !(rep.cutoff_change < oracle::CUTOFF_CHECK_TOL) {
            failures.push(format!("oracle cutoff check: δp changed by {:.3e}", rep.cutoff_change));
        }
        if !rep.trimmed.is_empty() {
            warnings.push(format!("couplings trimmed by the validity flag: {:?}", rep.trimmed));
        }
        OracleRecord {
            slope: rep.slope,
            cutoff: rep.cutoff,
            cutoff_change: rep.cutoff_change,
            trimmed: rep.trimmed.clone(),
            sigma_shrink_ratios: rep.sigma_shrink_ratios(),
            points: rep
                .points
                .iter()
                .map(|p| OraclePoint {
                    lambda: p.lambda,
                    delta_p_exact: p.dp_exact,
                    delta_p_perturbative: p.dp_pert,
                    residual: p.residual,
                    sigma_exact: p.sigma_exact,
                    sigma_perturbative: p.sigma_pert,
                    steps: p.steps,
                })
                .collect(),
        }
    });

    ResultRecord {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        scenario: sc.name.clone(),
        seed: sc.seed,
        inputs: sc.to_map(),
        passed: failures.is_empty(),
        failures,
        warnings,
        modes,
        delta_p: ev.delta_p,
        entropy_change: ev.entropy_change,
        field_heat: ev.field_heat,
        heat: ev.heat,
        sigma: ev.sigma,
        sigma_dual: ev.sigma_dual,
        residuals,
        validity: ValidityRecord {
            coupling_measure: ev.validity.coupling_measure,
            population_ratio: ev.validity.population_ratio,
            valid: ev.validity.is_valid(),
        },
        oracle,
    }
}

/// Runs every point of the scenario's sweep on `jobs` worker threads. Point
/// failures are recorded in their row; rows keep input order.
pub fn run_sweep(sc: &Scenario, jobs: usize) -> CliResult<SweepReport> {
    sc.validate()?;
    let sweep = sc
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("scenario has no sweep block".into()))?;
    let points: Vec<CliResult<Scenario>> = sweep.values.iter().map(|&v| sc.with_parameter(&sweep.parameter, v)).collect();
    // Invalid points are configuration errors of the whole sweep.
    let points: Vec<Scenario> = points.into_iter().collect::<CliResult<_>>()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    let rows = pool.install(|| {
        points
            .par_iter()
            .zip(sweep.values.par_iter())
            .enumerate()
            .map(|(index, (point, &value))| match run_scenario(point) {
                Ok(rec) => SweepRow {
                    index,
                    value,
                    record: Some(rec),
                    error: None,
                },
                Err(e) => SweepRow {
                    index,
                    value,
                    record: None,
                    error: Some(e.to_string()),
                },
            })
            .collect()
    });
    Ok(SweepReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        scenario: sc.name.clone(),
        parameter: sweep.parameter.clone(),
        rows,
    })
}
