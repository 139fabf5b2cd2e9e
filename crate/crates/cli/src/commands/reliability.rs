use anyhow::Result;
use r3grid::reliability::{run_monte_carlo, MonteCarloConfig, ReliabilityIndicators};
use serde::{Deserialize, Serialize};

use crate::args::{MonteCarloArgs, ReliabilityArgs};
use crate::manifest::{load_case, run_dir, write_run, LoadedCase, RunManifest};

pub const SCHEMA: &str = "r3.reliability/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReliabilityResult {
    pub indicators: ReliabilityIndicators,
}

#[derive(Serialize)]
struct YearRow {
    year: usize,
    ens_mwh: f64,
    curtailed_hours: f64,
    disruptions: usize,
    cov_eens: Option<f64>,
}

pub fn run(args: &ReliabilityArgs) -> Result<ReliabilityResult> {
    let case = load_case(args.case.case.as_deref(), args.case.variant)?;
    execute(&case, &args.mc, args.angle_bound, args.run.worker_count(), &args.run.out)
}

pub fn execute(
    case: &LoadedCase,
    mc: &MonteCarloArgs,
    angle_bound: f64,
    workers: usize,
    out: &std::path::Path,
) -> Result<ReliabilityResult> {
    let config = MonteCarloConfig {
        seed: mc.seed,
        max_years: mc.years,
        cov_threshold: mc.cov,
        min_years: mc.min_years,
        workers,
        angle_bound,
    };
    log::info!("{}: reliability, up to {} years", case.label, mc.years);
    let outcome = run_monte_carlo(&case.case, &config)?;
    let mut cfg = serde_json::to_value(mc)?;
    cfg["angle_bound"] = angle_bound.into();
    let manifest = RunManifest::new("reliability", case, cfg);

    let mut w = csv::Writer::from_writer(Vec::new());
    for (i, (y, cov)) in outcome.yearly.iter().zip(&outcome.cov_trace).enumerate() {
        w.serialize(YearRow {
            year: i + 1,
            ens_mwh: y.ens_mwh,
            curtailed_hours: y.curtailed_hours,
            disruptions: y.disruptions,
            cov_eens: *cov,
        })?;
    }
    let yearly_csv = String::from_utf8(w.into_inner()?)?;

    // Solve counts depend on how years land in per-worker caches, so they are logged only.
    log::debug!("{}: {} dispatch LP solves", case.label, outcome.lp_solves);
    let result = ReliabilityResult {
        indicators: outcome.indicators,
    };
    write_run(
        &run_dir(out, case.variant, "reliability"),
        SCHEMA,
        &manifest,
        &result,
        &[("yearly_ens.csv", yearly_csv)],
    )?;
    log::info!(
        "{}: EENS {:.1} MWh/yr after {} years (converged: {})",
        case.label,
        result.indicators.eens,
        result.indicators.n_years,
        result.indicators.converged
    );
    Ok(result)
}
