use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use r3grid::cascade::{base_flows, line_capacities, CascadeConfig};
use r3grid::recovery::{curve_to_csv, LineLimitsMode};
use r3grid::{connected_components, island_balance, run_recovery, LineId, RecoveryConfig, TopologyState};
use serde::{Deserialize, Serialize};

use super::robustness::{self, RobustnessResult};
use crate::args::{LimitsArg, RecoveryArgs, ResilienceArgs, Switch};
use crate::manifest::{load_case, read_run, run_dir, write_run, LoadedCase, RunManifest};

pub const SCHEMA: &str = "r3.resilience/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepSummary {
    pub iteration: usize,
    pub minutes: f64,
    pub closed_lines: Vec<LineId>,
    pub rd_mw: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResilienceResult {
    /// Where the initial state came from.
    pub source: String,
    pub total_demand_mw: f64,
    pub initial_rd_mw: f64,
    pub initial_open_lines: Vec<LineId>,
    pub step_minutes: f64,
    pub ens_mwh: f64,
    pub fully_restored: bool,
    pub steps: Vec<StepSummary>,
}

/// Starting point of a restoration run.
pub struct Start {
    pub source: String,
    pub state: TopologyState,
    pub initial_rd: f64,
    pub capacities: Vec<f64>,
}

pub fn run(args: &ResilienceArgs) -> Result<ResilienceResult> {
    let case = load_case(args.case.case.as_deref(), args.case.variant)?;
    let start = match &args.state {
        Some(path) => start_from_state_file(&case, path, args)?,
        None => start_from_robustness(&case, &args.run.out)?,
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.run.worker_count()).build()?;
    pool.install(|| execute(&case, start, &args.recovery, args.angle_bound, &args.run.out))
}

fn start_from_state_file(case: &LoadedCase, path: &Path, args: &ResilienceArgs) -> Result<Start> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let state: TopologyState =
        serde_json::from_str(&text).with_context(|| format!("parsing topology state {}", path.display()))?;
    state.check_against(&case.case)?;
    let alpha = *args.alphas.first().context("at least one alpha is required")?;
    let cfg = CascadeConfig::new(alpha).with_floor(args.floor == Switch::On);
    let capacities = line_capacities(&case.case, &base_flows(&case.case)?, &cfg);
    let partition = connected_components(&case.case, &state);
    let initial_rd = partition
        .islands
        .iter()
        .map(|isl| island_balance(isl, &case.case, &state))
        .sum();
    Ok(Start {
        source: path.display().to_string(),
        state,
        initial_rd,
        capacities,
    })
}

pub fn start_from_robustness(case: &LoadedCase, out: &Path) -> Result<Start> {
    let dir: PathBuf = run_dir(out, case.variant, "robustness");
    if !dir.join("result.json").exists() {
        bail!(
            "no robustness result at {}; run `robustness` first or pass --state",
            dir.display()
        );
    }
    let (env, manifest) = read_run::<RobustnessResult>(&dir, robustness::SCHEMA)?;
    if manifest.case_sha256 != case.sha256 {
        bail!("{} was produced from a different case", dir.display());
    }
    let r = env.body;
    Ok(Start {
        source: format!("robustness:{}", env.manifest_hash),
        initial_rd: r.representative.final_sd * r.total_demand_mw,
        state: r.representative_state,
        capacities: r.representative_capacities,
    })
}

pub fn execute(
    case: &LoadedCase,
    start: Start,
    args: &RecoveryArgs,
    angle_bound: f64,
    out: &Path,
) -> Result<ResilienceResult> {
    let config = RecoveryConfig {
        n_c: args.nc as usize,
        step_minutes: args.step_minutes,
        angle_bound,
        line_limits_mode: match args.limits {
            LimitsArg::Cascade => LineLimitsMode::CascadeCapacities,
            LimitsArg::Thermal => LineLimitsMode::ThermalRatings,
        },
    };
    let limits = config.limits(&case.case, Some(&start.capacities))?;
    log::info!(
        "{}: resilience from {} open lines",
        case.label,
        start.state.open_lines().len()
    );
    let trace = run_recovery(&case.case, &start.state, start.initial_rd, &limits, &config)?;
    let mut cfg = serde_json::to_value(args)?;
    cfg["angle_bound"] = angle_bound.into();
    cfg["source"] = start.source.clone().into();
    let manifest = RunManifest::new("resilience", case, cfg);

    let result = ResilienceResult {
        source: start.source,
        total_demand_mw: case.case.total_peak_load(),
        initial_rd_mw: start.initial_rd,
        initial_open_lines: start.state.open_lines(),
        step_minutes: args.step_minutes,
        ens_mwh: trace.ens_mwh,
        fully_restored: trace.fully_restored,
        steps: trace
            .steps
            .iter()
            .map(|s| StepSummary {
                iteration: s.iteration,
                minutes: s.iteration as f64 * args.step_minutes,
                closed_lines: s.closed_lines.clone(),
                rd_mw: s.rd,
            })
            .collect(),
    };
    write_run(
        &run_dir(out, case.variant, "resilience"),
        SCHEMA,
        &manifest,
        &result,
        &[("recovery_curve.csv", curve_to_csv(&trace, args.step_minutes))],
    )?;
    log::info!(
        "{}: ENS {:.2} MWh over {} steps",
        case.label,
        result.ens_mwh,
        result.steps.len()
    );
    Ok(result)
}
