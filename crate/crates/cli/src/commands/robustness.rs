use anyhow::{bail, Result};
use r3grid::cascade::{run_sweep, traces_to_csv, ScenarioResult};
use r3grid::{initiating_events, rts24, BusId, TopologyState};
use serde::{Deserialize, Serialize};

use crate::args::{CascadeArgs, RobustnessArgs, Switch};
use crate::manifest::{load_case, run_dir, write_run, LoadedCase, RunManifest};

pub const SCHEMA: &str = "r3.robustness/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobustnessResult {
    pub alphas: Vec<f64>,
    pub event_buses: Vec<BusId>,
    pub scenario_count: usize,
    pub mean_final_sd: f64,
    pub total_demand_mw: f64,
    pub representative: ScenarioResult,
    pub representative_state: TopologyState,
    /// Trip capacities of the representative scenario, MW per line.
    pub representative_capacities: Vec<f64>,
    pub scenarios: Vec<ScenarioResult>,
}

#[derive(Serialize)]
struct ScenarioRow {
    scenario_id: usize,
    event_bus: Option<u32>,
    alpha: f64,
    final_sd: f64,
    stage_count: usize,
}

pub fn run(args: &RobustnessArgs) -> Result<RobustnessResult> {
    let case = load_case(args.case.case.as_deref(), args.case.variant)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.run.worker_count()).build()?;
    pool.install(|| execute(&case, &args.cascade, &args.run.out))
}

/// Event exclusions: explicit list, else the RTS-24 list on 24-bus cases.
pub fn exclusions(case: &LoadedCase, args: &CascadeArgs) -> Vec<BusId> {
    match &args.exclude_buses {
        Some(list) => list.iter().map(|&b| BusId(b)).collect(),
        None if case.is_builtin_rts || case.case.bus_count() == 24 => {
            rts24::VariantManifest::builtin().event_exclusions()
        }
        None => Vec::new(),
    }
}

pub fn execute(case: &LoadedCase, args: &CascadeArgs, out: &std::path::Path) -> Result<RobustnessResult> {
    let mut events = initiating_events(&case.case, &exclusions(case, args))?;
    if let Some(buses) = &args.event_buses {
        events.retain(|e| e.bus.is_some_and(|b| buses.contains(&b.0)));
    }
    if events.is_empty() {
        bail!("no initiating events selected");
    }
    log::info!("{}: robustness, {} events x {} alphas", case.label, events.len(), args.alphas.len());
    let sweep = run_sweep(&case.case, &args.alphas, &events, args.floor == Switch::On)?;
    let manifest = RunManifest::new("robustness", case, serde_json::to_value(args)?);
    let rep = sweep.representative_trace().expect("traces kept");

    let mut w = csv::Writer::from_writer(Vec::new());
    for s in &sweep.scenarios {
        w.serialize(ScenarioRow {
            scenario_id: s.scenario_id,
            event_bus: s.event_bus.map(|b| b.0),
            alpha: s.alpha,
            final_sd: s.final_sd,
            stage_count: s.stage_count,
        })?;
    }
    let scenarios_csv = String::from_utf8(w.into_inner()?)?;

    let result = RobustnessResult {
        alphas: args.alphas.clone(),
        event_buses: events.iter().filter_map(|e| e.bus).collect(),
        scenario_count: sweep.scenarios.len(),
        mean_final_sd: sweep.mean_final_sd,
        total_demand_mw: case.case.total_peak_load(),
        representative: sweep.scenarios[sweep.representative].clone(),
        representative_state: sweep.representative_state.clone(),
        representative_capacities: rep.capacities.clone(),
        scenarios: sweep.scenarios.clone(),
    };
    write_run(
        &run_dir(out, case.variant, "robustness"),
        SCHEMA,
        &manifest,
        &result,
        &[("scenarios.csv", scenarios_csv), ("stages.csv", traces_to_csv(&sweep.traces))],
    )?;
    log::info!("{}: mean final SD {:.4}", case.label, result.mean_final_sd);
    Ok(result)
}
