//! Overload-driven cascading failure with island balancing.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BusId, IslandPartition, LineId, NetworkCase, TopologyState};
use crate::powerflow::{DcFlowSolver, InjectionVector};
use crate::topology::incident_lines;

/// Relative slack on the strict trip test so that unchanged flows survive
/// floating-point noise.
const TRIP_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeConfig {
    pub alpha: f64,
    /// When set, capacities are at least `alpha · fraction · rating`.
    pub capacity_floor_fraction: Option<f64>,
}

impl CascadeConfig {
    pub fn new(alpha: f64) -> Self {
        CascadeConfig {
            alpha,
            capacity_floor_fraction: None,
        }
    }

    /// The optional floor at 5% of rating.
    pub fn with_floor(mut self, on: bool) -> Self {
        self.capacity_floor_fraction = on.then_some(0.05);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 1.0) {
            return Err(Error::Domain(format!("alpha must be >= 1, got {}", self.alpha)));
        }
        Ok(())
    }
}

/// An initiating disturbance: a set of lines opened at once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitiatingEvent {
    /// The disconnected bus, for bus-isolation events.
    pub bus: Option<BusId>,
    pub lines: Vec<LineId>,
}

impl InitiatingEvent {
    pub fn lines(lines: Vec<LineId>) -> Self {
        InitiatingEvent { bus: None, lines }
    }

    pub fn describe(&self) -> String {
        let ids: Vec<String> = self.lines.iter().map(|l| l.to_string()).collect();
        match self.bus {
            Some(b) => format!("isolate bus {b} (lines {})", ids.join(" ")),
            None => format!("open lines {}", ids.join(" ")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeStage {
    pub stage_index: usize,
    pub tripped_lines: Vec<LineId>,
    pub partition: IslandPartition,
    /// Served demand per island, MW, in partition order.
    pub served_per_island: Vec<f64>,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeTrace {
    pub initiating_event: InitiatingEvent,
    pub config: CascadeConfig,
    pub base_flows: Vec<f64>,
    pub capacities: Vec<f64>,
    pub stages: Vec<CascadeStage>,
    pub final_sd: f64,
    pub final_state: TopologyState,
}

/// Per-line trip capacities from pre-event flows.
pub fn line_capacities(case: &NetworkCase, base_flows: &[f64], config: &CascadeConfig) -> Vec<f64> {
    base_flows
        .iter()
        .zip(case.lines())
        .map(|(f, line)| {
            let cap = config.alpha * f.abs();
            match config.capacity_floor_fraction {
                Some(frac) => cap.max(config.alpha * frac * line.rating),
                None => cap,
            }
        })
        .collect()
}

/// One event per bus not in `excluded`: open every line incident to it.
pub fn initiating_events(case: &NetworkCase, excluded: &[BusId]) -> Result<Vec<InitiatingEvent>> {
    case.buses()
        .iter()
        .filter(|b| !excluded.contains(&b.id))
        .map(|b| {
            Ok(InitiatingEvent {
                bus: Some(b.id),
                lines: incident_lines(case, b.id)?,
            })
        })
        .collect()
}

/// Served demand of one island: zero without available generation,
/// otherwise the smaller of available capacity and demand.
pub fn island_balance(island: &[BusId], case: &NetworkCase, state: &TopologyState) -> f64 {
    let (cap, demand) = island_totals(island, case, state);
    if cap > 0.0 {
        cap.min(demand)
    } else {
        0.0
    }
}

fn island_totals(island: &[BusId], case: &NetworkCase, state: &TopologyState) -> (f64, f64) {
    let cap = case
        .generators()
        .iter()
        .zip(&state.generator_status)
        .filter(|(g, on)| **on && island.contains(&g.bus))
        .map(|(g, _)| g.p_max)
        .sum();
    let demand = island.iter().map(|b| case.bus_demand()[b.index()]).sum();
    (cap, demand)
}

/// Proportionally balanced injections: in each island generators share the
/// served amount in proportion to `p_max` and loads are scaled uniformly.
/// Returns the injections and the served amount per island.
pub fn balanced_injections(
    case: &NetworkCase,
    state: &TopologyState,
    partition: &IslandPartition,
) -> (InjectionVector, Vec<f64>) {
    let n = case.bus_count();
    let member = partition.membership(n);
    let k = partition.island_count();
    let mut cap = vec![0.0; k];
    let mut demand = vec![0.0; k];
    for (g, on) in case.generators().iter().zip(&state.generator_status) {
        if *on {
            cap[member[g.bus.index()]] += g.p_max;
        }
    }
    for (b, d) in case.bus_demand().iter().enumerate() {
        demand[member[b]] += d;
    }
    let served: Vec<f64> = cap
        .iter()
        .zip(&demand)
        .map(|(c, d)| if *c > 0.0 { c.min(*d) } else { 0.0 })
        .collect();
    let mut inj = vec![0.0; n];
    for (g, on) in case.generators().iter().zip(&state.generator_status) {
        let i = member[g.bus.index()];
        if *on && cap[i] > 0.0 {
            inj[g.bus.index()] += g.p_max * served[i] / cap[i];
        }
    }
    for (b, d) in case.bus_demand().iter().enumerate() {
        let i = member[b];
        if demand[i] > 0.0 {
            inj[b] -= d * served[i] / demand[i];
        }
    }
    // Absorb rounding residue at each island's first bus.
    let mut residual = vec![0.0; k];
    for (b, p) in inj.iter().enumerate() {
        residual[member[b]] += p;
    }
    for island in &partition.islands {
        inj[island[0].index()] -= residual[member[island[0].index()]];
    }
    (InjectionVector(inj), served)
}

/// Pre-event flows of the intact network under the balanced dispatch.
pub fn base_flows(case: &NetworkCase) -> Result<Vec<f64>> {
    let state = TopologyState::intact(case);
    let solver = DcFlowSolver::new(case, &state.line_status)?;
    let (inj, _) = balanced_injections(case, &state, solver.partition());
    Ok(solver.solve(case, &inj)?.flows)
}

fn stage_flows(case: &NetworkCase, state: &TopologyState) -> Result<(Vec<f64>, IslandPartition, Vec<f64>)> {
    let solver = DcFlowSolver::new(case, &state.line_status)?;
    let (inj, served) = balanced_injections(case, state, solver.partition());
    let flows = solver.solve(case, &inj)?.flows;
    Ok((flows, solver.partition().clone(), served))
}

/// Simulates the cascade started by `event` with capacities from the intact
/// base flows.
pub fn run_cascade(case: &NetworkCase, event: &InitiatingEvent, config: &CascadeConfig) -> Result<CascadeTrace> {
    let flows = base_flows(case)?;
    run_cascade_with_base(case, event, config, &flows)
}

pub fn run_cascade_with_base(
    case: &NetworkCase,
    event: &InitiatingEvent,
    config: &CascadeConfig,
    base_flows: &[f64],
) -> Result<CascadeTrace> {
    config.validate()?;
    for l in &event.lines {
        case.line(*l)?;
    }
    let capacities = line_capacities(case, base_flows, config);
    let total_demand = case.total_peak_load();
    let mut state = TopologyState::intact(case).with_lines_open(event.lines.iter().copied());
    let mut stages = Vec::new();
    let mut tripped = event.lines.clone();

    loop {
        let (flows, partition, served) = stage_flows(case, &state)?;
        let total: f64 = served.iter().sum();
        let sd = if total_demand > 0.0 { (total / total_demand).clamp(0.0, 1.0) } else { 1.0 };
        stages.push(CascadeStage {
            stage_index: stages.len() + 1,
            tripped_lines: std::mem::take(&mut tripped),
            partition,
            served_per_island: served,
            sd,
        });

        tripped = flows
            .iter()
            .zip(&capacities)
            .enumerate()
            .filter(|(k, (f, cap))| {
                state.line_status[*k] && f.abs() > **cap + TRIP_REL_TOL * cap.max(1.0)
            })
            .map(|(k, _)| LineId::from_index(k))
            .collect();
        if tripped.is_empty() {
            break;
        }
        state = state.with_lines_open(tripped.iter().copied());
    }

    let final_sd = stages.last().map_or(1.0, |s| s.sd);
    Ok(CascadeTrace {
        initiating_event: event.clone(),
        config: *config,
        base_flows: base_flows.to_vec(),
        capacities,
        stages,
        final_sd,
        final_state: state,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario_id: usize,
    pub event_bus: Option<BusId>,
    pub alpha: f64,
    pub final_sd: f64,
    pub stage_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub scenarios: Vec<ScenarioResult>,
    pub mean_final_sd: f64,
    /// Index into `scenarios` of the representative scenario.
    pub representative: usize,
    pub representative_state: TopologyState,
    #[serde(skip)]
    pub traces: Vec<CascadeTrace>,
}

impl SweepSummary {
    pub fn representative_trace(&self) -> Option<&CascadeTrace> {
        self.traces.get(self.representative)
    }
}

/// Runs every (event, α) pair, event-major. Scenarios run in parallel on the
/// current rayon pool; results do not depend on scheduling.
pub fn run_sweep(
    case: &NetworkCase,
    alphas: &[f64],
    events: &[InitiatingEvent],
    floor: bool,
) -> Result<SweepSummary> {
    if alphas.is_empty() || events.is_empty() {
        return Err(Error::Precondition("sweep needs at least one event and one alpha".into()));
    }
    let flows = base_flows(case)?;
    let pairs: Vec<(&InitiatingEvent, f64)> = events
        .iter()
        .flat_map(|e| alphas.iter().map(move |a| (e, *a)))
        .collect();
    let traces = pairs
        .par_iter()
        .map(|(e, a)| run_cascade_with_base(case, e, &CascadeConfig::new(*a).with_floor(floor), &flows))
        .collect::<Result<Vec<_>>>()?;

    let scenarios: Vec<ScenarioResult> = traces
        .iter()
        .enumerate()
        .map(|(i, t)| ScenarioResult {
            scenario_id: i + 1,
            event_bus: t.initiating_event.bus,
            alpha: t.config.alpha,
            final_sd: t.final_sd,
            stage_count: t.stages.len(),
        })
        .collect();
    let mean_final_sd = scenarios.iter().map(|s| s.final_sd).sum::<f64>() / scenarios.len() as f64;

    let representative = (0..scenarios.len())
        .min_by(|&a, &b| {
            let (sa, sb) = (&scenarios[a], &scenarios[b]);
            let da = (sa.final_sd - mean_final_sd).abs();
            let db = (sb.final_sd - mean_final_sd).abs();
            da.total_cmp(&db)
                .then(sa.event_bus.cmp(&sb.event_bus))
                .then(sa.alpha.total_cmp(&sb.alpha))
                .then(a.cmp(&b))
        })
        .expect("non-empty");
    Ok(SweepSummary {
        representative_state: traces[representative].final_state.clone(),
        scenarios,
        mean_final_sd,
        representative,
        traces,
    })
}

/// Stage-level CSV: one row per stage of every trace.
pub fn traces_to_csv(traces: &[CascadeTrace]) -> String {
    let mut out = String::from("scenario_id,event_bus,alpha,stage,tripped_lines,island_count,sd\n");
    for (i, t) in traces.iter().enumerate() {
        let bus = t.initiating_event.bus.map_or(String::new(), |b| b.to_string());
        for s in &t.stages {
            let ids: Vec<String> = s.tripped_lines.iter().map(|l| l.to_string()).collect();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                i + 1,
                bus,
                t.config.alpha,
                s.stage_index,
                ids.join(" "),
                s.partition.island_count(),
                s.sd
            );
        }
    }
    out
}
