//! Staged restoration: each step closes the best set of at most `n_c` open
//! lines, found by exhaustive enumeration with one dispatch solve per subset.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispatch::{max_served_dispatch, thermal_limits, DispatchOptions, DispatchSolution, DEFAULT_ANGLE_BOUND};
use crate::error::{Error, Result};
use crate::model::{LineId, NetworkCase, TopologyState};

/// Served totals within this many MW are treated as equal.
pub const TIE_TOL_MW: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineLimitsMode {
    CascadeCapacities,
    ThermalRatings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryConfig {
    pub n_c: usize,
    pub step_minutes: f64,
    pub angle_bound: f64,
    pub line_limits_mode: LineLimitsMode,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        RecoveryConfig {
            n_c: 3,
            step_minutes: 15.0,
            angle_bound: DEFAULT_ANGLE_BOUND,
            line_limits_mode: LineLimitsMode::CascadeCapacities,
        }
    }
}

impl RecoveryConfig {
    fn validate(&self) -> Result<()> {
        if self.n_c == 0 {
            return Err(Error::Domain("n_c must be at least 1".into()));
        }
        if !(self.step_minutes.is_finite() && self.step_minutes > 0.0) {
            return Err(Error::Domain("step minutes must be positive".into()));
        }
        Ok(())
    }

    /// Line limits for the chosen mode; `capacities` are the cascade
    /// capacities and are required in that mode.
    pub fn limits(&self, case: &NetworkCase, capacities: Option<&[f64]>) -> Result<Vec<f64>> {
        match self.line_limits_mode {
            LineLimitsMode::ThermalRatings => Ok(thermal_limits(case)),
            LineLimitsMode::CascadeCapacities => capacities
                .map(<[f64]>::to_vec)
                .ok_or_else(|| Error::Precondition("cascade capacities are required".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryStepResult {
    pub iteration: usize,
    pub closed_lines: Vec<LineId>,
    pub rd: f64,
    pub dispatch: DispatchSolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryTrace {
    pub initial_state: TopologyState,
    pub initial_rd: f64,
    pub steps: Vec<RecoveryStepResult>,
    pub ens_mwh: f64,
    pub fully_restored: bool,
}

/// All subsets of `items` with size in `1..=max`, each sorted ascending.
pub fn closure_subsets(items: &[LineId], max: usize) -> Vec<Vec<LineId>> {
    fn rec(items: &[LineId], start: usize, max: usize, cur: &mut Vec<LineId>, out: &mut Vec<Vec<LineId>>) {
        for i in start..items.len() {
            cur.push(items[i]);
            out.push(cur.clone());
            if cur.len() < max {
                rec(items, i + 1, max, cur, out);
            }
            cur.pop();
        }
    }
    let mut sorted = items.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    rec(&sorted, 0, max, &mut Vec::new(), &mut out);
    out
}

/// Whether candidate `a` is preferred over `b`: more served demand, then
/// more lines, then the lexicographically smaller id set.
pub fn prefers(a: (f64, &[LineId]), b: (f64, &[LineId])) -> bool {
    if a.0 > b.0 + TIE_TOL_MW {
        return true;
    }
    if b.0 > a.0 + TIE_TOL_MW {
        return false;
    }
    if a.1.len() != b.1.len() {
        return a.1.len() > b.1.len();
    }
    a.1 < b.1
}

/// One restoration step from `state` with all generators available.
pub fn recovery_step(
    case: &NetworkCase,
    state: &TopologyState,
    limits: &[f64],
    config: &RecoveryConfig,
    iteration: usize,
) -> Result<RecoveryStepResult> {
    config.validate()?;
    let open = state.open_lines();
    if open.is_empty() {
        return Err(Error::Precondition("no open lines to close".into()));
    }
    let mut base = state.clone();
    base.generator_status.iter_mut().for_each(|g| *g = true);
    let fast = DispatchOptions {
        load_factor: 1.0,
        angle_bound: config.angle_bound,
        canonical: false,
    };

    let candidates = closure_subsets(&open, config.n_c);
    let served: Vec<f64> = candidates
        .par_iter()
        .map(|s| {
            let trial = base.clone().with_lines_closed(s.iter().copied());
            max_served_dispatch(case, &trial, limits, &fast).map(|d| d.total_served)
        })
        .collect::<Result<_>>()?;

    let mut best = 0;
    for i in 1..candidates.len() {
        if prefers((served[i], &candidates[i]), (served[best], &candidates[best])) {
            best = i;
        }
    }
    let closed_lines = candidates[best].clone();
    let chosen = base.with_lines_closed(closed_lines.iter().copied());
    let dispatch = max_served_dispatch(
        case,
        &chosen,
        limits,
        &DispatchOptions {
            canonical: true,
            ..fast
        },
    )?;
    Ok(RecoveryStepResult {
        iteration,
        closed_lines,
        rd: dispatch.total_served,
        dispatch,
    })
}

/// Restores step by step until every line is closed.
pub fn run_recovery(
    case: &NetworkCase,
    initial_state: &TopologyState,
    initial_rd: f64,
    limits: &[f64],
    config: &RecoveryConfig,
) -> Result<RecoveryTrace> {
    config.validate()?;
    initial_state.check_against(case)?;
    let mut state = initial_state.clone();
    let mut steps = Vec::new();
    while !state.all_lines_closed() {
        let iteration = steps.len() + 1;
        let step = recovery_step(case, &state, limits, config, iteration).map_err(|e| Error::AtIteration {
            iteration,
            source: Box::new(e),
        })?;
        log::debug!("recovery step {iteration}: close {:?}, RD {:.3}", step.closed_lines, step.rd);
        state = state.with_lines_closed(step.closed_lines.iter().copied());
        steps.push(step);
    }
    let total = case.total_peak_load();
    let mut trace = RecoveryTrace {
        initial_state: initial_state.clone(),
        initial_rd,
        fully_restored: false,
        steps,
        ens_mwh: 0.0,
    };
    trace.ens_mwh = ens_above_curve(&trace, total, config.step_minutes);
    let final_rd = trace.steps.last().map_or(initial_rd, |s| s.rd);
    trace.fully_restored = final_rd >= total - TIE_TOL_MW;
    Ok(trace)
}

/// Area above the recovery curve, MWh: the initial shortfall over the first
/// interval plus each step's remaining shortfall over one interval.
pub fn ens_above_curve(trace: &RecoveryTrace, total_demand: f64, step_minutes: f64) -> f64 {
    let hours = step_minutes / 60.0;
    let shortfall = |rd: f64| (total_demand - rd).max(0.0);
    if trace.steps.is_empty() {
        return 0.0;
    }
    let mut ens = shortfall(trace.initial_rd) * hours;
    for s in &trace.steps {
        ens += shortfall(s.rd) * hours;
    }
    ens
}

/// Curve CSV: the initial point followed by one row per step.
pub fn curve_to_csv(trace: &RecoveryTrace, step_minutes: f64) -> String {
    let mut out = String::from("iteration,minutes_elapsed,rd_mw,closed_line_ids\n");
    let _ = writeln!(out, "0,0,{},", trace.initial_rd);
    for s in &trace.steps {
        let ids: Vec<String> = s.closed_lines.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(
            out,
            "{},{},{},{}",
            s.iteration,
            s.iteration as f64 * step_minutes,
            s.rd,
            ids.join(" ")
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case_file::load_case;
    use approx::assert_abs_diff_eq;

    fn triangle() -> NetworkCase {
        load_case(
            r#"{"base_mva":100,"buses":[{"id":1,"name":"a"},{"id":2,"name":"b"},{"id":3,"name":"c"}],
            "lines":[{"id":1,"from":1,"to":2,"b_pu":1,"rating_mw":50,"lambda_per_yr":0,"mu_per_yr":0},
                     {"id":2,"from":1,"to":3,"b_pu":1,"rating_mw":50,"lambda_per_yr":0,"mu_per_yr":0},
                     {"id":3,"from":2,"to":3,"b_pu":1,"rating_mw":50,"lambda_per_yr":0,"mu_per_yr":0}],
            "generators":[{"id":1,"bus":1,"pmin_mw":0,"pmax_mw":100,"lambda_per_yr":0,"mu_per_yr":0}],
            "loads":[{"bus":2,"peak_mw":60},{"bus":3,"peak_mw":40}]}"#,
        )
        .unwrap()
    }

    fn thermal() -> RecoveryConfig {
        RecoveryConfig {
            line_limits_mode: LineLimitsMode::ThermalRatings,
            ..Default::default()
        }
    }

    #[test]
    fn subset_counts() {
        let ids: Vec<LineId> = (1..=5).map(LineId).collect();
        assert_eq!(closure_subsets(&ids, 3).len(), 25);
        assert_eq!(closure_subsets(&ids, 1).len(), 5);
        assert_eq!(closure_subsets(&ids, 9).len(), 31);
    }

    #[test]
    fn single_open_line_closes() {
        let case = triangle();
        let st = TopologyState::intact(&case).with_lines_open([LineId(2)]);
        let lim = thermal_limits(&case);
        let step = recovery_step(&case, &st, &lim, &thermal(), 1).unwrap();
        assert_eq!(step.closed_lines, vec![LineId(2)]);
        let full = max_served_dispatch(&case, &TopologyState::intact(&case), &lim, &Default::default()).unwrap();
        assert_abs_diff_eq!(step.rd, full.total_served, epsilon = 1e-9);
    }

    #[test]
    fn best_single_closure_with_budget_one() {
        // Lines 1-2 and 1-3 open: closing 1-2 serves 50 (limit), closing 1-3 serves 40.
        let case = triangle();
        let st = TopologyState::intact(&case).with_lines_open([LineId(1), LineId(2)]);
        let cfg = RecoveryConfig { n_c: 1, ..thermal() };
        let lim = thermal_limits(&case);
        let step = recovery_step(&case, &st, &lim, &cfg, 1).unwrap();
        assert_eq!(step.closed_lines, vec![LineId(1)]);
        assert_abs_diff_eq!(step.rd, 50.0, epsilon = 1e-9);
    }

    #[test]
    fn no_open_lines_is_a_precondition_error() {
        let case = triangle();
        let r = recovery_step(&case, &TopologyState::intact(&case), &thermal_limits(&case), &thermal(), 1);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn intact_start_has_no_steps() {
        let case = triangle();
        let t = run_recovery(&case, &TopologyState::intact(&case), 100.0, &thermal_limits(&case), &thermal()).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.ens_mwh, 0.0);
    }

    #[test]
    fn rectangle_ens() {
        let case = triangle();
        let dummy = max_served_dispatch(&case, &TopologyState::intact(&case), &thermal_limits(&case), &Default::default()).unwrap();
        let trace = RecoveryTrace {
            initial_state: TopologyState::intact(&case),
            initial_rd: 1425.0,
            steps: vec![RecoveryStepResult {
                iteration: 1,
                closed_lines: vec![LineId(1)],
                rd: 2850.0,
                dispatch: dummy,
            }],
            ens_mwh: 0.0,
            fully_restored: true,
        };
        assert_eq!(ens_above_curve(&trace, 2850.0, 15.0), 356.25);
    }

    #[test]
    fn all_open_triangle_recovers_in_one_step() {
        let case = triangle();
        let lim = vec![500.0; 3];
        let t = run_recovery(&case, &TopologyState::all_open(&case), 0.0, &lim, &thermal()).unwrap();
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.steps[0].closed_lines.len(), 3);
        assert!(t.fully_restored);
        assert_abs_diff_eq!(t.ens_mwh, 25.0, epsilon = 1e-9);
        let csv = curve_to_csv(&t, 15.0);
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn tie_break_prefers_more_lines_then_smaller_ids() {
        let a = [LineId(1), LineId(3)];
        let b = [LineId(2)];
        assert!(prefers((10.0, &a), (10.0, &b)));
        assert!(prefers((10.0, &[LineId(1), LineId(2)]), (10.0, &a)));
        assert!(prefers((10.1, &b), (10.0, &a)));
    }
}
