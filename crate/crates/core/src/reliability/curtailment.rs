//! Hourly load curtailment over a sampled year.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dispatch::{max_served_dispatch, thermal_limits, DispatchOptions, DEFAULT_ANGLE_BOUND};
use crate::error::{Error, Result};
use crate::model::{NetworkCase, TopologyState};
use crate::powerflow::{DcFlowSolver, InjectionVector};

use super::timeline::{Component, YearTimeline, YEAR_HOURS};

/// Shortfalls at or below this are treated as fully served, MW.
pub const SHORTFALL_TOL_MW: f64 = 1e-6;

const FLOW_TOL: f64 = 1e-7;
const MAX_CACHE_ENTRIES: usize = 500_000;

/// One contiguous run of curtailed hours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisruptionRecord {
    pub start_hour: u32,
    pub duration_hours: u32,
    pub energy_not_supplied_mwh: f64,
}

/// Evaluates served demand per component state, caching results.
///
/// Line limits are thermal ratings. A state is first screened with a
/// proportional dispatch in each island; when that dispatch respects every
/// limit it serves the island's upper bound `min(capacity, demand)` and is
/// therefore optimal. Otherwise the LP is solved.
pub struct CurtailmentEvaluator<'a> {
    case: &'a NetworkCase,
    limits: Vec<f64>,
    angle_bound: f64,
    cache: HashMap<(TopologyState, u64), f64>,
    intact_solver: Option<DcFlowSolver>,
    all_up_secure: Option<bool>,
    lp_solves: usize,
}

impl<'a> CurtailmentEvaluator<'a> {
    pub fn new(case: &'a NetworkCase) -> Self {
        Self::with_angle_bound(case, DEFAULT_ANGLE_BOUND)
    }

    pub fn with_angle_bound(case: &'a NetworkCase, angle_bound: f64) -> Self {
        CurtailmentEvaluator {
            case,
            limits: thermal_limits(case),
            angle_bound,
            cache: HashMap::new(),
            intact_solver: None,
            all_up_secure: None,
            lp_solves: 0,
        }
    }

    pub fn lp_solves(&self) -> usize {
        self.lp_solves
    }

    pub fn cached_states(&self) -> usize {
        self.cache.len()
    }

    /// Served demand, MW, for a state at the given load factor.
    pub fn served(&mut self, state: &TopologyState, load_factor: f64) -> Result<f64> {
        let key = (state.clone(), load_factor.to_bits());
        if let Some(v) = self.cache.get(&key) {
            return Ok(*v);
        }
        let v = match self.screen(state, load_factor)? {
            Some(v) => v,
            None => {
                self.lp_solves += 1;
                let opts = DispatchOptions {
                    load_factor,
                    angle_bound: self.angle_bound,
                    canonical: false,
                };
                max_served_dispatch(self.case, state, &self.limits, &opts)?.total_served
            }
        };
        if self.cache.len() >= MAX_CACHE_ENTRIES {
            self.cache.clear();
        }
        self.cache.insert(key, v);
        Ok(v)
    }

    fn screen(&mut self, state: &TopologyState, load_factor: f64) -> Result<Option<f64>> {
        let case = self.case;
        let fresh;
        let solver = if state.all_lines_closed() {
            if self.intact_solver.is_none() {
                self.intact_solver = Some(DcFlowSolver::new(case, &state.line_status)?);
            }
            self.intact_solver.as_ref().unwrap()
        } else {
            match DcFlowSolver::new(case, &state.line_status) {
                Ok(s) => {
                    fresh = s;
                    &fresh
                }
                Err(Error::Singular { .. }) => return Ok(None),
                Err(e) => return Err(e),
            }
        };
        let n = case.bus_count();
        let member = solver.partition().membership(n);
        let k = solver.partition().island_count();
        let mut cap = vec![0.0; k];
        let mut demand = vec![0.0; k];
        for (g, on) in case.generators().iter().zip(&state.generator_status) {
            if *on {
                cap[member[g.bus.index()]] += g.p_max;
            }
        }
        for (b, d) in case.bus_demand().iter().enumerate() {
            demand[member[b]] += d * load_factor;
        }
        let target: Vec<f64> = cap.iter().zip(&demand).map(|(c, d)| c.min(*d)).collect();

        let mut inj = vec![0.0; n];
        for (g, on) in case.generators().iter().zip(&state.generator_status) {
            if *on {
                let i = member[g.bus.index()];
                let p = g.p_max * target[i] / cap[i];
                if p < g.p_min - FLOW_TOL {
                    return Ok(None);
                }
                inj[g.bus.index()] += p;
            }
        }
        for (b, d) in case.bus_demand().iter().enumerate() {
            let i = member[b];
            if demand[i] > 0.0 {
                inj[b] -= d * load_factor * target[i] / demand[i];
            }
        }
        // Re-centre each island so the proportional split sums exactly to zero.
        let mut residual = vec![0.0; k];
        for (b, p) in inj.iter().enumerate() {
            residual[member[b]] += p;
        }
        for island in &solver.partition().islands {
            let i = member[island[0].index()];
            inj[island[0].index()] -= residual[i];
        }

        let flow = solver.solve(case, &InjectionVector(inj))?;
        for ((f, closed), lim) in flow.flows.iter().zip(&state.line_status).zip(&self.limits) {
            if *closed && f.abs() > lim + FLOW_TOL {
                return Ok(None);
            }
        }
        for island in &solver.partition().islands {
            let (lo, hi) = island.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), b| {
                let a = flow.angles[b.index()];
                (lo.min(a), hi.max(a))
            });
            if hi - lo > 2.0 * self.angle_bound {
                return Ok(None);
            }
        }
        Ok(Some(target.iter().sum()))
    }

    /// Whether the all-in-service network serves all demand at every hour.
    /// Checked once at the largest load factor.
    pub fn all_up_secure(&mut self) -> Result<bool> {
        if let Some(v) = self.all_up_secure {
            return Ok(v);
        }
        let lf = match self.case.load_profile() {
            Some(p) => p.iter().cloned().fold(0.0, f64::max),
            None => 1.0,
        };
        let has_pmin = self.case.generators().iter().any(|g| g.p_min > 0.0);
        let state = TopologyState::intact(self.case);
        let served = self.served(&state, lf)?;
        let secure = !has_pmin && self.case.total_peak_load() * lf - served <= SHORTFALL_TOL_MW;
        self.all_up_secure = Some(secure);
        Ok(secure)
    }

    /// Disruptions of one sampled year.
    pub fn evaluate(&mut self, timeline: &YearTimeline) -> Result<Vec<DisruptionRecord>> {
        let case = self.case;
        let skip_all_up = self.all_up_secure()?;
        let intact = TopologyState::intact(case);

        // Segments covering the year: (start, end, failed components).
        let mut segments: Vec<(u32, u32, &[Component])> = Vec::new();
        let mut cursor = 0;
        for ev in &timeline.outage_events {
            if ev.start_hour > cursor && !skip_all_up {
                segments.push((cursor, ev.start_hour, &[]));
            }
            segments.push((ev.start_hour, ev.end_hour, &ev.components));
            cursor = ev.end_hour;
        }
        if cursor < YEAR_HOURS && !skip_all_up {
            segments.push((cursor, YEAR_HOURS, &[]));
        }

        let profiled = case.load_profile().is_some();
        let peak = case.total_peak_load();
        let mut records: Vec<DisruptionRecord> = Vec::new();
        let mut push = |hour: u32, hours: u32, shortfall: f64| {
            if shortfall <= SHORTFALL_TOL_MW {
                return;
            }
            match records.last_mut() {
                Some(r) if r.start_hour + r.duration_hours == hour => {
                    r.duration_hours += hours;
                    r.energy_not_supplied_mwh += shortfall * f64::from(hours);
                }
                _ => records.push(DisruptionRecord {
                    start_hour: hour,
                    duration_hours: hours,
                    energy_not_supplied_mwh: shortfall * f64::from(hours),
                }),
            }
        };

        for (start, end, failed) in segments {
            let mut state = intact.clone();
            for c in failed {
                match c {
                    Component::Line(l) => state.line_status[l.index()] = false,
                    Component::Generator(g) => state.generator_status[g.index()] = false,
                }
            }
            let wrap = |hour: u32, e: Error| Error::AtHour {
                hour,
                source: Box::new(e),
            };
            if profiled {
                for h in start..end {
                    let lf = case.load_factor(h as usize);
                    let served = self.served(&state, lf).map_err(|e| wrap(h, e))?;
                    push(h, 1, peak * lf - served);
                }
            } else {
                let served = self.served(&state, 1.0).map_err(|e| wrap(start, e))?;
                push(start, end - start, peak - served);
            }
        }
        Ok(records)
    }
}

/// Disruption records of one year using thermal ratings as line limits.
pub fn evaluate_curtailment(case: &NetworkCase, timeline: &YearTimeline) -> Result<Vec<DisruptionRecord>> {
    CurtailmentEvaluator::new(case).evaluate(timeline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case_file::load_case;
    use crate::reliability::timeline::overlap_windows;

    fn two_bus(second_gen: bool) -> NetworkCase {
        let extra = if second_gen {
            r#",{"id":2,"bus":2,"pmin_mw":0,"pmax_mw":100,"lambda_per_yr":0,"mu_per_yr":0}"#
        } else {
            ""
        };
        load_case(&format!(
            r#"{{"base_mva":100,"buses":[{{"id":1,"name":"a"}},{{"id":2,"name":"b"}}],
            "lines":[{{"id":1,"from":1,"to":2,"b_pu":10,"rating_mw":200,"lambda_per_yr":1,"mu_per_yr":100}},
                     {{"id":2,"from":1,"to":2,"b_pu":10,"rating_mw":200,"lambda_per_yr":1,"mu_per_yr":100}}],
            "generators":[{{"id":1,"bus":1,"pmin_mw":0,"pmax_mw":100,"lambda_per_yr":4,"mu_per_yr":87.6}}{extra}],
            "loads":[{{"bus":2,"peak_mw":100}}]}}"#
        ))
        .unwrap()
    }

    fn timeline(case: &NetworkCase, outages: Vec<Vec<(u32, u32)>>) -> YearTimeline {
        let n_lines = case.line_count();
        YearTimeline {
            outage_events: overlap_windows(&outages, n_lines),
            component_outages: outages,
            n_lines,
        }
    }

    #[test]
    fn all_up_year_has_no_records() {
        let case = two_bus(false);
        let tl = timeline(&case, vec![vec![], vec![], vec![]]);
        assert!(evaluate_curtailment(&case, &tl).unwrap().is_empty());
    }

    #[test]
    fn generator_outage_curtails_everything() {
        let case = two_bus(false);
        let tl = timeline(&case, vec![vec![], vec![], vec![(500, 510)]]);
        let recs = evaluate_curtailment(&case, &tl).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].duration_hours, 10);
        assert!((recs[0].energy_not_supplied_mwh - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn redundant_line_outage_is_secure() {
        let case = two_bus(false);
        let tl = timeline(&case, vec![vec![(10, 40)], vec![], vec![]]);
        assert!(evaluate_curtailment(&case, &tl).unwrap().is_empty());
    }

    #[test]
    fn contiguous_shortfall_windows_merge() {
        // Both lines out [100,120) then the generator out [110,130): the load
        // is short throughout [100,130).
        let case = two_bus(false);
        let tl = timeline(&case, vec![vec![(100, 120)], vec![(100, 120)], vec![(110, 130)]]);
        let recs = evaluate_curtailment(&case, &tl).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].start_hour, 100);
        assert_eq!(recs[0].duration_hours, 30);
        assert!((recs[0].energy_not_supplied_mwh - 3000.0).abs() < 1e-9);
    }

    #[test]
    fn local_generation_covers_islanded_load() {
        let case = two_bus(true);
        let tl = timeline(&case, vec![vec![(100, 120)], vec![(100, 120)], vec![], vec![]]);
        assert!(evaluate_curtailment(&case, &tl).unwrap().is_empty());
    }

    #[test]
    fn screening_agrees_with_lp() {
        let case = crate::rts24::base_case(false);
        let mut ev = CurtailmentEvaluator::new(&case);
        let limits = thermal_limits(&case);
        let opts = DispatchOptions {
            canonical: false,
            ..Default::default()
        };
        let mut states = Vec::new();
        for l in 0..case.line_count() {
            let mut s = TopologyState::intact(&case);
            s.line_status[l] = false;
            s.generator_status[(l * 7) % case.generator_count()] = false;
            s.generator_status[(l * 11 + 3) % case.generator_count()] = false;
            states.push(s);
        }
        for s in states {
            let a = ev.served(&s, 1.0).unwrap();
            let b = max_served_dispatch(&case, &s, &limits, &opts).unwrap().total_served;
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }
}
