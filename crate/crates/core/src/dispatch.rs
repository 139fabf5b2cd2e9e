//! Maximum served-demand dispatch under DC network constraints.
//!
//! For a fixed topology the model is
//!
//! ```text
//! max  Σ_d s_d
//! s.t. p_min·on_g <= P_g <= p_max·on_g
//!      0 <= s_d <= peak_d·load_factor
//!      -angle_bound <= θ_n <= angle_bound
//!      -limit_k <= P_k <= limit_k,  P_k = B_k·(θ_from − θ_to)·base   (closed k)
//!      Σ_{k into n} P_k − Σ_{k out of n} P_k + Σ_{g at n} P_g − Σ_{d at n} s_d = 0
//! ```
//!
//! Open lines carry no flow and impose no angle coupling. Among alternate
//! optima the solution minimizing generator outputs lexicographically by id
//! is returned when [`DispatchOptions::canonical`] is set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, SparseVec};
use crate::model::{NetworkCase, TopologyState};

/// Default bus angle bound, radians.
pub const DEFAULT_ANGLE_BOUND: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispatchOptions {
    /// Per-unit multiplier on every load's peak.
    pub load_factor: f64,
    /// Symmetric bus angle bound, radians.
    pub angle_bound: f64,
    /// Select the lexicographically smallest generator vector among optima.
    pub canonical: bool,
}

impl Default for DispatchOptions {
    fn default() -> Self {
        DispatchOptions {
            load_factor: 1.0,
            angle_bound: DEFAULT_ANGLE_BOUND,
            canonical: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchSolution {
    /// Output per generator, MW.
    pub gen_output: Vec<f64>,
    /// Served demand per load record, MW.
    pub served_load: Vec<f64>,
    /// Line flows, MW (zero on open lines).
    pub flows: Vec<f64>,
    /// Bus angles, radians.
    pub angles: Vec<f64>,
    pub total_served: f64,
    pub iterations: usize,
}

/// Solves the maximum served-demand problem exactly.
///
/// `line_limits` holds one MW limit per line; entries of open lines are ignored.
pub fn max_served_dispatch(
    case: &NetworkCase,
    state: &TopologyState,
    line_limits: &[f64],
    options: &DispatchOptions,
) -> Result<DispatchSolution> {
    state.check_against(case)?;
    if line_limits.len() != case.line_count() {
        return Err(Error::Precondition(format!(
            "{} line limits for {} lines",
            line_limits.len(),
            case.line_count()
        )));
    }
    if !(options.angle_bound.is_finite() && options.angle_bound > 0.0) {
        return Err(Error::Domain("angle bound must be positive".into()));
    }
    if !(options.load_factor.is_finite() && options.load_factor >= 0.0) {
        return Err(Error::Domain("load factor must be non-negative".into()));
    }

    let base = case.base_mva();
    let n_bus = case.bus_count();
    let mut lp = LinearProgram::new();
    let mut balance: Vec<SparseVec> = vec![Vec::new(); n_bus];

    let gen_vars: Vec<usize> = case
        .generators()
        .iter()
        .zip(&state.generator_status)
        .map(|(g, on)| {
            let v = if *on {
                lp.add_var(g.p_min, g.p_max)
            } else {
                lp.add_var(0.0, 0.0)
            };
            balance[g.bus.index()].push((v, 1.0));
            v
        })
        .collect();
    let load_vars: Vec<usize> = case
        .loads()
        .iter()
        .map(|l| {
            let v = lp.add_var(0.0, l.p_peak * options.load_factor);
            balance[l.bus.index()].push((v, -1.0));
            v
        })
        .collect();
    // Angles are carried in MW-scaled units (θ·base) to keep coefficients small.
    let psi_bound = options.angle_bound * base;
    let angle_vars: Vec<usize> = (0..n_bus).map(|_| lp.add_var(-psi_bound, psi_bound)).collect();
    let mut flow_vars = vec![None; case.line_count()];
    for ((line, closed), &limit) in case.lines().iter().zip(&state.line_status).zip(line_limits) {
        if !*closed {
            continue;
        }
        if !(limit.is_finite() && limit >= 0.0) {
            return Err(Error::Domain(format!("line {} has invalid limit {limit}", line.id)));
        }
        let f = lp.add_var(-limit, limit);
        let (i, j) = (line.from_bus.index(), line.to_bus.index());
        lp.add_eq(
            vec![
                (f, 1.0),
                (angle_vars[i], -line.susceptance),
                (angle_vars[j], line.susceptance),
            ],
            0.0,
        );
        balance[i].push((f, -1.0));
        balance[j].push((f, 1.0));
        flow_vars[line.id.index()] = Some(f);
    }
    for row in balance {
        if !row.is_empty() {
            lp.add_eq(row, 0.0);
        }
    }

    let mut objectives: Vec<SparseVec> = vec![load_vars.iter().map(|&v| (v, 1.0)).collect()];
    if options.canonical {
        objectives.extend(gen_vars.iter().map(|&v| vec![(v, -1.0)]));
    }
    let sol = lp.maximize_lexicographic(&objectives).map_err(|e| match e {
        Error::Infeasible(msg) => Error::Infeasible(format!(
            "dispatch model infeasible ({msg}); generator minimum outputs exceed what the islands can absorb"
        )),
        other => other,
    })?;
    let x = &sol.x;

    let gen_output = gen_vars.iter().map(|&v| x[v]).collect();
    let served_load: Vec<f64> = load_vars.iter().map(|&v| x[v]).collect();
    let flows = flow_vars.iter().map(|f| f.map_or(0.0, |v| x[v])).collect();
    let angles = angle_vars.iter().map(|&v| x[v] / base).collect();
    let total_served = served_load.iter().sum();
    Ok(DispatchSolution {
        gen_output,
        served_load,
        flows,
        angles,
        total_served,
        iterations: sol.iterations,
    })
}

/// Line limits equal to thermal ratings.
pub fn thermal_limits(case: &NetworkCase) -> Vec<f64> {
    case.lines().iter().map(|l| l.rating).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case_file::load_case;
    use approx::assert_abs_diff_eq;

    fn two_bus(limit: f64) -> NetworkCase {
        load_case(&format!(
            r#"{{"base_mva":100,"buses":[{{"id":1,"name":"a"}},{{"id":2,"name":"b"}}],
            "lines":[{{"id":1,"from":1,"to":2,"b_pu":10,"rating_mw":{limit},"lambda_per_yr":0,"mu_per_yr":0}}],
            "generators":[{{"id":1,"bus":1,"pmin_mw":0,"pmax_mw":100,"lambda_per_yr":0,"mu_per_yr":0}}],
            "loads":[{{"bus":2,"peak_mw":80}}]}}"#
        ))
        .unwrap()
    }

    #[test]
    fn line_limited_transfer() {
        let case = two_bus(50.0);
        let st = TopologyState::intact(&case);
        let sol = max_served_dispatch(&case, &st, &thermal_limits(&case), &Default::default()).unwrap();
        assert_eq!(sol.total_served, 50.0);
        assert_abs_diff_eq!(sol.flows[0], 50.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.gen_output[0], 50.0, epsilon = 1e-9);
    }

    #[test]
    fn ample_limits_serve_everything() {
        let case = two_bus(500.0);
        let st = TopologyState::intact(&case);
        let sol = max_served_dispatch(&case, &st, &thermal_limits(&case), &Default::default()).unwrap();
        assert_abs_diff_eq!(sol.total_served, 80.0, epsilon = 1e-9);
    }

    #[test]
    fn island_without_generation_serves_nothing() {
        let case = two_bus(500.0);
        let st = TopologyState::all_open(&case);
        let sol = max_served_dispatch(&case, &st, &thermal_limits(&case), &Default::default()).unwrap();
        assert_eq!(sol.total_served, 0.0);
        assert_eq!(sol.flows[0], 0.0);
    }

    #[test]
    fn unavailable_generator_produces_nothing() {
        let case = two_bus(500.0);
        let mut st = TopologyState::intact(&case);
        st.generator_status[0] = false;
        let sol = max_served_dispatch(&case, &st, &thermal_limits(&case), &Default::default()).unwrap();
        assert_eq!(sol.total_served, 0.0);
        assert_eq!(sol.gen_output[0], 0.0);
    }

    #[test]
    fn angle_bound_limits_transfer() {
        // b = 10 pu, base 100: 0.02 rad spread => at most 20 MW per 0.01 rad each side.
        let case = two_bus(500.0);
        let st = TopologyState::intact(&case);
        let opts = DispatchOptions {
            angle_bound: 0.01,
            ..Default::default()
        };
        let sol = max_served_dispatch(&case, &st, &thermal_limits(&case), &opts).unwrap();
        assert_abs_diff_eq!(sol.total_served, 20.0, epsilon = 1e-9);
    }
}
