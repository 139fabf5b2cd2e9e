//! Sequential Monte Carlo driver with per-year random streams.

use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispatch::DEFAULT_ANGLE_BOUND;
use crate::error::{Error, Result};
use crate::model::NetworkCase;

use super::curtailment::CurtailmentEvaluator;
use super::indicators::{indicators_from_summaries, ReliabilityIndicators, RunningEens, YearSummary};
use super::sampling::RngUniform;
use super::timeline::simulate_year;

/// Years simulated per parallel batch. Fixed so that the set of simulated
/// years never depends on the worker count.
const BATCH_YEARS: usize = 64;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub seed: u64,
    pub max_years: usize,
    pub cov_threshold: f64,
    /// Convergence is not tested before this many years.
    pub min_years: usize,
    pub workers: usize,
    pub angle_bound: f64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        MonteCarloConfig {
            seed: 1,
            max_years: 1500,
            cov_threshold: 0.05,
            min_years: 10,
            workers: 1,
            angle_bound: DEFAULT_ANGLE_BOUND,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonteCarloOutcome {
    pub indicators: ReliabilityIndicators,
    pub yearly: Vec<YearSummary>,
    /// Convergence statistic after each year.
    pub cov_trace: Vec<Option<f64>>,
    pub lp_solves: usize,
}

/// The RNG for one simulated year: the seed's ChaCha8 generator on stream `year`.
pub fn year_rng(seed: u64, year: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(year as u64);
    rng
}

/// Simulates years until the EENS coefficient of variation falls below the
/// threshold (after `min_years`) or `max_years` is reached.
pub fn run_monte_carlo(case: &NetworkCase, config: &MonteCarloConfig) -> Result<MonteCarloOutcome> {
    if config.max_years == 0 {
        return Err(Error::Precondition("max_years must be at least 1".into()));
    }
    if !(config.cov_threshold > 0.0) {
        return Err(Error::Domain("cov threshold must be positive".into()));
    }
    let workers = config.workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    let evaluators: Vec<Mutex<CurtailmentEvaluator>> = (0..workers)
        .map(|_| Mutex::new(CurtailmentEvaluator::with_angle_bound(case, config.angle_bound)))
        .collect();

    let mut yearly = Vec::new();
    let mut cov_trace = Vec::new();
    let mut running = RunningEens::default();
    let mut converged = false;
    'outer: while yearly.len() < config.max_years {
        let first = yearly.len();
        let last = (first + BATCH_YEARS).min(config.max_years);
        let batch: Vec<Result<YearSummary>> = pool.install(|| {
            (first..last)
                .into_par_iter()
                .map(|year| {
                    let slot = rayon::current_thread_index().unwrap_or(0) % workers;
                    let mut ev = evaluators[slot].lock().expect("evaluator lock");
                    let mut src = RngUniform(year_rng(config.seed, year));
                    let tl = simulate_year(case, &mut src);
                    let records = ev.evaluate(&tl)?;
                    Ok(YearSummary::from_records(&records))
                })
                .collect()
        });
        for summary in batch {
            let summary = summary?;
            running.push(summary.ens_mwh);
            yearly.push(summary);
            let cov = running.cov();
            cov_trace.push(cov);
            if yearly.len() >= config.min_years && cov.is_some_and(|c| c < config.cov_threshold) {
                converged = true;
                break 'outer;
            }
        }
        log::debug!(
            "{} years simulated, EENS cov {:?}",
            yearly.len(),
            cov_trace.last().copied().flatten()
        );
    }

    let mut indicators = indicators_from_summaries(&yearly)?;
    indicators.converged = converged;
    let lp_solves = evaluators
        .iter()
        .map(|e| e.lock().expect("evaluator lock").lp_solves())
        .sum();
    Ok(MonteCarloOutcome {
        indicators,
        yearly,
        cov_trace,
        lp_solves,
    })
}
