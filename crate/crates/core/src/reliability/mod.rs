//! Sequential Monte Carlo reliability assessment.

pub mod curtailment;
pub mod indicators;
pub mod montecarlo;
pub mod sampling;
pub mod timeline;

pub use curtailment::{evaluate_curtailment, CurtailmentEvaluator, DisruptionRecord};
pub use indicators::{compute_indicators, indicators_from_summaries, ReliabilityIndicators, YearSummary};
pub use montecarlo::{run_monte_carlo, year_rng, MonteCarloConfig, MonteCarloOutcome};
pub use sampling::{sample_ttf, sample_ttr, TwoStateParams, UniformSource};
pub use timeline::{simulate_year, Component, OutageEvent, YearTimeline};
