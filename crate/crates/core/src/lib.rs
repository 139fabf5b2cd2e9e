//! Reliability, robustness and resilience assessment of DC-modeled
//! transmission networks.
//!
//! * [`reliability`]: sequential Monte Carlo adequacy/security indices
//!   (EENS, EDNS, EFLC, LOLE, LOLP, ADLC).
//! * [`cascade`]: overload-driven cascading failure with island balancing
//!   and satisfied-demand tracking.
//! * [`recovery`]: staged restoration choosing up to `n_c` line closures per
//!   step, with the energy-not-supplied area metric.
//!
//! All three rest on [`powerflow`] (DC flow) and [`dispatch`] (an exact
//! maximum-served-demand LP solved by [`lp`]).

pub mod case_file;
pub mod cascade;
pub mod dispatch;
pub mod error;
pub mod lp;
pub mod model;
pub mod powerflow;
pub mod recovery;
pub mod reliability;
pub mod rts24;
pub mod topology;

pub use case_file::{load_case, load_case_file, to_json};
pub use dispatch::{max_served_dispatch, DispatchOptions, DispatchSolution};
pub use error::{Error, Result};
pub use model::{
    Bus, BusId, GenId, Generator, IslandPartition, Line, LineId, Load, NetworkCase, TopologyState,
};
pub use powerflow::{build_susceptance, solve_dc_flow, FlowSolution, InjectionVector};
pub use rts24::build_variant;
pub use topology::{connected_components, incident_lines};
pub use cascade::{
    initiating_events, island_balance, line_capacities, run_cascade, run_sweep, CascadeConfig, CascadeStage,
    CascadeTrace, InitiatingEvent, SweepSummary,
};
pub use recovery::{ens_above_curve, recovery_step, run_recovery, RecoveryConfig, RecoveryStepResult, RecoveryTrace};
pub use reliability::{compute_indicators, run_monte_carlo, MonteCarloConfig, ReliabilityIndicators};
