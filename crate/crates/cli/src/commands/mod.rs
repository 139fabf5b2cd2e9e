pub mod pipeline;
pub mod reliability;
pub mod report;
pub mod resilience;
pub mod robustness;
