use anyhow::Result;

use super::report::{self, R3Report};
use super::{reliability, resilience, robustness};
use crate::args::PipelineArgs;
use crate::manifest::load_case;

/// Runs the three assessments for every requested variant in turn, then the report.
pub fn run(args: &PipelineArgs) -> Result<R3Report> {
    let workers = args.run.worker_count();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let out = &args.run.out;
    for &v in &args.variants {
        let case = load_case(args.case.as_deref(), v)?;
        reliability::execute(&case, &args.mc, args.angle_bound, workers, out)?;
        pool.install(|| robustness::execute(&case, &args.cascade, out))?;
        let start = resilience::start_from_robustness(&case, out)?;
        pool.install(|| resilience::execute(&case, start, &args.recovery, args.angle_bound, out))?;
    }
    report::generate(out, &args.variants)
}
