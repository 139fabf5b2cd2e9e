use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use r3grid::dispatch::thermal_limits;
use r3grid::reliability::sampling::RngUniform;
use r3grid::reliability::{simulate_year, year_rng, CurtailmentEvaluator};
use r3grid::{
    initiating_events, max_served_dispatch, rts24, run_sweep, solve_dc_flow, DispatchOptions, InjectionVector,
    LineId, TopologyState,
};

fn dc_flow(c: &mut Criterion) {
    let case = rts24::base_case(false);
    let state = TopologyState::intact(&case);
    let total = case.total_peak_load();
    let cap: f64 = case.generators().iter().map(|g| g.p_max).sum();
    let mut inj = vec![0.0; case.bus_count()];
    for g in case.generators() {
        inj[g.bus.index()] += g.p_max * total / cap;
    }
    for l in case.loads() {
        inj[l.bus.index()] -= l.p_peak;
    }
    let inj = InjectionVector(inj);
    c.bench_function("dc_flow_rts24", |b| b.iter(|| solve_dc_flow(&case, black_box(&state), &inj).unwrap()));
}

fn dispatch_lp(c: &mut Criterion) {
    let case = rts24::base_case(false);
    let state = TopologyState::intact(&case).with_lines_open([LineId(11), LineId(23), LineId(27)]);
    let limits = thermal_limits(&case);
    let opts = DispatchOptions::default();
    c.bench_function("dispatch_lp_rts24", |b| {
        b.iter(|| max_served_dispatch(&case, black_box(&state), &limits, &opts).unwrap())
    });
}

fn year(c: &mut Criterion) {
    let case = rts24::base_case(false);
    let mut year_index = 0usize;
    c.bench_function("simulate_and_evaluate_year_rts24", |b| {
        b.iter(|| {
            year_index += 1;
            let mut rng = RngUniform(year_rng(42, year_index));
            let timeline = simulate_year(&case, &mut rng);
            CurtailmentEvaluator::new(&case).evaluate(&timeline).unwrap()
        })
    });
}

fn sweep(c: &mut Criterion) {
    let case = rts24::base_case(false);
    let events = initiating_events(&case, &rts24::VariantManifest::builtin().event_exclusions()).unwrap();
    let alphas = [1.0, 1.1, 1.2, 1.3, 1.4, 1.5];
    let mut g = c.benchmark_group("cascade");
    g.sample_size(10);
    g.bench_function("sweep_rts24_114", |b| b.iter(|| run_sweep(&case, &alphas, &events, false).unwrap()));
    g.finish();
}

criterion_group!(benches, dc_flow, dispatch_lp, year, sweep);
criterion_main!(benches);
