//! Shared fixtures and independent oracles for integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use r3grid::{Bus, BusId, GenId, Generator, Line, LineId, Load, NetworkCase, TopologyState};

pub fn bus(i: usize) -> Bus {
    Bus {
        id: BusId::from_index(i),
        name: format!("b{}", i + 1),
    }
}

pub fn line(k: usize, from: usize, to: usize, b: f64, rating: f64) -> Line {
    Line {
        id: LineId::from_index(k),
        from_bus: BusId::from_index(from),
        to_bus: BusId::from_index(to),
        susceptance: b,
        rating,
        failure_rate: 0.0,
        repair_rate: 0.0,
    }
}

pub fn gen(k: usize, at: usize, p_min: f64, p_max: f64) -> Generator {
    Generator {
        id: GenId::from_index(k),
        bus: BusId::from_index(at),
        p_min,
        p_max,
        failure_rate: 0.0,
        repair_rate: 0.0,
    }
}

pub fn load(at: usize, peak: f64) -> Load {
    Load {
        bus: BusId::from_index(at),
        p_peak: peak,
    }
}

pub fn case(n_bus: usize, lines: Vec<Line>, gens: Vec<Generator>, loads: Vec<Load>) -> NetworkCase {
    NetworkCase::new(100.0, (0..n_bus).map(bus).collect(), lines, gens, loads, None, None).unwrap()
}

/// The unit-susceptance triangle: generator 100 MW at bus 1, loads 60 / 40 at buses 2 / 3.
pub fn triangle(rating: f64) -> NetworkCase {
    case(
        3,
        vec![line(0, 0, 1, 1.0, rating), line(1, 0, 2, 1.0, rating), line(2, 1, 2, 1.0, rating)],
        vec![gen(0, 0, 0.0, 100.0)],
        vec![load(1, 60.0), load(2, 40.0)],
    )
}

/// A connected random network: a random spanning tree plus extra edges.
pub fn random_network(rng: &mut ChaCha8Rng, max_bus: usize, max_lines: usize) -> NetworkCase {
    let n = rng.random_range(3..=max_bus);
    let mut edges = Vec::new();
    for i in 1..n {
        edges.push((rng.random_range(0..i), i));
    }
    let extra = rng.random_range(0..=max_lines.saturating_sub(n - 1));
    for _ in 0..extra {
        let a = rng.random_range(0..n);
        let b = (a + rng.random_range(1..n)) % n;
        edges.push((a, b));
    }
    let lines = edges
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| line(k, a, b, rng.random_range(1.0..20.0), rng.random_range(20.0..200.0)))
        .collect();
    let n_gen = rng.random_range(1..=3.min(n));
    let gens = (0..n_gen)
        .map(|k| gen(k, rng.random_range(0..n), 0.0, rng.random_range(20.0..200.0)))
        .collect();
    let mut loads = Vec::new();
    for b in 0..n {
        if rng.random_bool(0.7) {
            loads.push(load(b, rng.random_range(5.0..80.0)));
        }
    }
    let loads = if loads.is_empty() { vec![load(n - 1, 30.0)] } else { loads };
    case(n, lines, gens, loads)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Maximum served demand by enumerating every vertex of the feasible region.
///
/// Variables are generator outputs, served loads and bus angles (radians);
/// line flows are substituted by their angle expressions. Returns `None`
/// when no vertex is feasible.
pub fn vertex_enumeration_served(
    case: &NetworkCase,
    state: &TopologyState,
    limits: &[f64],
    angle_bound: f64,
    load_factor: f64,
) -> Option<f64> {
    let ng = case.generator_count();
    let nd = case.loads().len();
    let nb = case.bus_count();
    let n = ng + nd + nb;
    let base = case.base_mva();

    let mut eq: Vec<Vec<f64>> = vec![vec![0.0; n]; nb];
    for (k, g) in case.generators().iter().enumerate() {
        eq[g.bus.index()][k] += 1.0;
    }
    for (k, l) in case.loads().iter().enumerate() {
        eq[l.bus.index()][ng + k] -= 1.0;
    }
    // Inequalities a·x <= c.
    let mut ineq: Vec<(Vec<f64>, f64)> = Vec::new();
    for (k, (g, on)) in case.generators().iter().zip(&state.generator_status).enumerate() {
        let (lo, hi) = if *on { (g.p_min, g.p_max) } else { (0.0, 0.0) };
        let mut a = vec![0.0; n];
        a[k] = 1.0;
        ineq.push((a.clone(), hi));
        a[k] = -1.0;
        ineq.push((a, -lo));
    }
    for (k, l) in case.loads().iter().enumerate() {
        let mut a = vec![0.0; n];
        a[ng + k] = 1.0;
        ineq.push((a.clone(), l.p_peak * load_factor));
        a[ng + k] = -1.0;
        ineq.push((a, 0.0));
    }
    for b in 0..nb {
        let mut a = vec![0.0; n];
        a[ng + nd + b] = 1.0;
        ineq.push((a.clone(), angle_bound));
        a[ng + nd + b] = -1.0;
        ineq.push((a, angle_bound));
    }
    for ((l, closed), lim) in case.lines().iter().zip(&state.line_status).zip(limits) {
        if !*closed {
            continue;
        }
        let (i, j) = (l.from_bus.index(), l.to_bus.index());
        let c = base * l.susceptance;
        // flow = c·(θi − θj); leaves i, enters j
        eq[i][ng + nd + i] -= c;
        eq[i][ng + nd + j] += c;
        eq[j][ng + nd + i] += c;
        eq[j][ng + nd + j] -= c;
        let mut a = vec![0.0; n];
        a[ng + nd + i] = c;
        a[ng + nd + j] = -c;
        ineq.push((a.clone(), *lim));
        ineq.push((a.iter().map(|v| -v).collect(), *lim));
    }

    // Independent subset of the equality rows.
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for r in eq {
        let mut trial = rows.clone();
        trial.push(r.clone());
        let m = DMatrix::from_fn(trial.len(), n, |i, j| trial[i][j]);
        if m.rank(1e-9) == trial.len() {
            rows = trial;
        }
    }
    let need = n - rows.len();
    let mut best: Option<f64> = None;
    let m_ineq = ineq.len();
    let mut idx: Vec<usize> = (0..need).collect();
    loop {
        let mut m = DMatrix::zeros(n, n);
        let mut rhs = DVector::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            for j in 0..n {
                m[(i, j)] = r[j];
            }
        }
        for (p, &s) in idx.iter().enumerate() {
            for j in 0..n {
                m[(rows.len() + p, j)] = ineq[s].0[j];
            }
            rhs[rows.len() + p] = ineq[s].1;
        }
        if let Some(x) = m.clone().lu().solve(&rhs) {
            let resid = (&m * &x - &rhs).amax();
            let feasible = resid < 1e-7
                && ineq
                    .iter()
                    .all(|(a, c)| a.iter().zip(x.iter()).map(|(p, q)| p * q).sum::<f64>() <= c + 1e-7);
            if feasible {
                let served: f64 = (0..nd).map(|k| x[ng + k]).sum();
                best = Some(best.map_or(served, |b: f64| b.max(served)));
            }
        }
        // Next combination.
        let mut i = need;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < m_ineq - need + i {
                idx[i] += 1;
                for j in i + 1..need {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        if need == 0 {
            return best;
        }
    }
}

/// Brute-force best closure set: all subsets of `open` with 1..=n_c members
/// by bitmask, scored by the dispatch model with the recovery tie rule.
pub fn brute_force_closure(
    case: &NetworkCase,
    state: &TopologyState,
    limits: &[f64],
    n_c: usize,
) -> (Vec<LineId>, f64) {
    let open = state.open_lines();
    let opts = r3grid::DispatchOptions {
        canonical: false,
        ..Default::default()
    };
    let mut best: Option<(Vec<LineId>, f64)> = None;
    for mask in 1u32..(1 << open.len()) {
        if mask.count_ones() as usize > n_c {
            continue;
        }
        let set: Vec<LineId> = (0..open.len()).filter(|i| mask & (1 << i) != 0).map(|i| open[i]).collect();
        let mut trial = state.clone().with_lines_closed(set.iter().copied());
        trial.generator_status.iter_mut().for_each(|g| *g = true);
        let served = r3grid::max_served_dispatch(case, &trial, limits, &opts).unwrap().total_served;
        let better = match &best {
            None => true,
            Some((bs, bv)) => {
                if served > bv + 1e-6 {
                    true
                } else if *bv > served + 1e-6 {
                    false
                } else if set.len() != bs.len() {
                    set.len() > bs.len()
                } else {
                    set < *bs
                }
            }
        };
        if better {
            best = Some((set, served));
        }
    }
    best.expect("at least one open line")
}
