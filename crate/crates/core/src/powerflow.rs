//! DC power flow: nodal susceptance matrix and per-island angle solution.
//!
//! Line flow convention: `P_k = B_k·(θ_from − θ_to)·base_mva`, positive
//! from the `from` bus to the `to` bus. Injections are generation minus
//! load, MW.

use nalgebra::{DMatrix, DVector, LU, Dyn};

use crate::error::{Error, Result};
use crate::model::{BusId, IslandPartition, NetworkCase, TopologyState};
use crate::topology::components_by_status;

/// Per-island injections must sum to zero within this many MW.
pub const BALANCE_TOL_MW: f64 = 1e-6;
/// Relative pivot threshold below which a reduced system counts as singular.
pub const SINGULAR_PIVOT_TOL: f64 = 1e-10;

/// Net injection per bus, MW (generation minus load).
#[derive(Debug, Clone, PartialEq)]
pub struct InjectionVector(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSolution {
    /// Bus angles, radians; the smallest bus of each island is the 0 reference.
    pub angles: Vec<f64>,
    /// Line flows, MW; zero for open lines.
    pub flows: Vec<f64>,
    pub islands: IslandPartition,
}

/// Nodal susceptance matrix (per unit) over closed lines.
pub fn build_susceptance(case: &NetworkCase, state: &TopologyState) -> DMatrix<f64> {
    let n = case.bus_count();
    let mut b = DMatrix::zeros(n, n);
    for (line, closed) in case.lines().iter().zip(&state.line_status) {
        if !*closed {
            continue;
        }
        let (i, j) = (line.from_bus.index(), line.to_bus.index());
        let s = line.susceptance;
        b[(i, i)] += s;
        b[(j, j)] += s;
        b[(i, j)] -= s;
        b[(j, i)] -= s;
    }
    b
}

/// Solves the DC flow for the given topology and balanced injections.
pub fn solve_dc_flow(
    case: &NetworkCase,
    state: &TopologyState,
    injections: &InjectionVector,
) -> Result<FlowSolution> {
    DcFlowSolver::new(case, &state.line_status)?.solve(case, injections)
}

struct IslandSystem {
    buses: Vec<usize>,
    /// LU of the reduced matrix (reference bus removed); `None` for singletons.
    lu: Option<LU<f64, Dyn, Dyn>>,
}

/// Factorized DC flow model for one line-status vector, reusable across
/// many injection patterns.
pub struct DcFlowSolver {
    line_status: Vec<bool>,
    partition: IslandPartition,
    systems: Vec<IslandSystem>,
}

impl DcFlowSolver {
    pub fn new(case: &NetworkCase, line_status: &[bool]) -> Result<Self> {
        let partition = components_by_status(case, line_status);
        let n = case.bus_count();
        let mut local = vec![usize::MAX; n];
        let mut systems = Vec::with_capacity(partition.islands.len());
        let member = partition.membership(n);
        for (k, island) in partition.islands.iter().enumerate() {
            let buses: Vec<usize> = island.iter().map(|b| b.index()).collect();
            if buses.len() == 1 {
                systems.push(IslandSystem { buses, lu: None });
                continue;
            }
            // Reduced indices skip the reference (first, smallest id) bus.
            for (pos, &b) in buses.iter().enumerate() {
                local[b] = pos;
            }
            let size = buses.len() - 1;
            let mut m = DMatrix::<f64>::zeros(size, size);
            for (line, closed) in case.lines().iter().zip(line_status) {
                if !*closed {
                    continue;
                }
                let (i, j) = (line.from_bus.index(), line.to_bus.index());
                if member[i] != k {
                    continue;
                }
                let s = line.susceptance;
                let (li, lj) = (local[i], local[j]);
                if li > 0 {
                    m[(li - 1, li - 1)] += s;
                }
                if lj > 0 {
                    m[(lj - 1, lj - 1)] += s;
                }
                if li > 0 && lj > 0 {
                    m[(li - 1, lj - 1)] -= s;
                    m[(lj - 1, li - 1)] -= s;
                }
            }
            let scale = m.diagonal().iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let lu = m.lu();
            let u = lu.u();
            let min_pivot = u.diagonal().iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
            if !(min_pivot > SINGULAR_PIVOT_TOL * scale.max(1.0)) {
                return Err(Error::Singular {
                    reference: island[0],
                });
            }
            systems.push(IslandSystem { buses, lu: Some(lu) });
        }
        Ok(DcFlowSolver {
            line_status: line_status.to_vec(),
            partition,
            systems,
        })
    }

    pub fn partition(&self) -> &IslandPartition {
        &self.partition
    }

    pub fn solve(&self, case: &NetworkCase, injections: &InjectionVector) -> Result<FlowSolution> {
        let n = case.bus_count();
        let p = &injections.0;
        if p.len() != n {
            return Err(Error::Precondition(format!(
                "injection vector has {} entries for {n} buses",
                p.len()
            )));
        }
        let base = case.base_mva();
        let mut angles = vec![0.0; n];
        for sys in &self.systems {
            let residual: f64 = sys.buses.iter().map(|&b| p[b]).sum();
            if residual.abs() > BALANCE_TOL_MW {
                return Err(Error::Unbalanced {
                    reference: BusId::from_index(sys.buses[0]),
                    residual_mw: residual,
                });
            }
            if let Some(lu) = &sys.lu {
                let rhs = DVector::from_iterator(
                    sys.buses.len() - 1,
                    sys.buses[1..].iter().map(|&b| p[b] / base),
                );
                let theta = lu.solve(&rhs).ok_or(Error::Singular {
                    reference: BusId::from_index(sys.buses[0]),
                })?;
                for (pos, &b) in sys.buses[1..].iter().enumerate() {
                    angles[b] = theta[pos];
                }
            }
        }
        let flows = case
            .lines()
            .iter()
            .zip(&self.line_status)
            .map(|(l, closed)| {
                if *closed {
                    l.susceptance * (angles[l.from_bus.index()] - angles[l.to_bus.index()]) * base
                } else {
                    0.0
                }
            })
            .collect();
        Ok(FlowSolution {
            angles,
            flows,
            islands: self.partition.clone(),
        })
    }
}
