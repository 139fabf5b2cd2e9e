//! Dense bounded-variable primal simplex.
//!
//! Solves `max c·x  s.t.  A x = b,  l <= x <= u` with finite bounds, for a
//! sequence of objectives optimized lexicographically: every later
//! objective is optimized over the optimal face of the earlier ones.
//!
//! Pivoting is deterministic: Dantzig pricing with lowest-index ties, and
//! Bland's rule after a run of degenerate pivots. Ratio-test ties go to the
//! largest pivot magnitude, then the lowest variable index.

use std::collections::VecDeque;

use crate::error::{Error, Result};

const FEAS_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_RUN_BEFORE_BLAND: usize = 50;
const LOG_DEPTH: usize = 32;

/// Sparse row or objective: (variable index, coefficient).
pub type SparseVec = Vec<(usize, f64)>;

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<(SparseVec, f64)>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// Value of each objective at `x`, in the order given.
    pub objective_values: Vec<f64>,
    pub iterations: usize,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable with bounds `[lower, upper]`; returns its index.
    pub fn add_var(&mut self, lower: f64, upper: f64) -> usize {
        debug_assert!(lower.is_finite() && upper.is_finite() && lower <= upper);
        self.lower.push(lower);
        self.upper.push(upper);
        self.lower.len() - 1
    }

    /// Adds the equality `Σ coef·x = rhs`.
    pub fn add_eq(&mut self, terms: SparseVec, rhs: f64) {
        self.rows.push((terms, rhs));
    }

    pub fn var_count(&self) -> usize {
        self.lower.len()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Maximizes each objective in turn over the optimal face of the previous ones.
    pub fn maximize_lexicographic(&self, objectives: &[SparseVec]) -> Result<LpSolution> {
        let mut tab = Tableau::build(self);
        tab.phase_one()?;
        let n = self.var_count();
        let mut objective_values = Vec::with_capacity(objectives.len());
        for obj in objectives {
            let mut cost = vec![0.0; tab.ncols];
            for &(j, c) in obj {
                cost[j] += c;
            }
            tab.optimize(&cost, "phase 2")?;
            tab.freeze_nonzero_reduced_costs();
        }
        let x = tab.primal_values();
        for obj in objectives {
            objective_values.push(obj.iter().map(|&(j, c)| c * x[j]).sum());
        }
        Ok(LpSolution {
            x: x[..n].to_vec(),
            objective_values,
            iterations: tab.iterations,
        })
    }

    pub fn maximize(&self, objective: SparseVec) -> Result<LpSolution> {
        self.maximize_lexicographic(std::slice::from_ref(&objective))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Status {
    Basic(usize),
    AtLower,
    AtUpper,
}

struct Tableau {
    m: usize,
    /// Structural plus one artificial per row.
    ncols: usize,
    n_struct: usize,
    /// Row-major m × ncols, equal to B⁻¹·[A' | I].
    t: Vec<f64>,
    /// Sign-adjusted original rows, kept for the final recomputation.
    a_rows: Vec<SparseVec>,
    b: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    status: Vec<Status>,
    /// Basic variable of each row.
    basis: Vec<usize>,
    /// Values of basic variables by row.
    beta: Vec<f64>,
    /// Reduced costs of the current objective.
    d: Vec<f64>,
    /// Columns that may no longer enter the basis.
    frozen: Vec<bool>,
    iterations: usize,
    max_iterations: usize,
    log: VecDeque<String>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n = lp.lower.len();
        let ncols = n + m;
        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        lower.extend(std::iter::repeat(0.0).take(m));
        upper.extend(std::iter::repeat(f64::INFINITY).take(m));

        let mut status = vec![Status::AtLower; ncols];
        let mut t = vec![0.0; m * ncols];
        let mut a_rows = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        for (i, (terms, rhs)) in lp.rows.iter().enumerate() {
            let residual = rhs - terms.iter().map(|&(j, a)| a * lp.lower[j]).sum::<f64>();
            let sign = if residual < 0.0 { -1.0 } else { 1.0 };
            let row: SparseVec = terms.iter().map(|&(j, a)| (j, sign * a)).collect();
            for &(j, a) in &row {
                t[i * ncols + j] += a;
            }
            t[i * ncols + n + i] = 1.0;
            a_rows.push(row);
            b.push(sign * rhs);
            beta.push(sign * residual);
            basis.push(n + i);
            status[n + i] = Status::Basic(i);
        }
        let mut frozen = vec![false; ncols];
        for j in 0..n {
            if lower[j] == upper[j] {
                frozen[j] = true;
            }
        }
        Tableau {
            m,
            ncols,
            n_struct: n,
            t,
            a_rows,
            b,
            lower,
            upper,
            status,
            basis,
            beta,
            d: vec![0.0; ncols],
            frozen,
            iterations: 0,
            max_iterations: 200 * (ncols + 10),
            log: VecDeque::with_capacity(LOG_DEPTH),
        }
    }

    fn value(&self, j: usize) -> f64 {
        match self.status[j] {
            Status::Basic(r) => self.beta[r],
            Status::AtLower => self.lower[j],
            Status::AtUpper => self.upper[j],
        }
    }

    fn phase_one(&mut self) -> Result<()> {
        let mut cost = vec![0.0; self.ncols];
        for c in cost.iter_mut().skip(self.n_struct) {
            *c = -1.0;
        }
        self.optimize(&cost, "phase 1")?;
        let infeasibility: f64 = (self.n_struct..self.ncols).map(|j| self.value(j)).sum();
        let scale = 1.0 + self.b.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if infeasibility > FEAS_TOL * scale {
            return Err(Error::Infeasible(format!(
                "phase 1 ended with total infeasibility {infeasibility:.3e}"
            )));
        }
        // Artificials are pinned at zero from here on.
        for j in self.n_struct..self.ncols {
            self.upper[j] = 0.0;
            self.frozen[j] = true;
            if self.status[j] == Status::AtUpper {
                self.status[j] = Status::AtLower;
            }
        }
        // Pivot basic artificials out where a structural column allows it.
        for r in 0..self.m {
            let j_art = self.basis[r];
            if j_art < self.n_struct {
                continue;
            }
            let row = &self.t[r * self.ncols..r * self.ncols + self.n_struct];
            let mut best: Option<(usize, f64)> = None;
            for (j, &a) in row.iter().enumerate() {
                if matches!(self.status[j], Status::Basic(_)) {
                    continue;
                }
                if a.abs() > PIVOT_TOL && best.is_none_or(|(_, b)| a.abs() > b) {
                    best = Some((j, a.abs()));
                }
            }
            if let Some((j, _)) = best {
                // Degenerate swap: the artificial is zero, values do not move.
                let entering_value = self.value(j);
                self.pivot(r, j);
                self.beta[r] = entering_value;
                self.status[j_art] = Status::AtLower;
            }
        }
        Ok(())
    }

    fn optimize(&mut self, cost: &[f64], phase: &str) -> Result<()> {
        self.recompute_reduced_costs(cost);
        let mut degenerate_run = 0usize;
        loop {
            let bland = degenerate_run >= DEGENERATE_RUN_BEFORE_BLAND;
            let Some((q, dir)) = self.choose_entering(bland) else {
                return Ok(());
            };
            self.iterations += 1;
            if self.iterations > self.max_iterations {
                return Err(self.failure(format!("{phase}: iteration limit exceeded")));
            }
            let step = self.ratio_test(q, dir)?;
            match step {
                Step::Unbounded => {
                    return Err(self.failure(format!("{phase}: unbounded direction on column {q}")));
                }
                Step::BoundFlip(theta) => {
                    self.apply_move(q, dir, theta);
                    self.status[q] = if dir > 0.0 {
                        Status::AtUpper
                    } else {
                        Status::AtLower
                    };
                    self.note(format!("{phase} it {} flip col {q} step {theta:.3e}", self.iterations));
                    degenerate_run = 0;
                }
                Step::Pivot { row, theta, to_upper } => {
                    let leaving = self.basis[row];
                    self.apply_move(q, dir, theta);
                    let entering_value = self.value(q) + dir * theta;
                    self.pivot(row, q);
                    self.beta[row] = entering_value;
                    self.status[leaving] = if to_upper {
                        Status::AtUpper
                    } else {
                        Status::AtLower
                    };
                    self.note(format!(
                        "{phase} it {} enter {q} leave {leaving} row {row} step {theta:.3e}",
                        self.iterations
                    ));
                    if theta <= FEAS_TOL {
                        degenerate_run += 1;
                    } else {
                        degenerate_run = 0;
                    }
                }
            }
        }
    }

    fn recompute_reduced_costs(&mut self, cost: &[f64]) {
        let ncols = self.ncols;
        self.d.copy_from_slice(cost);
        for r in 0..self.m {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                let row = &self.t[r * ncols..(r + 1) * ncols];
                for (d, &a) in self.d.iter_mut().zip(row) {
                    *d -= cb * a;
                }
            }
        }
        for &j in &self.basis {
            self.d[j] = 0.0;
        }
    }

    fn choose_entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.ncols {
            if self.frozen[j] {
                continue;
            }
            let dj = self.d[j];
            let dir = match self.status[j] {
                Status::Basic(_) => continue,
                Status::AtLower if dj > OPT_TOL => 1.0,
                Status::AtUpper if dj < -OPT_TOL => -1.0,
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(_, _, score)| dj.abs() > score) {
                best = Some((j, dir, dj.abs()));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    fn ratio_test(&self, q: usize, dir: f64) -> Result<Step> {
        let ncols = self.ncols;
        let flip = self.upper[q] - self.lower[q];
        let mut best: Option<(usize, f64, bool)> = None;
        for r in 0..self.m {
            let a = self.t[r * ncols + q];
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let jb = self.basis[r];
            // Basic value moves by -dir·a per unit step.
            let rate = -dir * a;
            let (limit, to_upper) = if rate < 0.0 {
                ((self.beta[r] - self.lower[jb]) / -rate, false)
            } else if self.upper[jb].is_finite() {
                ((self.upper[jb] - self.beta[r]) / rate, true)
            } else {
                continue;
            };
            let limit = limit.max(0.0);
            let better = match best {
                None => true,
                Some((br, bl, _)) => {
                    if limit < bl - FEAS_TOL {
                        true
                    } else if limit <= bl + FEAS_TOL {
                        let ba = self.t[br * ncols + q].abs();
                        a.abs() > ba * (1.0 + 1e-12)
                            || (a.abs() >= ba * (1.0 - 1e-12) && jb < self.basis[br])
                    } else {
                        false
                    }
                }
            };
            if better {
                best = Some((r, limit, to_upper));
            }
        }
        Ok(match best {
            Some((row, theta, to_upper)) if theta <= flip => Step::Pivot {
                row,
                theta,
                to_upper,
            },
            _ if flip.is_finite() => Step::BoundFlip(flip),
            _ => Step::Unbounded,
        })
    }

    /// Moves the entering variable by `dir·theta`, updating basic values.
    fn apply_move(&mut self, q: usize, dir: f64, theta: f64) {
        if theta == 0.0 {
            return;
        }
        let ncols = self.ncols;
        for r in 0..self.m {
            let a = self.t[r * ncols + q];
            if a != 0.0 {
                self.beta[r] -= dir * theta * a;
            }
        }
    }

    fn pivot(&mut self, row: usize, q: usize) {
        let ncols = self.ncols;
        let p = self.t[row * ncols + q];
        let inv = 1.0 / p;
        {
            let prow = &mut self.t[row * ncols..(row + 1) * ncols];
            for v in prow.iter_mut() {
                *v *= inv;
            }
            prow[q] = 1.0;
        }
        let (before, rest) = self.t.split_at_mut(row * ncols);
        let (prow, after) = rest.split_at_mut(ncols);
        for other in before.chunks_exact_mut(ncols).chain(after.chunks_exact_mut(ncols)) {
            let f = other[q];
            if f != 0.0 {
                for (v, &pv) in other.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                other[q] = 0.0;
            }
        }
        let dq = self.d[q];
        if dq != 0.0 {
            for (d, &pv) in self.d.iter_mut().zip(prow.iter()) {
                *d -= dq * pv;
            }
            self.d[q] = 0.0;
        }
        let leaving = self.basis[row];
        self.basis[row] = q;
        self.status[q] = Status::Basic(row);
        // Caller sets the leaving status; default to lower.
        self.status[leaving] = Status::AtLower;
    }

    fn freeze_nonzero_reduced_costs(&mut self) {
        for j in 0..self.ncols {
            if !matches!(self.status[j], Status::Basic(_)) && self.d[j].abs() > OPT_TOL {
                self.frozen[j] = true;
            }
        }
    }

    /// Structural and artificial values with basics recomputed from B⁻¹.
    fn primal_values(&self) -> Vec<f64> {
        let n = self.n_struct;
        let mut x: Vec<f64> = (0..self.ncols).map(|j| self.value(j)).collect();
        // rhs = b - Σ_nonbasic A_j x_j
        let mut rhs = self.b.clone();
        for (i, row) in self.a_rows.iter().enumerate() {
            for &(j, a) in row {
                if !matches!(self.status[j], Status::Basic(_)) {
                    rhs[i] -= a * x[j];
                }
            }
        }
        for i in 0..self.m {
            let j_art = n + i;
            if !matches!(self.status[j_art], Status::Basic(_)) {
                rhs[i] -= x[j_art];
            }
        }
        for r in 0..self.m {
            let binv = &self.t[r * self.ncols + n..(r + 1) * self.ncols];
            let v: f64 = binv.iter().zip(&rhs).map(|(a, b)| a * b).sum();
            let j = self.basis[r];
            x[j] = v.clamp(self.lower[j], self.upper[j].max(self.lower[j]));
        }
        x
    }

    fn note(&mut self, entry: String) {
        log::trace!("{entry}");
        if self.log.len() == LOG_DEPTH {
            self.log.pop_front();
        }
        self.log.push_back(entry);
    }

    fn failure(&self, message: String) -> Error {
        Error::Solver {
            iterations: self.iterations,
            message,
            log: self.log.iter().cloned().collect(),
        }
    }
}

enum Step {
    Unbounded,
    BoundFlip(f64),
    Pivot { row: usize, theta: f64, to_upper: bool },
}
