//! Linear programs and a bounded-variable primal simplex.
//!
//! Problems are stated as
//!
//! ```text
//! minimize    c'x
//! subject to  A_eq x  = b_eq
//!             A_le x <= b_le
//!             lo <= x <= hi        (infinite bounds allowed)
//! ```
//!
//! The solver works on a dense tableau with one artificial column per row.
//! Artificials drive phase 1 and are then fixed at zero; their reduced costs
//! in the final tableau recover the row duals, which follow the sensitivity
//! convention `d(objective) / d(rhs)`.
//!
//! Pricing is Dantzig's rule, switching to Bland's rule after a run of
//! degenerate pivots. Ties are broken by column index, so a given problem
//! always yields the same basis and the same duals.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};

/// Primal feasibility tolerance (absolute, per row).
pub const PRIMAL_TOL: f64 = 1e-7;
/// Duality gap tolerance (relative).
pub const GAP_RTOL: f64 = 1e-6;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const DEGENERATE_STREAK: usize = 50;

/// Sparse row `(variable index, coefficient)`.
pub type Row = Vec<(usize, f64)>;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub eq_rows: Vec<Row>,
    pub eq_rhs: Vec<f64>,
    pub le_rows: Vec<Row>,
    pub le_rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.len() - 1
    }

    pub fn add_eq(&mut self, row: Row, rhs: f64) -> usize {
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
        self.eq_rows.len() - 1
    }

    pub fn add_le(&mut self, row: Row, rhs: f64) -> usize {
        self.le_rows.push(row);
        self.le_rhs.push(rhs);
        self.le_rows.len() - 1
    }

    pub fn num_variables(&self) -> usize {
        self.objective.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_variables();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Model("bound vectors do not match variable count".into()));
        }
        if self.eq_rows.len() != self.eq_rhs.len() || self.le_rows.len() != self.le_rhs.len() {
            return Err(Error::Model("row and right-hand side counts differ".into()));
        }
        for j in 0..n {
            if !self.objective[j].is_finite() {
                return Err(Error::Model(format!("objective coefficient {j} is not finite")));
            }
            if self.lower[j] > self.upper[j] || self.lower[j] == f64::INFINITY || self.upper[j] == f64::NEG_INFINITY {
                return Err(Error::Model(format!(
                    "variable {j} has empty bounds [{}, {}]",
                    self.lower[j], self.upper[j]
                )));
            }
        }
        for (row, rhs) in self.eq_rows.iter().zip(&self.eq_rhs).chain(self.le_rows.iter().zip(&self.le_rhs)) {
            if !rhs.is_finite() || row.iter().any(|&(j, a)| j >= n || !a.is_finite()) {
                return Err(Error::Model("malformed constraint row".into()));
            }
        }
        Ok(())
    }

    fn row_activity(row: &Row, x: &[f64]) -> f64 {
        row.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Largest violation of any row or bound at `x`.
    pub fn primal_residual(&self, x: &[f64]) -> f64 {
        let eq = self
            .eq_rows
            .iter()
            .zip(&self.eq_rhs)
            .map(|(r, b)| (Self::row_activity(r, x) - b).abs());
        let le = self
            .le_rows
            .iter()
            .zip(&self.le_rhs)
            .map(|(r, b)| (Self::row_activity(r, x) - b).max(0.0));
        let bounds = x
            .iter()
            .enumerate()
            .map(|(j, &v)| (self.lower[j] - v).max(v - self.upper[j]).max(0.0));
        eq.chain(le).chain(bounds).fold(0.0, f64::max)
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Plain-text dump in CPLEX LP style, for debugging.
    pub fn to_lp_string(&self) -> String {
        fn terms(row: &Row) -> String {
            if row.is_empty() {
                return "0 x0".into();
            }
            row.iter()
                .map(|&(j, a)| format!("{} {} x{j}", if a < 0.0 { "-" } else { "+" }, a.abs()))
                .collect::<Vec<_>>()
                .join(" ")
        }
        let mut s = String::from("Minimize\n obj:");
        let obj: Row = self.objective.iter().copied().enumerate().filter(|&(_, c)| c != 0.0).collect();
        let _ = writeln!(s, " {}", terms(&obj));
        s.push_str("Subject To\n");
        for (k, (r, b)) in self.eq_rows.iter().zip(&self.eq_rhs).enumerate() {
            let _ = writeln!(s, " e{k}: {} = {b}", terms(r));
        }
        for (k, (r, b)) in self.le_rows.iter().zip(&self.le_rhs).enumerate() {
            let _ = writeln!(s, " l{k}: {} <= {b}", terms(r));
        }
        s.push_str("Bounds\n");
        for j in 0..self.num_variables() {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            let _ = match (lo.is_finite(), hi.is_finite()) {
                (false, false) => writeln!(s, " x{j} free"),
                (true, false) => writeln!(s, " x{j} >= {lo}"),
                (false, true) => writeln!(s, " -inf <= x{j} <= {hi}"),
                (true, true) => writeln!(s, " {lo} <= x{j} <= {hi}"),
            };
        }
        s.push_str("End\n");
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub equality_duals: Vec<f64>,
    /// Non-positive at optimality.
    pub inequality_duals: Vec<f64>,
    /// `c - A'y` per variable.
    pub reduced_costs: Vec<f64>,
    pub objective_value: f64,
}

impl LpSolution {
    fn without_solution(status: LpStatus) -> Self {
        Self {
            status,
            primal: Vec::new(),
            equality_duals: Vec::new(),
            inequality_duals: Vec::new(),
            reduced_costs: Vec::new(),
            objective_value: f64::NAN,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Lagrangian dual objective built from the recovered duals and bounds.
    /// Equals the primal objective at optimality up to round-off.
    pub fn dual_objective(&self, lp: &LinearProgram) -> f64 {
        let rows: f64 = lp.eq_rhs.iter().zip(&self.equality_duals).map(|(b, y)| b * y).sum::<f64>()
            + lp.le_rhs.iter().zip(&self.inequality_duals).map(|(b, y)| b * y).sum::<f64>();
        let bounds: f64 = self
            .reduced_costs
            .iter()
            .enumerate()
            .map(|(j, &d)| {
                if d > COST_TOL {
                    d * lp.lower[j]
                } else if d < -COST_TOL {
                    d * lp.upper[j]
                } else {
                    0.0
                }
            })
            .sum();
        rows + bounds
    }
}

/// Solves `lp`. Infeasible and unbounded problems are reported through the
/// status; only a loss of numerical accuracy is an error.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let mut tab = Tableau::new(lp);
    let limit = 20_000 + 50 * (tab.rows + tab.cols);

    tab.set_phase_one_costs();
    match tab.iterate(limit)? {
        Outcome::Optimal => {}
        Outcome::Unbounded => return Err(Error::NumericalFailure("phase one reported unbounded".into())),
    }
    let infeasibility: f64 = (0..tab.rows).map(|i| tab.x[tab.art0 + i]).sum();
    if infeasibility > PRIMAL_TOL {
        return Ok(LpSolution::without_solution(LpStatus::Infeasible));
    }
    tab.drive_out_artificials();
    tab.set_phase_two_costs(lp);
    match tab.iterate(limit)? {
        Outcome::Optimal => {}
        Outcome::Unbounded => return Ok(LpSolution::without_solution(LpStatus::Unbounded)),
    }
    tab.refresh_basic_values();
    let sol = tab.solution(lp);
    let residual = lp.primal_residual(&sol.primal);
    if residual > PRIMAL_TOL {
        return Err(Error::NumericalFailure(format!(
            "primal residual {residual:.3e} exceeds {PRIMAL_TOL:.0e}"
        )));
    }
    Ok(sol)
}

enum Outcome {
    Optimal,
    Unbounded,
}

/// Columns are laid out as structural variables, then one slack per
/// inequality row, then one artificial per row.
struct Tableau {
    rows: usize,
    cols: usize,
    n_struct: usize,
    art0: usize,
    /// `B^-1 A`, row-major.
    t: Vec<f64>,
    rhs: Vec<f64>,
    /// The constraint matrix in full, for recomputing basic values.
    a: Vec<f64>,
    sign: Vec<f64>,
    cost: Vec<f64>,
    d: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let n = lp.num_variables();
        let m_eq = lp.eq_rows.len();
        let m_le = lp.le_rows.len();
        let rows = m_eq + m_le;
        let art0 = n + m_le;
        let cols = art0 + rows;

        let mut a = vec![0.0; rows * cols];
        let mut rhs = Vec::with_capacity(rows);
        for (i, (row, b)) in lp.eq_rows.iter().zip(&lp.eq_rhs).enumerate() {
            for &(j, v) in row {
                a[i * cols + j] += v;
            }
            rhs.push(*b);
        }
        for (k, (row, b)) in lp.le_rows.iter().zip(&lp.le_rhs).enumerate() {
            let i = m_eq + k;
            for &(j, v) in row {
                a[i * cols + j] += v;
            }
            a[i * cols + n + k] = 1.0;
            rhs.push(*b);
        }

        let mut lo = lp.lower.clone();
        let mut hi = lp.upper.clone();
        lo.extend(std::iter::repeat_n(0.0, m_le + rows));
        hi.extend(std::iter::repeat_n(f64::INFINITY, m_le + rows));

        let mut x: Vec<f64> = (0..cols)
            .map(|j| {
                if lo[j].is_finite() {
                    lo[j]
                } else if hi[j].is_finite() {
                    hi[j]
                } else {
                    0.0
                }
            })
            .collect();

        let mut sign = vec![1.0; rows];
        for i in 0..rows {
            let activity: f64 = (0..art0).map(|j| a[i * cols + j] * x[j]).sum();
            let r = rhs[i] - activity;
            sign[i] = if r >= 0.0 { 1.0 } else { -1.0 };
            a[i * cols + art0 + i] = sign[i];
            x[art0 + i] = r.abs();
        }

        let mut t = a.clone();
        for i in 0..rows {
            if sign[i] < 0.0 {
                for v in &mut t[i * cols..(i + 1) * cols] {
                    *v = -*v;
                }
            }
        }
        let basis: Vec<usize> = (0..rows).map(|i| art0 + i).collect();
        let mut is_basic = vec![false; cols];
        for &b in &basis {
            is_basic[b] = true;
        }

        Self {
            rows,
            cols,
            n_struct: n,
            art0,
            t,
            rhs,
            a,
            sign,
            cost: vec![0.0; cols],
            d: vec![0.0; cols],
            lo,
            hi,
            x,
            basis,
            is_basic,
        }
    }

    fn recompute_reduced_costs(&mut self) {
        self.d.copy_from_slice(&self.cost);
        for i in 0..self.rows {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * self.cols..(i + 1) * self.cols];
                for (dj, tij) in self.d.iter_mut().zip(row) {
                    *dj -= cb * tij;
                }
            }
        }
        for i in 0..self.rows {
            self.d[self.basis[i]] = 0.0;
        }
    }

    fn set_phase_one_costs(&mut self) {
        self.cost.iter_mut().for_each(|c| *c = 0.0);
        for i in 0..self.rows {
            self.cost[self.art0 + i] = 1.0;
        }
        self.recompute_reduced_costs();
    }

    fn set_phase_two_costs(&mut self, lp: &LinearProgram) {
        self.cost.iter_mut().for_each(|c| *c = 0.0);
        self.cost[..self.n_struct].copy_from_slice(&lp.objective);
        for i in 0..self.rows {
            let j = self.art0 + i;
            self.hi[j] = 0.0;
            self.x[j] = 0.0;
        }
        self.recompute_reduced_costs();
    }

    /// Pivots basic artificials out where a structural or slack column can
    /// replace them. Rows where none can are redundant and keep the artificial
    /// at zero.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.rows {
            if self.basis[r] < self.art0 {
                continue;
            }
            let row = &self.t[r * self.cols..(r + 1) * self.cols];
            let mut best: Option<(usize, f64)> = None;
            for (j, &v) in row[..self.art0].iter().enumerate() {
                if !self.is_basic[j] && v.abs() > PIVOT_TOL && best.is_none_or(|(_, b)| v.abs() > b) {
                    best = Some((j, v.abs()));
                }
            }
            if let Some((j, _)) = best {
                let leaving = self.basis[r];
                self.x[leaving] = 0.0;
                self.pivot(r, j);
            }
        }
    }

    fn entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.cols {
            if self.is_basic[j] || self.lo[j] == self.hi[j] {
                continue;
            }
            let dj = self.d[j];
            let dir = if dj < -COST_TOL && self.x[j] < self.hi[j] {
                1.0
            } else if dj > COST_TOL && self.x[j] > self.lo[j] {
                -1.0
            } else {
                continue;
            };
            if bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(k, _)| dj.abs() > self.d[k].abs()) {
                best = Some((j, dir));
            }
        }
        best
    }

    fn iterate(&mut self, limit: usize) -> Result<Outcome> {
        let mut degenerate = 0usize;
        for _ in 0..limit {
            let bland = degenerate >= DEGENERATE_STREAK;
            let Some((j, dir)) = self.entering(bland) else {
                return Ok(Outcome::Optimal);
            };

            // ratio test
            let mut step = self.hi[j] - self.lo[j];
            let mut leave: Option<usize> = None;
            let mut leave_pivot = 0.0;
            for i in 0..self.rows {
                let a = self.t[i * self.cols + j] * dir;
                let b = self.basis[i];
                let ratio = if a > PIVOT_TOL && self.lo[b].is_finite() {
                    ((self.x[b] - self.lo[b]) / a).max(0.0)
                } else if a < -PIVOT_TOL && self.hi[b].is_finite() {
                    ((self.hi[b] - self.x[b]) / -a).max(0.0)
                } else {
                    continue;
                };
                let better = match leave {
                    _ if ratio < step - 1e-12 => true,
                    Some(k) if ratio <= step + 1e-12 => {
                        if bland {
                            b < self.basis[k]
                        } else {
                            a.abs() > leave_pivot
                        }
                    }
                    _ => false,
                };
                if better {
                    step = ratio;
                    leave = Some(i);
                    leave_pivot = a.abs();
                }
            }
            if step.is_infinite() {
                return Ok(Outcome::Unbounded);
            }
            degenerate = if step <= 1e-12 { degenerate + 1 } else { 0 };

            self.x[j] += dir * step;
            for i in 0..self.rows {
                let a = self.t[i * self.cols + j];
                if a != 0.0 {
                    self.x[self.basis[i]] -= a * dir * step;
                }
            }
            match leave {
                None => {
                    // bound flip
                    self.x[j] = if dir > 0.0 { self.hi[j] } else { self.lo[j] };
                }
                Some(r) => {
                    let b = self.basis[r];
                    let a = self.t[r * self.cols + j] * dir;
                    self.x[b] = if a > 0.0 { self.lo[b] } else { self.hi[b] };
                    self.pivot(r, j);
                }
            }
        }
        Err(Error::NumericalFailure(format!("simplex iteration limit {limit} reached")))
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let cols = self.cols;
        let p = self.t[r * cols + j];
        for v in &mut self.t[r * cols..(r + 1) * cols] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.t[r * cols..(r + 1) * cols].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * cols + j];
            if f != 0.0 {
                for (v, pr) in self.t[i * cols..(i + 1) * cols].iter_mut().zip(&pivot_row) {
                    *v -= f * pr;
                }
                self.t[i * cols + j] = 0.0;
            }
        }
        let f = self.d[j];
        if f != 0.0 {
            for (v, pr) in self.d.iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
        }
        self.d[j] = 0.0;
        let leaving = self.basis[r];
        self.is_basic[leaving] = false;
        self.is_basic[j] = true;
        self.basis[r] = j;
    }

    /// `x_B = B^-1 (b - N x_N)`, using the artificial columns of the tableau
    /// as `B^-1`.
    fn refresh_basic_values(&mut self) {
        let mut resid = self.rhs.clone();
        for (i, ri) in resid.iter_mut().enumerate() {
            for j in 0..self.cols {
                if !self.is_basic[j] {
                    *ri -= self.a[i * self.cols + j] * self.x[j];
                }
            }
        }
        let mut xb = vec![0.0; self.rows];
        for (r, v) in xb.iter_mut().enumerate() {
            *v = (0..self.rows)
                .map(|i| self.sign[i] * self.t[r * self.cols + self.art0 + i] * resid[i])
                .sum();
        }
        for (r, v) in xb.into_iter().enumerate() {
            let b = self.basis[r];
            self.x[b] = v;
        }
    }

    fn solution(&self, lp: &LinearProgram) -> LpSolution {
        let m_eq = lp.eq_rows.len();
        let y: Vec<f64> = (0..self.rows)
            .map(|i| -self.sign[i] * self.d[self.art0 + i])
            .map(|v| if v == 0.0 { 0.0 } else { v })
            .collect();
        let primal = self.x[..self.n_struct].to_vec();

        let mut reduced = lp.objective.clone();
        for (rows, duals) in [(&lp.eq_rows, &y[..m_eq]), (&lp.le_rows, &y[m_eq..])] {
            for (row, &yi) in rows.iter().zip(duals) {
                for &(j, a) in row {
                    reduced[j] -= a * yi;
                }
            }
        }
        LpSolution {
            status: LpStatus::Optimal,
            objective_value: lp.objective_at(&primal),
            primal,
            equality_duals: y[..m_eq].to_vec(),
            inequality_duals: y[m_eq..].to_vec(),
            reduced_costs: reduced,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn single_equality() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(1.0, 0.0, 10.0);
        lp.add_eq(vec![(x, 1.0)], 5.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.primal[0] - 5.0).abs() < 1e-12);
        assert!((s.equality_duals[0] - 1.0).abs() < 1e-12);
        assert!((s.objective_value - 5.0).abs() < 1e-12);
    }

    #[test]
    fn two_generator_dispatch() {
        let mut lp = LinearProgram::new();
        let g1 = lp.add_variable(10.0, 0.0, 50.0);
        let g2 = lp.add_variable(30.0, 0.0, 100.0);
        lp.add_eq(vec![(g1, 1.0), (g2, 1.0)], 100.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.primal[g1] - 50.0).abs() < 1e-9);
        assert!((s.primal[g2] - 50.0).abs() < 1e-9);
        assert!((s.objective_value - 2000.0).abs() < 1e-9);
        assert!((s.equality_duals[0] - 30.0).abs() < 1e-9);
        assert!((s.dual_objective(&lp) - 2000.0).abs() < 1e-6);
    }

    #[test]
    fn infeasible_bounds() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(1.0, 0.0, 1.0);
        lp.add_eq(vec![(x, 1.0)], 5.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(-1.0, 0.0, INF);
        let y = lp.add_variable(0.0, 0.0, INF);
        lp.add_le(vec![(x, 1.0), (y, -1.0)], 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variables_and_inequality_duals() {
        // min c s.t. c >= 2x, c >= 5x - 30, x = 20
        let mut lp = LinearProgram::new();
        let c = lp.add_variable(1.0, -INF, INF);
        let x = lp.add_variable(0.0, -INF, INF);
        lp.add_le(vec![(x, 2.0), (c, -1.0)], 0.0);
        lp.add_le(vec![(x, 5.0), (c, -1.0)], 30.0);
        lp.add_eq(vec![(x, 1.0)], 20.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.primal[c] - 70.0).abs() < 1e-9);
        assert!((s.equality_duals[0] - 5.0).abs() < 1e-9);
        assert!(s.inequality_duals.iter().all(|&y| y <= 1e-12));
        assert!((s.dual_objective(&lp) - s.objective_value).abs() < 1e-6);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(1.0, 0.0, 10.0);
        let y = lp.add_variable(2.0, 0.0, 10.0);
        lp.add_eq(vec![(x, 1.0), (y, 1.0)], 4.0);
        lp.add_eq(vec![(x, 2.0), (y, 2.0)], 8.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.objective_value - 4.0).abs() < 1e-9);
        assert!((s.dual_objective(&lp) - 4.0).abs() < 1e-6);
    }

    #[test]
    fn upper_bounded_only_variable() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(-1.0, -INF, 3.0);
        lp.add_le(vec![(x, -1.0)], 10.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.primal[x] - 3.0).abs() < 1e-12);
        assert!((s.dual_objective(&lp) + 3.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_malformed() {
        let mut lp = LinearProgram::new();
        lp.add_variable(1.0, 2.0, 1.0);
        assert!(solve_lp(&lp).is_err());
        let mut lp = LinearProgram::new();
        lp.add_variable(f64::NAN, 0.0, 1.0);
        assert!(solve_lp(&lp).is_err());
    }

    #[test]
    fn dump() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(1.0, 0.0, 10.0);
        let y = lp.add_variable(-2.0, -INF, INF);
        lp.add_eq(vec![(x, 1.0), (y, -1.0)], 5.0);
        lp.add_le(vec![(y, 1.0)], 3.0);
        let s = lp.to_lp_string();
        assert!(s.contains(" e0: + 1 x0 - 1 x1 = 5"), "{s}");
        assert!(s.contains(" l0: + 1 x1 <= 3"), "{s}");
        assert!(s.contains(" x1 free"), "{s}");
    }
}
