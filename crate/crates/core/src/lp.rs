//! Standard-form linear programs and a dense two-phase simplex.
//!
//! Programs are stored as `minimize cᵀz` subject to `Az ≤ b`, `Ez = d` and
//! per-variable bounds `lo ≤ z ≤ hi` (either side may be infinite). The
//! solver rewrites them into equality form with nonnegative variables and
//! runs a textbook tableau simplex with Bland's rule, so results are fully
//! deterministic for a given program.

use crate::error::{Error, Result};
use crate::fmt::sig17;

/// Entries smaller than this are treated as zero when choosing pivots.
pub const PIVOT_TOL: f64 = 1e-9;
/// A chosen pivot below this magnitude aborts the solve.
pub const BREAKDOWN_TOL: f64 = 1e-12;

const DEFAULT_MAX_PIVOTS: usize = 200_000;

/// Solver-agnostic LP data.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub ineq_rows: Vec<Vec<f64>>,
    pub ineq_rhs: Vec<f64>,
    pub eq_rows: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
    pub names: Vec<String>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Adds a variable and returns its column index. Existing rows are padded.
    pub fn add_var(&mut self, name: impl Into<String>, lo: f64, hi: f64, cost: f64) -> usize {
        self.objective.push(cost);
        self.bounds.push((lo, hi));
        self.names.push(name.into());
        for row in self.ineq_rows.iter_mut().chain(self.eq_rows.iter_mut()) {
            row.push(0.0);
        }
        self.objective.len() - 1
    }

    fn dense(&self, terms: &[(usize, f64)]) -> Vec<f64> {
        let mut row = vec![0.0; self.num_vars()];
        for &(j, a) in terms {
            row[j] += a;
        }
        row
    }

    /// Adds `Σ a_j z_j ≤ rhs` from sparse terms.
    pub fn add_le(&mut self, terms: &[(usize, f64)], rhs: f64) {
        let row = self.dense(terms);
        self.ineq_rows.push(row);
        self.ineq_rhs.push(rhs);
    }

    /// Adds `Σ a_j z_j = rhs` from sparse terms.
    pub fn add_eq(&mut self, terms: &[(usize, f64)], rhs: f64) {
        let row = self.dense(terms);
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::InvalidInput("linear program has no variables".into()));
        }
        if self.bounds.len() != n || self.names.len() != n {
            return Err(Error::InvalidInput("bounds/names length mismatch".into()));
        }
        if self.ineq_rows.len() != self.ineq_rhs.len() || self.eq_rows.len() != self.eq_rhs.len() {
            return Err(Error::InvalidInput("row/rhs count mismatch".into()));
        }
        for row in self.ineq_rows.iter().chain(&self.eq_rows) {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            if row.iter().any(|a| !a.is_finite()) {
                return Err(Error::InvalidInput("non-finite constraint coefficient".into()));
            }
        }
        if self.ineq_rhs.iter().chain(&self.eq_rhs).any(|b| !b.is_finite()) {
            return Err(Error::InvalidInput("non-finite right-hand side".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite objective coefficient".into()));
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::InvalidInput(format!("invalid bounds for variable {}", self.names[j])));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, z: &[f64]) -> f64 {
        dot(&self.objective, z)
    }

    /// Largest violation of any row or bound at `z`.
    pub fn max_violation(&self, z: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (row, &b) in self.ineq_rows.iter().zip(&self.ineq_rhs) {
            worst = worst.max(dot(row, z) - b);
        }
        for (row, &d) in self.eq_rows.iter().zip(&self.eq_rhs) {
            worst = worst.max((dot(row, z) - d).abs());
        }
        for (&v, &(lo, hi)) in z.iter().zip(&self.bounds) {
            worst = worst.max(lo - v).max(v - hi);
        }
        worst
    }

    /// Plain-text fixed format: one `minimize` line, one line per row
    /// (`<=` rows first, then `=` rows), then one `bound` line per variable.
    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|&a| sig17(a)).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        out.push_str(&format!("minimize {}\n", join(&self.objective)));
        for (row, &b) in self.ineq_rows.iter().zip(&self.ineq_rhs) {
            out.push_str(&format!("{} <= {}\n", join(row), sig17(b)));
        }
        for (row, &d) in self.eq_rows.iter().zip(&self.eq_rhs) {
            out.push_str(&format!("{} = {}\n", join(row), sig17(d)));
        }
        for (name, &(lo, hi)) in self.names.iter().zip(&self.bounds) {
            out.push_str(&format!("bound {} {} {}\n", name, sig17(lo), sig17(hi)));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal values in the original variable space (empty unless optimal).
    pub z: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
    pub max_violation: f64,
}

#[derive(Debug, Clone, Copy)]
enum Column {
    /// z = lo + y
    Shift { col: usize, lo: f64 },
    /// z = hi - y
    Mirror { col: usize, hi: f64 },
    /// z = y⁺ - y⁻
    Split { pos: usize, neg: usize },
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// rows × (cols + 1), last entry of each row is the rhs.
    data: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * (self.cols + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.data[i * (self.cols + 1) + self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize, reduced: &mut [f64]) -> Result<()> {
        let w = self.cols + 1;
        let p = self.data[r * w + c];
        if p.abs() < BREAKDOWN_TOL {
            return Err(Error::NumericalBreakdown(p.abs()));
        }
        let inv = 1.0 / p;
        for v in &mut self.data[r * w..(r + 1) * w] {
            *v *= inv;
        }
        self.data[r * w + c] = 1.0;
        let prow: Vec<f64> = self.data[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.data[i * w + c];
            if f != 0.0 {
                for (v, &pv) in self.data[i * w..(i + 1) * w].iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                self.data[i * w + c] = 0.0;
            }
        }
        let f = reduced[c];
        if f != 0.0 {
            for (v, &pv) in reduced.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            reduced[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
        Ok(())
    }

    /// Reduced-cost row (with negated objective value in the last slot).
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let w = self.cols + 1;
        let mut d: Vec<f64> = cost.to_vec();
        d.push(0.0);
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (v, &t) in d.iter_mut().zip(&self.data[i * w..(i + 1) * w]) {
                    *v -= cb * t;
                }
            }
        }
        d
    }

    /// Runs Bland-rule iterations. Returns `Ok(None)` at optimality,
    /// `Ok(Some(status))` on unboundedness or the pivot cap.
    fn iterate(
        &mut self,
        reduced: &mut [f64],
        allowed: &[bool],
        max_pivots: usize,
    ) -> Result<Option<LpStatus>> {
        loop {
            let entering = (0..self.cols).find(|&j| allowed[j] && reduced[j] < -PIVOT_TOL);
            let Some(c) = entering else {
                return Ok(None);
            };
            if self.pivots >= max_pivots {
                return Ok(Some(LpStatus::IterationLimit));
            }
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, c);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i).max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                            if ratio < best && !tie || tie && self.basis[i] < self.basis[k] {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Ok(Some(LpStatus::Unbounded));
            };
            self.pivot(r, c, reduced)?;
        }
    }
}

/// Solves `lp` with the two-phase dense simplex and Bland's rule.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    solve_with_limit(lp, DEFAULT_MAX_PIVOTS)
}

pub fn solve_with_limit(lp: &LinearProgram, max_pivots: usize) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_vars();

    // Map each original variable onto nonnegative structural columns.
    let mut map = Vec::with_capacity(n);
    let mut ncols = 0usize;
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();
    for &(lo, hi) in &lp.bounds {
        if lo.is_finite() {
            map.push(Column::Shift { col: ncols, lo });
            if hi.is_finite() {
                upper_rows.push((ncols, hi - lo));
            }
            ncols += 1;
        } else if hi.is_finite() {
            map.push(Column::Mirror { col: ncols, hi });
            ncols += 1;
        } else {
            map.push(Column::Split { pos: ncols, neg: ncols + 1 });
            ncols += 2;
        }
    }
    let n_struct = ncols;

    // Rows in transformed space: (coefficients over structural columns, rhs, has_slack).
    let mut rows: Vec<(Vec<f64>, f64, bool)> = Vec::new();
    let transform = |row: &[f64], rhs: f64| {
        let mut out = vec![0.0; n_struct];
        let mut b = rhs;
        for (j, &a) in row.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match map[j] {
                Column::Shift { col, lo } => {
                    out[col] += a;
                    b -= a * lo;
                }
                Column::Mirror { col, hi } => {
                    out[col] -= a;
                    b -= a * hi;
                }
                Column::Split { pos, neg } => {
                    out[pos] += a;
                    out[neg] -= a;
                }
            }
        }
        (out, b)
    };
    for (row, &b) in lp.ineq_rows.iter().zip(&lp.ineq_rhs) {
        let (r, b) = transform(row, b);
        rows.push((r, b, true));
    }
    for &(col, ub) in &upper_rows {
        let mut r = vec![0.0; n_struct];
        r[col] = 1.0;
        rows.push((r, ub, true));
    }
    for (row, &d) in lp.eq_rows.iter().zip(&lp.eq_rhs) {
        let (r, d) = transform(row, d);
        rows.push((r, d, false));
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.2).count();
    let needs_art: Vec<bool> = rows.iter().map(|(_, b, slack)| !*slack || *b < 0.0).collect();
    let n_art = needs_art.iter().filter(|&&a| a).count();
    let cols = n_struct + n_slack + n_art;
    let w = cols + 1;

    let mut tab = Tableau {
        rows: m,
        cols,
        data: vec![0.0; m * w],
        basis: vec![0; m],
        pivots: 0,
    };
    let mut slack_idx = n_struct;
    let mut art_idx = n_struct + n_slack;
    for (i, (r, b, has_slack)) in rows.iter().enumerate() {
        let sign = if *b < 0.0 { -1.0 } else { 1.0 };
        let base = i * w;
        for (k, &a) in r.iter().enumerate() {
            tab.data[base + k] = sign * a;
        }
        tab.data[base + cols] = sign * b;
        if *has_slack {
            tab.data[base + slack_idx] = sign;
            if !needs_art[i] {
                tab.basis[i] = slack_idx;
            }
            slack_idx += 1;
        }
        if needs_art[i] {
            tab.data[base + art_idx] = 1.0;
            tab.basis[i] = art_idx;
            art_idx += 1;
        }
    }
    let is_art = |j: usize| j >= n_struct + n_slack;

    // Phase 1.
    if n_art > 0 {
        let mut cost1 = vec![0.0; cols];
        for c in cost1.iter_mut().skip(n_struct + n_slack) {
            *c = 1.0;
        }
        let mut reduced = tab.reduced_costs(&cost1);
        let allowed = vec![true; cols];
        if let Some(status) = tab.iterate(&mut reduced, &allowed, max_pivots)? {
            // Phase 1 is bounded below by zero, so only the pivot cap can stop it.
            return Ok(failed(status, tab.pivots));
        }
        let infeas: f64 = (0..m).filter(|&i| is_art(tab.basis[i])).map(|i| tab.rhs(i)).sum();
        let scale = 1.0 + rows.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
        if infeas > 1e-9 * scale {
            return Ok(failed(LpStatus::Infeasible, tab.pivots));
        }
        // Drive zero-level artificials out of the basis where possible.
        for i in 0..m {
            if is_art(tab.basis[i]) {
                if let Some(j) = (0..n_struct + n_slack).find(|&j| tab.at(i, j).abs() > PIVOT_TOL) {
                    let mut dummy = vec![0.0; w];
                    tab.pivot(i, j, &mut dummy)?;
                }
            }
        }
    }

    // Phase 2.
    let mut cost2 = vec![0.0; cols];
    for (j, &c) in lp.objective.iter().enumerate() {
        match map[j] {
            Column::Shift { col, .. } => cost2[col] = c,
            Column::Mirror { col, .. } => cost2[col] = -c,
            Column::Split { pos, neg } => {
                cost2[pos] = c;
                cost2[neg] = -c;
            }
        }
    }
    let mut reduced = tab.reduced_costs(&cost2);
    let allowed: Vec<bool> = (0..cols).map(|j| !is_art(j)).collect();
    if let Some(status) = tab.iterate(&mut reduced, &allowed, max_pivots)? {
        return Ok(failed(status, tab.pivots));
    }

    let mut y = vec![0.0; cols];
    for i in 0..m {
        y[tab.basis[i]] = tab.rhs(i);
    }
    let z: Vec<f64> = map
        .iter()
        .map(|c| match *c {
            Column::Shift { col, lo } => lo + y[col],
            Column::Mirror { col, hi } => hi - y[col],
            Column::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective: lp.objective_value(&z),
        max_violation: lp.max_violation(&z),
        pivots: tab.pivots,
        z,
    })
}

fn failed(status: LpStatus, pivots: usize) -> LpSolution {
    LpSolution {
        status,
        z: Vec::new(),
        objective: f64::NAN,
        pivots,
        max_violation: f64::INFINITY,
    }
}
