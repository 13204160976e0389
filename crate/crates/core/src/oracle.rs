//! Primal checks that do not go through the closed forms: optimal-transport
//! distances, worst-case expectations over finitely supported distributions,
//! and brute-force regularizers on grids.

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{FeasibleSet, Norm, Shape};
use crate::lp::{self, dot, LinearProgram, LpStatus};
use crate::regret::{self, AmbiguitySet, DiscreteDistribution, RiskLevel};

/// Gap below which a certificate stops refining.
pub const DEFAULT_GAP_TOL: f64 = 1e-2;
pub const DEFAULT_MAX_REFINEMENTS: usize = 4;
/// Largest number of grid points `grid_regularizer` will visit.
pub const MAX_GRID_POINTS: usize = 50_000_000;

/// A coupling between nominal atoms (rows) and candidate points (columns).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportPlan {
    pub pi: Vec<Vec<f64>>,
    /// `Σ π_jk ‖z_k − w_j‖`.
    pub cost: f64,
}

impl TransportPlan {
    pub fn row_sums(&self) -> Vec<f64> {
        self.pi.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let k = self.pi.first().map_or(0, Vec::len);
        (0..k).map(|c| self.pi.iter().map(|row| row[c]).sum()).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.row_sums().iter().sum()
    }

    /// Row sums match `weights` and the total mass is one, both within `tol`.
    pub fn is_feasible(&self, weights: &[f64], tol: f64) -> bool {
        let rows = self.row_sums();
        rows.len() == weights.len()
            && rows.iter().zip(weights).all(|(a, b)| (a - b).abs() <= tol)
            && (self.total_mass() - 1.0).abs() <= tol
            && self.pi.iter().flatten().all(|&m| m >= -tol)
    }
}

/// Candidate support points for the worst-case distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateGrid {
    pub points: Vec<Vec<f64>>,
    /// Refinement round that produced the grid.
    pub round: usize,
    /// Displacement lengths used around each atom.
    pub radii: Vec<f64>,
}

impl CandidateGrid {
    /// A grid made of the given points, nominal atoms first.
    pub fn from_points(nominal: &DiscreteDistribution, extra: Vec<Vec<f64>>) -> Self {
        let mut points: Vec<Vec<f64>> = nominal.atoms().iter().map(|a| a.point.clone()).collect();
        points.extend(extra);
        Self { points, round: 0, radii: Vec::new() }
    }

    /// Geometric displacement lengths for round `round`: `4 · 2^round` values
    /// from `r/4` to `2r · 8^round`.
    pub fn radii_for_round(r: f64, round: usize) -> Vec<f64> {
        if r <= 0.0 {
            return Vec::new();
        }
        let count = 4usize << round;
        let lo = r / 4.0;
        let hi = 2.0 * r * 8f64.powi(round as i32);
        let ratio = (hi / lo).powf(1.0 / (count - 1) as f64);
        (0..count).map(|i| lo * ratio.powi(i as i32)).collect()
    }

    /// Atoms, atoms moved along `±e_i`, and atoms moved along `steep`, at
    /// the displacement lengths of round `round`.
    pub fn around_atoms(nominal: &DiscreteDistribution, r: f64, round: usize, steep: &[f64]) -> Result<Self> {
        let n = nominal.dim();
        check_dim(n, steep.len())?;
        let radii = Self::radii_for_round(r, round);
        let mut extra = Vec::with_capacity(nominal.len() * radii.len() * (2 * n + 1));
        for atom in nominal.atoms() {
            for &s in &radii {
                for i in 0..n {
                    for sign in [1.0, -1.0] {
                        let mut z = atom.point.clone();
                        z[i] += sign * s;
                        extra.push(z);
                    }
                }
                if steep.iter().any(|&d| d != 0.0) {
                    extra.push(atom.point.iter().zip(steep).map(|(w, d)| w + s * d).collect());
                }
            }
        }
        let mut grid = Self::from_points(nominal, extra);
        grid.round = round;
        grid.radii = radii;
        Ok(grid)
    }

    /// Grid for the regret of `x`: the extra direction is the ground-norm
    /// unit vector aligned with `x − v*` for the farthest witness `v*`, along
    /// which the regret grows fastest.
    pub fn for_instance(set: &FeasibleSet, x: &[f64], amb: &AmbiguitySet, round: usize) -> Result<Self> {
        check_dim(set.dim(), x.len())?;
        check_dim(set.dim(), amb.nominal.dim())?;
        let far = set.farthest_distance(x, amb.dual_norm())?;
        let diff: Vec<f64> = x.iter().zip(&far.witness).map(|(a, b)| a - b).collect();
        let steep = amb.ground_norm.unit_ball_argmax(&diff);
        Self::around_atoms(&amb.nominal, amb.radius(), round, &steep)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains_atoms(&self, nominal: &DiscreteDistribution) -> bool {
        nominal.atoms().iter().all(|a| self.points.contains(&a.point))
    }
}

/// Type-1 Wasserstein distance between two discrete distributions, as the
/// optimal value of the transport LP.
pub fn w1_distance(p: &DiscreteDistribution, q: &DiscreteDistribution, ground_norm: Norm) -> Result<f64> {
    check_dim(p.dim(), q.dim())?;
    let (pa, qa) = (p.atoms(), q.atoms());
    let mut prog = LinearProgram::new();
    let mut cols = vec![vec![0usize; qa.len()]; pa.len()];
    for (j, a) in pa.iter().enumerate() {
        for (k, b) in qa.iter().enumerate() {
            let cost = ground_norm.distance(&a.point, &b.point);
            cols[j][k] = prog.add_var(format!("pi{}_{}", j + 1, k + 1), 0.0, f64::INFINITY, cost);
        }
    }
    for (j, a) in pa.iter().enumerate() {
        let terms: Vec<(usize, f64)> = cols[j].iter().map(|&c| (c, 1.0)).collect();
        prog.add_eq(&terms, a.weight);
    }
    for (k, b) in qa.iter().enumerate() {
        let terms: Vec<(usize, f64)> = cols.iter().map(|row| (row[k], 1.0)).collect();
        prog.add_eq(&terms, b.weight);
    }
    let sol = lp::solve(&prog)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective.max(0.0)),
        _ => Err(Error::NumericalBreakdown(sol.max_violation)),
    }
}

/// Largest `Σ π_jk f(z_k)` over plans with row sums `p_j` and transport cost
/// at most `r`. A lower bound on the supremum over the whole Wasserstein ball.
pub fn primal_worst_case_expectation(
    grid: &CandidateGrid,
    values: &[f64],
    nominal: &DiscreteDistribution,
    r: f64,
    ground_norm: Norm,
) -> Result<(f64, TransportPlan)> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidRadius(r));
    }
    check_dim(grid.len(), values.len())?;
    if let Some(p) = grid.points.iter().find(|p| p.len() != nominal.dim()) {
        return Err(Error::DimensionMismatch { expected: nominal.dim(), found: p.len() });
    }
    if !grid.contains_atoms(nominal) {
        return Err(Error::InfeasibleGrid);
    }
    let atoms = nominal.atoms();
    let mut prog = LinearProgram::new();
    let mut cols = vec![Vec::with_capacity(grid.len()); atoms.len()];
    let mut dist = vec![Vec::with_capacity(grid.len()); atoms.len()];
    for (j, a) in atoms.iter().enumerate() {
        for (k, z) in grid.points.iter().enumerate() {
            cols[j].push(prog.add_var(format!("pi{}_{}", j + 1, k + 1), 0.0, f64::INFINITY, -values[k]));
            dist[j].push(ground_norm.distance(z, &a.point));
        }
    }
    for (j, a) in atoms.iter().enumerate() {
        let terms: Vec<(usize, f64)> = cols[j].iter().map(|&c| (c, 1.0)).collect();
        prog.add_eq(&terms, a.weight);
    }
    let budget: Vec<(usize, f64)> = cols
        .iter()
        .zip(&dist)
        .flat_map(|(c, d)| c.iter().copied().zip(d.iter().copied()))
        .collect();
    prog.add_le(&budget, r);
    let sol = lp::solve(&prog)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(Error::InfeasibleGrid),
        _ => return Err(Error::NumericalBreakdown(sol.max_violation)),
    }
    let pi: Vec<Vec<f64>> = cols.iter().map(|c| c.iter().map(|&i| sol.z[i].max(0.0)).collect()).collect();
    let cost = pi.iter().zip(&dist).map(|(p, d)| dot(p, d)).sum();
    Ok((-sol.objective, TransportPlan { pi, cost }))
}

/// Outcome of comparing a closed-form worst case against the primal bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapCertificate {
    pub analytic: f64,
    pub primal: f64,
    /// `analytic − primal`.
    pub gap: f64,
    /// Optimal dual multiplier, the farthest-point distance at `x`.
    pub lambda_star: f64,
    /// Index of the last refinement round run.
    pub refinements: usize,
    /// Whether `gap < tol` was reached.
    pub reached: bool,
    pub plan: Option<TransportPlan>,
}

fn refine<G, F>(
    amb: &AmbiguitySet,
    analytic: f64,
    lambda_star: f64,
    tol: f64,
    max_refinements: usize,
    grid_for: G,
    integrand: F,
) -> Result<GapCertificate>
where
    G: Fn(usize) -> Result<CandidateGrid>,
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut best = f64::NEG_INFINITY;
    let mut best_plan = None;
    let mut round = 0;
    loop {
        let grid = grid_for(round)?;
        let values = grid.points.iter().map(|z| integrand(z)).collect::<Result<Vec<_>>>()?;
        let (value, plan) =
            primal_worst_case_expectation(&grid, &values, &amb.nominal, amb.radius(), amb.ground_norm)?;
        if value > best {
            best = value;
            best_plan = Some(plan);
        }
        if analytic - best < tol || round >= max_refinements {
            break;
        }
        round += 1;
    }
    let gap = analytic - best;
    Ok(GapCertificate {
        analytic,
        primal: best,
        gap,
        lambda_star,
        refinements: round,
        reached: gap < tol,
        plan: best_plan,
    })
}

fn exact(analytic: f64, primal: f64, lambda_star: f64) -> GapCertificate {
    GapCertificate {
        analytic,
        primal,
        gap: analytic - primal,
        lambda_star,
        refinements: 0,
        reached: true,
        plan: None,
    }
}

/// Checks the closed-form worst-case expected regret at `x` against the
/// primal transport bound, refining the candidate grid until the gap drops
/// below `tol` or `max_refinements` rounds have run. With `r = 0` the primal
/// value is the nominal expected regret and no LP is solved.
pub fn dual_gap_certificate(
    set: &FeasibleSet,
    x: &[f64],
    amb: &AmbiguitySet,
    tol: f64,
    max_refinements: usize,
) -> Result<GapCertificate> {
    let analytic = regret::worst_case_expected_regret(set, x, amb)?;
    let lambda_star = set.farthest_distance(x, amb.dual_norm())?.value;
    if amb.radius() == 0.0 {
        return Ok(exact(analytic, regret::expected_regret(set, x, &amb.nominal)?, lambda_star));
    }
    refine(
        amb,
        analytic,
        lambda_star,
        tol,
        max_refinements,
        |round| CandidateGrid::for_instance(set, x, amb, round),
        |z| regret::regret(set, x, z),
    )
}

/// Checks the worst-case expected cost `E[w]ᵀx + r‖x‖_*` against the primal
/// transport bound. Here `lambda_star` is `‖x‖_*`.
pub fn cost_gap_certificate(
    x: &[f64],
    amb: &AmbiguitySet,
    tol: f64,
    max_refinements: usize,
) -> Result<GapCertificate> {
    check_dim(amb.nominal.dim(), x.len())?;
    let mean = amb.nominal.mean();
    let lambda_star = amb.dual_norm().eval(x);
    let analytic = dot(&mean, x) + amb.radius() * lambda_star;
    if amb.radius() == 0.0 {
        return Ok(exact(analytic, dot(&mean, x), lambda_star));
    }
    let steep = amb.ground_norm.unit_ball_argmax(x);
    refine(
        amb,
        analytic,
        lambda_star,
        tol,
        max_refinements,
        |round| CandidateGrid::around_atoms(&amb.nominal, amb.radius(), round, &steep),
        |z| Ok(dot(z, x)),
    )
}

/// The CVaR counterpart: fixes `τ` at the nominal value-at-risk of the regret
/// and bounds `τ + sup_P E_P[max(R − τ, 0)]/(1 − α)` from below with the
/// primal LP. The closed-form worst-case CVaR is the analytic side.
pub fn cvar_gap_certificate(
    set: &FeasibleSet,
    x: &[f64],
    amb: &AmbiguitySet,
    alpha: RiskLevel,
    tol: f64,
    max_refinements: usize,
) -> Result<GapCertificate> {
    let analytic = regret::worst_case_cvar_regret(set, x, amb, alpha)?;
    let values = regret::atom_regrets(set, x, &amb.nominal)?;
    let probs: Vec<f64> = amb.nominal.atoms().iter().map(|a| a.weight).collect();
    let tau = regret::value_at_risk(&values, &probs, alpha);
    let tail = alpha.tail();
    let lambda_star = set.farthest_distance(x, amb.dual_norm())?.value;
    if amb.radius() == 0.0 {
        let primal = tau + dot(&probs, &values.iter().map(|v| (v - tau).max(0.0)).collect::<Vec<_>>()) / tail;
        return Ok(exact(analytic, primal, lambda_star));
    }
    // The integrand is pre-scaled so the gap tolerance applies in CVaR units.
    let mut cert = refine(
        amb,
        analytic - tau,
        lambda_star,
        tol,
        max_refinements,
        |round| CandidateGrid::for_instance(set, x, amb, round),
        |z| Ok((regret::regret(set, x, z)? - tau).max(0.0) / tail),
    )?;
    cert.analytic = analytic;
    cert.primal += tau;
    cert.gap = cert.analytic - cert.primal;
    Ok(cert)
}

/// Closed halfspaces `a·v ≤ b` (unit normals) bounding the hull of a
/// full-dimensional vertex list in one to three dimensions.
fn hull_halfspaces(vertices: &[Vec<f64>]) -> Option<Vec<(Vec<f64>, f64)>> {
    let n = vertices.first()?.len();
    let scale = vertices.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    let eps = 1e-9 * scale;
    let mut normals: Vec<Vec<f64>> = Vec::new();
    match n {
        1 => normals.push(vec![1.0]),
        2 => {
            for (i, a) in vertices.iter().enumerate() {
                for b in &vertices[i + 1..] {
                    normals.push(vec![-(b[1] - a[1]), b[0] - a[0]]);
                }
            }
        }
        3 => {
            for (i, a) in vertices.iter().enumerate() {
                for (j, b) in vertices.iter().enumerate().skip(i + 1) {
                    for c in &vertices[j + 1..] {
                        let u: Vec<f64> = (0..3).map(|k| b[k] - a[k]).collect();
                        let w: Vec<f64> = (0..3).map(|k| c[k] - a[k]).collect();
                        normals.push(vec![
                            u[1] * w[2] - u[2] * w[1],
                            u[2] * w[0] - u[0] * w[2],
                            u[0] * w[1] - u[1] * w[0],
                        ]);
                    }
                }
            }
        }
        _ => return None,
    }
    let mut faces = Vec::new();
    for normal in normals {
        let len = Norm::L2.eval(&normal);
        if len <= eps * eps {
            continue;
        }
        let unit: Vec<f64> = normal.iter().map(|a| a / len).collect();
        let proj: Vec<f64> = vertices.iter().map(|v| dot(&unit, v)).collect();
        let hi = proj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = proj.iter().copied().fold(f64::INFINITY, f64::min);
        if hi - lo <= eps {
            // Every vertex on one hyperplane: the hull is flat.
            return None;
        }
        faces.push((unit.clone(), hi + eps));
        faces.push((unit.iter().map(|a| -a).collect(), -lo + eps));
    }
    if faces.is_empty() {
        None
    } else {
        Some(faces)
    }
}

/// Largest dual-norm distance from `x` to points of an axis-aligned grid with
/// spacing `step` laid over the bounding box of `X`, keeping only grid points
/// inside `X`.
pub fn grid_regularizer(set: &FeasibleSet, x: &[f64], dual: Norm, step: f64) -> Result<f64> {
    let n = set.dim();
    if n > 3 {
        return Err(Error::DimensionTooLarge(n));
    }
    check_dim(n, x.len())?;
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidInput(format!("grid step must be positive, got {step}")));
    }
    let (lo, hi) = set.bounding_box();
    let counts: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| ((h - l) / step).floor() as usize + 1).collect();
    let total = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c));
    if total.is_none_or(|t| t > MAX_GRID_POINTS) {
        return Err(Error::InvalidInput(format!("grid step {step} gives too many points")));
    }
    let faces = match set.shape() {
        Shape::VPolytope { vertices } => Some(hull_halfspaces(vertices).ok_or_else(|| {
            Error::InvalidInput("grid scan needs a full-dimensional polytope".into())
        })?),
        _ => None,
    };
    let inside = |v: &[f64]| -> bool {
        match &faces {
            Some(f) => f.iter().all(|(a, b)| dot(a, v) <= *b),
            None => set.contains(v, 1e-12).unwrap_or(false),
        }
    };
    let mut best = f64::NEG_INFINITY;
    let mut idx = vec![0usize; n];
    let mut v = lo.clone();
    'outer: loop {
        for k in 0..n {
            v[k] = lo[k] + idx[k] as f64 * step;
        }
        let d = dual.distance(x, &v);
        if d > best && inside(&v) {
            best = d;
        }
        for k in 0..n {
            idx[k] += 1;
            if idx[k] < counts[k] {
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }
    if best == f64::NEG_INFINITY {
        return Err(Error::InvalidInput(format!("no grid point with step {step} lies in the set")));
    }
    Ok(best)
}
