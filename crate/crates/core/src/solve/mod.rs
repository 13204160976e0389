//! Solver backends behind one dispatch layer.
//!
//! Polyhedral instances (vertex lists with 1-/∞-norm regularizers, boxes
//! with the ∞-norm regularizer) are compiled into linear programs and solved
//! with the dense simplex. Boxes and Euclidean balls can also be handled by
//! projected subgradient steps, which is the only route for balls and for
//! 2-norm regularizers. Reported objectives are always re-evaluated with the
//! exact closed forms of the regret module at the returned decision.

mod subgradient;

use serde::{Deserialize, Serialize};

pub use subgradient::{subgradient_solve, Composite, Objective, SubgradientParams};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{FeasibleSet, Norm, Shape};
use crate::lp::{self, dot, LinearProgram, LpStatus};
use crate::reformulate::{self, CompiledProblem};
use crate::regret::{self, AmbiguitySet, DiscreteDistribution, RiskLevel};

/// Membership tolerance attached to an OPTIMAL report.
pub const NONUNIQUE_TOL: f64 = 1e-6;

pub const REPORT_FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Simplex,
    Subgradient,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Simplex => "SIMPLEX",
            Method::Subgradient => "SUBGRADIENT",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Optimal,
    IterationLimit,
    Infeasible,
    Unbounded,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Optimal => "OPTIMAL",
            Status::IterationLimit => "ITERATION_LIMIT",
            Status::Infeasible => "INFEASIBLE",
            Status::Unbounded => "UNBOUNDED",
        }
    }
}

impl From<LpStatus> for Status {
    fn from(s: LpStatus) -> Self {
        match s {
            LpStatus::Optimal => Status::Optimal,
            LpStatus::Infeasible => Status::Infeasible,
            LpStatus::Unbounded => Status::Unbounded,
            LpStatus::IterationLimit => Status::IterationLimit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub x_star: Vec<f64>,
    pub objective: f64,
    /// Regularizer value at `x_star`.
    pub lambda_star: f64,
    pub method: Method,
    pub iterations: usize,
    /// Largest constraint violation of the returned point.
    pub residual: f64,
    pub status: Status,
    /// Set when another optimum at the same objective lies farther than
    /// `NONUNIQUE_TOL` from `x_star`. Only the simplex route checks this.
    pub nonunique: bool,
}

/// Which backend to use.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    #[default]
    Auto,
    Simplex,
    Subgradient,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveOptions {
    pub method: MethodChoice,
    pub subgradient: SubgradientParams,
}

/// Solves a raw LP. `x_star` holds every column; there is no regularizer.
pub fn simplex_solve(program: &LinearProgram) -> Result<SolveReport> {
    let sol = lp::solve(program)?;
    Ok(SolveReport {
        x_star: sol.z,
        objective: sol.objective,
        lambda_star: 0.0,
        method: Method::Simplex,
        iterations: sol.pivots,
        residual: sol.max_violation,
        status: sol.status.into(),
        nonunique: false,
    })
}

/// Solves a compiled problem; `objective` includes the offset and
/// `lambda_star` is the epigraph variable.
pub fn solve_compiled(problem: &CompiledProblem) -> Result<SolveReport> {
    let sol = lp::solve(&problem.lp)?;
    if sol.status != LpStatus::Optimal {
        return Ok(SolveReport {
            x_star: Vec::new(),
            objective: f64::NAN,
            lambda_star: f64::NAN,
            method: Method::Simplex,
            iterations: sol.pivots,
            residual: sol.max_violation,
            status: sol.status.into(),
            nonunique: false,
        });
    }
    let x_star = problem.decision_values(&sol.z);
    let nonunique = has_distinct_optimum(problem, sol.objective, &x_star)?;
    Ok(SolveReport {
        x_star,
        objective: sol.objective + problem.objective_offset,
        lambda_star: sol.z[problem.regularizer],
        method: Method::Simplex,
        iterations: sol.pivots,
        residual: sol.max_violation,
        status: Status::Optimal,
        nonunique,
    })
}

/// Minimizes and maximizes a fixed generic direction over the optimal face
/// and reports whether either end leaves the `NONUNIQUE_TOL` box around `x_star`.
fn has_distinct_optimum(problem: &CompiledProblem, optimum: f64, x_star: &[f64]) -> Result<bool> {
    let slack = 1e-9 * (1.0 + optimum.abs());
    let direction: Vec<f64> = (0..problem.decision.len()).map(|k| 1.0 + 0.618_034 * k as f64).collect();
    for sign in [1.0, -1.0] {
        let mut probe = problem.lp.clone();
        let face: Vec<(usize, f64)> = probe.objective.iter().copied().enumerate().filter(|t| t.1 != 0.0).collect();
        probe.add_le(&face, optimum + slack);
        probe.objective = vec![0.0; probe.num_vars()];
        for (&col, d) in problem.decision.iter().zip(&direction) {
            probe.objective[col] = sign * d;
        }
        let sol = lp::solve(&probe)?;
        if sol.status == LpStatus::Optimal
            && Norm::Linf.distance(&problem.decision_values(&sol.z), x_star) > NONUNIQUE_TOL
        {
            return Ok(true);
        }
    }
    Ok(false)
}

fn unsupported(set: &FeasibleSet, dual: Norm, reason: &'static str) -> Error {
    Error::UnsupportedCombination { set: set.kind_name(), norm: dual.as_str(), reason }
}

fn farthest_supported(set: &FeasibleSet, dual: Norm) -> bool {
    match set.shape() {
        Shape::VPolytope { .. } => true,
        Shape::NormBall { norm: Norm::L2, .. } => dual != Norm::L1,
        _ => dual == Norm::Linf,
    }
}

/// LP route for the regret problems: vertex lists with polyhedral duals, boxes with ∞-norm.
fn regret_lp_route(set: &FeasibleSet, dual: Norm) -> bool {
    match set.shape() {
        Shape::VPolytope { .. } => dual.is_polyhedral(),
        Shape::Box { .. } => dual == Norm::Linf,
        Shape::NormBall { .. } => false,
    }
}

fn cost_lp_route(set: &FeasibleSet, dual: Norm) -> bool {
    matches!(set.shape(), Shape::VPolytope { .. } | Shape::Box { .. }) && dual.is_polyhedral()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    Lp,
    Subgradient,
}

fn choose_route(
    set: &FeasibleSet,
    dual: Norm,
    lp_ok: bool,
    sub_ok: bool,
    choice: MethodChoice,
) -> Result<Route> {
    match choice {
        MethodChoice::Auto if lp_ok => Ok(Route::Lp),
        MethodChoice::Auto if sub_ok => Ok(Route::Subgradient),
        MethodChoice::Simplex if lp_ok => Ok(Route::Lp),
        MethodChoice::Subgradient if sub_ok => Ok(Route::Subgradient),
        MethodChoice::Simplex => Err(unsupported(set, dual, "no linear-programming form for this combination")),
        MethodChoice::Subgradient => Err(unsupported(set, dual, "subgradient method needs a projectable set")),
        MethodChoice::Auto => Err(unsupported(set, dual, "no solver supports this combination")),
    }
}

/// Restates an LP or subgradient report with the exact objective at `x_star`.
fn finalize(
    mut report: SolveReport,
    set: &FeasibleSet,
    radius: f64,
    exact: impl Fn(&[f64]) -> Result<f64>,
    regularizer: impl Fn(&[f64]) -> Result<f64>,
) -> Result<SolveReport> {
    if report.status != Status::Optimal && report.status != Status::IterationLimit {
        return Ok(report);
    }
    if !set.contains(&report.x_star, REPORT_FEASIBILITY_TOL)? {
        report.status = Status::Infeasible;
        return Ok(report);
    }
    report.objective = exact(&report.x_star)?;
    // With r = 0 the epigraph variable carries no cost and need not be tight.
    if report.method == Method::Subgradient || radius == 0.0 {
        report.lambda_star = regularizer(&report.x_star)?;
    }
    Ok(report)
}

/// Minimizes the worst-case expected regret over the Wasserstein ball.
/// The reported objective is the worst-case expected regret at `x_star`.
pub fn solve_drro(
    set: &FeasibleSet,
    nominal: &DiscreteDistribution,
    radius: f64,
    ground_norm: Norm,
    options: &SolveOptions,
) -> Result<SolveReport> {
    let amb = AmbiguitySet::new(nominal.clone(), radius, ground_norm)?;
    check_dim(set.dim(), nominal.dim())?;
    let dual = ground_norm.dual();
    let lp_ok = regret_lp_route(set, dual);
    let sub_ok = set.supports_projection() && farthest_supported(set, dual);
    let report = match choose_route(set, dual, lp_ok, sub_ok, options.method)? {
        Route::Lp => {
            let problem = match set.shape() {
                Shape::VPolytope { .. } => reformulate::build_vrep(set, nominal, radius, dual)?,
                _ => reformulate::build_support_reform(set, nominal, radius)?,
            };
            solve_compiled(&problem)?
        }
        Route::Subgradient => subgradient_solve(
            set,
            nominal,
            Composite::ExpectedRegret { radius, dual },
            &options.subgradient,
        )?,
    };
    finalize(
        report,
        set,
        radius,
        |x| regret::worst_case_expected_regret(set, x, &amb),
        |x| Ok(set.farthest_distance(x, dual)?.value),
    )
}

/// Minimizes the worst-case expected cost `E[w]ᵀx + r‖x‖_*`.
pub fn solve_dro(
    set: &FeasibleSet,
    nominal: &DiscreteDistribution,
    radius: f64,
    ground_norm: Norm,
    options: &SolveOptions,
) -> Result<SolveReport> {
    AmbiguitySet::new(nominal.clone(), radius, ground_norm)?;
    check_dim(set.dim(), nominal.dim())?;
    let dual = ground_norm.dual();
    let lp_ok = cost_lp_route(set, dual);
    let sub_ok = set.supports_projection();
    let report = match choose_route(set, dual, lp_ok, sub_ok, options.method)? {
        Route::Lp => solve_compiled(&reformulate::build_dro(set, nominal, radius, dual)?)?,
        Route::Subgradient => subgradient_solve(
            set,
            nominal,
            Composite::ExpectedCost { radius, dual },
            &options.subgradient,
        )?,
    };
    let mean = nominal.mean();
    finalize(
        report,
        set,
        radius,
        |x| Ok(dot(&mean, x) + radius * dual.eval(x)),
        |x| Ok(dual.eval(x)),
    )
}

/// Minimizes the worst-case CVaR of regret at level `alpha`.
pub fn solve_wcvar(
    set: &FeasibleSet,
    nominal: &DiscreteDistribution,
    radius: f64,
    alpha: f64,
    ground_norm: Norm,
    options: &SolveOptions,
) -> Result<SolveReport> {
    let level = RiskLevel::new(alpha)?;
    let amb = AmbiguitySet::new(nominal.clone(), radius, ground_norm)?;
    check_dim(set.dim(), nominal.dim())?;
    let dual = ground_norm.dual();
    let lp_ok = regret_lp_route(set, dual);
    let sub_ok = set.supports_projection() && farthest_supported(set, dual);
    let report = match choose_route(set, dual, lp_ok, sub_ok, options.method)? {
        Route::Lp => solve_compiled(&reformulate::build_wcvar(set, nominal, radius, alpha, dual)?)?,
        Route::Subgradient => subgradient_solve(
            set,
            nominal,
            Composite::CvarRegret { radius, alpha: level, dual },
            &options.subgradient,
        )?,
    };
    finalize(
        report,
        set,
        radius,
        |x| regret::worst_case_cvar_regret(set, x, &amb, level),
        |x| Ok(set.farthest_distance(x, dual)?.value),
    )
}

/// A minimizer of the farthest-point distance `sup_{v∈X} ‖x − v‖_*` over `X`:
/// the point where regret-optimal decisions settle as the radius grows.
pub fn regularizer_center(set: &FeasibleSet, ground_norm: Norm, options: &SolveOptions) -> Result<SolveReport> {
    let zero = DiscreteDistribution::dirac(vec![0.0; set.dim()])?;
    solve_drro(set, &zero, 1.0, ground_norm, options)
}
