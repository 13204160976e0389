//! Compiles the regularized regret, cost and CVaR problems into linear programs.
//!
//! Every builder returns a [`CompiledProblem`]: the LP itself, the column
//! indices of the decision `x`, the column of the regularizer epigraph
//! variable, and a constant offset such that `LP value + offset` is the
//! problem's value on its natural scale (regret units for the regret
//! problems, cost units for the plain cost problem).
//!
//! Variable order is fixed: `x1..xn`, then the epigraph variable, then
//! auxiliaries. Epigraph rows are emitted vertex-major, coordinate-minor.

use crate::error::{check_dim, Error, Result};
use crate::geometry::{FeasibleSet, Norm, Shape};
pub use crate::lp::LinearProgram;
use crate::regret::{DiscreteDistribution, RiskLevel};

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledProblem {
    pub lp: LinearProgram,
    /// Columns holding `x`, in coordinate order.
    pub decision: Vec<usize>,
    /// Column of the regularizer epigraph variable (λ, or μ for the cost problem).
    pub regularizer: usize,
    pub objective_offset: f64,
}

impl CompiledProblem {
    pub fn decision_values(&self, z: &[f64]) -> Vec<f64> {
        self.decision.iter().map(|&j| z[j]).collect()
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRadius(r))
    }
}

fn unsupported(set: &FeasibleSet, norm: Norm, reason: &'static str) -> Error {
    Error::UnsupportedCombination { set: set.kind_name(), norm: norm.as_str(), reason }
}

/// Adds `x` columns. Box bounds become column bounds; other shapes leave `x` free.
fn decision_columns(lp: &mut LinearProgram, set: &FeasibleSet, cost: &[f64]) -> Vec<usize> {
    let n = set.dim();
    (0..n)
        .map(|k| {
            let (lo, hi) = match set.shape() {
                Shape::Box { lower, upper } => (lower[k], upper[k]),
                _ => (f64::NEG_INFINITY, f64::INFINITY),
            };
            lp.add_var(format!("x{}", k + 1), lo, hi, cost[k])
        })
        .collect()
}

/// Rows forcing `x ∈ X`. Vertex lists use convex multipliers θ ≥ 0, Σθ = 1,
/// x = Σθ_i v_i; boxes are already handled by column bounds.
fn membership_rows(lp: &mut LinearProgram, set: &FeasibleSet, x: &[usize], norm: Norm) -> Result<()> {
    match set.shape() {
        Shape::Box { .. } => Ok(()),
        Shape::VPolytope { vertices } => {
            let theta: Vec<usize> = (0..vertices.len())
                .map(|i| lp.add_var(format!("theta{}", i + 1), 0.0, f64::INFINITY, 0.0))
                .collect();
            let ones: Vec<(usize, f64)> = theta.iter().map(|&j| (j, 1.0)).collect();
            lp.add_eq(&ones, 1.0);
            for (k, &xk) in x.iter().enumerate() {
                let mut terms = vec![(xk, 1.0)];
                terms.extend(theta.iter().zip(vertices).map(|(&j, v)| (j, -v[k])));
                lp.add_eq(&terms, 0.0);
            }
            Ok(())
        }
        Shape::NormBall { .. } => Err(unsupported(set, norm, "ball membership is not LP-representable")),
    }
}

/// `‖x − v_i‖ ≤ λ` for every vertex, in a polyhedral norm.
fn vertex_epigraph(
    lp: &mut LinearProgram,
    vertices: &[Vec<f64>],
    x: &[usize],
    lam: usize,
    dual: Norm,
) {
    match dual {
        Norm::Linf => {
            for v in vertices {
                for (k, &xk) in x.iter().enumerate() {
                    lp.add_le(&[(xk, 1.0), (lam, -1.0)], v[k]);
                    lp.add_le(&[(xk, -1.0), (lam, -1.0)], -v[k]);
                }
            }
        }
        Norm::L1 => {
            for (i, v) in vertices.iter().enumerate() {
                let t: Vec<usize> = (0..x.len())
                    .map(|k| lp.add_var(format!("t{}_{}", i + 1, k + 1), 0.0, f64::INFINITY, 0.0))
                    .collect();
                for (k, (&xk, &tk)) in x.iter().zip(&t).enumerate() {
                    lp.add_le(&[(xk, 1.0), (tk, -1.0)], v[k]);
                    lp.add_le(&[(xk, -1.0), (tk, -1.0)], -v[k]);
                }
                let mut sum: Vec<(usize, f64)> = t.iter().map(|&j| (j, 1.0)).collect();
                sum.push((lam, -1.0));
                lp.add_le(&sum, 0.0);
            }
        }
        Norm::L2 => unreachable!("callers reject non-polyhedral norms"),
    }
}

/// `σ(e_i) − x_i ≤ λ` and `σ(−e_i) + x_i ≤ λ` for every coordinate.
fn support_epigraph(lp: &mut LinearProgram, set: &FeasibleSet, x: &[usize], lam: usize) -> Result<()> {
    let mut e = vec![0.0; set.dim()];
    for (i, &xi) in x.iter().enumerate() {
        e[i] = 1.0;
        let up = set.support_function(&e)?;
        e[i] = -1.0;
        let down = set.support_function(&e)?;
        e[i] = 0.0;
        lp.add_le(&[(xi, -1.0), (lam, -1.0)], -up);
        lp.add_le(&[(xi, 1.0), (lam, -1.0)], -down);
    }
    Ok(())
}

/// Regularizer rows for the shapes with an exact LP form of `sup_v ‖x − v‖_*`.
fn regularizer_rows(
    lp: &mut LinearProgram,
    set: &FeasibleSet,
    x: &[usize],
    lam: usize,
    dual: Norm,
) -> Result<()> {
    match (set.shape(), dual) {
        (_, Norm::L2) => Err(unsupported(set, dual, "2-norm regularizer is not polyhedral")),
        (Shape::VPolytope { vertices }, _) => {
            vertex_epigraph(lp, vertices, x, lam, dual);
            Ok(())
        }
        (Shape::Box { .. }, Norm::Linf) => support_epigraph(lp, set, x, lam),
        (Shape::Box { .. }, _) => Err(unsupported(set, dual, "farthest-point distance not supported")),
        (Shape::NormBall { .. }, _) => Err(unsupported(set, dual, "ball membership is not LP-representable")),
    }
}

fn check_inputs(set: &FeasibleSet, nominal: &DiscreteDistribution, r: f64) -> Result<()> {
    check_radius(r)?;
    check_dim(set.dim(), nominal.dim())
}

/// Vertex-list program: minimize `E[w]ᵀx + rλ` with `‖x − v_i‖_* ≤ λ` for
/// every vertex and `x` a convex combination of the vertices.
pub fn build_vrep(
    set: &FeasibleSet,
    nominal: &DiscreteDistribution,
    r: f64,
    dual: Norm,
) -> Result<CompiledProblem> {
    check_inputs(set, nominal, r)?;
    let Shape::VPolytope { vertices } = set.shape() else {
        return Err(unsupported(set, dual, "vertex program needs a vertex list"));
    };
    if !dual.is_polyhedral() {
        return Err(unsupported(set, dual, "2-norm regularizer is not polyhedral"));
    }
    let mut lp = LinearProgram::new();
    let x = decision_columns(&mut lp, set, &nominal.mean());
    let lam = lp.add_var("lambda", 0.0, f64::INFINITY, r);
    vertex_epigraph(&mut lp, vertices, &x, lam, dual);
    membership_rows(&mut lp, set, &x, dual)?;
    Ok(CompiledProblem {
        lp,
        decision: x,
        regularizer: lam,
        objective_offset: -nominal.expected_min_cost(set)?,
    })
}

/// ∞-norm regularizer through the 2n support values: minimize `E[w]ᵀx + rλ`
/// with `σ(e_i) − x_i ≤ λ`, `σ(−e_i) + x_i ≤ λ` and `x ∈ X`.
pub fn build_support_reform(
    set: &FeasibleSet,
    nominal: &DiscreteDistribution,
    r: f64,
) -> Result<CompiledProblem> {
    check_inputs(set, nominal, r)?;
    let mut lp = LinearProgram::new();
    let x = decision_columns(&mut lp, set, &nominal.mean());
    let lam = lp.add_var("lambda", 0.0, f64::INFINITY, r);
    support_epigraph(&mut lp, set, &x, lam)?;
    membership_rows(&mut lp, set, &x, Norm::Linf)?;
    Ok(CompiledProblem {
        lp,
        decision: x,
        regularizer: lam,
        objective_offset: -nominal.expected_min_cost(set)?,
    })
}

/// Worst-case expected cost: minimize `E[w]ᵀx + rμ` with `‖x‖_* ≤ μ`.
pub fn build_dro(
    set: &FeasibleSet,
    nominal: &DiscreteDistribution,
    r: f64,
    dual: Norm,
) -> Result<CompiledProblem> {
    check_inputs(set, nominal, r)?;
    if !dual.is_polyhedral() {
        return Err(unsupported(set, dual, "2-norm regularizer is not polyhedral"));
    }
    let mut lp = LinearProgram::new();
    let x = decision_columns(&mut lp, set, &nominal.mean());
    let mu = lp.add_var("mu", 0.0, f64::INFINITY, r);
    match dual {
        Norm::Linf => {
            for &xk in &x {
                lp.add_le(&[(xk, 1.0), (mu, -1.0)], 0.0);
                lp.add_le(&[(xk, -1.0), (mu, -1.0)], 0.0);
            }
        }
        _ => {
            let t: Vec<usize> = (0..x.len())
                .map(|k| lp.add_var(format!("t{}", k + 1), 0.0, f64::INFINITY, 0.0))
                .collect();
            for (&xk, &tk) in x.iter().zip(&t) {
                lp.add_le(&[(xk, 1.0), (tk, -1.0)], 0.0);
                lp.add_le(&[(xk, -1.0), (tk, -1.0)], 0.0);
            }
            let mut sum: Vec<(usize, f64)> = t.iter().map(|&j| (j, 1.0)).collect();
            sum.push((mu, -1.0));
            lp.add_le(&sum, 0.0);
        }
    }
    membership_rows(&mut lp, set, &x, dual)?;
    Ok(CompiledProblem { lp, decision: x, regularizer: mu, objective_offset: 0.0 })
}

/// Worst-case CVaR of regret: minimize
/// `τ + Σ_j p_j u_j/(1 − α) + rλ/(1 − α)` subject to
/// `u_j ≥ w_jᵀx − κ_j − τ`, `u_j ≥ 0`, the regularizer rows and `x ∈ X`,
/// where `κ_j = min_{y∈X} w_jᵀy` is precomputed.
pub fn build_wcvar(
    set: &FeasibleSet,
    nominal: &DiscreteDistribution,
    r: f64,
    alpha: f64,
    dual: Norm,
) -> Result<CompiledProblem> {
    let alpha = RiskLevel::new(alpha)?;
    check_inputs(set, nominal, r)?;
    let tail = alpha.tail();
    let mut lp = LinearProgram::new();
    let x = decision_columns(&mut lp, set, &vec![0.0; set.dim()]);
    let lam = lp.add_var("lambda", 0.0, f64::INFINITY, r / tail);
    regularizer_rows(&mut lp, set, &x, lam, dual)?;
    let tau = lp.add_var("tau", f64::NEG_INFINITY, f64::INFINITY, 1.0);
    for (j, atom) in nominal.atoms().iter().enumerate() {
        let u = lp.add_var(format!("u{}", j + 1), 0.0, f64::INFINITY, atom.weight / tail);
        let kappa = set.min_cost(&atom.point)?;
        let mut terms: Vec<(usize, f64)> = x.iter().zip(&atom.point).map(|(&xk, &wk)| (xk, wk)).collect();
        terms.push((tau, -1.0));
        terms.push((u, -1.0));
        lp.add_le(&terms, kappa);
    }
    membership_rows(&mut lp, set, &x, dual)?;
    Ok(CompiledProblem { lp, decision: x, regularizer: lam, objective_offset: 0.0 })
}

/// Structural diagnostics for an emitted program.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyReport {
    pub variables: usize,
    pub inequality_rows: usize,
    pub equality_rows: usize,
    /// Pairs of identical rows (coefficients and right-hand side within 1e-12).
    /// Inequality rows are numbered first, then equality rows.
    pub duplicate_rows: Vec<(usize, usize)>,
    pub empty_rows: Vec<usize>,
    pub unused_columns: Vec<usize>,
    /// Smallest and largest nonzero coefficient magnitude.
    pub coefficient_range: (f64, f64),
    pub warnings: Vec<String>,
}

pub fn lp_degeneracy_report(p: &CompiledProblem) -> DegeneracyReport {
    const DUP_TOL: f64 = 1e-12;
    let lp = &p.lp;
    let ni = lp.ineq_rows.len();
    let rows: Vec<(&Vec<f64>, f64, bool)> = lp
        .ineq_rows
        .iter()
        .zip(&lp.ineq_rhs)
        .map(|(r, &b)| (r, b, false))
        .chain(lp.eq_rows.iter().zip(&lp.eq_rhs).map(|(r, &b)| (r, b, true)))
        .collect();

    let mut duplicate_rows = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (ri, bi, ei) = rows[i];
            let (rj, bj, ej) = rows[j];
            if ei == ej
                && (bi - bj).abs() <= DUP_TOL
                && ri.iter().zip(rj).all(|(a, b)| (a - b).abs() <= DUP_TOL)
            {
                duplicate_rows.push((i, j));
            }
        }
    }
    let empty_rows: Vec<usize> = rows
        .iter()
        .enumerate()
        .filter(|(_, (r, _, _))| r.iter().all(|&a| a == 0.0))
        .map(|(i, _)| i)
        .collect();
    let unused_columns: Vec<usize> = (0..lp.num_vars())
        .filter(|&j| lp.objective[j] == 0.0 && rows.iter().all(|(r, _, _)| r[j] == 0.0))
        .collect();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for (r, _, _) in &rows {
        for &a in r.iter() {
            if a != 0.0 {
                lo = lo.min(a.abs());
                hi = hi.max(a.abs());
            }
        }
    }
    if lo == f64::INFINITY {
        lo = 0.0;
    }

    let mut warnings = Vec::new();
    if !duplicate_rows.is_empty() {
        warnings.push(format!("{} duplicate row pair(s)", duplicate_rows.len()));
    }
    if !empty_rows.is_empty() {
        warnings.push(format!("{} empty row(s)", empty_rows.len()));
    }
    if lo > 0.0 && hi / lo > 1e8 {
        warnings.push(format!("coefficient range {:.1e} may be ill-conditioned", hi / lo));
    }
    if lp.eq_rows.len() > lp.num_vars() {
        warnings.push("more equality rows than variables".into());
    }

    DegeneracyReport {
        variables: lp.num_vars(),
        inequality_rows: ni,
        equality_rows: lp.eq_rows.len(),
        duplicate_rows,
        empty_rows,
        unused_columns,
        coefficient_range: (lo, hi),
        warnings,
    }
}
