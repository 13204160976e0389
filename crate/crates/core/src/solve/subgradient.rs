//! Projected subgradient method for the regularized objectives on sets that
//! admit Euclidean projection (boxes and 2-norm balls).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Method, SolveReport, Status};
use crate::error::{check_dim, Error, Result};
use crate::geometry::{FeasibleSet, Norm};
use crate::lp::dot;
use crate::regret::{cvar_tail_weights, DiscreteDistribution, RiskLevel};

/// Step-scale divisor applied at each restart.
pub const RESTART_SHRINK: f64 = 4.0;
/// An epoch ends after at most this many stall windows.
pub const EPOCH_FACTOR: usize = 4;
/// Relative step scale at which the method declares convergence.
pub const MIN_STEP_SCALE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientParams {
    pub max_iter: usize,
    /// Initial step at iteration k is `step_scale · diam(X) / √k` along the normalized subgradient.
    pub step_scale: f64,
    /// Restart with a smaller step once the best value has not improved by
    /// `stall_tol` (relative) for this many iterations.
    pub stall_window: usize,
    pub stall_tol: f64,
    pub seed: u64,
    /// Start from a seeded random point instead of the projected nominal mean.
    pub random_start: bool,
}

impl Default for SubgradientParams {
    fn default() -> Self {
        Self {
            max_iter: 50_000,
            step_scale: 1.0,
            stall_window: 500,
            stall_tol: 1e-9,
            seed: 0,
            random_start: false,
        }
    }
}

impl SubgradientParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be >= 1".into()));
        }
        if !(self.step_scale.is_finite() && self.step_scale > 0.0) {
            return Err(Error::InvalidInput("step_scale must be > 0".into()));
        }
        Ok(())
    }
}

/// The nonsmooth objective being minimized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Composite {
    /// `E[R(x, w)] + r · sup_v ‖x − v‖_*` (regret units).
    ExpectedRegret { radius: f64, dual: Norm },
    /// `E[w]ᵀx + r · ‖x‖_*` (cost units).
    ExpectedCost { radius: f64, dual: Norm },
    /// `CVaR_α(R(x, w)) + r/(1 − α) · sup_v ‖x − v‖_*` (regret units).
    CvarRegret { radius: f64, alpha: RiskLevel, dual: Norm },
}

impl Composite {
    pub fn dual(&self) -> Norm {
        match *self {
            Composite::ExpectedRegret { dual, .. }
            | Composite::ExpectedCost { dual, .. }
            | Composite::CvarRegret { dual, .. } => dual,
        }
    }
}

/// Exact objective evaluation with one subgradient, shared by the solver and by
/// optimality checks.
pub struct Objective<'a> {
    set: &'a FeasibleSet,
    nominal: &'a DiscreteDistribution,
    kind: Composite,
    mean: Vec<f64>,
    /// `min_{y∈X} w_jᵀy` per atom.
    kappa: Vec<f64>,
}

impl<'a> Objective<'a> {
    pub fn new(set: &'a FeasibleSet, nominal: &'a DiscreteDistribution, kind: Composite) -> Result<Self> {
        check_dim(set.dim(), nominal.dim())?;
        let kappa = nominal
            .atoms()
            .iter()
            .map(|a| set.min_cost(&a.point))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { set, nominal, kind, mean: nominal.mean(), kappa })
    }

    /// Regularizer value at `x`: farthest distance, or `‖x‖_*` for the cost objective.
    pub fn regularizer(&self, x: &[f64]) -> Result<f64> {
        match self.kind {
            Composite::ExpectedCost { dual, .. } => Ok(dual.eval(x)),
            _ => Ok(self.set.farthest_distance(x, self.kind.dual())?.value),
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.evaluate(x)?.0)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        check_dim(self.set.dim(), x.len())?;
        match self.kind {
            Composite::ExpectedCost { radius, dual } => {
                let value = dot(&self.mean, x) + radius * dual.eval(x);
                let s = dual.subgradient(x);
                let g = self.mean.iter().zip(&s).map(|(m, d)| m + radius * d).collect();
                Ok((value, g))
            }
            Composite::ExpectedRegret { radius, dual } => {
                let (lip, s) = self.farthest(x, dual)?;
                let expected_kappa: f64 =
                    self.nominal.atoms().iter().zip(&self.kappa).map(|(a, k)| a.weight * k).sum();
                let value = dot(&self.mean, x) - expected_kappa + radius * lip;
                let g = self.mean.iter().zip(&s).map(|(m, d)| m + radius * d).collect();
                Ok((value, g))
            }
            Composite::CvarRegret { radius, alpha, dual } => {
                let (lip, s) = self.farthest(x, dual)?;
                let atoms = self.nominal.atoms();
                let regrets: Vec<f64> =
                    atoms.iter().zip(&self.kappa).map(|(a, k)| dot(&a.point, x) - k).collect();
                let probs: Vec<f64> = atoms.iter().map(|a| a.weight).collect();
                let q = cvar_tail_weights(&regrets, &probs, alpha);
                let scale = radius / alpha.tail();
                let value = q.iter().zip(&regrets).map(|(a, b)| a * b).sum::<f64>() + scale * lip;
                let mut g: Vec<f64> = s.iter().map(|d| scale * d).collect();
                for (qj, a) in q.iter().zip(atoms) {
                    if *qj > 0.0 {
                        for (gk, wk) in g.iter_mut().zip(&a.point) {
                            *gk += qj * wk;
                        }
                    }
                }
                Ok((value, g))
            }
        }
    }

    /// Farthest distance and a subgradient of it at `x`, taken at the witness.
    fn farthest(&self, x: &[f64], dual: Norm) -> Result<(f64, Vec<f64>)> {
        let far = self.set.farthest_distance(x, dual)?;
        let diff: Vec<f64> = x.iter().zip(&far.witness).map(|(a, b)| a - b).collect();
        Ok((far.value, dual.subgradient(&diff)))
    }
}

fn start_point(set: &FeasibleSet, nominal: &DiscreteDistribution, params: &SubgradientParams) -> Result<Vec<f64>> {
    if params.random_start {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        Ok(set.sample(&mut rng))
    } else {
        set.project(&nominal.mean())
    }
}

fn diameter(set: &FeasibleSet) -> f64 {
    let (lo, hi) = set.bounding_box();
    let d = Norm::L2.distance(&lo, &hi);
    if d > 0.0 {
        d
    } else {
        1.0
    }
}

/// Minimizes `kind` over `set` with normalized projected subgradient steps,
/// reporting the best iterate seen.
///
/// Steps are `s / √k` times the set diameter. When the best value stalls for
/// `stall_window` iterations, or after [`EPOCH_FACTOR`] windows, the run restarts from the best iterate with `s`
/// divided by [`RESTART_SHRINK`]; it ends once `s` falls below
/// [`MIN_STEP_SCALE`] times its initial value.
pub fn subgradient_solve(
    set: &FeasibleSet,
    nominal: &DiscreteDistribution,
    kind: Composite,
    params: &SubgradientParams,
) -> Result<SolveReport> {
    params.validate()?;
    if !set.supports_projection() {
        return Err(Error::UnsupportedCombination {
            set: set.kind_name(),
            norm: kind.dual().as_str(),
            reason: "subgradient method needs a box or a 2-norm ball",
        });
    }
    let objective = Objective::new(set, nominal, kind)?;
    let mut x = start_point(set, nominal, params)?;
    let (mut f, mut g) = objective.evaluate(&x)?;
    let mut best_f = f;
    let mut best_x = x.clone();
    let mut best_g = g.clone();
    let mut status = Status::IterationLimit;
    let mut iterations = 0usize;
    let base = params.step_scale * diameter(set);
    let mut scale = base;
    let mut k = 0usize;
    let mut stall_ref = f;
    let mut last_improvement = 0usize;

    while iterations < params.max_iter {
        iterations += 1;
        k += 1;
        let gnorm = Norm::L2.eval(&g);
        if gnorm == 0.0 {
            status = Status::Optimal;
            break;
        }
        let step = scale / (k as f64).sqrt() / gnorm;
        let trial: Vec<f64> = x.iter().zip(&g).map(|(a, d)| a - step * d).collect();
        x = set.project(&trial)?;
        (f, g) = objective.evaluate(&x)?;
        if f < best_f {
            best_f = f;
            best_x.clone_from(&x);
            best_g.clone_from(&g);
        }
        if best_f < stall_ref - params.stall_tol * best_f.abs().max(1.0) {
            stall_ref = best_f;
            last_improvement = k;
        }
        if k - last_improvement >= params.stall_window || k >= EPOCH_FACTOR * params.stall_window {
            scale /= RESTART_SHRINK;
            if scale < MIN_STEP_SCALE * base {
                status = Status::Optimal;
                break;
            }
            x.clone_from(&best_x);
            g.clone_from(&best_g);
            k = 0;
            last_improvement = 0;
        }
    }

    let lambda_star = objective.regularizer(&best_x)?;
    let residual = Norm::Linf.distance(&best_x, &set.project(&best_x)?);
    Ok(SolveReport {
        x_star: best_x,
        objective: best_f,
        lambda_star,
        method: Method::Subgradient,
        iterations,
        residual,
        status,
        nonunique: false,
    })
}
