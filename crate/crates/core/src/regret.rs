//! Ex-post regret and its worst case over type-1 Wasserstein balls.
//!
//! For a decision `x ∈ X` and a cost realization `w`, the regret is
//! `R(x, w) = wᵀx − inf_{y∈X} wᵀy`. Over a Wasserstein ball of radius `r`
//! around a finitely supported nominal distribution, the worst-case expected
//! regret is the nominal expected regret plus `r · sup_{v∈X} ‖x − v‖_*`, and
//! the worst-case CVaR of regret picks up the same penalty scaled by
//! `1/(1 − α)`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{FeasibleSet, Norm};
use crate::lp::dot;

/// Tolerance used when checking that a decision lies in the feasible set.
pub const MEMBERSHIP_TOL: f64 = 1e-7;

/// Weight sums within this distance of one are rescaled; beyond it they are rejected.
pub const WEIGHT_SUM_TOL: f64 = 1e-6;

/// Cost realization with its probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub point: Vec<f64>,
    pub weight: f64,
}

/// Finitely supported probability distribution over cost vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct DiscreteDistribution {
    atoms: Vec<Atom>,
    dim: usize,
}

impl TryFrom<Vec<Atom>> for DiscreteDistribution {
    type Error = Error;

    fn try_from(atoms: Vec<Atom>) -> Result<Self> {
        DiscreteDistribution::new(atoms)
    }
}

impl From<DiscreteDistribution> for Vec<Atom> {
    fn from(d: DiscreteDistribution) -> Self {
        d.atoms
    }
}

impl DiscreteDistribution {
    /// Validates atoms and rescales weights whose sum is within 1e-6 of one
/// (sums within 1e-12 are kept as given).
    /// Duplicate atoms are kept as given.
    pub fn new(mut atoms: Vec<Atom>) -> Result<Self> {
        let first = atoms
            .first()
            .ok_or_else(|| Error::InvalidInput("distribution has no atoms".into()))?;
        let dim = first.point.len();
        if dim == 0 {
            return Err(Error::InvalidInput("atoms have dimension 0".into()));
        }
        for a in &atoms {
            check_dim(dim, a.point.len())?;
            if a.point.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("atom has non-finite coordinates".into()));
            }
            if !(a.weight.is_finite() && a.weight >= 0.0) {
                return Err(Error::InvalidInput(format!("atom weight {} is not >= 0", a.weight)));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidInput(format!("weights sum to {total}, expected 1")));
        }
        if (total - 1.0).abs() > 1e-12 {
            for a in &mut atoms {
                a.weight /= total;
            }
        }
        Ok(Self { atoms, dim })
    }

    pub fn from_pairs(pairs: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(point, weight)| Atom { point, weight }).collect())
    }

    /// Point mass at `w`.
    pub fn dirac(w: Vec<f64>) -> Result<Self> {
        Self::from_pairs(vec![(w, 1.0)])
    }

    /// Equal weights on each point.
    pub fn uniform(points: Vec<Vec<f64>>) -> Result<Self> {
        let p = 1.0 / points.len().max(1) as f64;
        Self::from_pairs(points.into_iter().map(|w| (w, p)).collect())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for a in &self.atoms {
            for (mk, wk) in m.iter_mut().zip(&a.point) {
                *mk += a.weight * wk;
            }
        }
        m
    }

    /// `E[min_{y∈X} wᵀy]`.
    pub fn expected_min_cost(&self, set: &FeasibleSet) -> Result<f64> {
        let mut acc = 0.0;
        for a in &self.atoms {
            acc += a.weight * set.min_cost(&a.point)?;
        }
        Ok(acc)
    }
}

/// Type-1 Wasserstein ball around a nominal distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguitySet {
    pub nominal: DiscreteDistribution,
    radius: f64,
    pub ground_norm: Norm,
}

impl AmbiguitySet {
    pub fn new(nominal: DiscreteDistribution, radius: f64, ground_norm: Norm) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::InvalidRadius(radius));
        }
        Ok(Self { nominal, radius, ground_norm })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Norm measuring the regularizer: the dual of the transport norm.
    pub fn dual_norm(&self) -> Norm {
        self.ground_norm.dual()
    }
}

/// Confidence level `α ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RiskLevel(f64);

impl RiskLevel {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && (0.0..1.0).contains(&alpha) {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Tail mass `1 − α`.
    pub fn tail(self) -> f64 {
        1.0 - self.0
    }
}

/// `R(x, w) = wᵀx − min_{y∈X} wᵀy`.
pub fn regret(set: &FeasibleSet, x: &[f64], w: &[f64]) -> Result<f64> {
    check_dim(set.dim(), x.len())?;
    check_dim(set.dim(), w.len())?;
    Ok(dot(w, x) - set.min_cost(w)?)
}

fn check_nominal(set: &FeasibleSet, x: &[f64], nominal: &DiscreteDistribution) -> Result<()> {
    check_dim(set.dim(), x.len())?;
    check_dim(set.dim(), nominal.dim())
}

pub fn expected_regret(set: &FeasibleSet, x: &[f64], nominal: &DiscreteDistribution) -> Result<f64> {
    check_nominal(set, x, nominal)?;
    let mut acc = 0.0;
    for a in nominal.atoms() {
        acc += a.weight * regret(set, x, &a.point)?;
    }
    Ok(acc)
}

/// Per-atom weights of the upper `(1 − α)` tail, already divided by `1 − α`.
///
/// Outcomes are visited in descending order (stable, so equal outcomes keep
/// atom order) and consume tail mass until it is exhausted. The weighted sum
/// of outcomes under these weights is the CVaR; the same weights combine
/// atom gradients into a CVaR subgradient.
pub fn cvar_tail_weights(values: &[f64], probs: &[f64], alpha: RiskLevel) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let tail = alpha.tail();
    let mut remaining = tail;
    let mut q = vec![0.0; values.len()];
    for &j in &order {
        if remaining <= 0.0 {
            break;
        }
        let take = probs[j].min(remaining);
        q[j] = take / tail;
        remaining -= take;
    }
    q
}

/// Exact CVaR of a finite sample of outcomes.
pub fn cvar_of_sample(values: &[f64], probs: &[f64], alpha: RiskLevel) -> f64 {
    let q = cvar_tail_weights(values, probs, alpha);
    q.iter().zip(values).map(|(a, b)| a * b).sum()
}

/// The α-quantile of the sample: the smallest outcome that still receives
/// tail weight. It minimizes `τ + E[max(R − τ, 0)]/(1 − α)`.
pub fn value_at_risk(values: &[f64], probs: &[f64], alpha: RiskLevel) -> f64 {
    let q = cvar_tail_weights(values, probs, alpha);
    values
        .iter()
        .zip(&q)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&v, _)| v)
        .fold(f64::INFINITY, f64::min)
}

/// Regret of `x` against every nominal atom, in atom order.
pub fn atom_regrets(set: &FeasibleSet, x: &[f64], nominal: &DiscreteDistribution) -> Result<Vec<f64>> {
    check_nominal(set, x, nominal)?;
    nominal.atoms().iter().map(|a| regret(set, x, &a.point)).collect()
}

pub fn cvar_regret_nominal(
    set: &FeasibleSet,
    x: &[f64],
    nominal: &DiscreteDistribution,
    alpha: RiskLevel,
) -> Result<f64> {
    let values = atom_regrets(set, x, nominal)?;
    let probs: Vec<f64> = nominal.atoms().iter().map(|a| a.weight).collect();
    Ok(cvar_of_sample(&values, &probs, alpha))
}

fn require_member(set: &FeasibleSet, x: &[f64]) -> Result<()> {
    if set.contains(x, MEMBERSHIP_TOL)? {
        Ok(())
    } else {
        Err(Error::NotInFeasibleSet { tol: MEMBERSHIP_TOL })
    }
}

/// `E_{P0}[R(x, w)] + r · sup_{v∈X} ‖x − v‖_*`.
pub fn worst_case_expected_regret(set: &FeasibleSet, x: &[f64], amb: &AmbiguitySet) -> Result<f64> {
    check_nominal(set, x, &amb.nominal)?;
    require_member(set, x)?;
    let lip = set.farthest_distance(x, amb.dual_norm())?.value;
    Ok(expected_regret(set, x, &amb.nominal)? + amb.radius() * lip)
}

/// `CVaR_α^{P0}(R(x, w)) + r/(1 − α) · sup_{v∈X} ‖x − v‖_*`.
pub fn worst_case_cvar_regret(
    set: &FeasibleSet,
    x: &[f64],
    amb: &AmbiguitySet,
    alpha: RiskLevel,
) -> Result<f64> {
    check_nominal(set, x, &amb.nominal)?;
    require_member(set, x)?;
    let lip = set.farthest_distance(x, amb.dual_norm())?.value;
    Ok(cvar_regret_nominal(set, x, &amb.nominal, alpha)? + amb.radius() / alpha.tail() * lip)
}

/// `sup_{‖w‖ ≤ 1} R(x, w)`, which equals the farthest-point distance in the dual norm.
pub fn robust_regret_unit_ball(set: &FeasibleSet, x: &[f64], ground_norm: Norm) -> Result<f64> {
    Ok(set.farthest_distance(x, ground_norm.dual())?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> FeasibleSet {
        FeasibleSet::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
    }

    fn triangle() -> FeasibleSet {
        FeasibleSet::vpolytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    fn disk() -> FeasibleSet {
        FeasibleSet::ball(vec![1.0, 1.0], 1.0, Norm::L2).unwrap()
    }

    fn interval() -> FeasibleSet {
        FeasibleSet::boxed(vec![0.0], vec![1.0]).unwrap()
    }

    #[test]
    fn distribution_validation_and_normalization() {
        assert!(DiscreteDistribution::new(vec![]).is_err());
        assert!(DiscreteDistribution::from_pairs(vec![(vec![0.0], 0.5), (vec![1.0], 0.4)]).is_err());
        assert!(DiscreteDistribution::from_pairs(vec![(vec![0.0], -0.1), (vec![1.0], 1.1)]).is_err());
        assert!(DiscreteDistribution::from_pairs(vec![(vec![0.0], 0.5), (vec![1.0, 2.0], 0.5)]).is_err());
        let d = DiscreteDistribution::from_pairs(vec![(vec![0.0], 0.5), (vec![1.0], 0.5000005)]).unwrap();
        let total: f64 = d.atoms().iter().map(|a| a.weight).sum();
        assert!((total - 1.0).abs() < 1e-15);
        // duplicates are not merged
        let d = DiscreteDistribution::uniform(vec![vec![1.0], vec![1.0]]).unwrap();
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn ambiguity_and_risk_level_validation() {
        let d = DiscreteDistribution::dirac(vec![1.0]).unwrap();
        assert!(matches!(AmbiguitySet::new(d.clone(), -0.1, Norm::L1), Err(Error::InvalidRadius(_))));
        assert!(AmbiguitySet::new(d, 0.0, Norm::L1).is_ok());
        assert!(RiskLevel::new(0.0).is_ok());
        assert!(matches!(RiskLevel::new(1.0), Err(Error::InvalidAlpha(_))));
        assert!(RiskLevel::new(-0.1).is_err());
    }

    #[test]
    fn regret_examples() {
        assert_eq!(regret(&unit_box(), &[1.0, 1.0], &[1.0, -1.0]).unwrap(), 1.0);
        assert_eq!(regret(&unit_box(), &[0.0, 1.0], &[1.0, -1.0]).unwrap(), 0.0);
        assert_eq!(regret(&triangle(), &[0.0, 1.0], &[2.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn expected_regret_examples() {
        let single = DiscreteDistribution::dirac(vec![1.0, -1.0]).unwrap();
        assert_eq!(expected_regret(&unit_box(), &[1.0, 1.0], &single).unwrap(), 1.0);
        let two = DiscreteDistribution::uniform(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        assert_eq!(expected_regret(&unit_box(), &[1.0, 1.0], &two).unwrap(), 1.0);
    }

    #[test]
    fn worst_case_expected_regret_examples() {
        let amb = AmbiguitySet::new(DiscreteDistribution::dirac(vec![1.0]).unwrap(), 0.5, Norm::L1).unwrap();
        assert_eq!(worst_case_expected_regret(&interval(), &[0.0], &amb).unwrap(), 0.5);

        let nominal = DiscreteDistribution::dirac(vec![-0.5, 2.0]).unwrap();
        let amb0 = AmbiguitySet::new(nominal.clone(), 0.0, Norm::L1).unwrap();
        let base = expected_regret(&disk(), &[1.0, 1.0], &nominal).unwrap();
        assert_eq!(worst_case_expected_regret(&disk(), &[1.0, 1.0], &amb0).unwrap(), base);
        let amb2 = AmbiguitySet::new(nominal, 2.0, Norm::L1).unwrap();
        let v = worst_case_expected_regret(&disk(), &[1.0, 1.0], &amb2).unwrap();
        assert!((v - (base + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn worst_case_requires_feasible_decision() {
        let amb = AmbiguitySet::new(DiscreteDistribution::dirac(vec![1.0]).unwrap(), 0.5, Norm::L1).unwrap();
        assert!(matches!(
            worst_case_expected_regret(&interval(), &[1.5], &amb),
            Err(Error::NotInFeasibleSet { .. })
        ));
    }

    #[test]
    fn worst_case_propagates_unsupported_norms() {
        let amb = AmbiguitySet::new(DiscreteDistribution::dirac(vec![1.0, 0.0]).unwrap(), 0.5, Norm::Linf)
            .unwrap();
        assert!(matches!(
            worst_case_expected_regret(&unit_box(), &[0.5, 0.5], &amb),
            Err(Error::UnsupportedCombination { .. })
        ));
    }

    #[test]
    fn cvar_examples() {
        let two = DiscreteDistribution::uniform(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let x = [0.0, 1.0];
        let a0 = RiskLevel::new(0.0).unwrap();
        assert_eq!(
            cvar_regret_nominal(&unit_box(), &x, &two, a0).unwrap(),
            expected_regret(&unit_box(), &x, &two).unwrap()
        );
        assert_eq!(cvar_of_sample(&[0.0, 1.0], &[0.5, 0.5], RiskLevel::new(0.5).unwrap()), 1.0);
        let single = DiscreteDistribution::dirac(vec![1.0, -1.0]).unwrap();
        for alpha in [0.0, 0.3, 0.9, 0.999] {
            let v = cvar_regret_nominal(&unit_box(), &[1.0, 1.0], &single, RiskLevel::new(alpha).unwrap()).unwrap();
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn value_at_risk_is_tail_boundary() {
        let a = RiskLevel::new(0.5).unwrap();
        assert_eq!(value_at_risk(&[0.0, 1.0, 3.0], &[0.25, 0.5, 0.25], a), 1.0);
    }

    #[test]
    fn worst_case_cvar_examples() {
        let amb = AmbiguitySet::new(DiscreteDistribution::dirac(vec![1.0]).unwrap(), 0.5, Norm::L1).unwrap();
        let v = worst_case_cvar_regret(&interval(), &[0.0], &amb, RiskLevel::new(0.5).unwrap()).unwrap();
        assert_eq!(v, 1.0);
        let v0 = worst_case_cvar_regret(&interval(), &[0.0], &amb, RiskLevel::new(0.0).unwrap()).unwrap();
        assert_eq!(v0, worst_case_expected_regret(&interval(), &[0.0], &amb).unwrap());
    }

    #[test]
    fn robust_regret_examples() {
        assert_eq!(robust_regret_unit_ball(&triangle(), &[0.0, 0.0], Norm::L1).unwrap(), 1.0);
        assert!((robust_regret_unit_ball(&disk(), &[1.0, 1.0], Norm::L1).unwrap() - 1.0).abs() < 1e-15);
    }
}
