//! Feasible sets and their support-function oracles.
//!
//! Three compact convex shapes are supported: the convex hull of a vertex
//! list, an axis-aligned box, and a norm ball. Each offers the support
//! function `σ(y) = sup_{x∈X} xᵀy` together with a maximizing witness, the
//! minimum linear cost, the farthest-point distance `sup_{v∈X} ‖x − v‖`,
//! membership, and (for boxes and Euclidean balls) projection.
//!
//! Farthest-point distance is only available on an explicit list of
//! (shape, norm) pairs where it is exactly computable; anything else is
//! rejected with [`Error::UnsupportedCombination`].

mod norm;

pub use norm::Norm;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lp::{self, LinearProgram, LpStatus};

/// Raw shape description. Use [`FeasibleSet::new`] to validate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum Shape {
    #[serde(rename = "vpolytope")]
    VPolytope { vertices: Vec<Vec<f64>> },
    #[serde(rename = "box")]
    Box { lower: Vec<f64>, upper: Vec<f64> },
    #[serde(rename = "norm_ball")]
    NormBall {
        center: Vec<f64>,
        radius: f64,
        norm: Norm,
    },
}

/// A validated nonempty compact feasible set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Shape", into = "Shape")]
pub struct FeasibleSet {
    shape: Shape,
    dim: usize,
}

/// Farthest-point distance and a point of the set attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct Farthest {
    pub value: f64,
    pub witness: Vec<f64>,
}

impl TryFrom<Shape> for FeasibleSet {
    type Error = Error;

    fn try_from(shape: Shape) -> Result<Self> {
        FeasibleSet::new(shape)
    }
}

impl From<FeasibleSet> for Shape {
    fn from(set: FeasibleSet) -> Shape {
        set.shape
    }
}

fn finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|a| a.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} has non-finite entries")))
    }
}

impl FeasibleSet {
    pub fn new(shape: Shape) -> Result<Self> {
        let dim = match &shape {
            Shape::VPolytope { vertices } => {
                let first = vertices
                    .first()
                    .ok_or_else(|| Error::InvalidInput("vertex list is empty".into()))?;
                let n = first.len();
                for v in vertices {
                    check_dim(n, v.len())?;
                    finite(v, "vertex")?;
                }
                n
            }
            Shape::Box { lower, upper } => {
                check_dim(lower.len(), upper.len())?;
                finite(lower, "box lower bound")?;
                finite(upper, "box upper bound")?;
                if lower.iter().zip(upper).any(|(l, u)| l > u) {
                    return Err(Error::InvalidInput("box requires lower <= upper".into()));
                }
                lower.len()
            }
            Shape::NormBall { center, radius, .. } => {
                finite(center, "ball center")?;
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(Error::InvalidInput(format!("ball radius must be >= 0, got {radius}")));
                }
                center.len()
            }
        };
        if dim == 0 {
            return Err(Error::InvalidInput("feasible set has dimension 0".into()));
        }
        Ok(Self { shape, dim })
    }

    pub fn vpolytope(vertices: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(Shape::VPolytope { vertices })
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        Self::new(Shape::Box { lower, upper })
    }

    pub fn ball(center: Vec<f64>, radius: f64, norm: Norm) -> Result<Self> {
        Self::new(Shape::NormBall { center, radius, norm })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.shape {
            Shape::VPolytope { .. } => "vpolytope",
            Shape::Box { .. } => "box",
            Shape::NormBall { norm: Norm::L1, .. } => "l1 ball",
            Shape::NormBall { norm: Norm::L2, .. } => "l2 ball",
            Shape::NormBall { norm: Norm::Linf, .. } => "linf ball",
        }
    }

    fn unsupported(&self, norm: Norm, reason: &'static str) -> Error {
        Error::UnsupportedCombination {
            set: self.kind_name(),
            norm: norm.as_str(),
            reason,
        }
    }

    /// `σ_X(y) = sup_{x∈X} xᵀy`.
    pub fn support_function(&self, y: &[f64]) -> Result<f64> {
        check_dim(self.dim, y.len())?;
        Ok(match &self.shape {
            Shape::VPolytope { vertices } => vertices
                .iter()
                .map(|v| lp::dot(v, y))
                .fold(f64::NEG_INFINITY, f64::max),
            Shape::Box { lower, upper } => y
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(&yi, (&l, &u))| u * yi.max(0.0) + l * yi.min(0.0))
                .sum(),
            Shape::NormBall { center, radius, norm } => {
                lp::dot(center, y) + radius * norm.dual().eval(y)
            }
        })
    }

    /// A point of the set attaining `σ_X(y)`; vertex ties go to the lowest index.
    pub fn support_argmax(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, y.len())?;
        Ok(match &self.shape {
            Shape::VPolytope { vertices } => {
                let mut best = 0;
                let mut best_val = lp::dot(&vertices[0], y);
                for (i, v) in vertices.iter().enumerate().skip(1) {
                    let val = lp::dot(v, y);
                    if val > best_val {
                        best = i;
                        best_val = val;
                    }
                }
                vertices[best].clone()
            }
            Shape::Box { lower, upper } => y
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(&yi, (&l, &u))| if yi > 0.0 { u } else { l })
                .collect(),
            Shape::NormBall { center, radius, norm } => {
                let u = norm.unit_ball_argmax(y);
                center.iter().zip(&u).map(|(c, d)| c + radius * d).collect()
            }
        })
    }

    /// `inf_{y∈X} wᵀy = −σ_X(−w)`.
    pub fn min_cost(&self, w: &[f64]) -> Result<f64> {
        let neg: Vec<f64> = w.iter().map(|a| -a).collect();
        Ok(-self.support_function(&neg)?)
    }

    /// `sup_{v∈X} ‖x − v‖` in the given (dual) norm, with a witness.
    ///
    /// Supported: vertex lists with any norm (vertex maximum), any shape
    /// with the ∞-norm (coordinatewise support values), and Euclidean
    /// balls with the 2-norm (closed form).
    pub fn farthest_distance(&self, x: &[f64], dual: Norm) -> Result<Farthest> {
        check_dim(self.dim, x.len())?;
        finite(x, "point")?;
        match (&self.shape, dual) {
            (Shape::VPolytope { .. }, _) => self.farthest_by_vertices(x, dual),
            (_, Norm::Linf) => self.farthest_by_support(x),
            (Shape::NormBall { center, radius, norm: Norm::L2 }, Norm::L2) => {
                let diff: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
                let len = Norm::L2.eval(&diff);
                let mut dir = vec![0.0; self.dim];
                if len > 0.0 {
                    for (d, v) in dir.iter_mut().zip(&diff) {
                        *d = v / len;
                    }
                } else {
                    dir[0] = 1.0;
                }
                let witness = center.iter().zip(&dir).map(|(c, d)| c - radius * d).collect();
                Ok(Farthest { value: len + radius, witness })
            }
            _ => Err(self.unsupported(
                dual,
                "norm maximization over this set is not exactly computable",
            )),
        }
    }

    /// Vertex maximum of `‖x − v_i‖`; only defined for vertex lists.
    pub fn farthest_by_vertices(&self, x: &[f64], dual: Norm) -> Result<Farthest> {
        check_dim(self.dim, x.len())?;
        let Shape::VPolytope { vertices } = &self.shape else {
            return Err(self.unsupported(dual, "vertex enumeration needs a vertex list"));
        };
        let mut best = 0;
        let mut best_val = dual.distance(x, &vertices[0]);
        for (i, v) in vertices.iter().enumerate().skip(1) {
            let d = dual.distance(x, v);
            if d > best_val {
                best = i;
                best_val = d;
            }
        }
        Ok(Farthest { value: best_val, witness: vertices[best].clone() })
    }

    /// ∞-norm farthest distance from the 2n support values `σ(±e_i)`:
    /// `max_i max(σ(e_i) − x_i, σ(−e_i) + x_i)`.
    pub fn farthest_by_support(&self, x: &[f64]) -> Result<Farthest> {
        check_dim(self.dim, x.len())?;
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut e = vec![0.0; self.dim];
        for i in 0..self.dim {
            for s in [1.0, -1.0] {
                e[i] = s;
                let val = self.support_function(&e)? - s * x[i];
                if best.as_ref().is_none_or(|(b, _)| val > *b) {
                    best = Some((val, e.clone()));
                }
            }
            e[i] = 0.0;
        }
        let (value, dir) = best.expect("dimension is at least one");
        Ok(Farthest { value, witness: self.support_argmax(&dir)? })
    }

    /// Membership test with absolute tolerance `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        check_dim(self.dim, x.len())?;
        if x.iter().any(|a| !a.is_finite()) {
            return Ok(false);
        }
        Ok(match &self.shape {
            Shape::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(&v, (&l, &u))| v >= l - tol && v <= u + tol),
            Shape::NormBall { center, radius, norm } => norm.distance(x, center) <= radius + tol,
            Shape::VPolytope { vertices } => {
                let (lo, hi) = self.bounding_box();
                if x.iter().zip(lo.iter().zip(&hi)).any(|(&v, (&l, &u))| v < l - tol || v > u + tol) {
                    return Ok(false);
                }
                hull_residual(vertices, x)? <= tol
            }
        })
    }

    /// Euclidean projection. Only boxes and 2-norm balls are supported.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        match &self.shape {
            Shape::Box { lower, upper } => Ok(x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(&v, (&l, &u))| v.clamp(l, u))
                .collect()),
            Shape::NormBall { center, radius, norm: Norm::L2 } => {
                let len = Norm::L2.distance(x, center);
                if len <= *radius {
                    Ok(x.to_vec())
                } else {
                    let s = radius / len;
                    Ok(x.iter().zip(center).map(|(v, c)| c + s * (v - c)).collect())
                }
            }
            _ => Err(self.unsupported(Norm::L2, "Euclidean projection is not offered for this set")),
        }
    }

    pub fn supports_projection(&self) -> bool {
        matches!(
            self.shape,
            Shape::Box { .. } | Shape::NormBall { norm: Norm::L2, .. }
        )
    }

    /// Axis-aligned bounding box `(lower, upper)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.shape {
            Shape::VPolytope { vertices } => {
                let mut lo = vertices[0].clone();
                let mut hi = vertices[0].clone();
                for v in vertices.iter().skip(1) {
                    for k in 0..self.dim {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                (lo, hi)
            }
            Shape::Box { lower, upper } => (lower.clone(), upper.clone()),
            Shape::NormBall { center, radius, .. } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
        }
    }

    /// A random point of the set (not necessarily uniform).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match &self.shape {
            Shape::VPolytope { vertices } => {
                let w: Vec<f64> = vertices.iter().map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
                let total: f64 = w.iter().sum();
                let mut x = vec![0.0; self.dim];
                for (v, wi) in vertices.iter().zip(&w) {
                    for k in 0..self.dim {
                        x[k] += wi / total * v[k];
                    }
                }
                x
            }
            Shape::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(&l, &u)| l + (u - l) * rng.gen::<f64>())
                .collect(),
            Shape::NormBall { center, radius, norm } => {
                let z: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                let len = norm.eval(&z);
                let scale = if len > 1.0 { 1.0 / len } else { 1.0 };
                center.iter().zip(&z).map(|(c, v)| c + radius * scale * v).collect()
            }
        }
    }
}

/// Smallest ∞-norm residual `‖Σθ_i v_i − x‖_∞` over convex weights θ.
fn hull_residual(vertices: &[Vec<f64>], x: &[f64]) -> Result<f64> {
    let mut lp = LinearProgram::new();
    let theta: Vec<usize> = (0..vertices.len())
        .map(|i| lp.add_var(format!("theta{}", i + 1), 0.0, f64::INFINITY, 0.0))
        .collect();
    let t = lp.add_var("t", 0.0, f64::INFINITY, 1.0);
    for k in 0..x.len() {
        let mut plus: Vec<(usize, f64)> = theta.iter().zip(vertices).map(|(&j, v)| (j, v[k])).collect();
        plus.push((t, -1.0));
        lp.add_le(&plus, x[k]);
        let mut minus: Vec<(usize, f64)> = theta.iter().zip(vertices).map(|(&j, v)| (j, -v[k])).collect();
        minus.push((t, -1.0));
        lp.add_le(&minus, -x[k]);
    }
    let ones: Vec<(usize, f64)> = theta.iter().map(|&j| (j, 1.0)).collect();
    lp.add_eq(&ones, 1.0);
    let sol = lp::solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective.max(0.0)),
        _ => Err(Error::InvalidInput("membership LP did not reach optimality".into())),
    }
}
