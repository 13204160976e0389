use serde::{Deserialize, Serialize};

/// The three vector norms supported for transport costs and regularizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn dual(self) -> Norm {
        match self {
            Norm::L1 => Norm::Linf,
            Norm::L2 => Norm::L2,
            Norm::Linf => Norm::L1,
        }
    }

    pub fn eval(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|a| a.abs()).sum(),
            Norm::L2 => v.iter().map(|a| a * a).sum::<f64>().sqrt(),
            Norm::Linf => v.iter().fold(0.0, |m, a| m.max(a.abs())),
        }
    }

    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.eval(&d)
    }

    /// A maximizer of `uᵀy` over the unit ball of `self`; the attained value
    /// is `self.dual().eval(y)`. Ties go to the lowest coordinate and zero
    /// directions map to the origin.
    pub fn unit_ball_argmax(self, y: &[f64]) -> Vec<f64> {
        match self {
            Norm::L2 => {
                let len = Norm::L2.eval(y);
                if len == 0.0 {
                    vec![0.0; y.len()]
                } else {
                    y.iter().map(|a| a / len).collect()
                }
            }
            Norm::Linf => y.iter().map(|&a| sign(a)).collect(),
            Norm::L1 => {
                let mut u = vec![0.0; y.len()];
                if let Some(k) = argmax_abs(y) {
                    u[k] = sign(y[k]);
                }
                u
            }
        }
    }

    /// An element of the subdifferential of `self` at `v`.
    pub fn subgradient(self, v: &[f64]) -> Vec<f64> {
        // ∂‖v‖ is the set of maximizers of uᵀv over the dual unit ball.
        self.dual().unit_ball_argmax(v)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::Linf => "linf",
        }
    }

    pub fn is_polyhedral(self) -> bool {
        !matches!(self, Norm::L2)
    }
}

impl std::fmt::Display for Norm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Norm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            "linf" => Ok(Norm::Linf),
            other => Err(format!("unknown norm '{other}' (expected l1, l2 or linf)")),
        }
    }
}

fn sign(a: f64) -> f64 {
    if a > 0.0 {
        1.0
    } else if a < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Lowest index attaining the largest magnitude; `None` for an all-zero vector.
pub(crate) fn argmax_abs(y: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, &a) in y.iter().enumerate() {
        if a != 0.0 && best.is_none_or(|(_, b)| a.abs() > b) {
            best = Some((k, a.abs()));
        }
    }
    best.map(|(k, _)| k)
}
