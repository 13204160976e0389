#![allow(dead_code)]

use rand::Rng;
use regretdro::{DiscreteDistribution, FeasibleSet, Norm, Shape};

pub fn fig1_disk() -> FeasibleSet {
    FeasibleSet::ball(vec![1.0, 1.0], 1.0, Norm::L2).unwrap()
}

pub fn fig1_nominal() -> DiscreteDistribution {
    DiscreteDistribution::dirac(vec![-0.5, 2.0]).unwrap()
}

pub fn triangle() -> FeasibleSet {
    FeasibleSet::vpolytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
}

pub fn unit_box(n: usize) -> FeasibleSet {
    FeasibleSet::boxed(vec![0.0; n], vec![1.0; n]).unwrap()
}

/// Minimizer of `f` over the points of a square grid with spacing `step`
/// covering the bounding box of a 2-D set, keeping only members.
pub fn grid_argmin_2d(set: &FeasibleSet, step: f64, f: impl Fn(&[f64]) -> f64) -> (Vec<f64>, f64) {
    let (lo, hi) = set.bounding_box();
    let nx = ((hi[0] - lo[0]) / step).round() as usize;
    let ny = ((hi[1] - lo[1]) / step).round() as usize;
    let mut best = (vec![f64::NAN; 2], f64::INFINITY);
    for i in 0..=nx {
        for j in 0..=ny {
            let p = [lo[0] + i as f64 * step, lo[1] + j as f64 * step];
            if !set.contains(&p, 1e-12).unwrap() {
                continue;
            }
            let v = f(&p);
            if v < best.1 {
                best = (p.to_vec(), v);
            }
        }
    }
    best
}

/// Membership for a 2-D polygon given by counter-clockwise vertices.
pub fn in_ccw_polygon(vertices: &[[f64; 2]], p: &[f64]) -> bool {
    (0..vertices.len()).all(|i| {
        let a = vertices[i];
        let b = vertices[(i + 1) % vertices.len()];
        (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= -1e-12
    })
}

pub fn random_point<R: Rng>(rng: &mut R, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

pub fn random_box<R: Rng>(rng: &mut R, n: usize) -> FeasibleSet {
    let lo: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..1.0)).collect();
    let hi: Vec<f64> = lo.iter().map(|l| l + rng.gen_range(0.2..3.0)).collect();
    FeasibleSet::boxed(lo, hi).unwrap()
}

pub fn random_vpolytope<R: Rng>(rng: &mut R, n: usize) -> FeasibleSet {
    let m = rng.gen_range(n + 1..=n + 5);
    FeasibleSet::vpolytope((0..m).map(|_| random_point(rng, n, 2.0)).collect()).unwrap()
}

pub fn random_l2_ball<R: Rng>(rng: &mut R, n: usize) -> FeasibleSet {
    FeasibleSet::ball(random_point(rng, n, 1.0), rng.gen_range(0.3..2.0), Norm::L2).unwrap()
}

pub fn random_nominal<R: Rng>(rng: &mut R, n: usize, atoms: usize) -> DiscreteDistribution {
    let raw: Vec<f64> = (0..atoms).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    DiscreteDistribution::from_pairs(
        raw.iter().map(|w| (random_point(rng, n, 3.0), w / total)).collect(),
    )
    .unwrap()
}

/// Ground norms whose dual has an exact farthest-distance oracle on `set`.
pub fn supported_grounds(set: &FeasibleSet) -> Vec<Norm> {
    match set.shape() {
        Shape::VPolytope { .. } => vec![Norm::L1, Norm::L2, Norm::Linf],
        Shape::Box { .. } => vec![Norm::L1],
        Shape::NormBall { .. } => vec![Norm::L1, Norm::L2],
    }
}

/// A random instance from the supported matrix.
pub fn random_instance<R: Rng>(rng: &mut R) -> (FeasibleSet, DiscreteDistribution, Norm) {
    let n = rng.gen_range(1..=3);
    let set = match rng.gen_range(0..3) {
        0 => random_box(rng, n),
        1 => random_vpolytope(rng, n),
        _ => random_l2_ball(rng, n),
    };
    let grounds = supported_grounds(&set);
    let ground = grounds[rng.gen_range(0..grounds.len())];
    let atoms = rng.gen_range(1..=5);
    (set, random_nominal(rng, n, atoms), ground)
}
