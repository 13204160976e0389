mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regretdro::oracle::{dual_gap_certificate, w1_distance};
use regretdro::reformulate::{build_support_reform, build_vrep};
use regretdro::regret::{worst_case_cvar_regret, worst_case_expected_regret};
use regretdro::solve::{solve_compiled, solve_dro, solve_drro, MethodChoice, SolveOptions, Status};
use regretdro::{AmbiguitySet, Norm, RiskLevel, Shape};

const FIG1_TOL: f64 = 5e-3;
const FIG1_BUDGET: Duration = Duration::from_secs(30);
const GAP_TOL: f64 = 1e-2;
const GAP_FLOOR: f64 = -1e-7;
const MAX_REFINEMENTS: usize = 4;
const CERT_BUDGET: Duration = Duration::from_secs(120);
const CVAR_ZERO_TOL: f64 = 1e-12;
const SLOPE_TOL: f64 = 1e-9;
const BUILDER_TOL: f64 = 1e-8;
const CROSS_SOLVER_TOL: f64 = 1e-4;
const OPTIMALITY_TOL: f64 = 1e-6;
const LAMBDA_TOL: f64 = 1e-6;
const LIMIT_TOL: f64 = 1e-3;
const METRIC_TOL: f64 = 1e-8;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn fig1_paths() -> Check {
    let set = common::fig1_disk();
    let nominal = common::fig1_nominal();
    let opts = SolveOptions::default();
    let start = Instant::now();
    let radii: Vec<f64> = (0..50).map(|k| 10f64.powf(-2.0 + 3.0 * k as f64 / 49.0)).collect();
    let mut drro = Vec::new();
    let mut dro = Vec::new();
    for &r in &radii {
        drro.push(solve_drro(&set, &nominal, r, Norm::L1, &opts).map_err(|e| e.to_string())?.x_star);
        dro.push(solve_dro(&set, &nominal, r, Norm::L1, &opts).map_err(|e| e.to_string())?.x_star);
    }
    let elapsed = start.elapsed();
    let w = nominal.mean();
    let wn = Norm::L2.eval(&w);
    let nominal_min = [1.0 - w[0] / wn, 1.0 - w[1] / wn];
    let c = 1.0 - 1.0 / 2f64.sqrt();
    let errs = [
        Norm::L2.distance(&drro[0], &nominal_min),
        Norm::L2.distance(&drro[49], &[1.0, 1.0]),
        Norm::L2.distance(&dro[0], &nominal_min),
        Norm::L2.distance(&dro[49], &[c, c]),
    ];
    let worst = errs.iter().copied().fold(0.0, f64::max);
    let msg = format!("max endpoint error {worst:.3e}, {:.2}s", elapsed.as_secs_f64());
    if worst <= FIG1_TOL && elapsed < FIG1_BUDGET {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn gap_certificates() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let start = Instant::now();
    let mut worst_gap = f64::NEG_INFINITY;
    let mut min_gap = f64::INFINITY;
    let mut most_rounds = 0;
    for i in 0..50 {
        let (set, nominal, ground) = common::random_instance(&mut rng);
        let r = rng.gen_range(0.1..5.0);
        let x = set.sample(&mut rng);
        let amb = AmbiguitySet::new(nominal, r, ground).unwrap();
        let cert = dual_gap_certificate(&set, &x, &amb, GAP_TOL, MAX_REFINEMENTS).map_err(|e| format!("#{i}: {e}"))?;
        if !cert.reached {
            return Err(format!("#{i}: gap {:.3e} after {} rounds", cert.gap, cert.refinements));
        }
        worst_gap = worst_gap.max(cert.gap);
        min_gap = min_gap.min(cert.gap);
        most_rounds = most_rounds.max(cert.refinements);
    }
    let elapsed = start.elapsed();
    let msg = format!(
        "max gap {worst_gap:.3e}, min gap {min_gap:.3e}, max rounds {most_rounds}, {:.2}s",
        elapsed.as_secs_f64()
    );
    if worst_gap < GAP_TOL && min_gap >= GAP_FLOOR && most_rounds <= MAX_REFINEMENTS && elapsed < CERT_BUDGET {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn cvar_reduction() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_zero = 0.0f64;
    let mut worst_slope = 0.0f64;
    for _ in 0..100 {
        let (set, nominal, ground) = common::random_instance(&mut rng);
        let x = set.sample(&mut rng);
        let r = rng.gen_range(0.0..5.0);
        let amb = AmbiguitySet::new(nominal.clone(), r, ground).unwrap();
        let a = worst_case_cvar_regret(&set, &x, &amb, RiskLevel::new(0.0).unwrap()).unwrap();
        let b = worst_case_expected_regret(&set, &x, &amb).unwrap();
        worst_zero = worst_zero.max((a - b).abs() / (1.0 + b.abs()));
        let far = set.farthest_distance(&x, ground.dual()).unwrap().value;
        let amb0 = AmbiguitySet::new(nominal, 0.0, ground).unwrap();
        for alpha in [0.1, 0.5, 0.9] {
            let level = RiskLevel::new(alpha).unwrap();
            let base = worst_case_cvar_regret(&set, &x, &amb0, level).unwrap();
            let full = worst_case_cvar_regret(&set, &x, &amb, level).unwrap();
            let slope = full - base - r / (1.0 - alpha) * far;
            worst_slope = worst_slope.max(slope.abs() / (1.0 + full.abs()));
        }
    }
    let msg = format!("alpha=0 deviation {worst_zero:.3e}, slope deviation {worst_slope:.3e}");
    if worst_zero <= CVAR_ZERO_TOL && worst_slope <= SLOPE_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn solver_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut builder = 0.0f64;
    for _ in 0..30 {
        let n = rng.gen_range(1..=3);
        let set = common::random_vpolytope(&mut rng, n);
        let atoms = rng.gen_range(1..=4);
        let nominal = common::random_nominal(&mut rng, n, atoms);
        let r = rng.gen_range(0.0..3.0);
        let a = solve_compiled(&build_vrep(&set, &nominal, r, Norm::Linf).unwrap()).unwrap();
        let b = solve_compiled(&build_support_reform(&set, &nominal, r).unwrap()).unwrap();
        builder = builder.max((a.objective - b.objective).abs());
    }
    let mut cross = 0.0f64;
    for _ in 0..20 {
        let n = rng.gen_range(1..=4);
        let set = common::random_box(&mut rng, n);
        let atoms = rng.gen_range(1..=5);
        let nominal = common::random_nominal(&mut rng, n, atoms);
        let r = rng.gen_range(0.0..3.0);
        let run = |method| {
            let o = SolveOptions { method, ..Default::default() };
            solve_drro(&set, &nominal, r, Norm::L1, &o).unwrap().objective
        };
        cross = cross.max((run(MethodChoice::Simplex) - run(MethodChoice::Subgradient)).abs());
    }
    let msg = format!("builders {builder:.3e}, simplex vs subgradient {cross:.3e}");
    if builder <= BUILDER_TOL && cross <= CROSS_SOLVER_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn optimality() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut solved = 0;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_lambda = 0.0f64;
    while solved < 40 {
        let (set, nominal, ground) = common::random_instance(&mut rng);
        if matches!(set.shape(), Shape::VPolytope { .. }) && ground == Norm::L2 {
            continue;
        }
        let r = rng.gen_range(0.0..3.0);
        let amb = AmbiguitySet::new(nominal.clone(), r, ground).unwrap();
        let rep = solve_drro(&set, &nominal, r, ground, &SolveOptions::default()).map_err(|e| e.to_string())?;
        if rep.status != Status::Optimal {
            continue;
        }
        solved += 1;
        for _ in 0..200 {
            let y = set.sample(&mut rng);
            worst_excess = worst_excess.max(rep.objective - worst_case_expected_regret(&set, &y, &amb).unwrap());
        }
        if r > 0.0 {
            let far = set.farthest_distance(&rep.x_star, ground.dual()).unwrap().value;
            worst_lambda = worst_lambda.max((rep.lambda_star - far).abs());
        }
    }
    let msg = format!("max excess over samples {worst_excess:.3e}, lambda deviation {worst_lambda:.3e}");
    if worst_excess <= OPTIMALITY_TOL && worst_lambda <= LAMBDA_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn radius_limits() -> Check {
    let set = common::fig1_disk();
    let nominal = common::fig1_nominal();
    let opts = SolveOptions::default();
    let mut last = f64::NEG_INFINITY;
    let mut drops = 0;
    for k in 0..40 {
        let r = 10f64.powf(-6.0 + 12.0 * k as f64 / 39.0);
        let v = solve_drro(&set, &nominal, r, Norm::L1, &opts).map_err(|e| e.to_string())?.objective;
        if v < last {
            drops += 1;
        }
        last = v;
    }
    let small = solve_drro(&set, &nominal, 1e-6, Norm::L1, &opts).map_err(|e| e.to_string())?;
    let large = solve_drro(&set, &nominal, 1e6, Norm::L1, &opts).map_err(|e| e.to_string())?;
    let w = nominal.mean();
    let wn = Norm::L2.eval(&w);
    let nominal_min = [1.0 - w[0] / wn, 1.0 - w[1] / wn];
    let e_small = Norm::L2.distance(&small.x_star, &nominal_min);
    let e_large = Norm::L2.distance(&large.x_star, &[1.0, 1.0]);
    let msg = format!("decreases {drops}, r=1e-6 error {e_small:.3e}, r=1e6 error {e_large:.3e}");
    if drops == 0 && e_small <= LIMIT_TOL && e_large <= LIMIT_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn wasserstein_metric() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(1..=3);
        let ground = [Norm::L1, Norm::L2, Norm::Linf][rng.gen_range(0..3)];
        let mut dist = || {
            let atoms = rng.gen_range(1..=4);
            common::random_nominal(&mut rng, n, atoms)
        };
        let (p, q, s) = (dist(), dist(), dist());
        let w = |a, b| w1_distance(a, b, ground).unwrap();
        worst = worst.max(w(&p, &p).abs());
        worst = worst.max((w(&p, &q) - w(&q, &p)).abs());
        worst = worst.max(w(&p, &s) - w(&p, &q) - w(&q, &s));
    }
    let msg = format!("max violation {worst:.3e}");
    if worst <= METRIC_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("fig1_endpoints", fig1_paths),
        ("gap_certificates", gap_certificates),
        ("cvar_reduction", cvar_reduction),
        ("solver_equivalence", solver_equivalence),
        ("optimality", optimality),
        ("radius_limits", radius_limits),
        ("wasserstein_metric", wasserstein_metric),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(msg) => println!("PASS {} {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
