mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regretdro::lp::{self, LinearProgram};
use regretdro::regret::{worst_case_cvar_regret, worst_case_expected_regret};
use regretdro::solve::{
    solve_dro, solve_drro, solve_wcvar, Method, MethodChoice, SolveOptions, Status, SubgradientParams,
};
use regretdro::{AmbiguitySet, DiscreteDistribution, FeasibleSet, Norm, RiskLevel, Shape};

fn opts(method: MethodChoice) -> SolveOptions {
    SolveOptions { method, ..Default::default() }
}

/// An instance where at least one solver applies for the regret objectives.
fn random_regret_instance(rng: &mut ChaCha8Rng) -> (FeasibleSet, DiscreteDistribution, Norm) {
    loop {
        let (set, nominal, ground) = common::random_instance(rng);
        let ok = match set.shape() {
            Shape::VPolytope { .. } => ground != Norm::L2,
            _ => true,
        };
        if ok {
            return (set, nominal, ground);
        }
    }
}

#[test]
fn optimal_reports_beat_random_feasible_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..25 {
        let (set, nominal, ground) = random_regret_instance(&mut rng);
        let r = rng.gen_range(0.0..3.0);
        let amb = AmbiguitySet::new(nominal.clone(), r, ground).unwrap();
        let rep = solve_drro(&set, &nominal, r, ground, &SolveOptions::default()).unwrap();
        assert_eq!(rep.status, Status::Optimal);
        assert!(set.contains(&rep.x_star, 1e-6).unwrap());
        for _ in 0..200 {
            let y = set.sample(&mut rng);
            assert!(rep.objective <= worst_case_expected_regret(&set, &y, &amb).unwrap() + 1e-6);
        }
        if r > 0.0 {
            let far = set.farthest_distance(&rep.x_star, ground.dual()).unwrap().value;
            assert!((rep.lambda_star - far).abs() <= 1e-6, "{} {far}", rep.lambda_star);
        }
    }
}

#[test]
fn cvar_reports_beat_random_feasible_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..15 {
        let (set, nominal, ground) = random_regret_instance(&mut rng);
        let r = rng.gen_range(0.0..3.0);
        let alpha = rng.gen_range(0.0..0.95);
        let level = RiskLevel::new(alpha).unwrap();
        let amb = AmbiguitySet::new(nominal.clone(), r, ground).unwrap();
        let rep = solve_wcvar(&set, &nominal, r, alpha, ground, &SolveOptions::default()).unwrap();
        assert_eq!(rep.status, Status::Optimal);
        let exact = worst_case_cvar_regret(&set, &rep.x_star, &amb, level).unwrap();
        assert!((rep.objective - exact).abs() <= 1e-6);
        for _ in 0..200 {
            let y = set.sample(&mut rng);
            assert!(rep.objective <= worst_case_cvar_regret(&set, &y, &amb, level).unwrap() + 1e-6);
        }
    }
}

#[test]
fn zero_alpha_matches_expected_regret() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    for _ in 0..15 {
        let (set, nominal, ground) = random_regret_instance(&mut rng);
        let r = rng.gen_range(0.0..3.0);
        let a = solve_drro(&set, &nominal, r, ground, &SolveOptions::default()).unwrap();
        let b = solve_wcvar(&set, &nominal, r, 0.0, ground, &SolveOptions::default()).unwrap();
        assert!((a.objective - b.objective).abs() <= 1e-8 * (1.0 + a.objective.abs()), "{} {}", a.objective, b.objective);
    }
}

#[test]
fn zero_radius_matches_nominal_cost_lp() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for _ in 0..10 {
        let set = common::random_vpolytope(&mut rng, 2);
        let nominal = common::random_nominal(&mut rng, 2, 3);
        let mean = nominal.mean();
        let Shape::VPolytope { vertices } = set.shape() else { unreachable!() };
        let best = vertices.iter().map(|v| mean[0] * v[0] + mean[1] * v[1]).fold(f64::INFINITY, f64::min);
        let rep = solve_dro(&set, &nominal, 0.0, Norm::L1, &SolveOptions::default()).unwrap();
        assert!((rep.objective - best).abs() < 1e-9);
        let drro = solve_drro(&set, &nominal, 0.0, Norm::L1, &SolveOptions::default()).unwrap();
        let cost = mean[0] * drro.x_star[0] + mean[1] * drro.x_star[1];
        assert!((cost - best).abs() < 1e-9);
    }
}

#[test]
fn dro_on_shifted_box_picks_origin() {
    let set = FeasibleSet::boxed(vec![0.0, 0.0], vec![2.0, 2.0]).unwrap();
    let nominal = DiscreteDistribution::dirac(vec![1.0, 1.0]).unwrap();
    for r in [0.0, 0.5, 3.0] {
        for method in [MethodChoice::Simplex, MethodChoice::Subgradient] {
            let rep = solve_dro(&set, &nominal, r, Norm::L1, &opts(method)).unwrap();
            assert!(Norm::L2.distance(&rep.x_star, &[0.0, 0.0]) < 1e-6, "{r} {method:?} {:?}", rep.x_star);
        }
    }
}

#[test]
fn single_atom_zero_radius_minimizes_its_regret() {
    let set = common::triangle();
    let nominal = DiscreteDistribution::dirac(vec![0.3, -1.0]).unwrap();
    for alpha in [0.0, 0.4, 0.9] {
        let rep = solve_wcvar(&set, &nominal, 0.0, alpha, Norm::L1, &SolveOptions::default()).unwrap();
        assert!(rep.objective.abs() < 1e-9);
        assert!(Norm::L2.distance(&rep.x_star, &[0.0, 1.0]) < 1e-9);
    }
}

#[test]
fn regret_value_is_monotone_in_radius() {
    let mut rng = ChaCha8Rng::seed_from_u64(59);
    for _ in 0..10 {
        let (set, nominal, ground) = random_regret_instance(&mut rng);
        let mut last = f64::NEG_INFINITY;
        for k in 0..12 {
            let r = 0.01 * 2f64.powi(k);
            let rep = solve_drro(&set, &nominal, r, ground, &SolveOptions::default()).unwrap();
            assert!(rep.objective >= last - 1e-9, "{r} {} {last}", rep.objective);
            last = rep.objective;
        }
    }
}

#[test]
fn simplex_and_subgradient_agree_on_boxes() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for _ in 0..20 {
        let n = rng.gen_range(1..=4);
        let set = common::random_box(&mut rng, n);
        let atoms = rng.gen_range(1..=5);
        let nominal = common::random_nominal(&mut rng, n, atoms);
        let r = rng.gen_range(0.0..3.0);
        let a = solve_drro(&set, &nominal, r, Norm::L1, &opts(MethodChoice::Simplex)).unwrap();
        let b = solve_drro(&set, &nominal, r, Norm::L1, &opts(MethodChoice::Subgradient)).unwrap();
        assert_eq!((a.method, b.method), (Method::Simplex, Method::Subgradient));
        assert!((a.objective - b.objective).abs() <= 1e-4, "{} {}", a.objective, b.objective);
        let alpha = rng.gen_range(0.0..0.9);
        let a = solve_wcvar(&set, &nominal, r, alpha, Norm::L1, &opts(MethodChoice::Simplex)).unwrap();
        let b = solve_wcvar(&set, &nominal, r, alpha, Norm::L1, &opts(MethodChoice::Subgradient)).unwrap();
        assert!((a.objective - b.objective).abs() <= 1e-4, "{} {}", a.objective, b.objective);
    }
}

#[test]
fn random_start_is_seed_deterministic() {
    let set = common::fig1_disk();
    let nominal = common::fig1_nominal();
    let run = |seed| {
        let o = SolveOptions {
            method: MethodChoice::Auto,
            subgradient: SubgradientParams { seed, random_start: true, ..Default::default() },
        };
        solve_drro(&set, &nominal, 0.7, Norm::L1, &o).unwrap()
    };
    let (a, b, c) = (run(1), run(1), run(2));
    assert_eq!(a, b);
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
    assert!(Norm::L2.distance(&a.x_star, &c.x_star) < 1e-6);
}

#[test]
fn simplex_handles_infeasible_rows() {
    let mut p = LinearProgram::new();
    let x = p.add_var("x1", f64::NEG_INFINITY, f64::INFINITY, 1.0);
    p.add_le(&[(x, 1.0)], 0.0);
    p.add_le(&[(x, -1.0)], -1.0);
    let rep = regretdro::solve::simplex_solve(&p).unwrap();
    assert_eq!(rep.status, Status::Infeasible);
    assert_eq!(lp::solve(&p).unwrap().status, lp::LpStatus::Infeasible);
}
