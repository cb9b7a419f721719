mod common;

use common::{decoupled, reference, wave_direction, Degenerate};
use mfgb::coupling::{picard_solve, SolverConfig};
use mfgb::grid::{DensityTrajectory, FieldTrajectory, GridSpec, MultiField, ScalarField};
use mfgb::model::{ModelConstants, PrototypeModel};
use mfgb::verify::{
    cost_functional, gateaux_check, lemma_sample, linearized_oracle, observed_orders, run_diagnostics,
    solve_linearized_fp, LemmaConfig, LemmaSource,
};

#[test]
fn steady_unforced_cost_is_twice_the_horizon() {
    let grid = GridSpec::new(1, 16, 1.0, 10).unwrap();
    let p = PrototypeModel::with_defaults(ModelConstants::new(2, 1, 1)).unwrap();
    let j = cost_functional(
        &p,
        &FieldTrajectory::zeros(grid, 2),
        &DensityTrajectory::constant(grid, 1.0),
        &MultiField::zeros(grid, 2),
    )
    .unwrap();
    for ji in j {
        assert!((ji - 2.0).abs() < 1e-13, "{ji}");
    }
}

#[test]
fn degenerate_cost_is_terminal_value_times_mass() {
    let grid = GridSpec::new(1, 32, 0.5, 16).unwrap();
    let model = Degenerate::new(1, 1);
    let m0 = common::bumped_density(grid).map(|x| 2.0 * x);
    let m = mfgb::pde::solve_forward(&model, &FieldTrajectory::zeros(grid, 1), &m0).unwrap();
    let j = cost_functional(&model, &FieldTrajectory::zeros(grid, 1), &m, &MultiField::constant(grid, 1, 0.7)).unwrap();
    assert!((j[0] - 0.7 * m0.integral()).abs() < 1e-13);
}

#[test]
fn zero_direction_has_no_effect() {
    let r = reference(16, 32);
    let s = r.solve(1e-8);
    let zero = FieldTrajectory::zeros(r.grid, 1);
    let lin = solve_linearized_fp(&r.model, &s, 1, &zero).unwrap();
    assert_eq!(lin.trajectory.l2_norm(), 0.0);
    let g = gateaux_check(&r.model, &s, &[(0, zero.clone()), (1, zero)], 1e-3).unwrap();
    for e in g {
        assert_eq!(e.derivative, 0.0);
        assert_eq!(e.normalized, 0.0);
    }
}

#[test]
fn linearized_density_matches_difference_quotient() {
    let r = reference(32, 64);
    let s = r.solve(1e-8);
    let errs = linearized_oracle(&r.model, &s, 0, &wave_direction(r.grid), &[1e-2, 1e-3]).unwrap();
    let orders = observed_orders(&errs);
    assert!(errs[1].1 < errs[0].1);
    assert!(orders[0] >= 0.8, "{errs:?}");
}

#[test]
fn decoupled_equilibrium_is_stationary() {
    let r = decoupled(32, 64);
    let s = r.solve(1e-10);
    let z = wave_direction(r.grid);
    for e in gateaux_check(&r.model, &s, &[(0, z.clone()), (1, z)], 1e-3).unwrap() {
        assert!(e.normalized <= 1e-6, "{e:?}");
    }
}

#[test]
fn unforced_lemma_constant_vanishes() {
    let grid = GridSpec::new(1, 16, 0.5, 16).unwrap();
    let p = PrototypeModel::with_defaults(ModelConstants::new(2, 1, 1)).unwrap();
    let m0 = common::bumped_density(grid);
    let s = picard_solve(&p, &m0, &MultiField::zeros(grid, 2), &SolverConfig::default()).unwrap();
    assert_eq!(s.v.max_abs(), 0.0);
    let rep = lemma_sample(&p, LemmaSource::State(&s), &LemmaConfig { samples: 500, ..Default::default() }).unwrap();
    assert_eq!(rep.sum_coercive.constant, 0.0);
    assert_eq!(rep.eps0, 0.125);
}

#[test]
fn lemma_constants_are_finite_on_random_points() {
    let p = PrototypeModel::with_defaults(ModelConstants::new(2, 1, 1)).unwrap();
    let source = LemmaSource::Random { m_max: 10.0, grad_radius: 5.0 };
    let rep = lemma_sample(&p, source, &LemmaConfig { samples: 4000, ..Default::default() }).unwrap();
    for fit in [&rep.sum_coercive, &rep.upper_bound, &rep.global_bound] {
        assert!(fit.constant.is_finite());
    }
    assert!(rep.stable());
}

#[test]
fn diagnostics_of_reference_state() {
    let r = reference(32, 64);
    let s = r.solve(1e-8);
    let d = run_diagnostics(&r.model, &s);
    assert_eq!(d.sigma, 2.0);
    assert!(d.mass_drift <= 1e-10);
    assert!(d.min_density >= 0.0);
    assert!(d.estimate_quantities().iter().all(|(_, q)| q.is_finite() && *q >= 0.0));
    let header: Vec<&str> = d.columns().iter().map(|(n, _)| *n).collect();
    let mut csv = Vec::new();
    d.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), header.join(","));
}

#[test]
fn constant_density_has_zero_gradient_terms() {
    let grid = GridSpec::new(1, 16, 0.5, 8).unwrap();
    let p = PrototypeModel::with_defaults(ModelConstants::new(1, 1, 1)).unwrap();
    let s = picard_solve(&p, &ScalarField::constant(grid, 1.0), &MultiField::zeros(grid, 1), &SolverConfig::default())
        .unwrap();
    let d = run_diagnostics(&p, &s);
    assert_eq!(d.density_gradient, 0.0);
    assert_eq!(d.value_gradient, 0.0);
}

#[test]
fn coupled_stationarity_defect_is_first_order_in_the_grid() {
    let derivative = |n: usize| {
        let r = reference(n, 2 * n);
        let s = r.solve(1e-9);
        gateaux_check(&r.model, &s, &[(0, wave_direction(r.grid))], 1e-3).unwrap()[0].derivative
    };
    let (coarse, fine) = (derivative(32), derivative(64));
    let p = common::order(coarse.abs(), fine.abs(), 2.0);
    assert!((p - 1.0).abs() < 0.05, "{coarse:e} -> {fine:e}, order {p}");
}
