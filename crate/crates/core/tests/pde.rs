mod common;

use common::{heat_backward_error, heat_forward_error, order, Degenerate};
use mfgb::error::Error;
use mfgb::grid::{DensityTrajectory, FieldTrajectory, GridSpec, MultiField, ScalarField};
use mfgb::model::{eval_model, ModelConstants, PrototypeModel};
use mfgb::pde::{bellman_step, eval_lagrangian, fp_step, solve_backward, solve_forward, StepScheme};

#[test]
fn lagrangian_at_zero_density_keeps_payoff_constant() {
    let p = PrototypeModel::with_defaults(ModelConstants::new(2, 1, 1)).unwrap();
    let l = eval_lagrangian(&p, 0.0, &[0.3], 0.0, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
    assert_eq!(l, vec![2.0, 2.0]);
}

#[test]
fn lagrangian_without_gradient_is_payoff_plus_density_term() {
    let mut c = ModelConstants::new(2, 1, 1);
    c.s0 = 0.3;
    let p = PrototypeModel::with_defaults(c).unwrap();
    let (m, v) = (1.7, [0.4, -1.2]);
    let l = eval_lagrangian(&p, 0.0, &[0.0], m, &v, &[0.0, 0.0]).unwrap();
    let e = eval_model(&p, 0.0, &[0.0], m, &v).unwrap();
    for i in 0..2 {
        assert!((l[i] - (e.f[i] + m * e.f_m[i])).abs() < 1e-14);
    }
}

#[test]
fn lagrangian_scalar_hand_evaluation() {
    let p = PrototypeModel::with_defaults(ModelConstants::new(1, 1, 1)).unwrap();
    // f = 4, m f_m = 1, g + m g_m = 1
    assert_eq!(eval_lagrangian(&p, 0.0, &[0.0], 1.0, &[1.0], &[1.0]).unwrap(), vec![6.0]);
}

#[test]
fn unit_density_is_steady_without_drift() {
    let grid = GridSpec::new(2, 12, 1.0, 10).unwrap();
    let p = PrototypeModel::with_defaults(ModelConstants::new(1, 2, 2)).unwrap();
    let m = solve_forward(&p, &FieldTrajectory::zeros(grid, 2), &ScalarField::constant(grid, 1.0)).unwrap();
    for s in m.slices() {
        assert!(s.values().iter().all(|x| (x - 1.0).abs() < 1e-13));
    }
    let one = fp_step(&p, &ScalarField::constant(grid, 1.0), &MultiField::zeros(grid, 2), 0.0, StepScheme::default());
    assert!(one.unwrap().values().iter().all(|x| (x - 1.0).abs() < 1e-13));
}

#[test]
fn forward_heat_decay_within_two_percent() {
    let e = heat_forward_error(128, 50, 0.05, 1.0, 0.5);
    assert!(e <= 0.02, "{e}");
}

#[test]
fn backward_heat_decay_within_two_percent() {
    let e = heat_backward_error(128, 50, 0.05, 1.0, 0.5);
    assert!(e <= 0.02, "{e}");
}

#[test]
fn heat_refinement_orders() {
    let p = order(heat_forward_error(16, 5000, 0.05, 1.0, 0.5), heat_forward_error(32, 5000, 0.05, 1.0, 0.5), 2.0);
    assert!(p >= 1.8, "space order {p}");
    let q = order(heat_backward_error(128, 25, 0.05, 1.0, 0.5), heat_backward_error(128, 50, 0.05, 1.0, 0.5), 2.0);
    assert!(q >= 0.9, "time order {q}");
}

#[test]
fn constants_are_preserved_backward() {
    let grid = GridSpec::new(1, 16, 1.0, 8).unwrap();
    let c = MultiField::constant(grid, 2, 0.75);
    let u = bellman_step(&c, &MultiField::zeros(grid, 2), StepScheme::default()).unwrap();
    assert!(u.components().iter().all(|f| f.values().iter().all(|x| (x - 0.75).abs() < 1e-14)));

    let model = Degenerate::new(2, 1);
    let m = DensityTrajectory::constant(grid, 1.0);
    let u = solve_backward(&model, &m, &FieldTrajectory::zeros(grid, 2), &c).unwrap();
    assert!(u.max_abs() <= 0.75 + 1e-13);
    assert!(u.slice(0).components().iter().all(|f| f.min() >= 0.75 - 1e-13));
}

#[test]
fn uniform_source_adds_one_step() {
    let grid = GridSpec::new(1, 16, 1.0, 8).unwrap();
    let u = bellman_step(&MultiField::zeros(grid, 1), &MultiField::constant(grid, 1, 1.0), StepScheme::default());
    let u = u.unwrap();
    assert!(u.component(0).values().iter().all(|x| (x - grid.dt()).abs() < 1e-15));
}

#[test]
fn unforced_prototype_value_is_affine_in_time() {
    // L = 2 everywhere, so u(t) = u_T + 2 (T - t)
    let grid = GridSpec::new(1, 16, 0.5, 20).unwrap();
    let p = PrototypeModel::with_defaults(ModelConstants::new(2, 1, 1)).unwrap();
    let m = DensityTrajectory::constant(grid, 1.0);
    let u_t = MultiField::constant(grid, 2, 0.3);
    let u = solve_backward(&p, &m, &FieldTrajectory::zeros(grid, 2), &u_t).unwrap();
    for k in 0..=grid.steps {
        let exact = 0.3 + 2.0 * (grid.horizon - grid.time(k));
        for f in u.slice(k).components() {
            assert!(f.values().iter().all(|x| (x - exact).abs() < 1e-12));
        }
    }
}

#[test]
fn explicit_scheme_refuses_large_steps() {
    let grid = GridSpec::new(1, 64, 1.0, 10).unwrap();
    let p = PrototypeModel::with_defaults(ModelConstants::new(1, 1, 1)).unwrap();
    let r = solve_forward_with_explicit(&p, grid);
    assert!(matches!(r, Err(Error::Unstable { .. })));
}

fn solve_forward_with_explicit(p: &PrototypeModel, grid: GridSpec) -> mfgb::error::Result<DensityTrajectory> {
    mfgb::pde::solve_forward_with(p, &FieldTrajectory::zeros(grid, 1), &ScalarField::constant(grid, 1.0), StepScheme::explicit())
}

#[test]
fn negative_initial_density_is_a_domain_error() {
    let grid = GridSpec::new(1, 8, 1.0, 4).unwrap();
    let p = PrototypeModel::with_defaults(ModelConstants::new(1, 1, 1)).unwrap();
    let m0 = ScalarField::from_fn(grid, |x| x[0] - 0.5);
    assert!(matches!(solve_forward(&p, &FieldTrajectory::zeros(grid, 1), &m0), Err(Error::Domain(_))));
}

#[test]
fn pure_mode_decay_matches_discrete_symbol() {
    use std::f64::consts::PI;
    // Backward Euler with the discrete Laplacian damps sin(2 pi x) by
    // (1 + dt lambda_h)^-nt with lambda_h = 4 sin^2(pi h) / h^2 per step.
    let (n, nt, t) = (128, 50, 0.05);
    let grid = GridSpec::new(1, n, t, nt).unwrap();
    let h = grid.h();
    let lambda = 4.0 * (PI * h).sin().powi(2) / (h * h);
    let factor = (1.0 + grid.dt() * lambda).powi(-(nt as i32));
    let u_t = MultiField::new(vec![ScalarField::from_fn(grid, |x| (2.0 * PI * x[0]).sin())]).unwrap();
    let u = solve_backward(&Degenerate::new(1, 1), &DensityTrajectory::constant(grid, 1.0), &FieldTrajectory::zeros(grid, 1), &u_t)
        .unwrap();
    let expected = u_t.component(0).map(|x| factor * x);
    let gap = u.slice(0).component(0).axpy(-1.0, &expected).max_abs();
    assert!(gap < 1e-12, "{gap}");
    // against the continuous decay the gap is the first-order time error
    let analytic = heat_backward_error(n, nt, t, 0.0, 1.0);
    assert!((analytic - (1.0 - factor / (-4.0 * PI * PI * t).exp()).abs()).abs() < 1e-3, "{analytic}");
}
