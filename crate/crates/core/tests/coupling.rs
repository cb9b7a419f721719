mod common;

use common::{decoupled, reference};
use mfgb::coupling::{
    compatibility_residual, feedback_newton, feedback_residual, feedback_solve, hamiltonian, hamiltonian_grad,
    picard_solve, write_history_csv, SolverConfig, HISTORY_HEADER,
};
use mfgb::error::Error;
use mfgb::model::{ModelConstants, PrototypeModel, QuarticModel};

fn scalar() -> PrototypeModel {
    PrototypeModel::with_defaults(ModelConstants::new(1, 1, 1)).unwrap()
}

#[test]
fn unforced_feedback_is_zero() {
    let p = PrototypeModel::with_defaults(ModelConstants::new(3, 2, 2)).unwrap();
    let v = feedback_solve(&p, 0.0, &[0.2, 0.4], 1.3, &[0.0; 6], &SolverConfig::default()).unwrap();
    assert_eq!(v, vec![0.0; 6]);
}

#[test]
fn scalar_feedback_closed_form_and_newton_agree() {
    let cfg = SolverConfig::default();
    let closed = feedback_solve(&scalar(), 0.0, &[0.0], 1.0, &[1.0], &cfg).unwrap();
    assert_eq!(closed, vec![-0.25]);
    let newton = feedback_newton(&scalar(), 0.0, &[0.0], 1.0, &[1.0], &cfg).unwrap();
    assert!((newton[0] + 0.25).abs() <= 1e-12);
}

#[test]
fn quartic_feedback_solves_compatibility_condition() {
    let mut c = ModelConstants::new(2, 2, 2);
    c.s = 0.1;
    let q = QuarticModel::new(PrototypeModel::with_defaults(c).unwrap(), 0.3).unwrap();
    let cfg = SolverConfig::default();
    let grad = [0.8, -1.5, 2.0, 0.1];
    let v = feedback_solve(&q, 0.0, &[0.1, 0.9], 0.6, &grad, &cfg).unwrap();
    let r = feedback_residual(&q, 0.0, &[0.1, 0.9], 0.6, &v, &grad).unwrap();
    assert!(r.iter().all(|x| x.abs() <= 1e-11), "{r:?}");
}

#[test]
fn newton_failure_carries_residual() {
    let q = QuarticModel::new(scalar(), 5.0).unwrap();
    let cfg = SolverConfig { max_newton: 1, ..Default::default() };
    match feedback_newton(&q, 0.0, &[0.0], 1.0, &[40.0], &cfg) {
        Err(Error::Newton { iterations, residual }) => {
            assert_eq!(iterations, 1);
            assert!(residual > 0.0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn hamiltonian_at_rest() {
    let p = PrototypeModel::with_defaults(ModelConstants::new(2, 1, 1)).unwrap();
    let h = hamiltonian(&p, 0.0, &[0.5], 0.0, &[0.0, 0.0], &SolverConfig::default()).unwrap();
    assert_eq!(h, vec![2.0, 2.0]);
}

#[test]
fn hamiltonian_gradient_matches_differences() {
    let mut c = ModelConstants::new(2, 1, 2);
    c.s = 0.2;
    c.s0 = 0.1;
    let p = PrototypeModel::with_defaults(c).unwrap().with_linear(vec![vec![0.3, -0.1], vec![0.2, 0.4]]).unwrap();
    let q = QuarticModel::new(p, 0.05).unwrap();
    let cfg = SolverConfig::default();
    let (x, m) = ([0.3, 0.6], 0.8);
    let grad = [0.4, -0.7, 1.1, 0.25];
    let jac = hamiltonian_grad(&q, 0.0, &x, m, &grad, &cfg).unwrap();
    let h = 1e-5;
    for col in 0..4 {
        let mut gp = grad;
        let mut gm = grad;
        gp[col] += h;
        gm[col] -= h;
        let hp = hamiltonian(&q, 0.0, &x, m, &gp, &cfg).unwrap();
        let hm = hamiltonian(&q, 0.0, &x, m, &gm, &cfg).unwrap();
        for row in 0..2 {
            let fd = (hp[row] - hm[row]) / (2.0 * h);
            assert!((fd - jac[row * 4 + col]).abs() < 1e-6, "({row},{col}): {fd} vs {}", jac[row * 4 + col]);
        }
    }
}

#[test]
fn decoupled_game_converges_in_one_iteration() {
    let r = decoupled(32, 64);
    let s = r.solve(1e-8);
    assert_eq!(s.iterations(), 1);
    assert_eq!(s.v.max_abs(), 0.0);
}

#[test]
fn converged_state_meets_residual_tolerance() {
    let r = reference(32, 64);
    let s = r.solve(1e-8);
    let res = compatibility_residual(&r.model, &s.m, &s.u, &s.v).unwrap();
    assert!(res.l2 <= 1e-8, "{}", res.l2);
    assert!(s.m.min() >= -1e-12);
    assert!(s.history.windows(2).all(|w| w[1].iteration == w[0].iteration + 1));
}

#[test]
fn single_iteration_reports_failure_with_history() {
    let r = reference(32, 64);
    let cfg = SolverConfig { max_picard: 1, ..Default::default() };
    match picard_solve(&r.model, &r.m0, &r.u_t, &cfg) {
        Err(Error::PicardNotConverged(f)) => {
            assert_eq!(f.history.len(), 1);
            assert!(f.last_residual() > 1e-8);
            assert_eq!(f.state.m.len(), 65);
            let mut out = Vec::new();
            write_history_csv(&mut out, &f.history).unwrap();
            let text = String::from_utf8(out).unwrap();
            assert!(text.starts_with(HISTORY_HEADER));
            assert_eq!(text.lines().count(), 2);
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
}

#[test]
fn strict_mode_refuses_failed_gates() {
    let mut c = ModelConstants::new(2, 1, 1);
    c.s = 0.3;
    let r = reference(16, 16);
    let p = PrototypeModel::with_defaults(c).unwrap();
    let cfg = SolverConfig { strict_gates: true, ..Default::default() };
    assert!(matches!(picard_solve(&p, &r.m0, &r.u_t, &cfg), Err(Error::Gate(_))));
}

#[test]
fn invalid_damping_is_a_config_error() {
    let r = reference(16, 16);
    for theta in [0.0, 1.5, f64::NAN] {
        let cfg = SolverConfig { theta, ..Default::default() };
        assert!(matches!(picard_solve(&r.model, &r.m0, &r.u_t, &cfg), Err(Error::Config(_))));
    }
}
