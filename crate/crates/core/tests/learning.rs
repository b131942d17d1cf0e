use clelc::fuzzy::{firing_strengths, output, NeuroFuzzyParams};
use clelc::learning::{learning_step, LearningConfig, PremiseUpdate, SignMode};
use clelc::surface::smoothed_sign;

fn network() -> NeuroFuzzyParams<f64> {
    NeuroFuzzyParams::new(
        2,
        3,
        vec![-1.1, 0.05, 0.9, -0.7, 0.2, 1.3],
        vec![0.8, 0.6, 1.1, 0.9, 0.7, 1.2],
        vec![0.3, -0.2, 0.1, 0.4, 0.0, -0.5, 0.2, 0.6, -0.1],
    )
    .unwrap()
}

const E: [f64; 2] = [0.35, -0.4];
const EDOT: [f64; 2] = [-0.8, 0.5];

#[test]
fn frozen_premises_move_the_output_by_alpha_g_dt() {
    let params = network();
    for (s, premise) in [
        (0.7, PremiseUpdate::Euler),
        (-0.02, PremiseUpdate::Exact),
        (3.0, PremiseUpdate::Exact),
    ] {
        let mut cfg = LearningConfig::new(25.0, 0.01);
        cfg.premise = premise;
        let next = learning_step(&params, &E, &EDOT, s, &cfg).unwrap();
        let firing = firing_strengths(&E, &params).unwrap();
        let before = output(&firing, params.consequents()).unwrap();
        let after = output(&firing, next.consequents()).unwrap();
        let want = 25.0 * smoothed_sign(s, 0.05) * 0.01;
        assert!(
            ((after - before) - want).abs() <= 1e-12 * want.abs(),
            "s = {s}"
        );
    }
}

/// `|u_n(e + ė·dt; θ') - u_n(e; θ) - α·g·dt|` after one full step.
fn step_residual(dt: f64, premise: PremiseUpdate) -> f64 {
    let params = network();
    let mut cfg = LearningConfig::new(5.0, dt);
    cfg.premise = premise;
    let s = 0.3;
    let next = learning_step(&params, &E, &EDOT, s, &cfg).unwrap();
    let e_next: Vec<f64> = E.iter().zip(EDOT).map(|(e, d)| e + d * dt).collect();
    let (_, before) = params.evaluate(&E).unwrap();
    let (_, after) = next.evaluate(&e_next).unwrap();
    (after - before - 5.0 * smoothed_sign(s, 0.05) * dt).abs()
}

#[test]
fn full_step_residual_is_second_order() {
    let coarse = step_residual(1e-3, PremiseUpdate::Euler);
    let fine = step_residual(5e-4, PremiseUpdate::Euler);
    assert!(coarse > 0.0);
    assert!(coarse / fine >= 3.5, "coarse {coarse} fine {fine}");
}

#[test]
fn exact_premises_have_no_step_residual() {
    for dt in [1e-3, 1e-2, 0.1] {
        let r = step_residual(dt, PremiseUpdate::Exact);
        assert!(r < 1e-12, "dt {dt}: {r}");
    }
}

#[test]
fn implicit_sign_never_crosses_the_surface() {
    // closed loop on the surface: s' = s - α·dt·g
    let mut cfg = LearningConfig::new(25.0, 0.01);
    cfg.sign_mode = SignMode::Implicit;
    for s in [-90.0f64, -0.3, -0.01, 0.004, 0.2, 12.0] {
        let next = s - 25.0 * 0.01 * cfg.sign_of(s);
        assert!(next * s >= 0.0 && next.abs() < s.abs(), "{s} -> {next}");
    }
}
