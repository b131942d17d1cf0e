use clelc::harness::{
    default_benchmark_config, run_scenario, ControllerKind, DisturbanceSpec, ScenarioConfig,
};
use clelc::log::{PlantSample, SimLog};

fn run(cfg: &ScenarioConfig) -> SimLog {
    run_scenario(cfg).unwrap().log.as_plant().unwrap().clone()
}

fn benchmark(controller: ControllerKind) -> SimLog {
    run(&default_benchmark_config().with_controller(controller))
}

fn window(log: &SimLog, from: f64, to: f64) -> impl Iterator<Item = &PlantSample> {
    log.samples
        .iter()
        .filter(move |s| s.t >= from - 1e-9 && s.t <= to + 1e-9)
}

fn mean_abs_x1(log: &SimLog, from: f64, to: f64) -> f64 {
    let v: Vec<f64> = window(log, from, to).map(|s| s.x[0].abs()).collect();
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
fn log_is_uniformly_sampled() {
    let log = benchmark(ControllerKind::Clelc);
    assert_eq!(log.samples.len(), 2000);
    for (k, s) in log.samples.iter().enumerate() {
        assert_eq!(s.t, k as f64 * 0.01);
    }
    assert_eq!(log.samples[0].x, vec![1.0, -1.0, -10.0]);
}

#[test]
fn clelc_states_settle_before_the_disturbance() {
    let log = benchmark(ControllerKind::Clelc);
    let x0 = [1.0f64, 1.0, 10.0];
    for s in window(&log, 4.5, 10.0) {
        for i in 0..3 {
            assert!(
                s.x[i].abs() < 0.02 * x0[i],
                "x{} = {} at t = {}",
                i + 1,
                s.x[i],
                s.t
            );
        }
    }
}

#[test]
fn flc_oscillates_under_the_disturbance() {
    let flc = benchmark(ControllerKind::Flc);
    let tail: Vec<f64> = window(&flc, 15.0, 20.0).map(|s| s.x[0]).collect();
    let (lo, hi) = tail
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(hi - lo > 0.1, "peak-to-peak {}", hi - lo);

    let clelc = benchmark(ControllerKind::Clelc);
    let (f, c) = (
        mean_abs_x1(&flc, 15.0, 20.0),
        mean_abs_x1(&clelc, 15.0, 20.0),
    );
    assert!(c <= 0.2 * f, "clelc {c} flc {f}");
}

#[test]
fn compensator_takes_over_from_feedback() {
    let log = benchmark(ControllerKind::Clelc);
    let peak = log
        .samples
        .iter()
        .map(|s| s.control.u_b.abs())
        .fold(0.0, f64::max);
    let tail: Vec<f64> = window(&log, 18.0 + 0.01, 20.0)
        .map(|s| s.control.u_b.abs())
        .collect();
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    assert_eq!(peak, 90.0);
    assert!(mean <= 0.01 * peak, "{mean}");
}

#[test]
fn control_decomposition_adds_up() {
    let log = benchmark(ControllerKind::Clelc);
    for s in &log.samples {
        let c = &s.control;
        assert_eq!(c.u_t, c.u_b + c.u_f + c.u_n);
        let a = -2.0 * s.x[0] - s.x[1] - s.x[2].sin() + s.x[0].exp();
        assert!((c.u - (c.u_t - a)).abs() <= 1e-12 * (1.0 + c.u.abs()));
    }
}

#[test]
fn disturbance_switches_exactly_at_ten_seconds() {
    let on = benchmark(ControllerKind::Flc);
    let mut cfg = default_benchmark_config().with_controller(ControllerKind::Flc);
    cfg.disturbance = DisturbanceSpec::None;
    let off = run(&cfg);
    let k10 = 1000;
    assert_eq!(on.samples[k10].t, 10.0);
    assert_eq!(on.samples[k10 - 1].delta, 0.0);
    assert!((on.samples[k10].delta - 5.0 * 10f64.sin()).abs() < 1e-15);
    // nothing of the disturbance leaks into [9.99, 10)
    assert_eq!(on.samples[k10].x, off.samples[k10].x);
    assert_ne!(on.samples[k10 + 1].x, off.samples[k10 + 1].x);
}

/// Largest `|(x_i(k+1) - x_i(k-1))/(2dt) - x_{i+1}(k)|` over the log.
fn chain_residual(log: &SimLog, dt: f64) -> f64 {
    let mut worst = 0.0f64;
    for k in 1..log.samples.len() - 1 {
        let (prev, cur, next) = (&log.samples[k - 1], &log.samples[k], &log.samples[k + 1]);
        for i in 0..log.order - 1 {
            let fd = (next.x[i] - prev.x[i]) / (2.0 * dt);
            worst = worst.max((fd - cur.x[i + 1]).abs());
        }
    }
    worst
}

#[test]
fn chain_consistency_is_second_order() {
    let mut cfg = default_benchmark_config().with_controller(ControllerKind::Flc);
    cfg.duration_s = 5.0;
    let coarse = chain_residual(&run(&cfg), cfg.controller_dt_s);
    cfg.controller_dt_s /= 2.0;
    let fine = chain_residual(&run(&cfg), cfg.controller_dt_s);
    assert!(coarse < 5e-2, "{coarse}");
    assert!(fine <= 0.3 * coarse, "coarse {coarse} fine {fine}");
}

#[test]
fn surface_value_is_the_negated_compensation_error() {
    // with the analytic rate, s = -(u_n + Δ) for a zero reference
    let log = benchmark(ControllerKind::Clelc);
    for s in &log.samples {
        let want = -(s.control.u_n + s.delta);
        assert!(
            (s.s - want).abs() <= 1e-9 * (1.0 + want.abs()),
            "t = {}",
            s.t
        );
    }
}

#[test]
fn edot_modes_all_run() {
    use clelc::harness::EdotMode;
    for mode in [EdotMode::PreviousInput, EdotMode::Difference] {
        let mut cfg = default_benchmark_config();
        cfg.edot_mode = mode;
        let log = run(&cfg);
        assert_eq!(log.samples.len(), 2000);
        assert!(log
            .samples
            .iter()
            .all(|s| s.x.iter().all(|v| v.is_finite())));
    }
}
