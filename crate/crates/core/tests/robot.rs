use clelc::harness::{
    default_robot_config, run_scenario, ControllerKind, EdotMode, ScenarioConfig,
};
use clelc::log::RobotLog;
use clelc::robot::{
    clelc_robot_law, feedback_linearize, Actuator, LinearizedState, RobotPlant, RobotState,
    SlipProfile, Trajectory, TrajectoryPoint,
};
use clelc::surface::GainVector;
use std::f64::consts::PI;

fn run(cfg: &ScenarioConfig) -> RobotLog {
    run_scenario(cfg).unwrap().log.as_robot().unwrap().clone()
}

fn mean_on_track(log: &RobotLog) -> f64 {
    let k = log.on_track_index().expect("robot reaches the track");
    let tail = &log.samples[k..];
    tail.iter().map(|s| s.euclid_err).sum::<f64>() / tail.len() as f64
}

/// Planar acceleration after one and two steps of `h` from `start`, with the
/// command held, compared against the virtual inputs.
fn linearization_residual(h: f64) -> f64 {
    let start = RobotState {
        px: 1.0,
        py: -2.0,
        theta: 0.6,
        v: 0.8,
    };
    let traj = TrajectoryPoint {
        r1: 1.3,
        r2: -1.9,
        r3: 0.66,
        r4: 0.45,
        r1dd: 0.02,
        r2dd: -0.01,
    };
    let gains = GainVector::new(vec![0.09f64, 0.6]).unwrap();
    let lin = LinearizedState::from_state(&start);
    let (u1, u2) = clelc_robot_law(&traj, &lin, &gains, 0.01, -0.02).unwrap();
    let cmd = feedback_linearize(u1, u2, start.theta, start.v, 0.05, 0.1).unwrap();
    assert!(cmd.omega.abs() < 0.1, "command must stay unsaturated");

    let mut plant = RobotPlant::new(start, Actuator::Ideal, SlipProfile::None, 0.05);
    let mut vel = vec![[lin.x[2], lin.x[3]]];
    for k in 0..2 {
        plant.advance(&cmd, k as f64 * h, h, 1).unwrap();
        let l = LinearizedState::from_state(&plant.state);
        vel.push([l.x[2], l.x[3]]);
    }
    // one-sided second-order difference of the velocity at t = 0
    let fd = |j: usize| (-3.0 * vel[0][j] + 4.0 * vel[1][j] - vel[2][j]) / (2.0 * h);
    (fd(0) - u1).abs().max((fd(1) - u2).abs())
}

#[test]
fn linearized_channels_are_double_integrators() {
    let coarse = linearization_residual(1e-2);
    let fine = linearization_residual(5e-3);
    assert!(coarse < 1e-5, "{coarse}");
    assert!(fine <= 0.3 * coarse, "coarse {coarse} fine {fine}");
}

#[test]
fn log_invariants() {
    let log = run(&default_robot_config());
    assert_eq!(log.samples.len(), 2000);
    for s in &log.samples {
        assert!((s.x[2] - s.v * s.theta.cos()).abs() < 1e-12);
        assert!((s.x[3] - s.v * s.theta.sin()).abs() < 1e-12);
        assert!(s.omega.abs() <= 0.1);
        assert!(s.theta > -PI && s.theta <= PI);
        assert!((s.euclid_err - s.e[0].hypot(s.e[1])).abs() < 1e-15);
        assert!((s.v_d - 0.4).abs() < 1e-12 && (s.omega_d - 0.04).abs() < 1e-12);
    }
    // heading reference only jumps at the ±π seam
    for w in log.samples.windows(2) {
        let jump = (w[1].theta_r - w[0].theta_r).abs();
        assert!(
            jump < 0.01 || (jump - 2.0 * PI).abs() < 0.01,
            "jump {jump} at {}",
            w[1].t
        );
    }
}

#[test]
fn clelc_halves_the_tracking_error() {
    let cfg = default_robot_config();
    let flc = mean_on_track(&run(&cfg.with_controller(ControllerKind::Flc)));
    let clelc = mean_on_track(&run(&cfg));
    assert!(clelc <= 0.5 * flc, "clelc {clelc} flc {flc}");
}

#[test]
fn tracking_gain_survives_small_start_perturbations() {
    for dtheta in [-1e-2, -1e-3, 1e-3, 1e-2, 5e-2] {
        let mut cfg = default_robot_config();
        cfg.initial_state[2] += dtheta;
        let flc = mean_on_track(&run(&cfg.with_controller(ControllerKind::Flc)));
        let clelc = mean_on_track(&run(&cfg));
        assert!(clelc <= 0.5 * flc, "dθ {dtheta}: clelc {clelc} flc {flc}");
    }
}

#[test]
fn other_modes_and_paths_run() {
    let mut cfg = default_robot_config();
    cfg.duration_s = 100.0;
    cfg.edot_mode = EdotMode::Difference;
    run(&cfg);
    cfg.edot_mode = EdotMode::Analytic;
    cfg.robot.as_mut().unwrap().actuator = Actuator::Ideal;
    assert!(mean_on_track(&run(&cfg)) < 0.05);

    let mut cfg = default_robot_config();
    cfg.duration_s = 60.0;
    let robot = cfg.robot.as_mut().unwrap();
    robot.trajectory = Trajectory::Stadium {
        straight_m: 20.0,
        radius_m: 5.0,
        speed: 0.4,
        center: [0.0, 0.0],
    };
    robot.slip = SlipProfile::Patch {
        x_min: -5.0,
        x_max: 5.0,
        y_min: -6.0,
        y_max: -4.0,
        ax: 0.03,
        ay: 0.0,
    };
    cfg.initial_state = vec![0.0, -5.2, 0.0, 0.4];
    let log = run(&cfg);
    assert!(log.samples.iter().all(|s| s.euclid_err < 1.0));
}

#[test]
fn speed_singularity_is_flagged_not_fatal() {
    let mut cfg = default_robot_config();
    cfg.duration_s = 4.0;
    cfg.initial_state[3] = 0.0;
    let log = run(&cfg);
    assert!(log.events.speed_singularities >= 1);
    assert_eq!(log.samples[0].omega, 0.0);
    assert!(log
        .samples
        .iter()
        .all(|s| s.px.is_finite() && s.py.is_finite()));
}
