use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    compare, compute_metrics, ComparisonReport, Metrics, MetricsInput, MetricsSource,
};
use crate::control::{
    clelc_law, feedback_control, feedforward_control, ControlDecomposition, ErrorVector,
    ReferenceSignal,
};
use crate::error::{Error, Result};
use crate::fuzzy::NeuroFuzzyParams;
use crate::learning::{learning_step, LearningConfig};
use crate::log::{AxisSample, PlantSample, RobotLog, RobotSample, RunEvents, SimLog};
use crate::plant::{benchmark_a, integrate_step, PlantModel};
use crate::robot::{
    clelc_robot_law, feedback_linearize, feedforward_velocities, heading_reference,
    slip_disturbance, LinearizedState, RobotCommand, RobotPlant, RobotState,
};
use crate::surface::{gain_vector, sliding_value, GainVector, SlidingSurfaceSpec};

use super::config::{
    ControllerKind, CustomPlant, EdotMode, ReferenceSpec, ScenarioConfig, ScenarioKind,
};

#[derive(Debug, Clone, PartialEq)]
pub enum RunLog {
    Plant(SimLog),
    Robot(RobotLog),
}

impl RunLog {
    pub fn to_csv(&self) -> String {
        match self {
            RunLog::Plant(log) => log.to_csv(),
            RunLog::Robot(log) => log.to_csv(),
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn events(&self) -> RunEvents {
        match self {
            RunLog::Plant(log) => log.events,
            RunLog::Robot(log) => log.events,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            RunLog::Plant(log) => log.samples.len(),
            RunLog::Robot(log) => log.samples.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_plant(&self) -> Option<&SimLog> {
        match self {
            RunLog::Plant(log) => Some(log),
            RunLog::Robot(_) => None,
        }
    }

    pub fn as_robot(&self) -> Option<&RobotLog> {
        match self {
            RunLog::Robot(log) => Some(log),
            RunLog::Plant(_) => None,
        }
    }
}

impl MetricsSource for RunLog {
    fn metrics_input(&self) -> MetricsInput {
        match self {
            RunLog::Plant(log) => log.metrics_input(),
            RunLog::Robot(log) => log.metrics_input(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub log: RunLog,
    pub metrics: Metrics,
}

/// Runs one scenario to completion. Identical configs give identical logs.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput> {
    cfg.validate()?;
    if cfg.steps() == 0 {
        return Err(Error::EmptyLog);
    }
    let log = match cfg.scenario {
        ScenarioKind::Robot => RunLog::Robot(run_robot(cfg)?),
        ScenarioKind::ThirdOrder | ScenarioKind::Custom => RunLog::Plant(run_plant(cfg)?),
    };
    let metrics = compute_metrics(&log, &cfg.metrics)?;
    Ok(RunOutput { log, metrics })
}

/// Runs the scenario under both controllers, concurrently.
pub fn compare_controllers(
    cfg: &ScenarioConfig,
) -> Result<(RunOutput, RunOutput, ComparisonReport)> {
    let flc_cfg = cfg.with_controller(ControllerKind::Flc);
    let clelc_cfg = cfg.with_controller(ControllerKind::Clelc);
    let (flc, clelc) = std::thread::scope(|scope| {
        let flc = scope.spawn(|| run_scenario(&flc_cfg));
        let clelc = run_scenario(&clelc_cfg);
        (flc.join().expect("flc run panicked"), clelc)
    });
    let (flc, clelc) = (flc?, clelc?);
    let report = compare(&flc.metrics, &clelc.metrics);
    Ok((flc, clelc, report))
}

fn learning_config(cfg: &ScenarioConfig) -> LearningConfig<f64> {
    LearningConfig {
        alpha: cfg.alpha,
        delta: cfg.delta,
        sigma_min: cfg.sigma_min,
        center_guard_eps: cfg.center_guard_eps,
        dt: cfg.controller_dt_s,
        sign_mode: cfg.sign_mode,
        premise: cfg.premise_update,
        premise_floor: cfg.premise_floor,
    }
}

/// One network per channel, centers jittered from a seeded stream.
fn initial_networks(cfg: &ScenarioConfig, channels: usize) -> Result<Vec<NeuroFuzzyParams<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..channels)
        .map(|_| {
            let grid = NeuroFuzzyParams::uniform_grid(&cfg.membership_ranges, cfg.mf_count)?;
            if cfg.center_jitter == 0.0 {
                return Ok(grid);
            }
            let mut snap = grid.snapshot();
            for c in snap.centers.iter_mut().flatten() {
                *c += rng.gen_range(-cfg.center_jitter..=cfg.center_jitter);
            }
            NeuroFuzzyParams::from_snapshot(snap)
        })
        .collect()
}

fn gains(cfg: &ScenarioConfig) -> Result<GainVector<f64>> {
    Ok(gain_vector(&SlidingSurfaceSpec::new(
        cfg.order(),
        cfg.lambda,
    )?))
}

fn custom_model(p: &CustomPlant) -> Result<PlantModel<f64>> {
    let term = |coef: &[f64], x: &[f64], f: fn(f64) -> f64| -> f64 {
        coef.iter()
            .zip(x)
            .map(|(&c, &x)| if c == 0.0 { 0.0 } else { c * f(x) })
            .sum()
    };
    let (a0, al, asin, aexp) = (
        p.a_const,
        p.a_linear.clone(),
        p.a_sin.clone(),
        p.a_exp.clone(),
    );
    let (b0, bl) = (p.b, p.b_linear.clone());
    PlantModel::new(
        p.order,
        move |x: &[f64]| {
            a0 + term(&al, x, |v| v) + term(&asin, x, f64::sin) + term(&aexp, x, f64::exp)
        },
        move |x: &[f64]| b0 + term(&bl, x, |v| v),
    )
}

fn plant_model(cfg: &ScenarioConfig) -> Result<PlantModel<f64>> {
    let base = match cfg.scenario {
        ScenarioKind::Custom => custom_model(cfg.plant.as_ref().expect("validated"))?,
        _ => PlantModel::new(3, benchmark_a, |_: &[f64]| 1.0)?,
    };
    Ok(match cfg.disturbance.switched_sine() {
        Some(d) => base.with_disturbance(move |_, _, t| d.value(t)),
        None => base,
    })
}

/// Reference chain at `t`: `r₁..rₙ`, `r_{n+1}` and its rate.
fn reference_at(spec: &ReferenceSpec, order: usize, t: f64) -> ReferenceSignal<f64> {
    match *spec {
        ReferenceSpec::Zero => ReferenceSignal::zero(order),
        ReferenceSpec::Sine { amplitude, omega } => {
            let derivative = |k: usize| {
                amplitude
                    * omega.powi(k as i32)
                    * (omega * t + k as f64 * std::f64::consts::FRAC_PI_2).sin()
            };
            ReferenceSignal {
                r: (0..order).map(derivative).collect(),
                r_np1: derivative(order),
                r_dot_np1: derivative(order + 1),
            }
        }
    }
}

fn run_plant(cfg: &ScenarioConfig) -> Result<SimLog> {
    let model = plant_model(cfg)?;
    let n = model.order();
    let k = gains(cfg)?;
    let learn = learning_config(cfg);
    let mut net = initial_networks(cfg, 1)?.pop().expect("one network");
    let clelc = cfg.controller == ControllerKind::Clelc;
    let dt = cfg.controller_dt_s;
    let h = dt / cfg.plant_substeps as f64;

    let mut log = SimLog::new(n);
    let mut x = cfg.initial_state.clone();
    let mut u_prev = 0.0;
    let mut xn_prev: Option<f64> = None;

    for step in 0..cfg.steps() {
        let t = step as f64 * dt;
        let mut decomposition: Option<ControlDecomposition<f64>> = None;
        let mut body = || -> Result<()> {
            let reference = reference_at(&cfg.reference, n, t);
            let e = ErrorVector::between(&reference, &x)?;
            let u_b = feedback_control(&e, &k)?;
            let u_f = feedforward_control(&reference);
            let u_n = if clelc {
                let (firing, u_n) = net.evaluate(e.as_slice())?;
                if firing.fallback {
                    log.events.firing_fallbacks += 1;
                }
                u_n
            } else {
                0.0
            };
            let c = clelc_law(model.a(&x), model.b(&x), u_b, u_f, u_n, cfg.b_min)?;
            decomposition = Some(c);

            let xn_rate = match cfg.edot_mode {
                EdotMode::Analytic => model.top_rate(&x, c.u, t)?,
                EdotMode::PreviousInput => model.top_rate(&x, u_prev, t)?,
                EdotMode::Difference => xn_prev.map_or(0.0, |p| (x[n - 1] - p) / dt),
            };
            let rates = e.rates(&reference, xn_rate);
            let s = sliding_value(e.as_slice(), rates[n - 1], &k)?;
            if clelc {
                net = learning_step(&net, e.as_slice(), &rates, s, &learn)?;
            }
            log.samples.push(PlantSample {
                t,
                x: x.clone(),
                r: reference.r.clone(),
                e: e.as_slice().to_vec(),
                control: c,
                s,
                delta: model.disturbance(&x, c.u, t),
                xn_rate,
            });

            u_prev = c.u;
            xn_prev = Some(x[n - 1]);
            for j in 0..cfg.plant_substeps {
                x = integrate_step(&model, &x, c.u, t + j as f64 * h, h, cfg.integrator)?;
            }
            Ok(())
        };
        body().map_err(|err| err.at_step(step, t, decomposition))?;
    }
    Ok(log)
}

fn run_robot(cfg: &ScenarioConfig) -> Result<RobotLog> {
    let rc = cfg.robot.as_ref().expect("validated");
    let k = gains(cfg)?;
    let (kp, kv) = (k.as_slice()[0], k.as_slice()[1]);
    let learn = learning_config(cfg);
    let mut nets = initial_networks(cfg, 2)?;
    let clelc = cfg.controller == ControllerKind::Clelc;
    let dt = cfg.controller_dt_s;

    let s0 = &cfg.initial_state;
    let start = RobotState {
        px: s0[0],
        py: s0[1],
        theta: s0[2],
        v: s0[3],
    };
    let mut plant = RobotPlant::new(start, rc.actuator, rc.slip, rc.v_min);
    let mut log = RobotLog {
        on_track_threshold_m: rc.on_track_threshold_m,
        ..RobotLog::default()
    };
    let mut vel_prev: Option<[f64; 2]> = None;

    for step in 0..cfg.steps() {
        let t = step as f64 * dt;
        let mut body = || -> Result<()> {
            let p = rc.trajectory.sample(t);
            let state = plant.state;
            let lin = LinearizedState::from_state(&state);
            let r = [p.r1, p.r2, p.r3, p.r4];
            let e: [f64; 4] = std::array::from_fn(|i| r[i] - lin.x[i]);
            let u_f = [p.r1dd, p.r2dd];
            let u_b = [kp * e[0] + kv * e[2], kp * e[1] + kv * e[3]];
            let inputs = [[e[0], e[2]], [e[1], e[3]]];

            let mut u_n = [0.0; 2];
            if clelc {
                for j in 0..2 {
                    let (firing, out) = nets[j].evaluate(&inputs[j])?;
                    if firing.fallback {
                        log.events.firing_fallbacks += 1;
                    }
                    u_n[j] = out;
                }
            }
            let (u1, u2) = clelc_robot_law(&p, &lin, &k, u_n[0], u_n[1])?;
            let cmd =
                match feedback_linearize(u1, u2, state.theta, state.v, rc.v_min, rc.omega_limit) {
                    Ok(cmd) => cmd,
                    Err(Error::SpeedSingularity { .. }) => {
                        log.events.speed_singularities += 1;
                        let (sin, cos) = state.theta.sin_cos();
                        RobotCommand {
                            v_dot: u1 * cos + u2 * sin,
                            omega: 0.0,
                        }
                    }
                    Err(other) => return Err(other),
                };
            if cmd.omega.abs() >= rc.omega_limit {
                log.events.omega_saturations += 1;
            }
            plant.latch(&cmd, dt);

            let vel = [lin.x[2], lin.x[3]];
            let accel = match cfg.edot_mode {
                EdotMode::Analytic => {
                    let (ax, ay) = plant.acceleration(&cmd, t);
                    [ax, ay]
                }
                _ => vel_prev.map_or([0.0; 2], |prev| {
                    [(vel[0] - prev[0]) / dt, (vel[1] - prev[1]) / dt]
                }),
            };
            let slip = slip_disturbance(&state, t, &rc.slip);
            let slip = [slip.0, slip.1];

            let mut axes = [AxisSample::default(); 2];
            for j in 0..2 {
                let e_acc = u_f[j] - accel[j];
                let s = sliding_value(&inputs[j], e_acc, &k)?;
                if clelc {
                    nets[j] =
                        learning_step(&nets[j], &inputs[j], &[inputs[j][1], e_acc], s, &learn)?;
                }
                axes[j] = AxisSample {
                    u_b: u_b[j],
                    u_f: u_f[j],
                    u_n: u_n[j],
                    u_t: u_b[j] + u_f[j] + u_n[j],
                    s,
                    delta: slip[j],
                    accel: accel[j],
                };
            }

            let theta_r = heading_reference(p.r3, p.r4, rc.reverse)?;
            let (v_d, omega_d) = feedforward_velocities(p.r3, p.r4, p.r1dd, p.r2dd, rc.reverse)?;
            log.samples.push(RobotSample {
                t,
                x: lin.x,
                r,
                e,
                axes,
                xi: cmd.v_dot,
                px: state.px,
                py: state.py,
                theta: state.theta,
                v: state.v,
                omega: cmd.omega,
                theta_r,
                v_d,
                omega_d,
                euclid_err: e[0].hypot(e[1]),
            });

            vel_prev = Some(vel);
            plant.advance(&cmd, t, dt, cfg.plant_substeps)
        };
        body().map_err(|err| err.at_step(step, t, None))?;
    }
    Ok(log)
}
