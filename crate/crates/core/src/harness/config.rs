use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::MetricsOptions;
use crate::control::DEFAULT_B_MIN;
use crate::error::{Error, Result};
use crate::fuzzy::DEFAULT_SIGMA_MIN;
use crate::learning::{PremiseUpdate, SignMode};
use crate::plant::{Integrator, SwitchedSine};
use crate::robot::{Actuator, SlipProfile, Trajectory, DEFAULT_OMEGA_LIMIT, DEFAULT_V_MIN};
use crate::surface::{SlidingSurfaceSpec, DEFAULT_DELTA};

/// Largest rule grid a config may request.
pub const MAX_RULES: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    ThirdOrder,
    Robot,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    Flc,
    Clelc,
}

impl ControllerKind {
    pub fn name(self) -> &'static str {
        match self {
            ControllerKind::Flc => "flc",
            ControllerKind::Clelc => "clelc",
        }
    }
}

/// Source of the highest-order state rate used in `s` and in learning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdotMode {
    /// Model rate with the input just computed, i.e. the right limit at the
    /// sample (plant), or the planar acceleration after latching the
    /// command (robot).
    Analytic,
    /// Model rate with the input of the previous sample (plant only).
    PreviousInput,
    /// Backward difference of the logged rate state, zero at the first sample.
    Difference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DisturbanceSpec {
    None,
    SwitchedSine {
        onset_s: f64,
        amplitude: f64,
        omega: f64,
    },
}

impl DisturbanceSpec {
    pub fn switched_sine(&self) -> Option<SwitchedSine<f64>> {
        match *self {
            DisturbanceSpec::None => None,
            DisturbanceSpec::SwitchedSine {
                onset_s,
                amplitude,
                omega,
            } => Some(SwitchedSine {
                onset_s,
                amplitude,
                omega,
            }),
        }
    }
}

/// Reference for `x₁` of chain-of-integrators plants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceSpec {
    Zero,
    /// `r₁ = amplitude·sin(omega·t)`; higher entries are its derivatives.
    Sine {
        amplitude: f64,
        omega: f64,
    },
}

/// Plant built from a small term library:
///
/// ```text
/// a(x) = a_const + Σ a_linear[i]·xᵢ + Σ a_sin[i]·sin xᵢ + Σ a_exp[i]·exp xᵢ
/// b(x) = b + Σ b_linear[i]·xᵢ
/// ```
///
/// Coefficient vectors may be empty; otherwise they have one entry per state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomPlant {
    pub order: usize,
    #[serde(default)]
    pub a_const: f64,
    #[serde(default)]
    pub a_linear: Vec<f64>,
    #[serde(default)]
    pub a_sin: Vec<f64>,
    #[serde(default)]
    pub a_exp: Vec<f64>,
    pub b: f64,
    #[serde(default)]
    pub b_linear: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotScenario {
    pub trajectory: Trajectory<f64>,
    pub slip: SlipProfile<f64>,
    pub actuator: Actuator<f64>,
    pub omega_limit: f64,
    pub v_min: f64,
    #[serde(default)]
    pub reverse: bool,
    pub on_track_threshold_m: f64,
}

/// Everything a run consumes. Unknown JSON keys are rejected.
///
/// For robot scenarios `initial_state` is the pose `[p_x, p_y, θ, v]` and
/// `membership_ranges` covers the per-channel inputs `(e_pos, e_vel)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub controller: ControllerKind,
    pub duration_s: f64,
    pub controller_dt_s: f64,
    pub plant_substeps: usize,
    #[serde(default)]
    pub integrator: Integrator,
    pub lambda: f64,
    pub alpha: f64,
    pub delta: f64,
    pub mf_count: usize,
    pub membership_ranges: Vec<f64>,
    /// Half-width of a uniform random offset added to every initial center.
    #[serde(default)]
    pub center_jitter: f64,
    pub sigma_min: f64,
    pub center_guard_eps: f64,
    pub sign_mode: SignMode,
    pub premise_update: PremiseUpdate,
    pub premise_floor: f64,
    pub edot_mode: EdotMode,
    pub b_min: f64,
    pub initial_state: Vec<f64>,
    pub disturbance: DisturbanceSpec,
    pub reference: ReferenceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plant: Option<CustomPlant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robot: Option<RobotScenario>,
    pub metrics: MetricsOptions,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Third-order benchmark: 20 s at 100 Hz from `x(0) = [1, -1, -10]`,
/// `λ = 3`, `α = 25`, `Δ = 5 sin t` from 10 s on.
pub fn default_benchmark_config() -> ScenarioConfig {
    ScenarioConfig {
        scenario: ScenarioKind::ThirdOrder,
        controller: ControllerKind::Clelc,
        duration_s: 20.0,
        controller_dt_s: 0.01,
        plant_substeps: 10,
        integrator: Integrator::Rk4,
        lambda: 3.0,
        alpha: 25.0,
        delta: DEFAULT_DELTA,
        mf_count: 3,
        membership_ranges: vec![10.0; 3],
        center_jitter: 0.0,
        sigma_min: DEFAULT_SIGMA_MIN,
        center_guard_eps: 1e-3,
        sign_mode: SignMode::Implicit,
        premise_update: PremiseUpdate::Exact,
        premise_floor: 1.0,
        edot_mode: EdotMode::Analytic,
        b_min: DEFAULT_B_MIN,
        initial_state: vec![1.0, -1.0, -10.0],
        disturbance: DisturbanceSpec::SwitchedSine {
            onset_s: 10.0,
            amplitude: 5.0,
            omega: 1.0,
        },
        reference: ReferenceSpec::Zero,
        plant: None,
        robot: None,
        metrics: MetricsOptions {
            transient_end_s: Some(10.0),
            ..MetricsOptions::default()
        },
        seed: 0,
        output: None,
    }
}

/// Robot on a 10 m circle at 0.04 rad/s with sinusoidal x slip,
/// 5 Hz control, `λ = 0.3`, `α = 5`, 400 s.
pub fn default_robot_config() -> ScenarioConfig {
    ScenarioConfig {
        scenario: ScenarioKind::Robot,
        controller: ControllerKind::Clelc,
        duration_s: 400.0,
        controller_dt_s: 0.2,
        plant_substeps: 10,
        integrator: Integrator::Rk4,
        lambda: 0.3,
        alpha: 5.0,
        delta: DEFAULT_DELTA,
        mf_count: 3,
        membership_ranges: vec![1.0, 1.0],
        center_jitter: 0.0,
        sigma_min: DEFAULT_SIGMA_MIN,
        center_guard_eps: 1e-3,
        sign_mode: SignMode::Implicit,
        premise_update: PremiseUpdate::Exact,
        premise_floor: 1.0,
        edot_mode: EdotMode::Analytic,
        b_min: DEFAULT_B_MIN,
        initial_state: vec![9.5, -0.5, std::f64::consts::FRAC_PI_2, 0.4],
        disturbance: DisturbanceSpec::None,
        reference: ReferenceSpec::Zero,
        plant: None,
        robot: Some(RobotScenario {
            trajectory: Trajectory::Circle {
                radius: 10.0,
                omega: 0.04,
                center: [0.0, 0.0],
            },
            slip: SlipProfile::Sinusoid {
                amplitude: 0.02,
                period_s: 20.0,
                heading_rad: 0.0,
            },
            actuator: Actuator::Lag { tau_s: 0.3 },
            omega_limit: DEFAULT_OMEGA_LIMIT,
            v_min: DEFAULT_V_MIN,
            reverse: false,
            on_track_threshold_m: 0.2,
        }),
        metrics: MetricsOptions::default(),
        seed: 0,
        output: None,
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_err(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_err(format!(
            "{name} must be non-negative and finite, got {v}"
        )))
    }
}

fn coefficient_len(what: &'static str, v: &[f64], order: usize) -> Result<()> {
    if v.is_empty() || v.len() == order {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            what,
            expected: order,
            actual: v.len(),
        })
    }
}

impl CustomPlant {
    pub fn validate(&self) -> Result<()> {
        SlidingSurfaceSpec::new(self.order, 1.0)?;
        coefficient_len("a_linear", &self.a_linear, self.order)?;
        coefficient_len("a_sin", &self.a_sin, self.order)?;
        coefficient_len("a_exp", &self.a_exp, self.order)?;
        coefficient_len("b_linear", &self.b_linear, self.order)?;
        let all = std::iter::once(self.a_const)
            .chain([self.b])
            .chain(self.a_linear.iter().copied())
            .chain(self.a_sin.iter().copied())
            .chain(self.a_exp.iter().copied())
            .chain(self.b_linear.iter().copied());
        for v in all {
            if !v.is_finite() {
                return Err(config_err("custom plant coefficients must be finite"));
            }
        }
        Ok(())
    }
}

impl ScenarioConfig {
    /// State dimension of the controlled chain (per axis for the robot).
    pub fn order(&self) -> usize {
        match self.scenario {
            ScenarioKind::ThirdOrder => 3,
            ScenarioKind::Robot => 2,
            ScenarioKind::Custom => self.plant.as_ref().map_or(0, |p| p.order),
        }
    }

    /// Number of controller samples in the run.
    pub fn steps(&self) -> usize {
        (self.duration_s / self.controller_dt_s).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        non_negative("duration_s", self.duration_s)?;
        positive("controller_dt_s", self.controller_dt_s)?;
        if self.plant_substeps == 0 {
            return Err(config_err("plant_substeps must be at least 1"));
        }
        positive("lambda", self.lambda)?;
        positive("alpha", self.alpha)?;
        positive("delta", self.delta)?;
        positive("sigma_min", self.sigma_min)?;
        positive("center_guard_eps", self.center_guard_eps)?;
        non_negative("premise_floor", self.premise_floor)?;
        non_negative("b_min", self.b_min)?;
        non_negative("center_jitter", self.center_jitter)?;
        positive("metrics.final_window_s", self.metrics.final_window_s)?;
        positive("metrics.settling_band", self.metrics.settling_band)?;
        non_negative("metrics.s_threshold_floor", self.metrics.s_threshold_floor)?;
        if self.mf_count == 0 {
            return Err(config_err("mf_count must be at least 1"));
        }

        match self.scenario {
            ScenarioKind::ThirdOrder => {
                if self.plant.is_some() || self.robot.is_some() {
                    return Err(config_err(
                        "third_order scenarios take no `plant` or `robot` section",
                    ));
                }
            }
            ScenarioKind::Custom => {
                if self.robot.is_some() {
                    return Err(config_err("custom scenarios take no `robot` section"));
                }
                self.plant
                    .as_ref()
                    .ok_or_else(|| config_err("custom scenarios need a `plant` section"))?
                    .validate()?;
            }
            ScenarioKind::Robot => {
                if self.plant.is_some() {
                    return Err(config_err("robot scenarios take no `plant` section"));
                }
                let robot = self
                    .robot
                    .as_ref()
                    .ok_or_else(|| config_err("robot scenarios need a `robot` section"))?;
                robot.trajectory.validate()?;
                robot.slip.validate()?;
                if let Actuator::Lag { tau_s } = robot.actuator {
                    positive("actuator.tau_s", tau_s)?;
                }
                positive("omega_limit", robot.omega_limit)?;
                positive("v_min", robot.v_min)?;
                positive("on_track_threshold_m", robot.on_track_threshold_m)?;
                if self.edot_mode == EdotMode::PreviousInput {
                    return Err(config_err(
                        "edot_mode `previous_input` applies to chain plants only",
                    ));
                }
                if self.disturbance != DisturbanceSpec::None
                    || self.reference != ReferenceSpec::Zero
                {
                    return Err(config_err(
                        "robot scenarios take slip from `robot.slip` and the reference from `robot.trajectory`",
                    ));
                }
            }
        }

        let order = self.order();
        SlidingSurfaceSpec::new(order, self.lambda)?;
        let state_len = if self.scenario == ScenarioKind::Robot {
            4
        } else {
            order
        };
        if self.initial_state.len() != state_len {
            return Err(Error::LengthMismatch {
                what: "initial_state",
                expected: state_len,
                actual: self.initial_state.len(),
            });
        }
        if self.initial_state.iter().any(|v| !v.is_finite()) {
            return Err(config_err("initial_state must be finite"));
        }
        if self.membership_ranges.len() != order {
            return Err(Error::LengthMismatch {
                what: "membership_ranges",
                expected: order,
                actual: self.membership_ranges.len(),
            });
        }
        for &r in &self.membership_ranges {
            positive("membership range", r)?;
        }
        let rules = (0..order).try_fold(1usize, |acc, _| acc.checked_mul(self.mf_count));
        if !matches!(rules, Some(n) if n <= MAX_RULES) {
            return Err(config_err(format!(
                "mf_count^inputs = {}^{order} exceeds the {MAX_RULES}-rule limit",
                self.mf_count
            )));
        }

        match self.disturbance {
            DisturbanceSpec::None => {}
            DisturbanceSpec::SwitchedSine {
                onset_s,
                amplitude,
                omega,
            } => {
                if ![onset_s, amplitude, omega].iter().all(|v| v.is_finite()) {
                    return Err(config_err("disturbance parameters must be finite"));
                }
            }
        }
        if let ReferenceSpec::Sine { amplitude, omega } = self.reference {
            if !(amplitude.is_finite() && omega.is_finite()) {
                return Err(config_err("reference parameters must be finite"));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| config_err(format!("invalid scenario config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn with_controller(&self, controller: ControllerKind) -> Self {
        Self {
            controller,
            ..self.clone()
        }
    }
}
