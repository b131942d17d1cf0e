use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plant::{ode_step, Integrator};
use crate::scalar::Real;

use super::slip::{slip_disturbance, SlipProfile};

/// Linearization guard on `|v|` (m/s).
pub const DEFAULT_V_MIN: f64 = 0.05;
/// Yaw-rate command limit (rad/s).
pub const DEFAULT_OMEGA_LIMIT: f64 = 0.1;

/// Wraps an angle to `(-π, π]`.
pub fn wrap_angle<T: Real>(a: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut w = a - two_pi * ((a + T::PI()) / two_pi).floor();
    // floor puts the seam at -π; move it to +π
    if w <= -T::PI() {
        w = w + two_pi;
    }
    if w > T::PI() {
        w = w - two_pi;
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState<T> {
    pub px: T,
    pub py: T,
    pub theta: T,
    pub v: T,
}

/// `[p_x, p_y, ṗ_x, ṗ_y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearizedState<T> {
    pub x: [T; 4],
}

impl<T: Real> LinearizedState<T> {
    pub fn from_state(s: &RobotState<T>) -> Self {
        Self {
            x: [s.px, s.py, s.v * s.theta.cos(), s.v * s.theta.sin()],
        }
    }
}

/// `ξ = v̇` and the (saturated) yaw rate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RobotCommand<T> {
    pub v_dot: T,
    pub omega: T,
}

/// `(v cos θ, v sin θ, ω, ξ)`.
pub fn unicycle_dynamics<T: Real>(state: &RobotState<T>, cmd: &RobotCommand<T>) -> [T; 4] {
    [
        state.v * state.theta.cos(),
        state.v * state.theta.sin(),
        cmd.omega,
        cmd.v_dot,
    ]
}

/// Inverts the decoupling matrix `[[cos θ, -v sin θ], [sin θ, v cos θ]]`
/// and clips the yaw rate to `±omega_limit`.
pub fn feedback_linearize<T: Real>(
    u1: T,
    u2: T,
    theta: T,
    v: T,
    v_min: T,
    omega_limit: T,
) -> Result<RobotCommand<T>> {
    if !(v.abs() >= v_min) {
        return Err(Error::SpeedSingularity {
            v: v.as_f64(),
            v_min: v_min.as_f64(),
        });
    }
    let (sin, cos) = theta.sin_cos();
    let omega = (u2 * cos - u1 * sin) / v;
    Ok(RobotCommand {
        v_dot: u1 * cos + u2 * sin,
        omega: omega.max(-omega_limit).min(omega_limit),
    })
}

/// How the velocity commands reach the wheels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Actuator<T> {
    /// `v̇ = ξ`, `θ̇ = ω`.
    Ideal,
    /// First-order lag on the commanded `(v, ω)` with time constant `tau_s`.
    /// The speed command is `v + ξ·Δt` taken at the sample.
    Lag { tau_s: T },
}

/// Simulated robot: pose, speed, actuator state and terrain slip.
///
/// Slip accelerations act through the same decoupling matrix as the
/// commands, so they show up unchanged on `(p̈_x, p̈_y)` away from the
/// `v = 0` singularity.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotPlant<T> {
    pub state: RobotState<T>,
    /// Actual yaw rate of the lagged actuator.
    pub omega: T,
    /// Speed command held by the lagged actuator.
    pub v_cmd: T,
    pub actuator: Actuator<T>,
    pub slip: SlipProfile<T>,
    pub v_min: T,
}

impl<T: Real> RobotPlant<T> {
    pub fn new(
        state: RobotState<T>,
        actuator: Actuator<T>,
        slip: SlipProfile<T>,
        v_min: T,
    ) -> Self {
        Self {
            state,
            omega: T::zero(),
            v_cmd: state.v,
            actuator,
            slip,
            v_min,
        }
    }

    fn guarded_speed(&self, v: T) -> T {
        if v.abs() >= self.v_min {
            v
        } else if v < T::zero() {
            -self.v_min
        } else {
            self.v_min
        }
    }

    /// `(ξ, ω)` equivalent of the slip acceleration.
    fn slip_inputs(&self, s: &RobotState<T>, t: T) -> (T, T) {
        let (ax, ay) = slip_disturbance(s, t, &self.slip);
        let (sin, cos) = s.theta.sin_cos();
        (
            ax * cos + ay * sin,
            (ay * cos - ax * sin) / self.guarded_speed(s.v),
        )
    }

    /// Rates of `[p_x, p_y, θ, v, ω_actual]`.
    fn rates(&self, y: &[T], cmd: &RobotCommand<T>, t: T) -> Vec<T> {
        let s = RobotState {
            px: y[0],
            py: y[1],
            theta: y[2],
            v: y[3],
        };
        let (xi_s, omega_s) = self.slip_inputs(&s, t);
        let (v_dot, yaw, omega_dot) = match self.actuator {
            Actuator::Ideal => (cmd.v_dot, cmd.omega, T::zero()),
            Actuator::Lag { tau_s } => {
                ((self.v_cmd - s.v) / tau_s, y[4], (cmd.omega - y[4]) / tau_s)
            }
        };
        let base = unicycle_dynamics(&s, &RobotCommand { v_dot, omega: yaw });
        vec![
            base[0],
            base[1],
            base[2] + omega_s,
            base[3] + xi_s,
            omega_dot,
        ]
    }

    /// Latches the command into the actuator at the start of a hold interval.
    pub fn latch(&mut self, cmd: &RobotCommand<T>, dt: T) {
        if let Actuator::Lag { .. } = self.actuator {
            self.v_cmd = self.state.v + cmd.v_dot * dt;
        }
    }

    /// Planar acceleration `(p̈_x, p̈_y)` right after `cmd` has been latched.
    pub fn acceleration(&self, cmd: &RobotCommand<T>, t: T) -> (T, T) {
        let s = self.state;
        let r = self.rates(&[s.px, s.py, s.theta, s.v, self.omega], cmd, t);
        let (sin, cos) = s.theta.sin_cos();
        (r[3] * cos - s.v * r[2] * sin, r[3] * sin + s.v * r[2] * cos)
    }

    /// Holds `cmd` over `[t, t + dt)` using `substeps` RK4 steps.
    pub fn advance(&mut self, cmd: &RobotCommand<T>, t: T, dt: T, substeps: usize) -> Result<()> {
        let h = dt / T::of(substeps as f64);
        let s = self.state;
        let mut y = vec![s.px, s.py, s.theta, s.v, self.omega];
        for j in 0..substeps {
            let tj = t + h * T::of(j as f64);
            y = ode_step(&y, tj, h, Integrator::Rk4, |tt, yy| {
                Ok(self.rates(yy, cmd, tt))
            })?;
        }
        self.state = RobotState {
            px: y[0],
            py: y[1],
            theta: wrap_angle(y[2]),
            v: y[3],
        };
        self.omega = y[4];
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn dynamics_examples() {
        let cmd = RobotCommand {
            v_dot: 0.0,
            omega: 0.0,
        };
        let s = RobotState {
            px: 0.0,
            py: 0.0,
            theta: 0.0,
            v: 1.0,
        };
        assert_eq!(unicycle_dynamics(&s, &cmd), [1.0, 0.0, 0.0, 0.0]);
        let cmd = RobotCommand {
            v_dot: 0.3,
            omega: -0.05,
        };
        let r = unicycle_dynamics(
            &RobotState {
                theta: FRAC_PI_2,
                v: 2.0,
                ..s
            },
            &cmd,
        );
        assert!(r[0].abs() < 1e-15);
        assert_eq!((r[1], r[2], r[3]), (2.0, -0.05, 0.3));
        let r = unicycle_dynamics(&RobotState { v: 0.0, ..s }, &cmd);
        assert_eq!(r, [0.0, 0.0, -0.05, 0.3]);
    }

    #[test]
    fn linearize_examples() {
        let c = feedback_linearize(0.03, -0.07, 0.0, 1.0, 0.05, 0.1).unwrap();
        assert_eq!((c.v_dot, c.omega), (0.03, -0.07));
        let c = feedback_linearize(0.0, 1.0, FRAC_PI_2, 2.0, 0.05, 0.1).unwrap();
        assert!((c.v_dot - 1.0).abs() < 1e-15);
        assert!(c.omega.abs() < 1e-15);
        assert!(matches!(
            feedback_linearize(1.0, 1.0, 0.0, 0.0, 0.05, 0.1),
            Err(Error::SpeedSingularity { .. })
        ));
        let c = feedback_linearize(0.0, 5.0, 0.0, 1.0, 0.05, 0.1).unwrap();
        assert_eq!(c.omega, 0.1);
    }

    #[test]
    fn wrap_examples() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + FRAC_PI_2).abs() < 1e-15);
        assert!((wrap_angle(0.25 - 4.0 * PI) - 0.25).abs() < 1e-12);
        assert_eq!(wrap_angle(0.0), 0.0);
    }

    #[test]
    fn lag_actuator_tracks_commands() {
        let start = RobotState {
            px: 0.0,
            py: 0.0,
            theta: 0.0,
            v: 1.0,
        };
        let mut plant =
            RobotPlant::new(start, Actuator::Lag { tau_s: 0.3 }, SlipProfile::None, 0.05);
        let cmd = RobotCommand {
            v_dot: 0.0,
            omega: 0.1,
        };
        for k in 0..50 {
            plant.latch(&cmd, 0.2);
            plant.advance(&cmd, k as f64 * 0.2, 0.2, 10).unwrap();
        }
        assert!((plant.omega - 0.1).abs() < 1e-6);
        assert!((plant.state.v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn slip_reaches_the_planar_acceleration() {
        let s = RobotState {
            px: 1.0,
            py: 2.0,
            theta: 0.7,
            v: 0.4,
        };
        let slip = SlipProfile::Constant {
            ax: 0.02f64,
            ay: -0.01,
        };
        let plant = RobotPlant::new(s, Actuator::Ideal, slip, 0.05);
        let cmd = RobotCommand {
            v_dot: 0.0,
            omega: 0.0,
        };
        let (ax, ay) = plant.acceleration(&cmd, 0.0);
        assert!((ax - 0.02).abs() < 1e-15 && (ay + 0.01).abs() < 1e-15);
    }
}
