use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::model::RobotState;

/// Unmodeled terrain effects as planar accelerations (m/s²).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SlipProfile<T> {
    #[default]
    None,
    Constant {
        ax: T,
        ay: T,
    },
    /// `amplitude·sin(2πt/period)` along the direction `heading_rad`
    /// (0 is the x axis).
    Sinusoid {
        amplitude: T,
        period_s: T,
        #[serde(default)]
        heading_rad: T,
    },
    /// Constant acceleration inside an axis-aligned rectangle.
    Patch {
        x_min: T,
        x_max: T,
        y_min: T,
        y_max: T,
        ax: T,
        ay: T,
    },
}

impl<T: Real> SlipProfile<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SlipProfile::Sinusoid { period_s, .. } if !(period_s > T::zero()) => Err(
                Error::Config(format!("slip period must be positive, got {period_s}")),
            ),
            SlipProfile::Patch {
                x_min,
                x_max,
                y_min,
                y_max,
                ..
            } if !(x_min <= x_max && y_min <= y_max) => {
                Err(Error::Config("slip patch bounds are inverted".into()))
            }
            _ => Ok(()),
        }
    }
}

pub fn slip_disturbance<T: Real>(state: &RobotState<T>, t: T, profile: &SlipProfile<T>) -> (T, T) {
    match *profile {
        SlipProfile::None => (T::zero(), T::zero()),
        SlipProfile::Constant { ax, ay } => (ax, ay),
        SlipProfile::Sinusoid {
            amplitude,
            period_s,
            heading_rad,
        } => {
            let a = amplitude * (T::PI() * T::of(2.0) * t / period_s).sin();
            (a * heading_rad.cos(), a * heading_rad.sin())
        }
        SlipProfile::Patch {
            x_min,
            x_max,
            y_min,
            y_max,
            ax,
            ay,
        } => {
            let inside =
                state.px >= x_min && state.px <= x_max && state.py >= y_min && state.py <= y_max;
            if inside {
                (ax, ay)
            } else {
                (T::zero(), T::zero())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ORIGIN: RobotState<f64> = RobotState {
        px: 0.0,
        py: 0.0,
        theta: 0.0,
        v: 1.0,
    };

    #[test]
    fn profile_examples() {
        assert_eq!(
            slip_disturbance(&ORIGIN, 3.0, &SlipProfile::None),
            (0.0, 0.0)
        );
        let sine = SlipProfile::Sinusoid {
            amplitude: 0.02,
            period_s: 20.0,
            heading_rad: 0.0,
        };
        let (ax, ay) = slip_disturbance(&ORIGIN, 5.0, &sine);
        assert!((ax - 0.02).abs() < 1e-15);
        assert_eq!(ay, 0.0);
        let patch = SlipProfile::Patch {
            x_min: 5.0,
            x_max: 6.0,
            y_min: -1.0,
            y_max: 1.0,
            ax: 0.1,
            ay: 0.0,
        };
        assert_eq!(slip_disturbance(&ORIGIN, 0.0, &patch), (0.0, 0.0));
        let inside = RobotState { px: 5.5, ..ORIGIN };
        assert_eq!(slip_disturbance(&inside, 0.0, &patch), (0.1, 0.0));
    }

    #[test]
    fn validation_and_json() {
        let bad = SlipProfile::Sinusoid {
            amplitude: 0.02,
            period_s: 0.0,
            heading_rad: 0.0,
        };
        assert!(bad.validate().is_err());
        let p: SlipProfile<f64> =
            serde_json::from_str(r#"{"kind": "sinusoid", "amplitude": 0.02, "period_s": 20.0}"#)
                .unwrap();
        assert!(p.validate().is_ok());
        assert!(serde_json::from_str::<SlipProfile<f64>>(
            r#"{"kind": "constant", "ax": 0.1, "ay": 0.0, "extra": 1}"#
        )
        .is_err());
    }
}
