use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::law::TrajectoryPoint;

/// Closed-form reference paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Trajectory<T> {
    Line {
        speed: T,
        #[serde(default)]
        heading_rad: T,
        #[serde(default)]
        origin: [T; 2],
    },
    /// Counter-clockwise for positive `omega`, starting at `center + (radius, 0)`.
    Circle {
        radius: T,
        omega: T,
        #[serde(default)]
        center: [T; 2],
    },
    /// Rounded rectangle: two straights of length `straight_m` joined by
    /// half circles of radius `radius_m`, driven counter-clockwise at
    /// constant `speed`. Starts at the middle of the lower straight.
    Stadium {
        straight_m: T,
        radius_m: T,
        speed: T,
        #[serde(default)]
        center: [T; 2],
    },
}

/// Builds a trajectory from a name and positional parameters:
/// `line [speed, heading]`, `circle [radius, omega]`,
/// `stadium [straight, radius, speed]`.
pub fn trajectory_library<T: Real>(name: &str, params: &[T]) -> Result<Trajectory<T>> {
    let want = match name {
        "line" => 2,
        "circle" => 2,
        "stadium" => 3,
        other => return Err(Error::Config(format!("unknown trajectory `{other}`"))),
    };
    if params.len() != want {
        return Err(Error::LengthMismatch {
            what: "trajectory parameters",
            expected: want,
            actual: params.len(),
        });
    }
    let origin = [T::zero(); 2];
    let traj = match name {
        "line" => Trajectory::Line {
            speed: params[0],
            heading_rad: params[1],
            origin,
        },
        "circle" => Trajectory::Circle {
            radius: params[0],
            omega: params[1],
            center: origin,
        },
        _ => Trajectory::Stadium {
            straight_m: params[0],
            radius_m: params[1],
            speed: params[2],
            center: origin,
        },
    };
    traj.validate()?;
    Ok(traj)
}

impl<T: Real> Trajectory<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Trajectory::Line { speed, .. } => speed != T::zero() && speed.is_finite(),
            Trajectory::Circle { radius, omega, .. } => {
                radius > T::zero() && omega != T::zero() && omega.is_finite()
            }
            Trajectory::Stadium {
                straight_m,
                radius_m,
                speed,
                ..
            } => {
                straight_m >= T::zero()
                    && radius_m > T::zero()
                    && speed > T::zero()
                    && speed.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "invalid trajectory parameters {self:?}"
            )))
        }
    }

    pub fn sample(&self, t: T) -> TrajectoryPoint<T> {
        match *self {
            Trajectory::Line {
                speed,
                heading_rad,
                origin,
            } => {
                let (s, c) = heading_rad.sin_cos();
                TrajectoryPoint {
                    r1: origin[0] + speed * t * c,
                    r2: origin[1] + speed * t * s,
                    r3: speed * c,
                    r4: speed * s,
                    r1dd: T::zero(),
                    r2dd: T::zero(),
                }
            }
            Trajectory::Circle {
                radius,
                omega,
                center,
            } => {
                let (s, c) = (omega * t).sin_cos();
                let w2 = omega * omega;
                TrajectoryPoint {
                    r1: center[0] + radius * c,
                    r2: center[1] + radius * s,
                    r3: -radius * omega * s,
                    r4: radius * omega * c,
                    r1dd: -radius * w2 * c,
                    r2dd: -radius * w2 * s,
                }
            }
            Trajectory::Stadium {
                straight_m,
                radius_m,
                speed,
                center,
            } => stadium_point(straight_m, radius_m, speed, center, t),
        }
    }
}

fn stadium_point<T: Real>(
    straight: T,
    radius: T,
    speed: T,
    center: [T; 2],
    t: T,
) -> TrajectoryPoint<T> {
    let two = T::of(2.0);
    let half = straight / two;
    let arc = T::PI() * radius;
    let lap = straight * two + arc * two;
    let mut s = (speed * t) % lap;
    if s < T::zero() {
        s = s + lap;
    }
    let a = speed * speed / radius;
    let straight_at = |x: T, y: T, dir: T| TrajectoryPoint {
        r1: center[0] + x,
        r2: center[1] + y,
        r3: speed * dir,
        r4: T::zero(),
        r1dd: T::zero(),
        r2dd: T::zero(),
    };
    // polar angle measured from the arc's own center
    let arc_at = |cx: T, phi: T| {
        let (sn, cs) = phi.sin_cos();
        TrajectoryPoint {
            r1: center[0] + cx + radius * cs,
            r2: center[1] + radius * sn,
            r3: -speed * sn,
            r4: speed * cs,
            r1dd: -a * cs,
            r2dd: -a * sn,
        }
    };
    if s < half {
        return straight_at(s, -radius, T::one());
    }
    let s = s - half;
    if s < arc {
        return arc_at(half, -T::FRAC_PI_2() + s / radius);
    }
    let s = s - arc;
    if s < straight {
        return straight_at(half - s, radius, -T::one());
    }
    let s = s - straight;
    if s < arc {
        return arc_at(-half, T::FRAC_PI_2() + s / radius);
    }
    straight_at(-half + (s - arc), -radius, T::one())
}
