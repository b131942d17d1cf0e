use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::surface::GainVector;

use super::model::{wrap_angle, LinearizedState};

/// Reference position, velocity and acceleration at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TrajectoryPoint<T> {
    pub r1: T,
    pub r2: T,
    pub r3: T,
    pub r4: T,
    pub r1dd: T,
    pub r2dd: T,
}

/// Virtual accelerations of the two channels.
///
/// `gains` holds the per-axis pair `[k_pos, k_vel]`, shared by both axes.
pub fn clelc_robot_law<T: Real>(
    traj: &TrajectoryPoint<T>,
    lin: &LinearizedState<T>,
    gains: &GainVector<T>,
    u_n1: T,
    u_n2: T,
) -> Result<(T, T)> {
    if gains.len() != 2 {
        return Err(Error::LengthMismatch {
            what: "per-axis gains",
            expected: 2,
            actual: gains.len(),
        });
    }
    let [kp, kv] = [gains.as_slice()[0], gains.as_slice()[1]];
    let x = &lin.x;
    let u1 = traj.r1dd + kp * (traj.r1 - x[0]) + kv * (traj.r3 - x[2]) + u_n1;
    let u2 = traj.r2dd + kp * (traj.r2 - x[1]) + kv * (traj.r4 - x[3]) + u_n2;
    Ok((u1, u2))
}

/// Heading of the reference velocity, flipped by π when driving backwards.
pub fn heading_reference<T: Real>(r3: T, r4: T, reverse: bool) -> Result<T> {
    if r3 == T::zero() && r4 == T::zero() {
        return Err(Error::ZeroReferenceVelocity);
    }
    let base = r4.atan2(r3);
    Ok(if reverse {
        wrap_angle(base + T::PI())
    } else {
        base
    })
}

/// `(v_d, ω_d)` along the reference.
pub fn feedforward_velocities<T: Real>(
    r3: T,
    r4: T,
    r3dot: T,
    r4dot: T,
    reverse: bool,
) -> Result<(T, T)> {
    let speed2 = r3 * r3 + r4 * r4;
    if !(speed2 > T::zero()) {
        return Err(Error::ZeroReferenceVelocity);
    }
    let speed = speed2.sqrt();
    let omega = (r4dot * r3 - r3dot * r4) / speed2;
    Ok((if reverse { -speed } else { speed }, omega))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn robot_gains() -> GainVector<f64> {
        GainVector::new(vec![0.09, 0.6]).unwrap()
    }

    #[test]
    fn law_examples() {
        let traj = TrajectoryPoint {
            r1: 1.0,
            r2: 2.0,
            r3: 0.3,
            r4: -0.1,
            r1dd: 0.01,
            r2dd: -0.02,
        };
        let on = LinearizedState {
            x: [1.0, 2.0, 0.3, -0.1],
        };
        assert_eq!(
            clelc_robot_law(&traj, &on, &robot_gains(), 0.0, 0.0).unwrap(),
            (0.01, -0.02)
        );
        let still = TrajectoryPoint::default();
        let off = LinearizedState {
            x: [-1.0, 0.0, 0.0, 0.0],
        };
        let (u1, u2) = clelc_robot_law(&still, &off, &robot_gains(), 0.0, 0.0).unwrap();
        assert_eq!((u1, u2), (0.09, 0.0));
        let zero = LinearizedState { x: [0.0; 4] };
        assert_eq!(
            clelc_robot_law(&still, &zero, &robot_gains(), 0.0, 0.0).unwrap(),
            (0.0, 0.0)
        );
        assert_eq!(
            clelc_robot_law(&still, &zero, &robot_gains(), 0.5, -0.25).unwrap(),
            (0.5, -0.25)
        );
        let bad = GainVector::new(vec![1.0]).unwrap();
        assert!(clelc_robot_law(&still, &zero, &bad, 0.0, 0.0).is_err());
    }

    #[test]
    fn heading_examples() {
        assert_eq!(heading_reference(1.0, 0.0, false).unwrap(), 0.0);
        assert_eq!(heading_reference(0.0, 1.0, false).unwrap(), FRAC_PI_2);
        assert_eq!(heading_reference(1.0, 0.0, true).unwrap(), PI);
        assert!(heading_reference(0.0, 0.0, false).is_err());
    }

    #[test]
    fn feedforward_examples() {
        assert_eq!(
            feedforward_velocities(1.0, 0.0, 0.0, 0.0, false).unwrap(),
            (1.0, 0.0)
        );
        let (radius, rate) = (10.0, 0.04);
        for &t in &[0.0, 3.7, 81.0] {
            let (s, c) = f64::sin_cos(rate * t);
            let (r3, r4) = (-radius * rate * s, radius * rate * c);
            let (r3d, r4d) = (-radius * rate * rate * c, -radius * rate * rate * s);
            let (v, w) = feedforward_velocities(r3, r4, r3d, r4d, false).unwrap();
            assert!((v - radius * rate).abs() < 1e-15 && (w - rate).abs() < 1e-15);
            let (vr, wr) = feedforward_velocities(r3, r4, r3d, r4d, true).unwrap();
            assert_eq!((vr, wr), (-v, w));
        }
        assert!(feedforward_velocities(0.0, 0.0, 1.0, 1.0, false).is_err());
    }
}
