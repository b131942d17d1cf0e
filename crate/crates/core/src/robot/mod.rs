//! Unicycle with dynamic extension tracked through two linearized
//! double-integrator channels.

mod law;
mod model;
mod slip;
mod trajectory;

pub use law::{clelc_robot_law, feedforward_velocities, heading_reference, TrajectoryPoint};
pub use model::{
    feedback_linearize, unicycle_dynamics, wrap_angle, Actuator, LinearizedState, RobotCommand,
    RobotPlant, RobotState, DEFAULT_OMEGA_LIMIT, DEFAULT_V_MIN,
};
pub use slip::{slip_disturbance, SlipProfile};
pub use trajectory::{trajectory_library, Trajectory};
