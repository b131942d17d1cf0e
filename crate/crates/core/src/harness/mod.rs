//! Scenario configuration and the simulation loops.

mod config;
mod run;

pub use config::{
    default_benchmark_config, default_robot_config, ControllerKind, CustomPlant, DisturbanceSpec,
    EdotMode, ReferenceSpec, RobotScenario, ScenarioConfig, ScenarioKind, MAX_RULES,
};
pub use run::{compare_controllers, run_scenario, RunLog, RunOutput};
