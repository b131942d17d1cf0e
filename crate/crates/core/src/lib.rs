//! Closed-loop error learning control: a sliding-surface feedback law
//! augmented by a TSK neuro-fuzzy term trained online from the surface value.

pub mod analysis;
pub mod control;
pub mod error;
pub mod fuzzy;
pub mod harness;
pub mod learning;
pub mod log;
pub mod plant;
pub mod robot;
pub mod scalar;
pub mod surface;

pub use analysis::{
    compare, compute_metrics, finite_time_bound, ComparisonReport, Metrics, MetricsOptions,
};
pub use control::{clelc_law, flc_law, ControlDecomposition};
pub use error::{Error, Result};
pub use fuzzy::NeuroFuzzyParams;
pub use harness::{compare_controllers, run_scenario, ScenarioConfig};
pub use learning::{learning_step, LearningConfig};
pub use log::{RobotLog, SimLog};
pub use plant::PlantModel;
pub use scalar::Real;
pub use surface::{gain_vector, sliding_value, smoothed_sign, GainVector};

pub type Params = NeuroFuzzyParams<f64>;
pub type Gains = GainVector<f64>;
pub type Plant = PlantModel<f64>;
pub type Decomposition = ControlDecomposition<f64>;
pub type Learning = LearningConfig<f64>;
