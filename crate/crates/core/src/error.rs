use thiserror::Error;

use crate::control::ControlDecomposition;

/// Errors raised by the controller, the simulators and the scenario harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{what}: expected length {expected}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("membership width {sigma} is below the floor {sigma_min}")]
    WidthBelowFloor { sigma: f64, sigma_min: f64 },

    #[error("input gain |b(x)| = {b} is within the singularity guard {b_min}")]
    SingularPlant { b: f64, b_min: f64 },

    #[error("non-finite {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("linear speed {v} is below the linearization guard {v_min}")]
    SpeedSingularity { v: f64, v_min: f64 },

    #[error("reference velocity is zero; heading is undefined")]
    ZeroReferenceVelocity,

    #[error("learning rate {alpha} does not dominate the uncertainty-rate bound {bound}")]
    StabilityAssumption { alpha: f64, bound: f64 },

    #[error("simulation produced an empty log")]
    EmptyLog,

    #[error(
        "simulation fault at step {step} (t = {t} s): {source}; decomposition: {decomposition:?}"
    )]
    Fault {
        step: usize,
        t: f64,
        decomposition: Option<ControlDecomposition<f64>>,
        #[source]
        source: Box<Error>,
    },

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by a bad configuration rather than a failed run.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::LengthMismatch { .. } | Error::EmptyLog
        )
    }

    pub(crate) fn at_step(
        self,
        step: usize,
        t: f64,
        decomposition: Option<ControlDecomposition<f64>>,
    ) -> Self {
        Error::Fault {
            step,
            t,
            decomposition,
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
