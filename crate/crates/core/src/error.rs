use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("temperature {value} °C is outside the model range [{min}, {max}] °C")]
    TemperatureOutOfRange { value: f64, min: f64, max: f64 },

    #[error("relative humidity {0} is outside the admissible domain (must be > 0)")]
    HumidityDomain(f64),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: String,
    },

    #[error("interface fluxes are not defined for perfect contact (continuity is enforced by constraints)")]
    PerfectContact,

    #[error("degenerate geometry: {0}")]
    Geometry(String),

    #[error("mesh: {0}")]
    Mesh(String),

    #[error("element {element}: {source}")]
    Element {
        element: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("interface segment {segment}: {source}")]
    InterfaceElement {
        segment: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("linear solver breakdown: {0}")]
    LinearSolver(String),

    #[error("Newton iteration did not converge in {iterations} iterations; scaled residual history {history:?}")]
    NoConvergence { iterations: usize, history: Vec<f64> },

    #[error("time step from t = {time} s failed after {halvings} dt halvings: {source}")]
    StepFailed {
        time: f64,
        halvings: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration: {0}")]
    Config(String),

    #[error("climate series: {0}")]
    Climate(String),

    #[error("sensor layout: {0}")]
    Sensor(String),

    #[error("sampling: {0}")]
    Sampling(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::TemperatureOutOfRange { .. }
                | Error::HumidityDomain(_)
                | Error::Element { .. }
                | Error::InterfaceElement { .. }
                | Error::LinearSolver(_)
                | Error::NoConvergence { .. }
                | Error::StepFailed { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
