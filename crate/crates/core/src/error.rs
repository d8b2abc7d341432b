use thiserror::Error;

/// Errors raised by source construction, kernel evaluation, phase
/// accumulation and the conductor solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("distribution `{0}` is empty")]
    EmptyDistribution(String),

    #[error("self-energy requested: both distributions are labelled `{0}`")]
    SelfEnergy(String),

    #[error("evaluation point {point:?} coincides with element {index} of `{label}` and no regularization is configured")]
    CoincidentPoint {
        label: String,
        index: usize,
        point: [f64; 3],
    },

    #[error("wavefunction grid is not normalized: sum |psi|^2 dV = {norm}")]
    NotNormalized { norm: f64 },

    #[error("time {time} s outside path range [{start}, {end}] s")]
    TimeOutOfRange { time: f64, start: f64, end: f64 },

    #[error("velocity {speed} m/s at sample {index} exceeds the nonrelativistic bound 0.1 c")]
    Relativistic { index: usize, speed: f64 },

    #[error("path carrier mismatch: expected {expected}")]
    CarrierMismatch { expected: &'static str },

    #[error("arm endpoints do not match (gap {gap} m)")]
    EndpointMismatch { gap: f64 },

    #[error("timelines do not overlap: [{a0}, {a1}] vs [{b0}, {b1}]")]
    DisjointTimelines { a0: f64, a1: f64, b0: f64, b1: f64 },

    #[error("path sample {index} lies within {distance} m of the source, inside the exclusion radius")]
    TooClose { index: usize, distance: f64 },

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("point {point:?} is {where_} the conductor surface (winding number {winding:.3})")]
    WrongSide {
        point: [f64; 3],
        where_: &'static str,
        winding: f64,
    },

    #[error("singular or ill-conditioned system (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("least-squares fit needs at least one probe")]
    NoProbes,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
