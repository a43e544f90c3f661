use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("total linewidth is zero; the density of states is singular")]
    ZeroLinewidth,

    #[error("material has no absorption coefficient")]
    MissingAbsorption,

    #[error("Kittel frequency {kittel_hz} Hz does not exceed the LO offset {lo_offset_hz} Hz")]
    Aliasing { kittel_hz: f64, lo_offset_hz: f64 },

    #[error("steady-state system is singular")]
    SingularSystem,

    #[error("frequency grid is empty")]
    EmptyGrid,

    #[error("spectrum grid is not strictly increasing at index {index}")]
    NonMonotoneGrid { index: usize },

    #[error("spectrum has {frequencies} frequencies but {values} values")]
    LengthMismatch { frequencies: usize, values: usize },

    #[error("offset {offset_hz} Hz leaves only {points} overlapping grid points (need at least {required})")]
    InsufficientOverlap {
        offset_hz: f64,
        points: usize,
        required: usize,
    },

    #[error("both orbits produce zero flux; the ratio is undefined")]
    UndefinedRatio,

    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and >= 0",
        })
    }
}
