use thiserror::Error;

/// Errors raised by beam design and evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("array must have at least one element per axis, got {n_az}x{n_el}")]
    EmptyGeometry { n_az: usize, n_el: usize },

    #[error("subcarrier count must be odd and positive, got {m_count}")]
    BadSubcarrierCount { m_count: usize },

    #[error("frequency grid must be positive everywhere: f_0 = {f0} Hz")]
    NonPositiveFrequency { f0: f64 },

    #[error("direction ({az}, {el}) deg outside azimuth [-180, 180] x elevation [0, 180]")]
    InvalidDirection { az: f64, el: f64 },

    #[error("value {value} for {what} is not finite")]
    NonFinite { what: &'static str, value: f64 },

    #[error("config is {got_az}x{got_el} but the array is {n_az}x{n_el}")]
    DimensionMismatch {
        got_az: usize,
        got_el: usize,
        n_az: usize,
        n_el: usize,
    },

    #[error("element index ({y}, {z}) outside the {n_az}x{n_el} array")]
    ElementOutOfRange {
        y: usize,
        z: usize,
        n_az: usize,
        n_el: usize,
    },

    #[error("subcarrier index {m} outside 0..{m_count}")]
    SubcarrierOutOfRange { m: usize, m_count: usize },

    #[error("subband is empty")]
    EmptySubband,

    #[error("mean gain must be positive, got {value}")]
    NonPositiveGain { value: f64 },

    #[error("bandwidth ratios must be positive and sum to 1, got sum {sum}")]
    InvalidAlphas { sum: f64 },

    #[error("need one direction and one ratio per user, got {directions} directions and {alphas} ratios")]
    UserCountMismatch { directions: usize, alphas: usize },

    #[error("user {user} receives an empty subband; raise its ratio or the subcarrier count")]
    EmptyUserSubband { user: usize },

    #[error("angle grid is empty")]
    EmptyAngleGrid,

    #[error("quantization spec invalid: {reason}")]
    InvalidQuantization { reason: String },

    #[error("optimizer settings invalid: {reason}")]
    InvalidSettings { reason: String },

    #[error("loss became non-finite at step {step}")]
    NonFiniteLoss { step: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
