use thiserror::Error;

/// Errors shared across the canceller-model, channel, and optimization layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A model evaluation hit a numerically degenerate point (e.g. a
    /// vanishing cascade entry) at a specific frequency.
    #[error("numeric degeneracy at {freq_hz} Hz: {what}")]
    NumericDegeneracy { freq_hz: f64, what: String },

    /// `extract_center_and_q` could not find a -3 dB crossing on both
    /// sides of the peak within the grid.
    #[error("band too narrow: no -3 dB crossing {side} of the peak at {peak_hz} Hz")]
    BandTooNarrow { peak_hz: f64, side: &'static str },

    #[error("frequency grids do not match: {0}")]
    GridMismatch(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
