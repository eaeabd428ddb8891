//! Models of frequency-domain-equalization RF self-interference
//! cancellers, configuration optimization under hardware quantization,
//! digital SIC on synthetic OFDM baseband, and closed-form full-duplex
//! throughput analysis.

pub mod cancopt;
pub mod digsic;
pub mod error;
pub mod netgain;
pub mod rfmodel;
pub mod sichan;

pub use error::{Error, Result};
