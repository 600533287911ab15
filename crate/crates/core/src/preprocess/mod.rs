//! Sensor-data simplification and enrichment: decimation, fixed-precision
//! digit-spaced serialization, per-channel statistics, and rendering of the
//! final natural-language data description.
//!
//! Everything here is a pure function; callers may share inputs across
//! threads freely.

mod describe;
mod serialize;
mod series;
mod stats;

pub use describe::{build_data_description, CollectionContext, DataDescription};
pub use serialize::{round_fixed, serialize_series, SerializationConfig};
pub use series::{downsample, Channel, TimeSeries};
pub use stats::{compute_stat_features, ChannelStats, StatFeatures};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PreprocessError {
    #[error("time series must have at least one channel")]
    NoChannels,
    #[error("channel {name:?} has length {len}, expected {expected}")]
    ChannelLengthMismatch {
        name: String,
        len: usize,
        expected: usize,
    },
    #[error("channels must hold at least one sample")]
    EmptySeries,
    #[error("sampling rate must be positive, got {0}")]
    NonPositiveRate(f64),
    #[error("downsample factor must be >= 1")]
    ZeroFactor,
    #[error("value must be finite, got {0}")]
    NonFiniteValue(f64),
    #[error("serialize_series requires at least one value")]
    EmptyValues,
    #[error("precision_digits must be <= 12, got {0}")]
    PrecisionTooLarge(u8),
    #[error("channel {name:?} needs at least 2 samples for statistics, has {len}")]
    ChannelTooShort { name: String, len: usize },
}
