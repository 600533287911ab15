//! Multi-channel sensor recordings and strided decimation.

use crate::scalar::Real;

use super::PreprocessError;

/// One named channel of a recording, e.g. `ax` in `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel<T> {
    pub name: String,
    pub unit: String,
    pub values: Vec<T>,
}

impl<T> Channel<T> {
    pub fn new(name: impl Into<String>, unit: impl Into<String>, values: Vec<T>) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
            values,
        }
    }
}

/// Multi-channel numeric recording with a sampling rate and sample offset.
///
/// All channels have equal, non-zero length and the rate is positive;
/// [`TimeSeries::new`] enforces both.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    channels: Vec<Channel<T>>,
    sampling_rate_hz: f64,
    start_index: u64,
}

impl<T: Real> TimeSeries<T> {
    pub fn new(
        channels: Vec<Channel<T>>,
        sampling_rate_hz: f64,
        start_index: u64,
    ) -> Result<Self, PreprocessError> {
        if channels.is_empty() {
            return Err(PreprocessError::NoChannels);
        }
        if !(sampling_rate_hz > 0.0) {
            return Err(PreprocessError::NonPositiveRate(sampling_rate_hz));
        }
        let expected = channels[0].values.len();
        if expected == 0 {
            return Err(PreprocessError::EmptySeries);
        }
        for ch in &channels {
            if ch.values.len() != expected {
                return Err(PreprocessError::ChannelLengthMismatch {
                    name: ch.name.clone(),
                    len: ch.values.len(),
                    expected,
                });
            }
        }
        Ok(Self {
            channels,
            sampling_rate_hz,
            start_index,
        })
    }

    pub fn channels(&self) -> &[Channel<T>] {
        &self.channels
    }

    pub fn sampling_rate_hz(&self) -> f64 {
        self.sampling_rate_hz
    }

    pub fn start_index(&self) -> u64 {
        self.start_index
    }

    /// Samples per channel.
    pub fn len(&self) -> usize {
        self.channels[0].values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Keeps samples at indices `0, factor, 2*factor, ...` of every channel and
/// divides the sampling rate by `factor`. No anti-alias filtering.
pub fn downsample<T: Real>(
    ts: &TimeSeries<T>,
    factor: usize,
) -> Result<TimeSeries<T>, PreprocessError> {
    if factor == 0 {
        return Err(PreprocessError::ZeroFactor);
    }
    if factor == 1 {
        return Ok(ts.clone());
    }
    let channels = ts
        .channels
        .iter()
        .map(|ch| Channel {
            name: ch.name.clone(),
            unit: ch.unit.clone(),
            values: ch.values.iter().copied().step_by(factor).collect(),
        })
        .collect();
    TimeSeries::new(
        channels,
        ts.sampling_rate_hz / factor as f64,
        ts.start_index,
    )
}
