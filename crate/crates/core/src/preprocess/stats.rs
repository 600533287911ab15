//! Per-channel statistical features: moments, extrema, and the mean DFT
//! magnitude over the one-sided spectrum (DC excluded).

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::scalar::Real;

use super::{PreprocessError, TimeSeries};

/// Statistics of one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelStats<T> {
    pub name: String,
    pub mean: T,
    /// Population variance (divides by n).
    pub variance: T,
    pub min: T,
    pub max: T,
    /// Arithmetic mean of DFT magnitudes over bins `1..=n/2`.
    pub fft_magnitude_mean: T,
}

/// Per-channel statistics for a whole recording.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StatFeatures<T> {
    pub channels: Vec<ChannelStats<T>>,
}

impl<T> StatFeatures<T> {
    /// No features; used for recordings too short to summarize.
    pub fn empty() -> Self {
        Self {
            channels: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }
}

/// Computes mean, population variance, min, max, and the mean one-sided DFT
/// magnitude for every channel. Channels need at least two samples.
pub fn compute_stat_features<T: Real>(
    ts: &TimeSeries<T>,
) -> Result<StatFeatures<T>, PreprocessError> {
    let mut planner = FftPlanner::<T>::new();
    let channels = ts
        .channels()
        .iter()
        .map(|ch| {
            let n = ch.values.len();
            if n < 2 {
                return Err(PreprocessError::ChannelTooShort {
                    name: ch.name.clone(),
                    len: n,
                });
            }
            let count = T::from_usize(n).expect("channel length fits scalar");
            let mean = ch.values.iter().copied().sum::<T>() / count;
            let variance = ch
                .values
                .iter()
                .map(|&v| {
                    let d = v - mean;
                    d * d
                })
                .sum::<T>()
                / count;
            let min = ch.values.iter().copied().fold(T::infinity(), T::min);
            let max = ch.values.iter().copied().fold(T::neg_infinity(), T::max);

            let fft = planner.plan_fft_forward(n);
            let mut buf: Vec<Complex<T>> = ch
                .values
                .iter()
                .map(|&v| Complex::new(v, T::zero()))
                .collect();
            fft.process(&mut buf);
            let half = n / 2;
            let bins = T::from_usize(half).expect("bin count fits scalar");
            let fft_magnitude_mean =
                buf[1..=half].iter().map(|c| c.norm()).sum::<T>() / bins;

            Ok(ChannelStats {
                name: ch.name.clone(),
                mean,
                variance,
                min,
                max,
                fft_magnitude_mean,
            })
        })
        .collect::<Result<_, PreprocessError>>()?;
    Ok(StatFeatures { channels })
}
