//! Rendering of the enriched natural-language data description.

use std::collections::BTreeMap;

use crate::digest::sha256_hex;
use crate::scalar::Real;

use super::{round_fixed, serialize_series, PreprocessError, SerializationConfig, StatFeatures,
            TimeSeries};

/// Context about how a recording was collected. All fields optional.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CollectionContext {
    pub device_placement: String,
    pub collection_overview: String,
    /// Extra metadata lines, rendered in key order.
    pub extra_metadata: BTreeMap<String, String>,
}

/// Rendered description of one recording plus a digest of everything that
/// produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct DataDescription {
    pub text: String,
    pub source_hash: String,
}

/// Renders, in fixed order: collection overview, sampling rate and units,
/// device placement, extra metadata, per-channel serialized values, and
/// per-channel statistics. Identical inputs produce identical bytes.
pub fn build_data_description<T: Real>(
    ts: &TimeSeries<T>,
    ctx: &CollectionContext,
    cfg: &SerializationConfig,
    features: &StatFeatures<T>,
) -> Result<DataDescription, PreprocessError> {
    cfg.validate()?;
    let mut text = String::new();
    if !ctx.collection_overview.is_empty() {
        text.push_str(&format!("Collection overview: {}\n", ctx.collection_overview));
    }
    text.push_str(&format!(
        "Sampling rate: {} Hz. {} channel(s), {} samples each.\n",
        trim_float(ts.sampling_rate_hz()),
        ts.channels().len(),
        ts.len()
    ));
    if !ctx.device_placement.is_empty() {
        text.push_str(&format!("Device placement: {}\n", ctx.device_placement));
    }
    for (key, value) in &ctx.extra_metadata {
        text.push_str(&format!("{key}: {value}\n"));
    }
    for ch in ts.channels() {
        let serialized = serialize_series(&ch.values, cfg)?;
        if ch.unit.is_empty() {
            text.push_str(&format!("Channel {} values: {}\n", ch.name, serialized));
        } else {
            text.push_str(&format!(
                "Channel {} ({}) values: {}\n",
                ch.name, ch.unit, serialized
            ));
        }
    }
    for stats in &features.channels {
        text.push_str(&format!(
            "Channel {} statistics: mean {}, variance {}, min {}, max {}, FFT magnitude mean {}\n",
            stats.name,
            round_fixed(stats.mean, cfg.precision_digits)?,
            round_fixed(stats.variance, cfg.precision_digits)?,
            round_fixed(stats.min, cfg.precision_digits)?,
            round_fixed(stats.max, cfg.precision_digits)?,
            round_fixed(stats.fft_magnitude_mean, cfg.precision_digits)?,
        ));
    }
    let source_hash = sha256_hex(canonical_input(ts, ctx, cfg, features).as_bytes());
    Ok(DataDescription { text, source_hash })
}

/// Sampling rates like 10.0 render as "10".
fn trim_float(v: f64) -> String {
    format!("{v}")
}

fn canonical_input<T: Real>(
    ts: &TimeSeries<T>,
    ctx: &CollectionContext,
    cfg: &SerializationConfig,
    features: &StatFeatures<T>,
) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let _ = write!(
        s,
        "rate={};start={};",
        ts.sampling_rate_hz().to_bits(),
        ts.start_index()
    );
    for ch in ts.channels() {
        let _ = write!(s, "ch={};unit={};", ch.name, ch.unit);
        for v in &ch.values {
            let _ = write!(s, "{:x},", v.to_f64().expect("Real converts to f64").to_bits());
        }
    }
    let _ = write!(
        s,
        "ctx={}|{}|",
        ctx.collection_overview, ctx.device_placement
    );
    for (k, v) in &ctx.extra_metadata {
        let _ = write!(s, "{k}={v};");
    }
    let _ = write!(
        s,
        "cfg={}|{}|{}|{};",
        cfg.precision_digits, cfg.timestep_separator, cfg.intra_number_spacing, cfg.downsample_factor
    );
    for st in &features.channels {
        let _ = write!(
            s,
            "st={}|{:x}|{:x}|{:x}|{:x}|{:x};",
            st.name,
            st.mean.to_f64().expect("Real converts to f64").to_bits(),
            st.variance.to_f64().expect("Real converts to f64").to_bits(),
            st.min.to_f64().expect("Real converts to f64").to_bits(),
            st.max.to_f64().expect("Real converts to f64").to_bits(),
            st.fft_magnitude_mean
                .to_f64()
                .expect("Real converts to f64")
                .to_bits(),
        );
    }
    s
}
