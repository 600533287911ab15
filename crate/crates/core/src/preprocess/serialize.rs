//! Fixed-precision decimal rendering and digit-spaced serialization.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

use super::PreprocessError;

/// Controls how numeric sequences are rendered for an LLM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SerializationConfig {
    /// Fractional digits kept per value, at most 12.
    pub precision_digits: u8,
    /// Separator between time steps.
    pub timestep_separator: String,
    /// When set, every numeral character (digits, '.', '-') is spaced so
    /// tokenizers see one token per character.
    pub intra_number_spacing: bool,
    /// Extra decimation applied before serialization.
    pub downsample_factor: usize,
}

impl Default for SerializationConfig {
    fn default() -> Self {
        Self {
            precision_digits: 2,
            timestep_separator: ", ".to_string(),
            intra_number_spacing: true,
            downsample_factor: 1,
        }
    }
}

impl SerializationConfig {
    pub fn validate(&self) -> Result<(), PreprocessError> {
        if self.precision_digits > 12 {
            return Err(PreprocessError::PrecisionTooLarge(self.precision_digits));
        }
        if self.downsample_factor == 0 {
            return Err(PreprocessError::ZeroFactor);
        }
        Ok(())
    }
}

/// Renders `value` with exactly `precision_digits` fractional digits.
///
/// Rounding is half-away-from-zero applied to the value's shortest decimal
/// representation, so `2.345` becomes `"2.35"` even though the nearest f64
/// is fractionally below the tie. A result of all zeros drops the sign:
/// `"-0.00"` normalizes to `"0.00"`.
pub fn round_fixed<T: Real>(value: T, precision_digits: u8) -> Result<String, PreprocessError> {
    let v = value.to_f64().expect("Real converts to f64");
    if !v.is_finite() {
        return Err(PreprocessError::NonFiniteValue(v));
    }
    // Display for floats always yields plain decimal notation (no exponent)
    // and the shortest digits that round-trip.
    let repr = format!("{v}");
    Ok(round_decimal_string(&repr, precision_digits as usize))
}

fn round_decimal_string(repr: &str, digits: usize) -> String {
    let (negative, body) = match repr.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, repr),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };

    let mut int_digits: Vec<u8> = int_part.bytes().map(|b| b - b'0').collect();
    let mut frac_digits: Vec<u8> = frac_part.bytes().map(|b| b - b'0').collect();

    if frac_digits.len() > digits {
        let round_up = frac_digits[digits] >= 5;
        frac_digits.truncate(digits);
        if round_up {
            let mut carry = 1u8;
            for d in frac_digits.iter_mut().rev() {
                *d += carry;
                carry = *d / 10;
                *d %= 10;
                if carry == 0 {
                    break;
                }
            }
            if carry > 0 {
                for d in int_digits.iter_mut().rev() {
                    *d += carry;
                    carry = *d / 10;
                    *d %= 10;
                    if carry == 0 {
                        break;
                    }
                }
                if carry > 0 {
                    int_digits.insert(0, carry);
                }
            }
        }
    } else {
        frac_digits.resize(digits, 0);
    }

    let all_zero = int_digits.iter().all(|&d| d == 0) && frac_digits.iter().all(|&d| d == 0);
    let mut out = String::new();
    if negative && !all_zero {
        out.push('-');
    }
    if int_digits.is_empty() {
        out.push('0');
    } else {
        out.extend(int_digits.iter().map(|d| char::from(b'0' + d)));
    }
    if digits > 0 {
        out.push('.');
        out.extend(frac_digits.iter().map(|d| char::from(b'0' + d)));
    }
    out
}

/// Serializes a sequence of values: each value through [`round_fixed`],
/// characters spaced when configured, time steps joined by the configured
/// separator.
pub fn serialize_series<T: Real>(
    values: &[T],
    cfg: &SerializationConfig,
) -> Result<String, PreprocessError> {
    cfg.validate()?;
    if values.is_empty() {
        return Err(PreprocessError::EmptyValues);
    }
    let rendered: Vec<String> = values
        .iter()
        .map(|&v| {
            let fixed = round_fixed(v, cfg.precision_digits)?;
            Ok(if cfg.intra_number_spacing {
                space_characters(&fixed)
            } else {
                fixed
            })
        })
        .collect::<Result<_, PreprocessError>>()?;
    let separator = if cfg.intra_number_spacing {
        // The separator joins the spaced character stream, so it is spaced
        // like any other token: ", " becomes " , ".
        let trimmed = cfg.timestep_separator.trim();
        if trimmed.is_empty() {
            " ".to_string()
        } else {
            format!(" {trimmed} ")
        }
    } else {
        cfg.timestep_separator.clone()
    };
    Ok(rendered.join(&separator))
}

fn space_characters(numeral: &str) -> String {
    let mut out = String::with_capacity(numeral.len() * 2);
    for (i, c) in numeral.chars().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push(c);
    }
    out
}
