//! Physical constants and unit conversions shared by the analysis modules.
//!
//! Internal units are SI (W, A, V, s, Hz) unless a field name says otherwise;
//! gate tables use µA and ps because that is how device data is quoted.

use crate::error::{param, Result};

/// Magnetic flux quantum h/2e in V·s (2.068 mV·ps).
pub const FLUX_QUANTUM: f64 = 2.068e-15;

/// Experimentally determined prefactor of the dynamic power law.
pub const DYNAMIC_POWER_PREFACTOR: f64 = 0.33;

/// Stripline propagation speed in µm/ps.
pub const PTL_SPEED_UM_PER_PS: f64 = 100.0;

pub const MICROAMP: f64 = 1e-6;
pub const PICOSECOND: f64 = 1e-12;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Power ratio in dB.
pub fn ratio_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

pub fn db_to_ratio(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Clock period in picoseconds.
pub fn period_ps(frequency_hz: f64) -> f64 {
    1e12 / frequency_hz
}

/// Parses a frequency with an optional unit suffix (`Hz`, `kHz`, `MHz`, `GHz`).
///
/// Bare numbers are taken as Hz. Suffixes are case-insensitive.
pub fn parse_frequency(text: &str) -> Result<f64> {
    let t = text.trim();
    let lower = t.to_ascii_lowercase();
    let (number, scale) = if let Some(n) = lower.strip_suffix("ghz") {
        (n, 1e9)
    } else if let Some(n) = lower.strip_suffix("mhz") {
        (n, 1e6)
    } else if let Some(n) = lower.strip_suffix("khz") {
        (n, 1e3)
    } else if let Some(n) = lower.strip_suffix("hz") {
        (n, 1.0)
    } else {
        (lower.as_str(), 1.0)
    };
    let value: f64 = number.trim().parse().map_err(|_| param(format!("cannot parse frequency '{t}'")))?;
    if !(value.is_finite() && value > 0.0) {
        return Err(param(format!("frequency must be positive, got '{t}'")));
    }
    Ok(value * scale)
}

/// Formats a power in the most readable SI prefix.
pub fn format_watts(watts: f64) -> String {
    let a = watts.abs();
    if a == 0.0 {
        "0 W".to_string()
    } else if a < 1e-6 {
        format!("{:.1} nW", watts * 1e9)
    } else if a < 1e-3 {
        format!("{:.3} µW", watts * 1e6)
    } else if a < 1.0 {
        format!("{:.3} mW", watts * 1e3)
    } else {
        format!("{watts:.3} W")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_suffixes() {
        assert_eq!(parse_frequency("10GHz").unwrap(), 10e9);
        assert_eq!(parse_frequency("259 kHz").unwrap(), 259e3);
        assert_eq!(parse_frequency("6.21e9").unwrap(), 6.21e9);
        assert_eq!(parse_frequency("1.5MHz").unwrap(), 1.5e6);
        assert!(parse_frequency("-3GHz").is_err());
        assert!(parse_frequency("fast").is_err());
    }

    #[test]
    fn dbm_round_trip() {
        assert!((dbm_to_watts(0.0) - 1e-3).abs() < 1e-15);
        assert!((watts_to_dbm(dbm_to_watts(-2.4)) + 2.4).abs() < 1e-12);
    }
}
