//! Dissipated power from clock sidebands.
//!
//! Chopping the input data between a pseudo-random pattern and all zeros
//! modulates the power the circuit draws from the clock. For pure amplitude
//! modulation the dissipated fraction of carrier power follows from the
//! single-sideband ratio as `ΔP/P0 = 2π · sqrt(P_SSB/P0)`. When only part of
//! the sideband power is amplitude modulation, `P_SSB` is scaled by that
//! fraction first.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::gate::ClockLine;
use crate::units::{db_to_ratio, dbm_to_watts, ratio_to_db};

/// Share of sideband power attributed to AM when AM and PM are equal.
pub const DEFAULT_AM_POWER_FRACTION: f64 = 0.5;

/// Carrier and sideband levels of one clock line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidebandMeasurement {
    /// Carrier power at the chip, dBm.
    pub p0_dbm: f64,
    /// Single sideband relative to the carrier, dB.
    pub ssb_db: f64,
    pub f_carrier: f64,
    pub f_mod: f64,
}

impl SidebandMeasurement {
    pub fn new(p0_dbm: f64, ssb_db: f64) -> Self {
        SidebandMeasurement { p0_dbm, ssb_db, f_carrier: 0.0, f_mod: 0.0 }
    }

    /// Carrier power at the chip taken as the geometric mean of the applied
    /// and returned powers, i.e. their average in dBm.
    pub fn from_applied_returned(applied_dbm: f64, returned_dbm: f64, ssb_db: f64) -> Self {
        Self::new(0.5 * (applied_dbm + returned_dbm), ssb_db)
    }

    pub fn with_frequencies(mut self, f_carrier: f64, f_mod: f64) -> Self {
        self.f_carrier = f_carrier;
        self.f_mod = f_mod;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ssb_db < 0.0) {
            return Err(Error::Domain(format!("sideband ratio must be negative dB, got {}", self.ssb_db)));
        }
        if !self.p0_dbm.is_finite() {
            return Err(param("carrier power must be finite"));
        }
        if self.f_carrier > 0.0 && self.f_mod >= self.f_carrier {
            return Err(param("modulation frequency must be below the carrier"));
        }
        Ok(())
    }

    pub fn p0_watts(&self) -> f64 {
        dbm_to_watts(self.p0_dbm)
    }
}

/// Dissipated power as a fraction of carrier power and in watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerEstimate {
    pub ratio: f64,
    pub ratio_db: f64,
    pub watts: f64,
}

impl PowerEstimate {
    fn new(ratio: f64, p0: f64) -> Self {
        PowerEstimate { ratio, ratio_db: ratio_to_db(ratio), watts: ratio * p0 }
    }
}

/// Pure-AM upper bound on dissipated power.
pub fn ssb_power_upper_bound(m: &SidebandMeasurement) -> Result<PowerEstimate> {
    m.validate()?;
    Ok(PowerEstimate::new(2.0 * PI * 10f64.powf(m.ssb_db / 20.0), m.p0_watts()))
}

/// Dissipated power when `am_power_fraction` of the sideband power is AM.
pub fn am_pm_corrected_power(m: &SidebandMeasurement, am_power_fraction: f64) -> Result<PowerEstimate> {
    if !(am_power_fraction > 0.0 && am_power_fraction <= 1.0) {
        return Err(param(format!("AM power fraction must lie in (0, 1], got {am_power_fraction}")));
    }
    m.validate()?;
    let ratio = 2.0 * PI * (am_power_fraction * db_to_ratio(m.ssb_db)).sqrt();
    Ok(PowerEstimate::new(ratio, m.p0_watts()))
}

/// Normalized dissipation in dB with the `2π` factor rounded to 8 dB and
/// the half-power correction rounded to 3 dB: `8 + (SSB - 3) / 2`.
pub fn rounded_db(ssb_db: f64) -> f64 {
    8.0 + 0.5 * (ssb_db - 3.0)
}

/// AM depth from the ratio of low to high modulated carrier power.
///
/// Solves `r = (1 - 2 m_a) / (1 + 2 m_a)`.
pub fn extract_ma(p_lo_over_p_hi: f64) -> Result<f64> {
    let r = p_lo_over_p_hi;
    if !(r > 0.0) {
        return Err(Error::Domain(format!("power ratio must be positive, got {r}")));
    }
    if r > 1.0 {
        return Err(param(format!("ratio {r} > 1: pass P_lo / P_hi, not its inverse")));
    }
    Ok((1.0 - r) / (2.0 * (1.0 + r)))
}

/// PM depth from the data-dependent delay: `Δt = 2 m_p / ω_c`.
pub fn extract_mp(delta_t: f64, f_carrier: f64) -> Result<f64> {
    if !(delta_t >= 0.0) || !(f_carrier > 0.0) {
        return Err(param("delay must be non-negative and carrier frequency positive"));
    }
    Ok(PI * f_carrier * delta_t)
}

/// Fundamental of a chopped data pattern clocked at `f_clock`.
pub fn chop_fundamental(f_clock: f64, active_len: u64, zero_len: u64) -> Result<f64> {
    if active_len == 0 || zero_len == 0 || !(f_clock > 0.0) {
        return Err(param("chop lengths and clock frequency must be positive"));
    }
    Ok(f_clock / (active_len + zero_len) as f64)
}

/// Carrier level of one line, either measured at the chip or as an
/// applied/returned pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineMeasurement {
    pub p0_dbm: Option<f64>,
    pub applied_dbm: Option<f64>,
    pub returned_dbm: Option<f64>,
    pub ssb_db: f64,
}

impl LineMeasurement {
    pub fn to_measurement(&self, f_carrier: f64, f_mod: f64) -> Result<SidebandMeasurement> {
        let m = match (self.p0_dbm, self.applied_dbm, self.returned_dbm) {
            (Some(p0), None, None) => SidebandMeasurement::new(p0, self.ssb_db),
            (None, Some(a), Some(r)) => SidebandMeasurement::from_applied_returned(a, r, self.ssb_db),
            _ => {
                return Err(Error::Config(
                    "give either p0_dbm or both applied_dbm and returned_dbm for each line".into(),
                ))
            }
        };
        Ok(m.with_frequencies(f_carrier, f_mod))
    }
}

/// Measurement descriptor: per-line carrier and sideband levels plus the
/// chop pattern that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementDescriptor {
    #[serde(default)]
    pub f_carrier: f64,
    #[serde(default)]
    pub active_len: u64,
    #[serde(default)]
    pub zero_len: u64,
    #[serde(default = "default_fraction")]
    pub am_power_fraction: f64,
    /// Critical-current share of the circuit under study.
    #[serde(default)]
    pub region_fraction: Option<f64>,
    pub lines: BTreeMap<ClockLine, LineMeasurement>,
}

fn default_fraction() -> f64 {
    DEFAULT_AM_POWER_FRACTION
}

impl MeasurementDescriptor {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineResult {
    pub measurement: SidebandMeasurement,
    pub upper_bound: PowerEstimate,
    pub corrected: PowerEstimate,
    /// Corrected ratio with rounded constants; only meaningful at fraction ½.
    pub rounded_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SidebandReport {
    pub f_mod: Option<f64>,
    pub am_power_fraction: f64,
    pub lines: BTreeMap<ClockLine, LineResult>,
    pub total_upper_bound: f64,
    pub total: f64,
    pub region_fraction: Option<f64>,
    pub region_power: Option<f64>,
}

/// Per-line corrected power, the chip total and the region's share of it.
pub fn sideband_chain(d: &MeasurementDescriptor) -> Result<SidebandReport> {
    let f_mod = if d.active_len > 0 && d.zero_len > 0 && d.f_carrier > 0.0 {
        Some(chop_fundamental(d.f_carrier, d.active_len, d.zero_len)?)
    } else {
        None
    };
    if d.lines.is_empty() {
        return Err(Error::Config("measurement lists no clock lines".into()));
    }
    if let Some(f) = d.region_fraction {
        if !(0.0..=1.0).contains(&f) {
            return Err(param(format!("region fraction {f} outside [0, 1]")));
        }
    }
    let mut lines = BTreeMap::new();
    let (mut total, mut total_ub) = (0.0, 0.0);
    for (line, lm) in &d.lines {
        let m = lm.to_measurement(d.f_carrier, f_mod.unwrap_or(0.0))?;
        let upper_bound = ssb_power_upper_bound(&m)?;
        let corrected = am_pm_corrected_power(&m, d.am_power_fraction)?;
        total += corrected.watts;
        total_ub += upper_bound.watts;
        lines.insert(*line, LineResult { measurement: m, upper_bound, corrected, rounded_db: rounded_db(m.ssb_db) });
    }
    Ok(SidebandReport {
        f_mod,
        am_power_fraction: d.am_power_fraction,
        lines,
        total_upper_bound: total_ub,
        total,
        region_fraction: d.region_fraction,
        region_power: d.region_fraction.map(|f| f * total),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_bound_values() {
        let e = ssb_power_upper_bound(&SidebandMeasurement::new(-2.0, -69.3)).unwrap();
        assert!((e.ratio_db - (-26.668)).abs() < 0.01, "{}", e.ratio_db);
        assert!((e.watts - 1.36e-6).abs() < 0.01e-6, "{}", e.watts);
        let tiny = ssb_power_upper_bound(&SidebandMeasurement::new(-2.0, -400.0)).unwrap();
        assert!(tiny.watts < 1e-20);
        assert!(ssb_power_upper_bound(&SidebandMeasurement::new(-2.0, 0.0)).is_err());
    }

    #[test]
    fn full_fraction_is_upper_bound() {
        let m = SidebandMeasurement::new(-2.4, -79.3);
        let a = am_pm_corrected_power(&m, 1.0).unwrap();
        let b = ssb_power_upper_bound(&m).unwrap();
        assert!((a.watts - b.watts).abs() < 1e-18);
        assert!(am_pm_corrected_power(&m, 0.0).is_err());
        assert!(am_pm_corrected_power(&m, 1.5).is_err());
    }

    #[test]
    fn rounded_form_tracks_exact() {
        for ssb in [-90.0, -79.3, -69.3, -40.0] {
            let e = am_pm_corrected_power(&SidebandMeasurement::new(0.0, ssb), 0.5).unwrap();
            assert!((e.ratio_db - rounded_db(ssb)).abs() < 0.05);
        }
    }

    #[test]
    fn modulation_depths() {
        assert!((extract_ma(0.91).unwrap() - 0.023).abs() < 0.001);
        assert_eq!(extract_ma(1.0).unwrap(), 0.0);
        assert!((extract_ma(1.0 / 3.0).unwrap() - 0.25).abs() < 1e-12);
        assert!(extract_ma(1.1).is_err());
        assert!((extract_mp(1.4e-12, 6e9).unwrap() - 0.026).abs() < 0.001);
        assert_eq!(extract_mp(0.0, 6e9).unwrap(), 0.0);
        assert!((extract_mp(1.0 / (PI * 5e9), 5e9).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chop_frequencies() {
        assert!((chop_fundamental(6.2e9, 12000, 12000).unwrap() - 258_333.33).abs() < 0.01);
        assert_eq!(chop_fundamental(1e9, 1, 1).unwrap(), 5e8);
        assert!((chop_fundamental(10e9, 5000, 5000).unwrap() - 1e6).abs() < 1e-6);
        assert!(chop_fundamental(1e9, 0, 1).is_err());
    }

    #[test]
    fn geometric_mean_carrier() {
        let m = SidebandMeasurement::from_applied_returned(1.0, -5.0, -70.0);
        assert!((m.p0_dbm + 2.0).abs() < 1e-12);
    }

    #[test]
    fn descriptor_chain() {
        let d = MeasurementDescriptor::from_toml_str(
            r#"
f_carrier = 6.2e9
active_len = 12000
zero_len = 12000
region_fraction = 0.42
[lines.Q]
p0_dbm = -2.0
ssb_db = -69.3
[lines.I]
applied_dbm = -1.4
returned_dbm = -3.4
ssb_db = -79.3
"#,
        )
        .unwrap();
        let r = sideband_chain(&d).unwrap();
        assert!((r.total - 1.238e-6).abs() < 0.01e-6, "{}", r.total);
        assert!((r.f_mod.unwrap() - 258_333.3).abs() < 1.0);
        assert!(r.total_upper_bound > r.total);
    }
}
