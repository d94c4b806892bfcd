//! Modulated clock waveforms and coherent sideband analysis.
//!
//! Waveforms span whole modulation periods and spectra are read from single
//! DFT bins, so carrier and sideband amplitudes carry no leakage.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationFactors {
    /// AM depth.
    pub m_a: f64,
    /// PM depth, rad.
    pub m_p: f64,
}

impl ModulationFactors {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.m_a) || !(self.m_p >= 0.0) {
            return Err(param("need 0 <= m_a < 0.5 and m_p >= 0"));
        }
        Ok(())
    }
}

fn sample_count(f_carrier: f64, f_mod: f64, duration: f64, sample_rate: f64) -> Result<usize> {
    if !(f_carrier > 0.0 && f_mod > 0.0 && duration > 0.0) {
        return Err(param("frequencies and duration must be positive"));
    }
    if !(sample_rate > 4.0 * f_carrier) {
        return Err(param(format!(
            "sample rate {sample_rate} Hz must exceed four times the carrier ({} Hz)",
            4.0 * f_carrier
        )));
    }
    let periods = duration * f_mod;
    if (periods - periods.round()).abs() > 1e-6 || periods.round() < 1.0 {
        return Err(param("duration must be a whole number of modulation periods"));
    }
    Ok((duration * sample_rate).round() as usize)
}

/// Samples of `v0 · [1 + m_a sin(ω_m t)] · sin(ω_c t + m_p sin(ω_m t))`.
pub fn synthesize_modulated(
    v0: f64,
    m: &ModulationFactors,
    f_carrier: f64,
    f_mod: f64,
    duration: f64,
    sample_rate: f64,
) -> Result<Vec<f64>> {
    m.validate()?;
    let n = sample_count(f_carrier, f_mod, duration, sample_rate)?;
    Ok((0..n)
        .map(|k| {
            let t = k as f64 / sample_rate;
            let wm = 2.0 * PI * f_mod * t;
            v0 * (1.0 + m.m_a * wm.sin()) * (2.0 * PI * f_carrier * t + m.m_p * wm.sin()).sin()
        })
        .collect())
}

/// Carrier whose amplitude is switched between `v0 ± 2·v_sqr` by a 50 %
/// duty square wave, the waveform of an ideally chopped load.
pub fn synthesize_chopped(
    v0: f64,
    v_sqr: f64,
    f_carrier: f64,
    f_mod: f64,
    duration: f64,
    sample_rate: f64,
) -> Result<Vec<f64>> {
    let n = sample_count(f_carrier, f_mod, duration, sample_rate)?;
    Ok((0..n)
        .map(|k| {
            let t = k as f64 / sample_rate;
            let frac = (f_mod * t).fract();
            let sq = if frac < 0.5 { 1.0 } else { -1.0 };
            (v0 + 2.0 * v_sqr * sq) * (2.0 * PI * f_carrier * t).sin()
        })
        .collect())
}

/// Complex amplitude of the component at `f`: the `c` in `Re(c · e^{jωt})`.
pub fn spectrum_bin(samples: &[f64], sample_rate: f64, f: f64) -> Complex64 {
    let n = samples.len();
    if n == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let step = f / sample_rate;
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &x) in samples.iter().enumerate() {
        // reduce the phase before the trig call to keep it exact over long records
        let phase = 2.0 * PI * (step * k as f64).fract();
        acc += x * Complex64::new(phase.cos(), -phase.sin());
    }
    acc * (2.0 / n as f64)
}

/// First-order sidebands relative to the carrier, as complex amplitude ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidebandRatios {
    pub carrier: Complex64,
    pub upper: Complex64,
    pub lower: Complex64,
}

impl SidebandRatios {
    pub fn upper_power(&self) -> f64 {
        self.upper.norm_sqr()
    }

    pub fn lower_power(&self) -> f64 {
        self.lower.norm_sqr()
    }

    /// Mean single-sideband to carrier power ratio.
    pub fn ssb_power(&self) -> f64 {
        0.5 * (self.upper_power() + self.lower_power())
    }
}

pub fn spectrum_sidebands(samples: &[f64], sample_rate: f64, f_carrier: f64, f_mod: f64) -> Result<SidebandRatios> {
    let carrier = spectrum_bin(samples, sample_rate, f_carrier);
    if carrier.norm() == 0.0 {
        return Err(Error::Domain("no carrier in the record".into()));
    }
    Ok(SidebandRatios {
        carrier,
        upper: spectrum_bin(samples, sample_rate, f_carrier + f_mod) / carrier,
        lower: spectrum_bin(samples, sample_rate, f_carrier - f_mod) / carrier,
    })
}

/// Splits sideband ratios into AM and PM depths.
///
/// To first order the AM pair is `∓j·m_a/2` and the PM pair `±m_p/2` relative
/// to the carrier, so `m_a = |u + l*|` and `m_p = |u - l*|`.
pub fn quadrature_decompose(r: &SidebandRatios) -> ModulationFactors {
    ModulationFactors { m_a: (r.upper + r.lower.conj()).norm(), m_p: (r.upper - r.lower.conj()).norm() }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub frequency: f64,
    pub power_dbm: f64,
}

/// `frequency_hz,power_dbm` rows. A non-numeric first line is a header.
pub fn parse_spectrum_csv(text: &str) -> Result<Vec<SpectrumPoint>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match fields.as_slice() {
            [f, p] => f.parse::<f64>().ok().zip(p.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some((frequency, power_dbm)) => out.push(SpectrumPoint { frequency, power_dbm }),
            None if out.is_empty() && i == 0 => continue,
            None => {
                return Err(Error::Parse { line: i + 1, message: format!("expected 'frequency,power', got '{line}'") })
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsbMeasurement {
    pub carrier_frequency: f64,
    pub carrier_dbm: f64,
    pub upper_dbc: f64,
    pub lower_dbc: f64,
    /// Mean of the two sidebands in linear power, dBc.
    pub ssb_db: f64,
}

/// Reads the carrier (strongest point within `tolerance` of `f_carrier`)
/// and the strongest points within `tolerance` of each sideband offset.
pub fn measure_ssb(spectrum: &[SpectrumPoint], f_carrier: f64, f_mod: f64, tolerance: f64) -> Result<SsbMeasurement> {
    let peak = |f: f64| {
        spectrum
            .iter()
            .filter(|p| (p.frequency - f).abs() <= tolerance)
            .max_by(|a, b| a.power_dbm.total_cmp(&b.power_dbm))
            .copied()
            .ok_or_else(|| param(format!("no spectrum point within {tolerance} Hz of {f} Hz")))
    };
    let c = peak(f_carrier)?;
    let up = peak(c.frequency + f_mod)?;
    let lo = peak(c.frequency - f_mod)?;
    let upper_dbc = up.power_dbm - c.power_dbm;
    let lower_dbc = lo.power_dbm - c.power_dbm;
    let mean = 0.5 * (10f64.powf(upper_dbc / 10.0) + 10f64.powf(lower_dbc / 10.0));
    Ok(SsbMeasurement {
        carrier_frequency: c.frequency,
        carrier_dbm: c.power_dbm,
        upper_dbc,
        lower_dbc,
        ssb_db: 10.0 * mean.log10(),
    })
}
