//! Clock-power operating margins versus frequency.
//!
//! The lower limit is the smallest clock amplitude that still meets timing.
//! Over-bias failure is outside the delay model, so the upper limit is a
//! fixed ceiling, calibrated once and held constant over frequency.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::gate::{ClockConfig, DEFAULT_RECEIVER_WINDOW_FRAC, NOMINAL_JUNCTION_DELAY_PS};
use crate::netlist::Netlist;

use super::timed::analyze_timing;

/// Ceiling of the relative clock amplitude, calibrated so the 8-bit chip
/// netlist has a 4.6 dB margin at 10 GHz (`0.96 · 10^(4.6/20)`).
pub const DEFAULT_OVER_BIAS_CEILING: f64 = 1.630_313_906_363_274_6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginConfig {
    pub d0_ps: f64,
    pub receiver_window_frac: f64,
    /// Upper limit on relative clock amplitude.
    pub ceiling: f64,
    /// Ascending relative amplitudes scanned before bisection.
    pub bias_grid: Vec<f64>,
}

impl Default for MarginConfig {
    fn default() -> Self {
        MarginConfig {
            d0_ps: NOMINAL_JUNCTION_DELAY_PS,
            receiver_window_frac: DEFAULT_RECEIVER_WINDOW_FRAC,
            ceiling: DEFAULT_OVER_BIAS_CEILING,
            bias_grid: default_bias_grid(),
        }
    }
}

/// 0.10 to 3.00 in steps of 0.01.
pub fn default_bias_grid() -> Vec<f64> {
    (10..=300).map(|i| f64::from(i) / 100.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginPoint {
    pub frequency: f64,
    /// Minimum relative amplitude with no violations; `None` if not operable.
    pub bias_min: Option<f64>,
    pub lower_db: Option<f64>,
    pub upper_db: f64,
    /// `upper_db - lower_db`, zero where the circuit does not operate.
    pub width_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginCurve {
    pub ceiling: f64,
    pub points: Vec<MarginPoint>,
}

impl MarginCurve {
    pub fn at(&self, frequency: f64) -> Option<&MarginPoint> {
        self.points.iter().find(|p| (p.frequency - frequency).abs() <= 1e-9 * frequency)
    }
}

/// Clock power relative to nominal, dB, for a relative current amplitude.
pub fn amplitude_db(bias_rel: f64) -> f64 {
    20.0 * bias_rel.log10()
}

fn passes(netlist: &Netlist, frequency: f64, bias: f64, cfg: &MarginConfig) -> Result<bool> {
    let clock = ClockConfig { frequency, bias_rel: bias, receiver_window_frac: cfg.receiver_window_frac };
    Ok(analyze_timing(netlist, &clock, cfg.d0_ps)?.passes())
}

/// Smallest relative clock amplitude with zero timing violations.
///
/// The grid locates the first passing point; bisection against the failing
/// point below it refines the limit. If the lowest grid point already passes,
/// it is returned as is.
pub fn min_operating_bias(netlist: &Netlist, frequency: f64, cfg: &MarginConfig) -> Result<Option<f64>> {
    if cfg.bias_grid.is_empty() {
        return Err(param("bias grid is empty"));
    }
    if cfg.bias_grid.windows(2).any(|w| w[1] <= w[0]) || cfg.bias_grid[0] <= 0.0 {
        return Err(param("bias grid must be positive and strictly ascending"));
    }
    let mut prev = None;
    for &b in &cfg.bias_grid {
        if passes(netlist, frequency, b, cfg)? {
            let Some(mut lo) = prev else { return Ok(Some(b)) };
            let mut hi = b;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if passes(netlist, frequency, mid, cfg)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Some(hi));
        }
        prev = Some(b);
    }
    Ok(None)
}

pub fn margin_sweep(netlist: &Netlist, frequencies: &[f64], cfg: &MarginConfig) -> Result<MarginCurve> {
    if !(cfg.ceiling > 0.0) {
        return Err(param("over-bias ceiling must be positive"));
    }
    let upper_db = amplitude_db(cfg.ceiling);
    let mut points = Vec::with_capacity(frequencies.len());
    for &f in frequencies {
        let bias_min = min_operating_bias(netlist, f, cfg)?.filter(|&b| b <= cfg.ceiling);
        let lower_db = bias_min.map(amplitude_db);
        points.push(MarginPoint {
            frequency: f,
            bias_min,
            lower_db,
            upper_db,
            width_db: lower_db.map_or(0.0, |l| upper_db - l),
        });
    }
    Ok(MarginCurve { ceiling: cfg.ceiling, points })
}

/// Ceiling that yields `width_db` of margin at `frequency`.
pub fn calibrate_ceiling(netlist: &Netlist, frequency: f64, width_db: f64, cfg: &MarginConfig) -> Result<f64> {
    let b = min_operating_bias(netlist, frequency, cfg)?
        .ok_or_else(|| param(format!("circuit does not operate at {frequency} Hz on the bias grid")))?;
    Ok(b * 10f64.powf(width_db / 20.0))
}

/// `count` evenly spaced frequencies from `start` to `stop` inclusive.
pub fn frequency_grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 || !(start > 0.0) || stop < start {
        return Err(param("frequency grid needs 0 < start <= stop and at least one point"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    Ok((0..count).map(|i| start + (stop - start) * i as f64 / (count - 1) as f64).collect())
}
