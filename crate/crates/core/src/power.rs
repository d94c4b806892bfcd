//! Dynamic power of RQL circuits.
//!
//! A fully active circuit of `N` junctions with average critical current
//! `Ic` dissipates `P = 0.33 · Ic · Φ0 · N · f`. Activity-weighted power
//! charges each gate output that carries a one with its share of the gate's
//! junctions, so a gate whose outputs all assert every cycle reproduces the
//! fully active figure.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{param, structural, Result};
use crate::gate::{junction_delay, ClockLine, PhaseSlot, NOMINAL_JUNCTION_DELAY_PS};
use crate::netlist::{netlist_stats, Netlist};
use crate::sim::SimTrace;
use crate::units::{format_watts, DYNAMIC_POWER_PREFACTOR, FLUX_QUANTUM, MICROAMP};

/// Bias current of one RSFQ bias resistor, A.
pub const RSFQ_BIAS_CURRENT: f64 = 200e-6;
/// RSFQ DC bias bus voltage, V.
pub const RSFQ_BUS_VOLTAGE: f64 = 2.6e-3;
/// Cryocooler wall-plug overhead at 4 K, W per W dissipated.
pub const CRYOCOOLER_W_PER_W: f64 = 1000.0;

/// Fully active dynamic power, W. `ic_avg` in µA.
pub fn dynamic_power(ic_avg_ua: f64, n: f64, frequency: f64) -> f64 {
    DYNAMIC_POWER_PREFACTOR * ic_avg_ua * MICROAMP * FLUX_QUANTUM * n * frequency
}

/// Energy of one switching event of junctions totalling `ic_total_ua`, J.
pub fn switching_energy(ic_total_ua: f64) -> f64 {
    DYNAMIC_POWER_PREFACTOR * ic_total_ua * MICROAMP * FLUX_QUANTUM
}

/// Static dissipation of one RSFQ bias resistor, W.
pub fn rsfq_static_equivalent(current: f64, voltage: f64) -> f64 {
    current * voltage
}

/// Dissipation with attribution to clock lines and circuit regions. Watts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub p_dynamic: f64,
    pub per_line: BTreeMap<ClockLine, f64>,
    pub per_region: BTreeMap<String, f64>,
    pub ic_avg_ua: Option<f64>,
    pub n_junctions: Option<u64>,
    pub frequency: Option<f64>,
    pub notes: Vec<String>,
}

impl PowerReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("power report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<24} {:>14}", "quantity", "power");
        let _ = writeln!(s, "{:<24} {:>14}", "total", format_watts(self.p_dynamic));
        for (line, p) in &self.per_line {
            let _ = writeln!(s, "{:<24} {:>14}", format!("clock {line}"), format_watts(*p));
        }
        for (region, p) in &self.per_region {
            let _ = writeln!(s, "{:<24} {:>14}", format!("region {region}"), format_watts(*p));
        }
        if let Some(ic) = self.ic_avg_ua {
            let _ = writeln!(s, "{:<24} {:>14}", "Ic avg", format!("{ic:.1} µA"));
        }
        if let Some(n) = self.n_junctions {
            let _ = writeln!(s, "{:<24} {:>14}", "junctions", n);
        }
        if let Some(f) = self.frequency {
            let _ = writeln!(s, "{:<24} {:>14}", "frequency", format!("{:.4} GHz", f / 1e9));
        }
        let _ = writeln!(
            s,
            "{:<24} {:>14}",
            "RSFQ bias resistor",
            format_watts(rsfq_static_equivalent(RSFQ_BIAS_CURRENT, RSFQ_BUS_VOLTAGE))
        );
        for n in &self.notes {
            let _ = writeln!(s, "* {n}");
        }
        s
    }
}

fn cryo_note(p: f64) -> String {
    format!(
        "wall-plug power at {CRYOCOOLER_W_PER_W:.0} W/W cryocooler overhead: {}",
        format_watts(p * CRYOCOOLER_W_PER_W)
    )
}

fn line_of(netlist: &Netlist, gate: usize) -> Result<ClockLine> {
    netlist.gates[gate]
        .phase
        .map(|p| PhaseSlot::new(p).clock_line)
        .ok_or_else(|| structural("power attribution needs a phase-assigned netlist"))
}

/// Fully active power of a phased netlist, split by clock line and region.
pub fn netlist_power(netlist: &Netlist, frequency: f64) -> Result<PowerReport> {
    if !(frequency > 0.0) {
        return Err(param("frequency must be positive"));
    }
    let stats = netlist_stats(netlist);
    if stats.unphased_ic_ua > 0.0 {
        return Err(structural("power attribution needs a phase-assigned netlist"));
    }
    let per_line: BTreeMap<ClockLine, f64> =
        stats.line_ic_ua.iter().map(|(l, ic)| (*l, switching_energy(*ic) * frequency)).collect();
    let p_dynamic = switching_energy(stats.ic_total_ua) * frequency;
    let per_region = stats.region_fraction.iter().map(|(r, f)| (r.clone(), f * p_dynamic)).collect();
    Ok(PowerReport {
        p_dynamic,
        per_line,
        per_region,
        ic_avg_ua: stats.ic_avg_ua,
        n_junctions: Some(stats.jj_total),
        frequency: Some(frequency),
        notes: vec![cryo_note(p_dynamic)],
    })
}

/// Activity-weighted power of a simulated trace, W.
pub fn activity_power(netlist: &Netlist, trace: &SimTrace, frequency: f64) -> Result<f64> {
    Ok(activity_report(netlist, trace, frequency)?.p_dynamic)
}

/// Activity-weighted power, split by clock line and region.
///
/// Each output event of a gate costs `E_gate / outputs`, where `E_gate` is the
/// switching energy of all the gate's junctions. Power is the mean energy per
/// input vector times the clock frequency.
pub fn activity_report(netlist: &Netlist, trace: &SimTrace, frequency: f64) -> Result<PowerReport> {
    if trace.gate_events.len() != netlist.gates.len() {
        return Err(param("trace was not produced from this netlist"));
    }
    let cycles = trace.vectors.len().max(1) as f64;
    let mut per_line: BTreeMap<ClockLine, f64> = [(ClockLine::I, 0.0), (ClockLine::Q, 0.0)].into_iter().collect();
    let mut per_region: BTreeMap<String, f64> = netlist.regions.iter().map(|r| (r.clone(), 0.0)).collect();
    let mut total = 0.0;
    for (id, g) in netlist.gates.iter().enumerate() {
        let outs = g.kind().num_outputs();
        if outs == 0 || trace.gate_events[id] == 0 {
            continue;
        }
        let p = trace.gate_events[id] as f64 * switching_energy(g.spec.total_ic()) / outs as f64 / cycles * frequency;
        if p == 0.0 {
            continue;
        }
        *per_line.get_mut(&line_of(netlist, id)?).unwrap() += p;
        *per_region.get_mut(&netlist.regions[g.region as usize]).unwrap() += p;
        total += p;
    }
    let stats = netlist_stats(netlist);
    Ok(PowerReport {
        p_dynamic: total,
        per_line,
        per_region,
        ic_avg_ua: stats.ic_avg_ua,
        n_junctions: Some(stats.jj_total),
        frequency: Some(frequency),
        notes: vec![format!("activity-weighted over {} input vectors", trace.vectors.len()), cryo_note(total)],
    })
}

/// Splits measured per-line power over regions by critical-current share.
pub fn attribute_power(
    per_line: &BTreeMap<ClockLine, f64>,
    region_fractions: &BTreeMap<String, f64>,
) -> Result<PowerReport> {
    if let Some((r, f)) = region_fractions.iter().find(|(_, f)| !(0.0..=1.0).contains(*f)) {
        return Err(param(format!("region fraction {r} = {f} outside [0, 1]")));
    }
    let sum: f64 = region_fractions.values().sum();
    if sum > 1.0 + 1e-9 {
        return Err(param(format!("region fractions sum to {sum} > 1")));
    }
    let total: f64 = per_line.values().sum();
    Ok(PowerReport {
        p_dynamic: total,
        per_line: per_line.clone(),
        per_region: region_fractions.iter().map(|(r, f)| (r.clone(), f * total)).collect(),
        ic_avg_ua: None,
        n_junctions: None,
        frequency: None,
        notes: vec![cryo_note(total)],
    })
}

/// Large-circuit clock budget inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScalingScenario {
    pub n_devices: f64,
    pub ic_avg_ua: f64,
    pub frequency: f64,
    /// Tolerated clock-current variation, ±.
    pub margin_frac: f64,
    /// Ω.
    pub line_impedance: f64,
    /// Longest chain of sequential junctions in one phase.
    pub junctions_per_phase: u32,
    pub d0_ps: f64,
}

impl Default for ScalingScenario {
    fn default() -> Self {
        ScalingScenario {
            n_devices: 2e6,
            ic_avg_ua: 100.0,
            frequency: 10e9,
            margin_frac: 0.10,
            line_impedance: 50.0,
            junctions_per_phase: 8,
            d0_ps: NOMINAL_JUNCTION_DELAY_PS,
        }
    }
}

impl ScalingScenario {
    pub fn validate(&self) -> Result<()> {
        let positive =
            [self.n_devices, self.ic_avg_ua, self.frequency, self.margin_frac, self.line_impedance, self.d0_ps];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(param("scenario values must be positive and finite"));
        }
        if self.margin_frac >= 1.0 {
            return Err(param("margin_frac must be below 1"));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let s: ScalingScenario = toml::from_str(text).map_err(|e| crate::Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClockBudget {
    /// W.
    pub p_dissipated: f64,
    /// Smallest applied power keeping the clock droop inside the margin, W.
    pub p_applied_min: f64,
    /// `p_applied_min` rounded up to one significant figure, W.
    pub p_applied: f64,
    /// rms current on the feed line at `p_applied`, A.
    pub line_current_rms: f64,
    /// Delay spread of the longest phase chain over the bias margin, ps.
    pub timing_variation_ps: f64,
}

/// Clock power needed to run a large circuit within its margin.
///
/// The circuit absorbs `p_dissipated` from the travelling clock wave. The
/// resulting amplitude droop, `p_dissipated / (2 · p_applied)`, may use the
/// full `2 · margin_frac` span of the tolerated variation, giving
/// `p_applied_min = p_dissipated / (4 · margin_frac)`.
pub fn clock_budget(s: &ScalingScenario) -> Result<ClockBudget> {
    s.validate()?;
    let p_dissipated = dynamic_power(s.ic_avg_ua, s.n_devices, s.frequency);
    let p_applied_min = p_dissipated / (4.0 * s.margin_frac);
    let p_applied = round_up_1sf(p_applied_min);
    let spread = junction_delay(1.0 - s.margin_frac, s.d0_ps)? - junction_delay(1.0 + s.margin_frac, s.d0_ps)?;
    Ok(ClockBudget {
        p_dissipated,
        p_applied_min,
        p_applied,
        line_current_rms: line_current_rms(p_applied, s.line_impedance),
        timing_variation_ps: f64::from(s.junctions_per_phase) * spread,
    })
}

/// rms current of power `p` on a line of impedance `z`, A.
pub fn line_current_rms(p: f64, z: f64) -> f64 {
    (p / z).sqrt()
}

fn round_up_1sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let scale = 10f64.powf(x.log10().floor());
    let m = x / scale;
    // guard against representation noise on exact values
    let digit = if (m - m.round()).abs() < 1e-9 { m.round() } else { m.ceil() };
    digit * scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_values() {
        let p = dynamic_power(162.0, 815.0, 6.21e9);
        assert!((p - 560e-9).abs() / 560e-9 < 0.01, "{p}");
        let p = dynamic_power(100.0, 2e6, 10e9);
        assert!((p - 1.365e-3).abs() < 1e-5, "{p}");
        assert_eq!(dynamic_power(162.0, 0.0, 1e9), 0.0);
    }

    #[test]
    fn rsfq_resistor() {
        assert!((rsfq_static_equivalent(RSFQ_BIAS_CURRENT, RSFQ_BUS_VOLTAGE) - 520e-9).abs() < 1e-15);
        assert!((rsfq_static_equivalent(RSFQ_BIAS_CURRENT, RSFQ_BUS_VOLTAGE / 2.0) - 260e-9).abs() < 1e-15);
    }

    #[test]
    fn rounding() {
        assert_eq!(round_up_1sf(3.43e-3), 4e-3);
        assert!((round_up_1sf(0.4) - 0.4).abs() < 1e-15);
        assert_eq!(round_up_1sf(0.0), 0.0);
    }

    #[test]
    fn budget_of_large_chip() {
        let b = clock_budget(&ScalingScenario::default()).unwrap();
        assert!((b.p_applied - 4e-3).abs() < 1e-12);
        assert!((b.line_current_rms - 8.944e-3).abs() < 1e-5);
        assert!((b.timing_variation_ps - 4.8485).abs() < 1e-3);
        let half = clock_budget(&ScalingScenario { margin_frac: 0.5, ..Default::default() }).unwrap();
        let quarter = clock_budget(&ScalingScenario { margin_frac: 0.25, ..Default::default() }).unwrap();
        assert!((half.p_applied_min / quarter.p_applied_min - 0.5).abs() < 1e-12);
    }

    #[test]
    fn attribution_checks_fractions() {
        let lines: BTreeMap<ClockLine, f64> = [(ClockLine::Q, 970e-9), (ClockLine::I, 280e-9)].into();
        let r = attribute_power(&lines, &[("core".to_string(), 0.42)].into()).unwrap();
        assert!((r.p_dynamic - 1.25e-6).abs() < 1e-15);
        assert!((r.per_region["core"] - 525e-9).abs() < 1e-15);
        assert!(attribute_power(&lines, &[("a".to_string(), 0.6), ("b".to_string(), 0.5)].into()).is_err());
        assert!(attribute_power(&lines, &[("a".to_string(), -0.1)].into()).is_err());
    }

    #[test]
    fn scenario_toml() {
        let s = ScalingScenario::from_toml_str("n_devices = 1000.0\nfrequency = 5e9\n").unwrap();
        assert_eq!(s.n_devices, 1000.0);
        assert_eq!(s.margin_frac, 0.10);
        assert!(ScalingScenario::from_toml_str("margin_frac = 1.5").is_err());
    }
}
