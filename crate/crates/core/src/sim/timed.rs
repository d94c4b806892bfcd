//! Static per-phase timing under the bias-dependent junction delay model.
//!
//! A phase restarts the clock: gates fed only from earlier phases start at
//! the phase edge. Arrival accumulates along same-phase chains as
//! `seq_depth · d0 / bias`, plus stripline flight time for receivers.
//! Logic must settle within a quarter period; a stripline receiver may
//! additionally accept pulses `receiver_window_frac · T` past the peak.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{junction_delay, ClockConfig, GateKind};
use crate::netlist::{GateId, Netlist};
use crate::units::PTL_SPEED_UM_PER_PS;

use super::logic::{simulate_logic, SimTrace, Vector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingViolation {
    pub gate: GateId,
    pub phase: u32,
    pub arrival_ps: f64,
    pub window_ps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingAnalysis {
    pub clock: ClockConfig,
    pub junction_delay_ps: f64,
    /// Arrival of every gate's output after its phase edge, ps.
    pub arrivals_ps: Vec<f64>,
    /// Largest arrival on each phase.
    pub phase_worst_ps: Vec<f64>,
    /// Smallest `window - arrival` over all gates, ps.
    pub worst_slack_ps: f64,
    pub violations: Vec<TimingViolation>,
}

impl TimingAnalysis {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Arrival times and window violations for one clock operating point.
pub fn analyze_timing(netlist: &Netlist, clock: &ClockConfig, d0_ps: f64) -> Result<TimingAnalysis> {
    clock.validate()?;
    if !netlist.is_phased() {
        return Err(Error::Structural("timing needs a phase-assigned netlist".into()));
    }
    let d = junction_delay(clock.bias_rel, d0_ps)?;
    let period = clock.period_ps();
    let quarter = period / 4.0;
    let n_phases = netlist.total_phases().unwrap_or(0) as usize;
    let mut arrivals = vec![0.0f64; netlist.gates.len()];
    let mut phase_worst = vec![0.0f64; n_phases];
    let mut worst_slack = f64::INFINITY;
    let mut violations = Vec::new();
    for id in netlist.topo_order()? {
        let g = &netlist.gates[id];
        let phase = g.phase.unwrap_or(0);
        let start = g
            .inputs
            .iter()
            .filter(|p| netlist.gates[p.gate].phase == Some(phase))
            .map(|p| arrivals[p.gate])
            .fold(0.0, f64::max);
        let mut arrival = start + f64::from(g.spec.seq_depth) * d;
        let mut window = quarter;
        if g.kind() == GateKind::PtlReceiver {
            let len = g
                .ptl_length_um
                .ok_or_else(|| Error::Config(format!("stripline receiver {id} has no length annotation")))?;
            arrival += len / PTL_SPEED_UM_PER_PS;
            window += clock.receiver_window_frac * period;
        }
        arrivals[id] = arrival;
        phase_worst[phase as usize] = phase_worst[phase as usize].max(arrival);
        worst_slack = worst_slack.min(window - arrival);
        if arrival > window * (1.0 + 1e-12) {
            violations.push(TimingViolation { gate: id, phase, arrival_ps: arrival, window_ps: window });
        }
    }
    Ok(TimingAnalysis {
        clock: *clock,
        junction_delay_ps: d,
        arrivals_ps: arrivals,
        phase_worst_ps: phase_worst,
        worst_slack_ps: worst_slack,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimedTrace {
    pub trace: SimTrace,
    pub timing: TimingAnalysis,
}

/// Logical simulation annotated with arrival times and timing violations.
pub fn simulate_timed(netlist: &Netlist, clock: &ClockConfig, vectors: &[Vector], d0_ps: f64) -> Result<TimedTrace> {
    let timing = analyze_timing(netlist, clock, d0_ps)?;
    let mut trace = simulate_logic(netlist, vectors)?;
    trace.arrivals_ps = Some(timing.arrivals_ps.clone());
    Ok(TimedTrace { trace, timing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::NOMINAL_JUNCTION_DELAY_PS as D0;
    use crate::netlist::{build_kogge_stone, AdderOptions};

    #[test]
    fn nominal_ten_gigahertz_fits() {
        let nl = build_kogge_stone(8, &AdderOptions::fabricated_chip()).unwrap();
        let t = analyze_timing(&nl, &ClockConfig::new(10e9), D0).unwrap();
        assert!(t.passes(), "{:?}", t.violations);
        let worst_logic = t.phase_worst_ps.iter().cloned().fold(0.0, f64::max);
        assert!((worst_logic - 24.0).abs() < 1e-9);
    }

    #[test]
    fn twelve_gigahertz_violates() {
        let nl = build_kogge_stone(8, &AdderOptions::fabricated_chip()).unwrap();
        let t = analyze_timing(&nl, &ClockConfig::new(12e9), D0).unwrap();
        assert!(!t.passes());
        for v in &t.violations {
            assert!((v.window_ps - 1e12 / 12e9 / 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn stripline_adds_flight_time() {
        let nl = build_kogge_stone(8, &AdderOptions::fabricated_chip()).unwrap();
        let t = analyze_timing(&nl, &ClockConfig::new(10e9), D0).unwrap();
        for (id, g) in nl.gates.iter().enumerate().filter(|(_, g)| g.kind() == GateKind::PtlReceiver) {
            let drv = g.inputs[0].gate;
            let want = t.arrivals_ps[drv] + f64::from(g.spec.seq_depth) * D0 + 10.0;
            assert!((t.arrivals_ps[id] - want).abs() < 1e-9);
        }
    }

    #[test]
    fn missing_length_is_config_error() {
        let mut nl = build_kogge_stone(8, &AdderOptions::fabricated_chip()).unwrap();
        for g in nl.gates.iter_mut() {
            g.ptl_length_um = None;
        }
        assert!(matches!(analyze_timing(&nl, &ClockConfig::new(10e9), D0), Err(Error::Config(_))));
    }

    #[test]
    fn timed_trace_carries_arrivals() {
        let nl = build_kogge_stone(8, &AdderOptions::default()).unwrap();
        let tt = simulate_timed(&nl, &ClockConfig::new(10e9), &[(1, 2)], D0).unwrap();
        assert_eq!(tt.trace.outputs[0], 3);
        assert_eq!(tt.trace.arrivals_ps.unwrap().len(), nl.gates.len());
        assert!(simulate_logic(&nl, &[(1, 2)]).unwrap().arrivals_ps.is_none());
    }
}
