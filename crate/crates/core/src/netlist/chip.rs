//! Whole-chip model around an adder core: input shift-register taps and
//! output amplifiers, sized to given shares of total critical current.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::gate::{ClockLine, GateKind, GateSpec, PhaseSlot, DEFAULT_IC_UA};

use super::{Gate, GateId, Netlist, PinRef};

pub const SHIFT_REGISTER_REGION: &str = "shift_register";
pub const AMPLIFIER_REGION: &str = "output_amps";

/// Shares of total chip critical current.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChipFractions {
    pub core: f64,
    pub amplifiers: f64,
    pub shift_register: f64,
}

impl Default for ChipFractions {
    fn default() -> Self {
        ChipFractions { core: 0.42, amplifiers: 0.50, shift_register: 0.08 }
    }
}

/// Wraps `core` with one shift-register stage per input tap (phase 0) and one
/// amplifier per output on the first Q-line phase at or after the last core
/// phase. Cell sizes are set so the region shares match `fractions`.
pub fn chip_model(core: &Netlist, fractions: &ChipFractions) -> Result<Netlist> {
    let f = fractions;
    if [f.core, f.amplifiers, f.shift_register].iter().any(|&x| !(0.0..=1.0).contains(&x)) || f.core == 0.0 {
        return Err(param("chip fractions must lie in [0, 1] with a non-zero core share"));
    }
    if (f.core + f.amplifiers + f.shift_register) > 1.0 + 1e-9 {
        return Err(param("chip fractions sum to more than 1"));
    }
    let last =
        core.total_phases().filter(|_| core.is_phased()).ok_or_else(|| param("chip model needs a phased core"))? - 1;
    let amp_phase = (last..).find(|&p| PhaseSlot::new(p).clock_line == ClockLine::Q).unwrap();

    let core_ic: f64 = core.gates.iter().map(|g| g.spec.total_ic()).sum();
    let chip_ic = core_ic / f.core;
    let mut nl = core.clone();

    let sr_region = nl.region_id(SHIFT_REGISTER_REGION);
    let sr_spec = sized_cell(chip_ic * f.shift_register, nl.inputs.len());
    let fan = nl.fanouts();
    for (tap, &src) in core.inputs.iter().enumerate() {
        let mut cell = Gate::new(sr_spec, vec![PinRef::new(src, 0)]);
        cell.phase = Some(0);
        cell.region = sr_region;
        cell.name = Some(format!("sr{tap}"));
        let id = nl.add(cell);
        for &(g, k) in &fan[src][0] {
            nl.gates[g].inputs[k] = PinRef::new(id, 0);
        }
    }

    let amp_region = nl.region_id(AMPLIFIER_REGION);
    let amp_spec = sized_cell(chip_ic * f.amplifiers, nl.outputs.len());
    for (i, &sink) in core.outputs.iter().enumerate() {
        let feed = nl.gates[sink].inputs[0];
        let mut cell = Gate::new(amp_spec, vec![feed]);
        cell.phase = Some(amp_phase);
        cell.region = amp_region;
        cell.name = Some(format!("amp{i}"));
        let id: GateId = nl.add(cell);
        nl.gates[sink].inputs[0] = PinRef::new(id, 0);
        nl.gates[sink].phase = Some(amp_phase);
    }
    Ok(nl)
}

/// A delay-like cell carrying `total_ic / count` µA of critical current.
fn sized_cell(total_ic: f64, count: usize) -> GateSpec {
    let per_cell = total_ic / count.max(1) as f64;
    let jj = ((per_cell / DEFAULT_IC_UA).round() as u32).max(2);
    GateSpec { kind: GateKind::Delay, jj_count: jj, ic_avg: per_cell / f64::from(jj), seq_depth: 2 }
}
