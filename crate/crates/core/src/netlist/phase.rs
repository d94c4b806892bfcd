//! Clock-phase assignment, delay padding and latency.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{param, structural, Result};
use crate::gate::GateKind;

use super::kogge_stone::{log2_width, AdderOptions};
use super::{Gate, Netlist, PinRef};

/// Mapping of adder logic stages onto clock phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageLayout {
    pub n_bits: u32,
    /// `log2(n_bits) + 2`: generate/propagate, the CLA columns, the sum.
    pub n_logic_stages: u32,
    pub idle_phases: u32,
    /// Logic stage the idle phases are inserted in front of.
    pub idle_before_stage: u32,
    pub total_phases: u32,
}

impl StageLayout {
    /// `idle_before_stage` defaults to the last CLA column.
    pub fn new(n_bits: u32, idle_phases: u32, idle_before_stage: Option<u32>) -> Result<Self> {
        let k = log2_width(n_bits)?;
        let n_logic_stages = k + 2;
        let idle_before_stage = idle_before_stage.unwrap_or(k);
        if idle_before_stage == 0 || idle_before_stage >= n_logic_stages {
            return Err(param(format!(
                "idle phases must precede a stage in 1..{n_logic_stages}, got {idle_before_stage}"
            )));
        }
        Ok(StageLayout {
            n_bits,
            n_logic_stages,
            idle_phases,
            idle_before_stage,
            total_phases: n_logic_stages + idle_phases,
        })
    }

    pub fn phase_of_stage(&self, stage: u32) -> u32 {
        if stage >= self.idle_before_stage {
            stage + self.idle_phases
        } else {
            stage
        }
    }

    pub fn idle_phase_indices(&self) -> BTreeSet<u32> {
        (self.idle_before_stage..self.idle_before_stage + self.idle_phases).collect()
    }
}

/// Places every logic stage on its phase and pads each net that would skip
/// phases with delay cells, one per skipped phase. Delay chains are shared by
/// all receivers of a pin; inputs flagged as long interconnect that cross
/// padding phases get a dedicated last hop, a stripline pair when
/// `options.ptl_length_um` is set.
///
/// Gates without a stage tag (splitters, earlier padding) are placed as early
/// as their inputs allow.
pub fn assign_phases(netlist: &Netlist, layout: &StageLayout, options: &AdderOptions) -> Result<Netlist> {
    if layout.n_bits != netlist.width {
        return Err(param(format!("layout is for {} bits, netlist is {} bits", layout.n_bits, netlist.width)));
    }
    let order = netlist.topo_order()?;
    let mut out = netlist.clone();
    for &id in &order {
        let phase = match out.gates[id].stage {
            Some(stage) => layout.phase_of_stage(stage),
            None => out.gates[id].inputs.iter().map(|s| out.gates[s.gate].phase.unwrap_or(0)).max().unwrap_or(0),
        };
        out.gates[id].phase = Some(phase);
    }

    let table = &options.gate_table;
    let idle = layout.idle_phase_indices();
    let mut chains: HashMap<PinRef, Vec<PinRef>> = HashMap::new();
    let original = out.gates.len();
    for consumer in 0..original {
        let q = out.gates[consumer].phase.unwrap();
        for k in 0..out.gates[consumer].inputs.len() {
            let src = out.gates[consumer].inputs[k];
            let p = out.gates[src.gate].phase.unwrap();
            if q < p {
                return Err(structural(format!(
                    "gate {consumer} in phase {q} reads gate {} in later phase {p}",
                    src.gate
                )));
            }
            if q <= p + 1 {
                continue;
            }
            let long = out.gates[consumer].long_inputs & (1 << k) != 0 && idle.contains(&(q - 1));
            let new_src = if long {
                let feed = chain_to(&mut out, &mut chains, src, q - 2, table);
                let region = out.gates[src.gate].region;
                let label = pin_label(&out, src);
                match options.ptl_length_um {
                    Some(len) => {
                        let drv = push_cell(
                            &mut out,
                            GateKind::PtlDriver,
                            feed,
                            q - 1,
                            region,
                            format!("{label}@ptl_drv"),
                            table,
                        );
                        let rx = push_cell(
                            &mut out,
                            GateKind::PtlReceiver,
                            drv,
                            q - 1,
                            region,
                            format!("{label}@ptl_rx"),
                            table,
                        );
                        out.gates[rx.gate].ptl_length_um = Some(len);
                        rx
                    }
                    None => push_cell(&mut out, GateKind::Delay, feed, q - 1, region, format!("{label}@long"), table),
                }
            } else {
                chain_to(&mut out, &mut chains, src, q - 1, table)
            };
            out.gates[consumer].inputs[k] = new_src;
        }
    }
    out.idle_phases = idle;
    Ok(out)
}

fn pin_label(nl: &Netlist, pin: PinRef) -> String {
    match &nl.gates[pin.gate].name {
        Some(n) => format!("{n}.{}", pin.pin),
        None => format!("g{}.{}", pin.gate, pin.pin),
    }
}

fn push_cell(
    nl: &mut Netlist,
    kind: GateKind,
    input: PinRef,
    phase: u32,
    region: u16,
    name: String,
    table: &crate::gate::GateTable,
) -> PinRef {
    let mut g = Gate::new(table.spec(kind), vec![input]);
    g.phase = Some(phase);
    g.region = region;
    g.name = Some(name);
    PinRef::new(nl.add(g), 0)
}

/// Returns a pin carrying `src` delayed up to `target` phase, extending the
/// shared chain as needed.
fn chain_to(
    nl: &mut Netlist,
    chains: &mut HashMap<PinRef, Vec<PinRef>>,
    src: PinRef,
    target: u32,
    table: &crate::gate::GateTable,
) -> PinRef {
    let base = nl.gates[src.gate].phase.unwrap();
    if target <= base {
        return src;
    }
    let region = nl.gates[src.gate].region;
    let label = pin_label(nl, src);
    let chain = chains.entry(src).or_default();
    while (chain.len() as u32) < target - base {
        let prev = chain.last().copied().unwrap_or(src);
        let phase = base + chain.len() as u32 + 1;
        let cell = push_cell(nl, GateKind::Delay, prev, phase, region, format!("{label}@{phase}"), table);
        chain.push(cell);
    }
    chain[(target - base - 1) as usize]
}

/// Pipeline latency of a phased netlist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Latency {
    pub phases: u32,
    pub cycles: f64,
    pub picoseconds: f64,
}

impl Latency {
    pub fn from_phases(phases: u32, frequency: f64) -> Self {
        let cycles = f64::from(phases) / 4.0;
        Latency { phases, cycles, picoseconds: cycles / frequency * 1e12 }
    }
}

pub fn latency(netlist: &Netlist, frequency: f64) -> Result<Latency> {
    if !(frequency > 0.0) {
        return Err(param("frequency must be positive"));
    }
    let phases = netlist
        .total_phases()
        .filter(|_| netlist.is_phased())
        .ok_or_else(|| structural("netlist has gates without an assigned phase"))?;
    Ok(Latency::from_phases(phases, frequency))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{build_kogge_stone, build_logical, validate};

    #[test]
    fn chip_layout_phases() {
        let layout = StageLayout::new(8, 1, None).unwrap();
        let phases: Vec<u32> = (0..5).map(|s| layout.phase_of_stage(s)).collect();
        // A/OR, CLA1, CLA2, (idle = 3), CLA3, XOR
        assert_eq!(phases, vec![0, 1, 2, 4, 5]);
        assert_eq!(layout.total_phases, 6);
        assert_eq!(layout.idle_phase_indices().into_iter().collect::<Vec<_>>(), vec![3]);
        assert!(StageLayout::new(8, 1, Some(0)).is_err());
        assert!(StageLayout::new(8, 1, Some(5)).is_err());
    }

    #[test]
    fn idle_phase_holds_only_interconnect() {
        let nl = build_kogge_stone(8, &AdderOptions::fabricated_chip()).unwrap();
        for g in nl.gates.iter().filter(|g| g.phase == Some(3)) {
            assert!(matches!(g.kind(), GateKind::Delay | GateKind::PtlDriver | GateKind::PtlReceiver), "{:?}", g);
        }
        let ptl = nl.gates.iter().filter(|g| g.kind() == GateKind::PtlReceiver).count();
        assert_eq!(ptl, 3);
    }

    #[test]
    fn latencies() {
        let nl = build_kogge_stone(8, &AdderOptions::fabricated_chip()).unwrap();
        let l = latency(&nl, 10e9).unwrap();
        assert_eq!(l.phases, 6);
        assert_eq!(l.cycles, 1.5);
        assert!((l.picoseconds - 150.0).abs() < 1e-9);

        let nl = build_kogge_stone(8, &AdderOptions::default()).unwrap();
        let l = latency(&nl, 10e9).unwrap();
        assert_eq!((l.phases, l.cycles), (5, 1.25));
        assert!((l.picoseconds - 125.0).abs() < 1e-9);

        let nl = build_kogge_stone(64, &AdderOptions::default()).unwrap();
        let l = latency(&nl, 20e9).unwrap();
        assert_eq!((l.phases, l.cycles), (8, 2.0));
        assert!((l.picoseconds - 100.0).abs() < 1e-9);

        let logical = build_logical(8, &AdderOptions::default()).unwrap();
        assert!(latency(&logical, 10e9).is_err());
    }

    #[test]
    fn without_ptl_long_wires_are_delays() {
        let opts = AdderOptions { ptl_length_um: None, ..AdderOptions::fabricated_chip() };
        let nl = build_kogge_stone(8, &opts).unwrap();
        assert!(nl.gates.iter().all(|g| g.kind() != GateKind::PtlReceiver));
        assert!(validate(&nl, 4).is_empty());
        let long = nl.gates.iter().filter(|g| g.name.as_deref().is_some_and(|n| n.ends_with("@long"))).count();
        assert_eq!(long, 3);
    }

    #[test]
    fn cyclic_netlist_is_rejected() {
        let mut nl = build_logical(2, &AdderOptions::default()).unwrap();
        let first_andor = nl.gates.iter().position(|g| g.kind() == GateKind::AndOr).unwrap();
        let last_andor = nl.gates.iter().rposition(|g| g.kind() == GateKind::AndOr).unwrap();
        nl.gates[first_andor].inputs[0] = PinRef::new(last_andor, 0);
        let layout = StageLayout::new(2, 0, None).unwrap();
        assert!(assign_phases(&nl, &layout, &AdderOptions::default()).is_err());
    }

    #[test]
    fn nets_never_go_backwards() {
        for w in [2, 4, 8, 16, 32, 64] {
            for idle in 0..3 {
                let opts = AdderOptions { idle_phases: idle, ..AdderOptions::fabricated_chip() };
                let nl = build_kogge_stone(w, &opts).unwrap();
                for g in &nl.gates {
                    for s in &g.inputs {
                        let (p, q) = (nl.gates[s.gate].phase.unwrap(), g.phase.unwrap());
                        assert!(q == p || q == p + 1, "width {w} idle {idle}");
                    }
                }
            }
        }
    }
}
