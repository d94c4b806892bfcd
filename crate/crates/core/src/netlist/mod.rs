//! Phase-assigned gate netlists and the Kogge-Stone adder generator.

mod chip;
mod fanout;
mod format;
mod kogge_stone;
mod phase;
mod stats;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{structural, Result};
use crate::gate::{GateKind, GateSpec, PhaseSlot};

pub use chip::{chip_model, ChipFractions};
pub use fanout::{legalize_fanout, DEFAULT_MAX_FANOUT};
pub use format::{read_netlist, write_netlist};
pub use kogge_stone::{build_kogge_stone, build_logical, AdderOptions};
pub use phase::{assign_phases, latency, Latency, StageLayout};
pub use stats::{netlist_stats, NetlistStats};

pub type GateId = usize;

/// One output pin of a gate. Every pin is a net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PinRef {
    pub gate: GateId,
    pub pin: u8,
}

impl PinRef {
    pub fn new(gate: GateId, pin: u8) -> Self {
        PinRef { gate, pin }
    }
}

/// Output pin of an AndOr carrying the OR of its inputs.
pub const OR_PIN: u8 = 0;
/// Output pin of an AndOr carrying the AND of its inputs.
pub const AND_PIN: u8 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub spec: GateSpec,
    /// Global phase index, once assigned.
    pub phase: Option<u32>,
    /// Logic stage of the adder this gate implements; `None` for padding cells.
    pub stage: Option<u32>,
    pub inputs: Vec<PinRef>,
    /// Index into [`Netlist::regions`].
    pub region: u16,
    pub name: Option<String>,
    /// Stripline length feeding a `PtlReceiver`, µm.
    pub ptl_length_um: Option<f64>,
    /// Bit mask of inputs that travel across the die and become dedicated
    /// long interconnect when idle phases are inserted in front of them.
    pub long_inputs: u8,
}

impl Gate {
    pub fn new(spec: GateSpec, inputs: Vec<PinRef>) -> Self {
        Gate { spec, phase: None, stage: None, inputs, region: 0, name: None, ptl_length_um: None, long_inputs: 0 }
    }

    pub fn kind(&self) -> GateKind {
        self.spec.kind
    }

    pub fn slot(&self) -> Option<PhaseSlot> {
        self.phase.map(PhaseSlot::new)
    }
}

/// A gate-level netlist. Gate ids are indices into `gates`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Netlist {
    /// Adder word width.
    pub width: u32,
    pub gates: Vec<Gate>,
    /// Source gates, `A0..A(n-1)` then `B0..B(n-1)`.
    pub inputs: Vec<GateId>,
    /// Sink gates, `S0..S(n-1)` and optionally `Cout`.
    pub outputs: Vec<GateId>,
    /// Subcircuit region names; region 0 is the adder core.
    pub regions: Vec<String>,
    /// Phases reserved for idle delay cells.
    pub idle_phases: BTreeSet<u32>,
}

pub const CORE_REGION: &str = "core";

impl Netlist {
    pub fn new(width: u32) -> Self {
        Netlist {
            width,
            gates: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            regions: vec![CORE_REGION.to_string()],
            idle_phases: BTreeSet::new(),
        }
    }

    pub fn add(&mut self, gate: Gate) -> GateId {
        self.gates.push(gate);
        self.gates.len() - 1
    }

    pub fn region_id(&mut self, name: &str) -> u16 {
        if let Some(i) = self.regions.iter().position(|r| r == name) {
            return i as u16;
        }
        self.regions.push(name.to_string());
        (self.regions.len() - 1) as u16
    }

    pub fn has_carry_out(&self) -> bool {
        self.outputs.len() as u32 > self.width
    }

    /// Number of phases spanned, `None` if any gate lacks a phase.
    pub fn total_phases(&self) -> Option<u32> {
        let mut max = 0;
        for g in &self.gates {
            max = max.max(g.phase? + 1);
        }
        Some(max)
    }

    pub fn is_phased(&self) -> bool {
        !self.gates.is_empty() && self.gates.iter().all(|g| g.phase.is_some())
    }

    /// Receivers of every output pin: `fanouts[gate][pin]` lists `(gate, input index)`.
    pub fn fanouts(&self) -> Vec<Vec<Vec<(GateId, usize)>>> {
        let mut out: Vec<Vec<Vec<(GateId, usize)>>> =
            self.gates.iter().map(|g| vec![Vec::new(); g.kind().num_outputs()]).collect();
        for (id, g) in self.gates.iter().enumerate() {
            for (k, src) in g.inputs.iter().enumerate() {
                if let Some(pins) = out.get_mut(src.gate) {
                    if let Some(list) = pins.get_mut(src.pin as usize) {
                        list.push((id, k));
                    }
                }
            }
        }
        out
    }

    /// Gates in dependency order; errors on a combinational cycle.
    pub fn topo_order(&self) -> Result<Vec<GateId>> {
        let n = self.gates.len();
        let mut indeg = vec![0usize; n];
        let mut succ: Vec<Vec<GateId>> = vec![Vec::new(); n];
        for (id, g) in self.gates.iter().enumerate() {
            for src in &g.inputs {
                if src.gate >= n {
                    return Err(structural(format!("gate {id} reads missing gate {}", src.gate)));
                }
                indeg[id] += 1;
                succ[src.gate].push(id);
            }
        }
        let mut ready: Vec<GateId> = (0..n).rev().filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(id) = ready.pop() {
            order.push(id);
            for &s in succ[id].iter().rev() {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    ready.push(s);
                }
            }
        }
        if order.len() != n {
            return Err(structural("netlist contains a cycle"));
        }
        Ok(order)
    }

    pub fn input_name(&self, idx: usize) -> String {
        let n = self.width as usize;
        if idx < n {
            format!("A{idx}")
        } else {
            format!("B{}", idx - n)
        }
    }

    pub fn output_name(&self, idx: usize) -> String {
        if idx < self.width as usize {
            format!("S{idx}")
        } else {
            "Cout".to_string()
        }
    }
}

/// A broken netlist invariant found by [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Diagnostic {
    Cycle,
    DanglingInput { gate: GateId, input: usize },
    Arity { gate: GateId, kind: GateKind, expected: usize, found: usize },
    PhaseOrder { from: GateId, to: GateId, from_phase: u32, to_phase: u32 },
    Fanout { gate: GateId, pin: u8, fanout: usize, max: usize },
    InvalidSpec { gate: GateId, message: String },
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Diagnostic::Cycle => write!(f, "netlist contains a cycle"),
            Diagnostic::DanglingInput { gate, input } => {
                write!(f, "gate {gate} input {input} reads a missing pin")
            }
            Diagnostic::Arity { gate, kind, expected, found } => {
                write!(f, "gate {gate} ({kind}) has {found} inputs, expected {expected}")
            }
            Diagnostic::PhaseOrder { from, to, from_phase, to_phase } => {
                write!(f, "net {from} (phase {from_phase}) -> {to} (phase {to_phase}) breaks phase monotonicity")
            }
            Diagnostic::Fanout { gate, pin, fanout, max } => {
                write!(f, "gate {gate} pin {pin} drives {fanout} receivers, limit {max}")
            }
            Diagnostic::InvalidSpec { gate, message } => write!(f, "gate {gate}: {message}"),
        }
    }
}

/// Checks DAG structure, arity, phase monotonicity and fanout. Returns an
/// empty list for a well-formed netlist.
pub fn validate(netlist: &Netlist, max_fanout: usize) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let n = netlist.gates.len();
    for (id, g) in netlist.gates.iter().enumerate() {
        if let Err(e) = g.spec.validate() {
            diags.push(Diagnostic::InvalidSpec { gate: id, message: e.to_string() });
        }
        let expected = g.kind().num_inputs();
        if g.inputs.len() != expected {
            diags.push(Diagnostic::Arity { gate: id, kind: g.kind(), expected, found: g.inputs.len() });
        }
        for (k, src) in g.inputs.iter().enumerate() {
            let ok = src.gate < n && (src.pin as usize) < netlist.gates[src.gate].kind().num_outputs();
            if !ok {
                diags.push(Diagnostic::DanglingInput { gate: id, input: k });
                continue;
            }
            if let (Some(p), Some(q)) = (netlist.gates[src.gate].phase, g.phase) {
                if q < p || q > p + 1 {
                    diags.push(Diagnostic::PhaseOrder { from: src.gate, to: id, from_phase: p, to_phase: q });
                }
            }
        }
    }
    if diags.iter().any(|d| matches!(d, Diagnostic::DanglingInput { .. })) {
        return diags;
    }
    if netlist.topo_order().is_err() {
        diags.push(Diagnostic::Cycle);
    }
    for (id, pins) in netlist.fanouts().iter().enumerate() {
        for (pin, recv) in pins.iter().enumerate() {
            if recv.len() > max_fanout {
                diags.push(Diagnostic::Fanout { gate: id, pin: pin as u8, fanout: recv.len(), max: max_fanout });
            }
        }
    }
    diags
}
