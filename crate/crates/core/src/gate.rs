//! RQL gate kinds, their logical semantics and device budgets.
//!
//! Gates are evaluated at the logical (clock-cycle) level: the arrival-order
//! behavior of an AndOr gate within one phase window reduces to OR on the
//! first output and AND on the second. All timing lives in
//! [`crate::sim::timed`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{param, structural, Error, Result};

/// Primitive cells available to the netlist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    /// Two inputs; output 0 is the first arriving one (Or), output 1 the second (And).
    AndOr,
    /// Inputs (A, B); passes A unless B arrives in the same cycle.
    AnotB,
    /// Active-interconnect splitter, one input duplicated onto two outputs.
    Split,
    /// Active-interconnect delay cell.
    Delay,
    /// Launches a pulse onto a passive transmission line.
    PtlDriver,
    /// Active receiver at the far end of a passive transmission line.
    PtlReceiver,
    /// Primary input, driven externally.
    Source,
    /// Primary output probe.
    Sink,
}

impl GateKind {
    pub const ALL: [GateKind; 8] = [
        GateKind::AndOr,
        GateKind::AnotB,
        GateKind::Split,
        GateKind::Delay,
        GateKind::PtlDriver,
        GateKind::PtlReceiver,
        GateKind::Source,
        GateKind::Sink,
    ];

    pub fn num_inputs(self) -> usize {
        match self {
            GateKind::AndOr | GateKind::AnotB => 2,
            GateKind::Split | GateKind::Delay | GateKind::PtlDriver | GateKind::PtlReceiver => 1,
            GateKind::Sink => 1,
            GateKind::Source => 0,
        }
    }

    pub fn num_outputs(self) -> usize {
        match self {
            GateKind::AndOr | GateKind::Split => 2,
            GateKind::AnotB | GateKind::Delay | GateKind::PtlDriver | GateKind::PtlReceiver => 1,
            GateKind::Source => 1,
            GateKind::Sink => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::AndOr => "AndOr",
            GateKind::AnotB => "AnotB",
            GateKind::Split => "Split",
            GateKind::Delay => "Delay",
            GateKind::PtlDriver => "PtlDriver",
            GateKind::PtlReceiver => "PtlReceiver",
            GateKind::Source => "Source",
            GateKind::Sink => "Sink",
        }
    }

    /// Bit-parallel evaluation: every bit lane of the words is an independent
    /// input vector. Unused output slots are zero.
    ///
    /// The caller guarantees `inputs.len() == self.num_inputs()`; sources have
    /// no function of their own and evaluate to zero.
    #[inline]
    pub fn eval_lanes(self, inputs: &[u64]) -> [u64; 2] {
        match self {
            GateKind::AndOr => [inputs[0] | inputs[1], inputs[0] & inputs[1]],
            GateKind::AnotB => [inputs[0] & !inputs[1], 0],
            GateKind::Split => [inputs[0], inputs[0]],
            GateKind::Delay | GateKind::PtlDriver | GateKind::PtlReceiver => [inputs[0], 0],
            GateKind::Source | GateKind::Sink => [0, 0],
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| param(format!("unknown gate kind '{s}'")))
    }
}

/// Device budget of one gate instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub kind: GateKind,
    /// Josephson junctions in the cell.
    pub jj_count: u32,
    /// Average junction critical current, µA.
    pub ic_avg: f64,
    /// Sequential junctions on the cell's input-to-output path.
    pub seq_depth: u32,
}

impl GateSpec {
    pub fn validate(&self) -> Result<()> {
        let k = self.kind;
        if self.seq_depth > self.jj_count {
            return Err(param(format!("{k}: seq_depth {} exceeds jj_count {}", self.seq_depth, self.jj_count)));
        }
        if self.jj_count > 0 && !(self.ic_avg > 0.0 && self.ic_avg.is_finite()) {
            return Err(param(format!("{k}: ic_avg must be positive")));
        }
        if k == GateKind::PtlReceiver && self.seq_depth < 1 {
            return Err(param("PtlReceiver needs seq_depth >= 1"));
        }
        if matches!(k, GateKind::Source | GateKind::Sink) && self.jj_count != 0 {
            return Err(param(format!("{k} cells carry no junctions")));
        }
        Ok(())
    }

    /// Total critical current of the cell in µA.
    pub fn total_ic(&self) -> f64 {
        f64::from(self.jj_count) * self.ic_avg
    }
}

/// `(junction count, total critical current µA)` of a gate.
pub fn gate_budget(spec: &GateSpec) -> (u32, f64) {
    (spec.jj_count, spec.total_ic())
}

/// Evaluates one gate on logical bits.
pub fn eval_gate(kind: GateKind, inputs: &[bool]) -> Result<Vec<bool>> {
    if kind == GateKind::Source {
        return Err(structural("Source cells are driven externally"));
    }
    if inputs.len() != kind.num_inputs() {
        return Err(structural(format!("{kind} takes {} inputs, got {}", kind.num_inputs(), inputs.len())));
    }
    let words: Vec<u64> = inputs.iter().map(|&b| u64::from(b)).collect();
    let out = kind.eval_lanes(&words);
    Ok(out[..kind.num_outputs()].iter().map(|&w| w & 1 == 1).collect())
}

/// XOR built the way the hardware does it: the AndOr outputs feed an AnotB.
pub fn xor_composite(a: bool, b: bool) -> bool {
    let [or, and] = GateKind::AndOr.eval_lanes(&[u64::from(a), u64::from(b)]);
    GateKind::AnotB.eval_lanes(&[or, and])[0] & 1 == 1
}

/// Nominal delay of one sequential junction at nominal clock amplitude, ps.
pub const NOMINAL_JUNCTION_DELAY_PS: f64 = 3.0;

/// Junction delay under a relative clock bias: `d0 / bias_rel`.
pub fn junction_delay(bias_rel: f64, d0_ps: f64) -> Result<f64> {
    if !(bias_rel > 0.0) || !bias_rel.is_finite() {
        return Err(Error::Domain(format!("bias must be positive, got {bias_rel}")));
    }
    Ok(d0_ps / bias_rel)
}

/// Per-kind device parameters. Serialized as TOML, one table per gate kind:
///
/// ```toml
/// [AndOr]
/// jj_count = 10
/// ic_avg = 162.0   # µA
/// seq_depth = 4
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GateTable {
    entries: BTreeMap<GateKind, TableEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableEntry {
    jj_count: u32,
    ic_avg: f64,
    seq_depth: u32,
}

/// Average critical current of the adder core, µA.
pub const DEFAULT_IC_UA: f64 = 162.0;

impl Default for GateTable {
    /// Junction counts calibrated so the fabricated 8-bit core totals
    /// 815 junctions (see `netlist::AdderOptions::fabricated_chip`).
    fn default() -> Self {
        let ic = DEFAULT_IC_UA;
        let mut t = GateTable { entries: BTreeMap::new() };
        for (kind, jj, seq) in [
            (GateKind::AndOr, DEFAULT_ANDOR_JJ, 4),
            (GateKind::AnotB, DEFAULT_ANOTB_JJ, 4),
            (GateKind::Split, 2, 2),
            (GateKind::Delay, DEFAULT_DELAY_JJ, 4),
            (GateKind::PtlDriver, DEFAULT_PTL_DRIVER_JJ, 2),
            (GateKind::PtlReceiver, DEFAULT_PTL_RECEIVER_JJ, 2),
            (GateKind::Source, 0, 0),
            (GateKind::Sink, 0, 0),
        ] {
            t.entries.insert(kind, TableEntry { jj_count: jj, ic_avg: ic, seq_depth: seq });
        }
        t
    }
}

const DEFAULT_ANDOR_JJ: u32 = 10;
const DEFAULT_ANOTB_JJ: u32 = 8;
// two active-interconnect stages per phase-long delay element
const DEFAULT_DELAY_JJ: u32 = 4;
const DEFAULT_PTL_DRIVER_JJ: u32 = 3;
const DEFAULT_PTL_RECEIVER_JJ: u32 = 4;

impl GateTable {
    pub fn spec(&self, kind: GateKind) -> GateSpec {
        let e = self.entries[&kind];
        GateSpec { kind, jj_count: e.jj_count, ic_avg: e.ic_avg, seq_depth: e.seq_depth }
    }

    pub fn set(&mut self, spec: GateSpec) -> Result<()> {
        spec.validate()?;
        self.entries
            .insert(spec.kind, TableEntry { jj_count: spec.jj_count, ic_avg: spec.ic_avg, seq_depth: spec.seq_depth });
        Ok(())
    }

    /// Parses a TOML table. Kinds not mentioned keep their default values.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let parsed: BTreeMap<String, TableEntry> =
            toml::from_str(text).map_err(|e| Error::Config(format!("gate table: {e}")))?;
        let mut table = GateTable::default();
        for (name, e) in parsed {
            let kind: GateKind = name.parse()?;
            table.set(GateSpec { kind, jj_count: e.jj_count, ic_avg: e.ic_avg, seq_depth: e.seq_depth })?;
        }
        Ok(table)
    }

    pub fn to_toml_string(&self) -> String {
        let named: BTreeMap<&str, TableEntry> = self.entries.iter().map(|(k, e)| (k.name(), *e)).collect();
        toml::to_string(&named).expect("gate table serializes")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }
}

/// One of the two clock quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClockLine {
    I,
    Q,
}

impl fmt::Display for ClockLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClockLine::I => "I",
            ClockLine::Q => "Q",
        })
    }
}

/// Position of a global phase index on the four-phase clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhaseSlot {
    pub index: u32,
    pub cycle: u32,
    pub phase_in_cycle: u8,
    pub clock_line: ClockLine,
    /// +1 on the rising half of the line's waveform, -1 on the falling half.
    pub polarity: i8,
}

impl PhaseSlot {
    pub fn new(index: u32) -> Self {
        let phase_in_cycle = (index % 4) as u8;
        let (clock_line, polarity) = match phase_in_cycle {
            0 => (ClockLine::I, 1),
            1 => (ClockLine::Q, 1),
            2 => (ClockLine::I, -1),
            _ => (ClockLine::Q, -1),
        };
        PhaseSlot { index, cycle: index / 4, phase_in_cycle, clock_line, polarity }
    }
}

/// Clock operating point for timed simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClockConfig {
    pub frequency: f64,
    /// Clock current amplitude relative to nominal.
    pub bias_rel: f64,
    /// Extra acceptance window of passive-line receivers, as a fraction of
    /// the clock period around the phase peak.
    pub receiver_window_frac: f64,
}

pub const DEFAULT_RECEIVER_WINDOW_FRAC: f64 = 0.0417;

impl ClockConfig {
    pub fn new(frequency: f64) -> Self {
        ClockConfig { frequency, bias_rel: 1.0, receiver_window_frac: DEFAULT_RECEIVER_WINDOW_FRAC }
    }

    pub fn with_bias(mut self, bias_rel: f64) -> Self {
        self.bias_rel = bias_rel;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frequency > 0.0 && self.frequency.is_finite()) {
            return Err(param("clock frequency must be positive"));
        }
        if !(self.bias_rel > 0.0) {
            return Err(Error::Domain("clock bias must be positive".into()));
        }
        if !(0.0..=0.25).contains(&self.receiver_window_frac) {
            return Err(param("receiver_window_frac must lie in [0, 0.25]"));
        }
        Ok(())
    }

    pub fn period_ps(&self) -> f64 {
        crate::units::period_ps(self.frequency)
    }
}
