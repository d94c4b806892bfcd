use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, structural, Result};
use crate::gate::{eval_gate, GateKind};
use crate::netlist::{GateId, Netlist};

/// One addend pair `(A, B)`, applied in one clock cycle.
pub type Vector = (u64, u64);

/// Per-vector switching events of every gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDetail {
    /// `events[vector][gate]`: output pins of the gate asserting a one.
    pub events: Vec<Vec<u8>>,
}

/// Result of a logical or timed simulation run.
///
/// Vector `t` enters at cycle `t`. A gate on phase `p` fires in cycle
/// `t + p / 4`, and the output word is latched in cycle `t + latency_cycles`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub width: u32,
    pub total_phases: u32,
    /// `ceil(total_phases / 4)`.
    pub latency_cycles: u32,
    pub vectors: Vec<Vector>,
    /// Output word per input vector: bit `i` is `S_i`, bit `width` is `Cout`.
    pub outputs: Vec<u128>,
    /// Events per clock cycle, over `vectors.len() + latency_cycles` cycles.
    pub cycle_events: Vec<u64>,
    /// Events per gate over the whole run.
    pub gate_events: Vec<u64>,
    pub detail: Option<TraceDetail>,
    /// Arrival time of every gate within its phase window, ps (timed mode only).
    pub arrivals_ps: Option<Vec<f64>>,
}

impl SimTrace {
    pub fn cycles(&self) -> usize {
        self.vectors.len() + self.latency_cycles as usize
    }

    /// Word latched at `cycle`, `None` while the pipeline is still filling.
    pub fn output_at_cycle(&self, cycle: usize) -> Option<u128> {
        cycle.checked_sub(self.latency_cycles as usize).and_then(|t| self.outputs.get(t).copied())
    }

    pub fn total_events(&self) -> u64 {
        self.gate_events.iter().sum()
    }
}

/// Switching events summarized per gate and per gate kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Activity {
    pub per_gate: Vec<u64>,
    pub per_kind: std::collections::BTreeMap<GateKind, u64>,
    pub total: u64,
    pub cycles: usize,
}

pub fn switching_activity(netlist: &Netlist, trace: &SimTrace) -> Activity {
    let mut per_kind = std::collections::BTreeMap::new();
    for (g, &n) in netlist.gates.iter().zip(&trace.gate_events) {
        *per_kind.entry(g.kind()).or_insert(0) += n;
    }
    Activity { per_gate: trace.gate_events.clone(), per_kind, total: trace.total_events(), cycles: trace.vectors.len() }
}

fn output_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

fn check_inputs(netlist: &Netlist, vectors: &[Vector]) -> Result<()> {
    let w = netlist.width;
    if netlist.inputs.len() != 2 * w as usize {
        return Err(structural(format!(
            "netlist has {} inputs, a {w}-bit adder needs {}",
            netlist.inputs.len(),
            2 * w
        )));
    }
    let mask = output_mask(w);
    if let Some((t, &(a, b))) = vectors.iter().enumerate().find(|(_, &(a, b))| a & !mask != 0 || b & !mask != 0) {
        return Err(param(format!("vector {t} ({a:#x}, {b:#x}) exceeds the {w}-bit input width")));
    }
    Ok(())
}

/// Cycle-accurate logical simulation of a netlist, 64 vectors per pass.
pub fn simulate_logic(netlist: &Netlist, vectors: &[Vector]) -> Result<SimTrace> {
    run(netlist, vectors, false)
}

/// As [`simulate_logic`], also recording per-vector events of every gate.
pub fn simulate_logic_detailed(netlist: &Netlist, vectors: &[Vector]) -> Result<SimTrace> {
    run(netlist, vectors, true)
}

fn run(netlist: &Netlist, vectors: &[Vector], detailed: bool) -> Result<SimTrace> {
    check_inputs(netlist, vectors)?;
    let order = netlist.topo_order()?;
    let w = netlist.width as usize;
    let total_phases = if netlist.is_phased() { netlist.total_phases().unwrap_or(0) } else { 0 };
    let latency_cycles = total_phases.div_ceil(4);
    let offsets: Vec<usize> = netlist.gates.iter().map(|g| (g.phase.unwrap_or(0) / 4) as usize).collect();
    let mut source_bit = vec![None; netlist.gates.len()];
    for (k, &id) in netlist.inputs.iter().enumerate() {
        source_bit[id] = Some(k);
    }

    let n_gates = netlist.gates.len();
    let mut outputs = Vec::with_capacity(vectors.len());
    let mut cycle_events = vec![0u64; vectors.len() + latency_cycles as usize + 1];
    let mut gate_events = vec![0u64; n_gates];
    let mut detail = detailed.then(|| vec![vec![0u8; n_gates]; vectors.len()]);
    let mut vals = vec![[0u64; 2]; n_gates];
    let mut ins: Vec<u64> = Vec::with_capacity(2);

    for (block, chunk) in vectors.chunks(64).enumerate() {
        let base = block * 64;
        let lanes = if chunk.len() == 64 { u64::MAX } else { (1u64 << chunk.len()) - 1 };
        let mut a_lanes = vec![0u64; w];
        let mut b_lanes = vec![0u64; w];
        for (lane, &(a, b)) in chunk.iter().enumerate() {
            for i in 0..w {
                a_lanes[i] |= (a >> i & 1) << lane;
                b_lanes[i] |= (b >> i & 1) << lane;
            }
        }
        for &id in &order {
            let g = &netlist.gates[id];
            let out = match g.kind() {
                GateKind::Source => {
                    let v = match source_bit[id] {
                        Some(k) if k < w => a_lanes[k],
                        Some(k) => b_lanes[k - w],
                        None => 0,
                    };
                    [v, 0]
                }
                GateKind::Sink => [vals[g.inputs[0].gate][g.inputs[0].pin as usize], 0],
                kind => {
                    ins.clear();
                    ins.extend(g.inputs.iter().map(|p| vals[p.gate][p.pin as usize]));
                    kind.eval_lanes(&ins)
                }
            };
            vals[id] = out;
            for &word in &out[..g.kind().num_outputs()] {
                let mut m = word & lanes;
                gate_events[id] += u64::from(m.count_ones());
                while m != 0 {
                    let lane = m.trailing_zeros() as usize;
                    cycle_events[base + lane + offsets[id]] += 1;
                    if let Some(d) = detail.as_mut() {
                        d[base + lane][id] += 1;
                    }
                    m &= m - 1;
                }
            }
        }
        for lane in 0..chunk.len() {
            let mut word = 0u128;
            for (bit, &sink) in netlist.outputs.iter().enumerate() {
                word |= u128::from((vals[sink][0] >> lane & 1) as u8) << bit;
            }
            outputs.push(word);
        }
    }
    cycle_events.truncate(vectors.len() + latency_cycles as usize);

    Ok(SimTrace {
        width: netlist.width,
        total_phases,
        latency_cycles,
        vectors: vectors.to_vec(),
        outputs,
        cycle_events,
        gate_events,
        detail: detail.map(|events| TraceDetail { events }),
        arrivals_ps: None,
    })
}

/// Direct one-vector evaluation of the DAG with scalar gate semantics.
pub fn evaluate_combinational(netlist: &Netlist, a: u64, b: u64) -> Result<u128> {
    check_inputs(netlist, &[(a, b)])?;
    let w = netlist.width as usize;
    let mut vals: Vec<Vec<bool>> = vec![Vec::new(); netlist.gates.len()];
    for (k, &id) in netlist.inputs.iter().enumerate() {
        let bit = if k < w { a >> k & 1 } else { b >> (k - w) & 1 };
        vals[id] = vec![bit == 1];
    }
    for id in netlist.topo_order()? {
        let g = &netlist.gates[id];
        match g.kind() {
            GateKind::Source => {
                if vals[id].is_empty() {
                    vals[id] = vec![false];
                }
            }
            GateKind::Sink => vals[id] = vec![vals[g.inputs[0].gate][g.inputs[0].pin as usize]],
            kind => {
                let ins: Vec<bool> = g.inputs.iter().map(|p| vals[p.gate][p.pin as usize]).collect();
                vals[id] = eval_gate(kind, &ins)?;
            }
        }
    }
    Ok(netlist.outputs.iter().enumerate().map(|(bit, &s)| u128::from(vals[s][0]) << bit).sum())
}

/// Integer-addition oracle: low `width` bits of `a + b`, plus the carry out
/// at bit `width` when `carry_out` is set.
pub fn expected_output(width: u32, carry_out: bool, a: u64, b: u64) -> u128 {
    let sum = u128::from(a) + u128::from(b);
    let bits = if carry_out { width + 1 } else { width };
    sum & ((1u128 << bits) - 1)
}

/// Outcome of comparing a trace with the addition oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditionCheck {
    pub total: usize,
    pub passed: usize,
    /// `(vector index, vector, simulated, expected)` of the first mismatch.
    pub first_failure: Option<(usize, Vector, u128, u128)>,
}

impl AdditionCheck {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

pub fn check_addition(netlist: &Netlist, trace: &SimTrace) -> AdditionCheck {
    let cout = netlist.has_carry_out();
    let mut passed = 0;
    let mut first_failure = None;
    for (t, (&v, &got)) in trace.vectors.iter().zip(&trace.outputs).enumerate() {
        let want = expected_output(netlist.width, cout, v.0, v.1);
        if got == want {
            passed += 1;
        } else if first_failure.is_none() {
            first_failure = Some((t, v, got, want));
        }
    }
    AdditionCheck { total: trace.vectors.len(), passed, first_failure }
}

/// Uniform random addend pairs from a seeded ChaCha stream.
pub fn random_vectors(width: u32, count: usize, seed: u64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = output_mask(width);
    (0..count).map(|_| (rng.gen::<u64>() & mask, rng.gen::<u64>() & mask)).collect()
}

/// All `4^width` addend pairs, `B` varying fastest.
pub fn exhaustive_vectors(width: u32) -> Result<Vec<Vector>> {
    if width > 12 {
        return Err(param(format!("exhaustive enumeration of {width}-bit pairs is too large")));
    }
    let n = 1u64 << width;
    Ok((0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect())
}

/// Gates that transitively feed `gate`, the gate itself included.
pub fn fanin_cone(netlist: &Netlist, gate: GateId) -> Vec<bool> {
    let mut seen = vec![false; netlist.gates.len()];
    let mut stack = vec![gate];
    while let Some(g) = stack.pop() {
        if std::mem::replace(&mut seen[g], true) {
            continue;
        }
        stack.extend(netlist.gates[g].inputs.iter().map(|p| p.gate));
    }
    seen
}
