//! Radix-2 Kogge-Stone carry look-ahead adder built from AndOr/AnotB cells.
//!
//! Stage 0 forms generate/propagate per bit (`G = A·B` on the And pin,
//! `P = A+B` on the Or pin of one AndOr). Stages `1..=log2(n)` are the prefix
//! columns: column `c` combines node `i` with node `j = i - 2^c` as
//! `G' = G_i + P_i·G_j`, `P' = P_i·P_j`. The last stage XORs the partial sum
//! `A⊕B` (an AnotB in stage 1) with the carry into each bit.
//!
//! Carries are indexed as "carry into bit i": `C_0 = 0`, `C_i = G[i-1:0]`.
//! Only prefix nodes that feed a needed carry are emitted, and `P'` is
//! dropped once a node's group reaches bit 0.

use crate::error::{param, Result};
use crate::gate::{GateKind, GateTable};

use super::{
    assign_phases, legalize_fanout, Gate, GateId, Netlist, PinRef, StageLayout, AND_PIN, DEFAULT_MAX_FANOUT, OR_PIN,
};

/// Generator parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AdderOptions {
    /// Emit a carry-out sink after `S0..S(n-1)`.
    pub carry_out: bool,
    /// Number of idle phases of pure delay cells.
    pub idle_phases: u32,
    /// Logic stage the idle phases precede; defaults to the last CLA column.
    pub idle_before_stage: Option<u32>,
    /// When set, long lateral wires that span idle phases become
    /// driver/receiver pairs on a passive line of this length (µm).
    pub ptl_length_um: Option<f64>,
    pub max_fanout: usize,
    pub gate_table: GateTable,
}

impl Default for AdderOptions {
    fn default() -> Self {
        AdderOptions {
            carry_out: true,
            idle_phases: 0,
            idle_before_stage: None,
            ptl_length_um: None,
            max_fanout: DEFAULT_MAX_FANOUT,
            gate_table: GateTable::default(),
        }
    }
}

/// Stripline length used for the chip configuration's long interconnects, µm.
pub const DEFAULT_PTL_LENGTH_UM: f64 = 1000.0;

impl AdderOptions {
    /// The fabricated configuration: eight sum outputs, one idle phase before
    /// the last CLA column, long interconnects on passive striplines.
    pub fn fabricated_chip() -> Self {
        AdderOptions {
            carry_out: false,
            idle_phases: 1,
            ptl_length_um: Some(DEFAULT_PTL_LENGTH_UM),
            ..AdderOptions::default()
        }
    }

    pub fn layout(&self, n_bits: u32) -> Result<StageLayout> {
        StageLayout::new(n_bits, self.idle_phases, self.idle_before_stage)
    }
}

pub(crate) fn log2_width(n_bits: u32) -> Result<u32> {
    if !(2..=64).contains(&n_bits) || !n_bits.is_power_of_two() {
        return Err(param(format!("adder width must be a power of two in 2..=64, got {n_bits}")));
    }
    Ok(n_bits.trailing_zeros())
}

/// Generates, phases and fanout-legalizes an `n_bits` adder.
pub fn build_kogge_stone(n_bits: u32, options: &AdderOptions) -> Result<Netlist> {
    let logical = build_logical(n_bits, options)?;
    let layout = options.layout(n_bits)?;
    let phased = assign_phases(&logical, &layout, options)?;
    legalize_fanout(&phased, options.max_fanout, &options.gate_table)
}

/// Builds the unphased adder: logic gates tagged with their stage, no padding.
pub fn build_logical(n_bits: u32, options: &AdderOptions) -> Result<Netlist> {
    let k = log2_width(n_bits)? as usize;
    let n = n_bits as usize;
    let table = &options.gate_table;
    let xor_stage = (k + 1) as u32;
    let mut nl = Netlist::new(n_bits);

    let add = |nl: &mut Netlist, kind: GateKind, inputs: Vec<PinRef>, stage: u32, name: String| -> GateId {
        let mut g = Gate::new(table.spec(kind), inputs);
        g.stage = Some(stage);
        g.name = Some(name);
        nl.add(g)
    };

    for word in ["A", "B"] {
        for i in 0..n {
            let id = add(&mut nl, GateKind::Source, vec![], 0, format!("{word}{i}"));
            nl.inputs.push(id);
        }
    }

    // Demand analysis: level L holds the group signals after L prefix columns.
    let n_carries = if options.carry_out { n } else { n - 1 };
    let mut need_g = vec![vec![false; n]; k + 1];
    let mut need_p = vec![vec![false; n]; k + 1];
    need_g[k][..n_carries].fill(true);
    for level in (1..=k).rev() {
        let dist = 1usize << (level - 1);
        for i in 0..n {
            if i >= dist {
                let j = i - dist;
                if need_g[level][i] {
                    need_g[level - 1][i] = true;
                    need_p[level - 1][i] = true;
                    need_g[level - 1][j] = true;
                }
                if need_p[level][i] {
                    need_p[level - 1][i] = true;
                    need_p[level - 1][j] = true;
                }
            } else if need_g[level][i] {
                need_g[level - 1][i] = true;
            }
        }
    }

    // Stage 0: one AndOr per bit, Or = P, And = G.
    let mut g_sig: Vec<Option<PinRef>> = Vec::with_capacity(n);
    let mut p_sig: Vec<Option<PinRef>> = Vec::with_capacity(n);
    for i in 0..n {
        let a = PinRef::new(nl.inputs[i], 0);
        let b = PinRef::new(nl.inputs[n + i], 0);
        let id = add(&mut nl, GateKind::AndOr, vec![a, b], 0, format!("gp{i}"));
        p_sig.push(Some(PinRef::new(id, OR_PIN)));
        g_sig.push(Some(PinRef::new(id, AND_PIN)));
    }

    // Partial sums run in parallel with the first CLA column.
    let partial: Vec<PinRef> = (0..n)
        .map(|i| {
            let inputs = vec![p_sig[i].unwrap(), g_sig[i].unwrap()];
            PinRef::new(add(&mut nl, GateKind::AnotB, inputs, 1, format!("ps{i}")), 0)
        })
        .collect();

    for level in 1..=k {
        let dist = 1usize << (level - 1);
        let stage = level as u32;
        let mut next_g = g_sig.clone();
        let mut next_p = vec![None; n];
        for i in dist..n {
            let j = i - dist;
            if need_g[level][i] {
                let (gi, pi, gj) = (g_sig[i].unwrap(), p_sig[i].unwrap(), g_sig[j].unwrap());
                let t = add(&mut nl, GateKind::AndOr, vec![pi, gj], stage, format!("c{level}_{i}_t"));
                nl.gates[t].long_inputs = 0b10;
                let g =
                    add(&mut nl, GateKind::AndOr, vec![gi, PinRef::new(t, AND_PIN)], stage, format!("c{level}_{i}_g"));
                next_g[i] = Some(PinRef::new(g, OR_PIN));
            } else {
                next_g[i] = None;
            }
            if need_p[level][i] {
                let (pi, pj) = (p_sig[i].unwrap(), p_sig[j].unwrap());
                let p = add(&mut nl, GateKind::AndOr, vec![pi, pj], stage, format!("c{level}_{i}_p"));
                nl.gates[p].long_inputs = 0b10;
                next_p[i] = Some(PinRef::new(p, AND_PIN));
            }
        }
        for i in 0..dist.min(n) {
            if !need_g[level][i] {
                next_g[i] = None;
            }
        }
        g_sig = next_g;
        p_sig = next_p;
    }

    // Sum column: S_i = ps_i ⊕ C_i via AndOr -> AnotB; S_0 has no carry in.
    let mut sum_pins = vec![partial[0]];
    for (i, &ps) in partial.iter().enumerate().skip(1) {
        let carry = g_sig[i - 1].expect("carry demanded");
        let x = add(&mut nl, GateKind::AndOr, vec![ps, carry], xor_stage, format!("x{i}_ao"));
        let s = add(
            &mut nl,
            GateKind::AnotB,
            vec![PinRef::new(x, OR_PIN), PinRef::new(x, AND_PIN)],
            xor_stage,
            format!("x{i}"),
        );
        sum_pins.push(PinRef::new(s, 0));
    }
    if options.carry_out {
        sum_pins.push(g_sig[n - 1].expect("carry-out demanded"));
    }
    for (i, pin) in sum_pins.into_iter().enumerate() {
        let name = if i < n { format!("S{i}") } else { "Cout".to_string() };
        let id = add(&mut nl, GateKind::Sink, vec![pin], xor_stage, name);
        nl.outputs.push(id);
    }
    Ok(nl)
}
