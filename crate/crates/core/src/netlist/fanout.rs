//! Splitter-tree insertion for pins that exceed the fanout limit.

use crate::error::{param, Result};
use crate::gate::{GateKind, GateTable};

use super::{Gate, GateId, Netlist, PinRef};

pub const DEFAULT_MAX_FANOUT: usize = 4;

/// Rewrites every pin that drives more than `max_fanout` receivers through a
/// balanced minimum-depth tree of `Split` cells. Receivers keep their order:
/// the lowest `(gate, input)` pairs stay on the shallowest branches.
///
/// On a phased netlist each splitter takes the earliest phase among the
/// receivers it feeds.
pub fn legalize_fanout(netlist: &Netlist, max_fanout: usize, table: &GateTable) -> Result<Netlist> {
    if max_fanout < 2 {
        return Err(param(format!("max_fanout must be at least 2, got {max_fanout}")));
    }
    let mut out = netlist.clone();
    let fanouts = netlist.fanouts();
    for (gate, pins) in fanouts.into_iter().enumerate() {
        for (pin, receivers) in pins.into_iter().enumerate() {
            if receivers.len() > max_fanout {
                let depth = required_depth(receivers.len(), max_fanout);
                let root = PinRef::new(gate, pin as u8);
                attach(&mut out, root, &receivers, depth, max_fanout, table);
            }
        }
    }
    Ok(out)
}

/// Leaves reachable from one pin through `depth` levels of splitters.
fn capacity(depth: u32, max_fanout: usize) -> usize {
    let mut c = max_fanout;
    for _ in 0..depth {
        c = c.saturating_mul(2 * max_fanout);
    }
    c
}

fn required_depth(receivers: usize, max_fanout: usize) -> u32 {
    let mut d = 0;
    while capacity(d, max_fanout) < receivers {
        d += 1;
    }
    d
}

fn attach(
    nl: &mut Netlist,
    pin: PinRef,
    receivers: &[(GateId, usize)],
    depth: u32,
    max_fanout: usize,
    table: &GateTable,
) {
    if receivers.len() <= max_fanout || depth == 0 {
        for &(g, k) in receivers {
            nl.gates[g].inputs[k] = pin;
        }
        return;
    }
    let sub = capacity(depth - 1, max_fanout);
    // fewest splitters that still fit, the rest connect directly
    let splits = (receivers.len() - max_fanout).div_ceil(2 * sub - 1);
    let direct = max_fanout - splits;
    for &(g, k) in &receivers[..direct] {
        nl.gates[g].inputs[k] = pin;
    }
    let rest = &receivers[direct..];
    let branches = 2 * splits;
    let bound = |b: usize| rest.len() * b / branches;
    for s in 0..splits {
        let own = &rest[bound(2 * s)..bound(2 * s + 2)];
        let mut cell = Gate::new(table.spec(GateKind::Split), vec![pin]);
        cell.phase = earliest_phase(nl, own).or(nl.gates[pin.gate].phase);
        cell.region = nl.gates[pin.gate].region;
        cell.name = Some(format!("split_{}_{}_{}", pin.gate, pin.pin, nl.gates.len()));
        let id = nl.add(cell);
        for out_pin in 0..2 {
            let b = 2 * s + out_pin;
            let chunk = &rest[bound(b)..bound(b + 1)];
            attach(nl, PinRef::new(id, out_pin as u8), chunk, depth - 1, max_fanout, table);
        }
    }
}

fn earliest_phase(nl: &Netlist, receivers: &[(GateId, usize)]) -> Option<u32> {
    receivers.iter().filter_map(|&(g, _)| nl.gates[g].phase).min()
}
