use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::gate::{ClockLine, GateKind, PhaseSlot};

use super::Netlist;

/// Device totals of a netlist. Currents in µA.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetlistStats {
    pub jj_total: u64,
    pub ic_total_ua: f64,
    /// `None` for a netlist without junctions.
    pub ic_avg_ua: Option<f64>,
    pub line_ic_ua: BTreeMap<ClockLine, f64>,
    /// Critical current of gates without a phase.
    pub unphased_ic_ua: f64,
    pub region_ic_ua: BTreeMap<String, f64>,
    pub region_fraction: BTreeMap<String, f64>,
    pub region_jj: BTreeMap<String, u64>,
    pub gate_counts: BTreeMap<GateKind, usize>,
}

pub fn netlist_stats(netlist: &Netlist) -> NetlistStats {
    let mut s = NetlistStats {
        jj_total: 0,
        ic_total_ua: 0.0,
        ic_avg_ua: None,
        line_ic_ua: [(ClockLine::I, 0.0), (ClockLine::Q, 0.0)].into_iter().collect(),
        unphased_ic_ua: 0.0,
        region_ic_ua: netlist.regions.iter().map(|r| (r.clone(), 0.0)).collect(),
        region_fraction: BTreeMap::new(),
        region_jj: netlist.regions.iter().map(|r| (r.clone(), 0)).collect(),
        gate_counts: BTreeMap::new(),
    };
    for g in &netlist.gates {
        let ic = g.spec.total_ic();
        s.jj_total += u64::from(g.spec.jj_count);
        s.ic_total_ua += ic;
        match g.phase {
            Some(p) => *s.line_ic_ua.get_mut(&PhaseSlot::new(p).clock_line).unwrap() += ic,
            None => s.unphased_ic_ua += ic,
        }
        let region = &netlist.regions[g.region as usize];
        *s.region_ic_ua.get_mut(region).unwrap() += ic;
        *s.region_jj.get_mut(region).unwrap() += u64::from(g.spec.jj_count);
        *s.gate_counts.entry(g.kind()).or_default() += 1;
    }
    if s.jj_total > 0 {
        s.ic_avg_ua = Some(s.ic_total_ua / s.jj_total as f64);
        s.region_fraction = s.region_ic_ua.iter().map(|(r, ic)| (r.clone(), ic / s.ic_total_ua)).collect();
    } else {
        s.region_fraction = s.region_ic_ua.keys().map(|r| (r.clone(), 0.0)).collect();
    }
    s
}
