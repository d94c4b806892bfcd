//! Text formats for simulation inputs and traces.
//!
//! Vector files hold one `A,B` pair per line in hex (`0x` optional).
//! Serial programs are strings of `0`/`1`; whitespace is ignored. In both,
//! `#` starts a comment.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::logic::{AdditionCheck, SimTrace, Vector};

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_hex(field: &str, line: usize) -> Result<u64> {
    let f = field.trim();
    let digits = f.strip_prefix("0x").or_else(|| f.strip_prefix("0X")).unwrap_or(f);
    u64::from_str_radix(digits, 16).map_err(|e| Error::Parse { line, message: format!("bad hex value '{f}': {e}") })
}

pub fn read_vectors(text: &str) -> Result<Vec<Vector>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(Error::Parse { line: i + 1, message: format!("expected 'A,B', got '{line}'") });
        }
        out.push((parse_hex(fields[0], i + 1)?, parse_hex(fields[1], i + 1)?));
    }
    Ok(out)
}

pub fn write_vectors(vectors: &[Vector]) -> String {
    vectors.iter().map(|(a, b)| format!("{a:#x},{b:#x}\n")).collect()
}

pub fn read_serial(text: &str) -> Result<Vec<bool>> {
    let mut bits = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        for c in strip_comment(raw).chars().filter(|c| !c.is_whitespace()) {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(Error::Parse { line: i + 1, message: format!("unexpected '{c}' in bit string") }),
            }
        }
    }
    Ok(bits)
}

/// `cycle,outputs,events`; `outputs` is empty while the pipeline fills.
pub fn trace_csv(trace: &SimTrace) -> String {
    let mut s = String::from("cycle,outputs,events\n");
    for c in 0..trace.cycles() {
        let out = trace.output_at_cycle(c).map(|o| format!("{o:#x}")).unwrap_or_default();
        let _ = writeln!(s, "{c},{out},{}", trace.cycle_events.get(c).copied().unwrap_or(0));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub width: u32,
    pub vectors: usize,
    pub cycles: usize,
    pub total_phases: u32,
    pub latency_cycles: u32,
    pub total_events: u64,
    pub events_per_cycle: f64,
    pub timed: bool,
    pub check: Option<AdditionCheck>,
}

pub fn trace_summary(trace: &SimTrace, check: Option<&AdditionCheck>) -> TraceSummary {
    let total = trace.total_events();
    TraceSummary {
        width: trace.width,
        vectors: trace.vectors.len(),
        cycles: trace.cycles(),
        total_phases: trace.total_phases,
        latency_cycles: trace.latency_cycles,
        total_events: total,
        events_per_cycle: if trace.vectors.is_empty() { 0.0 } else { total as f64 / trace.vectors.len() as f64 },
        timed: trace.arrivals_ps.is_some(),
        check: check.cloned(),
    }
}
