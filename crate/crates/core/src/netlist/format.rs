//! Line-oriented text format for netlists.
//!
//! ```text
//! rql-netlist 1
//! width 8
//! phases 6            # or "-" when unphased
//! idle 3              # idle phase indices, may be empty
//! regions core shift_register
//! inputs 0 1 2 ...
//! outputs 71 72 ...
//! gate <id> <kind> p=<phase|-> st=<stage|-> r=<region> jj=<count> ic=<µA> seq=<depth> in=<gate.pin,...|-> [long=<mask>] [ptl=<µm>] [name=<name>]
//! ```
//!
//! Gate records appear in id order. Floats are written in shortest
//! round-trip form, so write → read is lossless.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gate::{GateKind, GateSpec};

use super::{Gate, Netlist, PinRef};

const MAGIC: &str = "rql-netlist 1";

pub fn write_netlist(nl: &Netlist) -> Result<String> {
    let mut s = String::new();
    let phases = nl.total_phases().filter(|_| nl.is_phased());
    writeln!(s, "{MAGIC}").unwrap();
    writeln!(s, "width {}", nl.width).unwrap();
    writeln!(s, "phases {}", phases.map_or("-".to_string(), |p| p.to_string())).unwrap();
    writeln!(s, "idle{}", join_prefixed(nl.idle_phases.iter())).unwrap();
    for r in &nl.regions {
        check_token(r)?;
    }
    writeln!(s, "regions {}", nl.regions.join(" ")).unwrap();
    writeln!(s, "inputs{}", join_prefixed(nl.inputs.iter())).unwrap();
    writeln!(s, "outputs{}", join_prefixed(nl.outputs.iter())).unwrap();
    for (id, g) in nl.gates.iter().enumerate() {
        let opt = |v: Option<u32>| v.map_or("-".to_string(), |x| x.to_string());
        let inputs = if g.inputs.is_empty() {
            "-".to_string()
        } else {
            g.inputs.iter().map(|p| format!("{}.{}", p.gate, p.pin)).collect::<Vec<_>>().join(",")
        };
        write!(
            s,
            "gate {id} {} p={} st={} r={} jj={} ic={:?} seq={} in={inputs}",
            g.kind(),
            opt(g.phase),
            opt(g.stage),
            g.region,
            g.spec.jj_count,
            g.spec.ic_avg,
            g.spec.seq_depth,
        )
        .unwrap();
        if g.long_inputs != 0 {
            write!(s, " long={}", g.long_inputs).unwrap();
        }
        if let Some(len) = g.ptl_length_um {
            write!(s, " ptl={len:?}").unwrap();
        }
        if let Some(name) = &g.name {
            check_token(name)?;
            write!(s, " name={name}").unwrap();
        }
        s.push('\n');
    }
    Ok(s)
}

fn join_prefixed<T: ToString>(items: impl Iterator<Item = T>) -> String {
    items.map(|i| format!(" {}", i.to_string())).collect()
}

fn check_token(t: &str) -> Result<()> {
    if t.is_empty() || t.chars().any(char::is_whitespace) {
        return Err(Error::Parameter(format!("name '{t}' cannot be written: empty or contains whitespace")));
    }
    Ok(())
}

pub fn read_netlist(text: &str) -> Result<Netlist> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let perr = |line: usize, message: String| Error::Parse { line: line + 1, message };

    let (ln, first) = lines.next().ok_or_else(|| perr(0, "empty netlist".into()))?;
    if first.trim() != MAGIC {
        return Err(perr(ln, format!("expected '{MAGIC}'")));
    }
    let mut nl = Netlist::new(0);
    nl.regions.clear();
    let mut declared_phases: Option<Option<u32>> = None;
    for (ln, line) in lines {
        let mut words = line.split_whitespace();
        let key = words.next().unwrap();
        let rest: Vec<&str> = words.collect();
        let num = |w: &str| w.parse::<usize>().map_err(|_| perr(ln, format!("bad number '{w}'")));
        match key {
            "width" => nl.width = num(rest.first().copied().unwrap_or(""))? as u32,
            "phases" => {
                let w = rest.first().copied().unwrap_or("");
                declared_phases = Some(if w == "-" { None } else { Some(num(w)? as u32) });
            }
            "idle" => nl.idle_phases = rest.iter().map(|w| num(w).map(|v| v as u32)).collect::<Result<_>>()?,
            "regions" => nl.regions = rest.iter().map(|r| r.to_string()).collect(),
            "inputs" => nl.inputs = rest.iter().map(|w| num(w)).collect::<Result<_>>()?,
            "outputs" => nl.outputs = rest.iter().map(|w| num(w)).collect::<Result<_>>()?,
            "gate" => {
                let g = parse_gate(&rest).map_err(|m| perr(ln, m))?;
                let id = num(rest[0])?;
                if id != nl.gates.len() {
                    return Err(perr(ln, format!("gate id {id} out of order")));
                }
                nl.gates.push(g);
            }
            other => return Err(perr(ln, format!("unknown record '{other}'"))),
        }
    }
    if nl.regions.is_empty() {
        return Err(perr(0, "missing regions record".into()));
    }
    if let Some(declared) = declared_phases {
        let actual = nl.total_phases().filter(|_| nl.is_phased());
        if declared != actual {
            return Err(perr(0, format!("header declares {declared:?} phases, gates span {actual:?}")));
        }
    }
    let n = nl.gates.len();
    if nl.inputs.iter().chain(&nl.outputs).any(|&g| g >= n) {
        return Err(perr(0, "input/output list names a missing gate".into()));
    }
    Ok(nl)
}

fn parse_gate(words: &[&str]) -> std::result::Result<Gate, String> {
    if words.len() < 2 {
        return Err("gate record needs id and kind".into());
    }
    let kind: GateKind = words[1].parse().map_err(|e: Error| e.to_string())?;
    let mut spec = GateSpec { kind, jj_count: 0, ic_avg: 0.0, seq_depth: 0 };
    let mut g = Gate::new(spec, Vec::new());
    let opt_u32 = |v: &str| -> std::result::Result<Option<u32>, String> {
        if v == "-" {
            Ok(None)
        } else {
            v.parse().map(Some).map_err(|_| format!("bad value '{v}'"))
        }
    };
    let bad = |v: &str| format!("bad value '{v}'");
    for w in &words[2..] {
        let (k, v) = w.split_once('=').ok_or_else(|| format!("expected key=value, got '{w}'"))?;
        match k {
            "p" => g.phase = opt_u32(v)?,
            "st" => g.stage = opt_u32(v)?,
            "r" => g.region = v.parse().map_err(|_| bad(v))?,
            "jj" => spec.jj_count = v.parse().map_err(|_| bad(v))?,
            "ic" => spec.ic_avg = v.parse().map_err(|_| bad(v))?,
            "seq" => spec.seq_depth = v.parse().map_err(|_| bad(v))?,
            "long" => g.long_inputs = v.parse().map_err(|_| bad(v))?,
            "ptl" => g.ptl_length_um = Some(v.parse().map_err(|_| bad(v))?),
            "name" => g.name = Some(v.to_string()),
            "in" if v == "-" => {}
            "in" => {
                for item in v.split(',') {
                    let (gate, pin) = item.split_once('.').ok_or_else(|| bad(item))?;
                    g.inputs
                        .push(PinRef::new(gate.parse().map_err(|_| bad(item))?, pin.parse().map_err(|_| bad(item))?));
                }
            }
            _ => return Err(format!("unknown field '{k}'")),
        }
    }
    g.spec = spec;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{build_kogge_stone, build_logical, chip_model, AdderOptions, ChipFractions};

    #[test]
    fn round_trip_is_lossless() {
        let nl = build_kogge_stone(8, &AdderOptions::fabricated_chip()).unwrap();
        let text = write_netlist(&nl).unwrap();
        assert_eq!(read_netlist(&text).unwrap(), nl);

        let logical = build_logical(4, &AdderOptions::default()).unwrap();
        assert_eq!(read_netlist(&write_netlist(&logical).unwrap()).unwrap(), logical);

        let chip = chip_model(&nl, &ChipFractions::default()).unwrap();
        assert_eq!(read_netlist(&write_netlist(&chip).unwrap()).unwrap(), chip);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_netlist("").is_err());
        assert!(read_netlist("hello").is_err());
        let text = "rql-netlist 1\nwidth 2\nregions core\ngate 1 Source p=0 st=0 r=0 jj=0 ic=162.0 seq=0 in=-\n";
        assert!(matches!(read_netlist(text), Err(Error::Parse { line: 4, .. })));
        let text = "rql-netlist 1\nwidth 2\nregions core\ngate 0 Blob p=0\n";
        assert!(read_netlist(text).is_err());
    }
}
