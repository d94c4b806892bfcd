use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use rqlkit::gate::{ClockConfig, ClockLine, GateTable, NOMINAL_JUNCTION_DELAY_PS};
use rqlkit::netlist::{
    build_kogge_stone, chip_model, latency, netlist_stats, read_netlist, validate as validate_netlist, write_netlist,
    AdderOptions, ChipFractions, Netlist,
};
use rqlkit::power::{
    activity_report, clock_budget, dynamic_power, netlist_power, rsfq_static_equivalent, ScalingScenario,
    CRYOCOOLER_W_PER_W, RSFQ_BIAS_CURRENT, RSFQ_BUS_VOLTAGE,
};
use rqlkit::rf::{
    cascade_sparams, design_csv, design_transformer, design_transformer_exact, measure_ssb, parse_spectrum_csv,
    return_loss_band, sideband_chain, sparams_csv, LineMeasurement, MeasurementDescriptor, Synthesis, TransformerSpec,
};
use rqlkit::sim::io::{read_serial, read_vectors, trace_csv, trace_summary};
use rqlkit::sim::{
    check_addition, chopped_program, exhaustive_vectors, frequency_grid, margin_sweep, random_vectors,
    shift_register_harness, simulate_logic, simulate_timed, Lfsr16, MarginConfig, Vector,
};
use rqlkit::units::{format_watts, parse_frequency, watts_to_dbm};

use crate::output::{read_text, CmdResult, Failure, Run};
use crate::{
    ClocknetArgs, GenArgs, Global, MarginsArgs, NetlistArgs, PowerArgs, SidebandArgs, SimArgs, ValidateArgs, VectorArgs,
};

fn freq(text: &str) -> CmdResult<f64> {
    Ok(parse_frequency(text)?)
}

/// `LO:HI` with an optional unit on either side; a bare `LO` takes `HI`'s unit.
fn freq_range(text: &str) -> CmdResult<(f64, f64)> {
    let (lo, hi) = text.split_once(':').ok_or_else(|| Failure::usage(format!("expected LO:HI, got '{text}'")))?;
    let unit: String = hi.trim().chars().skip_while(|c| !c.is_ascii_alphabetic()).collect();
    let lo = if lo.chars().any(|c| c.is_ascii_alphabetic()) { lo.to_string() } else { format!("{lo}{unit}") };
    let (lo, hi) = (freq(&lo)?, freq(hi)?);
    if lo >= hi {
        return Err(Failure::usage(format!("range '{text}' is empty")));
    }
    Ok((lo, hi))
}

fn parse_seed(text: &str) -> CmdResult<u16> {
    let t = text.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u16::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| Failure::usage(format!("LFSR seed must be a 16-bit value, got '{text}'")))
}

fn gate_table(g: &Global, run: &mut Run) -> CmdResult<GateTable> {
    match &g.config {
        Some(p) => {
            run.input(p);
            Ok(GateTable::load(p)?)
        }
        None => Ok(GateTable::default()),
    }
}

fn adder_options(a: &NetlistArgs, table: GateTable) -> AdderOptions {
    let mut o = if a.chip { AdderOptions::fabricated_chip() } else { AdderOptions::default() };
    if let Some(i) = a.idle {
        o.idle_phases = i;
    }
    if a.idle_before.is_some() {
        o.idle_before_stage = a.idle_before;
    }
    if a.ptl_length.is_some() {
        o.ptl_length_um = a.ptl_length;
    }
    if a.no_cout {
        o.carry_out = false;
    }
    o.max_fanout = a.max_fanout;
    o.gate_table = table;
    o
}

fn load_netlist(g: &Global, a: &NetlistArgs, run: &mut Run) -> CmdResult<Netlist> {
    let core = match &a.netlist {
        Some(p) => {
            run.input(p);
            read_netlist(&read_text(p)?)?
        }
        None => {
            let table = gate_table(g, run)?;
            build_kogge_stone(a.width, &adder_options(a, table))?
        }
    };
    if a.chip_model {
        Ok(chip_model(&core, &ChipFractions::default())?)
    } else {
        Ok(core)
    }
}

/// Serial program given as a literal bit string, `zeros<N>` / `ones<N>`, or a file.
fn serial_program(spec: &str, run: &mut Run) -> CmdResult<Vec<bool>> {
    if !spec.is_empty() && spec.chars().all(|c| c == '0' || c == '1') {
        return Ok(spec.chars().map(|c| c == '1').collect());
    }
    for (prefix, bit) in [("zeros", false), ("ones", true)] {
        if let Some(n) = spec.strip_prefix(prefix).and_then(|n| n.parse::<usize>().ok()) {
            return Ok(vec![bit; n]);
        }
    }
    let p = Path::new(spec);
    run.input(p);
    Ok(read_serial(&read_text(p)?)?)
}

#[derive(Serialize)]
struct VectorSource {
    kind: String,
    serial_bits: Option<usize>,
    chop: Option<(usize, usize)>,
}

fn input_vectors(g: &Global, a: &VectorArgs, nl: &Netlist, run: &mut Run) -> CmdResult<(Vec<Vector>, VectorSource)> {
    let chosen = [a.vectors.is_some(), a.serial.is_some(), a.prbs.is_some(), a.exhaustive, a.random.is_some()]
        .iter()
        .filter(|&&x| x)
        .count();
    if chosen > 1 {
        return Err(Failure::usage("give at most one of --vectors, --serial, --prbs, --exhaustive, --random"));
    }
    let w = nl.width;
    let harness =
        |bits: Vec<bool>, kind: String, chop: Option<(usize, usize)>| -> CmdResult<(Vec<Vector>, VectorSource)> {
            let cycles = a.cycles.unwrap_or(bits.len());
            let v = shift_register_harness(&bits, w, cycles)?;
            Ok((v, VectorSource { kind, serial_bits: Some(bits.len()), chop }))
        };
    if let Some(p) = &a.vectors {
        run.input(p);
        let v = read_vectors(&read_text(p)?)?;
        return Ok((v, VectorSource { kind: "file".into(), serial_bits: None, chop: None }));
    }
    if let Some(s) = &a.serial {
        let bits = serial_program(s, run)?;
        return harness(bits, "serial".into(), None);
    }
    if let Some(s) = &a.prbs {
        let mut lfsr = Lfsr16::new(parse_seed(s)?)?;
        if let Some(c) = &a.chop {
            let (act, zero) = c
                .split_once(':')
                .and_then(|(x, y)| Some((x.trim().parse::<usize>().ok()?, y.trim().parse::<usize>().ok()?)))
                .ok_or_else(|| Failure::usage(format!("--chop expects ACTIVE:ZERO, got '{c}'")))?;
            let prog = chopped_program(lfsr, act, zero)?;
            return harness(prog.serial_bits, format!("prbs {s} chopped"), prog.chop);
        }
        let len = a.prbs_len.unwrap_or(2 * w as usize);
        return harness(lfsr.bits(len), format!("prbs {s}"), None);
    }
    if let Some(n) = a.random {
        return Ok((
            random_vectors(w, n, g.seed),
            VectorSource { kind: "random".into(), serial_bits: None, chop: None },
        ));
    }
    if a.exhaustive || w <= 8 {
        return Ok((exhaustive_vectors(w)?, VectorSource { kind: "exhaustive".into(), serial_bits: None, chop: None }));
    }
    Ok((random_vectors(w, 4096, g.seed), VectorSource { kind: "random".into(), serial_bits: None, chop: None }))
}

pub fn gen(g: &Global, a: GenArgs) -> CmdResult {
    let mut run = Run::new(g, "gen");
    let nl = load_netlist(g, &a.netlist, &mut run)?;
    let f = freq(&a.clock)?;
    let lat = latency(&nl, f)?;
    let stats = netlist_stats(&nl);
    let diags = validate_netlist(&nl, a.netlist.max_fanout);
    let logic_stages = nl.width.trailing_zeros() + 2;
    run.file(a.output.clone(), write_netlist(&nl)?);

    let mut t = String::new();
    let _ = writeln!(t, "{}-bit Kogge-Stone adder, {} gates, {} logic stages", nl.width, nl.gates.len(), logic_stages);
    let _ = writeln!(t, "{:<12} {:>8}", "kind", "count");
    for (k, n) in &stats.gate_counts {
        let _ = writeln!(t, "{:<12} {:>8}", k.to_string(), n);
    }
    let _ = writeln!(t, "junctions    {:>8}", stats.jj_total);
    if let Some(ic) = stats.ic_avg_ua {
        let _ = writeln!(t, "Ic avg       {:>8.1} µA", ic);
    }
    for (r, frac) in &stats.region_fraction {
        let _ = writeln!(t, "region {:<16} {:>6.1} % of Ic", r, frac * 100.0);
    }
    let _ = writeln!(t, "{:<8} {:>8} {:>12}", "phases", "cycles", "latency");
    let _ = writeln!(t, "{:<8} {:>8} {:>9.1} ps  at {} GHz", lat.phases, lat.cycles, lat.picoseconds, f / 1e9);
    for d in &diags {
        let _ = writeln!(t, "! {d}");
    }
    let summary = json!({
        "width": nl.width,
        "gates": nl.gates.len(),
        "logic_stages": logic_stages,
        "gate_counts": stats.gate_counts,
        "jj_total": stats.jj_total,
        "ic_avg_ua": stats.ic_avg_ua,
        "line_ic_ua": stats.line_ic_ua,
        "region_fraction": stats.region_fraction,
        "latency": lat,
        "clock_hz": f,
        "diagnostics": diags.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "netlist": a.output,
    });
    run.finish(&summary, t, None)?;
    Ok(diags.is_empty())
}

pub fn validate(g: &Global, a: ValidateArgs) -> CmdResult {
    let mut run = Run::new(g, "validate");
    run.input(&a.netlist);
    let nl = read_netlist(&read_text(&a.netlist)?)?;
    let diags: Vec<String> = validate_netlist(&nl, a.max_fanout).iter().map(|d| d.to_string()).collect();
    let mut t = String::new();
    if diags.is_empty() {
        let _ = writeln!(t, "ok: {} gates, no diagnostics", nl.gates.len());
    }
    for d in &diags {
        let _ = writeln!(t, "{d}");
    }
    let ok = diags.is_empty();
    run.finish(&json!({ "gates": nl.gates.len(), "ok": ok, "diagnostics": diags }), t, None)?;
    Ok(ok)
}

pub fn sim(g: &Global, a: SimArgs) -> CmdResult {
    let mut run = Run::new(g, "sim");
    let nl = load_netlist(g, &a.netlist, &mut run)?;
    let (vectors, source) = input_vectors(g, &a.vectors, &nl, &mut run)?;
    let (trace, timing) = if a.timed {
        let clock = ClockConfig::new(freq(&a.clock)?).with_bias(a.bias);
        let tt = simulate_timed(&nl, &clock, &vectors, NOMINAL_JUNCTION_DELAY_PS)?;
        (tt.trace, Some(tt.timing))
    } else {
        (simulate_logic(&nl, &vectors)?, None)
    };
    let check = a.check.then(|| check_addition(&nl, &trace));
    run.file("trace.csv", trace_csv(&trace));

    let summary = trace_summary(&trace, check.as_ref());
    let mut t = String::new();
    let _ = writeln!(
        t,
        "{} vectors ({}), {} cycles, latency {} cycles",
        trace.vectors.len(),
        source.kind,
        trace.cycles(),
        trace.latency_cycles
    );
    let _ = writeln!(t, "switching events {} ({:.2} per vector)", summary.total_events, summary.events_per_cycle);
    if let Some(c) = &check {
        let _ = writeln!(t, "addition check {}/{} {}", c.passed, c.total, if c.ok() { "pass" } else { "FAIL" });
        if let Some((i, (x, y), got, want)) = c.first_failure {
            let _ = writeln!(t, "  first mismatch at vector {i}: {x:#x}+{y:#x} gave {got:#x}, expected {want:#x}");
        }
    }
    if let Some(tm) = &timing {
        let _ = writeln!(
            t,
            "timing at {} GHz, bias {}: worst slack {:.3} ps, {} violations",
            tm.clock.frequency / 1e9,
            tm.clock.bias_rel,
            tm.worst_slack_ps,
            tm.violations.len()
        );
    }
    let ok = check.as_ref().is_none_or(|c| c.ok()) && (!a.check || timing.as_ref().is_none_or(|t| t.passes()));
    let out = json!({
        "trace": summary,
        "source": source,
        "timing": timing.as_ref().map(|t| json!({
            "frequency": t.clock.frequency,
            "bias_rel": t.clock.bias_rel,
            "junction_delay_ps": t.junction_delay_ps,
            "phase_worst_ps": t.phase_worst_ps,
            "worst_slack_ps": t.worst_slack_ps,
            "violations": t.violations,
        })),
        "pass": ok,
    });
    run.finish(&out, t, Some(trace_csv(&trace)))?;
    Ok(ok)
}

pub fn margins(g: &Global, a: MarginsArgs) -> CmdResult {
    let mut run = Run::new(g, "margins");
    let nl = load_netlist(g, &a.netlist, &mut run)?;
    let mut cfg = MarginConfig::default();
    if let Some(c) = a.ceiling {
        cfg.ceiling = c;
    }
    if let Some(w) = a.receiver_window {
        cfg.receiver_window_frac = w;
    }
    let fs = frequency_grid(freq(&a.fmin)?, freq(&a.fmax)?, a.steps)?;
    let curve = margin_sweep(&nl, &fs, &cfg)?;
    let mut csv = String::from("frequency_hz,lower_db,upper_db,width_db\n");
    let mut t = format!("{:>10} {:>10} {:>10} {:>10}\n", "GHz", "lower dB", "upper dB", "width dB");
    for p in &curve.points {
        let lower = p.lower_db.map(|l| format!("{l:.4}")).unwrap_or_default();
        let _ = writeln!(csv, "{},{},{:.4},{:.4}", p.frequency, lower, p.upper_db, p.width_db);
        let _ = writeln!(
            t,
            "{:>10.3} {:>10} {:>10.4} {:>10.4}",
            p.frequency / 1e9,
            if lower.is_empty() { "-".into() } else { lower },
            p.upper_db,
            p.width_db
        );
    }
    let upper_constant = curve.points.windows(2).all(|w| w[0].upper_db == w[1].upper_db);
    let width_non_increasing = curve.points.windows(2).all(|w| w[1].width_db <= w[0].width_db + 1e-12);
    let _ = writeln!(t, "upper limit constant: {upper_constant}; width non-increasing: {width_non_increasing}");
    run.file("margins.csv", csv.clone());
    let ok = !a.check || (upper_constant && width_non_increasing);
    let summary = json!({
        "ceiling": curve.ceiling,
        "points": curve.points,
        "upper_constant": upper_constant,
        "width_non_increasing": width_non_increasing,
    });
    run.finish(&summary, t, Some(csv))?;
    Ok(ok)
}

pub fn power(g: &Global, a: PowerArgs) -> CmdResult {
    let mut run = Run::new(g, "power");
    if a.budget {
        let mut s = match &a.scenario {
            Some(p) => {
                run.input(p);
                ScalingScenario::from_toml_str(&read_text(p)?)?
            }
            None => ScalingScenario::default(),
        };
        if let Some(n) = a.n {
            s.n_devices = n;
        }
        if let Some(ic) = a.ic {
            s.ic_avg_ua = ic * 1e6;
        }
        if let Some(f) = &a.f {
            s.frequency = freq(f)?;
        }
        if let Some(m) = a.margin {
            s.margin_frac = m;
        }
        let b = clock_budget(&s)?;
        let mut t = String::new();
        let _ = writeln!(
            t,
            "{:.3e} devices, {} µA, {} GHz, ±{} % clock tolerance",
            s.n_devices,
            s.ic_avg_ua,
            s.frequency / 1e9,
            s.margin_frac * 100.0
        );
        let _ = writeln!(t, "dissipated        {}", format_watts(b.p_dissipated));
        let _ = writeln!(t, "applied (min)     {}", format_watts(b.p_applied_min));
        let _ = writeln!(t, "applied           {} ({:.1} dBm)", format_watts(b.p_applied), watts_to_dbm(b.p_applied));
        let _ = writeln!(t, "line current rms  {:.2} mA on {} Ω", b.line_current_rms * 1e3, s.line_impedance);
        let _ = writeln!(t, "timing variation  {:.2} ps", b.timing_variation_ps);
        let _ = writeln!(t, "* applied power follows the clock-droop model: dissipated / (4 · margin)");
        let _ = writeln!(
            t,
            "* wall-plug at {CRYOCOOLER_W_PER_W:.0} W/W: {}",
            format_watts(b.p_dissipated * CRYOCOOLER_W_PER_W)
        );
        run.finish(
            &json!({ "scenario": s, "budget": b, "model": "p_applied_min = p_dissipated / (4 margin_frac)" }),
            t,
            None,
        )?;
        return Ok(true);
    }
    if let Some(n) = a.n {
        let ic = a.ic.ok_or_else(|| Failure::usage("--n needs --ic (A) and --f"))?;
        let f = freq(a.f.as_deref().ok_or_else(|| Failure::usage("--n needs --ic (A) and --f"))?)?;
        let p = dynamic_power(ic * 1e6, n, f);
        let rsfq = rsfq_static_equivalent(RSFQ_BIAS_CURRENT, RSFQ_BUS_VOLTAGE);
        let mut t = String::new();
        let _ = writeln!(t, "P = 0.33 · Ic · Φ0 · N · f = {}", format_watts(p));
        let _ = writeln!(t, "  Ic {:.1} µA, N {n}, f {:.4} GHz", ic * 1e6, f / 1e9);
        let _ = writeln!(
            t,
            "RSFQ bias resistor ({} µA at {} mV): {}",
            RSFQ_BIAS_CURRENT * 1e6,
            RSFQ_BUS_VOLTAGE * 1e3,
            format_watts(rsfq)
        );
        let _ = writeln!(t, "* wall-plug at {CRYOCOOLER_W_PER_W:.0} W/W: {}", format_watts(p * CRYOCOOLER_W_PER_W));
        let summary =
            json!({ "p_dynamic": p, "ic_avg_ua": ic * 1e6, "n_junctions": n, "frequency": f, "rsfq_resistor_w": rsfq });
        run.finish(&summary, t, None)?;
        return Ok(true);
    }
    let f = freq(a.f.as_deref().unwrap_or("10GHz"))?;
    let nl = load_netlist(g, &a.netlist, &mut run)?;
    let report = if a.activity {
        let (v, _) = input_vectors(g, &a.vectors, &nl, &mut run)?;
        let trace = simulate_logic(&nl, &v)?;
        activity_report(&nl, &trace, f)?
    } else {
        netlist_power(&nl, f)?
    };
    run.finish(&report, report.to_table(), None)?;
    Ok(true)
}

pub fn sidebands(g: &Global, a: SidebandArgs) -> CmdResult {
    let mut run = Run::new(g, "sidebands");
    let mut d = match &a.descriptor {
        Some(p) => {
            run.input(p);
            MeasurementDescriptor::from_toml_str(&read_text(p)?)?
        }
        None => MeasurementDescriptor {
            f_carrier: 0.0,
            active_len: 0,
            zero_len: 0,
            am_power_fraction: a.fraction,
            region_fraction: None,
            lines: BTreeMap::new(),
        },
    };
    if a.descriptor.is_none() || a.fraction != 0.5 {
        d.am_power_fraction = a.fraction;
    }
    if let Some(f) = &a.f_carrier {
        d.f_carrier = freq(f)?;
    }
    if let Some(n) = a.active {
        d.active_len = n;
    }
    if let Some(n) = a.zero {
        d.zero_len = n;
    }
    if a.cla_frac.is_some() {
        d.region_fraction = a.cla_frac;
    }
    for (line, ssb, p0) in [(ClockLine::Q, a.q, a.p0q), (ClockLine::I, a.i, a.p0i)] {
        match (ssb, p0) {
            (Some(s), Some(p)) => {
                d.lines.insert(
                    line,
                    LineMeasurement { p0_dbm: Some(p), applied_dbm: None, returned_dbm: None, ssb_db: s },
                );
            }
            (None, None) => {}
            _ => return Err(Failure::usage(format!("clock {line} needs both its SSB ratio and carrier power"))),
        }
    }
    let mut measured = None;
    if let Some(p) = &a.spectrum {
        run.input(p);
        let line: ClockLine = match a.spectrum_line.to_ascii_uppercase().as_str() {
            "I" => ClockLine::I,
            "Q" => ClockLine::Q,
            other => return Err(Failure::usage(format!("unknown clock line '{other}'"))),
        };
        let f_mod = if d.active_len > 0 && d.zero_len > 0 && d.f_carrier > 0.0 {
            d.f_carrier / (d.active_len + d.zero_len) as f64
        } else {
            return Err(Failure::usage("--spectrum needs the carrier frequency and chop lengths"));
        };
        let spec = parse_spectrum_csv(&read_text(p)?)?;
        let m = measure_ssb(&spec, d.f_carrier, f_mod, f_mod / 4.0)?;
        let entry = d.lines.entry(line).or_insert(LineMeasurement {
            p0_dbm: None,
            applied_dbm: None,
            returned_dbm: None,
            ssb_db: m.ssb_db,
        });
        entry.ssb_db = m.ssb_db;
        if entry.p0_dbm.is_none() && entry.applied_dbm.is_none() {
            entry.p0_dbm = Some(m.carrier_dbm);
        }
        measured = Some(m);
    }
    let r = sideband_chain(&d)?;
    let mut t = String::new();
    if let Some(f) = r.f_mod {
        let _ = writeln!(t, "modulation fundamental {:.1} kHz", f / 1e3);
    }
    let _ = writeln!(t, "AM share of sideband power {}", r.am_power_fraction);
    let _ = writeln!(
        t,
        "{:<6} {:>9} {:>9} {:>12} {:>12} {:>10} {:>10}",
        "line", "SSB dB", "P0 dBm", "upper bound", "dissipated", "ΔP/P0 dB", "rounded dB"
    );
    for (line, l) in &r.lines {
        let _ = writeln!(
            t,
            "{:<6} {:>9.1} {:>9.2} {:>12} {:>12} {:>10.2} {:>10.2}",
            line.to_string(),
            l.measurement.ssb_db,
            l.measurement.p0_dbm,
            format_watts(l.upper_bound.watts),
            format_watts(l.corrected.watts),
            l.corrected.ratio_db,
            l.rounded_db
        );
    }
    let _ =
        writeln!(t, "total dissipated {} (pure-AM bound {})", format_watts(r.total), format_watts(r.total_upper_bound));
    if let (Some(frac), Some(p)) = (r.region_fraction, r.region_power) {
        let _ = writeln!(t, "core share {:.0} %: {}", frac * 100.0, format_watts(p));
    }
    let rsfq = rsfq_static_equivalent(RSFQ_BIAS_CURRENT, RSFQ_BUS_VOLTAGE);
    let _ = writeln!(t, "one RSFQ bias resistor dissipates {}", format_watts(rsfq));
    let _ = writeln!(t, "* the AM share is an input assumption, not a measured property of this circuit");
    run.finish(&json!({ "report": r, "spectrum": measured, "rsfq_resistor_w": rsfq }), t, None)?;
    Ok(true)
}

pub fn clocknet(g: &Global, a: ClocknetArgs) -> CmdResult {
    let mut run = Run::new(g, "clocknet");
    let band = freq_range(&a.band)?;
    let (lo, hi) = freq_range(&a.sweep)?;
    if a.points < 2 {
        return Err(Failure::usage("--points must be at least 2"));
    }
    let spec = TransformerSpec {
        z_source: a.zs,
        z_load: a.zl,
        n_sections: a.sections,
        f_center: freq(&a.f0)?,
        return_loss_db: a.rl,
        band: Some(band),
        synthesis: if a.binomial { Synthesis::Binomial } else { Synthesis::Chebyshev },
    };
    let design = if a.small_reflection { design_transformer(&spec)? } else { design_transformer_exact(&spec)? };
    let fs: Vec<f64> = (0..a.points).map(|i| lo + (hi - lo) * i as f64 / (a.points - 1) as f64).collect();
    let sweep = cascade_sparams(&design, &fs)?;
    let rl_band = return_loss_band(&sweep, a.rl);
    let dense: Vec<f64> = (0..=500).map(|i| band.0 + (band.1 - band.0) * i as f64 / 500.0).collect();
    let worst = cascade_sparams(&design, &dense)?.iter().map(|p| p.return_loss_db()).fold(f64::INFINITY, f64::min);
    let unitarity = sweep.iter().map(|p| (p.s11.norm_sqr() + p.s21.norm_sqr() - 1.0).abs()).fold(0.0, f64::max);
    run.file("transformer.csv", design_csv(&design));
    let sp = sparams_csv(&sweep);
    run.file("sparams.csv", sp.clone());

    let mut t = String::new();
    let _ = writeln!(
        t,
        "{}-section {:?} transformer {} Ω -> {} Ω at {} GHz",
        design.n_sections,
        design.synthesis,
        design.z_source,
        design.z_load,
        design.f_center / 1e9
    );
    for (i, z) in design.section_impedances.iter().enumerate() {
        let _ = writeln!(t, "  section {} {:>10.4} Ω", i + 1, z);
    }
    let _ = writeln!(
        t,
        "design ripple {:.2} dB return loss, theoretical band {:.3}-{:.3} GHz ({:.1} %)",
        -20.0 * design.ripple.log10(),
        design.band_edges.0 / 1e9,
        design.band_edges.1 / 1e9,
        design.fractional_bandwidth * 100.0
    );
    match rl_band {
        Some((l, h)) => {
            let _ = writeln!(t, "swept band with RL >= {} dB: {:.3}-{:.3} GHz", a.rl, l / 1e9, h / 1e9);
        }
        None => {
            let _ = writeln!(t, "no swept point reaches {} dB return loss", a.rl);
        }
    }
    let _ = writeln!(t, "worst return loss {:.3}-{:.3} GHz: {:.2} dB", band.0 / 1e9, band.1 / 1e9, worst);
    let _ = writeln!(t, "max | |S11|^2 + |S21|^2 - 1 |: {unitarity:.2e}");
    let ok = !a.check || worst >= a.rl;
    let summary = json!({
        "design": design,
        "band": band,
        "worst_return_loss_db": worst,
        "return_loss_band": rl_band,
        "unitarity_error": unitarity,
    });
    run.finish(&summary, t, Some(sp))?;
    Ok(ok)
}
