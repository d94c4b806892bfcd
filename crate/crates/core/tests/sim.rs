use proptest::prelude::*;

use rqlkit::gate::{ClockConfig, GateKind, NOMINAL_JUNCTION_DELAY_PS};
use rqlkit::netlist::{build_kogge_stone, AdderOptions, Netlist};
use rqlkit::sim::{
    analyze_timing, chopped_program, fanin_cone, margin_sweep, random_vectors, shift_register_harness, simulate_logic,
    simulate_logic_detailed, simulate_timed, switching_activity, Lfsr16, MarginConfig, DEFAULT_LFSR_SEED,
};

fn chip() -> Netlist {
    build_kogge_stone(8, &AdderOptions::fabricated_chip()).unwrap()
}

/// Value of input bit `k` (A bits first, then B) for one vector.
fn input_bit(nl: &Netlist, (a, b): (u64, u64), k: usize) -> bool {
    let w = nl.width as usize;
    if k < w {
        a >> k & 1 == 1
    } else {
        b >> (k - w) & 1 == 1
    }
}

#[test]
fn all_zero_program_is_silent() {
    let nl = chip();
    let v = shift_register_harness(&[false; 16], 8, 40).unwrap();
    let tr = simulate_logic(&nl, &v).unwrap();
    assert_eq!(tr.total_events(), 0);
    assert!(tr.outputs.iter().all(|&o| o == 0));
}

#[test]
fn chopped_program_halves_activity() {
    let nl = chip();
    let n = 1024;
    let plain = Lfsr16::new(DEFAULT_LFSR_SEED).unwrap().bits(2 * n);
    let active = simulate_logic(&nl, &shift_register_harness(&plain, 8, 2 * n).unwrap()).unwrap();
    let prog = chopped_program(Lfsr16::new(DEFAULT_LFSR_SEED).unwrap(), n, n).unwrap();
    let chopped = simulate_logic(&nl, &shift_register_harness(&prog.serial_bits, 8, 2 * n).unwrap()).unwrap();
    let ratio = chopped.total_events() as f64 / active.total_events() as f64;
    assert!((ratio - 0.5).abs() < 0.05, "{ratio}");
}

#[test]
fn nominal_timing_at_10ghz_passes_and_fails_at_12ghz() {
    let nl = chip();
    let ok = analyze_timing(&nl, &ClockConfig::new(10e9), NOMINAL_JUNCTION_DELAY_PS).unwrap();
    assert!(ok.passes());
    let bad = analyze_timing(&nl, &ClockConfig::new(12e9), NOMINAL_JUNCTION_DELAY_PS).unwrap();
    assert!(!bad.passes());
    // logic inside one phase never exceeds eight sequential junctions
    let logic_worst = nl
        .gates
        .iter()
        .zip(&ok.arrivals_ps)
        .filter(|(g, _)| g.kind() != GateKind::PtlReceiver)
        .map(|(_, &t)| t)
        .fold(0.0, f64::max);
    assert!((logic_worst - 24.0).abs() < 1e-9, "{logic_worst}");
}

#[test]
fn timed_trace_matches_logic_trace() {
    let nl = chip();
    let v = random_vectors(8, 300, 5);
    let timed = simulate_timed(&nl, &ClockConfig::new(10e9), &v, NOMINAL_JUNCTION_DELAY_PS).unwrap();
    let logic = simulate_logic(&nl, &v).unwrap();
    assert_eq!(timed.trace.outputs, logic.outputs);
    assert_eq!(timed.trace.cycle_events, logic.cycle_events);
    assert!(timed.trace.arrivals_ps.is_some());
}

#[test]
fn margin_curve_shape() {
    let nl = chip();
    let fs: Vec<f64> = (4..=16).map(|g| f64::from(g) * 1e9).collect();
    let curve = margin_sweep(&nl, &fs, &MarginConfig::default()).unwrap();
    let up = curve.points[0].upper_db;
    assert!(curve.points.iter().all(|p| p.upper_db == up));
    assert!(curve.points.windows(2).all(|w| w[1].width_db <= w[0].width_db));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn harness_is_periodic(seed in 1u16.., len in 16usize..80, extra in 0usize..40) {
        let bits = Lfsr16::new(seed).unwrap().bits(len);
        let v = shift_register_harness(&bits, 8, 2 * len + extra).unwrap();
        for t in 0..len + extra {
            prop_assert_eq!(v[t], v[t + len]);
        }
    }

    #[test]
    fn harness_shifts_one_stage_per_cycle(seed in 1u16.., len in 16usize..64) {
        let bits = Lfsr16::new(seed).unwrap().bits(len);
        let v = shift_register_harness(&bits, 8, len).unwrap();
        for t in 1..len {
            // A_i at t+1 is A_(i-1) at t; A_0 reads the serial input
            let (a0, _) = v[t - 1];
            let (a1, _) = v[t];
            prop_assert_eq!(a1 >> 1 & 0x7f, a0 & 0x7f);
            prop_assert_eq!(a1 & 1 == 1, bits[t % len]);
        }
    }

    #[test]
    fn events_depend_only_on_fanin_cone(seed in any::<u64>(), flip in 0usize..16) {
        let nl = chip();
        let mut v = random_vectors(8, 2, seed);
        let w = nl.width as usize;
        // second vector is the first with one input flipped
        v[1] = if flip < w { (v[0].0 ^ 1 << flip, v[0].1) } else { (v[0].0, v[0].1 ^ 1 << (flip - w)) };
        let tr = simulate_logic_detailed(&nl, &v).unwrap();
        let ev = &tr.detail.as_ref().unwrap().events;
        let flipped = nl.inputs[flip];
        for (g, (&e0, &e1)) in ev[0].iter().zip(&ev[1]).enumerate() {
            let cone = fanin_cone(&nl, g);
            if !cone[flipped] {
                prop_assert_eq!(e0, e1, "gate {} outside the flipped input's cone", g);
            }
            if e0 > 0 {
                let driven = nl.inputs.iter().enumerate().any(|(k, &s)| cone[s] && input_bit(&nl, v[0], k));
                prop_assert!(driven, "gate {} switched with an all-zero cone", g);
            }
        }
    }

    #[test]
    fn repeating_vectors_doubles_activity(seed in any::<u64>(), n in 1usize..200) {
        let nl = chip();
        let v = random_vectors(8, n, seed);
        let twice: Vec<_> = v.iter().chain(&v).copied().collect();
        let a1 = switching_activity(&nl, &simulate_logic(&nl, &v).unwrap());
        let a2 = switching_activity(&nl, &simulate_logic(&nl, &twice).unwrap());
        prop_assert_eq!(a2.total, 2 * a1.total);
        for (x, y) in a1.per_gate.iter().zip(&a2.per_gate) {
            prop_assert_eq!(*y, 2 * x);
        }
        prop_assert_eq!(a1.per_kind.values().sum::<u64>(), a1.total);
    }

    #[test]
    fn slack_improves_with_bias(f in 4e9f64..16e9, b1 in 0.3f64..2.0, db in 0.0f64..1.0) {
        let nl = chip();
        let lo = analyze_timing(&nl, &ClockConfig::new(f).with_bias(b1), NOMINAL_JUNCTION_DELAY_PS).unwrap();
        let hi = analyze_timing(&nl, &ClockConfig::new(f).with_bias(b1 + db), NOMINAL_JUNCTION_DELAY_PS).unwrap();
        prop_assert!(hi.worst_slack_ps >= lo.worst_slack_ps - 1e-9);
        prop_assert!(hi.violations.len() <= lo.violations.len());
    }
}
