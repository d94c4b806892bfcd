use proptest::prelude::*;

use rqlkit::gate::{eval_gate, xor_composite, GateKind, GateTable};
use rqlkit::netlist::{
    build_kogge_stone, build_logical, legalize_fanout, read_netlist, validate, write_netlist, AdderOptions, Diagnostic,
    Netlist,
};
use rqlkit::sim::{
    check_addition, evaluate_combinational, exhaustive_vectors, expected_output, random_vectors, simulate_logic,
};

fn max_fanout(nl: &Netlist) -> usize {
    nl.fanouts().iter().flatten().map(Vec::len).max().unwrap_or(0)
}

fn phase_edges_ok(nl: &Netlist) -> bool {
    nl.gates.iter().all(|g| {
        g.inputs.iter().all(|p| {
            let (src, dst) = (nl.gates[p.gate].phase.unwrap(), g.phase.unwrap());
            dst == src || dst == src + 1
        })
    })
}

#[test]
fn eight_bit_exhaustive() {
    for opts in [AdderOptions::default(), AdderOptions::fabricated_chip()] {
        let nl = build_kogge_stone(8, &opts).unwrap();
        let tr = simulate_logic(&nl, &exhaustive_vectors(8).unwrap()).unwrap();
        let c = check_addition(&nl, &tr);
        assert_eq!((c.total, c.passed), (65536, 65536), "{:?}", c.first_failure);
    }
}

#[test]
fn wide_adders_random() {
    for w in [16, 32, 64] {
        let nl = build_kogge_stone(w, &AdderOptions::default()).unwrap();
        let tr = simulate_logic(&nl, &random_vectors(w, 100_000, u64::from(w))).unwrap();
        let c = check_addition(&nl, &tr);
        assert!(c.ok() && c.total == 100_000, "width {w}: {:?}", c.first_failure);
    }
}

#[test]
fn carry_chain_extremes() {
    for w in [16u32, 32, 64] {
        let nl = build_kogge_stone(w, &AdderOptions::default()).unwrap();
        let m = if w == 64 { u64::MAX } else { (1 << w) - 1 };
        let v = vec![(m, 1), (m, m), (1, m), (m >> 1, m >> 1), (0, 0)];
        assert!(check_addition(&nl, &simulate_logic(&nl, &v).unwrap()).ok(), "width {w}");
    }
}

#[test]
fn structure_is_clean() {
    for w in [2, 4, 8, 16, 32, 64] {
        for opts in [AdderOptions::default(), AdderOptions::fabricated_chip()] {
            let nl = build_kogge_stone(w, &opts).unwrap();
            assert!(validate(&nl, 4).is_empty(), "width {w}: {:?}", validate(&nl, 4));
            assert!(max_fanout(&nl) <= 4);
            assert!(phase_edges_ok(&nl));
        }
    }
}

#[test]
fn legalization_and_phasing_preserve_function() {
    let opts = AdderOptions::fabricated_chip();
    let logical = build_logical(8, &opts).unwrap();
    let phased = build_kogge_stone(8, &opts).unwrap();
    let tight = legalize_fanout(&logical, 2, &GateTable::default()).unwrap();
    assert!(max_fanout(&tight) <= 2);
    for (a, b) in exhaustive_vectors(8).unwrap() {
        let want = evaluate_combinational(&logical, a, b).unwrap();
        assert_eq!(want, expected_output(8, false, a, b));
        assert_eq!(evaluate_combinational(&phased, a, b).unwrap(), want);
        assert_eq!(evaluate_combinational(&tight, a, b).unwrap(), want);
    }
}

#[test]
fn validate_flags_broken_netlists() {
    let mut nl = build_kogge_stone(4, &AdderOptions::default()).unwrap();
    let tight = validate(&nl, 2);
    assert!(tight.iter().any(|d| matches!(d, Diagnostic::Fanout { .. })));
    let last = nl.gates.len() - 1;
    nl.gates[last].phase = Some(0);
    assert!(validate(&nl, 4).iter().any(|d| matches!(d, Diagnostic::PhaseOrder { .. })));
}

#[test]
fn netlist_text_round_trip() {
    let nl = build_kogge_stone(16, &AdderOptions::fabricated_chip()).unwrap();
    let text = write_netlist(&nl).unwrap();
    let back = read_netlist(&text).unwrap();
    assert_eq!(back, nl);
    assert_eq!(write_netlist(&back).unwrap(), text);
}

#[test]
fn xor_from_primitives_matches_truth_table() {
    for a in [false, true] {
        for b in [false, true] {
            assert_eq!(xor_composite(a, b), a ^ b);
            let or_and = eval_gate(GateKind::AndOr, &[a, b]).unwrap();
            let anotb = eval_gate(GateKind::AnotB, &[or_and[0], or_and[1]]).unwrap();
            assert_eq!(anotb[0], a ^ b);
        }
    }
}

fn options() -> impl Strategy<Value = (u32, AdderOptions)> {
    (1u32..=6, any::<bool>(), 0u32..=2, any::<bool>(), 2usize..=6).prop_map(|(k, cout, idle, ptl, fan)| {
        let opts = AdderOptions {
            carry_out: cout,
            idle_phases: idle,
            ptl_length_um: ptl.then_some(1000.0),
            max_fanout: fan,
            ..AdderOptions::default()
        };
        (1 << k, opts)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn any_configuration_adds((w, opts) in options(), seed in any::<u64>()) {
        let nl = build_kogge_stone(w, &opts).unwrap();
        prop_assert!(validate(&nl, opts.max_fanout).is_empty());
        prop_assert!(max_fanout(&nl) <= opts.max_fanout);
        prop_assert!(phase_edges_ok(&nl));
        let tr = simulate_logic(&nl, &random_vectors(w, 256, seed)).unwrap();
        prop_assert!(check_addition(&nl, &tr).ok());
    }

    #[test]
    fn bit_parallel_matches_scalar_oracle((w, opts) in options(), seed in any::<u64>()) {
        let nl = build_kogge_stone(w, &opts).unwrap();
        let v = random_vectors(w, 70, seed);
        let tr = simulate_logic(&nl, &v).unwrap();
        for (&(a, b), &got) in v.iter().zip(&tr.outputs) {
            prop_assert_eq!(got, evaluate_combinational(&nl, a, b).unwrap());
            prop_assert_eq!(got, expected_output(w, opts.carry_out, a, b));
        }
    }

    #[test]
    fn xor_composite_is_xor(a in any::<bool>(), b in any::<bool>()) {
        prop_assert_eq!(xor_composite(a, b), a ^ b);
    }
}
