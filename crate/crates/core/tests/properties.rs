mod common;

use common::*;
use proptest::prelude::*;
use qgame::ewl::{gate_from_a, Protocol};
use qgame::games::{canonical_pd, expected_payoff, mixed_nash, Bimatrix, MixedProfile, Player};
use qgame::qcore::Gate1Q;
use qgame::search::{best_response, SearchConfig, StrategySpace};

fn assert_suite(result: Result<(), String>) {
    if let Err(e) = result {
        panic!("{e}");
    }
}

#[test]
fn gates_are_unitary() {
    assert_suite(run_suite(CASES, unitary_input(), check_unitarity));
}

#[test]
fn protocol_preserves_norm() {
    assert_suite(run_suite(CASES, protocol_input(), check_norm));
}

#[test]
fn tensor_mixed_product() {
    assert_suite(run_suite(
        CASES,
        (unitary(), unitary(), unitary(), unitary()),
        check_mixed_product,
    ));
}

#[test]
fn channels_preserve_trace_and_positivity() {
    assert_suite(run_suite(CASES, noisy_input(), check_trace_positivity));
}

#[test]
fn global_phase_is_unobservable() {
    assert_suite(run_suite(CASES, phase_input(), check_phase_invariance));
}

#[test]
fn set_b_contains_set_a() {
    assert_suite(run_suite(CASES, dominance_input(), check_b_contains_a));
}

#[test]
fn best_response_in_b_dominates_a() {
    let cfg = SearchConfig {
        grid_resolution: 9,
        refine_iters: 60,
        ..SearchConfig::default()
    };
    let input = (
        unitary(),
        gamma(),
        mode(),
        prop_oneof![Just(Player::One), Just(Player::Two)],
    );
    assert_suite(run_suite(24, input, |(opp, gamma, mode, who)| {
        let p = Protocol::new(canonical_pd(), gamma, mode).unwrap();
        let a = best_response(&p, &opp, who, None, &StrategySpace::A, &cfg).unwrap();
        let b = best_response(&p, &opp, who, None, &StrategySpace::B, &cfg).unwrap();
        prop_assert!(
            b.payoff >= a.payoff - 1e-6,
            "B {} < A {}",
            b.payoff,
            a.payoff
        );
        Ok(())
    }));
}

fn game() -> impl Strategy<Value = Bimatrix> {
    prop::array::uniform4((-5.0..5.0f64, -5.0..5.0f64)).prop_map(|c| {
        Bimatrix::new(
            [[c[0], c[1]], [c[2], c[3]]],
            ["a".into(), "b".into()],
            ["x".into(), "y".into()],
        )
        .unwrap()
    })
}

fn integer_game() -> impl Strategy<Value = Bimatrix> {
    prop::array::uniform4((0..3i32, 0..3i32)).prop_map(|c| {
        let c = c.map(|(a, b)| (a as f64, b as f64));
        Bimatrix::new(
            [[c[0], c[1]], [c[2], c[3]]],
            ["a".into(), "b".into()],
            ["x".into(), "y".into()],
        )
        .unwrap()
    })
}

fn deviation_gain(g: &Bimatrix, m: &MixedProfile) -> f64 {
    let (v1, v2) = expected_payoff(g, m);
    let mut gain: f64 = 0.0;
    for alt in [0.0, 1.0] {
        let a = expected_payoff(g, &MixedProfile::new(alt, m.q).unwrap()).0;
        let b = expected_payoff(g, &MixedProfile::new(m.p, alt).unwrap()).1;
        gain = gain.max(a - v1).max(b - v2);
    }
    gain
}

/// Independent equilibrium list for a game without payoff ties.
fn oracle_equilibria(g: &Bimatrix) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for r in 0..2 {
        for c in 0..2 {
            let row_ok = g.payoff(r, c).0 >= g.payoff(1 - r, c).0;
            let col_ok = g.payoff(r, c).1 >= g.payoff(r, 1 - c).1;
            if row_ok && col_ok {
                out.push((
                    if r == 0 { 1.0 } else { 0.0 },
                    if c == 0 { 1.0 } else { 0.0 },
                ));
            }
        }
    }
    let b = |r, c| g.payoff(r, c).1;
    let a = |r, c| g.payoff(r, c).0;
    let p = (b(1, 1) - b(1, 0)) / (b(0, 0) - b(1, 0) - b(0, 1) + b(1, 1));
    let q = (a(1, 1) - a(0, 1)) / (a(0, 0) - a(0, 1) - a(1, 0) + a(1, 1));
    if p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0 {
        out.push((p, q));
    }
    out
}

#[test]
fn nash_matches_brute_force_oracle() {
    assert_suite(run_suite(CASES, game(), |g| {
        let found = mixed_nash(&g);
        prop_assert!(!found.equilibria.is_empty());
        for m in &found.equilibria {
            prop_assert!(deviation_gain(&g, m) <= 1e-9, "{m:?} not an equilibrium");
        }
        let mut want = oracle_equilibria(&g);
        let mut got: Vec<(f64, f64)> = found.equilibria.iter().map(|m| (m.p, m.q)).collect();
        want.sort_by(|x, y| x.partial_cmp(y).unwrap());
        got.sort_by(|x, y| x.partial_cmp(y).unwrap());
        prop_assert_eq!(want.len(), got.len(), "want {:?} got {:?}", want, got);
        for (w, h) in want.iter().zip(&got) {
            prop_assert!((w.0 - h.0).abs() < 1e-9 && (w.1 - h.1).abs() < 1e-9);
        }
        Ok(())
    }));
}

#[test]
fn nash_exists_in_degenerate_games() {
    assert_suite(run_suite(CASES, integer_game(), |g| {
        let found = mixed_nash(&g);
        prop_assert!(!found.equilibria.is_empty());
        for m in &found.equilibria {
            prop_assert!(deviation_gain(&g, m) <= 1e-9, "{m:?} not an equilibrium");
        }
        Ok(())
    }));
}

#[test]
fn expected_payoff_is_bilinear() {
    let input = (
        game(),
        0.0..=1.0f64,
        0.0..=1.0f64,
        0.0..=1.0f64,
        0.0..=1.0f64,
    );
    assert_suite(run_suite(CASES, input, |(g, p1, p2, q, lam)| {
        let mix = MixedProfile::new(lam * p1 + (1.0 - lam) * p2, q).unwrap();
        let e = expected_payoff(&g, &mix);
        let e1 = expected_payoff(&g, &MixedProfile::new(p1, q).unwrap());
        let e2 = expected_payoff(&g, &MixedProfile::new(p2, q).unwrap());
        prop_assert!((e.0 - (lam * e1.0 + (1.0 - lam) * e2.0)).abs() < 1e-12);
        prop_assert!((e.1 - (lam * e1.1 + (1.0 - lam) * e2.1)).abs() < 1e-12);
        Ok(())
    }));
}

#[test]
fn set_a_gates_have_real_off_diagonal() {
    assert_suite(run_suite(CASES, params_a(), |a| {
        let g: Gate1Q = gate_from_a(&a).unwrap();
        let e = g.entries();
        prop_assert!(e[0][1].im.abs() < 1e-15 && e[1][0].im.abs() < 1e-15);
        Ok(())
    }));
}
