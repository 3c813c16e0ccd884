//! Random inputs and invariant checks shared by the property suite and the
//! acceptance run.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use qgame::ewl::{gate_from_a, gate_from_b, Protocol, StrategyParamsA, StrategyParamsB};
use qgame::games::canonical_pd;
use qgame::noise::{DensityMatrix2Q, NoiseKind, NoisePlacement, NoiseSpec, NoisyProtocol};
use qgame::qcore::{entangler, tensor, EntanglerMode, Gate1Q, Gate2Q, PureState2Q, C64, TOLERANCE};

pub const CASES: u32 = 500;

/// Deterministic runner with a fixed seed.
pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

pub fn gamma() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(FRAC_PI_2), 0.0..=FRAC_PI_2]
}

pub fn mode() -> impl Strategy<Value = EntanglerMode> {
    prop_oneof![
        Just(EntanglerMode::PaperLiteral),
        Just(EntanglerMode::EwlFaithful)
    ]
}

pub fn params_a() -> impl Strategy<Value = StrategyParamsA> {
    (0.0..=FRAC_PI_2, 0.0..=FRAC_PI_2).prop_map(|(theta, phi)| StrategyParamsA { theta, phi })
}

pub fn params_b() -> impl Strategy<Value = StrategyParamsB> {
    (0.0..=FRAC_PI_2, -PI..=PI, -PI..=PI).prop_map(|(theta, alpha, beta)| StrategyParamsB {
        theta,
        alpha,
        beta,
    })
}

/// Arbitrary single-qubit unitary: a set-B gate times a global phase.
pub fn unitary() -> impl Strategy<Value = Gate1Q> {
    (params_b(), -PI..=PI)
        .prop_map(|(b, chi)| gate_from_b(&b).unwrap().scale(C64::from_polar(1.0, chi)))
}

pub fn noise() -> impl Strategy<Value = NoiseSpec> {
    let kind = prop_oneof![
        Just(NoiseKind::None),
        Just(NoiseKind::PerQubitDepolarizing),
        Just(NoiseKind::TwoQubitDepolarizing)
    ];
    let placement = prop_oneof![Just(NoisePlacement::Return), Just(NoisePlacement::Forward)];
    let p = prop_oneof![Just(0.0), Just(1.0), 0.0..=1.0];
    (kind, p, placement).prop_map(|(kind, p, placement)| NoiseSpec { kind, p, placement })
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

pub fn unitary_input(
) -> impl Strategy<Value = (StrategyParamsA, StrategyParamsB, Gate1Q, f64, EntanglerMode)> {
    (params_a(), params_b(), unitary(), gamma(), mode())
}

/// Parametrized gates, their tensor products and the entangler are unitary.
pub fn check_unitarity(
    (a, b, u, gamma, mode): (StrategyParamsA, StrategyParamsB, Gate1Q, f64, EntanglerMode),
) -> Result<(), TestCaseError> {
    let tol = TOLERANCE.identity;
    let ga = gate_from_a(&a).unwrap();
    let gb = gate_from_b(&b).unwrap();
    for g in [&ga, &gb, &u] {
        ensure(g.is_unitary(tol), || {
            format!("gate {g} deviates by {:e}", g.unitarity_deviation())
        })?;
    }
    let t = tensor(&ga, &gb).unwrap();
    ensure(t.is_unitary(tol), || {
        format!("tensor deviates by {:e}", t.unitarity_deviation())
    })?;
    let j = entangler(gamma, mode).unwrap();
    ensure(j.is_unitary(tol), || {
        format!("J({gamma}) deviates by {:e}", j.unitarity_deviation())
    })?;
    let jj = j.dagger().mul(&j);
    ensure(jj.approx_eq(&Gate2Q::identity(), tol), || {
        "J†J is not the identity".into()
    })
}

pub fn protocol_input() -> impl Strategy<Value = (Gate1Q, Gate1Q, f64, EntanglerMode)> {
    (unitary(), unitary(), gamma(), mode())
}

/// The final state is normalized and its outcome distribution sums to one.
pub fn check_norm(
    (u1, u2, gamma, mode): (Gate1Q, Gate1Q, f64, EntanglerMode),
) -> Result<(), TestCaseError> {
    let p = Protocol::new(canonical_pd(), gamma, mode).unwrap();
    let r = p.run(&u1, &u2).unwrap();
    let s = r.final_state.unwrap();
    ensure((s.norm_sqr() - 1.0).abs() <= TOLERANCE.identity, || {
        format!("norm² = {}", s.norm_sqr())
    })?;
    let before = p.entangled_state();
    ensure(
        (before.norm_sqr() - 1.0).abs() <= TOLERANCE.identity,
        || "J|00⟩ not normalized".into(),
    )?;
    let total = r.distribution.total();
    ensure((total - 1.0).abs() <= TOLERANCE.identity, || {
        format!("total = {total}")
    })?;
    let (lo, hi) = (0.0 - 1e-12, 5.0 + 1e-12);
    ensure(
        (lo..=hi).contains(&r.payoff_i) && (lo..=hi).contains(&r.payoff_ii),
        || format!("payoffs {:?} outside [0, 5]", r.payoffs()),
    )
}

/// `(A ⊗ B)(C ⊗ D) = AC ⊗ BD`.
pub fn check_mixed_product(
    (a, b, c, d): (Gate1Q, Gate1Q, Gate1Q, Gate1Q),
) -> Result<(), TestCaseError> {
    let lhs = tensor(&a, &b).unwrap().mul(&tensor(&c, &d).unwrap());
    let rhs = tensor(&a.mul(&c), &b.mul(&d)).unwrap();
    ensure(lhs.approx_eq(&rhs, TOLERANCE.identity), || {
        "mixed product differs".into()
    })
}

pub fn noisy_input() -> impl Strategy<Value = (Gate1Q, Gate1Q, f64, EntanglerMode, NoiseSpec)> {
    (unitary(), unitary(), gamma(), mode(), noise())
}

fn check_density(stage: &str, rho: &DensityMatrix2Q) -> Result<(), TestCaseError> {
    let tol = TOLERANCE.validation;
    let t = rho.trace();
    ensure((t.re - 1.0).abs() <= tol && t.im.abs() <= tol, || {
        format!("{stage}: trace {t}")
    })?;
    let m = rho.min_eigenvalue();
    ensure(m >= -tol, || format!("{stage}: eigenvalue {m:e}"))?;
    ensure(rho.hermiticity_deviation() <= tol, || {
        format!("{stage}: not Hermitian")
    })
}

/// Trace and positivity hold after every stage of the noisy protocol.
pub fn check_trace_positivity(
    (u1, u2, gamma, mode, noise): (Gate1Q, Gate1Q, f64, EntanglerMode, NoiseSpec),
) -> Result<(), TestCaseError> {
    let p = Protocol::new(canonical_pd(), gamma, mode).unwrap();
    let start = DensityMatrix2Q::from_pure(p.entangled_state());
    check_density("entangled", &start)?;
    let players = tensor(&u1, &u2).unwrap();
    let moved = start.conjugate(&players);
    check_density("after gates", &moved)?;
    check_density("after channel", &noise.apply(&moved))?;
    check_density("channel on entangled", &noise.apply(&start))?;
    let noisy = NoisyProtocol::new(p, noise).unwrap();
    check_density("final", &noisy.final_density(&u1, &u2))?;
    let r = noisy.run(&u1, &u2).unwrap();
    ensure(
        (r.distribution.total() - 1.0).abs() <= TOLERANCE.validation,
        || "distribution total".into(),
    )?;
    ensure(r.payoff_i >= -1e-12 && r.payoff_i <= 5.0 + 1e-12, || {
        format!("payoff {}", r.payoff_i)
    })
}

pub fn phase_input() -> impl Strategy<Value = (Gate1Q, Gate1Q, f64, f64, f64, EntanglerMode)> {
    (unitary(), unitary(), -PI..=PI, -PI..=PI, gamma(), mode())
}

/// Global phases on either player's gate leave the outcome unchanged.
pub fn check_phase_invariance(
    (u1, u2, chi1, chi2, gamma, mode): (Gate1Q, Gate1Q, f64, f64, f64, EntanglerMode),
) -> Result<(), TestCaseError> {
    let p = Protocol::new(canonical_pd(), gamma, mode).unwrap();
    let base = p.run(&u1, &u2).unwrap();
    let v1 = u1.scale(C64::from_polar(1.0, chi1));
    let v2 = u2.scale(C64::from_polar(1.0, chi2));
    let shifted = p.run(&v1, &v2).unwrap();
    ensure(
        base.distribution
            .approx_eq(&shifted.distribution, TOLERANCE.identity),
        || format!("{:?} vs {:?}", base.distribution, shifted.distribution),
    )?;
    let s = shifted.final_state.unwrap();
    let b = base.final_state.unwrap();
    let phase = C64::from_polar(1.0, chi1 + chi2);
    let rotated = PureState2Q::new(b.amps().map(|a| a * phase)).unwrap();
    ensure(s.approx_eq(&rotated, TOLERANCE.identity), || {
        "state differs by more than the phase".into()
    })
}

pub fn dominance_input() -> impl Strategy<Value = (StrategyParamsA, Gate1Q, f64, EntanglerMode)> {
    (params_a(), unitary(), gamma(), mode())
}

/// Every set-A gate is the set-B gate with `α = φ, β = 0`, so any payoff
/// reachable in A is reachable in B.
pub fn check_b_contains_a(
    (a, opp, gamma, mode): (StrategyParamsA, Gate1Q, f64, EntanglerMode),
) -> Result<(), TestCaseError> {
    let ga = gate_from_a(&a).unwrap();
    let gb = gate_from_b(&StrategyParamsB::new(a.theta, a.phi, 0.0).unwrap()).unwrap();
    ensure(ga.approx_eq(&gb, TOLERANCE.identity), || {
        format!("{ga} vs {gb}")
    })?;
    let p = Protocol::new(canonical_pd(), gamma, mode).unwrap();
    let x = p.run(&ga, &opp).unwrap();
    let y = p.run(&gb, &opp).unwrap();
    ensure(
        (x.payoff_i - y.payoff_i).abs() <= TOLERANCE.identity,
        || "payoffs differ".into(),
    )
}

/// Runs `check` on `cases` seeded inputs; returns the failure message.
pub fn run_suite<S: Strategy>(
    cases: u32,
    strategy: S,
    check: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases)
        .run(&strategy, check)
        .map_err(|e| e.to_string())
}
