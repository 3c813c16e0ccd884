//! The EWL protocol: the referee entangles `|00⟩` with `J(γ)`, each player
//! applies a local unitary to their own qubit, the referee applies `J(γ)†`
//! and measures in the computational basis.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::games::Bimatrix;
use crate::qcore::{
    self, check_gamma, EntanglerMode, Gate1Q, Gate2Q, OutcomeDistribution, PureState2Q, C64, I,
    ONE, ZERO,
};

/// Default cap on the number of gates in a mixed quantum strategy.
pub const DEFAULT_SUPPORT_CAP: usize = 4;

/// Parameters of the two-parameter strategy set: `θ, φ ∈ [0, π/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyParamsA {
    pub theta: f64,
    pub phi: f64,
}

impl StrategyParamsA {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        let p = Self { theta, phi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_range("theta", self.theta, 0.0, FRAC_PI_2)?;
        check_range("phi", self.phi, 0.0, FRAC_PI_2)
    }
}

/// Parameters of the three-parameter strategy set:
/// `θ ∈ [0, π/2]`, `α, β ∈ [−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyParamsB {
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl StrategyParamsB {
    pub fn new(theta: f64, alpha: f64, beta: f64) -> Result<Self> {
        let p = Self { theta, alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_range("theta", self.theta, 0.0, FRAC_PI_2)?;
        check_range("alpha", self.alpha, -PI, PI)?;
        check_range("beta", self.beta, -PI, PI)
    }
}

/// `[[e^{iφ} cos θ, sin θ], [−sin θ, e^{−iφ} cos θ]]`.
pub fn gate_from_a(p: &StrategyParamsA) -> Result<Gate1Q> {
    p.validate()?;
    Ok(set_a_gate(p.theta, p.phi))
}

/// `[[e^{iα} cos θ, e^{iβ} sin θ], [−e^{−iβ} sin θ, e^{−iα} cos θ]]`.
pub fn gate_from_b(p: &StrategyParamsB) -> Result<Gate1Q> {
    p.validate()?;
    Ok(set_b_gate(p.theta, p.alpha, p.beta))
}

pub(crate) fn set_a_gate(theta: f64, phi: f64) -> Gate1Q {
    set_b_gate(theta, phi, 0.0)
}

pub(crate) fn set_b_gate(theta: f64, alpha: f64, beta: f64) -> Gate1Q {
    let (s, c) = theta.sin_cos();
    let ea = C64::from_polar(1.0, alpha);
    let eb = C64::from_polar(1.0, beta);
    Gate1Q::from_entries_unchecked([[ea * c, eb * s], [-eb.conj() * s, ea.conj() * c]])
}

/// A gate with a display label, e.g. `"Q"` or `"B(pi/8,-pi/2,0)"`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGate {
    pub label: String,
    pub gate: Gate1Q,
}

impl LabeledGate {
    pub fn new(label: impl Into<String>, gate: Gate1Q) -> Self {
        Self {
            label: label.into(),
            gate,
        }
    }
}

/// Formats an angle as a rational multiple of π when it is one with a
/// denominator up to 64 (`"pi/2"`, `"-3pi/8"`), else as a decimal.
pub fn format_angle(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    for den in [1u32, 2, 4, 8, 16, 32, 64, 3, 6, 12] {
        let num = x / PI * den as f64;
        let rounded = num.round();
        if (num - rounded).abs() < 1e-12 && rounded != 0.0 {
            let n = rounded as i64;
            let sign = if n < 0 { "-" } else { "" };
            let coef = match n.unsigned_abs() {
                1 => String::new(),
                k => k.to_string(),
            };
            return if den == 1 {
                format!("{sign}{coef}pi")
            } else {
                format!("{sign}{coef}pi/{den}")
            };
        }
    }
    format!("{x}")
}

/// The named strategies: cooperate, defect and the quantum move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalGates {
    pub c: Gate1Q,
    pub d: Gate1Q,
    pub q: Gate1Q,
}

/// The defect gate that commutes with the entangler's generator in `mode`:
/// `iσx` for the literal `σx⊗σx` entangler and `[[0, 1], [−1, 0]]` for the
/// faithful one.
pub fn canonical_defect(mode: EntanglerMode) -> Gate1Q {
    match mode {
        EntanglerMode::PaperLiteral => Gate1Q::pauli_x().scale(I),
        EntanglerMode::EwlFaithful => mode.generator(),
    }
}

/// `C = I`, `D` per [`canonical_defect`], `Q = diag(i, −i)`.
pub fn canonical_gates(mode: EntanglerMode) -> CanonicalGates {
    CanonicalGates {
        c: Gate1Q::identity(),
        d: canonical_defect(mode),
        q: Gate1Q::from_entries_unchecked([[I, ZERO], [ZERO, -I]]),
    }
}

/// The set-A gate at `θ = π/2`, i.e. `[[0, 1], [−1, 0]]`, regardless of mode.
pub fn set_a_defect() -> Gate1Q {
    Gate1Q::from_entries_unchecked([[ZERO, ONE], [-ONE, ZERO]])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolResult {
    pub distribution: OutcomeDistribution,
    pub payoff_i: f64,
    pub payoff_ii: f64,
    /// `None` for mixed strategies, whose outcome is not a pure state.
    pub final_state: Option<PureState2Q>,
}

impl ProtocolResult {
    pub fn payoffs(&self) -> (f64, f64) {
        (self.payoff_i, self.payoff_ii)
    }
}

/// A game bound to an entangler; evaluates strategy profiles.
#[derive(Debug, Clone)]
pub struct Protocol {
    game: Bimatrix,
    gamma: f64,
    mode: EntanglerMode,
    entangler: Gate2Q,
    disentangler: Gate2Q,
    entangled: PureState2Q,
}

impl Protocol {
    pub fn new(game: Bimatrix, gamma: f64, mode: EntanglerMode) -> Result<Self> {
        let gamma = check_gamma(gamma)?;
        let entangler = qcore::entangler(gamma, mode)?;
        let disentangler = entangler.dagger();
        let entangled = entangler.apply(&PureState2Q::zero());
        Ok(Self {
            game,
            gamma,
            mode,
            entangler,
            disentangler,
            entangled,
        })
    }

    pub fn game(&self) -> &Bimatrix {
        &self.game
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mode(&self) -> EntanglerMode {
        self.mode
    }

    pub fn entangler(&self) -> &Gate2Q {
        &self.entangler
    }

    pub fn disentangler(&self) -> &Gate2Q {
        &self.disentangler
    }

    /// `J|00⟩`, the state handed to the players.
    pub fn entangled_state(&self) -> &PureState2Q {
        &self.entangled
    }

    /// `J† (u1 ⊗ u2) J |00⟩` without re-validating the gates.
    pub(crate) fn final_state_unchecked(&self, u1: &Gate1Q, u2: &Gate1Q) -> PureState2Q {
        let psi = self.entangled.amps();
        let (a, b) = (u1.entries(), u2.entries());
        let mut mid = [ZERO; 4];
        for (k, out) in mid.iter_mut().enumerate() {
            let (r1, r2) = (k / 2, k % 2);
            *out = (0..4).map(|j| a[r1][j / 2] * b[r2][j % 2] * psi[j]).sum();
        }
        let m = self.disentangler.entries();
        let mut amps = [ZERO; 4];
        for (r, out) in amps.iter_mut().enumerate() {
            *out = (0..4).map(|c| m[r][c] * mid[c]).sum();
        }
        PureState2Q::new(amps).unwrap_or_else(|_| renormalized(amps))
    }

    pub(crate) fn distribution_unchecked(&self, u1: &Gate1Q, u2: &Gate1Q) -> OutcomeDistribution {
        qcore::measure(&self.final_state_unchecked(u1, u2))
    }

    pub(crate) fn payoffs_unchecked(&self, u1: &Gate1Q, u2: &Gate1Q) -> (f64, f64) {
        self.game
            .expected_over(&self.distribution_unchecked(u1, u2))
    }

    pub fn run(&self, u1: &Gate1Q, u2: &Gate1Q) -> Result<ProtocolResult> {
        u1.validate("Player I gate")?;
        u2.validate("Player II gate")?;
        let state = self.final_state_unchecked(u1, u2);
        let distribution = qcore::measure(&state);
        let (payoff_i, payoff_ii) = self.game.expected_over(&distribution);
        Ok(ProtocolResult {
            distribution,
            payoff_i,
            payoff_ii,
            final_state: Some(state),
        })
    }

    pub fn run_mixed(
        &self,
        m1: &MixedQuantumStrategy,
        m2: &MixedQuantumStrategy,
    ) -> Result<ProtocolResult> {
        let mut probs = [0.0; 4];
        for (w1, u) in m1.support() {
            for (w2, v) in m2.support() {
                let d = self.distribution_unchecked(u, v);
                for (acc, p) in probs.iter_mut().zip(d.probs()) {
                    *acc += w1 * w2 * p;
                }
            }
        }
        let distribution = OutcomeDistribution::new(probs)?;
        let (payoff_i, payoff_ii) = self.game.expected_over(&distribution);
        Ok(ProtocolResult {
            distribution,
            payoff_i,
            payoff_ii,
            final_state: None,
        })
    }
}

// Unitary gates applied to a normalized state can only drift from unit norm
// by rounding; keep the state rather than fail.
fn renormalized(amps: [C64; 4]) -> PureState2Q {
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    PureState2Q::new(amps.map(|a| a / norm)).expect("renormalized state")
}

pub fn run_protocol(
    game: &Bimatrix,
    gamma: f64,
    mode: EntanglerMode,
    u1: &Gate1Q,
    u2: &Gate1Q,
) -> Result<ProtocolResult> {
    Protocol::new(game.clone(), gamma, mode)?.run(u1, u2)
}

/// A finite probability distribution over unitary strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedQuantumStrategy {
    support: Vec<(f64, Gate1Q)>,
}

impl MixedQuantumStrategy {
    pub fn new(support: Vec<(f64, Gate1Q)>, cap: usize) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidMixedStrategy("empty support".into()));
        }
        if support.len() > cap {
            return Err(Error::InvalidMixedStrategy(format!(
                "support of size {} exceeds cap {cap}",
                support.len()
            )));
        }
        for (k, (w, g)) in support.iter().enumerate() {
            check_range(&format!("weight[{k}]"), *w, 0.0, 1.0 + 1e-9)?;
            g.validate(&format!("support gate {k}"))?;
        }
        let total: f64 = support.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidMixedStrategy(format!(
                "weights sum to {total}"
            )));
        }
        Ok(Self { support })
    }

    pub fn point(g: Gate1Q) -> Self {
        Self {
            support: vec![(1.0, g)],
        }
    }

    pub fn support(&self) -> &[(f64, Gate1Q)] {
        &self.support
    }
}

pub fn run_protocol_mixed(
    game: &Bimatrix,
    gamma: f64,
    mode: EntanglerMode,
    m1: &MixedQuantumStrategy,
    m2: &MixedQuantumStrategy,
) -> Result<ProtocolResult> {
    Protocol::new(game.clone(), gamma, mode)?.run_mixed(m1, m2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::canonical_pd;

    const MODES: [EntanglerMode; 2] = [EntanglerMode::PaperLiteral, EntanglerMode::EwlFaithful];

    fn payoffs(mode: EntanglerMode, gamma: f64, u1: &Gate1Q, u2: &Gate1Q) -> (f64, f64) {
        run_protocol(&canonical_pd(), gamma, mode, u1, u2)
            .unwrap()
            .payoffs()
    }

    fn close(a: (f64, f64), b: (f64, f64), tol: f64) -> bool {
        (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol
    }

    #[test]
    fn angle_labels() {
        assert_eq!(format_angle(0.0), "0");
        assert_eq!(format_angle(PI), "pi");
        assert_eq!(format_angle(-PI / 2.0), "-pi/2");
        assert_eq!(format_angle(3.0 * PI / 8.0), "3pi/8");
        assert_eq!(format_angle(0.25), "0.25");
    }

    #[test]
    fn set_a_examples() {
        let c = gate_from_a(&StrategyParamsA::new(0.0, 0.0).unwrap()).unwrap();
        assert!(c.approx_eq(&Gate1Q::identity(), 0.0));
        let d = gate_from_a(&StrategyParamsA::new(FRAC_PI_2, 0.0).unwrap()).unwrap();
        assert!(d.approx_eq(&set_a_defect(), 1e-15));
        let q = gate_from_a(&StrategyParamsA::new(0.0, FRAC_PI_2).unwrap()).unwrap();
        assert!(q.approx_eq(&canonical_gates(EntanglerMode::EwlFaithful).q, 1e-15));
        assert!(q.is_unitary(1e-12));
    }

    #[test]
    fn set_b_examples() {
        let id = gate_from_b(&StrategyParamsB::new(0.0, 0.0, 0.0).unwrap()).unwrap();
        assert!(id.approx_eq(&Gate1Q::identity(), 0.0));
        let ix = gate_from_b(&StrategyParamsB::new(FRAC_PI_2, 0.0, FRAC_PI_2).unwrap()).unwrap();
        assert!(ix.approx_eq(&Gate1Q::pauli_x().scale(I), 1e-15));
        for i in 0..=8 {
            for j in 0..=8 {
                let (t, f) = (i as f64 * FRAC_PI_2 / 8.0, j as f64 * FRAC_PI_2 / 8.0);
                let a = gate_from_a(&StrategyParamsA::new(t, f).unwrap()).unwrap();
                let b = gate_from_b(&StrategyParamsB::new(t, f, 0.0).unwrap()).unwrap();
                assert!(a.approx_eq(&b, 0.0));
                assert!(b.is_unitary(1e-12));
            }
        }
    }

    #[test]
    fn parameter_ranges_are_enforced() {
        assert!(matches!(
            StrategyParamsA::new(2.0, 0.0),
            Err(Error::OutOfRange { .. })
        ));
        assert!(StrategyParamsA::new(0.0, -0.1).is_err());
        assert!(StrategyParamsB::new(0.0, 4.0, 0.0).is_err());
        assert!(StrategyParamsB::new(0.0, 0.0, -PI).is_ok());
        let raw = StrategyParamsA {
            theta: 0.0,
            phi: 3.0,
        };
        assert!(gate_from_a(&raw).is_err());
    }

    #[test]
    fn cooperation_is_invariant_in_gamma() {
        let id = Gate1Q::identity();
        for mode in MODES {
            for k in 0..=10 {
                let gamma = k as f64 * FRAC_PI_2 / 10.0;
                assert!(close(payoffs(mode, gamma, &id, &id), (3.0, 3.0), 1e-12));
            }
        }
    }

    #[test]
    fn defect_pair_at_full_entanglement() {
        for mode in MODES {
            let d = canonical_defect(mode);
            assert!(close(payoffs(mode, FRAC_PI_2, &d, &d), (1.0, 1.0), 1e-12));
        }
    }

    #[test]
    fn quantum_pair_at_full_entanglement() {
        for mode in MODES {
            let q = canonical_gates(mode).q;
            let r = run_protocol(&canonical_pd(), FRAC_PI_2, mode, &q, &q).unwrap();
            assert!(close(r.payoffs(), (3.0, 3.0), 1e-12));
            assert!(r.distribution.approx_eq(
                &OutcomeDistribution::new([1.0, 0.0, 0.0, 0.0]).unwrap(),
                1e-12
            ));
        }
    }

    #[test]
    fn faithful_mode_attributes_defection_correctly() {
        let mode = EntanglerMode::EwlFaithful;
        let g = canonical_gates(mode);
        let r = run_protocol(&canonical_pd(), FRAC_PI_2, mode, &g.c, &g.d).unwrap();
        assert!(close(r.payoffs(), (0.0, 5.0), 1e-12));
        assert!(r.distribution.approx_eq(
            &OutcomeDistribution::new([0.0, 1.0, 0.0, 0.0]).unwrap(),
            1e-12
        ));
    }

    #[test]
    fn literal_mode_swaps_set_a_defection() {
        // With the σx⊗σx entangler, the set-A defect gate lands on |10⟩.
        let r = run_protocol(
            &canonical_pd(),
            FRAC_PI_2,
            EntanglerMode::PaperLiteral,
            &Gate1Q::identity(),
            &set_a_defect(),
        )
        .unwrap();
        assert!(close(r.payoffs(), (5.0, 0.0), 1e-12));
    }

    #[test]
    fn mixed_reduces_to_pure() {
        let mode = EntanglerMode::EwlFaithful;
        let g = canonical_gates(mode);
        let pure = run_protocol(&canonical_pd(), 0.7, mode, &g.q, &g.d).unwrap();
        let mixed = run_protocol_mixed(
            &canonical_pd(),
            0.7,
            mode,
            &MixedQuantumStrategy::point(g.q),
            &MixedQuantumStrategy::point(g.d),
        )
        .unwrap();
        assert_eq!(pure.distribution, mixed.distribution);
        assert!(mixed.final_state.is_none());
    }

    #[test]
    fn uniform_classical_mix_at_zero_gamma() {
        for mode in MODES {
            let g = canonical_gates(mode);
            let m = MixedQuantumStrategy::new(vec![(0.5, g.c), (0.5, g.d)], DEFAULT_SUPPORT_CAP)
                .unwrap();
            let r = run_protocol_mixed(&canonical_pd(), 0.0, mode, &m, &m).unwrap();
            assert!(close(r.payoffs(), (2.25, 2.25), 1e-12));
        }
    }

    #[test]
    fn mixed_strategy_validation() {
        let id = Gate1Q::identity();
        assert!(matches!(
            MixedQuantumStrategy::new(vec![], 4),
            Err(Error::InvalidMixedStrategy(_))
        ));
        assert!(MixedQuantumStrategy::new(vec![(0.5, id), (0.4, id)], 4).is_err());
        assert!(MixedQuantumStrategy::new(vec![(0.2, id); 5], 4).is_err());
        assert!(MixedQuantumStrategy::new(vec![(-0.5, id), (1.5, id)], 4).is_err());
        let bad = Gate1Q::from_entries_unchecked([[ONE, ONE], [ZERO, ONE]]);
        assert!(MixedQuantumStrategy::new(vec![(1.0, bad)], 4).is_err());
    }

    #[test]
    fn run_rejects_non_unitary_gate() {
        let bad = Gate1Q::from_entries_unchecked([[ONE, ONE], [ZERO, ONE]]);
        let err = run_protocol(&canonical_pd(), 0.0, EntanglerMode::EwlFaithful, &bad, &bad);
        assert!(matches!(err, Err(Error::NotUnitary { .. })));
        assert!(
            run_protocol(&canonical_pd(), 2.0, EntanglerMode::EwlFaithful, &bad, &bad).is_err()
        );
    }

    #[test]
    fn payoffs_match_distribution() {
        let mode = EntanglerMode::PaperLiteral;
        let u = set_b_gate(0.3, 1.1, -2.0);
        let v = set_b_gate(1.2, -0.4, 0.9);
        let r = run_protocol(&canonical_pd(), 1.0, mode, &u, &v).unwrap();
        let p = r.distribution.probs();
        let expect_i = 3.0 * p[0] + 5.0 * p[2] + p[3];
        let expect_ii = 3.0 * p[0] + 5.0 * p[1] + p[3];
        assert!((r.payoff_i - expect_i).abs() < 1e-12);
        assert!((r.payoff_ii - expect_ii).abs() < 1e-12);
    }
}
