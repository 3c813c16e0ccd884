//! Noisy-channel variants of the protocol, evaluated on dense density
//! matrices, plus entanglement sweeps and the noise level at which the
//! quantum advantage disappears.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Matrix4;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::ewl::{Protocol, ProtocolResult};
use crate::games::Bimatrix;
use crate::qcore::{
    self, mat4_dagger, mat4_mul, EntanglerMode, Gate1Q, Gate2Q, Mat4, OutcomeDistribution,
    PureState2Q, C64, TOLERANCE, ZERO,
};
use crate::search::{
    best_symmetric_equilibrium, linspace, PayoffOracle, SearchConfig, StrategySpace,
};

/// A two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2Q {
    entries: Mat4,
}

impl DensityMatrix2Q {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(entries: Mat4) -> Result<Self> {
        let rho = Self { entries };
        rho.validate()?;
        Ok(rho)
    }

    pub fn from_pure(s: &PureState2Q) -> Self {
        let a = s.amps();
        let mut entries = [[ZERO; 4]; 4];
        for (r, row) in entries.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = a[r] * a[c].conj();
            }
        }
        Self { entries }
    }

    /// `I/4`.
    pub fn maximally_mixed() -> Self {
        let mut entries = [[ZERO; 4]; 4];
        for (k, row) in entries.iter_mut().enumerate() {
            row[k] = C64::new(0.25, 0.0);
        }
        Self { entries }
    }

    pub fn entries(&self) -> &Mat4 {
        &self.entries
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|k| self.entries[k][k]).sum()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                worst = worst.max((self.entries[r][c] - self.entries[c][r].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order (of the Hermitian part).
    pub fn eigenvalues(&self) -> [f64; 4] {
        let m = Matrix4::from_fn(|r, c| (self.entries[r][c] + self.entries[c][r].conj()) * 0.5);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2], ev[3]]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn validate(&self) -> Result<()> {
        let tol = TOLERANCE.validation;
        if self
            .entries
            .iter()
            .flatten()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("density matrix".into()));
        }
        let h = self.hermiticity_deviation();
        if h > tol {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {h:e})"
            )));
        }
        let t = self.trace();
        if (t - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidDensityMatrix(format!("trace is {t}")));
        }
        let m = self.min_eigenvalue();
        if m < -tol {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {m:e}"
            )));
        }
        Ok(())
    }

    /// `G ρ G†`.
    pub fn conjugate(&self, g: &Gate2Q) -> Self {
        Self {
            entries: conj(g.entries(), &self.entries),
        }
    }

    /// Computational-basis measurement: the diagonal.
    pub fn measure(&self) -> OutcomeDistribution {
        let probs = [0, 1, 2, 3].map(|k| self.entries[k][k].re.max(0.0));
        let total: f64 = probs.iter().sum();
        OutcomeDistribution::from_probs_unchecked(probs.map(|p| p / total))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .all(|(a, b)| (a - b).norm() <= tol)
    }
}

fn conj(g: &Mat4, rho: &Mat4) -> Mat4 {
    mat4_mul(&mat4_mul(g, rho), &mat4_dagger(g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    #[default]
    None,
    PerQubitDepolarizing,
    TwoQubitDepolarizing,
}

/// Where the channel acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoisePlacement {
    /// After the player gates, before `J†`.
    #[default]
    Return,
    /// After `J`, before the player gates.
    Forward,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub p: f64,
    pub placement: NoisePlacement,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, p: f64) -> Result<Self> {
        let spec = Self {
            kind,
            p,
            placement: NoisePlacement::Return,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn with_placement(self, placement: NoisePlacement) -> Self {
        Self { placement, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        check_range("noise.p", self.p, 0.0, 1.0)
    }

    /// Whether the channel is the identity map.
    pub fn is_identity(&self) -> bool {
        self.kind == NoiseKind::None || self.p == 0.0
    }

    /// Applies the channel. The spec is assumed valid.
    pub fn apply(&self, rho: &DensityMatrix2Q) -> DensityMatrix2Q {
        match self.kind {
            NoiseKind::None => *rho,
            NoiseKind::TwoQubitDepolarizing => {
                let mut entries = rho.entries;
                for (r, row) in entries.iter_mut().enumerate() {
                    for (c, e) in row.iter_mut().enumerate() {
                        *e *= 1.0 - self.p;
                        if r == c {
                            *e += self.p / 4.0;
                        }
                    }
                }
                DensityMatrix2Q { entries }
            }
            NoiseKind::PerQubitDepolarizing => {
                let once = depolarize_qubit(&rho.entries, self.p, 0);
                DensityMatrix2Q {
                    entries: depolarize_qubit(&once, self.p, 1),
                }
            }
        }
    }

    /// Kraus operators of the full two-qubit channel.
    pub fn kraus_operators(&self) -> Vec<Gate2Q> {
        match self.kind {
            NoiseKind::None => vec![Gate2Q::identity()],
            NoiseKind::PerQubitDepolarizing => {
                let single = single_qubit_kraus(self.p);
                let mut out = Vec::with_capacity(16);
                for a in &single {
                    for b in &single {
                        out.push(Gate2Q::from_entries_unchecked(kron(a, b)));
                    }
                }
                out
            }
            NoiseKind::TwoQubitDepolarizing => {
                // Uniform Pauli twirl: p·I/4 = (p/16) Σ_{P,Q} (P⊗Q) ρ (P⊗Q)†.
                let paulis = paulis();
                let mut out = Vec::with_capacity(17);
                out.push(Gate2Q::from_entries_unchecked(scaled4(
                    &kron(&paulis[0], &paulis[0]),
                    (1.0 - self.p).sqrt(),
                )));
                for a in &paulis {
                    for b in &paulis {
                        out.push(Gate2Q::from_entries_unchecked(scaled4(
                            &kron(a, b),
                            (self.p / 16.0).sqrt(),
                        )));
                    }
                }
                out
            }
        }
    }
}

fn paulis() -> [Gate1Q; 4] {
    [
        Gate1Q::identity(),
        Gate1Q::pauli_x(),
        Gate1Q::pauli_y(),
        Gate1Q::pauli_z(),
    ]
}

fn single_qubit_kraus(p: f64) -> [Gate1Q; 4] {
    let [i, x, y, z] = paulis();
    let w = C64::new((p / 3.0).sqrt(), 0.0);
    [
        i.scale(C64::new((1.0 - p).sqrt(), 0.0)),
        x.scale(w),
        y.scale(w),
        z.scale(w),
    ]
}

fn kron(a: &Gate1Q, b: &Gate1Q) -> Mat4 {
    let (a, b) = (a.entries(), b.entries());
    let mut m = [[ZERO; 4]; 4];
    for (r, row) in m.iter_mut().enumerate() {
        for (c, e) in row.iter_mut().enumerate() {
            *e = a[r / 2][c / 2] * b[r % 2][c % 2];
        }
    }
    m
}

fn scaled4(m: &Mat4, s: f64) -> Mat4 {
    m.map(|row| row.map(|e| e * s))
}

/// Single-qubit depolarizing channel on `qubit` (0 = Player I's).
fn depolarize_qubit(rho: &Mat4, p: f64, qubit: usize) -> Mat4 {
    let id = Gate1Q::identity();
    let mut out = [[ZERO; 4]; 4];
    for k in single_qubit_kraus(p) {
        let full = if qubit == 0 {
            kron(&k, &id)
        } else {
            kron(&id, &k)
        };
        let term = conj(&full, rho);
        for (o, t) in out.iter_mut().flatten().zip(term.iter().flatten()) {
            *o += t;
        }
    }
    out
}

/// A protocol whose transmitted state passes through a noise channel.
#[derive(Debug, Clone)]
pub struct NoisyProtocol {
    protocol: Protocol,
    noise: NoiseSpec,
    forward_state: DensityMatrix2Q,
}

impl NoisyProtocol {
    pub fn new(protocol: Protocol, noise: NoiseSpec) -> Result<Self> {
        noise.validate()?;
        let forward_state = noise.apply(&DensityMatrix2Q::from_pure(protocol.entangled_state()));
        Ok(Self {
            protocol,
            noise,
            forward_state,
        })
    }

    pub fn protocol(&self) -> &Protocol {
        &self.protocol
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    /// Density matrix handed to the measurement.
    pub fn final_density(&self, u1: &Gate1Q, u2: &Gate1Q) -> DensityMatrix2Q {
        let players = Gate2Q::from_entries_unchecked(kron(u1, u2));
        let after_players = match self.noise.placement {
            NoisePlacement::Forward => self.forward_state.conjugate(&players),
            NoisePlacement::Return => {
                let rho = DensityMatrix2Q::from_pure(self.protocol.entangled_state());
                self.noise.apply(&rho.conjugate(&players))
            }
        };
        after_players.conjugate(self.protocol.disentangler())
    }

    fn distribution_unchecked(&self, u1: &Gate1Q, u2: &Gate1Q) -> OutcomeDistribution {
        if self.noise.is_identity() {
            return self.protocol.distribution_unchecked(u1, u2);
        }
        self.final_density(u1, u2).measure()
    }

    pub fn run(&self, u1: &Gate1Q, u2: &Gate1Q) -> Result<ProtocolResult> {
        if self.noise.is_identity() {
            return self.protocol.run(u1, u2);
        }
        u1.validate("Player I gate")?;
        u2.validate("Player II gate")?;
        let distribution = self.distribution_unchecked(u1, u2);
        let (payoff_i, payoff_ii) = self.protocol.game().expected_over(&distribution);
        Ok(ProtocolResult {
            distribution,
            payoff_i,
            payoff_ii,
            final_state: None,
        })
    }
}

impl PayoffOracle for NoisyProtocol {
    fn game(&self) -> &Bimatrix {
        self.protocol.game()
    }

    fn payoffs(&self, u1: &Gate1Q, u2: &Gate1Q) -> (f64, f64) {
        self.protocol
            .game()
            .expected_over(&self.distribution_unchecked(u1, u2))
    }
}

pub fn run_protocol_noisy(
    game: &Bimatrix,
    gamma: f64,
    mode: EntanglerMode,
    u1: &Gate1Q,
    u2: &Gate1Q,
    noise: &NoiseSpec,
) -> Result<ProtocolResult> {
    let protocol = Protocol::new(game.clone(), gamma, mode)?;
    NoisyProtocol::new(protocol, *noise)?.run(u1, u2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub payoff_i: f64,
    pub payoff_ii: f64,
}

/// Payoffs of `(u1, u2)` on a uniform grid of `steps` entanglement values
/// over `[0, π/2]`.
pub fn gamma_sweep(
    game: &Bimatrix,
    mode: EntanglerMode,
    u1: &Gate1Q,
    u2: &Gate1Q,
    steps: usize,
) -> Result<Vec<SweepRow>> {
    gamma_sweep_with_noise(game, mode, u1, u2, steps, &NoiseSpec::none())
}

pub fn gamma_sweep_with_noise(
    game: &Bimatrix,
    mode: EntanglerMode,
    u1: &Gate1Q,
    u2: &Gate1Q,
    steps: usize,
    noise: &NoiseSpec,
) -> Result<Vec<SweepRow>> {
    if steps < 2 {
        return Err(Error::InvalidConfig(format!(
            "sweep steps must be at least 2, got {steps}"
        )));
    }
    u1.validate("Player I gate")?;
    u2.validate("Player II gate")?;
    noise.validate()?;
    linspace(0.0, FRAC_PI_2, steps)
        .into_par_iter()
        .map(|gamma| {
            let r = run_protocol_noisy(game, gamma, mode, u1, u2, noise)?;
            Ok(SweepRow {
                gamma,
                payoff_i: r.payoff_i,
                payoff_ii: r.payoff_ii,
            })
        })
        .collect()
}

/// Payoff below which the quantum advantage is considered lost.
pub const NOTIONAL_LIMIT: f64 = 2.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdConfig {
    pub search: SearchConfig,
    pub gamma: f64,
    pub placement: NoisePlacement,
    pub tolerance: f64,
    pub limit: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            search: SearchConfig::default(),
            gamma: FRAC_PI_2,
            placement: NoisePlacement::Return,
            tolerance: 1e-3,
            limit: NOTIONAL_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Threshold {
    /// Smallest noise level (to within the tolerance, rounded up) at which
    /// the payoff is below the limit.
    Found {
        p_star: f64,
        bracket: (f64, f64),
    },
    NoThreshold,
}

/// Payoff of the best symmetric set-A equilibrium at noise level `p`;
/// negative infinity when the search finds none.
pub fn symmetric_equilibrium_payoff(
    game: &Bimatrix,
    mode: EntanglerMode,
    kind: NoiseKind,
    p: f64,
    cfg: &ThresholdConfig,
) -> Result<f64> {
    let protocol = Protocol::new(game.clone(), cfg.gamma, mode)?;
    let noise = NoiseSpec::new(kind, p)?.with_placement(cfg.placement);
    let noisy = NoisyProtocol::new(protocol, noise)?;
    Ok(
        best_symmetric_equilibrium(&noisy, &StrategySpace::A, &cfg.search)?
            .map(|e| e.payoff)
            .unwrap_or(f64::NEG_INFINITY),
    )
}

/// Bisection for the noise level at which the best symmetric equilibrium
/// payoff falls below `cfg.limit`.
pub fn advantage_threshold(
    game: &Bimatrix,
    mode: EntanglerMode,
    kind: NoiseKind,
    cfg: &ThresholdConfig,
) -> Result<Threshold> {
    if cfg.tolerance.is_nan() || cfg.tolerance <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "threshold tolerance must be positive, got {}",
            cfg.tolerance
        )));
    }
    if kind == NoiseKind::None {
        return Ok(Threshold::NoThreshold);
    }
    let f = |p: f64| symmetric_equilibrium_payoff(game, mode, kind, p, cfg);
    if f(0.0)? < cfg.limit || f(1.0)? >= cfg.limit {
        return Ok(Threshold::NoThreshold);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > cfg.tolerance {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < cfg.limit {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Threshold::Found {
        p_star: hi,
        bracket: (lo, hi),
    })
}

/// Reference to the entangler, for callers composing channels by hand.
pub fn entangler_density(gamma: f64, mode: EntanglerMode) -> Result<DensityMatrix2Q> {
    let j = qcore::entangler(gamma, mode)?;
    Ok(DensityMatrix2Q::from_pure(&j.apply(&PureState2Q::zero())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ewl::{canonical_gates, run_protocol};
    use crate::games::canonical_pd;

    const MODE: EntanglerMode = EntanglerMode::EwlFaithful;

    /// Depolarizing closed form: `(1 − 4p/3) ρ + (4p/3) · (I/2 ⊗ Tr₁ρ)` on
    /// qubit 0, and symmetrically on qubit 1.
    fn closed_form_qubit(rho: &Mat4, p: f64, qubit: usize) -> Mat4 {
        let lam = 4.0 * p / 3.0;
        let mut out = [[ZERO; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                let (r1, r2, c1, c2) = (r / 2, r % 2, c / 2, c % 2);
                let reduced = if qubit == 0 {
                    if r1 != c1 {
                        ZERO
                    } else {
                        (rho[r2][c2] + rho[2 + r2][2 + c2]) * 0.5
                    }
                } else if r2 != c2 {
                    ZERO
                } else {
                    (rho[2 * r1][2 * c1] + rho[2 * r1 + 1][2 * c1 + 1]) * 0.5
                };
                out[r][c] = rho[r][c] * (1.0 - lam) + reduced * lam;
            }
        }
        out
    }

    fn sample_state() -> DensityMatrix2Q {
        let g = canonical_gates(MODE);
        let p = Protocol::new(canonical_pd(), 0.9, MODE).unwrap();
        let u = crate::ewl::set_b_gate(0.3, 1.1, -0.4);
        let s = p.final_state_unchecked(&u, &g.q);
        DensityMatrix2Q::from_pure(&s)
    }

    #[test]
    fn per_qubit_matches_closed_form() {
        let rho = sample_state();
        for p in [0.0, 0.1, 0.5, 0.75, 1.0] {
            let got = NoiseSpec::new(NoiseKind::PerQubitDepolarizing, p)
                .unwrap()
                .apply(&rho);
            let want = closed_form_qubit(&closed_form_qubit(rho.entries(), p, 0), p, 1);
            let want = DensityMatrix2Q { entries: want };
            assert!(got.approx_eq(&want, 1e-12), "p = {p}");
        }
    }

    #[test]
    fn kraus_lists_reproduce_channels() {
        let rho = sample_state();
        for kind in [
            NoiseKind::PerQubitDepolarizing,
            NoiseKind::TwoQubitDepolarizing,
        ] {
            let spec = NoiseSpec::new(kind, 0.37).unwrap();
            let mut sum = [[ZERO; 4]; 4];
            let mut completeness = [[ZERO; 4]; 4];
            for k in spec.kraus_operators() {
                let term = conj(k.entries(), rho.entries());
                let kk = mat4_mul(&mat4_dagger(k.entries()), k.entries());
                for r in 0..4 {
                    for c in 0..4 {
                        sum[r][c] += term[r][c];
                        completeness[r][c] += kk[r][c];
                    }
                }
            }
            assert!(spec
                .apply(&rho)
                .approx_eq(&DensityMatrix2Q { entries: sum }, 1e-12));
            let id = DensityMatrix2Q {
                entries: *Gate2Q::identity().entries(),
            };
            assert!(DensityMatrix2Q {
                entries: completeness
            }
            .approx_eq(&id, 1e-12));
        }
    }

    #[test]
    fn full_two_qubit_noise_is_uniform() {
        let g = canonical_gates(MODE);
        let noise = NoiseSpec::new(NoiseKind::TwoQubitDepolarizing, 1.0).unwrap();
        let r = run_protocol_noisy(&canonical_pd(), FRAC_PI_2, MODE, &g.q, &g.q, &noise).unwrap();
        for p in r.distribution.probs() {
            assert!((p - 0.25).abs() < 1e-12);
        }
        assert!((r.payoff_i - 2.25).abs() < 1e-12 && (r.payoff_ii - 2.25).abs() < 1e-12);
    }

    #[test]
    fn density_path_matches_pure_path() {
        let g = canonical_gates(MODE);
        let u = crate::ewl::set_b_gate(0.7, -0.2, 2.0);
        for placement in [NoisePlacement::Return, NoisePlacement::Forward] {
            let p = Protocol::new(canonical_pd(), 1.2, MODE).unwrap();
            let noise = NoiseSpec {
                kind: NoiseKind::PerQubitDepolarizing,
                p: 0.0,
                placement,
            };
            let noisy = NoisyProtocol::new(p.clone(), noise).unwrap();
            let d = noisy.final_density(&u, &g.d).measure();
            assert!(d.approx_eq(&p.distribution_unchecked(&u, &g.d), 1e-12));
        }
    }

    #[test]
    fn zero_noise_is_exactly_noiseless() {
        let g = canonical_gates(MODE);
        let u = crate::ewl::set_a_gate(0.4, 0.9);
        for kind in [
            NoiseKind::None,
            NoiseKind::PerQubitDepolarizing,
            NoiseKind::TwoQubitDepolarizing,
        ] {
            let noise = NoiseSpec::new(kind, 0.0).unwrap();
            let a = run_protocol_noisy(&canonical_pd(), 0.8, MODE, &u, &g.q, &noise).unwrap();
            let b = run_protocol(&canonical_pd(), 0.8, MODE, &u, &g.q).unwrap();
            assert_eq!(a.distribution, b.distribution);
        }
    }

    #[test]
    fn quantum_pair_under_light_per_qubit_noise() {
        let g = canonical_gates(MODE);
        let noise = NoiseSpec::new(NoiseKind::PerQubitDepolarizing, 0.1).unwrap();
        let r = run_protocol_noisy(&canonical_pd(), FRAC_PI_2, MODE, &g.q, &g.q, &noise).unwrap();
        assert!(r.payoff_i > 2.25 && r.payoff_i < 3.0);
        assert_eq!(r.payoff_i, r.payoff_ii);
        // Oracle: the closed form applied to the unitary output.
        let p = Protocol::new(canonical_pd(), FRAC_PI_2, MODE).unwrap();
        let players = Gate2Q::from_entries_unchecked(kron(&g.q, &g.q));
        let rho = DensityMatrix2Q::from_pure(p.entangled_state()).conjugate(&players);
        let noisy = closed_form_qubit(&closed_form_qubit(rho.entries(), 0.1, 0), 0.1, 1);
        let out = DensityMatrix2Q { entries: noisy }.conjugate(p.disentangler());
        let want = canonical_pd().expected_over(&out.measure());
        assert!((r.payoff_i - want.0).abs() < 1e-12);
        assert!((r.payoff_i - QQ_PER_QUBIT_01).abs() < 1e-12);
    }

    /// `(Q, Q)` at full entanglement, per-qubit `p = 0.1`: Bell fidelity
    /// `(1 − p)² + p²/3` on a payoff of `2 + F`.
    const QQ_PER_QUBIT_01: f64 = 211.0 / 75.0;

    #[test]
    fn validation() {
        assert!(NoiseSpec::new(NoiseKind::PerQubitDepolarizing, 1.5).is_err());
        assert!(NoiseSpec::new(NoiseKind::PerQubitDepolarizing, f64::NAN).is_err());
        let mut bad = *DensityMatrix2Q::maximally_mixed().entries();
        bad[0][1] = C64::new(0.1, 0.0);
        assert!(matches!(
            DensityMatrix2Q::new(bad),
            Err(Error::InvalidDensityMatrix(_))
        ));
        let mut neg = [[ZERO; 4]; 4];
        neg[0][0] = C64::new(1.5, 0.0);
        neg[1][1] = C64::new(-0.5, 0.0);
        assert!(DensityMatrix2Q::new(neg).is_err());
        assert!(DensityMatrix2Q::new(*DensityMatrix2Q::maximally_mixed().entries()).is_ok());
    }

    #[test]
    fn eigenvalues_of_pure_state() {
        let ev = sample_state().eigenvalues();
        assert!((ev[3] - 1.0).abs() < 1e-12);
        assert!(ev[..3].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn sweep_shapes() {
        let g = canonical_gates(MODE);
        let rows = gamma_sweep(&canonical_pd(), MODE, &g.c, &g.c, 7).unwrap();
        assert_eq!(rows.len(), 7);
        assert!(rows.iter().all(|r| (r.payoff_i - 3.0).abs() < 1e-12));
        let two = gamma_sweep(&canonical_pd(), MODE, &g.q, &g.q, 2).unwrap();
        assert_eq!(two[0].gamma, 0.0);
        assert_eq!(two[1].gamma, FRAC_PI_2);
        assert!((two[1].payoff_i - 3.0).abs() < 1e-12);
        let classical = run_protocol(&canonical_pd(), 0.0, MODE, &g.q, &g.q).unwrap();
        assert_eq!(two[0].payoff_i, classical.payoff_i);
        assert!(gamma_sweep(&canonical_pd(), MODE, &g.q, &g.q, 1).is_err());
    }

    #[test]
    fn no_noise_has_no_threshold() {
        let t = advantage_threshold(
            &canonical_pd(),
            MODE,
            NoiseKind::None,
            &ThresholdConfig::default(),
        )
        .unwrap();
        assert_eq!(t, Threshold::NoThreshold);
    }
}
