//! Exact two-qubit linear algebra.
//!
//! States are ordered over the computational basis `|00⟩, |01⟩, |10⟩, |11⟩`
//! where the left bit is Player I's qubit and the right bit is Player II's.
//! Gates are dense 2×2 / 4×4 complex matrices; at this size every operation
//! is evaluated exactly (up to floating point) with no sampling.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) type Mat2 = [[C64; 2]; 2];
pub(crate) type Mat4 = [[C64; 4]; 4];

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Numerical tolerances shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Validation of states, gates and distributions.
    pub validation: f64,
    /// Closed-form identities.
    pub identity: f64,
    /// Out-of-range angles closer than this to the boundary are clamped.
    pub clamp: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        TOLERANCE
    }
}

pub const TOLERANCE: Tolerance = Tolerance {
    validation: 1e-9,
    identity: 1e-12,
    clamp: 1e-12,
};

/// A normalized two-qubit pure state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState2Q {
    amps: [C64; 4],
}

impl PureState2Q {
    pub fn new(amps: [C64; 4]) -> Result<Self> {
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes".into()));
        }
        let state = Self { amps };
        let norm_sq = state.norm_sqr();
        if (norm_sq - 1.0).abs() > TOLERANCE.validation {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(state)
    }

    /// Computational basis state `|k⟩`, `k ∈ 0..4`.
    pub fn basis(k: usize) -> Self {
        assert!(k < 4, "basis index {k} out of range");
        let mut amps = [ZERO; 4];
        amps[k] = ONE;
        Self { amps }
    }

    /// The protocol's input state `|00⟩`.
    pub fn zero() -> Self {
        Self::basis(0)
    }

    pub fn amps(&self) -> &[C64; 4] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .all(|(a, b)| (a - b).norm() <= tol)
    }
}

/// A single-qubit unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate1Q {
    m: Mat2,
}

impl Gate1Q {
    /// Validated constructor; rejects non-finite or non-unitary matrices.
    pub fn new(m: Mat2) -> Result<Self> {
        let g = Self { m };
        g.validate("gate")?;
        Ok(g)
    }

    /// Builds a gate without checking unitarity. Operations that require a
    /// unitary (such as [`tensor`]) re-validate their operands.
    pub fn from_entries_unchecked(m: Mat2) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        Self {
            m: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    pub fn pauli_x() -> Self {
        Self {
            m: [[ZERO, ONE], [ONE, ZERO]],
        }
    }

    pub fn pauli_y() -> Self {
        Self {
            m: [[ZERO, -I], [I, ZERO]],
        }
    }

    pub fn pauli_z() -> Self {
        Self {
            m: [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    pub fn entries(&self) -> &Mat2 {
        &self.m
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = self.m[r][0] * rhs.m[0][c] + self.m[r][1] * rhs.m[1][c];
            }
        }
        Self { m: out }
    }

    pub fn dagger(&self) -> Self {
        let m = &self.m;
        Self {
            m: [
                [m[0][0].conj(), m[1][0].conj()],
                [m[0][1].conj(), m[1][1].conj()],
            ],
        }
    }

    /// Multiplies every entry by `c`. A unit-modulus `c` is a global phase.
    pub fn scale(&self, c: C64) -> Self {
        let m = &self.m;
        Self {
            m: [[m[0][0] * c, m[0][1] * c], [m[1][0] * c, m[1][1] * c]],
        }
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.dagger().mul(self);
        let mut dev: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let target = if r == c { ONE } else { ZERO };
                dev = dev.max((p.m[r][c] - target).norm());
            }
        }
        dev
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (0..2).all(|r| (0..2).all(|c| (self.m[r][c] - other.m[r][c]).norm() <= tol))
    }

    pub(crate) fn validate(&self, operand: &str) -> Result<()> {
        if self
            .m
            .iter()
            .flatten()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::NonFinite(operand.to_string()));
        }
        let deviation = self.unitarity_deviation();
        if deviation > TOLERANCE.validation {
            return Err(Error::NotUnitary {
                operand: operand.to_string(),
                deviation,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Gate1Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.m;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

/// A two-qubit unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate2Q {
    m: Mat4,
}

impl Gate2Q {
    pub fn new(m: Mat4) -> Result<Self> {
        let g = Self { m };
        if m.iter()
            .flatten()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::NonFinite("two-qubit gate".into()));
        }
        let deviation = g.unitarity_deviation();
        if deviation > TOLERANCE.validation {
            return Err(Error::NotUnitary {
                operand: "two-qubit gate".into(),
                deviation,
            });
        }
        Ok(g)
    }

    pub fn from_entries_unchecked(m: Mat4) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (k, row) in m.iter_mut().enumerate() {
            row[k] = ONE;
        }
        Self { m }
    }

    pub fn entries(&self) -> &Mat4 {
        &self.m
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            m: mat4_mul(&self.m, &rhs.m),
        }
    }

    pub fn dagger(&self) -> Self {
        Self {
            m: mat4_dagger(&self.m),
        }
    }

    pub fn apply(&self, s: &PureState2Q) -> PureState2Q {
        let mut amps = [ZERO; 4];
        for (r, out) in amps.iter_mut().enumerate() {
            *out = (0..4).map(|c| self.m[r][c] * s.amps[c]).sum();
        }
        PureState2Q { amps }
    }

    pub fn unitarity_deviation(&self) -> f64 {
        let p = mat4_mul(&mat4_dagger(&self.m), &self.m);
        let mut dev: f64 = 0.0;
        for (r, row) in p.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let target = if r == c { ONE } else { ZERO };
                dev = dev.max((v - target).norm());
            }
        }
        dev
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (0..4).all(|r| (0..4).all(|c| (self.m[r][c] - other.m[r][c]).norm() <= tol))
    }
}

pub(crate) fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = (0..4).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

pub(crate) fn mat4_dagger(a: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = a[c][r].conj();
        }
    }
    out
}

fn kron(u: &Mat2, v: &Mat2) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = u[r / 2][c / 2] * v[r % 2][c % 2];
        }
    }
    out
}

/// Kronecker product `u ⊗ v`; `u` acts on Player I's (left) qubit.
pub fn tensor(u: &Gate1Q, v: &Gate1Q) -> Result<Gate2Q> {
    u.validate("left operand")?;
    v.validate("right operand")?;
    Ok(Gate2Q {
        m: kron(&u.m, &v.m),
    })
}

/// Which local generator the entangler is built from.
///
/// `PaperLiteral` uses `σx ⊗ σx`. `EwlFaithful` uses `D ⊗ D` with
/// `D = [[0, 1], [-1, 0]]`, so the entangler commutes with the defect
/// profile built from that gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntanglerMode {
    PaperLiteral,
    #[default]
    EwlFaithful,
}

impl EntanglerMode {
    /// The single-qubit gate `G` such that the entangler is
    /// `cos(γ/2) I⊗I + i sin(γ/2) G⊗G`.
    pub fn generator(self) -> Gate1Q {
        match self {
            EntanglerMode::PaperLiteral => Gate1Q::pauli_x(),
            EntanglerMode::EwlFaithful => Gate1Q {
                m: [[ZERO, ONE], [-ONE, ZERO]],
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EntanglerMode::PaperLiteral => "paper_literal",
            EntanglerMode::EwlFaithful => "ewl_faithful",
        }
    }
}

impl fmt::Display for EntanglerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Validates an entanglement angle against `[0, π/2]`, clamping values
/// that overshoot the boundary by less than the clamp tolerance.
pub fn check_gamma(gamma: f64) -> Result<f64> {
    if !gamma.is_finite() {
        return Err(Error::NonFinite("gamma".into()));
    }
    if gamma < 0.0 {
        if gamma > -TOLERANCE.clamp {
            return Ok(0.0);
        }
    } else if gamma <= FRAC_PI_2 {
        return Ok(gamma);
    } else if gamma - FRAC_PI_2 < TOLERANCE.clamp {
        return Ok(FRAC_PI_2);
    }
    Err(Error::OutOfRange {
        name: "gamma".into(),
        value: gamma,
        min: 0.0,
        max: FRAC_PI_2,
    })
}

/// The referee's entangling gate `J(γ)`.
pub fn entangler(gamma: f64, mode: EntanglerMode) -> Result<Gate2Q> {
    let gamma = check_gamma(gamma)?;
    let g = mode.generator();
    let gg = kron(&g.m, &g.m);
    let c = C64::new((gamma / 2.0).cos(), 0.0);
    let s = I * (gamma / 2.0).sin();
    let mut m = [[ZERO; 4]; 4];
    for (r, row) in m.iter_mut().enumerate() {
        for (col, cell) in row.iter_mut().enumerate() {
            let id = if r == col { c } else { ZERO };
            *cell = id + s * gg[r][col];
        }
    }
    Ok(Gate2Q { m })
}

pub fn dagger(g: &Gate2Q) -> Gate2Q {
    g.dagger()
}

pub fn apply(g: &Gate2Q, s: &PureState2Q) -> PureState2Q {
    g.apply(s)
}

/// Exact computational-basis measurement probabilities.
pub fn measure(s: &PureState2Q) -> OutcomeDistribution {
    let mut probs = [0.0; 4];
    for (p, a) in probs.iter_mut().zip(s.amps.iter()) {
        *p = a.norm_sqr();
    }
    OutcomeDistribution { probs }
}

/// Probabilities over the four basis outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    probs: [f64; 4],
}

impl OutcomeDistribution {
    pub fn new(probs: [f64; 4]) -> Result<Self> {
        if probs.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("outcome probabilities".into()));
        }
        let tol = TOLERANCE.validation;
        if probs.iter().any(|&p| p < -tol || p > 1.0 + tol) {
            return Err(Error::InvalidDistribution(format!(
                "probabilities {probs:?} outside [0, 1]"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { probs })
    }

    pub(crate) fn from_probs_unchecked(probs: [f64; 4]) -> Self {
        Self { probs }
    }

    pub fn uniform() -> Self {
        Self { probs: [0.25; 4] }
    }

    pub fn probs(&self) -> &[f64; 4] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Probability mass on outcomes where `player` (0 or 1) reads `|1⟩`.
    pub fn mass_on_second_strategy(&self, player: usize) -> f64 {
        match player {
            0 => self.probs[2] + self.probs[3],
            1 => self.probs[1] + self.probs[3],
            _ => panic!("player index {player} out of range"),
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.probs
            .iter()
            .zip(other.probs.iter())
            .all(|(a, b)| (a - b).abs() <= tol)
    }
}
