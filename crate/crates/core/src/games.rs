//! Classical 2×2 games: bimatrix payoffs, pure and mixed Nash equilibria,
//! Pareto optimality and correlated equilibria.
//!
//! Strategy index 0 is the first label ("C", "Buy") and index 1 the second
//! ("D", "Sell"). Outcome `k = 2·row + col` matches the basis state
//! `|row col⟩` of the quantum protocol.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::linsolve;
use crate::qcore::OutcomeDistribution;

/// Default slack for equilibrium checks.
pub const DEFAULT_EPS: f64 = 1e-9;

const ROOT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    #[serde(rename = "I")]
    One,
    #[serde(rename = "II")]
    Two,
}

impl Player {
    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::One => f.write_str("I"),
            Player::Two => f.write_str("II"),
        }
    }
}

/// A 2×2 game with a payoff pair per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BimatrixRepr", into = "BimatrixRepr")]
pub struct Bimatrix {
    cells: [[(f64, f64); 2]; 2],
    row_labels: [String; 2],
    col_labels: [String; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BimatrixRepr {
    cells: [[[f64; 2]; 2]; 2],
    row_labels: [String; 2],
    col_labels: [String; 2],
}

impl TryFrom<BimatrixRepr> for Bimatrix {
    type Error = Error;

    fn try_from(r: BimatrixRepr) -> Result<Self> {
        let cells = r.cells.map(|row| row.map(|[a, b]| (a, b)));
        Bimatrix::new(cells, r.row_labels, r.col_labels)
    }
}

impl From<Bimatrix> for BimatrixRepr {
    fn from(g: Bimatrix) -> Self {
        BimatrixRepr {
            cells: g.cells.map(|row| row.map(|(a, b)| [a, b])),
            row_labels: g.row_labels,
            col_labels: g.col_labels,
        }
    }
}

impl Bimatrix {
    pub fn new(
        cells: [[(f64, f64); 2]; 2],
        row_labels: [String; 2],
        col_labels: [String; 2],
    ) -> Result<Self> {
        if cells
            .iter()
            .flatten()
            .any(|(a, b)| !a.is_finite() || !b.is_finite())
        {
            return Err(Error::InvalidGame("payoffs must be finite".into()));
        }
        if row_labels[0] == row_labels[1] {
            return Err(Error::InvalidGame(format!(
                "Player I labels must be distinct, got {row_labels:?}"
            )));
        }
        if col_labels[0] == col_labels[1] {
            return Err(Error::InvalidGame(format!(
                "Player II labels must be distinct, got {col_labels:?}"
            )));
        }
        Ok(Self {
            cells,
            row_labels,
            col_labels,
        })
    }

    /// Symmetric game with the usual C/D labels.
    pub fn symmetric(reward: f64, sucker: f64, temptation: f64, punishment: f64) -> Result<Self> {
        Self::new(
            [
                [(reward, reward), (sucker, temptation)],
                [(temptation, sucker), (punishment, punishment)],
            ],
            ["C".into(), "D".into()],
            ["C".into(), "D".into()],
        )
    }

    pub fn payoff(&self, row: usize, col: usize) -> (f64, f64) {
        self.cells[row][col]
    }

    pub fn payoff_of(&self, player: Player, row: usize, col: usize) -> f64 {
        let (a, b) = self.cells[row][col];
        match player {
            Player::One => a,
            Player::Two => b,
        }
    }

    /// Payoff pair of basis outcome `k = 2·row + col`.
    pub fn outcome_payoff(&self, k: usize) -> (f64, f64) {
        self.cells[k / 2][k % 2]
    }

    pub fn row_labels(&self) -> &[String; 2] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String; 2] {
        &self.col_labels
    }

    pub fn labels(&self, player: Player) -> &[String; 2] {
        match player {
            Player::One => &self.row_labels,
            Player::Two => &self.col_labels,
        }
    }

    /// Expected payoffs of a distribution over the four outcomes.
    pub fn expected_over(&self, dist: &OutcomeDistribution) -> (f64, f64) {
        dist.probs()
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(x, y), (k, &p)| {
                let (a, b) = self.outcome_payoff(k);
                (x + p * a, y + p * b)
            })
    }

    /// Smallest and largest payoff appearing in any cell.
    pub fn payoff_bounds(&self) -> (f64, f64) {
        self.cells
            .iter()
            .flatten()
            .flat_map(|&(a, b)| [a, b])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn relabel(&self, row_labels: [String; 2], col_labels: [String; 2]) -> Result<Self> {
        Self::new(self.cells, row_labels, col_labels)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..2).all(|r| (0..2).all(|c| self.cells[r][c].0 == self.cells[c][r].1))
    }
}

/// Prisoner's Dilemma with `(C,C)=(3,3)`, `(C,D)=(0,5)`, `(D,C)=(5,0)`, `(D,D)=(1,1)`.
pub fn canonical_pd() -> Bimatrix {
    Bimatrix::symmetric(3.0, 0.0, 5.0, 1.0).expect("canonical payoffs are valid")
}

/// High-frequency trading game: the canonical PD relabeled Buy↔C, Sell↔D.
pub fn hft_game() -> Bimatrix {
    canonical_pd()
        .relabel(["Buy".into(), "Sell".into()], ["Buy".into(), "Sell".into()])
        .expect("labels are distinct")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PureProfile {
    pub row: usize,
    pub col: usize,
}

impl PureProfile {
    pub fn new(row: usize, col: usize) -> Result<Self> {
        if row > 1 || col > 1 {
            return Err(Error::InvalidGame(format!(
                "strategy indices ({row}, {col}) must be 0 or 1"
            )));
        }
        Ok(Self { row, col })
    }

    pub fn all() -> [PureProfile; 4] {
        [(0, 0), (0, 1), (1, 0), (1, 1)].map(|(row, col)| PureProfile { row, col })
    }

    pub fn outcome_index(&self) -> usize {
        2 * self.row + self.col
    }

    pub fn labels<'a>(&self, g: &'a Bimatrix) -> (&'a str, &'a str) {
        (&g.row_labels[self.row], &g.col_labels[self.col])
    }
}

/// Independent randomization: `p` = P(Player I plays strategy 0),
/// `q` = P(Player II plays strategy 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedProfile {
    pub p: f64,
    pub q: f64,
}

impl MixedProfile {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        check_range("p", p, 0.0, 1.0)?;
        check_range("q", q, 0.0, 1.0)?;
        Ok(Self { p, q })
    }

    pub fn pure(profile: PureProfile) -> Self {
        Self {
            p: if profile.row == 0 { 1.0 } else { 0.0 },
            q: if profile.col == 0 { 1.0 } else { 0.0 },
        }
    }

    /// Product distribution over the four outcomes.
    pub fn joint(&self) -> [f64; 4] {
        let (p, q) = (self.p, self.q);
        [p * q, p * (1.0 - q), (1.0 - p) * q, (1.0 - p) * (1.0 - q)]
    }
}

/// A distribution over the four pure profiles, indexed like outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    mu: [f64; 4],
}

impl JointDistribution {
    pub fn new(mu: [f64; 4]) -> Result<Self> {
        OutcomeDistribution::new(mu)?;
        Ok(Self { mu })
    }

    pub fn point_mass(profile: PureProfile) -> Self {
        let mut mu = [0.0; 4];
        mu[profile.outcome_index()] = 1.0;
        Self { mu }
    }

    pub fn uniform() -> Self {
        Self { mu: [0.25; 4] }
    }

    pub fn mu(&self) -> &[f64; 4] {
        &self.mu
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.mu[2 * row + col]
    }
}

/// Profiles in which each player's choice is a best reply to the other's.
pub fn pure_nash(g: &Bimatrix) -> Vec<PureProfile> {
    PureProfile::all()
        .into_iter()
        .filter(|pr| {
            let (a, b) = g.payoff(pr.row, pr.col);
            let row_ok = a + DEFAULT_EPS >= g.payoff(1 - pr.row, pr.col).0;
            let col_ok = b + DEFAULT_EPS >= g.payoff(pr.row, 1 - pr.col).1;
            row_ok && col_ok
        })
        .collect()
}

/// Profiles whose outcome is not Pareto-dominated by another cell.
pub fn pareto_optimal(g: &Bimatrix) -> Vec<PureProfile> {
    let all = PureProfile::all();
    all.into_iter()
        .filter(|pr| {
            let (a, b) = g.payoff(pr.row, pr.col);
            !all.iter().any(|other| {
                let (x, y) = g.payoff(other.row, other.col);
                x >= a && y >= b && (x > a || y > b)
            })
        })
        .collect()
}

pub fn expected_payoff(g: &Bimatrix, m: &MixedProfile) -> (f64, f64) {
    m.joint()
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(x, y), (k, &w)| {
            let (a, b) = g.outcome_payoff(k);
            (x + w * a, y + w * b)
        })
}

/// All mixed equilibria of a 2×2 game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedNash {
    /// Isolated equilibria, or the extreme points of equilibrium components.
    pub equilibria: Vec<MixedProfile>,
    /// Set when some equilibrium component is not a single point; the
    /// component is then represented only by its extreme points.
    pub degenerate: bool,
}

/// Closed interval on `[0, 1]`.
type Interval = (f64, f64);

#[derive(Debug, Clone, Copy)]
struct Rect {
    p: Interval,
    q: Interval,
}

impl Rect {
    fn intersect(&self, other: &Rect) -> Option<Rect> {
        let p = (self.p.0.max(other.p.0), self.p.1.min(other.p.1));
        let q = (self.q.0.max(other.q.0), self.q.1.min(other.q.1));
        (p.0 <= p.1 + ROOT_EPS && q.0 <= q.1 + ROOT_EPS).then_some(Rect { p, q })
    }
}

/// Sign structure of an affine function `f(t) = v0 + (v1 - v0)·t` on `[0, 1]`:
/// the sets where `f ≥ 0`, `f ≤ 0` and `f = 0`.
fn affine_sign_sets(v0: f64, v1: f64) -> (Option<Interval>, Option<Interval>, Option<Interval>) {
    let z0 = v0.abs() <= ROOT_EPS;
    let z1 = v1.abs() <= ROOT_EPS;
    if z0 && z1 {
        let all = Some((0.0, 1.0));
        return (all, all, all);
    }
    let nonneg0 = v0 >= -ROOT_EPS;
    let nonneg1 = v1 >= -ROOT_EPS;
    let nonpos0 = v0 <= ROOT_EPS;
    let nonpos1 = v1 <= ROOT_EPS;
    let root = if z0 {
        Some(0.0)
    } else if z1 {
        Some(1.0)
    } else if (v0 > 0.0) != (v1 > 0.0) {
        Some(v0 / (v0 - v1))
    } else {
        None
    };
    let pos = match (nonneg0, nonneg1) {
        (true, true) => Some((0.0, 1.0)),
        (true, false) => root.map(|t| (0.0, t)),
        (false, true) => root.map(|t| (t, 1.0)),
        (false, false) => None,
    };
    let neg = match (nonpos0, nonpos1) {
        (true, true) => Some((0.0, 1.0)),
        (true, false) => root.map(|t| (0.0, t)),
        (false, true) => root.map(|t| (t, 1.0)),
        (false, false) => None,
    };
    (pos, neg, root.map(|t| (t, t)))
}

/// Best-reply graph of Player I as rectangles in `(p, q)` space.
fn row_best_reply_graph(g: &Bimatrix) -> Vec<Rect> {
    // Advantage of row 0 over row 1 against column mix q, at q = 0 and q = 1.
    let v0 = g.payoff(0, 1).0 - g.payoff(1, 1).0;
    let v1 = g.payoff(0, 0).0 - g.payoff(1, 0).0;
    let (pos, neg, zero) = affine_sign_sets(v0, v1);
    let mut out = Vec::new();
    if let Some(q) = pos {
        out.push(Rect { p: (1.0, 1.0), q });
    }
    if let Some(q) = neg {
        out.push(Rect { p: (0.0, 0.0), q });
    }
    if let Some(q) = zero {
        out.push(Rect { p: (0.0, 1.0), q });
    }
    out
}

fn col_best_reply_graph(g: &Bimatrix) -> Vec<Rect> {
    let v0 = g.payoff(1, 0).1 - g.payoff(1, 1).1;
    let v1 = g.payoff(0, 0).1 - g.payoff(0, 1).1;
    let (pos, neg, zero) = affine_sign_sets(v0, v1);
    let mut out = Vec::new();
    if let Some(p) = pos {
        out.push(Rect { p, q: (1.0, 1.0) });
    }
    if let Some(p) = neg {
        out.push(Rect { p, q: (0.0, 0.0) });
    }
    if let Some(p) = zero {
        out.push(Rect { p, q: (0.0, 1.0) });
    }
    out
}

/// Support enumeration for 2×2 games, carried out on the best-reply graphs:
/// every equilibrium lies in the intersection of both players' graphs, and
/// each graph is a union of axis-aligned segments (or the whole square).
pub fn mixed_nash(g: &Bimatrix) -> MixedNash {
    let mut points: Vec<MixedProfile> = Vec::new();
    let mut degenerate = false;
    for a in row_best_reply_graph(g) {
        for b in col_best_reply_graph(g) {
            let Some(r) = a.intersect(&b) else { continue };
            let wide_p = r.p.1 - r.p.0 > ROOT_EPS;
            let wide_q = r.q.1 - r.q.0 > ROOT_EPS;
            if wide_p || wide_q {
                degenerate = true;
            }
            for p in [r.p.0, r.p.1] {
                for q in [r.q.0, r.q.1] {
                    let cand = MixedProfile {
                        p: p.clamp(0.0, 1.0),
                        q: q.clamp(0.0, 1.0),
                    };
                    if !points
                        .iter()
                        .any(|x| (x.p - cand.p).abs() <= 1e-9 && (x.q - cand.q).abs() <= 1e-9)
                    {
                        points.push(cand);
                    }
                }
            }
        }
    }
    points.sort_by(|x, y| x.p.total_cmp(&y.p).then(x.q.total_cmp(&y.q)));
    MixedNash {
        equilibria: points,
        degenerate,
    }
}

/// Whether following the recommendations drawn from `mu` is an
/// `eps`-best reply for both players, conditional on each recommendation
/// that occurs with positive probability.
pub fn is_correlated_equilibrium(g: &Bimatrix, mu: &JointDistribution, eps: f64) -> bool {
    for player in [Player::One, Player::Two] {
        for rec in 0..2 {
            let dev = 1 - rec;
            let cell = |own: usize, other: usize| match player {
                Player::One => (own, other),
                Player::Two => (other, own),
            };
            let marginal: f64 = (0..2)
                .map(|o| {
                    let (r, c) = cell(rec, o);
                    mu.get(r, c)
                })
                .sum();
            if marginal <= 0.0 {
                continue;
            }
            let gain: f64 = (0..2)
                .map(|o| {
                    let (r, c) = cell(rec, o);
                    let (dr, dc) = cell(dev, o);
                    mu.get(r, c) * (g.payoff_of(player, dr, dc) - g.payoff_of(player, r, c))
                })
                .sum::<f64>()
                / marginal;
            if gain > eps {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum CorrelatedObjective {
    #[default]
    #[serde(rename = "welfare")]
    Welfare,
    #[serde(rename = "player_I")]
    PlayerOne,
    #[serde(rename = "player_II")]
    PlayerTwo,
}

impl CorrelatedObjective {
    fn coefficients(self, g: &Bimatrix) -> [f64; 4] {
        let mut c = [0.0; 4];
        for (k, ck) in c.iter_mut().enumerate() {
            let (a, b) = g.outcome_payoff(k);
            *ck = match self {
                CorrelatedObjective::Welfare => a + b,
                CorrelatedObjective::PlayerOne => a,
                CorrelatedObjective::PlayerTwo => b,
            };
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelatedSolution {
    pub mu: JointDistribution,
    pub value: f64,
}

/// Inequality rows `row · mu ≥ 0` of the correlated-equilibrium polytope:
/// four nonnegativity bounds followed by four incentive constraints.
fn correlated_constraints(g: &Bimatrix) -> Vec<[f64; 4]> {
    let mut rows = Vec::with_capacity(8);
    for k in 0..4 {
        let mut r = [0.0; 4];
        r[k] = 1.0;
        rows.push(r);
    }
    for rec in 0..2 {
        let dev = 1 - rec;
        let mut r = [0.0; 4];
        for col in 0..2 {
            r[2 * rec + col] = g.payoff(rec, col).0 - g.payoff(dev, col).0;
        }
        rows.push(r);
    }
    for rec in 0..2 {
        let dev = 1 - rec;
        let mut r = [0.0; 4];
        for row in 0..2 {
            r[2 * row + rec] = g.payoff(row, rec).1 - g.payoff(row, dev).1;
        }
        rows.push(r);
    }
    rows
}

/// Maximizes a linear objective over the correlated-equilibrium polytope by
/// enumerating its vertices: each vertex is the solution of the simplex
/// equality plus three active inequality constraints.
pub fn best_correlated(g: &Bimatrix, objective: CorrelatedObjective) -> CorrelatedSolution {
    let rows = correlated_constraints(g);
    let coef = objective.coefficients(g);
    let mut best: Option<CorrelatedSolution> = None;
    let n = rows.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let a = vec![
                    vec![1.0; 4],
                    rows[i].to_vec(),
                    rows[j].to_vec(),
                    rows[k].to_vec(),
                ];
                let Some(x) = linsolve::solve(a, vec![1.0, 0.0, 0.0, 0.0]) else {
                    continue;
                };
                let feasible = rows
                    .iter()
                    .all(|r| r.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() >= -1e-10);
                if !feasible {
                    continue;
                }
                let mut mu = [0.0; 4];
                for (m, v) in mu.iter_mut().zip(&x) {
                    *m = v.max(0.0);
                }
                let total: f64 = mu.iter().sum();
                mu.iter_mut().for_each(|m| *m /= total);
                let value: f64 = mu.iter().zip(coef).map(|(m, c)| m * c).sum();
                if best.is_none_or(|b| value > b.value + 1e-12) {
                    best = Some(CorrelatedSolution {
                        mu: JointDistribution { mu },
                        value,
                    });
                }
            }
        }
    }
    // Nash equilibria lie in the polytope, so a vertex always exists.
    best.expect("correlated-equilibrium polytope has a vertex")
}
