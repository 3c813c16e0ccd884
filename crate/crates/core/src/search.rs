//! Numerical equilibrium analysis over quantum strategy spaces.
//!
//! Best responses are found by a dense grid scan followed by bounded
//! Nelder–Mead refinement from several starts. This is a heuristic: it
//! carries no global optimality certificate. Every routine is deterministic
//! for a fixed [`SearchConfig`]; grid scans run in parallel but are reduced
//! in index order, so serial and parallel runs agree exactly.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ewl::{
    canonical_gates, format_angle, set_a_gate, set_b_gate, LabeledGate, MixedQuantumStrategy,
    Protocol, StrategyParamsA, StrategyParamsB,
};
use crate::games::{Bimatrix, Player};
use crate::linsolve;
use crate::qcore::{EntanglerMode, Gate1Q};

/// Anything that maps a pure strategy profile to expected payoffs.
pub trait PayoffOracle: Sync {
    fn game(&self) -> &Bimatrix;

    /// Expected payoffs `(I, II)`. Gates are trusted to be unitary.
    fn payoffs(&self, u1: &Gate1Q, u2: &Gate1Q) -> (f64, f64);

    fn payoff_to(&self, responder: Player, own: &Gate1Q, opponent: &Gate1Q) -> f64 {
        match responder {
            Player::One => self.payoffs(own, opponent).0,
            Player::Two => self.payoffs(opponent, own).1,
        }
    }
}

impl PayoffOracle for Protocol {
    fn game(&self) -> &Bimatrix {
        Protocol::game(self)
    }

    fn payoffs(&self, u1: &Gate1Q, u2: &Gate1Q) -> (f64, f64) {
        self.payoffs_unchecked(u1, u2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// Grid points per parameter axis.
    pub grid_resolution: usize,
    /// Nelder–Mead iterations per start.
    pub refine_iters: usize,
    pub eps_nash: f64,
    pub seed: u64,
    /// Best grid points used as refinement starts.
    pub grid_starts: usize,
    /// Additional uniformly drawn starts.
    pub random_starts: usize,
    /// Largest support considered for mixed strategies.
    pub max_support: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_resolution: 64,
            refine_iters: 200,
            eps_nash: 1e-6,
            seed: 0,
            grid_starts: 4,
            random_starts: 2,
            max_support: crate::ewl::DEFAULT_SUPPORT_CAP,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution < 2 {
            return Err(Error::InvalidConfig(format!(
                "search.grid_resolution must be at least 2, got {}",
                self.grid_resolution
            )));
        }
        if !self.eps_nash.is_finite() || self.eps_nash <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "search.eps_nash must be positive, got {}",
                self.eps_nash
            )));
        }
        if self.max_support == 0 {
            return Err(Error::InvalidConfig(
                "search.max_support must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Parameter convergence tolerance of the simplex refinement.
const PARAM_TOL: f64 = 1e-8;
/// Payoff convergence tolerance of the simplex refinement.
const PAYOFF_TOL: f64 = 1e-10;
/// Payoffs closer than this are ties, broken by the smaller parameter tuple.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum StrategySpace {
    /// `θ, φ ∈ [0, π/2]`.
    A,
    /// `θ ∈ [0, π/2]`, `α, β ∈ [−π, π]`.
    B,
    /// A finite menu of gates.
    Finite(Vec<Gate1Q>),
}

impl StrategySpace {
    fn bounds(&self) -> &'static [(f64, f64)] {
        const A: [(f64, f64); 2] = [(0.0, FRAC_PI_2), (0.0, FRAC_PI_2)];
        const B: [(f64, f64); 3] = [(0.0, FRAC_PI_2), (-PI, PI), (-PI, PI)];
        match self {
            StrategySpace::A => &A,
            StrategySpace::B => &B,
            StrategySpace::Finite(_) => &[],
        }
    }

    /// Names of the continuous parameters.
    pub fn axes(&self) -> &'static [&'static str] {
        match self {
            StrategySpace::A => &["theta", "phi"],
            StrategySpace::B => &["theta", "alpha", "beta"],
            StrategySpace::Finite(_) => &["index"],
        }
    }

    fn gate(&self, x: &[f64]) -> Gate1Q {
        match self {
            StrategySpace::A => set_a_gate(x[0], x[1]),
            StrategySpace::B => set_b_gate(x[0], x[1], x[2]),
            StrategySpace::Finite(menu) => menu[x[0] as usize],
        }
    }

    fn params(&self, x: &[f64]) -> ResponseParams {
        match self {
            StrategySpace::A => ResponseParams::A(StrategyParamsA {
                theta: x[0],
                phi: x[1],
            }),
            StrategySpace::B => ResponseParams::B(StrategyParamsB {
                theta: x[0],
                alpha: x[1],
                beta: x[2],
            }),
            StrategySpace::Finite(_) => ResponseParams::Menu(x[0] as usize),
        }
    }

    /// Row-major grid over the parameter box, or the menu indices.
    fn grid(&self, resolution: usize) -> Vec<Vec<f64>> {
        if let StrategySpace::Finite(menu) = self {
            return (0..menu.len()).map(|i| vec![i as f64]).collect();
        }
        let axes: Vec<Vec<f64>> = self
            .bounds()
            .iter()
            .map(|&(lo, hi)| linspace(lo, hi, resolution))
            .collect();
        let total = resolution.pow(axes.len() as u32);
        (0..total)
            .map(|mut idx| {
                let mut x = vec![0.0; axes.len()];
                for d in (0..axes.len()).rev() {
                    x[d] = axes[d][idx % resolution];
                    idx /= resolution;
                }
                x
            })
            .collect()
    }
}

/// `n` evenly spaced points with exact endpoints.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ResponseParams {
    A(StrategyParamsA),
    B(StrategyParamsB),
    Menu(usize),
}

impl ResponseParams {
    /// Parseable strategy label, e.g. `A(0,pi/2)`.
    pub fn label(&self) -> String {
        match self {
            ResponseParams::A(p) => format!("A({},{})", format_angle(p.theta), format_angle(p.phi)),
            ResponseParams::B(p) => format!(
                "B({},{},{})",
                format_angle(p.theta),
                format_angle(p.alpha),
                format_angle(p.beta)
            ),
            ResponseParams::Menu(i) => format!("menu[{i}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestResponse {
    pub responder: Player,
    pub params: ResponseParams,
    #[serde(skip)]
    pub gate: Gate1Q,
    pub payoff: f64,
    /// Gain over the incumbent gate; zero when no incumbent was given.
    pub improvement: f64,
}

#[derive(Debug, Clone)]
struct Candidate {
    x: Vec<f64>,
    payoff: f64,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Whether `a` beats `b`: higher payoff, or a tie and smaller parameters.
fn better(a: &Candidate, b: &Candidate) -> bool {
    if a.payoff > b.payoff + TIE_TOL {
        return true;
    }
    (a.payoff - b.payoff).abs() <= TIE_TOL && lex_cmp(&a.x, &b.x) == Ordering::Less
}

/// Bounded Nelder–Mead maximization of `f` over the box `bounds`.
fn nelder_mead_max<F: Fn(&[f64]) -> f64>(
    f: &F,
    start: &[f64],
    bounds: &[(f64, f64)],
    step: &[f64],
    max_iters: usize,
) -> Candidate {
    let n = start.len();
    let clamp = |x: &mut Vec<f64>| {
        for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
            *v = v.clamp(lo, hi);
        }
    };
    // Vertices with negated payoff (minimization).
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), -f(start)));
    for i in 0..n {
        let mut x = start.to_vec();
        let (lo, hi) = bounds[i];
        x[i] = if x[i] + step[i] <= hi {
            x[i] + step[i]
        } else {
            (x[i] - step[i]).max(lo)
        };
        let v = -f(&x);
        simplex.push((x, v));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| {
        s.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| lex_cmp(&a.0, &b.0)));
    };
    for _ in 0..max_iters {
        order(&mut simplex);
        let spread = simplex[n].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= PAYOFF_TOL && diameter <= PARAM_TOL {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|(x, _)| x[d]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            let mut x: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect();
            clamp(&mut x);
            x
        };
        let xr = along(1.0);
        let fr = -f(&xr);
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let fe = -f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = along(0.5);
                let fc = -f(&xc);
                (xc, fc)
            } else {
                let xc = along(-0.5);
                let fc = -f(&xc);
                (xc, fc)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for (x, v) in simplex[1..].iter_mut() {
                    for (xi, bi) in x.iter_mut().zip(&best) {
                        *xi = bi + 0.5 * (*xi - bi);
                    }
                    *v = -f(x);
                }
            }
        }
    }
    order(&mut simplex);
    let (x, v) = simplex.swap_remove(0);
    Candidate { x, payoff: -v }
}

/// Best reply of `responder` against a fixed `opponent` gate.
pub fn best_response<O: PayoffOracle + ?Sized>(
    oracle: &O,
    opponent: &Gate1Q,
    responder: Player,
    incumbent: Option<&Gate1Q>,
    space: &StrategySpace,
    cfg: &SearchConfig,
) -> Result<BestResponse> {
    cfg.validate()?;
    if let StrategySpace::Finite(menu) = space {
        if menu.is_empty() {
            return Err(Error::InvalidConfig(
                "finite strategy space is empty".into(),
            ));
        }
    }
    let objective = |x: &[f64]| oracle.payoff_to(responder, &space.gate(x), opponent);

    let grid = space.grid(cfg.grid_resolution);
    let values: Vec<f64> = grid.par_iter().map(|x| objective(x)).collect();
    let mut ranked: Vec<usize> = (0..grid.len()).collect();
    ranked.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));

    let mut best = Candidate {
        x: grid[ranked[0]].clone(),
        payoff: values[ranked[0]],
    };
    for &i in &ranked[1..] {
        let c = Candidate {
            x: grid[i].clone(),
            payoff: values[i],
        };
        if better(&c, &best) {
            best = c;
        } else if c.payoff < best.payoff - TIE_TOL {
            break;
        }
    }

    if !matches!(space, StrategySpace::Finite(_)) {
        let bounds = space.bounds();
        let step: Vec<f64> = bounds
            .iter()
            .map(|(lo, hi)| (hi - lo) / (cfg.grid_resolution - 1) as f64)
            .collect();
        let mut starts: Vec<Vec<f64>> = ranked
            .iter()
            .take(cfg.grid_starts)
            .map(|&i| grid[i].clone())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.random_starts {
            starts.push(
                bounds
                    .iter()
                    .map(|&(lo, hi)| rng.gen_range(lo..=hi))
                    .collect(),
            );
        }
        for s in &starts {
            let c = nelder_mead_max(&objective, s, bounds, &step, cfg.refine_iters);
            if better(&c, &best) {
                best = c;
            }
        }
    }

    let gate = space.gate(&best.x);
    let improvement = incumbent
        .map(|g| (best.payoff - oracle.payoff_to(responder, g, opponent)).max(0.0))
        .unwrap_or(0.0);
    Ok(BestResponse {
        responder,
        params: space.params(&best.x),
        gate,
        payoff: best.payoff,
        improvement,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsNashReport {
    pub is_eps_nash: bool,
    pub max_improvement: f64,
    /// Best responses of Player I and Player II, in that order.
    pub responses: [BestResponse; 2],
}

/// Checks that neither player can gain more than `cfg.eps_nash` by a
/// unilateral deviation within `space`.
pub fn verify_eps_nash<O: PayoffOracle + ?Sized>(
    oracle: &O,
    u1: &Gate1Q,
    u2: &Gate1Q,
    space: &StrategySpace,
    cfg: &SearchConfig,
) -> Result<EpsNashReport> {
    let r1 = best_response(oracle, u2, Player::One, Some(u1), space, cfg)?;
    let r2 = best_response(oracle, u1, Player::Two, Some(u2), space, cfg)?;
    let max_improvement = r1.improvement.max(r2.improvement);
    Ok(EpsNashReport {
        is_eps_nash: max_improvement <= cfg.eps_nash,
        max_improvement,
        responses: [r1, r2],
    })
}

/// Payoff tables of the finite game induced by a menu: entry `[i][j]` is
/// the payoff when Player I plays `menu[i]` and Player II plays `menu[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedGame {
    pub row_payoffs: Vec<Vec<f64>>,
    pub col_payoffs: Vec<Vec<f64>>,
}

impl InducedGame {
    pub fn new<O: PayoffOracle + ?Sized>(oracle: &O, menu: &[Gate1Q]) -> Self {
        let n = menu.len();
        let cells: Vec<(f64, f64)> = (0..n * n)
            .into_par_iter()
            .map(|k| oracle.payoffs(&menu[k / n], &menu[k % n]))
            .collect();
        let row_payoffs = (0..n)
            .map(|i| (0..n).map(|j| cells[i * n + j].0).collect())
            .collect();
        let col_payoffs = (0..n)
            .map(|i| (0..n).map(|j| cells[i * n + j].1).collect())
            .collect();
        Self {
            row_payoffs,
            col_payoffs,
        }
    }

    pub fn len(&self) -> usize {
        self.row_payoffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row_payoffs.is_empty()
    }

    /// Expected payoffs under independent mixtures `x` (rows) and `y` (columns).
    pub fn expected(&self, x: &[f64], y: &[f64]) -> (f64, f64) {
        let mut out = (0.0, 0.0);
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                out.0 += xi * yj * self.row_payoffs[i][j];
                out.1 += xi * yj * self.col_payoffs[i][j];
            }
        }
        out
    }

    fn row_values(&self, y: &[f64]) -> Vec<f64> {
        self.row_payoffs
            .iter()
            .map(|row| row.iter().zip(y).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn col_values(&self, x: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|j| (0..self.len()).map(|i| x[i] * self.col_payoffs[i][j]).sum())
            .collect()
    }

    /// Largest gain either player gets from a pure deviation.
    pub fn deviation_gain(&self, x: &[f64], y: &[f64]) -> f64 {
        let (v1, v2) = self.expected(x, y);
        let best1 = self
            .row_values(y)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let best2 = self
            .col_values(x)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        (best1 - v1).max(best2 - v2).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumMethod {
    BestResponseDynamics,
    SupportEnumeration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedEquilibrium {
    pub strategies: [MixedQuantumStrategy; 2],
    /// `(menu index, weight)` pairs per player.
    pub supports: [Vec<(usize, f64)>; 2],
    pub payoffs: (f64, f64),
    pub method: EquilibriumMethod,
    /// Largest pure-deviation gain on the menu, recomputed from the oracle.
    pub max_deviation_gain: f64,
    /// Pure profiles visited by best-response dynamics.
    pub trace: Vec<(usize, usize)>,
}

fn argmax_keep(values: &[f64], current: usize) -> usize {
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if values[current] >= best - TIE_TOL {
        return current;
    }
    values
        .iter()
        .position(|&v| v >= best - TIE_TOL)
        .unwrap_or(current)
}

/// Indices of distinct strategies: a strategy is dropped when an earlier
/// one yields identical payoffs to both players against every opponent.
fn distinct_rows(g: &InducedGame) -> Vec<usize> {
    let n = g.len();
    let same = |a: usize, b: usize| {
        (0..n).all(|j| {
            (g.row_payoffs[a][j] - g.row_payoffs[b][j]).abs() <= TIE_TOL
                && (g.col_payoffs[a][j] - g.col_payoffs[b][j]).abs() <= TIE_TOL
        })
    };
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..n {
        if !reps.iter().any(|&r| same(r, i)) {
            reps.push(i);
        }
    }
    reps
}

fn distinct_cols(g: &InducedGame) -> Vec<usize> {
    let n = g.len();
    let same = |a: usize, b: usize| {
        (0..n).all(|i| {
            (g.row_payoffs[i][a] - g.row_payoffs[i][b]).abs() <= TIE_TOL
                && (g.col_payoffs[i][a] - g.col_payoffs[i][b]).abs() <= TIE_TOL
        })
    };
    let mut reps: Vec<usize> = Vec::new();
    for j in 0..n {
        if !reps.iter().any(|&r| same(r, j)) {
            reps.push(j);
        }
    }
    reps
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k == 0 || k > items.len() {
        return out;
    }
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut i = k;
        while i > 0 && idx[i - 1] == items.len() - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Weights on `support` that make the opponent indifferent across
/// `opp_support`: solves `Σ_s w_s · pay(s, t) = v` for all `t`, `Σ w = 1`.
fn indifference_weights(
    pay: impl Fn(usize, usize) -> f64,
    support: &[usize],
    opp_support: &[usize],
) -> Option<Vec<f64>> {
    let k = support.len();
    let mut a = vec![vec![0.0; k + 1]; k + 1];
    let mut b = vec![0.0; k + 1];
    for (r, &t) in opp_support.iter().enumerate() {
        for (c, &s) in support.iter().enumerate() {
            a[r][c] = pay(s, t);
        }
        a[r][k] = -1.0;
    }
    a[k][..k].fill(1.0);
    b[k] = 1.0;
    let sol = linsolve::solve(a, b)?;
    let w = &sol[..k];
    if w.iter().any(|&v| v < -1e-12) {
        return None;
    }
    let total: f64 = w.iter().map(|v| v.max(0.0)).sum();
    Some(w.iter().map(|v| v.max(0.0) / total).collect())
}

/// First equilibrium in enumeration order: support size ascending, then
/// lexicographic over Player I's and Player II's supports.
fn support_enumeration(g: &InducedGame, cap: usize, tol: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let rows = distinct_rows(g);
    let cols = distinct_cols(g);
    let n = g.len();
    for k in 1..=cap.min(rows.len()).min(cols.len()) {
        let row_sets = combinations(&rows, k);
        let col_sets = combinations(&cols, k);
        for s1 in &row_sets {
            for s2 in &col_sets {
                let Some(y) = indifference_weights(|s, t| g.row_payoffs[t][s], s2, s1) else {
                    continue;
                };
                let Some(x) = indifference_weights(|s, t| g.col_payoffs[s][t], s1, s2) else {
                    continue;
                };
                let mut xf = vec![0.0; n];
                let mut yf = vec![0.0; n];
                for (&i, w) in s1.iter().zip(&x) {
                    xf[i] = *w;
                }
                for (&j, w) in s2.iter().zip(&y) {
                    yf[j] = *w;
                }
                if g.deviation_gain(&xf, &yf) <= tol {
                    return Some((xf, yf));
                }
            }
        }
    }
    None
}

/// Equilibrium of the finite game induced by `menu`: pure best-response
/// dynamics first, then support enumeration if the dynamics cycle.
pub fn mixed_quantum_equilibrium<O: PayoffOracle + ?Sized>(
    oracle: &O,
    menu: &[Gate1Q],
    cfg: &SearchConfig,
) -> Result<MixedEquilibrium> {
    cfg.validate()?;
    if menu.is_empty() {
        return Err(Error::InvalidConfig("strategy menu is empty".into()));
    }
    for (k, g) in menu.iter().enumerate() {
        g.validate(&format!("menu gate {k}"))?;
    }
    let game = InducedGame::new(oracle, menu);
    let n = menu.len();

    let mut trace = vec![(0usize, 0usize)];
    let (mut i, mut j) = (0usize, 0usize);
    let mut pure = None;
    for _ in 0..4 * n + 4 {
        let col: Vec<f64> = (0..n).map(|r| game.row_payoffs[r][j]).collect();
        let ni = argmax_keep(&col, i);
        let nj = argmax_keep(&game.col_payoffs[ni], j);
        if (ni, nj) == (i, j) {
            pure = Some((i, j));
            break;
        }
        if trace.contains(&(ni, nj)) {
            trace.push((ni, nj));
            break;
        }
        trace.push((ni, nj));
        (i, j) = (ni, nj);
    }

    let (x, y, method) = match pure {
        Some((i, j)) => {
            let mut x = vec![0.0; n];
            let mut y = vec![0.0; n];
            x[i] = 1.0;
            y[j] = 1.0;
            (x, y, EquilibriumMethod::BestResponseDynamics)
        }
        None => match support_enumeration(&game, cfg.max_support, 1e-9) {
            Some((x, y)) => (x, y, EquilibriumMethod::SupportEnumeration),
            None => return Err(Error::NonConvergence { trace }),
        },
    };

    let support_of = |w: &[f64]| -> Vec<(usize, f64)> {
        w.iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(k, &v)| (k, v))
            .collect()
    };
    let supports = [support_of(&x), support_of(&y)];
    let strategies = [
        MixedQuantumStrategy::new(
            supports[0].iter().map(|&(k, w)| (w, menu[k])).collect(),
            cfg.max_support,
        )?,
        MixedQuantumStrategy::new(
            supports[1].iter().map(|&(k, w)| (w, menu[k])).collect(),
            cfg.max_support,
        )?,
    ];
    let payoffs = mixed_payoffs(oracle, &strategies[0], &strategies[1]);
    let max_deviation_gain = menu_deviation_gain(oracle, menu, &strategies[0], &strategies[1]);
    Ok(MixedEquilibrium {
        strategies,
        supports,
        payoffs,
        method,
        max_deviation_gain,
        trace,
    })
}

/// Expected payoffs of two mixed quantum strategies.
pub fn mixed_payoffs<O: PayoffOracle + ?Sized>(
    oracle: &O,
    m1: &MixedQuantumStrategy,
    m2: &MixedQuantumStrategy,
) -> (f64, f64) {
    let mut out = (0.0, 0.0);
    for (w1, u) in m1.support() {
        for (w2, v) in m2.support() {
            let (a, b) = oracle.payoffs(u, v);
            out.0 += w1 * w2 * a;
            out.1 += w1 * w2 * b;
        }
    }
    out
}

/// Largest gain from switching to a single menu gate, for either player,
/// evaluated directly against the oracle.
pub fn menu_deviation_gain<O: PayoffOracle + ?Sized>(
    oracle: &O,
    menu: &[Gate1Q],
    m1: &MixedQuantumStrategy,
    m2: &MixedQuantumStrategy,
) -> f64 {
    let (v1, v2) = mixed_payoffs(oracle, m1, m2);
    let mut gain: f64 = 0.0;
    for g in menu {
        let point = MixedQuantumStrategy::point(*g);
        gain = gain.max(mixed_payoffs(oracle, &point, m2).0 - v1);
        gain = gain.max(mixed_payoffs(oracle, m1, &point).1 - v2);
    }
    gain
}

/// Evenly discretized set-B gates (`n` points per axis, row-major over
/// `θ, α, β`) followed by the named gates `C`, `D`, `Q` of `mode`.
pub fn default_menu(mode: EntanglerMode, n: usize) -> Vec<LabeledGate> {
    let thetas = linspace(0.0, FRAC_PI_2, n);
    let phases = linspace(-PI, PI, n);
    let mut menu = Vec::with_capacity(n * n * n + 3);
    for &t in &thetas {
        for &a in &phases {
            for &b in &phases {
                let p = ResponseParams::B(StrategyParamsB {
                    theta: t,
                    alpha: a,
                    beta: b,
                });
                menu.push(LabeledGate::new(p.label(), set_b_gate(t, a, b)));
            }
        }
    }
    let named = canonical_gates(mode);
    menu.push(LabeledGate::new("C", named.c));
    menu.push(LabeledGate::new("D", named.d));
    menu.push(LabeledGate::new("Q", named.q));
    menu
}

/// Points per axis of the default mixed-strategy menu.
pub const DEFAULT_MENU_POINTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandscapePoint {
    pub params: Vec<f64>,
    pub payoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Landscape {
    pub axes: Vec<&'static str>,
    pub points: Vec<LandscapePoint>,
}

impl Landscape {
    pub fn max(&self) -> Option<&LandscapePoint> {
        self.points
            .iter()
            .fold(None, |best: Option<&LandscapePoint>, p| match best {
                Some(b) if b.payoff >= p.payoff => Some(b),
                _ => Some(p),
            })
    }
}

/// Responder payoff sampled over the parameter grid, row-major.
pub fn payoff_landscape<O: PayoffOracle + ?Sized>(
    oracle: &O,
    space: &StrategySpace,
    responder: Player,
    fixed_opponent: &Gate1Q,
    cfg: &SearchConfig,
) -> Result<Landscape> {
    cfg.validate()?;
    let grid = space.grid(cfg.grid_resolution);
    let points = grid
        .into_par_iter()
        .map(|x| {
            let payoff = oracle.payoff_to(responder, &space.gate(&x), fixed_opponent);
            LandscapePoint { params: x, payoff }
        })
        .collect();
    Ok(Landscape {
        axes: space.axes().to_vec(),
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetricEquilibrium {
    pub params: ResponseParams,
    #[serde(skip)]
    pub gate: Gate1Q,
    /// The smaller of the two players' payoffs.
    pub payoff: f64,
    pub report: EpsNashReport,
}

/// Candidates tried by [`best_symmetric_equilibrium`].
const SYMMETRIC_CANDIDATES: usize = 8;

/// Highest-paying symmetric profile `(U, U)` on the grid of `space` that
/// passes [`verify_eps_nash`]. Candidates are tried in decreasing order of
/// the smaller player payoff; `None` if none of the leading candidates is
/// an equilibrium.
pub fn best_symmetric_equilibrium<O: PayoffOracle + ?Sized>(
    oracle: &O,
    space: &StrategySpace,
    cfg: &SearchConfig,
) -> Result<Option<SymmetricEquilibrium>> {
    cfg.validate()?;
    let grid = space.grid(cfg.grid_resolution);
    let values: Vec<f64> = grid
        .par_iter()
        .map(|x| {
            let g = space.gate(x);
            let (a, b) = oracle.payoffs(&g, &g);
            a.min(b)
        })
        .collect();
    let mut ranked: Vec<usize> = (0..grid.len()).collect();
    ranked.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    for &i in ranked.iter().take(SYMMETRIC_CANDIDATES) {
        let gate = space.gate(&grid[i]);
        let report = verify_eps_nash(oracle, &gate, &gate, space, cfg)?;
        if report.is_eps_nash {
            return Ok(Some(SymmetricEquilibrium {
                params: space.params(&grid[i]),
                gate,
                payoff: values[i],
                report,
            }));
        }
    }
    Ok(None)
}
