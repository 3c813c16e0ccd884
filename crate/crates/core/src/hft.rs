//! High-frequency trading as a repeated quantum Prisoner's Dilemma.
//!
//! Two agents play the protocol round after round, each choosing a gate
//! from its own menu. A single ChaCha8 stream drives every random choice,
//! consumed per round in a fixed order: agent 1's decision, agent 2's
//! decision, then outcome sampling (only when outcomes are sampled).

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ewl::{canonical_gates, LabeledGate, Protocol};
use crate::games::Bimatrix;
use crate::noise::{NoiseSpec, NoisyProtocol};
use crate::qcore::{EntanglerMode, OutcomeDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    /// Always plays `menu[0]`.
    Fixed,
    /// Plays `menu[0]` until the opponent is seen defecting, then `menu[1]`
    /// forever.
    GrimTrigger,
    /// Plays `menu[1]` after a round in which the opponent defected,
    /// otherwise `menu[0]`.
    TitForTat,
    /// Epsilon-greedy action values over the whole menu.
    EpsilonGreedyBandit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentParams {
    pub epsilon: f64,
    pub learning_rate: f64,
    /// Opponent mass on its second basis state above which a round counts
    /// as a defection.
    pub trigger_threshold: f64,
}

impl Default for AgentParams {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            learning_rate: 0.1,
            trigger_threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentSpec {
    pub kind: AgentKind,
    pub menu: Vec<LabeledGate>,
    pub params: AgentParams,
}

impl AgentSpec {
    pub fn new(kind: AgentKind, menu: Vec<LabeledGate>, params: AgentParams) -> Result<Self> {
        let spec = Self { kind, menu, params };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.menu.is_empty() {
            return Err(Error::InvalidAgent("agent menu is empty".into()));
        }
        if matches!(self.kind, AgentKind::GrimTrigger | AgentKind::TitForTat) && self.menu.len() < 2
        {
            return Err(Error::InvalidAgent(
                "trigger agents need a cooperative and a defect gate".into(),
            ));
        }
        let p = &self.params;
        if !(0.0..=1.0).contains(&p.epsilon) {
            return Err(Error::InvalidAgent(format!(
                "epsilon must lie in [0, 1], got {}",
                p.epsilon
            )));
        }
        if !p.learning_rate.is_finite() || !(0.0..=1.0).contains(&p.learning_rate) {
            return Err(Error::InvalidAgent(format!(
                "learning_rate must lie in [0, 1], got {}",
                p.learning_rate
            )));
        }
        if !p.trigger_threshold.is_finite() {
            return Err(Error::InvalidAgent(
                "trigger_threshold is not finite".into(),
            ));
        }
        for g in &self.menu {
            g.gate.validate(&format!("menu gate {}", g.label))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TournamentConfig {
    pub rounds: usize,
    pub gamma: f64,
    pub mode: EntanglerMode,
    pub noise: NoiseSpec,
    pub seed: u64,
    /// Sample one outcome per round instead of using expected payoffs.
    pub sampled_outcomes: bool,
}

impl Default for TournamentConfig {
    fn default() -> Self {
        Self {
            rounds: 10_000,
            gamma: FRAC_PI_2,
            mode: EntanglerMode::default(),
            noise: NoiseSpec::none(),
            seed: 0,
            sampled_outcomes: false,
        }
    }
}

impl TournamentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidConfig(
                "tournament.rounds must be at least 1".into(),
            ));
        }
        self.noise.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    /// Menu indices chosen by agent 1 and agent 2.
    pub choices: [usize; 2],
    pub distribution: OutcomeDistribution,
    /// Sampled outcome index `2·row + col`, when sampling.
    pub outcome: Option<usize>,
    pub payoffs: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TournamentResult {
    pub records: Vec<RoundRecord>,
    pub mean_payoffs: (f64, f64),
}

impl TournamentResult {
    /// Mean payoffs over the last `window` rounds (all rounds if fewer).
    pub fn tail_mean(&self, window: usize) -> (f64, f64) {
        let tail = &self.records[self.records.len().saturating_sub(window)..];
        mean(tail)
    }
}

fn mean(records: &[RoundRecord]) -> (f64, f64) {
    let n = records.len().max(1) as f64;
    let (a, b) = records.iter().fold((0.0, 0.0), |acc, r| {
        (acc.0 + r.payoffs.0, acc.1 + r.payoffs.1)
    });
    (a / n, b / n)
}

struct AgentState<'a> {
    spec: &'a AgentSpec,
    values: Vec<f64>,
    triggered: bool,
    opponent_defected: bool,
}

impl<'a> AgentState<'a> {
    fn new(spec: &'a AgentSpec) -> Self {
        Self {
            spec,
            values: vec![0.0; spec.menu.len()],
            triggered: false,
            opponent_defected: false,
        }
    }

    fn choose(&self, rng: &mut ChaCha8Rng) -> usize {
        match self.spec.kind {
            AgentKind::Fixed => 0,
            AgentKind::GrimTrigger => usize::from(self.triggered),
            AgentKind::TitForTat => usize::from(self.opponent_defected),
            AgentKind::EpsilonGreedyBandit => {
                let r: f64 = rng.gen();
                if r < self.spec.params.epsilon {
                    rng.gen_range(0..self.values.len())
                } else {
                    greedy(&self.values)
                }
            }
        }
    }

    fn observe(&mut self, choice: usize, reward: f64, opponent_defected: bool) {
        if opponent_defected {
            self.triggered = true;
        }
        self.opponent_defected = opponent_defected;
        if self.spec.kind == AgentKind::EpsilonGreedyBandit {
            let v = &mut self.values[choice];
            *v += self.spec.params.learning_rate * (reward - *v);
        }
    }
}

/// Index of the largest value, lowest index on ties.
fn greedy(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = k;
        }
    }
    best
}

fn sample_outcome(d: &OutcomeDistribution, rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (k, p) in d.probs().iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    // Rounding left the cumulative sum just under one.
    d.probs().iter().rposition(|&p| p > 0.0).unwrap_or(3)
}

pub fn play_tournament(
    game: &Bimatrix,
    a1: &AgentSpec,
    a2: &AgentSpec,
    cfg: &TournamentConfig,
) -> Result<TournamentResult> {
    cfg.validate()?;
    a1.validate()?;
    a2.validate()?;
    let protocol = Protocol::new(game.clone(), cfg.gamma, cfg.mode)?;
    let noisy = NoisyProtocol::new(protocol, cfg.noise)?;
    let mut table = Vec::with_capacity(a1.menu.len());
    for u in &a1.menu {
        let mut row = Vec::with_capacity(a2.menu.len());
        for v in &a2.menu {
            row.push(noisy.run(&u.gate, &v.gate)?);
        }
        table.push(row);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut s1 = AgentState::new(a1);
    let mut s2 = AgentState::new(a2);
    let mut records = Vec::with_capacity(cfg.rounds);
    for round in 0..cfg.rounds {
        let c1 = s1.choose(&mut rng);
        let c2 = s2.choose(&mut rng);
        let result = &table[c1][c2];
        let distribution = result.distribution;
        let (outcome, payoffs, defect1, defect2) = if cfg.sampled_outcomes {
            let k = sample_outcome(&distribution, &mut rng);
            (Some(k), game.outcome_payoff(k), k / 2 == 1, k % 2 == 1)
        } else {
            (
                None,
                result.payoffs(),
                distribution.mass_on_second_strategy(0) > a2.params.trigger_threshold,
                distribution.mass_on_second_strategy(1) > a1.params.trigger_threshold,
            )
        };
        s1.observe(c1, payoffs.0, defect2);
        s2.observe(c2, payoffs.1, defect1);
        records.push(RoundRecord {
            round,
            choices: [c1, c2],
            distribution,
            outcome,
            payoffs,
        });
    }
    let mean_payoffs = mean(&records);
    Ok(TournamentResult {
        records,
        mean_payoffs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdvantageConfig {
    pub rounds: usize,
    /// Trailing rounds over which the conditions are compared.
    pub window: usize,
    pub seed: u64,
    pub gamma: f64,
    pub mode: EntanglerMode,
    pub noise: NoiseSpec,
    pub sampled_outcomes: bool,
    pub agent: AgentParams,
}

impl Default for AdvantageConfig {
    fn default() -> Self {
        Self {
            rounds: 10_000,
            window: 1_000,
            seed: 0,
            gamma: FRAC_PI_2,
            mode: EntanglerMode::default(),
            noise: NoiseSpec::none(),
            sampled_outcomes: false,
            agent: AgentParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub menu: Vec<String>,
    pub mean_payoffs: (f64, f64),
    pub window_mean_payoffs: (f64, f64),
    #[serde(skip)]
    pub result: TournamentResult,
}

impl ConditionReport {
    /// Average of both agents' payoffs over the window.
    pub fn window_mean(&self) -> f64 {
        0.5 * (self.window_mean_payoffs.0 + self.window_mean_payoffs.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdvantageReport {
    pub quantum: ConditionReport,
    pub classical: ConditionReport,
    /// Whether the quantum-menu condition earns strictly more over the window.
    pub quantum_advantage: bool,
}

/// Bandit against bandit, once with menu `{C, D, Q}` and once with
/// `{C, D}`, on the same seed.
pub fn menu_advantage_experiment(
    game: &Bimatrix,
    cfg: &AdvantageConfig,
) -> Result<AdvantageReport> {
    if cfg.window == 0 {
        return Err(Error::InvalidConfig(
            "advantage.window must be at least 1".into(),
        ));
    }
    let g = canonical_gates(cfg.mode);
    let quantum_menu = vec![
        LabeledGate::new("C", g.c),
        LabeledGate::new("D", g.d),
        LabeledGate::new("Q", g.q),
    ];
    let classical_menu = quantum_menu[..2].to_vec();
    let tcfg = TournamentConfig {
        rounds: cfg.rounds,
        gamma: cfg.gamma,
        mode: cfg.mode,
        noise: cfg.noise,
        seed: cfg.seed,
        sampled_outcomes: cfg.sampled_outcomes,
    };
    let run = |menu: Vec<LabeledGate>| -> Result<ConditionReport> {
        let agent = AgentSpec::new(AgentKind::EpsilonGreedyBandit, menu, cfg.agent)?;
        let result = play_tournament(game, &agent, &agent, &tcfg)?;
        Ok(ConditionReport {
            menu: agent.menu.iter().map(|g| g.label.clone()).collect(),
            mean_payoffs: result.mean_payoffs,
            window_mean_payoffs: result.tail_mean(cfg.window),
            result,
        })
    };
    let quantum = run(quantum_menu)?;
    let classical = run(classical_menu)?;
    let quantum_advantage = quantum.window_mean() > classical.window_mean();
    Ok(AdvantageReport {
        quantum,
        classical,
        quantum_advantage,
    })
}
