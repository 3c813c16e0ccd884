//! JSON run configuration. Every section is optional; missing keys take
//! their defaults and unknown keys are rejected.

use std::path::PathBuf;

use qgame::ewl::{LabeledGate, DEFAULT_SUPPORT_CAP};
use qgame::games::{canonical_pd, hft_game, Bimatrix, Player};
use qgame::hft::{AgentKind, AgentParams, AgentSpec};
use qgame::noise::{NoiseKind, NoiseSpec};
use qgame::qcore::{check_gamma, EntanglerMode};
use qgame::search::{SearchConfig, StrategySpace, DEFAULT_MENU_POINTS};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::strategy::{parse_gate, parse_strategy, Angle, Strategy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GameSource {
    Named(String),
    Inline(Bimatrix),
}

impl GameSource {
    pub fn resolve(&self) -> Result<Bimatrix, CliError> {
        match self {
            GameSource::Named(name) => match name.as_str() {
                "pd" => Ok(canonical_pd()),
                "hft" => Ok(hft_game()),
                other => Err(CliError::config(format!(
                    "game: unknown name `{other}` (expected \"pd\" or \"hft\")"
                ))),
            },
            GameSource::Inline(g) => Ok(g.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SpaceName {
    #[default]
    A,
    B,
}

impl SpaceName {
    pub fn space(self) -> StrategySpace {
        match self {
            SpaceName::A => StrategySpace::A,
            SpaceName::B => StrategySpace::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub steps: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { steps: 17 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LandscapeSection {
    pub space: SpaceName,
    pub responder: Player,
    pub opponent: String,
}

impl Default for LandscapeSection {
    fn default() -> Self {
        Self {
            space: SpaceName::A,
            responder: Player::One,
            opponent: "Q".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquilibriaSection {
    /// Deviation space for the ε-Nash check of the configured players.
    pub space: SpaceName,
    /// Points per axis of the set-B menu for the mixed quantum equilibrium;
    /// zero skips it.
    pub menu_points: usize,
}

impl Default for EquilibriaSection {
    fn default() -> Self {
        Self {
            space: SpaceName::A,
            menu_points: DEFAULT_MENU_POINTS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdSection {
    /// Channel searched for the advantage threshold; `none` skips it.
    pub kind: NoiseKind,
    pub tolerance: f64,
    pub limit: f64,
    /// Noise levels tabulated by the `noise` command.
    pub steps: usize,
}

impl Default for ThresholdSection {
    fn default() -> Self {
        Self {
            kind: NoiseKind::TwoQubitDepolarizing,
            tolerance: 1e-3,
            limit: qgame::noise::NOTIONAL_LIMIT,
            steps: 11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    pub kind: AgentKind,
    pub menu: Vec<String>,
    pub params: AgentParams,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            kind: AgentKind::EpsilonGreedyBandit,
            menu: vec!["C".into(), "D".into(), "Q".into()],
            params: AgentParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TournamentSection {
    pub rounds: usize,
    pub seed: u64,
    pub sampled_outcomes: bool,
    pub agents: [AgentConfig; 2],
}

impl Default for TournamentSection {
    fn default() -> Self {
        Self {
            rounds: 10_000,
            seed: 0,
            sampled_outcomes: false,
            agents: [AgentConfig::default(), AgentConfig::default()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdvantageSection {
    pub rounds: usize,
    pub window: usize,
    pub seed: u64,
    pub sampled_outcomes: bool,
    pub agent: AgentParams,
}

impl Default for AdvantageSection {
    fn default() -> Self {
        Self {
            rounds: 10_000,
            window: 1_000,
            seed: 0,
            sampled_outcomes: false,
            agent: AgentParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub game: GameSource,
    pub gamma: Angle,
    pub entangler_mode: EntanglerMode,
    pub players: [String; 2],
    pub noise: NoiseSpec,
    pub search: SearchConfig,
    pub sweep: SweepSection,
    pub landscape: LandscapeSection,
    pub equilibria: EquilibriaSection,
    pub threshold: ThresholdSection,
    pub tournament: TournamentSection,
    pub advantage: AdvantageSection,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            game: GameSource::Named("pd".into()),
            gamma: Angle::Text("pi/2".into()),
            entangler_mode: EntanglerMode::default(),
            players: ["Q".into(), "Q".into()],
            noise: NoiseSpec::none(),
            search: SearchConfig::default(),
            sweep: SweepSection::default(),
            landscape: LandscapeSection::default(),
            equilibria: EquilibriaSection::default(),
            threshold: ThresholdSection::default(),
            tournament: TournamentSection::default(),
            advantage: AdvantageSection::default(),
            output: OutputSection::default(),
        }
    }
}

/// A configuration with every name and angle resolved.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub game: Bimatrix,
    pub gamma: f64,
    pub mode: EntanglerMode,
    pub players: [Strategy; 2],
    pub landscape_opponent: LabeledGate,
    pub agents: [AgentSpec; 2],
}

/// Prefixes a validation failure with the offending field.
fn context(name: &str, e: CliError) -> CliError {
    match e {
        CliError::Config(m) => CliError::config(format!("{name}: {m}")),
        CliError::Numeric(n) => CliError::config(format!("{name}: {n}")),
        io => io,
    }
}

fn field<T>(name: &str, r: qgame::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::config(format!("{name}: {e}")))
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(format!(
            "{name} must be positive, got {x}"
        )))
    }
}

fn at_least(name: &str, value: usize, min: usize) -> Result<(), CliError> {
    if value >= min {
        Ok(())
    } else {
        Err(CliError::config(format!(
            "{name} must be at least {min}, got {value}"
        )))
    }
}

impl RunConfig {
    /// Checks every field and resolves names and angles.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let game = self.game.resolve()?;
        let gamma = field("gamma", check_gamma(self.gamma.radians()?))?;
        let mode = self.entangler_mode;
        let player = |k: usize| -> Result<Strategy, CliError> {
            let name = format!("players[{k}]");
            let s = parse_strategy(&self.players[k], mode).map_err(|e| context(&name, e))?;
            s.to_mixed(DEFAULT_SUPPORT_CAP)
                .map_err(|e| context(&name, e))?;
            Ok(s)
        };
        let players = [player(0)?, player(1)?];
        field("noise", self.noise.validate())?;
        field("search", self.search.validate())?;
        at_least("sweep.steps", self.sweep.steps, 2)?;
        at_least("threshold.steps", self.threshold.steps, 2)?;
        positive("threshold.tolerance", self.threshold.tolerance)?;
        if !self.threshold.limit.is_finite() {
            return Err(CliError::config("threshold.limit must be finite"));
        }
        at_least("tournament.rounds", self.tournament.rounds, 1)?;
        at_least("advantage.rounds", self.advantage.rounds, 1)?;
        at_least("advantage.window", self.advantage.window, 1)?;
        let landscape_opponent = parse_gate(&self.landscape.opponent, mode)
            .map_err(|e| context("landscape.opponent", e))?;
        let agent = |k: usize| -> Result<AgentSpec, CliError> {
            let a = &self.tournament.agents[k];
            let menu = a
                .menu
                .iter()
                .map(|s| parse_gate(s, mode))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| context(&format!("tournament.agents[{k}].menu"), e))?;
            field(
                &format!("tournament.agents[{k}]"),
                AgentSpec::new(a.kind, menu, a.params),
            )
        };
        let agents = [agent(0)?, agent(1)?];
        let a = &self.advantage.agent;
        for (name, v) in [("epsilon", a.epsilon), ("learning_rate", a.learning_rate)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(CliError::config(format!(
                    "advantage.agent.{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(Resolved {
            game,
            gamma,
            mode,
            players,
            landscape_opponent,
            agents,
        })
    }

    /// Replaces every seed in the configuration.
    pub fn override_seed(&mut self, seed: u64) {
        self.search.seed = seed;
        self.tournament.seed = seed;
        self.advantage.seed = seed;
    }
}

/// Parses and validates a JSON configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let cfg: RunConfig =
        serde_json::from_str(text).map_err(|e| CliError::config(format!("invalid JSON: {e}")))?;
    cfg.resolve()?;
    Ok(cfg)
}

pub fn to_json(cfg: &RunConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("config serializes")
}
