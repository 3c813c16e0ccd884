//! One function per command, each turning a configuration into a report.

use qgame::ewl::DEFAULT_SUPPORT_CAP;
use qgame::ewl::{LabeledGate, Protocol};
use qgame::games::{
    best_correlated, is_correlated_equilibrium, mixed_nash, pareto_optimal, pure_nash, Bimatrix,
    CorrelatedObjective, PureProfile, DEFAULT_EPS,
};
use qgame::hft::{menu_advantage_experiment, play_tournament, AdvantageConfig, TournamentConfig};
use qgame::noise::{
    advantage_threshold, gamma_sweep_with_noise, NoiseSpec, NoisyProtocol, ThresholdConfig,
};
use qgame::search::{
    default_menu, linspace, mixed_quantum_equilibrium, payoff_landscape, verify_eps_nash,
};
use serde_json::json;

use crate::config::{Resolved, RunConfig, SpaceName};
use crate::error::CliError;
use crate::report::{Cell, Report};
use crate::strategy::Strategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Payoff,
    Equilibria,
    Landscape,
    Sweep,
    Noise,
    Correlated,
    Tournament,
    Advantage,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Payoff => "payoff",
            Command::Equilibria => "equilibria",
            Command::Landscape => "landscape",
            Command::Sweep => "sweep",
            Command::Noise => "noise",
            Command::Correlated => "correlated",
            Command::Tournament => "tournament",
            Command::Advantage => "advantage",
        }
    }
}

pub fn dispatch(cmd: Command, cfg: &RunConfig) -> Result<Report, CliError> {
    let r = cfg.resolve()?;
    match cmd {
        Command::Payoff => payoff(cfg, &r),
        Command::Equilibria => equilibria(cfg, &r),
        Command::Landscape => landscape(cfg, &r),
        Command::Sweep => sweep(cfg, &r),
        Command::Noise => noise(cfg, &r),
        Command::Correlated => Ok(correlated(&r.game)),
        Command::Tournament => tournament(cfg, &r),
        Command::Advantage => advantage(cfg, &r),
    }
}

fn pure_pair<'a>(
    r: &'a Resolved,
    cmd: &str,
) -> Result<(&'a LabeledGate, &'a LabeledGate), CliError> {
    Ok((r.players[0].pure(cmd)?, r.players[1].pure(cmd)?))
}

fn base_summary(report: &mut Report, cfg: &RunConfig, r: &Resolved) {
    report.set("gamma", r.gamma);
    report.set("entangler_mode", cfg.entangler_mode);
    report.set("players", [r.players[0].label(), r.players[1].label()]);
}

fn payoff(cfg: &RunConfig, r: &Resolved) -> Result<Report, CliError> {
    let protocol = Protocol::new(r.game.clone(), r.gamma, r.mode)?;
    let result = match (&r.players[0], &r.players[1]) {
        (Strategy::Pure(u), Strategy::Pure(v)) => {
            NoisyProtocol::new(protocol, cfg.noise)?.run(&u.gate, &v.gate)?
        }
        (a, b) => {
            if !cfg.noise.is_identity() {
                return Err(CliError::config(
                    "noise is not supported with mixed strategies",
                ));
            }
            protocol.run_mixed(
                &a.to_mixed(DEFAULT_SUPPORT_CAP)?,
                &b.to_mixed(DEFAULT_SUPPORT_CAP)?,
            )?
        }
    };
    let probs = *result.distribution.probs();
    let mut report = Report::new(
        "payoff",
        &[
            "player_I",
            "player_II",
            "gamma",
            "p00",
            "p01",
            "p10",
            "p11",
            "payoff_I",
            "payoff_II",
        ],
    );
    let mut row: Vec<Cell> = vec![
        r.players[0].label().into(),
        r.players[1].label().into(),
        r.gamma.into(),
    ];
    row.extend(probs.iter().map(|&p| Cell::Num(p)));
    row.extend([result.payoff_i.into(), result.payoff_ii.into()]);
    report.push(row);
    base_summary(&mut report, cfg, r);
    report.set("noise", cfg.noise);
    report.set("distribution", probs);
    report.set("payoffs", [result.payoff_i, result.payoff_ii]);
    Ok(report)
}

fn profile_names(g: &Bimatrix, profiles: &[PureProfile]) -> Vec<[String; 2]> {
    profiles
        .iter()
        .map(|p| {
            let (a, b) = p.labels(g);
            [a.to_string(), b.to_string()]
        })
        .collect()
}

fn equilibria(cfg: &RunConfig, r: &Resolved) -> Result<Report, CliError> {
    let g = &r.game;
    let mut report = Report::new(
        "equilibria",
        &[
            "kind",
            "player_I",
            "player_II",
            "p",
            "q",
            "payoff_I",
            "payoff_II",
        ],
    );
    let nash = pure_nash(g);
    let pareto = pareto_optimal(g);
    for (kind, set) in [("pure_nash", &nash), ("pareto", &pareto)] {
        for p in set {
            let (a, b) = p.labels(g);
            let (x, y) = g.payoff(p.row, p.col);
            let pr = if p.row == 0 { 1.0 } else { 0.0 };
            let qc = if p.col == 0 { 1.0 } else { 0.0 };
            report.push(vec![
                kind.into(),
                a.into(),
                b.into(),
                pr.into(),
                qc.into(),
                x.into(),
                y.into(),
            ]);
        }
    }
    let mixed = mixed_nash(g);
    for m in &mixed.equilibria {
        let (x, y) = qgame::games::expected_payoff(g, m);
        report.push(vec![
            "mixed_nash".into(),
            Cell::Empty,
            Cell::Empty,
            m.p.into(),
            m.q.into(),
            x.into(),
            y.into(),
        ]);
    }
    report.set("pure_nash", profile_names(g, &nash));
    report.set("pareto_optimal", profile_names(g, &pareto));
    report.set("mixed_nash", &mixed);

    let protocol = NoisyProtocol::new(Protocol::new(g.clone(), r.gamma, r.mode)?, cfg.noise)?;
    if let (Strategy::Pure(u), Strategy::Pure(v)) = (&r.players[0], &r.players[1]) {
        let space = cfg.equilibria.space.space();
        let check = verify_eps_nash(&protocol, &u.gate, &v.gate, &space, &cfg.search)?;
        let payoffs = protocol.run(&u.gate, &v.gate)?.payoffs();
        report.push(vec![
            "eps_nash_check".into(),
            u.label.clone().into(),
            v.label.clone().into(),
            Cell::Empty,
            Cell::Empty,
            payoffs.0.into(),
            payoffs.1.into(),
        ]);
        report.set(
            "eps_nash_check",
            json!({
                "space": cfg.equilibria.space,
                "is_eps_nash": check.is_eps_nash,
                "max_improvement": check.max_improvement,
                "best_responses": check.responses.iter().map(|b| json!({
                    "responder": b.responder,
                    "strategy": b.params.label(),
                    "payoff": b.payoff,
                    "improvement": b.improvement,
                })).collect::<Vec<_>>(),
            }),
        );
    }
    if cfg.equilibria.menu_points > 0 {
        let labeled = default_menu(r.mode, cfg.equilibria.menu_points);
        let menu: Vec<_> = labeled.iter().map(|g| g.gate).collect();
        let eq = mixed_quantum_equilibrium(&protocol, &menu, &cfg.search)?;
        let describe = |s: &[(usize, f64)]| -> Vec<(String, f64)> {
            s.iter()
                .map(|(k, w)| (labeled[*k].label.clone(), *w))
                .collect()
        };
        let joined = |s: &[(usize, f64)]| -> String {
            s.iter()
                .map(|(k, w)| format!("{}:{}", crate::report::format_number(*w), labeled[*k].label))
                .collect::<Vec<_>>()
                .join(" ")
        };
        report.push(vec![
            "mixed_quantum".into(),
            joined(&eq.supports[0]).into(),
            joined(&eq.supports[1]).into(),
            Cell::Empty,
            Cell::Empty,
            eq.payoffs.0.into(),
            eq.payoffs.1.into(),
        ]);
        report.set(
            "mixed_quantum",
            json!({
                "menu_size": menu.len(),
                "method": eq.method,
                "supports": [describe(&eq.supports[0]), describe(&eq.supports[1])],
                "payoffs": [eq.payoffs.0, eq.payoffs.1],
                "max_deviation_gain": eq.max_deviation_gain,
            }),
        );
    }
    base_summary(&mut report, cfg, r);
    Ok(report)
}

fn landscape(cfg: &RunConfig, r: &Resolved) -> Result<Report, CliError> {
    let protocol = NoisyProtocol::new(Protocol::new(r.game.clone(), r.gamma, r.mode)?, cfg.noise)?;
    let l = &cfg.landscape;
    let header: &[&'static str] = match l.space {
        SpaceName::A => &["theta", "phi", "payoff"],
        SpaceName::B => &["theta", "alpha", "beta", "payoff"],
    };
    let mut report = Report::new("landscape", header);
    let land = payoff_landscape(
        &protocol,
        &l.space.space(),
        l.responder,
        &r.landscape_opponent.gate,
        &cfg.search,
    )?;
    for pt in &land.points {
        let mut row: Vec<Cell> = pt.params.iter().map(|&x| Cell::Num(x)).collect();
        row.push(pt.payoff.into());
        report.push(row);
    }
    report.set("space", l.space);
    report.set("responder", l.responder);
    report.set("opponent", &r.landscape_opponent.label);
    report.set("points", land.points.len());
    if let Some(best) = land.max() {
        report.set(
            "max",
            json!({ "params": best.params, "payoff": best.payoff }),
        );
    }
    report.set("gamma", r.gamma);
    report.set("entangler_mode", cfg.entangler_mode);
    Ok(report)
}

fn sweep(cfg: &RunConfig, r: &Resolved) -> Result<Report, CliError> {
    let (u, v) = pure_pair(r, "sweep")?;
    let rows = gamma_sweep_with_noise(
        &r.game,
        r.mode,
        &u.gate,
        &v.gate,
        cfg.sweep.steps,
        &cfg.noise,
    )?;
    let mut report = Report::new("sweep", &["gamma", "payoff_I", "payoff_II"]);
    for row in &rows {
        report.push(vec![
            row.gamma.into(),
            row.payoff_i.into(),
            row.payoff_ii.into(),
        ]);
    }
    report.set("players", [&u.label, &v.label]);
    report.set("entangler_mode", cfg.entangler_mode);
    report.set("noise", cfg.noise);
    report.set("steps", rows.len());
    report.set(
        "endpoints",
        [
            [rows[0].payoff_i, rows[0].payoff_ii],
            [
                rows[rows.len() - 1].payoff_i,
                rows[rows.len() - 1].payoff_ii,
            ],
        ],
    );
    Ok(report)
}

fn noise(cfg: &RunConfig, r: &Resolved) -> Result<Report, CliError> {
    let (u, v) = pure_pair(r, "noise")?;
    let t = &cfg.threshold;
    let protocol = Protocol::new(r.game.clone(), r.gamma, r.mode)?;
    let mut report = Report::new("noise", &["p", "payoff_I", "payoff_II"]);
    for p in linspace(0.0, 1.0, t.steps) {
        let spec = NoiseSpec::new(t.kind, p)?.with_placement(cfg.noise.placement);
        let (a, b) = NoisyProtocol::new(protocol.clone(), spec)?
            .run(&u.gate, &v.gate)?
            .payoffs();
        report.push(vec![p.into(), a.into(), b.into()]);
    }
    let configured = NoisyProtocol::new(protocol, cfg.noise)?.run(&u.gate, &v.gate)?;
    let threshold = advantage_threshold(
        &r.game,
        r.mode,
        t.kind,
        &ThresholdConfig {
            search: cfg.search,
            gamma: r.gamma,
            placement: cfg.noise.placement,
            tolerance: t.tolerance,
            limit: t.limit,
        },
    )?;
    base_summary(&mut report, cfg, r);
    report.set("noise", cfg.noise);
    report.set("payoffs", [configured.payoff_i, configured.payoff_ii]);
    report.set("distribution", configured.distribution.probs());
    report.set("table_kind", t.kind);
    report.set("threshold", threshold);
    report.set("limit", t.limit);
    Ok(report)
}

fn correlated(g: &Bimatrix) -> Report {
    let mut report = Report::new(
        "correlated",
        &[
            "objective",
            "mu_00",
            "mu_01",
            "mu_10",
            "mu_11",
            "value",
            "is_correlated",
        ],
    );
    let mut solutions = serde_json::Map::new();
    for (name, obj) in [
        ("welfare", CorrelatedObjective::Welfare),
        ("player_I", CorrelatedObjective::PlayerOne),
        ("player_II", CorrelatedObjective::PlayerTwo),
    ] {
        let s = best_correlated(g, obj);
        let ok = is_correlated_equilibrium(g, &s.mu, DEFAULT_EPS);
        let mut row: Vec<Cell> = vec![name.into()];
        row.extend(s.mu.mu().iter().map(|&m| Cell::Num(m)));
        row.push(s.value.into());
        row.push(ok.to_string().into());
        report.push(row);
        solutions.insert(name.into(), json!({ "mu": s.mu.mu(), "value": s.value }));
    }
    report.set("optima", solutions);
    report.set("labels", [g.row_labels(), g.col_labels()]);
    report
}

fn tournament(cfg: &RunConfig, r: &Resolved) -> Result<Report, CliError> {
    let t = &cfg.tournament;
    let tcfg = TournamentConfig {
        rounds: t.rounds,
        gamma: r.gamma,
        mode: r.mode,
        noise: cfg.noise,
        seed: t.seed,
        sampled_outcomes: t.sampled_outcomes,
    };
    let [a1, a2] = &r.agents;
    let result = play_tournament(&r.game, a1, a2, &tcfg)?;
    let mut report = Report::new(
        "tournament",
        &[
            "round",
            "choice_I",
            "choice_II",
            "p00",
            "p01",
            "p10",
            "p11",
            "outcome",
            "payoff_I",
            "payoff_II",
        ],
    );
    for rec in &result.records {
        let mut row: Vec<Cell> = vec![
            rec.round.into(),
            a1.menu[rec.choices[0]].label.clone().into(),
            a2.menu[rec.choices[1]].label.clone().into(),
        ];
        row.extend(rec.distribution.probs().iter().map(|&p| Cell::Num(p)));
        row.push(rec.outcome.into());
        row.extend([rec.payoffs.0.into(), rec.payoffs.1.into()]);
        report.push(row);
    }
    report.set("rounds", t.rounds);
    report.set("seed", t.seed);
    report.set("sampled_outcomes", t.sampled_outcomes);
    report.set("agents", &t.agents);
    report.set(
        "mean_payoffs",
        [result.mean_payoffs.0, result.mean_payoffs.1],
    );
    report.set("gamma", r.gamma);
    report.set("entangler_mode", cfg.entangler_mode);
    report.set("noise", cfg.noise);
    Ok(report)
}

fn advantage(cfg: &RunConfig, r: &Resolved) -> Result<Report, CliError> {
    let a = &cfg.advantage;
    let acfg = AdvantageConfig {
        rounds: a.rounds,
        window: a.window,
        seed: a.seed,
        gamma: r.gamma,
        mode: r.mode,
        noise: cfg.noise,
        sampled_outcomes: a.sampled_outcomes,
        agent: a.agent,
    };
    let rep = menu_advantage_experiment(&r.game, &acfg)?;
    let mut report = Report::new(
        "advantage",
        &[
            "condition",
            "round",
            "choice_I",
            "choice_II",
            "payoff_I",
            "payoff_II",
        ],
    );
    for (name, cond) in [("quantum", &rep.quantum), ("classical", &rep.classical)] {
        for rec in &cond.result.records {
            report.push(vec![
                name.into(),
                rec.round.into(),
                cond.menu[rec.choices[0]].clone().into(),
                cond.menu[rec.choices[1]].clone().into(),
                rec.payoffs.0.into(),
                rec.payoffs.1.into(),
            ]);
        }
    }
    report.set("quantum", &rep.quantum);
    report.set("classical", &rep.classical);
    report.set("quantum_advantage", rep.quantum_advantage);
    report.set("window", a.window);
    report.set("rounds", a.rounds);
    report.set("seed", a.seed);
    report.set("gamma", r.gamma);
    Ok(report)
}
