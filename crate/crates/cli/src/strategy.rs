//! Text forms of angles and strategies: `"pi/2"`, `"A(0,pi/2)"`,
//! `"mixed:[0.5:C,0.5:B(pi/2,0,pi)]"`.

use std::f64::consts::PI;

use qgame::ewl::{
    canonical_gates, gate_from_a, gate_from_b, LabeledGate, MixedQuantumStrategy, StrategyParamsA,
    StrategyParamsB,
};
use qgame::qcore::EntanglerMode;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// An angle written either as a number of radians or as a multiple of π.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Radians(f64),
    Text(String),
}

impl Angle {
    pub fn radians(&self) -> Result<f64, CliError> {
        match self {
            Angle::Radians(x) => Ok(*x),
            Angle::Text(s) => parse_angle(s),
        }
    }
}

/// Parses `"pi"`, `"-pi/4"`, `"3pi/8"`, `"3*pi/8"`, `"0.25"`, `"1/3"`.
/// Multiples of π are evaluated as `k·π/d`, so `"pi/2"` is bit-identical
/// to `FRAC_PI_2`.
pub fn parse_angle(text: &str) -> Result<f64, CliError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::config(format!("cannot parse angle `{text}`"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.as_str()),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (body, 1.0),
    };
    if den == 0.0 {
        return Err(bad());
    }
    let value = if let Some(coef) = num.strip_suffix("pi") {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let k = if coef.is_empty() {
            1.0
        } else {
            coef.parse::<f64>().map_err(|_| bad())?
        };
        k * PI / den
    } else {
        num.parse::<f64>().map_err(|_| bad())? / den
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(if neg { -value } else { value })
}

fn parse_weight(text: &str) -> Result<f64, CliError> {
    let t = text.trim();
    let bad = || CliError::config(format!("cannot parse weight `{t}`"));
    match t.split_once('/') {
        Some((n, d)) => {
            let (n, d) = (
                n.parse::<f64>().map_err(|_| bad())?,
                d.parse::<f64>().map_err(|_| bad())?,
            );
            if d == 0.0 {
                return Err(bad());
            }
            Ok(n / d)
        }
        None => t.parse().map_err(|_| bad()),
    }
}

/// Splits on commas outside parentheses and brackets.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn call_args<'a>(text: &'a str, name: &str) -> Option<&'a str> {
    text.strip_prefix(name)?
        .trim()
        .strip_prefix('(')?
        .strip_suffix(')')
}

fn angles(args: &str, n: usize, text: &str) -> Result<Vec<f64>, CliError> {
    let parts = split_top_level(args);
    if parts.len() != n {
        return Err(CliError::config(format!(
            "`{text}` takes {n} angles, got {}",
            parts.len()
        )));
    }
    parts.into_iter().map(parse_angle).collect()
}

/// A pure strategy from its text form.
pub fn parse_gate(text: &str, mode: EntanglerMode) -> Result<LabeledGate, CliError> {
    let t = text.trim();
    let named = canonical_gates(mode);
    let gate = match t {
        "C" => named.c,
        "D" => named.d,
        "Q" => named.q,
        _ => {
            if let Some(args) = call_args(t, "A") {
                let v = angles(args, 2, t)?;
                gate_from_a(&StrategyParamsA::new(v[0], v[1])?)?
            } else if let Some(args) = call_args(t, "B") {
                let v = angles(args, 3, t)?;
                gate_from_b(&StrategyParamsB::new(v[0], v[1], v[2])?)?
            } else {
                return Err(CliError::config(format!("unknown strategy `{t}`")));
            }
        }
    };
    Ok(LabeledGate::new(t, gate))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Pure(LabeledGate),
    Mixed(Vec<(f64, LabeledGate)>),
}

impl Strategy {
    pub fn label(&self) -> String {
        match self {
            Strategy::Pure(g) => g.label.clone(),
            Strategy::Mixed(parts) => {
                let inner: Vec<String> = parts
                    .iter()
                    .map(|(w, g)| format!("{w}:{}", g.label))
                    .collect();
                format!("mixed:[{}]", inner.join(","))
            }
        }
    }

    pub fn to_mixed(&self, cap: usize) -> Result<MixedQuantumStrategy, CliError> {
        let support = match self {
            Strategy::Pure(g) => vec![(1.0, g.gate)],
            Strategy::Mixed(parts) => parts.iter().map(|(w, g)| (*w, g.gate)).collect(),
        };
        Ok(MixedQuantumStrategy::new(support, cap)?)
    }

    /// The gate of a pure strategy; `context` names the command for the
    /// error on mixed input.
    pub fn pure(&self, context: &str) -> Result<&LabeledGate, CliError> {
        match self {
            Strategy::Pure(g) => Ok(g),
            Strategy::Mixed(_) => Err(CliError::config(format!(
                "{context} needs pure strategies, got `{}`",
                self.label()
            ))),
        }
    }
}

pub fn parse_strategy(text: &str, mode: EntanglerMode) -> Result<Strategy, CliError> {
    let t = text.trim();
    let Some(rest) = t.strip_prefix("mixed:") else {
        return Ok(Strategy::Pure(parse_gate(t, mode)?));
    };
    let inner = rest
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| CliError::config(format!("`{t}`: expected mixed:[weight:strategy,...]")))?;
    let mut parts = Vec::new();
    for item in split_top_level(inner) {
        let (w, g) = item
            .split_once(':')
            .ok_or_else(|| CliError::config(format!("`{item}`: expected weight:strategy")))?;
        parts.push((parse_weight(w)?, parse_gate(g, mode)?));
    }
    Ok(Strategy::Mixed(parts))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/2").unwrap(), FRAC_PI_2);
        assert_eq!(parse_angle(" -pi/4 ").unwrap(), -FRAC_PI_4);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("3pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_angle("3*pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert_eq!(parse_angle("1/4").unwrap(), 0.25);
        for bad in ["", "tau", "pi/0", "pi/x", "1e999"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn strategies() {
        let mode = EntanglerMode::EwlFaithful;
        let q = parse_gate("Q", mode).unwrap();
        let a = parse_gate("A(0, pi/2)", mode).unwrap();
        assert!(q.gate.approx_eq(&a.gate, 1e-15));
        let b = parse_gate("B(pi/2,0,0)", mode).unwrap();
        assert!(b.gate.approx_eq(&canonical_gates(mode).d, 1e-15));
        assert!(parse_gate("A(0)", mode).is_err());
        assert!(parse_gate("A(3,0)", mode).is_err());
        assert!(parse_gate("X", mode).is_err());
    }

    #[test]
    fn mixed_strategies() {
        let mode = EntanglerMode::EwlFaithful;
        let s = parse_strategy("mixed:[1/2:C, 0.5:B(pi/2,0,pi)]", mode).unwrap();
        match &s {
            Strategy::Mixed(parts) => {
                assert_eq!(parts.len(), 2);
                assert_eq!(parts[0].0, 0.5);
                assert_eq!(parts[1].1.label, "B(pi/2,0,pi)");
            }
            other => panic!("{other:?}"),
        }
        assert!(s.to_mixed(4).is_ok());
        assert!(s.pure("sweep").is_err());
        let bad = parse_strategy("mixed:[0.7:C,0.7:D]", mode).unwrap();
        assert!(bad.to_mixed(4).is_err());
        assert!(parse_strategy("mixed:C", mode).is_err());
    }
}
