//! Run configuration: a TOML manifest plus command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hiercon_core::mc::{McConfig, QvEstimator};
use hiercon_core::{extensions::SeparateVariant, Regime, WorkerParams};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    TwoLevel,
    Dc,
    Ability,
    Pc,
    SeparateReporting,
    ThreeLevel,
    Simulate,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::TwoLevel => "two_level",
            Scenario::Dc => "dc",
            Scenario::Ability => "ability",
            Scenario::Pc => "pc",
            Scenario::SeparateReporting => "separate_reporting",
            Scenario::ThreeLevel => "three_level",
            Scenario::Simulate => "simulate",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVar {
    #[serde(rename = "total_workers")]
    TotalWorkers,
    #[serde(rename = "k")]
    K,
    #[serde(rename = "R")]
    R,
    #[serde(rename = "sigma")]
    Sigma,
    #[serde(rename = "horizon")]
    Horizon,
    #[serde(rename = "m")]
    M,
    #[serde(rename = "m_tilde")]
    MTilde,
    #[serde(rename = "teams")]
    Teams,
    #[serde(rename = "agents_per_team")]
    AgentsPerTeam,
}

impl SweepVar {
    const ALL: [SweepVar; 9] = [
        SweepVar::TotalWorkers,
        SweepVar::K,
        SweepVar::R,
        SweepVar::Sigma,
        SweepVar::Horizon,
        SweepVar::M,
        SweepVar::MTilde,
        SweepVar::Teams,
        SweepVar::AgentsPerTeam,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVar::TotalWorkers => "total_workers",
            SweepVar::K => "k",
            SweepVar::R => "R",
            SweepVar::Sigma => "sigma",
            SweepVar::Horizon => "horizon",
            SweepVar::M => "m",
            SweepVar::MTilde => "m_tilde",
            SweepVar::Teams => "teams",
            SweepVar::AgentsPerTeam => "agents_per_team",
        }
    }

    fn is_count(&self) -> bool {
        matches!(self, SweepVar::TotalWorkers | SweepVar::Teams | SweepVar::AgentsPerTeam)
    }
}

impl FromStr for SweepVar {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        SweepVar::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| CliError::config(format!("unknown sweep variable `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVar,
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

impl Sweep {
    /// Parse `VAR:FROM:TO:COUNT`.
    pub fn parse(spec: &str) -> CliResult<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let [var, from, to, count] = parts[..] else {
            return Err(CliError::config(format!("sweep `{spec}` is not VAR:FROM:TO:COUNT")));
        };
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| CliError::config(format!("sweep bound `{s}` is not a number")))
        };
        Ok(Sweep {
            variable: var.parse()?,
            from: num(from)?,
            to: num(to)?,
            count: count
                .parse()
                .map_err(|_| CliError::config(format!("sweep count `{count}` is not a whole number")))?,
        })
    }

    pub fn points(&self) -> CliResult<Vec<f64>> {
        if !(self.from.is_finite() && self.to.is_finite()) {
            return Err(CliError::config("sweep bounds must be finite"));
        }
        if self.count == 0 {
            return Err(CliError::config("sweep count must be at least 1"));
        }
        if self.from > self.to {
            return Err(CliError::config("sweep needs from <= to"));
        }
        if self.count == 1 && self.from != self.to {
            return Err(CliError::config("a one-point sweep needs from == to"));
        }
        let pts: Vec<f64> = if self.count == 1 {
            vec![self.from]
        } else {
            let step = (self.to - self.from) / (self.count - 1) as f64;
            (0..self.count)
                .map(|i| if i + 1 == self.count { self.to } else { self.from + step * i as f64 })
                .collect()
        };
        if self.variable.is_count() {
            for &p in &pts {
                if (p - p.round()).abs() > 1e-9 || p < 0.0 {
                    return Err(CliError::config(format!(
                        "sweep of `{}` hits non-integer point {p}",
                        self.variable.as_str()
                    )));
                }
            }
            return Ok(pts.into_iter().map(f64::round).collect());
        }
        Ok(pts)
    }
}

/// Identical workers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Workers {
    /// `[k, R, σ]`.
    #[serde(default = "reference_params")]
    pub params: [f64; 3],
    /// Manager included.
    #[serde(default = "default_total")]
    pub total_workers: usize,
}

fn reference_params() -> [f64; 3] {
    [1000.0, 50.0, 1.0]
}

fn default_total() -> usize {
    2
}

impl Default for Workers {
    fn default() -> Self {
        Self {
            params: reference_params(),
            total_workers: default_total(),
        }
    }
}

/// Heterogeneous firm, replacing `[workers]` when present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitFirm {
    pub manager: [f64; 3],
    #[serde(default)]
    pub agents: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ability {
    #[serde(deserialize_with = "one_or_many")]
    pub m: Vec<f64>,
    #[serde(deserialize_with = "one_or_many")]
    pub m_tilde: Vec<f64>,
}

impl Default for Ability {
    fn default() -> Self {
        Self {
            m: vec![0.6],
            m_tilde: vec![0.1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Separate {
    #[serde(default = "default_variant")]
    pub variant: SeparateVariant,
    #[serde(default = "default_z1")]
    pub z1: Vec<f64>,
}

fn default_variant() -> SeparateVariant {
    SeparateVariant::B0
}

fn default_z1() -> Vec<f64> {
    vec![1.0, 1e-1, 1e-2, 1e-3, 1e-4]
}

impl Default for Separate {
    fn default() -> Self {
        Self {
            variant: default_variant(),
            z1: default_z1(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeLevel {
    pub teams: usize,
    pub agents_per_team: usize,
}

impl Default for ThreeLevel {
    fn default() -> Self {
        Self {
            teams: 2,
            agents_per_team: 2,
        }
    }
}

/// Monte Carlo settings; unset fields take the simulator defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mc {
    pub paths: Option<usize>,
    pub steps: Option<usize>,
    pub seed: Option<u64>,
    pub antithetic: Option<bool>,
    pub qv: Option<QvEstimator>,
}

impl Mc {
    pub fn resolve(&self) -> CliResult<McConfig> {
        let d = McConfig::default();
        let cfg = McConfig {
            paths: self.paths.unwrap_or(d.paths),
            steps: self.steps.unwrap_or(d.steps),
            seed: self.seed.unwrap_or(d.seed),
            antithetic: self.antithetic.unwrap_or(d.antithetic),
            qv: self.qv.unwrap_or(d.qv),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Explicit manager rates, used by `simulate` instead of solving.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rates {
    pub z: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::config(format!("unknown format `{s}`, expected csv or json"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Output {
    /// Explicit format, else inferred from the path extension, else CSV.
    pub fn format(&self) -> Format {
        self.format.unwrap_or_else(|| match &self.path {
            Some(p) if p.extension().is_some_and(|e| e == "json") => Format::Json,
            _ => Format::Csv,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Option<Scenario>,
    #[serde(default = "default_regimes")]
    pub regimes: Vec<Regime>,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default)]
    pub workers: Workers,
    pub firm: Option<ExplicitFirm>,
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub ability: Ability,
    #[serde(default)]
    pub separate: Separate,
    #[serde(default)]
    pub three_level: ThreeLevel,
    #[serde(default)]
    pub mc: Mc,
    pub rates: Option<Rates>,
    #[serde(default)]
    pub output: Output,
}

fn default_regimes() -> Vec<Regime> {
    Regime::ALL.to_vec()
}

fn default_horizon() -> f64 {
    1.0
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            regimes: default_regimes(),
            horizon: default_horizon(),
            workers: Workers::default(),
            firm: None,
            sweep: None,
            ability: Ability::default(),
            separate: Separate::default(),
            three_level: ThreeLevel::default(),
            mc: Mc::default(),
            rates: None,
            output: Output::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    pub fn scenario(&self) -> CliResult<Scenario> {
        self.scenario.ok_or_else(|| CliError::config("no scenario given"))
    }

    /// Check everything that can be checked without solving.
    pub fn validate(&self) -> CliResult<()> {
        let scenario = self.scenario()?;
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(CliError::config(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.regimes.is_empty() {
            return Err(CliError::config("regimes must not be empty"));
        }
        if self.workers.total_workers == 0 {
            return Err(CliError::config("total_workers must be at least 1"));
        }
        params(self.workers.params)?;
        if let Some(f) = &self.firm {
            params(f.manager)?;
            for a in &f.agents {
                params(*a)?;
            }
        }
        if let Some(s) = &self.sweep {
            s.points()?;
            let v = s.variable;
            let fits = match v {
                SweepVar::M | SweepVar::MTilde => scenario == Scenario::Ability,
                SweepVar::Teams | SweepVar::AgentsPerTeam => scenario == Scenario::ThreeLevel,
                SweepVar::TotalWorkers => scenario != Scenario::ThreeLevel,
                _ => true,
            };
            if !fits {
                return Err(CliError::config(format!(
                    "sweep variable `{}` does not apply to scenario {scenario}",
                    v.as_str()
                )));
            }
            let touches_workers = matches!(v, SweepVar::TotalWorkers | SweepVar::K | SweepVar::R | SweepVar::Sigma);
            if self.firm.is_some() && touches_workers {
                return Err(CliError::config(format!(
                    "sweep variable `{}` needs identical workers, not an explicit [firm]",
                    v.as_str()
                )));
            }
        }
        if scenario == Scenario::ThreeLevel && self.firm.is_some() {
            return Err(CliError::config("three_level builds its organisation from [workers]"));
        }
        if scenario == Scenario::Simulate && self.rates.is_none() && self.simulate_regime() == Regime::Direct {
            return Err(CliError::config("simulate needs a delegated regime or explicit [rates]"));
        }
        if scenario == Scenario::Simulate {
            self.mc.resolve()?;
        }
        Ok(())
    }

    /// Regime whose optimal rates `simulate` uses.
    pub fn simulate_regime(&self) -> Regime {
        self.regimes[0]
    }
}

pub fn params(p: [f64; 3]) -> CliResult<WorkerParams> {
    Ok(WorkerParams::new(p[0], p[1], p[2])?)
}

/// Parse the `k,R,σ` shorthand.
pub fn parse_params(s: &str) -> CliResult<[f64; 3]> {
    let vals = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::config(format!("params `{s}` are not numbers")))?;
    let [k, r, sigma] = vals[..] else {
        return Err(CliError::config(format!("params `{s}` must be k,R,sigma")));
    };
    Ok([k, r, sigma])
}

pub fn parse_regimes(s: &str) -> CliResult<Vec<Regime>> {
    s.split(',')
        .map(|r| r.trim().parse::<Regime>().map_err(|_| CliError::config(format!("unknown regime `{r}`"))))
        .collect()
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(v) => v,
    })
}
