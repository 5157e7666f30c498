//! Scenario runners: expand a sweep, solve every point, build rows.

use hiercon_core::extensions::{
    apply_ability, separate_reporting_values, solve_pc, solve_three_level, AbilityParams, OrgSpec, SeparateVariant,
};
use hiercon_core::mc::{simulate, Efforts, SimRates};
use hiercon_core::two_level::{evaluate_rate, solve_two_level};
use hiercon_core::{dc_solution, FirmSpec, RateQV, Regime, SolveResult};
use rayon::prelude::*;

use crate::config::{params, RunConfig, Scenario, SweepVar};
use crate::error::{CliError, CliResult};
use crate::number::round_sig;
use crate::rows::{CompareRow, McRow, SweepRow};

/// Rows produced by one run.
#[derive(Debug, Clone, PartialEq)]
pub enum Table {
    Sweep(Vec<SweepRow>),
    Mc(Vec<McRow>),
}

/// One point of a sweep: the config with the swept variable set.
#[derive(Debug, Clone)]
struct Point {
    value: Option<f64>,
    cfg: RunConfig,
}

impl Point {
    fn var(&self) -> String {
        self.cfg
            .sweep
            .as_ref()
            .map(|s| s.variable.as_str().to_string())
            .unwrap_or_default()
    }
}

fn expand(cfg: &RunConfig) -> CliResult<Vec<Point>> {
    let Some(sweep) = &cfg.sweep else {
        return Ok(vec![Point {
            value: None,
            cfg: cfg.clone(),
        }]);
    };
    sweep
        .points()?
        .into_iter()
        .map(|v| {
            let mut c = cfg.clone();
            match sweep.variable {
                SweepVar::TotalWorkers => c.workers.total_workers = v as usize,
                SweepVar::K => c.workers.params[0] = v,
                SweepVar::R => c.workers.params[1] = v,
                SweepVar::Sigma => c.workers.params[2] = v,
                SweepVar::Horizon => c.horizon = v,
                SweepVar::M => c.ability.m = vec![v],
                SweepVar::MTilde => c.ability.m_tilde = vec![v],
                SweepVar::Teams => c.three_level.teams = v as usize,
                SweepVar::AgentsPerTeam => c.three_level.agents_per_team = v as usize,
            }
            c.validate()?;
            Ok(Point { value: Some(v), cfg: c })
        })
        .collect()
}

fn firm(cfg: &RunConfig) -> CliResult<FirmSpec> {
    let f = match &cfg.firm {
        Some(f) => FirmSpec::new(
            params(f.manager)?,
            f.agents.iter().map(|&a| params(a)).collect::<CliResult<_>>()?,
            cfg.horizon,
        )?,
        None => {
            if cfg.workers.total_workers == 0 {
                return Err(CliError::config("total_workers must be at least 1"));
            }
            FirmSpec::identical(params(cfg.workers.params)?, cfg.workers.total_workers - 1, cfg.horizon)?
        }
    };
    Ok(f)
}

/// Solve and re-evaluate at the rates rounded to output precision, so
/// that the printed rates reproduce every printed value exactly.
fn published(firm: &FirmSpec, regime: Regime) -> CliResult<SolveResult> {
    let res = solve_two_level(firm, regime)?;
    let Some(rule) = regime.gamma_rule() else {
        return Ok(res);
    };
    let z = round_sig(res.z_b);
    let gamma = round_sig(rule.gamma(z, firm.manager().r()));
    Ok(evaluate_rate(firm, regime, RateQV::new(z, gamma))?)
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b) / b.abs()
}

struct Context<'a> {
    scenario: Scenario,
    point: &'a Point,
    label: String,
    dc_value_per_worker: f64,
}

impl Context<'_> {
    fn row(&self, regime: &str, total_workers: usize, value: f64) -> SweepRow {
        let vpw = value / total_workers as f64;
        SweepRow {
            scenario: self.scenario.as_str().into(),
            label: self.label.clone(),
            sweep_var: self.point.var(),
            sweep_value: self.point.value,
            regime: regime.into(),
            total_workers,
            z_b: None,
            gamma_b: None,
            mean_agent_rate: None,
            manager_effort: None,
            principal_value: value,
            value_per_worker: vpw,
            dc_value_per_worker: self.dc_value_per_worker,
            manager_pps_gain_vs_linear: None,
            value_gain_vs_linear: None,
            value_gain_vs_dc: relative(vpw, self.dc_value_per_worker),
        }
    }

    fn solved_row(&self, res: &SolveResult, linear: &SolveResult) -> SweepRow {
        let mut row = self.row(res.regime.as_str(), res.agent_rates.len() + 1, res.principal_value);
        row.z_b = Some(res.z_b);
        row.gamma_b = Some(res.gamma_b);
        row.mean_agent_rate = res.mean_agent_rate();
        row.manager_effort = Some(res.manager_effort);
        row.manager_pps_gain_vs_linear = Some(relative(res.z_b, linear.z_b));
        row.value_gain_vs_linear = Some(relative(res.principal_value, linear.principal_value));
        row
    }
}

fn dc_per_worker(firm: &FirmSpec) -> f64 {
    let workers: Vec<_> = firm.workers().copied().collect();
    dc_solution(&workers).principal_value / workers.len() as f64
}

/// Rows for the requested regimes. With `explicit`, delegated regimes are
/// evaluated at the rates of the given rows instead of being solved.
fn regime_rows(
    ctx: &Context,
    firm: &FirmSpec,
    regimes: &[Regime],
    explicit: Option<&[SweepRow]>,
) -> CliResult<Vec<SweepRow>> {
    let mut results = Vec::with_capacity(regimes.len());
    for (i, &regime) in regimes.iter().enumerate() {
        let res = match (explicit, regime) {
            (_, Regime::Direct) => solve_two_level(firm, regime)?,
            (Some(rows), _) => {
                let row = &rows[i];
                if row.regime != regime.as_str() {
                    return Err(CliError::config(format!(
                        "row regime `{}` does not match configured regime {regime}",
                        row.regime
                    )));
                }
                let (Some(z), Some(gamma)) = (row.z_b, row.gamma_b) else {
                    return Err(CliError::config("row is missing z_b or gamma_b"));
                };
                evaluate_rate(firm, regime, RateQV::new(z, gamma))?
            }
            (None, _) => published(firm, regime)?,
        };
        results.push(res);
    }
    let linear = match results.iter().find(|r| r.regime == Regime::Linear) {
        Some(l) => l.clone(),
        None => published(firm, Regime::Linear)?,
    };
    Ok(results.iter().map(|r| ctx.solved_row(r, &linear)).collect())
}

fn ability_grid(cfg: &RunConfig) -> Vec<(f64, f64)> {
    let mut grid = Vec::new();
    for &m in &cfg.ability.m {
        for &mt in &cfg.ability.m_tilde {
            grid.push((m, mt));
        }
    }
    grid
}

fn rows_per_point(cfg: &RunConfig) -> CliResult<usize> {
    Ok(match cfg.scenario()? {
        Scenario::Dc => 1,
        Scenario::TwoLevel => cfg.regimes.len(),
        Scenario::Ability => cfg.regimes.len() * ability_grid(cfg).len(),
        other => return Err(CliError::config(format!("scenario {other} has no explicit-rate input"))),
    })
}

fn point_rows(point: &Point, explicit: Option<&[SweepRow]>) -> CliResult<Vec<SweepRow>> {
    let cfg = &point.cfg;
    let scenario = cfg.scenario()?;
    let mut ctx = Context {
        scenario,
        point,
        label: String::new(),
        dc_value_per_worker: 0.0,
    };
    if scenario == Scenario::ThreeLevel {
        return three_level_rows(&mut ctx);
    }
    let firm = firm(cfg)?;
    ctx.dc_value_per_worker = dc_per_worker(&firm);
    match scenario {
        Scenario::TwoLevel => regime_rows(&ctx, &firm, &cfg.regimes, explicit),
        Scenario::Dc => regime_rows(&ctx, &firm, &[Regime::Direct], explicit),
        Scenario::Ability => {
            let per = cfg.regimes.len();
            let mut rows = Vec::new();
            for (i, (m, mt)) in ability_grid(cfg).into_iter().enumerate() {
                let f = apply_ability(&firm, AbilityParams::new(m, mt)?)?;
                ctx.label = format!("m={m};m_tilde={mt}");
                let chunk = explicit.map(|e| &e[i * per..(i + 1) * per]);
                rows.extend(regime_rows(&ctx, &f, &cfg.regimes, chunk)?);
            }
            Ok(rows)
        }
        Scenario::Pc => {
            let res = solve_pc(&firm)?;
            let linear = published(&firm, Regime::Linear)?;
            let mut row = ctx.row("pc", firm.total_workers(), res.principal_value);
            row.z_b = Some(res.rate.z1);
            row.mean_agent_rate = mean(&res.agent_rates);
            row.manager_effort = Some(res.manager_effort);
            row.manager_pps_gain_vs_linear = Some(relative(res.rate.z1, linear.z_b));
            row.value_gain_vs_linear = Some(relative(res.principal_value, linear.principal_value));
            Ok(vec![row])
        }
        Scenario::SeparateReporting => {
            let sep = &cfg.separate;
            let values = separate_reporting_values(&firm, sep.variant, &sep.z1)?;
            let linear = published(&firm, Regime::Linear)?;
            let name = match sep.variant {
                SeparateVariant::B0 => "b0",
                SeparateVariant::Pc0 => "pc0",
            };
            Ok(sep
                .z1
                .iter()
                .zip(values)
                .map(|(&z1, v)| {
                    ctx.label = format!("z1={z1}");
                    let mut row = ctx.row(name, firm.total_workers(), v);
                    row.z_b = Some(z1);
                    row.value_gain_vs_linear = Some(relative(v, linear.principal_value));
                    row
                })
                .collect())
        }
        Scenario::ThreeLevel | Scenario::Simulate => unreachable!("handled elsewhere"),
    }
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

fn three_level_rows(ctx: &mut Context) -> CliResult<Vec<SweepRow>> {
    let cfg = &ctx.point.cfg;
    let p = params(cfg.workers.params)?;
    let org = OrgSpec::identical(p, cfg.three_level.teams, cfg.three_level.agents_per_team, cfg.horizon)?;
    let res = solve_three_level(&org)?;
    ctx.dc_value_per_worker = p.dc_value();
    ctx.label = format!(
        "teams={};agents_per_team={}",
        cfg.three_level.teams, cfg.three_level.agents_per_team
    );
    let agents: Vec<f64> = res.teams.iter().flat_map(|t| t.agent_rates.iter().copied()).collect();
    let mut row = ctx.row("three_level", res.total_workers, res.principal_value);
    row.z_b = Some(res.z);
    row.gamma_b = Some(res.gamma);
    row.mean_agent_rate = mean(&agents);
    row.manager_effort = Some(res.top_manager_effort);
    Ok(vec![row])
}

fn simulate_row(point: &Point) -> CliResult<McRow> {
    let cfg = &point.cfg;
    let firm = firm(cfg)?;
    let mc = cfg.mc.resolve()?;
    let (regime_label, res) = match cfg.rates {
        Some(r) => (
            "explicit".to_string(),
            evaluate_rate(&firm, Regime::Sophisticated, RateQV::new(r.z, r.gamma))?,
        ),
        None => {
            let regime = cfg.simulate_regime();
            (regime.as_str().to_string(), published(&firm, regime)?)
        }
    };
    let bundle = simulate(&firm, &SimRates::from_solution(&res), &Efforts::BestResponse, &mc)?;
    let s = bundle.summary;
    let qv_rate = firm.manager().variance()
        + firm
            .agents()
            .iter()
            .zip(&res.agent_rates)
            .map(|(a, &z)| a.variance() * (1.0 - z) * (1.0 - z))
            .sum::<f64>();
    let agent = s.agent_utility.first();
    Ok(McRow {
        scenario: Scenario::Simulate.as_str().into(),
        label: String::new(),
        sweep_var: point.var(),
        sweep_value: point.value,
        regime: regime_label,
        total_workers: firm.total_workers(),
        z_b: res.z_b,
        gamma_b: res.gamma_b,
        horizon: firm.horizon(),
        paths: mc.paths,
        steps: mc.steps,
        seed: mc.seed,
        units: s.units,
        flagged_paths: s.flagged_paths,
        agent_utility_mean: agent.map(|e| e.mean),
        agent_utility_se: agent.map(|e| e.std_err),
        // contracts leave every worker at certainty equivalent zero
        agent_utility_target: agent.map(|_| -1.0),
        manager_utility_mean: s.manager_utility.mean,
        manager_utility_se: s.manager_utility.std_err,
        manager_utility_target: -1.0,
        principal_payoff_mean: s.principal_payoff.mean,
        principal_payoff_se: s.principal_payoff.std_err,
        principal_payoff_target: res.horizon_value(),
        zeta_qv_mean: s.zeta_qv.mean,
        zeta_qv_se: s.zeta_qv.std_err,
        zeta_qv_target: qv_rate * firm.horizon(),
    })
}

/// Collect per-point results in sweep order.
fn ordered<T: Send>(points: &[Point], f: impl Fn(&Point) -> CliResult<Vec<T>> + Sync + Send) -> CliResult<Vec<T>> {
    let chunks: Vec<CliResult<Vec<T>>> = points.par_iter().map(f).collect();
    let mut rows = Vec::new();
    for c in chunks {
        rows.extend(c?);
    }
    Ok(rows)
}

pub fn run(cfg: &RunConfig) -> CliResult<Table> {
    cfg.validate()?;
    let points = expand(cfg)?;
    if cfg.scenario()? == Scenario::Simulate {
        return Ok(Table::Mc(ordered(&points, |p| simulate_row(p).map(|r| vec![r]))?));
    }
    Ok(Table::Sweep(ordered(&points, |p| point_rows(p, None))?))
}

/// Recompute `rows` from `cfg`, taking the manager rates from the rows
/// rather than solving for them.
pub fn replay(cfg: &RunConfig, rows: &[SweepRow]) -> CliResult<Vec<SweepRow>> {
    cfg.validate()?;
    let per = rows_per_point(cfg)?;
    let points = expand(cfg)?;
    if rows.len() != per * points.len() {
        return Err(CliError::config(format!(
            "expected {} rows for this config, found {}",
            per * points.len(),
            rows.len()
        )));
    }
    let jobs: Vec<(Point, &[SweepRow])> = points.into_iter().zip(rows.chunks(per)).collect();
    let chunks: Vec<CliResult<Vec<SweepRow>>> = jobs.par_iter().map(|(p, r)| point_rows(p, Some(r))).collect();
    let mut out = Vec::with_capacity(rows.len());
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// Per-row `A - B`. Both runs must sweep the same variable over the same
/// points and produce the same number of rows.
pub fn compare(a: &RunConfig, b: &RunConfig) -> CliResult<Vec<CompareRow>> {
    let var = |c: &RunConfig| c.sweep.as_ref().map(|s| s.variable);
    if var(a) != var(b) {
        return Err(CliError::config("configs sweep different variables"));
    }
    let (Table::Sweep(ra), Table::Sweep(rb)) = (run(a)?, run(b)?) else {
        return Err(CliError::config("compare needs solver scenarios, not simulate"));
    };
    if ra.len() != rb.len() {
        return Err(CliError::config(format!(
            "sweeps differ in length: {} rows vs {}",
            ra.len(),
            rb.len()
        )));
    }
    if ra.iter().zip(&rb).any(|(x, y)| x.sweep_value != y.sweep_value) {
        return Err(CliError::config("sweeps visit different points"));
    }
    Ok(ra.iter().zip(&rb).map(|(x, y)| CompareRow::between(x, y)).collect())
}
