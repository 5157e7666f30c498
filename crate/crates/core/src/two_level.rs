//! Principal, manager and agents: the two-level Stackelberg chain.
//!
//! Given the manager's rates `(z, γ)`, the manager's choice of agent
//! sensitivities is closed-form (see [`crate::model::z_ib`]), so the principal
//! only searches over `z`. In the sophisticated regime γ follows its
//! first-order condition `γ = -R⁰ z³`; in the linear regime the principal
//! neutralises the manager's quadratic-variation exposure with `γ = -R⁰ z²`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    dc_solution, h_ib_indexed, is_admissible, manager_hamiltonian, z_ib, AgentContract, ContractQV,
    FirmSpec, RateQV,
};
use crate::optimizer::{latin_hypercube, maximize_1d, maximize_nd, OptProblem, OptReport};

/// Lower end of every search box for the manager sensitivity.
pub const Z_MIN: f64 = 1e-8;
pub const Z_MAX: f64 = 1.5;
/// Upper end used after the first search stops on `Z_MAX`.
pub const Z_MAX_WIDE: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Sophisticated,
    Linear,
    Direct,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::Sophisticated, Regime::Linear, Regime::Direct];

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Sophisticated => "sophisticated",
            Regime::Linear => "linear",
            Regime::Direct => "direct",
        }
    }

    /// γ rule used by the principal; `None` for direct contracting.
    pub fn gamma_rule(&self) -> Option<GammaRule> {
        match self {
            Regime::Sophisticated => Some(GammaRule::Cubic),
            Regime::Linear => Some(GammaRule::Square),
            Regime::Direct => None,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sophisticated" | "soph" | "b" => Ok(Regime::Sophisticated),
            "linear" | "lin" => Ok(Regime::Linear),
            "direct" | "dc" => Ok(Regime::Direct),
            other => Err(Error::Domain(format!("unknown regime `{other}`"))),
        }
    }
}

/// How the manager's QV rate γ is tied to `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GammaRule {
    /// `γ = -R⁰ z³`
    Cubic,
    /// `γ = -R⁰ z²`
    Square,
    Explicit(f64),
}

impl GammaRule {
    pub fn gamma(&self, z: f64, r0: f64) -> f64 {
        match *self {
            GammaRule::Cubic => -r0 * z * z * z,
            GammaRule::Square => -r0 * z * z,
            GammaRule::Explicit(g) => g,
        }
    }
}

/// Principal's per-unit-time value at arbitrary manager rates `(z, γ)`.
pub fn objective_at(rate: RateQV, firm: &FirmSpec) -> Result<f64> {
    let m = firm.manager();
    let mut total = m.k() * rate.z - 0.5 * m.effective_risk() * rate.z * rate.z;
    for (i, agent) in firm.agents().iter().enumerate() {
        total += h_ib_indexed(rate, agent, m.r(), i)?;
    }
    Ok(total)
}

/// `k⁰ z - R̃⁰ z²/2 + Σ h_ib((z, γ))` with γ given by `rule`.
pub fn principal_objective(z: f64, firm: &FirmSpec, rule: GammaRule) -> Result<f64> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::Domain(format!("manager sensitivity must be > 0, got {z}")));
    }
    let gamma = rule.gamma(z, firm.manager().r());
    objective_at(RateQV::new(z, gamma), firm)
}

/// Principal's value rate recomputed from the drift of the net benefit
/// `ζ` minus the drift of the manager's compensation, both under optimal
/// efforts. Used as an independent check on [`objective_at`].
pub fn value_from_dynamics(rate: RateQV, firm: &FirmSpec) -> Result<f64> {
    let m = firm.manager();
    let r0 = m.r();
    let mut benefit_drift = m.k() * rate.z;
    let mut qv_rate = m.variance();
    for (i, agent) in firm.agents().iter().enumerate() {
        let zi = z_ib(rate, agent).map_err(|e| reindex(e, i))?;
        // agent output drift k zᵢ minus the agent's expected pay k zᵢ²/2 + R zᵢ² σ²/2
        benefit_drift += agent.k() * zi - 0.5 * agent.effective_risk() * zi * zi;
        qv_rate += agent.variance() * (1.0 - zi) * (1.0 - zi);
    }
    // manager pay drift: certainty-equivalent k⁰z²/2 plus risk premium R⁰ z² d⟨ζ⟩/2
    let manager_pay = 0.5 * rate.z * rate.z * (m.k() + r0 * qv_rate);
    Ok(benefit_drift - manager_pay)
}

fn reindex(e: Error, agent: usize) -> Error {
    match e {
        Error::Inadmissible { margin, .. } => Error::Inadmissible { agent, margin },
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub regime: Regime,
    pub z_b: f64,
    pub gamma_b: f64,
    pub agent_rates: Vec<f64>,
    pub manager_effort: f64,
    pub agent_efforts: Vec<f64>,
    /// Per unit time.
    pub principal_value: f64,
    pub horizon: f64,
    pub manager_contract: Option<ContractQV>,
    pub agent_contracts: Vec<AgentContract>,
    pub diagnostics: Option<OptReport>,
}

impl SolveResult {
    pub fn horizon_value(&self) -> f64 {
        self.principal_value * self.horizon
    }

    /// Per-unit-time value divided by the number of workers, manager included.
    pub fn value_per_worker(&self) -> f64 {
        self.principal_value / (self.agent_rates.len() + 1) as f64
    }

    pub fn mean_agent_rate(&self) -> Option<f64> {
        if self.agent_rates.is_empty() {
            None
        } else {
            Some(self.agent_rates.iter().sum::<f64>() / self.agent_rates.len() as f64)
        }
    }

    pub fn rate(&self) -> RateQV {
        RateQV::new(self.z_b, self.gamma_b)
    }
}

fn one_dim_search(firm: &FirmSpec, rule: GammaRule, upper: f64) -> Result<OptReport> {
    let problem = OptProblem::scalar(Z_MIN, upper, |z| {
        principal_objective(z, firm, rule).unwrap_or(f64::NAN)
    })?;
    maximize_1d(&problem)
}

/// Maximise the principal's objective over `z` under `rule`.
pub fn optimize_rate(firm: &FirmSpec, rule: GammaRule) -> Result<OptReport> {
    let report = one_dim_search(firm, rule, Z_MAX)?;
    if report.argmax[0] >= Z_MAX - 1e-6 {
        return one_dim_search(firm, rule, Z_MAX_WIDE);
    }
    Ok(report)
}

pub fn solve_two_level(firm: &FirmSpec, regime: Regime) -> Result<SolveResult> {
    let Some(rule) = regime.gamma_rule() else {
        return Ok(solve_direct(firm));
    };
    let report = optimize_rate(firm, rule)?;
    let z = report.argmax[0];
    let rate = RateQV::new(z, rule.gamma(z, firm.manager().r()));
    assemble(firm, regime, rate, Some(report))
}

/// Build a [`SolveResult`] for given manager rates, without optimising.
pub fn evaluate_rate(firm: &FirmSpec, regime: Regime, rate: RateQV) -> Result<SolveResult> {
    assemble(firm, regime, rate, None)
}

fn assemble(firm: &FirmSpec, regime: Regime, rate: RateQV, diagnostics: Option<OptReport>) -> Result<SolveResult> {
    let agent_rates = firm
        .agents()
        .iter()
        .enumerate()
        .map(|(i, a)| z_ib(rate, a).map_err(|e| reindex(e, i)))
        .collect::<Result<Vec<_>>>()?;
    let agent_efforts = firm
        .agents()
        .iter()
        .zip(&agent_rates)
        .map(|(a, &zi)| a.best_effort(zi))
        .collect();
    let mut res = SolveResult {
        regime,
        z_b: rate.z,
        gamma_b: rate.gamma,
        manager_effort: firm.manager().best_effort(rate.z),
        agent_efforts,
        principal_value: objective_at(rate, firm)?,
        horizon: firm.horizon(),
        manager_contract: None,
        agent_contracts: Vec::new(),
        diagnostics,
        agent_rates,
    };
    let (manager, agents) = build_contracts(&res, firm)?;
    res.manager_contract = Some(manager);
    res.agent_contracts = agents;
    Ok(res)
}

fn solve_direct(firm: &FirmSpec) -> SolveResult {
    let workers: Vec<_> = firm.workers().copied().collect();
    let dc = dc_solution(&workers);
    let agent_contracts = firm
        .agents()
        .iter()
        .zip(&dc.rates[1..])
        .map(|(a, &z)| AgentContract::for_rate(z, a))
        .collect();
    SolveResult {
        regime: Regime::Direct,
        z_b: dc.rates[0],
        gamma_b: 0.0,
        agent_rates: dc.rates[1..].to_vec(),
        manager_effort: dc.efforts[0],
        agent_efforts: dc.efforts[1..].to_vec(),
        principal_value: dc.principal_value,
        horizon: firm.horizon(),
        manager_contract: None,
        agent_contracts,
        diagnostics: None,
    }
}

/// Manager contract with zero fixed part and agent contracts at the rates
/// the manager chooses.
pub fn build_contracts(res: &SolveResult, firm: &FirmSpec) -> Result<(ContractQV, Vec<AgentContract>)> {
    if res.regime == Regime::Direct {
        return Err(Error::Domain("direct contracting has no manager QV contract".into()));
    }
    if res.agent_rates.len() != firm.n_agents() {
        return Err(Error::Domain("result does not belong to this firm".into()));
    }
    let rate = res.rate();
    let r0 = firm.manager().r();
    let manager = ContractQV {
        xi0: 0.0,
        z: rate.z,
        gamma_eff: 0.5 * (rate.gamma + r0 * rate.z * rate.z),
        hamiltonian_rate: manager_hamiltonian(rate, firm)?,
    };
    let agents = firm
        .agents()
        .iter()
        .zip(&res.agent_rates)
        .map(|(a, &zi)| AgentContract::for_rate(zi, a))
        .collect();
    Ok((manager, agents))
}

/// Free two-dimensional search over `(z, γ)`, used to cross-check the
/// analytic γ substitution.
pub fn solve_two_level_2d(firm: &FirmSpec) -> Result<(RateQV, OptReport)> {
    let r0 = firm.manager().r();
    let g_span = 4.0 * r0 * Z_MAX.powi(3);
    let problem = OptProblem::new(vec![Z_MIN, -g_span], vec![Z_MAX, g_span], |x| {
        objective_at(RateQV::new(x[0], x[1]), firm).unwrap_or(f64::NAN)
    })?
    .with_feasible(|x| is_admissible(RateQV::new(x[0], x[1]), firm));
    let mut starts = Vec::new();
    // the analytic optimum is a natural seed; the design covers the rest
    if let Ok(r) = optimize_rate(firm, GammaRule::Cubic) {
        let z = r.argmax[0].min(Z_MAX);
        starts.push(vec![z, GammaRule::Cubic.gamma(z, r0)]);
    }
    starts.extend(latin_hypercube(problem.lower(), problem.upper(), 8));
    let report = maximize_nd(&problem, &starts)?;
    Ok((RateQV::new(report.argmax[0], report.argmax[1]), report))
}
