//! Profit-and-cost reporting and the separate-reporting limits.
//!
//! Under profit-and-cost reporting the manager is paid on two aggregates,
//! the total profit and the total cost of his team. Sign conventions follow
//! the agent-rate formula
//! `z* = -(k z¹ + σ² γ¹²) / (R̃ z² + σ² γ²²)`: the manager's per-agent
//! problem is a concave quadratic exactly when the denominator is negative,
//! which is the admissibility condition used here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{h_ib_indexed, FirmSpec, RateQV, WorkerParams, ADMISSIBILITY_EPS};
use crate::optimizer::{latin_hypercube, maximize_nd, OptProblem, OptReport};
use crate::two_level::{solve_two_level, Regime, Z_MAX_WIDE};

/// Manager rates under profit-and-cost reporting. `gamma11` never affects
/// the principal's value and is kept only for completeness of the contract.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePC {
    pub z1: f64,
    pub z2: f64,
    pub gamma11: f64,
    pub gamma12: f64,
    pub gamma22: f64,
}

impl RatePC {
    pub fn new(z1: f64, z2: f64, gamma12: f64, gamma22: f64) -> Self {
        Self {
            z1,
            z2,
            gamma11: 0.0,
            gamma12,
            gamma22,
        }
    }

    fn is_finite(&self) -> bool {
        [self.z1, self.z2, self.gamma11, self.gamma12, self.gamma22]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// Profit-and-cost rates that reproduce net-benefit rates `(z, γ)`.
pub fn b_embedding(rate: RateQV) -> RatePC {
    RatePC::new(rate.z, -rate.z, -rate.gamma, rate.gamma)
}

fn pc_denominator(rate: &RatePC, agent: &WorkerParams) -> f64 {
    agent.effective_risk() * rate.z2 + agent.variance() * rate.gamma22
}

fn check_pc(rate: &RatePC, agent: &WorkerParams, index: usize) -> Result<f64> {
    if !rate.is_finite() {
        return Err(Error::Domain(format!("non-finite rate {rate:?}")));
    }
    let d = pc_denominator(rate, agent);
    if d < -ADMISSIBILITY_EPS {
        Ok(d)
    } else {
        Err(Error::Inadmissible {
            agent: index,
            margin: -d,
        })
    }
}

pub fn is_pc_admissible(rate: &RatePC, firm: &FirmSpec) -> bool {
    rate.is_finite()
        && firm
            .agents()
            .iter()
            .all(|a| pc_denominator(rate, a) < -ADMISSIBILITY_EPS)
}

fn z_ipc_indexed(rate: &RatePC, agent: &WorkerParams, index: usize) -> Result<f64> {
    let d = check_pc(rate, agent, index)?;
    Ok(-(agent.k() * rate.z1 + agent.variance() * rate.gamma12) / d)
}

pub fn z_ipc(rate: &RatePC, agent: &WorkerParams) -> Result<f64> {
    z_ipc_indexed(rate, agent, 0)
}

fn h_pc_from_rate(zs: f64, rate: &RatePC, agent: &WorkerParams, r0: f64) -> f64 {
    let exposure = rate.z1 + rate.z2 * zs;
    agent.k() * zs - 0.5 * agent.effective_risk() * zs * zs - 0.5 * r0 * agent.variance() * exposure * exposure
}

/// `k z* - R̃ z*²/2 - R⁰ σ² (z¹ + z² z*)²/2`.
pub fn h_ipc(rate: &RatePC, agent: &WorkerParams, r0: f64) -> Result<f64> {
    let zs = z_ipc(rate, agent)?;
    Ok(h_pc_from_rate(zs, rate, agent, r0))
}

pub fn pc_objective(rate: &RatePC, firm: &FirmSpec) -> Result<f64> {
    let m = firm.manager();
    let mut total = m.k() * rate.z1 - 0.5 * m.effective_risk() * rate.z1 * rate.z1;
    for (i, agent) in firm.agents().iter().enumerate() {
        let zs = z_ipc_indexed(rate, agent, i)?;
        total += h_pc_from_rate(zs, rate, agent, m.r());
    }
    Ok(total)
}

fn common_agent(firm: &FirmSpec) -> Result<WorkerParams> {
    if !firm.has_identical_agents() {
        return Err(Error::Domain("construction requires identical agents".into()));
    }
    firm.agents()
        .first()
        .copied()
        .ok_or_else(|| Error::Domain("construction requires at least one agent".into()))
}

/// The explicit profit-and-cost contract that gives every worker the
/// direct-contracting effort, for a chosen `γ²²`.
pub fn pc_construction_identical(firm: &FirmSpec, gamma22: f64) -> Result<RatePC> {
    let a = common_agent(firm)?;
    let m = firm.manager();
    let z1 = m.k() / m.effective_risk();
    let z2 = -z1 * a.effective_risk() / a.k();
    let gamma12 = z1 * a.r() - a.k() / a.effective_risk() * gamma22;
    let rate = RatePC::new(z1, z2, gamma12, gamma22);
    check_pc(&rate, &a, 0)?;
    Ok(rate)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcResult {
    pub rate: RatePC,
    pub agent_rates: Vec<f64>,
    pub manager_effort: f64,
    pub agent_efforts: Vec<f64>,
    /// Per unit time.
    pub principal_value: f64,
    pub horizon: f64,
    pub diagnostics: OptReport,
}

impl PcResult {
    pub fn horizon_value(&self) -> f64 {
        self.principal_value * self.horizon
    }

    pub fn value_per_worker(&self) -> f64 {
        self.principal_value / (self.agent_rates.len() + 1) as f64
    }
}

/// Maximise over `(z¹, z², γ¹², γ²²)`.
pub fn solve_pc(firm: &FirmSpec) -> Result<PcResult> {
    let g_span = firm
        .agents()
        .iter()
        .map(|a| a.effective_risk() / a.variance())
        .fold(firm.manager().r(), f64::max)
        * 4.0
        * Z_MAX_WIDE;
    let lower = vec![-Z_MAX_WIDE, -Z_MAX_WIDE, -g_span, -g_span];
    let upper = vec![Z_MAX_WIDE, Z_MAX_WIDE, g_span, g_span];
    let to_rate = |x: &[f64]| RatePC::new(x[0], x[1], x[2], x[3]);
    let problem = OptProblem::new(lower, upper, |x| pc_objective(&to_rate(x), firm).unwrap_or(f64::NAN))?
        .with_feasible(|x| is_pc_admissible(&to_rate(x), firm));

    let mut starts = Vec::new();
    for regime in [Regime::Sophisticated, Regime::Linear] {
        if let Ok(b) = solve_two_level(firm, regime) {
            let e = b_embedding(b.rate());
            starts.push(vec![e.z1, e.z2, e.gamma12, e.gamma22]);
        }
    }
    starts.extend(latin_hypercube(problem.lower(), problem.upper(), 8));
    let report = maximize_nd(&problem, &starts)?;

    let rate = to_rate(&report.argmax);
    let agent_rates = firm
        .agents()
        .iter()
        .enumerate()
        .map(|(i, a)| z_ipc_indexed(&rate, a, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(PcResult {
        agent_efforts: firm
            .agents()
            .iter()
            .zip(&agent_rates)
            .map(|(a, &z)| a.best_effort(z))
            .collect(),
        manager_effort: firm.manager().best_effort(rate.z1),
        principal_value: report.value,
        horizon: firm.horizon(),
        rate,
        agent_rates,
        diagnostics: report,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeparateVariant {
    /// Net benefit of the agents reported apart from the manager's output.
    B0,
    /// Profit and cost of the agents reported apart from the manager's output.
    Pc0,
}

/// Principal's value rate along a sequence of agent-block sensitivities
/// `z¹`, with the manager's own output paid at its direct-contracting rate.
///
/// For `B0` the value is `½(k⁰)²/R̃⁰ + Σ h_ib((z¹, 0))`, which increases to
/// the direct-contracting value as `z¹ ↓ 0` without reaching it. For `Pc0`
/// (identical agents only) `z¹` is the sensitivity to the agents' profit and
/// the remaining rates are chosen so the value is exactly the
/// direct-contracting value.
pub fn separate_reporting_values(firm: &FirmSpec, variant: SeparateVariant, z1_seq: &[f64]) -> Result<Vec<f64>> {
    if let Some(&bad) = z1_seq.iter().find(|z| !(z.is_finite() && **z > 0.0)) {
        return Err(Error::param("z1", bad, "sensitivities must be finite and > 0"));
    }
    let m = firm.manager();
    let manager_term = 0.5 * m.k() * m.k() / m.effective_risk();
    match variant {
        SeparateVariant::B0 => z1_seq
            .iter()
            .map(|&z1| {
                let rate = RateQV::new(z1, 0.0);
                let mut v = manager_term;
                for (i, a) in firm.agents().iter().enumerate() {
                    v += h_ib_indexed(rate, a, m.r(), i)?;
                }
                Ok(v)
            })
            .collect(),
        SeparateVariant::Pc0 => {
            if firm.n_agents() == 0 {
                return Ok(vec![manager_term; z1_seq.len()]);
            }
            let a = common_agent(firm)?;
            z1_seq
                .iter()
                .map(|&z1| {
                    let z2 = -z1 * a.effective_risk() / a.k();
                    let rate = RatePC::new(z1, z2, z1 * a.r(), 0.0);
                    let h = h_ipc(&rate, &a, m.r())?;
                    Ok(manager_term + firm.n_agents() as f64 * h)
                })
                .collect()
        }
    }
}
