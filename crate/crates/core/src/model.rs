//! Domain types and closed-form building blocks of the two-level model.
//!
//! Every worker controls the drift of an output `dX = a dt + σ dW` at
//! quadratic cost `a² / (2k)` and evaluates terminal wealth with CARA utility
//! of risk aversion `R`. Nothing in this module optimises numerically or
//! draws random numbers.

use serde::Serialize;

use crate::error::{Error, Result};

/// Admissibility margins closer to zero than this are treated as boundary.
pub const ADMISSIBILITY_EPS: f64 = 1e-12;

/// Productivity, risk aversion and volatility of one worker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorkerParams {
    k: f64,
    r: f64,
    sigma: f64,
}

impl WorkerParams {
    pub fn new(k: f64, r: f64, sigma: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::param("k", k, "productivity must be finite and > 0"));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::param("R", r, "risk aversion must be finite and > 0"));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::param("sigma", sigma, "volatility must be finite and > 0"));
        }
        Ok(Self { k, r, sigma })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// `k + R σ²`, the denominator of every optimal linear sensitivity.
    pub fn effective_risk(&self) -> f64 {
        self.k + self.r * self.variance()
    }

    /// Same worker with productivity multiplied by `factor`.
    pub fn with_scaled_k(&self, factor: f64) -> Result<Self> {
        Self::new(self.k * factor, self.r, self.sigma)
    }

    /// Quadratic effort cost `a² / (2k)`.
    pub fn cost(&self, effort: f64) -> f64 {
        0.5 * effort * effort / self.k
    }

    /// `sup_a { a z - c(a) } = k z² / 2`.
    pub fn hamiltonian(&self, z: f64) -> f64 {
        0.5 * self.k * z * z
    }

    pub fn best_effort(&self, z: f64) -> f64 {
        self.k * z
    }

    /// Optimal sensitivity when the principal contracts with this worker
    /// directly.
    pub fn dc_rate(&self) -> f64 {
        self.k / self.effective_risk()
    }

    /// Per-unit-time principal value from this worker under direct contracting.
    pub fn dc_value(&self) -> f64 {
        0.5 * self.k * self.k / self.effective_risk()
    }
}

pub fn effective_risk(w: &WorkerParams) -> f64 {
    w.effective_risk()
}

pub fn agent_best_effort(z: f64, w: &WorkerParams) -> f64 {
    w.best_effort(z)
}

/// One manager supervising `n ≥ 0` agents over `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirmSpec {
    manager: WorkerParams,
    agents: Vec<WorkerParams>,
    horizon: f64,
    /// Initial outputs, manager first.
    x0: Vec<f64>,
}

impl FirmSpec {
    pub fn new(manager: WorkerParams, agents: Vec<WorkerParams>, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::param("T", horizon, "horizon must be finite and > 0"));
        }
        let x0 = vec![0.0; agents.len() + 1];
        Ok(Self {
            manager,
            agents,
            horizon,
            x0,
        })
    }

    /// Manager and `n_agents` agents sharing the same parameters.
    pub fn identical(params: WorkerParams, n_agents: usize, horizon: f64) -> Result<Self> {
        Self::new(params, vec![params; n_agents], horizon)
    }

    pub fn with_x0(mut self, x0: Vec<f64>) -> Result<Self> {
        if x0.len() != self.agents.len() + 1 {
            return Err(Error::Domain(format!(
                "expected {} initial outputs, got {}",
                self.agents.len() + 1,
                x0.len()
            )));
        }
        if x0.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("initial outputs must be finite".into()));
        }
        self.x0 = x0;
        Ok(self)
    }

    pub fn with_horizon(mut self, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::param("T", horizon, "horizon must be finite and > 0"));
        }
        self.horizon = horizon;
        Ok(self)
    }

    pub fn manager(&self) -> &WorkerParams {
        &self.manager
    }

    pub fn agents(&self) -> &[WorkerParams] {
        &self.agents
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    /// Manager included.
    pub fn total_workers(&self) -> usize {
        self.agents.len() + 1
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    /// Manager first, then agents in order.
    pub fn workers(&self) -> impl Iterator<Item = &WorkerParams> {
        std::iter::once(&self.manager).chain(self.agents.iter())
    }

    pub(crate) fn replace_productivities(&self, manager_k: f64, agent_factor: f64) -> Result<Self> {
        let manager = WorkerParams::new(manager_k, self.manager.r, self.manager.sigma)?;
        let agents = self
            .agents
            .iter()
            .map(|a| a.with_scaled_k(agent_factor))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            manager,
            agents,
            horizon: self.horizon,
            x0: self.x0.clone(),
        })
    }

    /// True when every agent has the same parameters.
    pub fn has_identical_agents(&self) -> bool {
        self.agents.windows(2).all(|w| w[0] == w[1])
    }
}

/// Payment rates `(z, γ)` on the net benefit and its quadratic variation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateQV {
    pub z: f64,
    pub gamma: f64,
}

impl RateQV {
    pub fn new(z: f64, gamma: f64) -> Self {
        Self { z, gamma }
    }
}

/// Manager contract
/// `ξ_T = ξ₀ - H T + z (ζ_T - ζ₀) + gamma_eff ⟨ζ⟩_T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractQV {
    pub xi0: f64,
    pub z: f64,
    pub gamma_eff: f64,
    pub hamiltonian_rate: f64,
}

impl ContractQV {
    pub fn payment(&self, horizon: f64, zeta_increment: f64, zeta_qv: f64) -> f64 {
        self.xi0 - self.hamiltonian_rate * horizon + self.z * zeta_increment + self.gamma_eff * zeta_qv
    }
}

/// Agent contract
/// `ξ_T = ξ₀ - H T + z (X_T - X₀) + qv_coeff ⟨X⟩_T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgentContract {
    pub xi0: f64,
    pub z: f64,
    pub qv_coeff: f64,
    pub hamiltonian_rate: f64,
}

impl AgentContract {
    /// Certainty-equivalent contract at sensitivity `z` for `agent`.
    pub fn for_rate(z: f64, agent: &WorkerParams) -> Self {
        Self {
            xi0: 0.0,
            z,
            qv_coeff: 0.5 * agent.r() * z * z,
            hamiltonian_rate: agent.hamiltonian(z),
        }
    }

    pub fn payment(&self, horizon: f64, output_increment: f64, output_qv: f64) -> f64 {
        self.xi0 - self.hamiltonian_rate * horizon + self.z * output_increment + self.qv_coeff * output_qv
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DcSolution {
    pub rates: Vec<f64>,
    pub efforts: Vec<f64>,
    pub values: Vec<f64>,
    /// Per unit time, summed over workers.
    pub principal_value: f64,
}

/// Direct-contracting benchmark: every worker is paid `k / R̃` on their own
/// output.
pub fn dc_solution(workers: &[WorkerParams]) -> DcSolution {
    let rates: Vec<f64> = workers.iter().map(WorkerParams::dc_rate).collect();
    let efforts = workers
        .iter()
        .zip(&rates)
        .map(|(w, &z)| w.best_effort(z))
        .collect();
    let values: Vec<f64> = workers.iter().map(WorkerParams::dc_value).collect();
    let principal_value = values.iter().sum();
    DcSolution {
        rates,
        efforts,
        values,
        principal_value,
    }
}

fn admissibility_margin(rate: RateQV, agent: &WorkerParams) -> f64 {
    agent.effective_risk() * rate.z - agent.variance() * rate.gamma
}

fn check_agent(rate: RateQV, agent: &WorkerParams, index: usize) -> Result<f64> {
    if !(rate.z.is_finite() && rate.gamma.is_finite()) {
        return Err(Error::Domain(format!("non-finite rate {rate:?}")));
    }
    let margin = admissibility_margin(rate, agent);
    if margin > ADMISSIBILITY_EPS {
        Ok(margin)
    } else {
        Err(Error::Inadmissible {
            agent: index,
            margin,
        })
    }
}

/// True iff `R̃ⁱ z - σᵢ² γ > 0` for every agent of `firm`.
pub fn is_admissible(rate: RateQV, firm: &FirmSpec) -> bool {
    rate.z.is_finite()
        && rate.gamma.is_finite()
        && firm
            .agents()
            .iter()
            .all(|a| admissibility_margin(rate, a) > ADMISSIBILITY_EPS)
}

fn z_ib_indexed(rate: RateQV, agent: &WorkerParams, index: usize) -> Result<f64> {
    let denom = check_agent(rate, agent, index)?;
    Ok((agent.k() * rate.z - agent.variance() * rate.gamma) / denom)
}

/// Sensitivity the manager offers an agent when his own contract pays
/// `(z, γ)`.
pub fn z_ib(rate: RateQV, agent: &WorkerParams) -> Result<f64> {
    z_ib_indexed(rate, agent, 0)
}

pub(crate) fn h_ib_indexed(rate: RateQV, agent: &WorkerParams, r0: f64, index: usize) -> Result<f64> {
    let zs = z_ib_indexed(rate, agent, index)?;
    Ok(h_from_rate(zs, rate.z, agent, r0))
}

#[inline]
pub(crate) fn h_from_rate(zs: f64, z: f64, agent: &WorkerParams, r0: f64) -> f64 {
    let gap = 1.0 - zs;
    agent.k() * zs - 0.5 * agent.effective_risk() * zs * zs - 0.5 * r0 * agent.variance() * z * z * gap * gap
}

/// Principal's per-unit-time net contribution of one agent:
/// `k z* - R̃ z*²/2 - R⁰ σ² z² (1 - z*)²/2` with `z* = z_ib(rate)`.
pub fn h_ib(rate: RateQV, agent: &WorkerParams, r0: f64) -> Result<f64> {
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(Error::param("R0", r0, "manager risk aversion must be > 0"));
    }
    h_ib_indexed(rate, agent, r0, 0)
}

/// Closed-form manager Hamiltonian `H^b(z, γ)`.
pub fn manager_hamiltonian(rate: RateQV, firm: &FirmSpec) -> Result<f64> {
    let m = firm.manager();
    let mut total = 0.5 * rate.gamma * m.variance() + m.hamiltonian(rate.z);
    for (i, agent) in firm.agents().iter().enumerate() {
        let zi = z_ib_indexed(rate, agent, i)?;
        total += manager_agent_term(rate, agent, zi);
    }
    Ok(total)
}

/// The bracket maximised over `zᵢ` inside the manager Hamiltonian.
pub fn manager_agent_term(rate: RateQV, agent: &WorkerParams, zi: f64) -> f64 {
    let gap = 1.0 - zi;
    rate.z * (agent.k() * zi - 0.5 * agent.effective_risk() * zi * zi)
        + 0.5 * rate.gamma * agent.variance() * gap * gap
}
