use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::FirmSpec;

/// Manager skill: `m` is shared out as extra productivity among the agents,
/// `m_tilde` is the fraction of his own productivity he gives up to help.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbilityParams {
    m: f64,
    m_tilde: f64,
}

impl AbilityParams {
    pub fn new(m: f64, m_tilde: f64) -> Result<Self> {
        if !(m.is_finite() && m >= 0.0) {
            return Err(Error::param("m", m, "help coefficient must be >= 0"));
        }
        if !(m_tilde.is_finite() && (0.0..1.0).contains(&m_tilde)) {
            return Err(Error::param("m_tilde", m_tilde, "self-penalty must lie in [0, 1)"));
        }
        Ok(Self { m, m_tilde })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn m_tilde(&self) -> f64 {
        self.m_tilde
    }
}

/// Agents' productivities scaled by `1 + m/n`, the manager's by `1 - m̃`.
pub fn apply_ability(firm: &FirmSpec, ab: AbilityParams) -> Result<FirmSpec> {
    let n = firm.n_agents();
    if n == 0 {
        return Err(Error::Domain("ability needs at least one agent (m/n undefined)".into()));
    }
    firm.replace_productivities(firm.manager().k() * (1.0 - ab.m_tilde), 1.0 + ab.m / n as f64)
}
