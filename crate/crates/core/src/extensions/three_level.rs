//! Principal, top manager, team managers and their agents.
//!
//! The top manager is paid `(z, γ)` on the organisation's net benefit and
//! its quadratic variation. For each team he picks the team manager's rates
//! `(zʲ, γʲ)`; given those, the team manager behaves as in the two-level
//! chain. The top manager's choice of `γʲ` is eliminated through its
//! first-order condition, leaving a one-dimensional search per team.

use std::cell::RefCell;
use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{is_admissible, z_ib, FirmSpec, RateQV, WorkerParams};
use crate::optimizer::{latin_hypercube, maximize_1d, maximize_nd, OptProblem, OptReport};
use crate::two_level::{objective_at, solve_two_level, Regime, Z_MAX, Z_MAX_WIDE, Z_MIN};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Team {
    pub manager: WorkerParams,
    pub agents: Vec<WorkerParams>,
}

impl Team {
    pub fn new(manager: WorkerParams, agents: Vec<WorkerParams>) -> Self {
        Self { manager, agents }
    }

    fn as_firm(&self, horizon: f64) -> Result<FirmSpec> {
        FirmSpec::new(self.manager, self.agents.clone(), horizon)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrgSpec {
    top_manager: WorkerParams,
    teams: Vec<Team>,
    horizon: f64,
}

impl OrgSpec {
    pub fn new(top_manager: WorkerParams, teams: Vec<Team>, horizon: f64) -> Result<Self> {
        if teams.is_empty() {
            return Err(Error::Domain("an organisation needs at least one team".into()));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::param("T", horizon, "horizon must be finite and > 0"));
        }
        Ok(Self {
            top_manager,
            teams,
            horizon,
        })
    }

    /// `teams` identical teams of `agents_per_team` agents, everyone sharing
    /// `params`.
    pub fn identical(params: WorkerParams, teams: usize, agents_per_team: usize, horizon: f64) -> Result<Self> {
        let team = Team::new(params, vec![params; agents_per_team]);
        Self::new(params, vec![team; teams], horizon)
    }

    pub fn top_manager(&self) -> &WorkerParams {
        &self.top_manager
    }

    pub fn teams(&self) -> &[Team] {
        &self.teams
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn total_workers(&self) -> usize {
        1 + self.teams.iter().map(|t| 1 + t.agents.len()).sum::<usize>()
    }

    /// Everyone below the top manager placed directly under him.
    pub fn flattened(&self) -> Result<FirmSpec> {
        let agents = self
            .teams
            .iter()
            .flat_map(|t| std::iter::once(t.manager).chain(t.agents.iter().copied()))
            .collect();
        FirmSpec::new(self.top_manager, agents, self.horizon)
    }
}

/// Optimal rates for one team given the top manager's `(z, γ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerSolution {
    pub z_j: f64,
    pub gamma_j: f64,
    pub agent_rates: Vec<f64>,
    /// Team contribution `kʲzʲ - R̃ʲ(zʲ)²/2 + Σ h_ib((zʲ, γʲ))`.
    pub h0j: f64,
    /// `σⱼ² + Σ σⱼᵢ² (1 - zⱼᵢ)²`: QV rate of the team's net benefit per unit
    /// of `zʲ`-exposure.
    pub vol_factor: f64,
    /// Value of the maximised term of the top manager's Hamiltonian.
    pub value: f64,
}

fn gamma_j_foc(z: f64, gamma: f64, zj: f64, team_manager: &WorkerParams) -> f64 {
    let gap = 1.0 - zj;
    -team_manager.r() * zj * zj * zj + gamma / z * zj * gap * gap
}

/// Evaluate the team term of the top manager's Hamiltonian at `(zʲ, γʲ)`.
fn inner_term(z: f64, gamma: f64, team: &FirmSpec, rate_j: RateQV) -> Result<InnerSolution> {
    let h0j = objective_at(rate_j, team)?;
    let mut vol = team.manager().variance();
    let mut agent_rates = Vec::with_capacity(team.n_agents());
    for a in team.agents() {
        let zi = z_ib(rate_j, a)?;
        vol += a.variance() * (1.0 - zi) * (1.0 - zi);
        agent_rates.push(zi);
    }
    let gap = 1.0 - rate_j.z;
    Ok(InnerSolution {
        z_j: rate_j.z,
        gamma_j: rate_j.gamma,
        agent_rates,
        h0j,
        vol_factor: vol,
        value: z * h0j + 0.5 * gamma * gap * gap * vol,
    })
}

fn check_outer(z: f64, gamma: f64) -> Result<()> {
    if !(z.is_finite() && z > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("top-manager rates must have z > 0, got ({z}, {gamma})")));
    }
    Ok(())
}

/// Top manager's optimal choice for one team.
pub fn three_level_inner(z: f64, gamma: f64, team: &Team) -> Result<InnerSolution> {
    check_outer(z, gamma)?;
    let firm = team.as_firm(1.0)?;
    let m = team.manager;
    if team.agents.is_empty() {
        let denom = z * m.effective_risk() - gamma * m.variance();
        if denom > 0.0 {
            let zj = (z * m.k() - gamma * m.variance()) / denom;
            if zj > 0.0 {
                return inner_term(z, gamma, &firm, RateQV::new(zj, gamma_j_foc(z, gamma, zj, &m)));
            }
        }
    }
    let rate_at = |zj: f64| RateQV::new(zj, gamma_j_foc(z, gamma, zj, &m));
    let problem = OptProblem::scalar(Z_MIN, Z_MAX_WIDE, |zj| {
        inner_term(z, gamma, &firm, rate_at(zj)).map_or(f64::NAN, |s| s.value)
    })?
    .with_feasible(|x| is_admissible(rate_at(x[0]), &firm));
    let report = maximize_1d(&problem)?;
    inner_term(z, gamma, &firm, rate_at(report.argmax[0]))
}

/// Two-dimensional search over `(zʲ, γʲ)` without the first-order
/// substitution; a cross-check for [`three_level_inner`].
pub fn three_level_inner_2d(z: f64, gamma: f64, team: &Team) -> Result<(InnerSolution, OptReport)> {
    check_outer(z, gamma)?;
    let firm = team.as_firm(1.0)?;
    let m = team.manager;
    let g_span = 4.0 * (m.r() * Z_MAX_WIDE.powi(3) + gamma.abs() / z * Z_MAX_WIDE.powi(3));
    let problem = OptProblem::new(vec![Z_MIN, -g_span], vec![Z_MAX_WIDE, g_span], |x| {
        inner_term(z, gamma, &firm, RateQV::new(x[0], x[1])).map_or(f64::NAN, |s| s.value)
    })?
    .with_feasible(|x| is_admissible(RateQV::new(x[0], x[1]), &firm));
    let mut starts = latin_hypercube(problem.lower(), problem.upper(), 8);
    starts.insert(0, vec![0.5, gamma_j_foc(z, gamma, 0.5, &m)]);
    let report = maximize_nd(&problem, &starts)?;
    let sol = inner_term(z, gamma, &firm, RateQV::new(report.argmax[0], report.argmax[1]))?;
    Ok((sol, report))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreeLevelResult {
    pub z: f64,
    pub gamma: f64,
    pub top_manager_effort: f64,
    pub teams: Vec<InnerSolution>,
    /// Per unit time.
    pub principal_value: f64,
    pub horizon: f64,
    pub total_workers: usize,
    pub diagnostics: OptReport,
}

impl ThreeLevelResult {
    pub fn horizon_value(&self) -> f64 {
        self.principal_value * self.horizon
    }

    pub fn value_per_worker(&self) -> f64 {
        self.principal_value / self.total_workers as f64
    }
}

type MemoKey = (u64, u64);

/// One three-level solve; caches inner solutions keyed on `(z, γ)`
/// rounded to 12 significant digits.
pub struct ThreeLevelSolver<'o> {
    org: &'o OrgSpec,
    memo: RefCell<HashMap<MemoKey, Option<Vec<InnerSolution>>>>,
}

fn round_sig(x: f64) -> u64 {
    // 12 significant digits, via the decimal exponent representation
    format!("{x:.11e}").parse::<f64>().unwrap_or(x).to_bits()
}

impl<'o> ThreeLevelSolver<'o> {
    pub fn new(org: &'o OrgSpec) -> Self {
        Self {
            org,
            memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn cache_len(&self) -> usize {
        self.memo.borrow().len()
    }

    fn inner_all(&self, z: f64, gamma: f64) -> Option<Vec<InnerSolution>> {
        let key = (round_sig(z), round_sig(gamma));
        if let Some(hit) = self.memo.borrow().get(&key) {
            return hit.clone();
        }
        let sols: Option<Vec<_>> = self
            .org
            .teams
            .iter()
            .map(|t| three_level_inner(z, gamma, t).ok())
            .collect();
        self.memo.borrow_mut().insert(key, sols.clone());
        sols
    }

    /// Principal's value rate at top-manager rates `(z, γ)`; `None` when some
    /// team's inner problem has no admissible candidate.
    pub fn objective(&self, z: f64, gamma: f64) -> Option<f64> {
        if !(z.is_finite() && z > 0.0 && gamma.is_finite()) {
            return None;
        }
        let teams = self.inner_all(z, gamma)?;
        Some(self.value_from(z, &teams))
    }

    fn value_from(&self, z: f64, teams: &[InnerSolution]) -> f64 {
        let top = &self.org.top_manager;
        let mut v = top.k() * z - 0.5 * top.effective_risk() * z * z;
        for s in teams {
            let gap = 1.0 - s.z_j;
            v += s.h0j - 0.5 * top.r() * z * z * gap * gap * s.vol_factor;
        }
        v
    }

    pub fn solve(&self) -> Result<ThreeLevelResult> {
        let org = self.org;
        let r0 = org.top_manager.r();
        let g_span = 4.0 * r0 * Z_MAX.powi(3);
        let problem = OptProblem::new(vec![Z_MIN, -g_span], vec![Z_MAX, g_span], |x| {
            self.objective(x[0], x[1]).unwrap_or(f64::NAN)
        })?;
        let mut starts = Vec::new();
        // the flattened two-level optimum is a good first guess
        if let Ok(flat) = solve_two_level(&org.flattened()?, Regime::Sophisticated) {
            let z = flat.z_b.min(Z_MAX);
            starts.push(vec![z, -r0 * z * z * z]);
        }
        starts.extend(latin_hypercube(problem.lower(), problem.upper(), 8));
        let report = maximize_nd(&problem, &starts)?;
        let (z, gamma) = (report.argmax[0], report.argmax[1]);
        let teams = self
            .inner_all(z, gamma)
            .ok_or_else(|| Error::Infeasible("inner problem failed at the reported optimum".into()))?;
        Ok(ThreeLevelResult {
            z,
            gamma,
            top_manager_effort: org.top_manager.best_effort(z),
            principal_value: self.value_from(z, &teams),
            teams,
            horizon: org.horizon,
            total_workers: org.total_workers(),
            diagnostics: report,
        })
    }
}

/// Maximise the principal's value over the top manager's `(z, γ)`.
pub fn solve_three_level(org: &OrgSpec) -> Result<ThreeLevelResult> {
    ThreeLevelSolver::new(org).solve()
}
