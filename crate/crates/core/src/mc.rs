//! Euler-Maruyama simulation of outputs and contract accruals.
//!
//! Each worker's output follows `dX = a dt + σ dW` with constant effort,
//! so the Euler scheme is exact in law for `X`. Contracts are settled on
//! realised quantities: agents on their own output and its realised
//! quadratic variation, the manager on the net benefit
//! `ζ = X⁰ + Σ (Xⁱ - ξⁱ)` and its realised quadratic variation.
//!
//! Paths are grouped in units (antithetic pairs, or single paths) and each
//! unit draws from its own ChaCha stream, so results depend only on the seed
//! and the unit index, not on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{is_admissible, manager_agent_term, FirmSpec, RateQV};
use crate::two_level::SolveResult;

/// Exponents of the CARA utility are clamped to `±EXP_CLAMP`; paths that hit
/// the upper clamp are flagged and left out of the summaries.
pub const EXP_CLAMP: f64 = 700.0;

/// How realised quadratic variation is estimated from increments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QvEstimator {
    /// `Σ Δ²`
    Raw,
    /// `N/(N-1) Σ (Δ - Δ̄)²`: removes the `O(a² T²/N)` drift contribution.
    Demeaned,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McConfig {
    pub paths: usize,
    pub steps: usize,
    pub seed: u64,
    pub antithetic: bool,
    pub qv: QvEstimator,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            paths: 100_000,
            steps: 2048,
            seed: 0,
            antithetic: true,
            qv: QvEstimator::Demeaned,
        }
    }
}

impl McConfig {
    pub fn new(paths: usize, steps: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            paths,
            steps,
            seed,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(Error::param("paths", 0.0, "need at least one path"));
        }
        if self.steps == 0 {
            return Err(Error::param("steps", 0.0, "need at least one time step"));
        }
        Ok(())
    }
}

/// Constant efforts used on every path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Efforts {
    /// Each worker chooses `k z` against his own sensitivity.
    BestResponse,
    Fixed { manager: f64, agents: Vec<f64> },
}

/// Payment rates driving the simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRates {
    pub manager: RateQV,
    pub agents: Vec<f64>,
}

impl SimRates {
    pub fn new(manager: RateQV, agents: Vec<f64>) -> Self {
        Self { manager, agents }
    }

    pub fn zero(n_agents: usize) -> Self {
        Self::new(RateQV::new(0.0, 0.0), vec![0.0; n_agents])
    }

    pub fn from_solution(res: &SolveResult) -> Self {
        Self::new(res.rate(), res.agent_rates.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
}

impl Estimate {
    /// `|mean - target| <= k * std_err`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_err
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSummary {
    pub agent_utility: Vec<Estimate>,
    pub manager_utility: Estimate,
    pub principal_payoff: Estimate,
    pub zeta_qv: Estimate,
    /// Paths dropped because a utility exponent hit the clamp.
    pub flagged_paths: usize,
    /// Independent units the standard errors are computed from.
    pub units: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathOutcome {
    /// Terminal outputs, manager first.
    pub x_terminal: Vec<f64>,
    pub zeta_increment: f64,
    pub zeta_qv: f64,
    pub xi_agents: Vec<f64>,
    pub xi_manager: f64,
    pub utility_agents: Vec<f64>,
    pub utility_manager: f64,
    /// `ζ_T - ζ₀ - ξ^b_T`.
    pub principal_payoff: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathBundle {
    pub paths: Vec<PathOutcome>,
    pub summary: McSummary,
}

pub fn realized_qv(increments: &[f64]) -> f64 {
    increments.iter().map(|d| d * d).sum()
}

pub fn realized_qv_demeaned(increments: &[f64]) -> f64 {
    let n = increments.len();
    if n < 2 {
        return 0.0;
    }
    let mean = increments.iter().sum::<f64>() / n as f64;
    let ss: f64 = increments.iter().map(|d| (d - mean) * (d - mean)).sum();
    ss * n as f64 / (n - 1) as f64
}

/// Running sums of one increment series.
#[derive(Clone, Copy, Default)]
struct Moments {
    n: usize,
    sum: f64,
    sum_sq: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, d: f64) {
        self.n += 1;
        self.sum += d;
        self.sum_sq += d * d;
        let delta = d - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (d - self.mean);
    }

    fn qv(&self, est: QvEstimator) -> f64 {
        match est {
            QvEstimator::Raw => self.sum_sq,
            QvEstimator::Demeaned if self.n >= 2 => self.m2 * self.n as f64 / (self.n - 1) as f64,
            QvEstimator::Demeaned => self.sum_sq,
        }
    }
}

/// Everything a path needs besides its normals.
struct Plan {
    horizon: f64,
    sigmas: Vec<f64>,
    efforts: Vec<f64>,
    costs: Vec<f64>,
    risk: Vec<f64>,
    agent_z: Vec<f64>,
    agent_h: Vec<f64>,
    agent_qv: Vec<f64>,
    manager_z: f64,
    manager_h: f64,
    manager_qv: f64,
    qv: QvEstimator,
}

impl Plan {
    fn new(firm: &FirmSpec, rates: &SimRates, efforts: &Efforts, qv: QvEstimator) -> Result<Self> {
        let n = firm.n_agents();
        if rates.agents.len() != n {
            return Err(Error::Domain(format!("expected {n} agent rates, got {}", rates.agents.len())));
        }
        let mr = rates.manager;
        if !(mr.z.is_finite() && mr.gamma.is_finite()) || rates.agents.iter().any(|z| !z.is_finite()) {
            return Err(Error::Domain("rates must be finite".into()));
        }
        let nonzero = mr.z != 0.0 || mr.gamma != 0.0;
        if nonzero && n > 0 && !is_admissible(mr, firm) {
            return Err(Error::Domain(format!("manager rates {mr:?} are not admissible")));
        }
        let m = firm.manager();
        let efforts: Vec<f64> = match efforts {
            Efforts::BestResponse => std::iter::once(m.best_effort(mr.z))
                .chain(firm.agents().iter().zip(&rates.agents).map(|(a, &z)| a.best_effort(z)))
                .collect(),
            Efforts::Fixed { manager, agents } => {
                if agents.len() != n {
                    return Err(Error::Domain(format!("expected {n} agent efforts, got {}", agents.len())));
                }
                std::iter::once(*manager).chain(agents.iter().copied()).collect()
            }
        };
        if efforts.iter().any(|a| !a.is_finite()) {
            return Err(Error::Domain("efforts must be finite".into()));
        }
        // manager's Hamiltonian at the agent rates actually offered
        let manager_h = 0.5 * mr.gamma * m.variance()
            + m.hamiltonian(mr.z)
            + firm
                .agents()
                .iter()
                .zip(&rates.agents)
                .map(|(a, &zi)| manager_agent_term(mr, a, zi))
                .sum::<f64>();
        Ok(Self {
            horizon: firm.horizon(),
            sigmas: firm.workers().map(|w| w.sigma()).collect(),
            costs: firm.workers().zip(&efforts).map(|(w, &a)| w.cost(a)).collect(),
            risk: firm.workers().map(|w| w.r()).collect(),
            efforts,
            agent_z: rates.agents.clone(),
            agent_h: firm.agents().iter().zip(&rates.agents).map(|(a, &z)| a.hamiltonian(z)).collect(),
            agent_qv: firm.agents().iter().zip(&rates.agents).map(|(a, &z)| 0.5 * a.r() * z * z).collect(),
            manager_z: mr.z,
            manager_h,
            manager_qv: 0.5 * (mr.gamma + m.r() * mr.z * mr.z),
            qv,
        })
    }

    fn workers(&self) -> usize {
        self.sigmas.len()
    }

    /// Run one path over `steps` steps from step-major standard normals.
    fn run(&self, x0: &[f64], normals: &[f64], steps: usize) -> PathOutcome {
        let w = self.workers();
        debug_assert_eq!(normals.len(), steps * w);
        let dt = self.horizon / steps as f64;
        let sq = dt.sqrt();
        let increments: Vec<f64> = normals
            .iter()
            .enumerate()
            .map(|(idx, &eps)| {
                let j = idx % w;
                self.efforts[j] * dt + self.sigmas[j] * sq * eps
            })
            .collect();
        let mut outputs = vec![Moments::default(); w];
        for row in increments.chunks_exact(w) {
            row.iter().zip(outputs.iter_mut()).for_each(|(&dx, o)| o.push(dx));
        }
        // each squared increment enters the agents' accrual the way the QV
        // estimator counts it, so the per-step accruals add up to the
        // terminal payments
        let (centre, scale) = match self.qv {
            QvEstimator::Demeaned if steps >= 2 => (
                outputs.iter().map(|o| o.mean).collect(),
                steps as f64 / (steps - 1) as f64,
            ),
            _ => (vec![0.0; w], 1.0),
        };
        let mut zeta = Moments::default();
        for row in increments.chunks_exact(w) {
            let mut dz = row[0];
            for i in 0..w - 1 {
                let dx = row[i + 1];
                let c = dx - centre[i + 1];
                let dxi = -self.agent_h[i] * dt + self.agent_z[i] * dx + self.agent_qv[i] * scale * c * c;
                dz += dx - dxi;
            }
            zeta.push(dz);
        }

        let t = self.horizon;
        let xi_agents: Vec<f64> = (0..w - 1)
            .map(|i| {
                let o = &outputs[i + 1];
                -self.agent_h[i] * t + self.agent_z[i] * o.sum + self.agent_qv[i] * o.qv(self.qv)
            })
            .collect();
        let zeta_increment =
            outputs[0].sum + outputs[1..].iter().zip(&xi_agents).map(|(o, xi)| o.sum - xi).sum::<f64>();
        let zeta_qv = zeta.qv(self.qv);
        let xi_manager = -self.manager_h * t + self.manager_z * zeta_increment + self.manager_qv * zeta_qv;

        let mut flagged = false;
        let mut utility = |r: f64, wealth: f64| {
            let e = -r * wealth;
            // below -EXP_CLAMP the utility underflows to zero harmlessly
            if e > EXP_CLAMP || !e.is_finite() {
                flagged = true;
            }
            -(e.clamp(-EXP_CLAMP, EXP_CLAMP)).exp()
        };
        let utility_manager = utility(self.risk[0], xi_manager - self.costs[0] * t);
        let utility_agents = (0..w - 1)
            .map(|i| utility(self.risk[i + 1], xi_agents[i] - self.costs[i + 1] * t))
            .collect();
        let principal_payoff = zeta_increment - xi_manager;
        let flagged = flagged || !principal_payoff.is_finite();
        PathOutcome {
            x_terminal: x0.iter().zip(&outputs).map(|(x, o)| x + o.sum).collect(),
            zeta_increment,
            zeta_qv,
            xi_agents,
            xi_manager,
            utility_agents,
            utility_manager,
            principal_payoff,
            flagged,
        }
    }
}

fn unit_rng(seed: u64, unit: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(unit as u64);
    rng
}

fn unit_sizes(cfg: &McConfig) -> Vec<usize> {
    if cfg.antithetic {
        let mut v = vec![2; cfg.paths / 2];
        if cfg.paths % 2 == 1 {
            v.push(1);
        }
        v
    } else {
        vec![1; cfg.paths]
    }
}

/// Normals for one unit: the first path's draws, negated for its partner.
fn unit_normals(cfg: &McConfig, unit: usize, len: usize) -> Vec<f64> {
    let mut rng = unit_rng(cfg.seed, unit);
    (0..len).map(|_| StandardNormal.sample(&mut rng)).collect()
}

fn simulate_units<F>(cfg: &McConfig, per_unit: F) -> Vec<Vec<PathOutcome>>
where
    F: Fn(usize, usize) -> Vec<PathOutcome> + Sync,
{
    let sizes = unit_sizes(cfg);
    sizes
        .par_iter()
        .enumerate()
        .map(|(u, &size)| per_unit(u, size))
        .collect()
}

/// Simulate `cfg.paths` paths of the firm under `rates` and `efforts`.
pub fn simulate(firm: &FirmSpec, rates: &SimRates, efforts: &Efforts, cfg: &McConfig) -> Result<PathBundle> {
    cfg.validate()?;
    let plan = Plan::new(firm, rates, efforts, cfg.qv)?;
    let w = plan.workers();
    let len = cfg.steps * w;
    let units = simulate_units(cfg, |u, size| {
        let mut eps = unit_normals(cfg, u, len);
        let mut out = vec![plan.run(firm.x0(), &eps, cfg.steps)];
        if size == 2 {
            eps.iter_mut().for_each(|e| *e = -*e);
            out.push(plan.run(firm.x0(), &eps, cfg.steps));
        }
        out
    });
    Ok(bundle(units))
}

/// Simulate on `cfg.steps` steps and, from the same Brownian paths, on
/// `cfg.steps / 2` steps. Returns `(fine, coarse)`.
pub fn simulate_coupled(
    firm: &FirmSpec,
    rates: &SimRates,
    efforts: &Efforts,
    cfg: &McConfig,
) -> Result<(PathBundle, PathBundle)> {
    cfg.validate()?;
    if cfg.steps < 2 || cfg.steps % 2 != 0 {
        return Err(Error::param("steps", cfg.steps as f64, "coupled runs need an even step count"));
    }
    let plan = Plan::new(firm, rates, efforts, cfg.qv)?;
    let w = plan.workers();
    let len = cfg.steps * w;
    let half = cfg.steps / 2;
    let coarse_of = |eps: &[f64]| -> Vec<f64> {
        let mut c = Vec::with_capacity(half * w);
        for pair in eps.chunks_exact(2 * w) {
            let (a, b) = pair.split_at(w);
            c.extend(a.iter().zip(b).map(|(x, y)| (x + y) / std::f64::consts::SQRT_2));
        }
        c
    };
    let units = simulate_units(cfg, |u, size| {
        let mut eps = unit_normals(cfg, u, len);
        let mut out = Vec::with_capacity(2 * size);
        for member in 0..size {
            if member == 1 {
                eps.iter_mut().for_each(|e| *e = -*e);
            }
            out.push(plan.run(firm.x0(), &eps, cfg.steps));
            out.push(plan.run(firm.x0(), &coarse_of(&eps), half));
        }
        out
    });
    let (mut fine, mut coarse) = (Vec::with_capacity(units.len()), Vec::with_capacity(units.len()));
    for unit in units {
        let (f, c): (Vec<_>, Vec<_>) = unit.into_iter().enumerate().partition(|(i, _)| i % 2 == 0);
        fine.push(f.into_iter().map(|(_, p)| p).collect());
        coarse.push(c.into_iter().map(|(_, p)| p).collect());
    }
    Ok((bundle(fine), bundle(coarse)))
}

/// Compensated running sum.
#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Mean and standard error from per-unit means.
fn estimate(values: &[f64]) -> Estimate {
    let n = values.len();
    if n == 0 {
        return Estimate {
            mean: f64::NAN,
            std_err: f64::NAN,
        };
    }
    let mut s = Neumaier::default();
    values.iter().for_each(|&v| s.add(v));
    let mean = s.total() / n as f64;
    if n == 1 {
        return Estimate { mean, std_err: 0.0 };
    }
    let mut ss = Neumaier::default();
    values.iter().for_each(|&v| ss.add((v - mean) * (v - mean)));
    let var = ss.total() / (n - 1) as f64;
    Estimate {
        mean,
        std_err: (var / n as f64).sqrt(),
    }
}

fn bundle(units: Vec<Vec<PathOutcome>>) -> PathBundle {
    let n_agents = units
        .first()
        .and_then(|u| u.first())
        .map_or(0, |p| p.utility_agents.len());
    let flagged_paths = units.iter().flatten().filter(|p| p.flagged).count();
    let clean: Vec<&Vec<PathOutcome>> = units.iter().filter(|u| u.iter().all(|p| !p.flagged)).collect();
    let unit_mean = |f: &dyn Fn(&PathOutcome) -> f64| -> Vec<f64> {
        clean
            .iter()
            .map(|u| u.iter().map(f).sum::<f64>() / u.len() as f64)
            .collect()
    };
    let summary = McSummary {
        agent_utility: (0..n_agents)
            .map(|i| estimate(&unit_mean(&|p| p.utility_agents[i])))
            .collect(),
        manager_utility: estimate(&unit_mean(&|p| p.utility_manager)),
        principal_payoff: estimate(&unit_mean(&|p| p.principal_payoff)),
        zeta_qv: estimate(&unit_mean(&|p| p.zeta_qv)),
        flagged_paths,
        units: clean.len(),
    };
    PathBundle {
        paths: units.into_iter().flatten().collect(),
        summary,
    }
}
