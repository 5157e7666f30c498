//! Solver and simulator for continuous-time hierarchical principal-agent
//! contracting with CARA workers and a risk-neutral principal.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: worker parameters, closed-form best responses, the manager
//!   Hamiltonian and the direct-contracting benchmark.
//! - [`optimizer`]: derivative-free bounded maximisation (scan + Brent in one
//!   dimension, multistart Nelder-Mead in up to four) with first-order checks.
//! - [`two_level`]: principal / manager / agents chain in the sophisticated,
//!   linear and direct regimes, plus explicit contracts.
//! - [`extensions`]: manager ability, profit-and-cost reporting, separate
//!   reporting and the three-level hierarchy.
//! - [`mc`]: Euler-Maruyama Monte Carlo of outputs and contract accruals.

pub mod error;
pub mod extensions;
pub mod mc;
pub mod model;
pub mod optimizer;
pub mod two_level;

pub use error::{Error, Result};
pub use model::{
    agent_best_effort, dc_solution, effective_risk, h_ib, is_admissible, manager_hamiltonian,
    z_ib, AgentContract, ContractQV, DcSolution, FirmSpec, RateQV, WorkerParams,
};
pub use optimizer::{OptProblem, OptReport};
pub use two_level::{GammaRule, Regime, SolveResult};
