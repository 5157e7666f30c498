//! Output row schemas. Column order is fixed by the `HEADER` constants.

use serde::{Deserialize, Serialize};

use crate::number::{fmt_opt, fmt_sig, round_sig};

/// A row type with a fixed, ordered set of columns.
pub trait Record {
    const HEADER: &'static [&'static str];

    fn fields(&self) -> Vec<String>;

    /// Round every number to the serialized precision.
    fn rounded(self) -> Self;
}

fn r(x: Option<f64>) -> Option<f64> {
    x.map(round_sig)
}

/// One solved instance of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scenario: String,
    pub label: String,
    pub sweep_var: String,
    pub sweep_value: Option<f64>,
    pub regime: String,
    /// Manager included.
    pub total_workers: usize,
    pub z_b: Option<f64>,
    pub gamma_b: Option<f64>,
    pub mean_agent_rate: Option<f64>,
    pub manager_effort: Option<f64>,
    /// Per unit time.
    pub principal_value: f64,
    pub value_per_worker: f64,
    pub dc_value_per_worker: f64,
    /// `(z_b - z_lin) / z_lin`.
    pub manager_pps_gain_vs_linear: Option<f64>,
    pub value_gain_vs_linear: Option<f64>,
    pub value_gain_vs_dc: f64,
}

impl Record for SweepRow {
    const HEADER: &'static [&'static str] = &[
        "scenario",
        "label",
        "sweep_var",
        "sweep_value",
        "regime",
        "total_workers",
        "z_b",
        "gamma_b",
        "mean_agent_rate",
        "manager_effort",
        "principal_value",
        "value_per_worker",
        "dc_value_per_worker",
        "manager_pps_gain_vs_linear",
        "value_gain_vs_linear",
        "value_gain_vs_dc",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.scenario.clone(),
            self.label.clone(),
            self.sweep_var.clone(),
            fmt_opt(self.sweep_value),
            self.regime.clone(),
            self.total_workers.to_string(),
            fmt_opt(self.z_b),
            fmt_opt(self.gamma_b),
            fmt_opt(self.mean_agent_rate),
            fmt_opt(self.manager_effort),
            fmt_sig(self.principal_value),
            fmt_sig(self.value_per_worker),
            fmt_sig(self.dc_value_per_worker),
            fmt_opt(self.manager_pps_gain_vs_linear),
            fmt_opt(self.value_gain_vs_linear),
            fmt_sig(self.value_gain_vs_dc),
        ]
    }

    fn rounded(self) -> Self {
        Self {
            sweep_value: r(self.sweep_value),
            z_b: r(self.z_b),
            gamma_b: r(self.gamma_b),
            mean_agent_rate: r(self.mean_agent_rate),
            manager_effort: r(self.manager_effort),
            principal_value: round_sig(self.principal_value),
            value_per_worker: round_sig(self.value_per_worker),
            dc_value_per_worker: round_sig(self.dc_value_per_worker),
            manager_pps_gain_vs_linear: r(self.manager_pps_gain_vs_linear),
            value_gain_vs_linear: r(self.value_gain_vs_linear),
            value_gain_vs_dc: round_sig(self.value_gain_vs_dc),
            ..self
        }
    }
}

/// Monte Carlo estimates for one instance, next to their closed-form
/// targets. Utilities are those of the first agent and of the manager.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRow {
    pub scenario: String,
    pub label: String,
    pub sweep_var: String,
    pub sweep_value: Option<f64>,
    pub regime: String,
    pub total_workers: usize,
    pub z_b: f64,
    pub gamma_b: f64,
    pub horizon: f64,
    pub paths: usize,
    pub steps: usize,
    pub seed: u64,
    pub units: usize,
    pub flagged_paths: usize,
    pub agent_utility_mean: Option<f64>,
    pub agent_utility_se: Option<f64>,
    pub agent_utility_target: Option<f64>,
    pub manager_utility_mean: f64,
    pub manager_utility_se: f64,
    pub manager_utility_target: f64,
    pub principal_payoff_mean: f64,
    pub principal_payoff_se: f64,
    pub principal_payoff_target: f64,
    pub zeta_qv_mean: f64,
    pub zeta_qv_se: f64,
    pub zeta_qv_target: f64,
}

impl Record for McRow {
    const HEADER: &'static [&'static str] = &[
        "scenario",
        "label",
        "sweep_var",
        "sweep_value",
        "regime",
        "total_workers",
        "z_b",
        "gamma_b",
        "horizon",
        "paths",
        "steps",
        "seed",
        "units",
        "flagged_paths",
        "agent_utility_mean",
        "agent_utility_se",
        "agent_utility_target",
        "manager_utility_mean",
        "manager_utility_se",
        "manager_utility_target",
        "principal_payoff_mean",
        "principal_payoff_se",
        "principal_payoff_target",
        "zeta_qv_mean",
        "zeta_qv_se",
        "zeta_qv_target",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.scenario.clone(),
            self.label.clone(),
            self.sweep_var.clone(),
            fmt_opt(self.sweep_value),
            self.regime.clone(),
            self.total_workers.to_string(),
            fmt_sig(self.z_b),
            fmt_sig(self.gamma_b),
            fmt_sig(self.horizon),
            self.paths.to_string(),
            self.steps.to_string(),
            self.seed.to_string(),
            self.units.to_string(),
            self.flagged_paths.to_string(),
            fmt_opt(self.agent_utility_mean),
            fmt_opt(self.agent_utility_se),
            fmt_opt(self.agent_utility_target),
            fmt_sig(self.manager_utility_mean),
            fmt_sig(self.manager_utility_se),
            fmt_sig(self.manager_utility_target),
            fmt_sig(self.principal_payoff_mean),
            fmt_sig(self.principal_payoff_se),
            fmt_sig(self.principal_payoff_target),
            fmt_sig(self.zeta_qv_mean),
            fmt_sig(self.zeta_qv_se),
            fmt_sig(self.zeta_qv_target),
        ]
    }

    fn rounded(self) -> Self {
        Self {
            sweep_value: r(self.sweep_value),
            z_b: round_sig(self.z_b),
            gamma_b: round_sig(self.gamma_b),
            horizon: round_sig(self.horizon),
            agent_utility_mean: r(self.agent_utility_mean),
            agent_utility_se: r(self.agent_utility_se),
            agent_utility_target: r(self.agent_utility_target),
            manager_utility_mean: round_sig(self.manager_utility_mean),
            manager_utility_se: round_sig(self.manager_utility_se),
            manager_utility_target: round_sig(self.manager_utility_target),
            principal_payoff_mean: round_sig(self.principal_payoff_mean),
            principal_payoff_se: round_sig(self.principal_payoff_se),
            principal_payoff_target: round_sig(self.principal_payoff_target),
            zeta_qv_mean: round_sig(self.zeta_qv_mean),
            zeta_qv_se: round_sig(self.zeta_qv_se),
            zeta_qv_target: round_sig(self.zeta_qv_target),
            ..self
        }
    }
}

/// Row-by-row difference `A - B` of two sweeps, with relative gains
/// `(A - B) / |B|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub sweep_var: String,
    pub sweep_value: Option<f64>,
    pub total_workers: usize,
    pub label_a: String,
    pub label_b: String,
    pub regime_a: String,
    pub regime_b: String,
    pub delta_z_b: Option<f64>,
    pub gain_z_b: Option<f64>,
    pub delta_mean_agent_rate: Option<f64>,
    pub gain_mean_agent_rate: Option<f64>,
    pub delta_manager_effort: Option<f64>,
    pub delta_principal_value: f64,
    pub gain_principal_value: Option<f64>,
    pub delta_value_per_worker: f64,
    pub gain_value_per_worker: Option<f64>,
}

impl Record for CompareRow {
    const HEADER: &'static [&'static str] = &[
        "sweep_var",
        "sweep_value",
        "total_workers",
        "label_a",
        "label_b",
        "regime_a",
        "regime_b",
        "delta_z_b",
        "gain_z_b",
        "delta_mean_agent_rate",
        "gain_mean_agent_rate",
        "delta_manager_effort",
        "delta_principal_value",
        "gain_principal_value",
        "delta_value_per_worker",
        "gain_value_per_worker",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.sweep_var.clone(),
            fmt_opt(self.sweep_value),
            self.total_workers.to_string(),
            self.label_a.clone(),
            self.label_b.clone(),
            self.regime_a.clone(),
            self.regime_b.clone(),
            fmt_opt(self.delta_z_b),
            fmt_opt(self.gain_z_b),
            fmt_opt(self.delta_mean_agent_rate),
            fmt_opt(self.gain_mean_agent_rate),
            fmt_opt(self.delta_manager_effort),
            fmt_sig(self.delta_principal_value),
            fmt_opt(self.gain_principal_value),
            fmt_sig(self.delta_value_per_worker),
            fmt_opt(self.gain_value_per_worker),
        ]
    }

    fn rounded(self) -> Self {
        Self {
            sweep_value: r(self.sweep_value),
            delta_z_b: r(self.delta_z_b),
            gain_z_b: r(self.gain_z_b),
            delta_mean_agent_rate: r(self.delta_mean_agent_rate),
            gain_mean_agent_rate: r(self.gain_mean_agent_rate),
            delta_manager_effort: r(self.delta_manager_effort),
            delta_principal_value: round_sig(self.delta_principal_value),
            gain_principal_value: r(self.gain_principal_value),
            delta_value_per_worker: round_sig(self.delta_value_per_worker),
            gain_value_per_worker: r(self.gain_value_per_worker),
            ..self
        }
    }
}

fn diff(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(a? - b?)
}

fn gain(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    let (a, b) = (a?, b?);
    (b != 0.0).then(|| (a - b) / b.abs())
}

impl CompareRow {
    pub fn between(a: &SweepRow, b: &SweepRow) -> Self {
        Self {
            sweep_var: a.sweep_var.clone(),
            sweep_value: a.sweep_value,
            total_workers: a.total_workers,
            label_a: a.label.clone(),
            label_b: b.label.clone(),
            regime_a: a.regime.clone(),
            regime_b: b.regime.clone(),
            delta_z_b: diff(a.z_b, b.z_b),
            gain_z_b: gain(a.z_b, b.z_b),
            delta_mean_agent_rate: diff(a.mean_agent_rate, b.mean_agent_rate),
            gain_mean_agent_rate: gain(a.mean_agent_rate, b.mean_agent_rate),
            delta_manager_effort: diff(a.manager_effort, b.manager_effort),
            delta_principal_value: a.principal_value - b.principal_value,
            gain_principal_value: gain(Some(a.principal_value), Some(b.principal_value)),
            delta_value_per_worker: a.value_per_worker - b.value_per_worker,
            gain_value_per_worker: gain(Some(a.value_per_worker), Some(b.value_per_worker)),
        }
    }
}
