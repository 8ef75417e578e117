//! Energy objective, parameter-shift gradients and the BFGS driver.

pub mod bfgs;
mod experiment;

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::ParamCircuit;
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::simulator::{fastpath_expectation, run, run_shifted, State};

pub use bfgs::{BfgsOptions, BfgsOutcome, Iterate, StopReason};
pub use experiment::{run_experiment, run_experiment_on, ExperimentReport, SingleCodeRun};

/// Which ansatz an experiment builds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzChoice {
    /// One group (1-based position in the ordered partition), or every
    /// group with the best reported.
    SingleCode(Option<usize>),
    CombinedCodes,
    Vha,
    VhaGrouped,
}

impl fmt::Display for AnsatzChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnsatzChoice::SingleCode(None) => write!(f, "single-code"),
            AnsatzChoice::SingleCode(Some(i)) => write!(f, "single-code:{i}"),
            AnsatzChoice::CombinedCodes => write!(f, "combined-codes"),
            AnsatzChoice::Vha => write!(f, "vha"),
            AnsatzChoice::VhaGrouped => write!(f, "vha-grouped"),
        }
    }
}

impl FromStr for AnsatzChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('_', "-");
        match s.as_str() {
            "single-code" | "sca" => Ok(AnsatzChoice::SingleCode(None)),
            "combined-codes" | "cca" => Ok(AnsatzChoice::CombinedCodes),
            "vha" => Ok(AnsatzChoice::Vha),
            "vha-grouped" => Ok(AnsatzChoice::VhaGrouped),
            other => {
                if let Some(i) = other.strip_prefix("single-code:") {
                    let i: usize = i
                        .parse()
                        .map_err(|_| Error::Config(format!("bad group index in `{other}`")))?;
                    if i == 0 {
                        return Err(Error::Config("group indices start at 1".into()));
                    }
                    return Ok(AnsatzChoice::SingleCode(Some(i)));
                }
                Err(Error::Config(format!("unknown ansatz `{other}`")))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeConfig {
    pub ansatz: AnsatzChoice,
    pub layers: usize,
    pub init_value: f64,
    pub max_iterations: usize,
    /// Threshold on the norm of an accepted parameter update.
    pub step_tolerance: f64,
    pub gradient_tolerance: f64,
    pub warm_start: Option<Vec<f64>>,
    /// For `layers > 1`: optimize 1, 2, … layers in turn, each started from
    /// the previous optimum with the new slots at zero.
    pub warm_start_layers: bool,
}

impl Default for VqeConfig {
    fn default() -> Self {
        Self {
            ansatz: AnsatzChoice::CombinedCodes,
            layers: 1,
            init_value: 0.001,
            max_iterations: 100,
            step_tolerance: 1e-6,
            gradient_tolerance: 1e-8,
            warm_start: None,
            warm_start_layers: true,
        }
    }
}

impl VqeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 {
            return Err(Error::Config("layers must be at least 1".into()));
        }
        if !(self.step_tolerance > 0.0 && self.gradient_tolerance > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if !self.init_value.is_finite() {
            return Err(Error::Config("init value must be finite".into()));
        }
        Ok(())
    }

    fn bfgs_options(&self) -> BfgsOptions {
        BfgsOptions {
            max_iterations: self.max_iterations,
            step_tolerance: self.step_tolerance,
            gradient_tolerance: self.gradient_tolerance,
            ..BfgsOptions::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub energy: f64,
    pub params: Vec<f64>,
    pub trace: Vec<Iterate>,
    pub iterations: usize,
    /// Objective evaluations made by the optimizer (each with a gradient).
    pub function_evaluations: usize,
    pub gradient_evaluations: usize,
    /// Circuit executions, counting the two per parameter behind each gradient.
    pub circuit_evaluations: usize,
    pub reason: StopReason,
}

/// `⟨0|C(θ)† H C(θ)|0⟩`; single-code circuits go through the Clifford fast path.
pub fn objective(c: &ParamCircuit, h: &PauliSum, params: &[f64]) -> Result<f64> {
    if c.n_qubits() != h.n_qubits() {
        return Err(Error::SizeMismatch {
            left: c.n_qubits(),
            right: h.n_qubits(),
        });
    }
    if params.len() != c.n_params() {
        return Err(Error::ParamLength {
            expected: c.n_params(),
            got: params.len(),
        });
    }
    if let Some(form) = c.single_code_form() {
        return fastpath_expectation(&form.diagonalizer, params, form.n_electrons, h);
    }
    statevector_objective(c, h, params)
}

/// Always simulates the full statevector.
pub fn statevector_objective(c: &ParamCircuit, h: &PauliSum, params: &[f64]) -> Result<f64> {
    let s = run(c, params, &State::zero(c.n_qubits())?)?;
    s.expectation(h)
}

/// Whether each slot appears in exactly one gate.
fn slots_unique(c: &ParamCircuit) -> bool {
    let mut seen = vec![false; c.n_params()];
    for s in c.gates().iter().filter_map(|g| g.slot()) {
        if std::mem::replace(&mut seen[s], true) {
            return false;
        }
    }
    true
}

/// Parameter-shift gradient, `∂E/∂θ_k = E(θ_k + π/4) − E(θ_k − π/4)`,
/// exact for gates `exp(-iθG)` with `G² = I`.
pub fn gradient(c: &ParamCircuit, h: &PauliSum, params: &[f64]) -> Result<Vec<f64>> {
    objective(c, h, params)?;
    if slots_unique(c) {
        return (0..c.n_params())
            .into_par_iter()
            .map(|k| {
                let mut p = params.to_vec();
                p[k] = params[k] + FRAC_PI_4;
                let plus = objective(c, h, &p)?;
                p[k] = params[k] - FRAC_PI_4;
                let minus = objective(c, h, &p)?;
                Ok(plus - minus)
            })
            .collect();
    }
    // shared slots: shift each occurrence separately and accumulate
    let zero = State::zero(c.n_qubits())?;
    let parts: Vec<(usize, f64)> = c
        .gates()
        .par_iter()
        .enumerate()
        .filter_map(|(i, g)| g.slot().map(|s| (i, s)))
        .map(|(i, s)| {
            let plus = run_shifted(c, params, &zero, Some((i, FRAC_PI_4)))?.expectation(h)?;
            let minus = run_shifted(c, params, &zero, Some((i, -FRAC_PI_4)))?.expectation(h)?;
            Ok((s, plus - minus))
        })
        .collect::<Result<_>>()?;
    let mut g = vec![0.0; c.n_params()];
    for (s, d) in parts {
        g[s] += d;
    }
    Ok(g)
}

/// Run BFGS from `cfg.warm_start`, or from every parameter at `cfg.init_value`.
pub fn minimize(cfg: &VqeConfig, c: &ParamCircuit, h: &PauliSum) -> Result<VqeResult> {
    cfg.validate()?;
    let x0 = match &cfg.warm_start {
        Some(w) if w.len() != c.n_params() => {
            return Err(Error::ParamLength {
                expected: c.n_params(),
                got: w.len(),
            })
        }
        Some(w) => w.clone(),
        None => vec![cfg.init_value; c.n_params()],
    };
    let per_call = 1 + 2 * c.n_params();
    let out = bfgs::minimize(
        &x0,
        |x| Ok((objective(c, h, x)?, gradient(c, h, x)?)),
        &cfg.bfgs_options(),
    )?;
    Ok(VqeResult {
        energy: out.value,
        params: out.x,
        trace: out.trace,
        iterations: out.iterations,
        function_evaluations: out.evaluations,
        gradient_evaluations: out.evaluations,
        circuit_evaluations: out.evaluations * per_call,
        reason: out.reason,
    })
}
