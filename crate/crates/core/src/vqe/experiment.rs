use std::path::Path;

use serde::Serialize;

use super::{minimize, AnsatzChoice, VqeConfig, VqeResult};
use crate::circuit::{combined_codes, compile_and_count, single_code, vha, vha_grouped, GateCounts, ParamCircuit};
use crate::clifford::{diagonalize_group, CliffordCircuit};
use crate::error::{Error, Result};
use crate::grouping::{order_groups, partition};
use crate::oracle::{ground_energy, hf_energy, MAX_ORACLE_QUBITS};
use crate::pauli::{HamiltonianFile, PauliSum};
use crate::simulator::fastpath_expectation;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingleCodeRun {
    /// 1-based position in the ordered partition.
    pub group: usize,
    /// Energy of the group's own terms at the optimum.
    pub group_energy: f64,
    /// Energy of the full Hamiltonian in the optimized state.
    pub full_energy: f64,
    pub result: VqeResult,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub molecule: String,
    pub geometry: String,
    pub ansatz: String,
    pub layers: usize,
    pub n_qubits: usize,
    pub n_electrons: usize,
    pub n_terms: usize,
    pub n_groups: usize,
    pub params: usize,
    pub counts: GateCounts,
    /// How `params` was counted (`"3nm"` for combined codes).
    pub param_convention: Option<String>,
    pub e_hf: f64,
    pub e_exact: Option<f64>,
    pub e_opt: f64,
    pub error: Option<f64>,
    pub result: VqeResult,
    /// Optimum after each layer when layers are grown one at a time.
    pub layer_energies: Vec<f64>,
    pub single_code_runs: Vec<SingleCodeRun>,
    pub source_hash: String,
}

impl ExperimentReport {
    pub fn converged_reason(&self) -> &'static str {
        self.result.reason.as_str()
    }
}

/// Read `path` and run the full pipeline on it.
pub fn run_experiment(path: impl AsRef<Path>, n_electrons: Option<usize>, cfg: &VqeConfig) -> Result<ExperimentReport> {
    let path = path.as_ref();
    let file = HamiltonianFile::read(path)?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    run_experiment_on(&file, &stem, n_electrons, cfg)
}

/// Parse, partition, diagonalize, build, optimize, and compare against the
/// exact ground energy.
pub fn run_experiment_on(
    file: &HamiltonianFile,
    default_name: &str,
    n_electrons: Option<usize>,
    cfg: &VqeConfig,
) -> Result<ExperimentReport> {
    cfg.validate()?;
    let h = &file.hamiltonian;
    let n = h.n_qubits();
    let n_e = n_electrons
        .or(file.n_electrons)
        .ok_or_else(|| Error::Config("electron count missing: add `electrons:` or pass it explicitly".into()))?;

    let part = order_groups(&partition(h)?);
    let diagonalizers = part
        .groups
        .iter()
        .map(diagonalize_group)
        .collect::<Result<Vec<_>>>()?;

    let e_hf = hf_energy(h, n_e)?;
    let e_exact = if n <= MAX_ORACLE_QUBITS {
        Some(ground_energy(h)?.0)
    } else {
        None
    };

    let mut layer_energies = Vec::new();
    let mut single_code_runs = Vec::new();
    let mut param_convention = None;

    let (circuit, result, e_opt) = match cfg.ansatz {
        AnsatzChoice::SingleCode(which) => {
            let positions: Vec<usize> = match which {
                Some(i) if i > part.n_groups() => {
                    return Err(Error::Config(format!("group {i} of {}", part.n_groups())));
                }
                Some(i) => vec![i],
                None => (1..=part.n_groups()).collect(),
            };
            let mut best: Option<(ParamCircuit, VqeResult, f64)> = None;
            for pos in positions {
                let u = &diagonalizers[pos - 1];
                let group_h = &part.groups[pos - 1].terms;
                let c = single_code(u, n_e)?;
                let r = minimize(cfg, &c, group_h)?;
                let full = fastpath_expectation(u, &r.params, n_e, h)?;
                if best.as_ref().is_none_or(|b| full < b.2) {
                    best = Some((c, r.clone(), full));
                }
                single_code_runs.push(SingleCodeRun {
                    group: pos,
                    group_energy: r.energy,
                    full_energy: full,
                    result: r,
                });
            }
            best.expect("partition has at least one group")
        }
        AnsatzChoice::CombinedCodes => {
            param_convention = Some("3nm".to_string());
            if cfg.layers > 1 && cfg.warm_start_layers && cfg.warm_start.is_none() {
                let (c, r) = grow_layers(cfg, &part, &diagonalizers, n_e, h, &mut layer_energies)?;
                let e = r.energy;
                (c, r, e)
            } else {
                let c = combined_codes(&part, &diagonalizers, n_e, cfg.layers)?;
                let r = minimize(cfg, &c, h)?;
                let e = r.energy;
                (c, r, e)
            }
        }
        AnsatzChoice::Vha | AnsatzChoice::VhaGrouped => {
            let c = if cfg.ansatz == AnsatzChoice::Vha {
                vha(h, n_e, cfg.layers)?
            } else {
                vha_grouped(&part, &diagonalizers, n_e, cfg.layers)?
            };
            let r = minimize(cfg, &c, h)?;
            let e = r.energy;
            (c, r, e)
        }
    };

    Ok(ExperimentReport {
        molecule: file.molecule.clone().unwrap_or_else(|| default_name.to_string()),
        geometry: file.geometry.clone().unwrap_or_default(),
        ansatz: cfg.ansatz.to_string(),
        layers: cfg.layers,
        n_qubits: n,
        n_electrons: n_e,
        n_terms: h.len(),
        n_groups: part.n_groups(),
        params: circuit.n_params(),
        counts: compile_and_count(&circuit)?,
        param_convention,
        e_hf,
        e_exact,
        e_opt,
        error: e_exact.map(|e| (e_opt - e).abs()),
        result,
        layer_energies,
        single_code_runs,
        source_hash: part.source_hash.clone(),
    })
}

/// Optimize 1, 2, …, L layers; each stage starts from the previous optimum
/// with the added layer's slots at zero, where the added layer is the identity.
fn grow_layers(
    cfg: &VqeConfig,
    part: &crate::grouping::Partition,
    diagonalizers: &[CliffordCircuit],
    n_e: usize,
    h: &PauliSum,
    energies: &mut Vec<f64>,
) -> Result<(ParamCircuit, VqeResult)> {
    let mut prev: Option<Vec<f64>> = None;
    let mut last = None;
    for l in 1..=cfg.layers {
        let c = combined_codes(part, diagonalizers, n_e, l)?;
        let warm = prev.take().map(|mut p| {
            p.resize(c.n_params(), 0.0);
            p
        });
        let stage = VqeConfig {
            warm_start: warm,
            ..cfg.clone()
        };
        let r = minimize(&stage, &c, h)?;
        energies.push(r.energy);
        prev = Some(r.params.clone());
        last = Some((c, r));
    }
    Ok(last.expect("at least one layer"))
}
