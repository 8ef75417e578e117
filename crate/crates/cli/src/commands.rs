use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, Context};
use codespace_core::circuit::{combined_codes, compile_and_count, vha, vha_grouped, ParamCircuit};
use codespace_core::clifford::{conjugate_by_circuit, diagonalize_group, sign_assignment, stabilizer_state};
use codespace_core::grouping::{order_groups, partition, Partition};
use codespace_core::oracle::{ground_energy, hf_energy, MAX_ORACLE_QUBITS};
use codespace_core::pauli::{HamiltonianFile, PauliSum};
use codespace_core::vqe::{run_experiment_on, AnsatzChoice, ExperimentReport};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::manifest::{stem, Command, RunManifest};

struct Input {
    name: String,
    file: HamiltonianFile,
}

/// Per-input outcome for the index file.
#[derive(Serialize)]
struct IndexEntry {
    input: String,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

impl IndexEntry {
    fn ok(input: &str, output: Option<String>) -> Self {
        Self {
            input: input.to_string(),
            status: "ok",
            output,
            error: None,
        }
    }

    fn failed(input: &str, e: &anyhow::Error) -> Self {
        Self {
            input: input.to_string(),
            status: "failed",
            output: None,
            error: Some(format!("{e:#}")),
        }
    }
}

fn load(path: &Path) -> anyhow::Result<Input> {
    let file = HamiltonianFile::read(path).with_context(|| format!("reading `{}`", path.display()))?;
    Ok(Input {
        name: stem(path),
        file,
    })
}

fn electrons(m: &RunManifest, input: &Input) -> anyhow::Result<usize> {
    m.n_electrons.or(input.file.n_electrons).ok_or_else(|| {
        anyhow!(
            "`{}` has no `electrons:` header; pass --electrons",
            input.name
        )
    })
}

fn molecule(input: &Input) -> String {
    input.file.molecule.clone().unwrap_or_else(|| input.name.clone())
}

/// Write `name` under the output directory, or print it when there is none.
fn emit(m: &RunManifest, name: &str, contents: &str) -> anyhow::Result<Option<String>> {
    match &m.out {
        Some(dir) => {
            let path = dir.join(name);
            std::fs::write(&path, contents).with_context(|| format!("writing `{}`", path.display()))?;
            Ok(Some(name.to_string()))
        }
        None => {
            print!("{contents}");
            Ok(None)
        }
    }
}

fn pretty(v: &impl Serialize) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn write_index(m: &RunManifest, command: &str, entries: &[IndexEntry], extra: &[&str]) -> anyhow::Result<()> {
    let Some(dir) = &m.out else {
        return Ok(());
    };
    let mut doc = json!({
        "command": command,
        "config": m.config,
        "electrons": m.n_electrons,
        "runs": entries,
        "files": extra,
    });
    if m.timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        doc["generated_at_unix"] = json!(secs);
    }
    std::fs::write(dir.join("index.json"), pretty(&doc)?)?;
    Ok(())
}

/// Returns `Ok(false)` when some input failed but the rest were processed.
pub fn execute(m: &RunManifest) -> anyhow::Result<bool> {
    match m.command {
        Command::Group => per_input(m, "group", group),
        Command::Diagonalize => per_input(m, "diagonalize", diagonalize),
        Command::Vqe => vqe(m),
        Command::Counts => counts(m),
        Command::Exact => exact(m),
    }
}

/// Run `f` on each input in order; failures are reported and skipped.
fn per_input(
    m: &RunManifest,
    command: &str,
    f: fn(&RunManifest, &Input) -> anyhow::Result<Option<String>>,
) -> anyhow::Result<bool> {
    let mut entries = Vec::new();
    for path in &m.inputs {
        let name = stem(path);
        match load(path).and_then(|input| f(m, &input)) {
            Ok(out) => entries.push(IndexEntry::ok(&name, out)),
            Err(e) => {
                eprintln!("error: {name}: {e:#}");
                entries.push(IndexEntry::failed(&name, &e));
            }
        }
    }
    write_index(m, command, &entries, &[])?;
    Ok(entries.iter().all(|e| e.status == "ok"))
}

fn terms_json(h: &PauliSum) -> Vec<Value> {
    h.terms()
        .iter()
        .map(|t| json!({ "coefficient": t.coefficient, "pauli": t.string.to_string() }))
        .collect()
}

fn ordered_partition(input: &Input) -> anyhow::Result<Partition> {
    Ok(order_groups(&partition(&input.file.hamiltonian)?))
}

fn group(m: &RunManifest, input: &Input) -> anyhow::Result<Option<String>> {
    let h = &input.file.hamiltonian;
    let p = ordered_partition(input)?;
    let groups: Vec<Value> = p
        .groups
        .iter()
        .enumerate()
        .map(|(pos, g)| {
            json!({
                "position": pos + 1,
                "index": g.index,
                "one_norm": g.one_norm(),
                "is_z_only": g.is_z_only,
                "terms": terms_json(&g.terms),
            })
        })
        .collect();
    let doc = json!({
        "source": input.name,
        "n_qubits": h.n_qubits(),
        "n_terms": h.len(),
        "source_hash": p.source_hash,
        "n_groups": p.n_groups(),
        "groups": groups,
    });
    emit(m, &format!("{}.partition.json", input.name), &pretty(&doc)?)
}

fn diagonalize(m: &RunManifest, input: &Input) -> anyhow::Result<Option<String>> {
    let n_e = electrons(m, input)?;
    let p = ordered_partition(input)?;
    let mut groups = Vec::new();
    for (pos, g) in p.groups.iter().enumerate() {
        let u = diagonalize_group(g)?;
        let images = g
            .terms
            .terms()
            .iter()
            .map(|t| conjugate_by_circuit(&t.string, &u).map(|p| p.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        let signed = sign_assignment(g, &u, n_e)?;
        let psi = stabilizer_state(&u, n_e)?;
        for s in &signed.elements {
            let v = psi.expectation_pauli(s);
            if (v.re - 1.0).abs() > 1e-10 || v.im.abs() > 1e-10 {
                return Err(anyhow!("group {}: {s} has expectation {v} on its stabilizer state", pos + 1));
            }
        }
        groups.push(json!({
            "position": pos + 1,
            "index": g.index,
            "terms": terms_json(&g.terms),
            "diagonalizer": u.gates().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "two_qubit_gates": u.two_qubit_count(),
            "images": images,
            "stabilizers": signed.elements.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        }));
    }
    let doc = json!({
        "source": input.name,
        "n_qubits": input.file.hamiltonian.n_qubits(),
        "n_electrons": n_e,
        "source_hash": p.source_hash,
        "groups": groups,
    });
    emit(m, &format!("{}.diagonalizers.json", input.name), &pretty(&doc)?)
}

#[derive(Serialize)]
struct SummaryRow {
    molecule: String,
    geometry: String,
    ansatz: String,
    layers: usize,
    n_qubits: usize,
    n_groups: usize,
    params: usize,
    two_qubit_gates: usize,
    #[serde(rename = "E_HF")]
    e_hf: f64,
    #[serde(rename = "E_exact")]
    e_exact: Option<f64>,
    #[serde(rename = "E_opt")]
    e_opt: f64,
    #[serde(rename = "error_Ha")]
    error: Option<f64>,
    iterations: usize,
    fevals: usize,
    converged_reason: String,
}

impl SummaryRow {
    fn from_report(r: &ExperimentReport) -> Self {
        Self {
            molecule: r.molecule.clone(),
            geometry: r.geometry.clone(),
            ansatz: r.ansatz.clone(),
            layers: r.layers,
            n_qubits: r.n_qubits,
            n_groups: r.n_groups,
            params: r.params,
            two_qubit_gates: r.counts.two_qubit,
            e_hf: r.e_hf,
            e_exact: r.e_exact,
            e_opt: r.e_opt,
            error: r.error,
            iterations: r.result.iterations,
            fevals: r.result.function_evaluations,
            converged_reason: r.converged_reason().to_string(),
        }
    }
}

fn csv_text<T: Serialize>(rows: &[T]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn ansatz_slug(a: &AnsatzChoice) -> String {
    a.to_string().replace(':', "-")
}

fn vqe(m: &RunManifest) -> anyhow::Result<bool> {
    let results: Vec<(String, anyhow::Result<ExperimentReport>)> = m
        .inputs
        .par_iter()
        .map(|path| {
            let name = stem(path);
            let r = load(path).and_then(|input| {
                let n_e = electrons(m, &input)?;
                Ok(run_experiment_on(&input.file, &input.name, Some(n_e), &m.config)?)
            });
            (name, r)
        })
        .collect();

    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for (name, r) in &results {
        match r {
            Ok(report) => {
                let trace = match &m.out {
                    Some(_) => {
                        let file = format!("{name}.{}.L{}.json", ansatz_slug(&m.config.ansatz), m.config.layers);
                        emit(m, &file, &pretty(report)?)?
                    }
                    None => None,
                };
                if m.out.is_some() {
                    println!(
                        "{name}: E_HF {:.8} E_exact {} E_opt {:.8} error {} ({} iterations, {})",
                        report.e_hf,
                        report.e_exact.map_or("n/a".into(), |e| format!("{e:.8}")),
                        report.e_opt,
                        report.error.map_or("n/a".into(), |e| format!("{e:.3e}")),
                        report.result.iterations,
                        report.converged_reason(),
                    );
                }
                rows.push(SummaryRow::from_report(report));
                entries.push(IndexEntry::ok(name, trace));
            }
            Err(e) => {
                eprintln!("error: {name}: {e:#}");
                entries.push(IndexEntry::failed(name, e));
            }
        }
    }
    let summary = csv_text(&rows)?;
    emit(m, "summary.csv", &summary)?;
    write_index(m, "vqe", &entries, &["summary.csv"])?;
    Ok(entries.iter().all(|e| e.status == "ok"))
}

#[derive(Serialize)]
struct CountsRow {
    molecule: String,
    geometry: String,
    ansatz: String,
    layers: usize,
    n_qubits: usize,
    n_groups: usize,
    two_qubit_gates: usize,
    single_qubit_gates: usize,
    params: usize,
    convention: String,
}

fn counts_for(m: &RunManifest, input: &Input) -> anyhow::Result<Vec<CountsRow>> {
    let n_e = electrons(m, input)?;
    let h = &input.file.hamiltonian;
    let p = ordered_partition(input)?;
    let d = p.groups.iter().map(diagonalize_group).collect::<Result<Vec<_>, _>>()?;
    let layers = m.config.layers;
    let circuits: [(AnsatzChoice, ParamCircuit, &str); 3] = [
        (AnsatzChoice::Vha, vha(h, n_e, layers)?, ""),
        (AnsatzChoice::VhaGrouped, vha_grouped(&p, &d, n_e, layers)?, ""),
        (AnsatzChoice::CombinedCodes, combined_codes(&p, &d, n_e, layers)?, "3nm"),
    ];
    circuits
        .into_iter()
        .map(|(a, c, convention)| {
            let k = compile_and_count(&c)?;
            Ok(CountsRow {
                molecule: molecule(input),
                geometry: input.file.geometry.clone().unwrap_or_default(),
                ansatz: a.to_string(),
                layers,
                n_qubits: h.n_qubits(),
                n_groups: p.n_groups(),
                two_qubit_gates: k.two_qubit,
                single_qubit_gates: k.single_qubit,
                params: k.parameters,
                convention: convention.to_string(),
            })
        })
        .collect()
}

fn counts(m: &RunManifest) -> anyhow::Result<bool> {
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for path in &m.inputs {
        let name = stem(path);
        match load(path).and_then(|input| counts_for(m, &input)) {
            Ok(r) => {
                rows.extend(r);
                entries.push(IndexEntry::ok(&name, None));
            }
            Err(e) => {
                eprintln!("error: {name}: {e:#}");
                entries.push(IndexEntry::failed(&name, &e));
            }
        }
    }
    emit(m, "counts.csv", &csv_text(&rows)?)?;
    write_index(m, "counts", &entries, &["counts.csv"])?;
    Ok(entries.iter().all(|e| e.status == "ok"))
}

#[derive(Serialize)]
struct ExactRow {
    molecule: String,
    geometry: String,
    n_qubits: usize,
    n_electrons: Option<usize>,
    #[serde(rename = "E_HF")]
    e_hf: Option<f64>,
    #[serde(rename = "E_exact")]
    e_exact: f64,
}

fn exact_for(m: &RunManifest, input: &Input) -> anyhow::Result<ExactRow> {
    let h = &input.file.hamiltonian;
    if h.n_qubits() > MAX_ORACLE_QUBITS {
        return Err(anyhow!(
            "{} qubits is beyond the dense oracle's limit of {MAX_ORACLE_QUBITS}",
            h.n_qubits()
        ));
    }
    let n_e = m.n_electrons.or(input.file.n_electrons);
    Ok(ExactRow {
        molecule: molecule(input),
        geometry: input.file.geometry.clone().unwrap_or_default(),
        n_qubits: h.n_qubits(),
        n_electrons: n_e,
        e_hf: n_e.map(|k| hf_energy(h, k)).transpose()?,
        e_exact: ground_energy(h)?.0,
    })
}

fn exact(m: &RunManifest) -> anyhow::Result<bool> {
    let results: Vec<(String, anyhow::Result<ExactRow>)> = m
        .inputs
        .par_iter()
        .map(|path| (stem(path), load(path).and_then(|input| exact_for(m, &input))))
        .collect();
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for (name, r) in results {
        match r {
            Ok(row) => {
                rows.push(row);
                entries.push(IndexEntry::ok(&name, None));
            }
            Err(e) => {
                eprintln!("error: {name}: {e:#}");
                entries.push(IndexEntry::failed(&name, &e));
            }
        }
    }
    emit(m, "exact.csv", &csv_text(&rows)?)?;
    write_index(m, "exact", &entries, &["exact.csv"])?;
    Ok(entries.iter().all(|e| e.status == "ok"))
}
