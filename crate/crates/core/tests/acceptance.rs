//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fail.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::result::Result;
use std::time::Instant;

use codespace_core::circuit::ParamCircuit;
use codespace_core::prelude::*;
use codespace_core::random::{random_commuting_set, random_hamiltonian, random_params};
use codespace_core::vqe::statevector_objective;
use common::*;
use nalgebra::SymmetricEigen;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ordered_diagonalizers(h: &PauliSum) -> (Partition, Vec<CliffordCircuit>) {
    let p = order_groups(&partition(h).unwrap());
    let d = p.groups.iter().map(|g| diagonalize_group(g).unwrap()).collect();
    (p, d)
}

fn strings(s: &PauliSum) -> BTreeSet<String> {
    s.terms().iter().map(|t| t.string.to_string()).collect()
}

fn criterion_1() -> Outcome {
    let h = h2().hamiltonian;
    let t = Instant::now();
    let p = partition(&h).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed().as_secs_f64();
    let g1: BTreeSet<String> = [
        "I", "Z0", "Z1", "Z2", "Z3", "Z0 Z1", "Z0 Z2", "Z0 Z3", "Z1 Z2", "Z1 Z3", "Z2 Z3",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let g2: BTreeSet<String> = ["Y0 X1 X2 Y3", "Y0 Y1 X2 X3", "X0 X1 Y2 Y3", "X0 Y1 Y2 X3"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let got: Vec<BTreeSet<String>> = p.groups.iter().map(|g| strings(&g.terms)).collect();
    ensure(got.len() == 2, || format!("{} groups", got.len()))?;
    ensure(got.contains(&g1) && got.contains(&g2), || format!("memberships {got:?}"))?;
    ensure(elapsed < 1.0, || format!("took {elapsed:.3}s"))?;
    Ok(format!("groups of 11 and 4 terms in {:.1} ms", elapsed * 1e3))
}

/// Every image diagonal with sign ±1; dense `U P U†` equals the image for n ≤ 4.
fn check_diagonalizer(terms: &PauliSum, u: &CliffordCircuit) -> Result<(), String> {
    let dense_u = (terms.n_qubits() <= 4).then(|| dense_clifford(u));
    for t in terms.terms() {
        let img = conjugate_by_circuit(&t.string, u).map_err(|e| e.to_string())?;
        ensure(img.is_diagonal(), || format!("{} -> {img} not diagonal", t.string))?;
        ensure(img.sign().is_some(), || format!("{} -> {img} has imaginary phase", t.string))?;
        if let Some(du) = &dense_u {
            let lhs = du * dense_pauli(&t.string) * du.adjoint();
            let err = max_abs_diff(&lhs, &dense_pauli(&img));
            ensure(err < 1e-12, || format!("dense mismatch {err:e} for {}", t.string))?;
        }
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let h = h2().hamiltonian;
    let (p, d) = ordered_diagonalizers(&h);
    let g2 = p.groups.iter().position(|g| !g.is_z_only).ok_or("no XY group")?;
    check_diagonalizer(&p.groups[g2].terms, &d[g2])?;

    let mut rng = StdRng::seed_from_u64(2);
    for i in 0..100 {
        let n = 1 + i % 5;
        let m = rng.gen_range(1..=8);
        let set = random_commuting_set(&mut rng, n, m);
        let u = diagonalize_terms(&set).map_err(|e| format!("set {i}: {e}"))?;
        check_diagonalizer(&set, &u).map_err(|e| format!("set {i} (n={n}): {e}"))?;
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("took {secs:.2}s"))?;
    Ok(format!("G2 plus 100 random sets, {secs:.2}s"))
}

fn check_stabilized(p: &Partition, d: &[CliffordCircuit], n_e: usize) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for (g, u) in p.groups.iter().zip(d) {
        let signed = sign_assignment(g, u, n_e).map_err(|e| e.to_string())?;
        let psi = stabilizer_state(u, n_e).map_err(|e| e.to_string())?;
        for s in &signed.elements {
            let v = psi.expectation_pauli(s);
            worst = worst.max((v.re - 1.0).abs()).max(v.im.abs());
        }
    }
    ensure(worst <= 1e-10, || format!("worst deviation {worst:e}"))?;
    Ok(worst)
}

fn criterion_3() -> Outcome {
    let f = h2();
    let (p, d) = ordered_diagonalizers(&f.hamiltonian);
    let worst = check_stabilized(&p, &d, f.n_electrons.unwrap())?;
    Ok(format!("H2 fixture, worst |<S> - 1| = {worst:.1e}"))
}

fn criterion_4() -> Outcome {
    let text = std::fs::read_to_string(fixture("h2_xy_diagonalizer.clf")).map_err(|e| e.to_string())?;
    let u = CliffordCircuit::parse(&text, 4).map_err(|e| e.to_string())?;
    let psi = stabilizer_state(&u, 2).map_err(|e| e.to_string())?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut worst: f64 = 0.0;
    for (i, a) in psi.amplitudes().iter().enumerate() {
        let want = if i == 0b1100 || i == 0b0011 { r } else { 0.0 };
        worst = worst.max((a.re - want).abs()).max(a.im.abs());
    }
    ensure(worst <= 1e-12, || format!("amplitude error {worst:e}"))?;
    let g2 = PauliSum::from_pairs(
        4,
        &[(1.0, "Y0 X1 X2 Y3"), (1.0, "Y0 Y1 X2 X3"), (1.0, "X0 X1 Y2 Y3"), (1.0, "X0 Y1 Y2 X3")],
    )
    .unwrap();
    check_diagonalizer(&g2, &u)?;
    Ok(format!("max amplitude error {worst:.1e}"))
}

/// Lowest eigenvalue of the fixture assembled directly from Kronecker products.
fn h2_dense_ground() -> f64 {
    let m = dense_sum(&h2().hamiltonian);
    SymmetricEigen::new(m).eigenvalues.min()
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let f = h2();
    let report = run_experiment_on(&f, "H2", None, &VqeConfig::default()).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let exact = report.e_exact.ok_or("no exact energy")?;
    let independent = h2_dense_ground();
    ensure((exact - independent).abs() < 1e-10, || {
        format!("oracle {exact} vs independent {independent}")
    })?;
    ensure((exact + 1.137).abs() < 1e-3, || format!("E_exact {exact}"))?;
    let err = (report.e_opt - exact).abs();
    ensure(err <= 1e-3, || format!("E_opt {} vs {exact}: {err:e}", report.e_opt))?;
    ensure(report.result.iterations <= 100, || format!("{} iterations", report.result.iterations))?;
    ensure(secs < 30.0, || format!("took {secs:.1}s"))?;
    Ok(format!(
        "E_opt {:.6} E_exact {exact:.6} error {err:.1e} Ha, {} iterations, {secs:.2}s",
        report.e_opt, report.result.iterations
    ))
}

fn criterion_6() -> Outcome {
    let f = h2();
    let cfg = VqeConfig {
        ansatz: AnsatzChoice::SingleCode(None),
        ..VqeConfig::default()
    };
    let report = run_experiment_on(&f, "H2", None, &cfg).map_err(|e| e.to_string())?;
    let by_hand = basis_energy(&f.hamiltonian, "1100");
    ensure((report.e_hf - by_hand).abs() < 1e-12, || format!("E_HF {} vs {by_hand}", report.e_hf))?;
    ensure((report.e_hf + 1.117).abs() < 1e-3, || format!("E_HF {}", report.e_hf))?;
    let best = report
        .single_code_runs
        .iter()
        .map(|r| r.full_energy)
        .fold(f64::INFINITY, f64::min);
    ensure(best <= report.e_hf + 1e-6, || format!("best {best} vs E_HF {}", report.e_hf))?;
    Ok(format!("best single code {best:.6} vs E_HF {:.6}", report.e_hf))
}

/// Fast path against the statevector on one single-code circuit.
fn fastpath_gap(rng: &mut StdRng, h: &PauliSum, n_e: usize) -> Result<f64, String> {
    let (_, d) = ordered_diagonalizers(h);
    let u = &d[rng.gen_range(0..d.len())];
    let c = single_code(u, n_e).map_err(|e| e.to_string())?;
    let x = random_params(rng, c.n_params());
    let fast = fastpath_expectation(u, &x, n_e, h).map_err(|e| e.to_string())?;
    let full = statevector_objective(&c, h, &x).map_err(|e| e.to_string())?;
    Ok((fast - full).abs())
}

fn fastpath_trials(rng: &mut StdRng, trials: usize, sizes: &[usize]) -> Result<f64, String> {
    let h2 = h2().hamiltonian;
    let mut worst: f64 = 0.0;
    for i in 0..trials {
        let gap = if i % 4 == 0 {
            fastpath_gap(rng, &h2, 2)?
        } else {
            let n = sizes[i % sizes.len()];
            let h = random_hamiltonian(rng, n, 3 * n);
            let n_e = rng.gen_range(1..=n);
            fastpath_gap(rng, &h, n_e)?
        };
        ensure(gap <= 1e-10, || format!("trial {i}: gap {gap:e}"))?;
        worst = worst.max(gap);
    }
    Ok(worst)
}

fn criterion_7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let worst = fastpath_trials(&mut rng, 200, &[4, 5, 6])?;
    Ok(format!("200 trials, worst gap {worst:.1e}"))
}

fn random_circuit(rng: &mut StdRng, h: &PauliSum, n_e: usize, kind: usize) -> ParamCircuit {
    let (p, d) = ordered_diagonalizers(h);
    match kind % 4 {
        0 => combined_codes(&p, &d, n_e, 1 + rng.gen_range(0..2)).unwrap(),
        1 => vha(h, n_e, 1).unwrap(),
        2 => vha_grouped(&p, &d, n_e, 1).unwrap(),
        _ => single_code(&d[rng.gen_range(0..d.len())], n_e).unwrap(),
    }
}

fn gradient_trials(rng: &mut StdRng, instances: usize, sizes: &[usize]) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for i in 0..instances {
        let n = sizes[i % sizes.len()];
        let h = random_hamiltonian(rng, n, 2 * n + 2);
        let n_e = rng.gen_range(1..=n);
        let c = random_circuit(rng, &h, n_e, i);
        let x = random_params(rng, c.n_params());
        let g = gradient(&c, &h, &x).map_err(|e| e.to_string())?;
        let fd = finite_difference(|p| statevector_objective(&c, &h, p).unwrap(), &x, 1e-5);
        for (k, (a, b)) in g.iter().zip(&fd).enumerate() {
            let d = (a - b).abs();
            ensure(d <= 1e-6, || format!("instance {i} slot {k}: {a} vs {b}"))?;
            worst = worst.max(d);
        }
    }
    Ok(worst)
}

fn criterion_8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let worst = gradient_trials(&mut rng, 50, &[2, 3, 4, 5])?;
    Ok(format!("50 instances, worst component gap {worst:.1e}"))
}

fn layer_gap(file: &HamiltonianFile, max_iterations: usize) -> Result<f64, String> {
    let cfg = VqeConfig {
        layers: 2,
        max_iterations,
        ..VqeConfig::default()
    };
    let r = run_experiment_on(file, "random", None, &cfg).map_err(|e| e.to_string())?;
    let [one, two] = r.layer_energies[..] else {
        return Err(format!("layer energies {:?}", r.layer_energies));
    };
    ensure(two <= one + 1e-9, || format!("two layers {two} above one layer {one}"))?;
    Ok(one - two)
}

/// One layer from the default start, then two layers from its optimum with
/// the new slots at zero; no exact energy needed.
fn warm_layer_gap(h: &PauliSum, n_e: usize, max_iterations: usize) -> Result<f64, String> {
    let (p, d) = ordered_diagonalizers(h);
    let cfg = VqeConfig {
        max_iterations,
        ..VqeConfig::default()
    };
    let c1 = combined_codes(&p, &d, n_e, 1).map_err(|e| e.to_string())?;
    let r1 = minimize(&cfg, &c1, h).map_err(|e| e.to_string())?;
    let c2 = combined_codes(&p, &d, n_e, 2).map_err(|e| e.to_string())?;
    let mut warm = r1.params.clone();
    warm.resize(c2.n_params(), 0.0);
    let start = objective(&c2, h, &warm).map_err(|e| e.to_string())?;
    ensure((start - r1.energy).abs() < 1e-10, || format!("warm start {start} vs {}", r1.energy))?;
    let cfg2 = VqeConfig {
        warm_start: Some(warm),
        ..cfg
    };
    let r2 = minimize(&cfg2, &c2, h).map_err(|e| e.to_string())?;
    ensure(r2.energy <= r1.energy + 1e-9, || format!("two layers {} above one layer {}", r2.energy, r1.energy))?;
    Ok(r1.energy - r2.energy)
}

fn random_file(rng: &mut StdRng, n: usize, terms: usize) -> HamiltonianFile {
    HamiltonianFile {
        hamiltonian: random_hamiltonian(rng, n, terms),
        n_electrons: Some(rng.gen_range(1..=n)),
        molecule: None,
        geometry: None,
    }
}

fn criterion_9() -> Outcome {
    let gain = layer_gap(&h2(), 100)?;
    let mut rng = StdRng::seed_from_u64(9);
    let mut improved = 0;
    for _ in 0..10 {
        if layer_gap(&random_file(&mut rng, 4, 10), 100)? > 1e-9 {
            improved += 1;
        }
    }
    Ok(format!("H2 gain {gain:.1e} Ha; 10/10 random hold, {improved} strictly improve"))
}

fn criterion_10() -> Outcome {
    let f = h2();
    let h = &f.hamiltonian;
    let v = vha(h, 2, 1).map_err(|e| e.to_string())?;
    let vc = compile_and_count(&v).map_err(|e| e.to_string())?;
    ensure(v.n_params() == 14, || format!("VHA has {} parameters", v.n_params()))?;
    let cfg = VqeConfig {
        max_iterations: 1,
        ..VqeConfig::default()
    };
    let r = run_experiment_on(&f, "H2", None, &cfg).map_err(|e| e.to_string())?;
    ensure(r.params == 3 * 4 * 2, || format!("CCA has {} parameters", r.params))?;
    ensure(r.param_convention.as_deref() == Some("3nm"), || {
        format!("convention {:?}", r.param_convention)
    })?;
    Ok(format!(
        "VHA 14 params / {} CNOTs; CCA {} params (3nm) / {} CNOTs",
        vc.two_qubit, r.params, r.counts.two_qubit
    ))
}

fn criterion_11() -> Outcome {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(11);
    for n in [6, 8, 10, 12] {
        // 2: random commuting sets
        for _ in 0..5 {
            let set = random_commuting_set(&mut rng, n, 2 * n);
            let u = diagonalize_terms(&set).map_err(|e| format!("n={n}: {e}"))?;
            check_diagonalizer(&set, &u).map_err(|e| format!("n={n}: {e}"))?;
        }
        // 3: stabilization on random Hamiltonians
        let h = random_hamiltonian(&mut rng, n, 4 * n);
        let (p, d) = ordered_diagonalizers(&h);
        check_stabilized(&p, &d, rng.gen_range(1..=n)).map_err(|e| format!("n={n}: {e}"))?;
        // 7: fast path
        fastpath_trials(&mut rng, 8, &[n]).map_err(|e| format!("n={n}: {e}"))?;
        // 8: gradients
        gradient_trials(&mut rng, 4, &[n]).map_err(|e| format!("n={n}: {e}"))?;
        // 9: layer monotonicity, fewer iterations at the larger sizes
        let iters = if n >= 10 { 5 } else { 20 };
        let h = random_hamiltonian(&mut rng, n, 2 * n);
        warm_layer_gap(&h, rng.gen_range(1..=n), iters).map_err(|e| format!("n={n}: {e}"))?;
    }
    Ok(format!("criteria 2, 3, 7, 8, 9 on 6 to 12 qubits, {:.1}s", t.elapsed().as_secs_f64()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("H2 partition fidelity", criterion_1),
        ("diagonalization contract", criterion_2),
        ("stabilization property", criterion_3),
        ("reference state reproduction", criterion_4),
        ("chemical accuracy on H2", criterion_5),
        ("single code vs HF", criterion_6),
        ("fast path equivalence", criterion_7),
        ("gradient correctness", criterion_8),
        ("layer monotonicity", criterion_9),
        ("parameter counts", criterion_10),
        ("random Hamiltonians up to 12 qubits", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
