//! Seeded random instances for property tests and benchmarks.

use rand::Rng;

use crate::clifford::{conjugate_by_circuit, CliffordCircuit, CliffordGate};
use crate::pauli::{PauliString, PauliSum, PauliTerm};

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Uniform non-identity string with phase `+1`.
pub fn random_pauli<R: Rng>(rng: &mut R, n_qubits: usize) -> PauliString {
    loop {
        let x = rng.gen::<u64>() & full_mask(n_qubits);
        let z = rng.gen::<u64>() & full_mask(n_qubits);
        if x | z != 0 {
            return PauliString::from_masks(n_qubits, x, z, 0).expect("masked");
        }
    }
}

/// Non-identity Z/I string.
pub fn random_diagonal<R: Rng>(rng: &mut R, n_qubits: usize) -> PauliString {
    loop {
        let z = rng.gen::<u64>() & full_mask(n_qubits);
        if z != 0 {
            return PauliString::from_masks(n_qubits, 0, z, 0).expect("masked");
        }
    }
}

/// Identity term plus `n_terms - 1` random terms, roughly a third of them
/// diagonal, coefficients uniform in `[-1, 1]`.
pub fn random_hamiltonian<R: Rng>(rng: &mut R, n_qubits: usize, n_terms: usize) -> PauliSum {
    let mut terms = vec![PauliTerm::new(rng.gen_range(-1.0..1.0), PauliString::identity(n_qubits).expect("n > 0")).expect("finite")];
    while terms.len() < n_terms.max(1) {
        let s = if rng.gen_bool(1.0 / 3.0) {
            random_diagonal(rng, n_qubits)
        } else {
            random_pauli(rng, n_qubits)
        };
        if terms.iter().any(|t| t.string == s) {
            continue;
        }
        terms.push(PauliTerm::new(rng.gen_range(-1.0..1.0), s).expect("finite"));
    }
    PauliSum::new(n_qubits, terms).expect("consistent sizes")
}

pub fn random_clifford<R: Rng>(rng: &mut R, n_qubits: usize, n_gates: usize) -> CliffordCircuit {
    let mut c = CliffordCircuit::new(n_qubits);
    for _ in 0..n_gates {
        let q = rng.gen_range(0..n_qubits);
        let kind = if n_qubits > 1 { rng.gen_range(0..6) } else { rng.gen_range(0..4) };
        let g = match kind {
            0 => CliffordGate::H(q),
            1 => CliffordGate::S(q),
            2 => CliffordGate::Sdg(q),
            3 => CliffordGate::X(q),
            k => {
                let mut t = rng.gen_range(0..n_qubits - 1);
                if t >= q {
                    t += 1;
                }
                if k == 4 {
                    CliffordGate::Cnot { control: q, target: t }
                } else {
                    CliffordGate::Cz(q, t)
                }
            }
        };
        c.push(g).expect("indices in range");
    }
    c
}

/// Commuting set of up to `n_terms` distinct strings: random diagonal strings
/// pulled back through a random Clifford.
pub fn random_commuting_set<R: Rng>(rng: &mut R, n_qubits: usize, n_terms: usize) -> PauliSum {
    let v = random_clifford(rng, n_qubits, 6 * n_qubits);
    let back = v.inverse();
    let cap = (1usize << n_qubits.min(20)) - 1;
    let mut seen = Vec::new();
    let mut terms = Vec::new();
    while terms.len() < n_terms.min(cap) {
        let d = random_diagonal(rng, n_qubits);
        if seen.contains(&d) {
            continue;
        }
        seen.push(d);
        let p = conjugate_by_circuit(&d, &back).expect("same size");
        terms.push(PauliTerm::new(rng.gen_range(-1.0..1.0), p).expect("Hermitian image"));
    }
    PauliSum::new(n_qubits, terms).expect("consistent sizes")
}

pub fn random_params<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
}
