//! Seeded problem instances shared by the benchmarks in `benches/`.

use codespace_core::prelude::*;
use codespace_core::random::random_hamiltonian;
use rand::rngs::StdRng;
use rand::SeedableRng;

/// A Hamiltonian with its ordered partition and diagonalizers.
pub struct Instance {
    pub hamiltonian: PauliSum,
    pub partition: Partition,
    pub diagonalizers: Vec<CliffordCircuit>,
    pub n_electrons: usize,
}

impl Instance {
    pub fn new(hamiltonian: PauliSum, n_electrons: usize) -> Self {
        let partition = order_groups(&partition(&hamiltonian).expect("non-empty"));
        let diagonalizers = partition
            .groups
            .iter()
            .map(|g| diagonalize_group(g).expect("commuting group"))
            .collect();
        Self {
            hamiltonian,
            partition,
            diagonalizers,
            n_electrons,
        }
    }

    pub fn random(seed: u64, n_qubits: usize, n_terms: usize) -> Self {
        let mut rng = StdRng::seed_from_u64(seed);
        Self::new(random_hamiltonian(&mut rng, n_qubits, n_terms), n_qubits / 2)
    }

    pub fn h2() -> Self {
        let text = include_str!("../../core/fixtures/h2.ham");
        let file: HamiltonianFile = text.parse().expect("fixture parses");
        let n_e = file.n_electrons.expect("fixture has electrons");
        Self::new(file.hamiltonian, n_e)
    }

    pub fn combined_codes(&self, layers: usize) -> ParamCircuit {
        combined_codes(&self.partition, &self.diagonalizers, self.n_electrons, layers).expect("aligned")
    }
}
