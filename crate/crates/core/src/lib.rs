//! Commuting-group variational Hamiltonian ansatz.
//!
//! A qubit Hamiltonian is split into mutually commuting groups, each group
//! gets a Clifford circuit that diagonalizes it, and those circuits are
//! combined with layers of single-qubit rotations into variational circuits
//! whose energies are minimized with BFGS on a dense statevector simulator.
//!
//! ```
//! use codespace_core::prelude::*;
//!
//! let h = PauliSum::from_pairs(2, &[(-0.5, "I"), (0.3, "Z0"), (0.2, "X0 X1"), (0.2, "Y0 Y1")]).unwrap();
//! let groups = order_groups(&partition(&h).unwrap());
//! let diags: Vec<_> = groups.groups.iter().map(|g| diagonalize_group(g).unwrap()).collect();
//! let circuit = combined_codes(&groups, &diags, 1, 1).unwrap();
//! let result = minimize(&VqeConfig::default(), &circuit, &h).unwrap();
//! let (exact, _) = ground_energy(&h).unwrap();
//! assert!(result.energy >= exact - 1e-9);
//! ```

pub mod circuit;
pub mod clifford;
pub mod error;
pub mod grouping;
pub mod oracle;
pub mod pauli;
pub mod random;
pub mod simulator;
pub mod vqe;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::circuit::{
        combined_codes, compile, compile_and_count, hf_circuit, rotation_layer, single_code, vha, vha_grouped,
        AnsatzKind, Axis, Gate, GateCounts, ParamCircuit,
    };
    pub use crate::clifford::{
        conjugate_by_circuit, diagonalize_group, diagonalize_terms, sign_assignment, stabilizer_state,
        CliffordCircuit, CliffordGate, SignedStabilizerGroup, Tableau,
    };
    pub use crate::error::{Error, Result};
    pub use crate::grouping::{extract_z_group, order_groups, partition, CommutingGroup, Partition};
    pub use crate::oracle::{ground_energy, hf_energy, to_matrix, DenseOperator};
    pub use crate::pauli::{one_norm, parse_pauli, HamiltonianFile, Pauli, PauliString, PauliSum, PauliTerm};
    pub use crate::simulator::{fastpath_expectation, run, State};
    pub use crate::vqe::{
        gradient, minimize, objective, run_experiment, run_experiment_on, AnsatzChoice, ExperimentReport,
        VqeConfig, VqeResult,
    };
}
