//! Parameterized circuits and the ansatz builders.
//!
//! Rotations follow `g(θ) = exp(-iθG)` with no factor ½. Gate lists are in
//! acting order, so the operator product `A·B` as written appears as `B`
//! then `A`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::clifford::{check_electrons, conjugate_by_circuit, CliffordCircuit, CliffordGate};
use crate::error::{Error, Result};
use crate::grouping::Partition;
use crate::pauli::{parse_pauli, Pauli, PauliString, PauliSum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Clifford(CliffordGate),
    /// `exp(∓iθσ)` on one qubit; `negate` selects the lower sign.
    Rotation {
        axis: Axis,
        qubit: usize,
        slot: usize,
        negate: bool,
    },
    /// `exp(-iθP)`; a `-1` phase on `generator` is honoured.
    PauliExp { generator: PauliString, slot: usize },
}

impl Gate {
    pub fn slot(&self) -> Option<usize> {
        match self {
            Gate::Clifford(_) => None,
            Gate::Rotation { slot, .. } | Gate::PauliExp { slot, .. } => Some(*slot),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Clifford(g) => write!(f, "{g}"),
            Gate::Rotation {
                axis,
                qubit,
                slot,
                negate,
            } => {
                let name = match axis {
                    Axis::X => "RX",
                    Axis::Y => "RY",
                    Axis::Z => "RZ",
                };
                write!(f, "{name} {qubit} slot={slot}")?;
                if *negate {
                    write!(f, " neg")?;
                }
                Ok(())
            }
            Gate::PauliExp { generator, slot } => write!(f, "PEXP {generator} slot={slot}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzKind {
    HartreeFock,
    Rotations,
    SingleCode,
    CombinedCodes,
    Vha,
    VhaGrouped,
    Compiled,
    Custom,
}

/// What the Clifford fast path needs to evaluate a single-code circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleCodeForm {
    pub diagonalizer: CliffordCircuit,
    pub n_electrons: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamCircuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
    pub kind: AnsatzKind,
    pub layers: usize,
    single_code: Option<SingleCodeForm>,
}

impl ParamCircuit {
    /// Validates indices and that slots `0..n_params` are each used.
    pub fn new(n_qubits: usize, gates: Vec<Gate>, kind: AnsatzKind, layers: usize) -> Result<Self> {
        let mut used: Vec<bool> = Vec::new();
        for g in &gates {
            match g {
                Gate::Clifford(c) => {
                    CliffordCircuit::from_gates(n_qubits, vec![*c])?;
                }
                Gate::Rotation { qubit, .. } if *qubit >= n_qubits => {
                    return Err(Error::Config(format!("rotation on qubit {qubit} of {n_qubits}")));
                }
                Gate::PauliExp { generator, .. } if generator.n_qubits() != n_qubits => {
                    return Err(Error::SizeMismatch {
                        left: n_qubits,
                        right: generator.n_qubits(),
                    });
                }
                _ => {}
            }
            if let Some(s) = g.slot() {
                if used.len() <= s {
                    used.resize(s + 1, false);
                }
                used[s] = true;
            }
        }
        if let Some(s) = used.iter().position(|u| !u) {
            return Err(Error::Config(format!("parameter slot {s} is never used")));
        }
        Ok(Self {
            n_qubits,
            gates,
            n_params: used.len(),
            kind,
            layers,
            single_code: None,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn single_code_form(&self) -> Option<&SingleCodeForm> {
        self.single_code.as_ref()
    }

    /// One gate per line, `RX 2 slot=7`, `PEXP Z0 Z1 slot=3`, `CNOT 0 1`.
    pub fn to_text(&self) -> String {
        self.gates.iter().map(|g| format!("{g}\n")).collect()
    }

    /// Inverse of [`ParamCircuit::to_text`].
    pub fn parse(text: &str, n_qubits: usize) -> Result<Self> {
        let mut gates = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Parse {
                line: i + 1,
                msg: format!("{msg}: `{line}`"),
            };
            let head = line.split_whitespace().next().unwrap_or_default();
            let slot_of = |tok: &str| -> Result<usize> {
                tok.strip_prefix("slot=")
                    .ok_or_else(|| err("missing slot"))?
                    .parse()
                    .map_err(|_| err("bad slot"))
            };
            match head {
                "RX" | "RY" | "RZ" => {
                    let toks: Vec<&str> = line.split_whitespace().collect();
                    if !(3..=4).contains(&toks.len()) || (toks.len() == 4 && toks[3] != "neg") {
                        return Err(err("expected `R? <qubit> slot=<k> [neg]`"));
                    }
                    let axis = match head {
                        "RX" => Axis::X,
                        "RY" => Axis::Y,
                        _ => Axis::Z,
                    };
                    gates.push(Gate::Rotation {
                        axis,
                        qubit: toks[1].parse().map_err(|_| err("bad qubit"))?,
                        slot: slot_of(toks[2])?,
                        negate: toks.len() == 4,
                    });
                }
                "PEXP" => {
                    let body = line["PEXP".len()..].trim();
                    let (pauli, slot) = body.rsplit_once(char::is_whitespace).ok_or_else(|| err("missing slot"))?;
                    let (negative, pauli) = match pauli.trim().strip_prefix('-') {
                        Some(rest) => (true, rest),
                        None => (false, pauli.trim()),
                    };
                    let mut generator = parse_pauli(pauli, n_qubits).map_err(|e| err(&e.to_string()))?;
                    if negative {
                        generator = generator.with_phase(2);
                    }
                    gates.push(Gate::PauliExp {
                        generator,
                        slot: slot_of(slot)?,
                    });
                }
                _ => {
                    let c = CliffordCircuit::parse(line, n_qubits).map_err(|e| err(&e.to_string()))?;
                    gates.push(Gate::Clifford(c.gates()[0]));
                }
            }
        }
        Self::new(n_qubits, gates, AnsatzKind::Custom, 1)
    }
}

struct Builder {
    n_qubits: usize,
    gates: Vec<Gate>,
    next_slot: usize,
}

impl Builder {
    fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
            next_slot: 0,
        }
    }

    fn clifford(&mut self, c: &CliffordCircuit) {
        self.gates.extend(c.gates().iter().copied().map(Gate::Clifford));
    }

    fn hartree_fock(&mut self, n_electrons: usize) {
        for q in 0..n_electrons {
            self.gates.push(Gate::Clifford(CliffordGate::X(q)));
        }
    }

    /// `⊗_j Rx Ry Rz`: per qubit, Rz acts first. Slots are (z, y, x) per qubit.
    fn rotations(&mut self) {
        for q in 0..self.n_qubits {
            for axis in [Axis::Z, Axis::Y, Axis::X] {
                let slot = self.fresh();
                self.gates.push(Gate::Rotation {
                    axis,
                    qubit: q,
                    slot,
                    negate: false,
                });
            }
        }
    }

    fn pauli_exp(&mut self, generator: PauliString) {
        let slot = self.fresh();
        self.gates.push(Gate::PauliExp { generator, slot });
    }

    fn fresh(&mut self) -> usize {
        self.next_slot += 1;
        self.next_slot - 1
    }

    fn finish(self, kind: AnsatzKind, layers: usize) -> Result<ParamCircuit> {
        ParamCircuit::new(self.n_qubits, self.gates, kind, layers)
    }
}

/// `X` on qubits `0..n_e`.
pub fn hf_circuit(n_qubits: usize, n_electrons: usize) -> Result<ParamCircuit> {
    check_electrons(n_qubits, n_electrons)?;
    let mut b = Builder::new(n_qubits);
    b.hartree_fock(n_electrons);
    b.finish(AnsatzKind::HartreeFock, 0)
}

/// One general rotation per qubit, `3n` slots.
pub fn rotation_layer(n_qubits: usize) -> ParamCircuit {
    let mut b = Builder::new(n_qubits);
    b.rotations();
    b.finish(AnsatzKind::Rotations, 1)
        .expect("rotation layer is well formed")
}

/// `U† R(θ) |HF⟩`.
pub fn single_code(u: &CliffordCircuit, n_electrons: usize) -> Result<ParamCircuit> {
    let n = u.n_qubits();
    check_electrons(n, n_electrons)?;
    let mut b = Builder::new(n);
    b.hartree_fock(n_electrons);
    b.rotations();
    b.clifford(&u.inverse());
    let mut c = b.finish(AnsatzKind::SingleCode, 1)?;
    c.single_code = Some(SingleCodeForm {
        diagonalizer: u.clone(),
        n_electrons,
    });
    Ok(c)
}

fn check_aligned(p: &Partition, diagonalizers: &[CliffordCircuit]) -> Result<usize> {
    if p.groups.is_empty() {
        return Err(Error::Empty);
    }
    if p.groups.len() != diagonalizers.len() {
        return Err(Error::Misaligned {
            groups: p.groups.len(),
            diagonalizers: diagonalizers.len(),
        });
    }
    let n = p.n_qubits();
    if let Some(d) = diagonalizers.iter().find(|d| d.n_qubits() != n) {
        return Err(Error::SizeMismatch {
            left: n,
            right: d.n_qubits(),
        });
    }
    Ok(n)
}

fn check_layers(layers: usize) -> Result<()> {
    if layers == 0 {
        return Err(Error::Config("layers must be at least 1".into()));
    }
    Ok(())
}

/// `∏_i U_i† R_i U_i |HF⟩` repeated `layers` times, first group of `p`
/// acting first. Slots are layer-major, so a deeper circuit starts with the
/// slots of a shallower one.
pub fn combined_codes(
    p: &Partition,
    diagonalizers: &[CliffordCircuit],
    n_electrons: usize,
    layers: usize,
) -> Result<ParamCircuit> {
    let n = check_aligned(p, diagonalizers)?;
    check_electrons(n, n_electrons)?;
    check_layers(layers)?;
    let mut b = Builder::new(n);
    b.hartree_fock(n_electrons);
    for _ in 0..layers {
        for u in diagonalizers {
            b.clifford(u);
            b.rotations();
            b.clifford(&u.inverse());
        }
    }
    b.finish(AnsatzKind::CombinedCodes, layers)
}

/// First-order Trotterized `∏_k exp(-iθ_k P_k)` over the non-identity terms
/// in file order.
pub fn vha(h: &PauliSum, n_electrons: usize, layers: usize) -> Result<ParamCircuit> {
    let n = h.n_qubits();
    check_electrons(n, n_electrons)?;
    check_layers(layers)?;
    let gens: Vec<PauliString> = h
        .terms()
        .iter()
        .filter(|t| !t.string.is_identity())
        .map(|t| t.string)
        .collect();
    if gens.is_empty() {
        return Err(Error::IdentityOnly);
    }
    let mut b = Builder::new(n);
    b.hartree_fock(n_electrons);
    for _ in 0..layers {
        for g in &gens {
            b.pauli_exp(*g);
        }
    }
    b.finish(AnsatzKind::Vha, layers)
}

/// `∏_k U_k† (∏_l exp(-iθ_kl D_kl)) U_k` with `D_kl = U_k P_kl U_k†`.
pub fn vha_grouped(
    p: &Partition,
    diagonalizers: &[CliffordCircuit],
    n_electrons: usize,
    layers: usize,
) -> Result<ParamCircuit> {
    let n = check_aligned(p, diagonalizers)?;
    check_electrons(n, n_electrons)?;
    check_layers(layers)?;
    let mut blocks = Vec::new();
    for (g, u) in p.groups.iter().zip(diagonalizers) {
        let mut diag = Vec::new();
        for t in g.terms.terms().iter().filter(|t| !t.string.is_identity()) {
            let d = conjugate_by_circuit(&t.string, u)?;
            if !d.is_diagonal() {
                return Err(Error::NotDiagonalizing(t.string.to_string()));
            }
            diag.push(d);
        }
        if !diag.is_empty() {
            blocks.push((u, diag));
        }
    }
    if blocks.is_empty() {
        return Err(Error::IdentityOnly);
    }
    let mut b = Builder::new(n);
    b.hartree_fock(n_electrons);
    for _ in 0..layers {
        for (u, diag) in &blocks {
            b.clifford(u);
            for d in diag {
                b.pauli_exp(*d);
            }
            b.clifford(&u.inverse());
        }
    }
    b.finish(AnsatzKind::VhaGrouped, layers)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub two_qubit: usize,
    pub single_qubit: usize,
    pub parameters: usize,
}

/// Rewrite every Pauli exponential as basis change, CNOT ladder, `RZ`, and
/// the mirror image. A weight-`w` exponential costs `2(w-1)` CNOTs.
pub fn compile(c: &ParamCircuit) -> Result<ParamCircuit> {
    let mut gates = Vec::with_capacity(c.gates.len());
    for g in &c.gates {
        let Gate::PauliExp { generator, slot } = g else {
            gates.push(g.clone());
            continue;
        };
        let support = generator.support();
        let Some(&last) = support.last() else {
            // identity generator: global phase only
            continue;
        };
        let negate = generator.sign().ok_or(Error::NonHermitian(1.0))? < 0.0;
        let mut basis = Vec::new();
        for &q in &support {
            match generator.get(q) {
                Pauli::X => basis.push(CliffordGate::H(q)),
                Pauli::Y => {
                    basis.push(CliffordGate::Sdg(q));
                    basis.push(CliffordGate::H(q));
                }
                _ => {}
            }
        }
        let ladder: Vec<CliffordGate> = support
            .windows(2)
            .map(|w| CliffordGate::Cnot {
                control: w[0],
                target: w[1],
            })
            .collect();
        let undo = |v: &[CliffordGate]| v.iter().rev().map(CliffordGate::inverse).map(Gate::Clifford).collect::<Vec<_>>();
        gates.extend(basis.iter().copied().map(Gate::Clifford));
        gates.extend(ladder.iter().copied().map(Gate::Clifford));
        gates.push(Gate::Rotation {
            axis: Axis::Z,
            qubit: last,
            slot: *slot,
            negate,
        });
        gates.extend(undo(&ladder));
        gates.extend(undo(&basis));
    }
    ParamCircuit::new(c.n_qubits, gates, AnsatzKind::Compiled, c.layers)
}

pub fn compile_and_count(c: &ParamCircuit) -> Result<GateCounts> {
    let compiled = compile(c)?;
    let mut counts = GateCounts {
        parameters: c.n_params(),
        ..GateCounts::default()
    };
    for g in compiled.gates() {
        match g {
            Gate::Clifford(cg) if cg.is_two_qubit() => counts.two_qubit += 1,
            _ => counts.single_qubit += 1,
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hf_gates() {
        let c = hf_circuit(4, 2).unwrap();
        assert_eq!(c.to_text(), "X 0\nX 1\n");
        assert_eq!(c.n_params(), 0);
        assert_eq!(hf_circuit(4, 4).unwrap().gates().len(), 4);
        assert!(hf_circuit(4, 0).is_err());
        assert!(hf_circuit(4, 5).is_err());
    }

    #[test]
    fn rotation_layer_layout() {
        let c = rotation_layer(4);
        assert_eq!(c.gates().len(), 12);
        assert_eq!(c.n_params(), 12);
        assert_eq!(c.gates()[0].to_string(), "RZ 0 slot=0");
        assert_eq!(c.gates()[1].to_string(), "RY 0 slot=1");
        assert_eq!(c.gates()[2].to_string(), "RX 0 slot=2");
        assert_eq!(c.gates()[3].to_string(), "RZ 1 slot=3");
    }

    #[test]
    fn single_pauli_exp_counts() {
        let h = PauliSum::from_pairs(2, &[(1.0, "Z0 Z1")]).unwrap();
        let c = vha(&h, 1, 1).unwrap();
        let counts = compile_and_count(&c).unwrap();
        assert_eq!(counts.two_qubit, 2);
        assert_eq!(counts.parameters, 1);
        // X for HF plus one RZ
        assert_eq!(counts.single_qubit, 2);
    }

    #[test]
    fn rotation_layer_has_no_two_qubit_gates() {
        let counts = compile_and_count(&rotation_layer(5)).unwrap();
        assert_eq!(counts.two_qubit, 0);
        assert_eq!(counts.single_qubit, 15);
    }

    #[test]
    fn identity_only_vha_rejected() {
        let h = PauliSum::from_pairs(2, &[(1.0, "I")]).unwrap();
        assert!(matches!(vha(&h, 1, 1), Err(Error::IdentityOnly)));
    }

    #[test]
    fn unused_slot_rejected() {
        let g = vec![Gate::Rotation {
            axis: Axis::X,
            qubit: 0,
            slot: 1,
            negate: false,
        }];
        assert!(ParamCircuit::new(1, g, AnsatzKind::Custom, 1).is_err());
    }

    #[test]
    fn text_round_trip() {
        let text = "X 0\nRX 1 slot=0\nPEXP -Z0 Y1 slot=1\nCNOT 0 1\nRZ 0 slot=2 neg\n";
        let c = ParamCircuit::parse(text, 2).unwrap();
        assert_eq!(c.n_params(), 3);
        assert_eq!(c.to_text(), text);
        assert!(ParamCircuit::parse("RX 0 slot=x\n", 1).is_err());
        assert!(ParamCircuit::parse("PEXP Z3 slot=0\n", 2).is_err());
    }
}
