//! Clifford circuits, Pauli conjugation, simultaneous diagonalization of a
//! commuting group, and the signed stabilizer groups built from it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grouping::CommutingGroup;
use crate::pauli::{PauliString, PauliSum};
use crate::simulator::State;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
}

impl CliffordGate {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            CliffordGate::H(q) | CliffordGate::S(q) | CliffordGate::Sdg(q) | CliffordGate::X(q) => (q, None),
            CliffordGate::Cnot { control, target } => (target, Some(control)),
            CliffordGate::Cz(a, b) => (b, Some(a)),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits().1.is_some()
    }

    pub fn inverse(&self) -> Self {
        match *self {
            CliffordGate::S(q) => CliffordGate::Sdg(q),
            CliffordGate::Sdg(q) => CliffordGate::S(q),
            g => g,
        }
    }

    fn check(&self, n_qubits: usize) -> Result<()> {
        let (t, c) = self.qubits();
        let bad = t >= n_qubits || c.is_some_and(|c| c >= n_qubits || c == t);
        if bad {
            return Err(Error::Config(format!(
                "gate `{self}` invalid on {n_qubits} qubits"
            )));
        }
        Ok(())
    }

    /// In-place `p -> G p G†`.
    pub fn conjugate(&self, p: &mut PauliString) {
        let x = p.x_mask();
        let z = p.z_mask();
        let bit = |m: u64, q: usize| m >> q & 1 == 1;
        let (mut nx, mut nz) = (x, z);
        let flip;
        match *self {
            CliffordGate::H(q) => {
                let (xq, zq) = (bit(x, q), bit(z, q));
                flip = xq && zq;
                nx = set(nx, q, zq);
                nz = set(nz, q, xq);
            }
            CliffordGate::S(q) => {
                let (xq, zq) = (bit(x, q), bit(z, q));
                flip = xq && zq;
                nz = set(nz, q, zq ^ xq);
            }
            CliffordGate::Sdg(q) => {
                let (xq, zq) = (bit(x, q), bit(z, q));
                flip = xq && !zq;
                nz = set(nz, q, zq ^ xq);
            }
            CliffordGate::X(q) => {
                flip = bit(z, q);
            }
            CliffordGate::Cnot { control, target } => {
                let (xc, zc, xt, zt) = (bit(x, control), bit(z, control), bit(x, target), bit(z, target));
                flip = xc && zt && !(xt ^ zc);
                nx = set(nx, target, xt ^ xc);
                nz = set(nz, control, zc ^ zt);
            }
            CliffordGate::Cz(a, b) => {
                let (xa, za, xb, zb) = (bit(x, a), bit(z, a), bit(x, b), bit(z, b));
                flip = xa && xb && (za ^ zb);
                nz = set(nz, a, za ^ xb);
                nz = set(nz, b, zb ^ xa);
            }
        }
        p.set_masks(nx, nz);
        if flip {
            p.negate();
        }
    }
}

fn set(m: u64, q: usize, v: bool) -> u64 {
    if v {
        m | 1 << q
    } else {
        m & !(1 << q)
    }
}

impl fmt::Display for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CliffordGate::H(q) => write!(f, "H {q}"),
            CliffordGate::S(q) => write!(f, "S {q}"),
            CliffordGate::Sdg(q) => write!(f, "SDG {q}"),
            CliffordGate::X(q) => write!(f, "X {q}"),
            CliffordGate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            CliffordGate::Cz(a, b) => write!(f, "CZ {a} {b}"),
        }
    }
}

/// Gate list in acting order: `gates[0]` is applied first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordCircuit {
    n_qubits: usize,
    gates: Vec<CliffordGate>,
}

impl CliffordCircuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<CliffordGate>) -> Result<Self> {
        let mut c = Self::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, g: CliffordGate) -> Result<()> {
        g.check(self.n_qubits)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[CliffordGate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    pub fn inverse(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(CliffordGate::inverse).collect(),
        }
    }

    /// Line-per-gate text: `H 2`, `CNOT 0 1`, `S 3`. `#` comments allowed.
    pub fn parse(text: &str, n_qubits: usize) -> Result<Self> {
        let mut c = Self::new(n_qubits);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Parse {
                line: i + 1,
                msg: format!("{msg}: `{line}`"),
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let idx = |k: usize| -> Result<usize> {
                toks.get(k)
                    .ok_or_else(|| err("missing qubit index"))?
                    .parse()
                    .map_err(|_| err("bad qubit index"))
            };
            let arity = match toks[0].to_ascii_uppercase().as_str() {
                "CNOT" | "CX" | "CZ" => 3,
                _ => 2,
            };
            if toks.len() != arity {
                return Err(err("wrong operand count"));
            }
            let g = match toks[0].to_ascii_uppercase().as_str() {
                "H" => CliffordGate::H(idx(1)?),
                "S" => CliffordGate::S(idx(1)?),
                "SDG" => CliffordGate::Sdg(idx(1)?),
                "X" => CliffordGate::X(idx(1)?),
                "CNOT" | "CX" => CliffordGate::Cnot {
                    control: idx(1)?,
                    target: idx(2)?,
                },
                "CZ" => CliffordGate::Cz(idx(1)?, idx(2)?),
                _ => return Err(err("unknown gate")),
            };
            c.push(g).map_err(|e| err(&e.to_string()))?;
        }
        Ok(c)
    }

    pub fn to_text(&self) -> String {
        self.gates.iter().map(|g| format!("{g}\n")).collect()
    }
}

/// `U P U†` where `U` is the circuit's unitary.
pub fn conjugate_by_circuit(p: &PauliString, c: &CliffordCircuit) -> Result<PauliString> {
    if p.n_qubits() != c.n_qubits() {
        return Err(Error::SizeMismatch {
            left: p.n_qubits(),
            right: c.n_qubits(),
        });
    }
    let mut out = *p;
    for g in &c.gates {
        g.conjugate(&mut out);
    }
    Ok(out)
}

/// Independent commuting generators of a group, one Pauli string per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n_qubits: usize,
    rows: Vec<PauliString>,
}

fn symplectic_vec(p: &PauliString) -> u128 {
    p.x_mask() as u128 | (p.z_mask() as u128) << 64
}

impl Tableau {
    /// GF(2) row reduction picks an independent generating subset of the terms.
    pub fn from_terms(terms: &PauliSum) -> Result<Self> {
        let ts = terms.terms();
        for (i, a) in ts.iter().enumerate() {
            for b in &ts[i + 1..] {
                if !a.string.commutes_unchecked(&b.string) {
                    return Err(Error::NotCommuting(a.string.to_string(), b.string.to_string()));
                }
            }
        }
        // basis vectors keyed by their leading bit
        let mut basis: Vec<u128> = Vec::new();
        let mut rows = Vec::new();
        for t in ts {
            let mut v = symplectic_vec(&t.string);
            for &b in &basis {
                let lead = 127 - b.leading_zeros();
                if v >> lead & 1 == 1 {
                    v ^= b;
                }
            }
            if v != 0 {
                // keep basis sorted by descending leading bit so one pass reduces
                basis.push(v);
                basis.sort_by_key(|b| std::cmp::Reverse(127 - b.leading_zeros()));
                rows.push(t.string);
            }
        }
        Ok(Self {
            n_qubits: terms.n_qubits(),
            rows,
        })
    }

    pub fn rows(&self) -> &[PauliString] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn apply(&mut self, g: CliffordGate, out: &mut CliffordCircuit) {
        for r in &mut self.rows {
            g.conjugate(r);
        }
        out.gates.push(g);
    }

    fn row_mul(&mut self, dst: usize, src: usize) {
        let prod = self.rows[dst]
            .multiply(&self.rows[src])
            .expect("rows share a qubit count");
        self.rows[dst] = prod;
    }

    /// Row-reduce the X block over `0..rows.len()` restricted to `cols`;
    /// returns `(row, pivot column)` pairs. Rows not listed end with zero X on `cols`.
    fn reduce_x(&mut self, cols: u64) -> Vec<(usize, usize)> {
        let k = self.rows.len();
        let mut pivots = Vec::new();
        let mut done = vec![false; k];
        for c in 0..self.n_qubits {
            if cols >> c & 1 == 0 {
                continue;
            }
            let Some(r) = (0..k).find(|&r| !done[r] && self.rows[r].x_mask() >> c & 1 == 1) else {
                continue;
            };
            for o in 0..k {
                if o != r && self.rows[o].x_mask() >> c & 1 == 1 {
                    self.row_mul(o, r);
                }
            }
            done[r] = true;
            pivots.push((r, c));
        }
        pivots
    }

    /// Clifford `U` with `U g U†` diagonal for every generator `g`.
    pub fn diagonalizer(&self) -> CliffordCircuit {
        let n = self.n_qubits;
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut t = self.clone();
        let mut circ = CliffordCircuit::new(n);
        let k = t.rows.len();

        // Bring the X block to full rank: rows left with no X are Z-only,
        // and their Z support outside the X-pivot columns is moved into X by H.
        let pivots = t.reduce_x(all);
        if pivots.len() < k {
            let pivot_cols = pivots.iter().fold(0u64, |m, &(_, c)| m | 1 << c);
            let zrows: Vec<usize> = (0..k).filter(|r| !pivots.iter().any(|p| p.0 == *r)).collect();
            let free = all & !pivot_cols;
            let mut hcols = Vec::new();
            // row reduce the Z-only rows on the free columns
            let mut done = vec![false; zrows.len()];
            for c in 0..n {
                if free >> c & 1 == 0 {
                    continue;
                }
                let Some(i) = (0..zrows.len()).find(|&i| !done[i] && t.rows[zrows[i]].z_mask() >> c & 1 == 1) else {
                    continue;
                };
                for j in 0..zrows.len() {
                    if j != i && t.rows[zrows[j]].z_mask() >> c & 1 == 1 {
                        t.row_mul(zrows[j], zrows[i]);
                    }
                }
                done[i] = true;
                hcols.push(c);
            }
            for c in hcols {
                t.apply(CliffordGate::H(c), &mut circ);
            }
        }

        // X block -> unit vectors on pivot columns.
        let pivots = t.reduce_x(all);
        debug_assert_eq!(pivots.len(), k);
        for &(r, q) in &pivots {
            let extra = t.rows[r].x_mask() & !(1 << q);
            for c in 0..n {
                if extra >> c & 1 == 1 {
                    t.apply(CliffordGate::Cnot { control: q, target: c }, &mut circ);
                }
            }
        }

        // Clear Z on the pivot rows.
        for (i, &(r, q)) in pivots.iter().enumerate() {
            if t.rows[r].z_mask() >> q & 1 == 1 {
                t.apply(CliffordGate::S(q), &mut circ);
            }
            for &(_, q2) in &pivots[i + 1..] {
                if t.rows[r].z_mask() >> q2 & 1 == 1 {
                    t.apply(CliffordGate::Cz(q, q2), &mut circ);
                }
            }
            for c in 0..n {
                let is_pivot = pivots.iter().any(|p| p.1 == c);
                if !is_pivot && t.rows[r].z_mask() >> c & 1 == 1 {
                    t.apply(CliffordGate::Cz(q, c), &mut circ);
                }
            }
        }

        for &(_, q) in &pivots {
            t.apply(CliffordGate::H(q), &mut circ);
        }
        debug_assert!(t.rows.iter().all(PauliString::is_diagonal));
        circ
    }
}

fn check_diagonalizes(terms: &PauliSum, u: &CliffordCircuit) -> Result<Vec<PauliString>> {
    terms
        .terms()
        .iter()
        .map(|t| {
            let img = conjugate_by_circuit(&t.string, u)?;
            if !img.is_diagonal() || img.sign().is_none() {
                return Err(Error::NotDiagonalizing(t.string.to_string()));
            }
            Ok(img)
        })
        .collect()
}

/// Synthesize a Clifford that maps every term of the group to a Z/I string.
pub fn diagonalize_group(g: &CommutingGroup) -> Result<CliffordCircuit> {
    diagonalize_terms(&g.terms)
}

pub fn diagonalize_terms(terms: &PauliSum) -> Result<CliffordCircuit> {
    if terms.terms().iter().all(|t| t.string.is_diagonal()) {
        return Ok(CliffordCircuit::new(terms.n_qubits()));
    }
    let u = Tableau::from_terms(terms)?.diagonalizer();
    check_diagonalizes(terms, &u)?;
    Ok(u)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignedStabilizerGroup {
    pub group_index: usize,
    /// `±P` for each term `P` of the group, in group order.
    pub elements: Vec<PauliString>,
    pub n_electrons: usize,
}

pub(crate) fn check_electrons(n_qubits: usize, n_electrons: usize) -> Result<()> {
    if n_electrons == 0 || n_electrons > n_qubits {
        return Err(Error::Electrons {
            n_electrons,
            n_qubits,
        });
    }
    Ok(())
}

/// Mask of the occupied qubits `0..n_e` of the reference state.
pub(crate) fn hf_mask(n_electrons: usize) -> u64 {
    if n_electrons == 64 {
        u64::MAX
    } else {
        (1u64 << n_electrons) - 1
    }
}

/// Sign each term so that its diagonalized image has eigenvalue `+1` on the
/// reference state `|1…1 0…0⟩` (`n_e` ones). The sign of the conjugated image
/// takes part in the choice.
pub fn sign_assignment(
    g: &CommutingGroup,
    u: &CliffordCircuit,
    n_electrons: usize,
) -> Result<SignedStabilizerGroup> {
    check_electrons(g.n_qubits(), n_electrons)?;
    let images = check_diagonalizes(&g.terms, u)?;
    let occupied = hf_mask(n_electrons);
    let elements = g
        .terms
        .terms()
        .iter()
        .zip(images)
        .map(|(t, img)| {
            let parity = (img.z_mask() & occupied).count_ones() % 2 == 1;
            let negative = (img.phase() == 2) ^ parity;
            t.string.with_phase(if negative { 2 } else { 0 })
        })
        .collect();
    Ok(SignedStabilizerGroup {
        group_index: g.index,
        elements,
        n_electrons,
    })
}

/// `U† |HF⟩`.
pub fn stabilizer_state(u: &CliffordCircuit, n_electrons: usize) -> Result<State> {
    let mut s = State::hartree_fock(u.n_qubits(), n_electrons)?;
    for g in u.inverse().gates() {
        s.apply_clifford(g);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::parse_pauli;

    fn p(s: &str, n: usize) -> PauliString {
        parse_pauli(s, n).unwrap()
    }

    #[test]
    fn textbook_conjugations() {
        let h0 = CliffordCircuit::from_gates(1, vec![CliffordGate::H(0)]).unwrap();
        assert_eq!(conjugate_by_circuit(&p("Z0", 1), &h0).unwrap(), p("X0", 1));
        let cx = CliffordCircuit::from_gates(2, vec![CliffordGate::Cnot { control: 0, target: 1 }]).unwrap();
        assert_eq!(conjugate_by_circuit(&p("X0", 2), &cx).unwrap(), p("X0 X1", 2));
        assert_eq!(conjugate_by_circuit(&p("Z1", 2), &cx).unwrap(), p("Z0 Z1", 2));
        assert!(conjugate_by_circuit(&p("Z1", 3), &cx).is_err());
    }

    #[test]
    fn gate_validation() {
        let mut c = CliffordCircuit::new(2);
        assert!(c.push(CliffordGate::H(2)).is_err());
        assert!(c.push(CliffordGate::Cnot { control: 1, target: 1 }).is_err());
        assert!(c.push(CliffordGate::Cz(0, 1)).is_ok());
    }

    #[test]
    fn text_format() {
        let text = "H 2\nCNOT 0 1\nS 3\nSDG 1\nX 0\nCZ 2 3\n";
        let c = CliffordCircuit::parse(text, 4).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(c.to_text(), text);
        assert!(CliffordCircuit::parse("T 0", 1).is_err());
        assert!(CliffordCircuit::parse("CNOT 0", 2).is_err());
        assert!(CliffordCircuit::parse("H 5", 2).is_err());
    }

    #[test]
    fn z_only_group_has_empty_diagonalizer() {
        let h = PauliSum::from_pairs(3, &[(1.0, "Z0"), (0.5, "Z1 Z2"), (0.1, "I")]).unwrap();
        let g = CommutingGroup::new(1, h).unwrap();
        assert!(diagonalize_group(&g).unwrap().is_empty());
    }

    #[test]
    fn rejects_non_commuting() {
        let h = PauliSum::from_pairs(1, &[(1.0, "X0"), (1.0, "Y0")]).unwrap();
        assert!(matches!(diagonalize_terms(&h), Err(Error::NotCommuting(..))));
    }

    #[test]
    fn signs_on_reference_state() {
        let h = PauliSum::from_pairs(4, &[(0.17, "Z0"), (0.17, "Z2 Z3"), (-0.1, "I")]).unwrap();
        let g = CommutingGroup::new(1, h).unwrap();
        let u = CliffordCircuit::new(4);
        let s = sign_assignment(&g, &u, 2).unwrap();
        assert_eq!(s.elements[0].to_string(), "-Z0");
        assert_eq!(s.elements[1].to_string(), "Z2 Z3");
        assert_eq!(s.elements[2].to_string(), "I");
        assert!(sign_assignment(&g, &u, 0).is_err());
        assert!(sign_assignment(&g, &u, 5).is_err());
    }

    #[test]
    fn sign_assignment_rejects_wrong_circuit() {
        let h = PauliSum::from_pairs(2, &[(1.0, "X0 X1")]).unwrap();
        let g = CommutingGroup::new(2, h).unwrap();
        assert!(matches!(
            sign_assignment(&g, &CliffordCircuit::new(2), 1),
            Err(Error::NotDiagonalizing(_))
        ));
    }

    #[test]
    fn z_only_rows_are_handled() {
        // Z-only generators mixed with X-type ones.
        let h = PauliSum::from_pairs(3, &[(1.0, "X0 X1"), (1.0, "Z0 Z1"), (1.0, "Z2")]).unwrap();
        let u = diagonalize_terms(&h).unwrap();
        for t in h.terms() {
            assert!(conjugate_by_circuit(&t.string, &u).unwrap().is_diagonal());
        }
        let h = PauliSum::from_pairs(2, &[(1.0, "X0"), (1.0, "Z1")]).unwrap();
        let u = diagonalize_terms(&h).unwrap();
        for t in h.terms() {
            assert!(conjugate_by_circuit(&t.string, &u).unwrap().is_diagonal());
        }
    }

    #[test]
    fn tableau_rank() {
        let h = PauliSum::from_pairs(
            4,
            &[
                (0.0453, "Y0 X1 X2 Y3"),
                (-0.0453, "Y0 Y1 X2 X3"),
                (-0.0453, "X0 X1 Y2 Y3"),
                (0.0453, "X0 Y1 Y2 X3"),
            ],
        )
        .unwrap();
        let t = Tableau::from_terms(&h).unwrap();
        assert_eq!(t.rank(), 3);
    }
}
