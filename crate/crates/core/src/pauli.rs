//! Symplectic Pauli strings, Pauli-sum Hamiltonians and the text format
//! they are read from.
//!
//! A string on `n` qubits is stored as two bit masks, bit `j` of each mask
//! describing qubit `j`, plus a power of `i`. `(x, z) = (1, 1)` denotes `Y`
//! itself (not `XZ`), so a string with phase `+1` is always Hermitian.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients below this magnitude are dropped when a sum is normalized.
pub const COEFF_CUTOFF: f64 = 1e-12;

pub const MAX_QUBITS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (false, true) => Pauli::Z,
            (true, true) => Pauli::Y,
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis times `i^phase`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
    /// Exponent of `i`, in `0..4`.
    phase: u8,
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCount(n));
    }
    Ok(())
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Result<Self> {
        check_n(n_qubits)?;
        Ok(Self {
            n_qubits,
            x: 0,
            z: 0,
            phase: 0,
        })
    }

    /// Build from raw masks; bits above `n_qubits` are rejected.
    pub fn from_masks(n_qubits: usize, x: u64, z: u64, phase: u8) -> Result<Self> {
        check_n(n_qubits)?;
        let m = mask(n_qubits);
        if x & !m != 0 || z & !m != 0 {
            return Err(Error::Pauli {
                text: format!("x={x:#x} z={z:#x}"),
                msg: format!("bits beyond qubit {}", n_qubits - 1),
            });
        }
        Ok(Self {
            n_qubits,
            x,
            z,
            phase: phase & 3,
        })
    }

    /// Single-qubit factor `p` on `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Result<Self> {
        let mut s = Self::identity(n_qubits)?;
        if qubit >= n_qubits {
            return Err(Error::Pauli {
                text: format!("{}{qubit}", p.letter()),
                msg: format!("index out of range for {n_qubits} qubits"),
            });
        }
        s.set(qubit, p);
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn x_bits(&self) -> Vec<bool> {
        (0..self.n_qubits).map(|j| self.x >> j & 1 == 1).collect()
    }

    pub fn z_bits(&self) -> Vec<bool> {
        (0..self.n_qubits).map(|j| self.z >> j & 1 == 1).collect()
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        let bit = 1u64 << qubit;
        let (x, z) = match p {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        };
        self.x = if x { self.x | bit } else { self.x & !bit };
        self.z = if z { self.z | bit } else { self.z & !bit };
    }

    pub(crate) fn set_masks(&mut self, x: u64, z: u64) {
        self.x = x;
        self.z = z;
    }

    pub(crate) fn negate(&mut self) {
        self.phase = (self.phase + 2) & 3;
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    /// `+1` or `-1` for Hermitian strings, `None` for `±i`.
    pub fn sign(&self) -> Option<f64> {
        match self.phase {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    /// Same Pauli pattern with phase `+1`.
    pub fn unsigned(&self) -> Self {
        self.with_phase(0)
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// Qubits carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        let s = self.x | self.z;
        (0..self.n_qubits).filter(|j| s >> j & 1 == 1).collect()
    }

    pub fn y_count(&self) -> usize {
        (self.x & self.z).count_ones() as usize
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Matrix product `self · other`, phase included.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        // With sigma(x, z) = i^{xz} X^x Z^z:
        //   sigma1 sigma2 = i^{x1 z1 + x2 z2} (-1)^{z1 x2} X^{x1^x2} Z^{z1^z2}
        // and X^x Z^z = i^{-xz} sigma(x, z).
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let k = (self.x & self.z).count_ones() as i64 + (other.x & other.z).count_ones() as i64
            + 2 * (self.z & other.x).count_ones() as i64
            - (x & z).count_ones() as i64
            + self.phase as i64
            + other.phase as i64;
        Ok(Self {
            n_qubits: self.n_qubits,
            x,
            z,
            phase: k.rem_euclid(4) as u8,
        })
    }

    /// Symplectic inner product; even means the operators commute.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Sort key: qubit-0-first bit pattern of x then z.
    pub(crate) fn lex_key(&self) -> (u64, u64) {
        (
            self.x.reverse_bits() >> (64 - self.n_qubits),
            self.z.reverse_bits() >> (64 - self.n_qubits),
        )
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase {
            1 => write!(f, "i")?,
            2 => write!(f, "-")?,
            3 => write!(f, "-i")?,
            _ => {}
        }
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for j in 0..self.n_qubits {
            let p = self.get(j);
            if p == Pauli::I {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}{}", p.letter(), j)?;
        }
        Ok(())
    }
}

/// Parse `"Y0 X1 X2 Y3"` or `"I"` into a phase-`+1` string.
pub fn parse_pauli(text: &str, n_qubits: usize) -> Result<PauliString> {
    let err = |msg: String| Error::Pauli {
        text: text.to_string(),
        msg,
    };
    let mut s = PauliString::identity(n_qubits)?;
    let body = text.trim_start();
    let (phase, body) = [("-i", 3), ("+i", 1), ("i", 1), ("-", 2), ("+", 0)]
        .iter()
        .find_map(|(pre, k)| body.strip_prefix(pre).map(|rest| (*k, rest)))
        .unwrap_or((0, body));
    let tokens: Vec<&str> = body.split_whitespace().collect();
    if tokens.is_empty() {
        return Err(err("empty".into()));
    }
    if tokens == ["I"] {
        return Ok(s.with_phase(phase));
    }
    let mut seen = 0u64;
    for tok in tokens {
        let mut chars = tok.chars();
        let p = match chars.next() {
            Some('X') => Pauli::X,
            Some('Y') => Pauli::Y,
            Some('Z') => Pauli::Z,
            _ => return Err(err(format!("unknown factor `{tok}`"))),
        };
        let idx: usize = chars
            .as_str()
            .parse()
            .map_err(|_| err(format!("bad qubit index in `{tok}`")))?;
        if idx >= n_qubits {
            return Err(err(format!(
                "index {idx} out of range for {n_qubits} qubits"
            )));
        }
        if seen >> idx & 1 == 1 {
            return Err(err(format!("duplicate index {idx}")));
        }
        seen |= 1 << idx;
        s.set(idx, p);
    }
    Ok(s.with_phase(phase))
}

/// A real coefficient on a phase-free string.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub string: PauliString,
}

impl PauliTerm {
    /// Folds a `-1` phase into the coefficient; rejects `±i` and non-finite values.
    pub fn new(coefficient: f64, string: PauliString) -> Result<Self> {
        if !coefficient.is_finite() {
            return Err(Error::Pauli {
                text: string.to_string(),
                msg: format!("non-finite coefficient {coefficient}"),
            });
        }
        let sign = string.sign().ok_or_else(|| Error::Pauli {
            text: string.to_string(),
            msg: "imaginary phase on a Hamiltonian term".into(),
        })?;
        Ok(Self {
            coefficient: coefficient * sign,
            string: string.unsigned(),
        })
    }
}

/// `Σ c_k P_k`. Term order follows the input; duplicates are merged at the
/// position of their first occurrence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new(n_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        check_n(n_qubits)?;
        let mut out: Vec<PauliTerm> = Vec::new();
        let mut index: HashMap<(u64, u64), usize> = HashMap::new();
        for t in terms {
            if t.string.n_qubits() != n_qubits {
                return Err(Error::SizeMismatch {
                    left: n_qubits,
                    right: t.string.n_qubits(),
                });
            }
            let t = PauliTerm::new(t.coefficient, t.string)?;
            let key = (t.string.x_mask(), t.string.z_mask());
            match index.get(&key) {
                Some(&i) => out[i].coefficient += t.coefficient,
                None => {
                    index.insert(key, out.len());
                    out.push(t);
                }
            }
        }
        out.retain(|t| t.coefficient.abs() >= COEFF_CUTOFF);
        Ok(Self {
            n_qubits,
            terms: out,
        })
    }

    pub fn empty(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, [])
    }

    /// Build from `(coefficient, pauli-text)` pairs.
    pub fn from_pairs(n_qubits: usize, pairs: &[(f64, &str)]) -> Result<Self> {
        let terms = pairs
            .iter()
            .map(|&(c, s)| PauliTerm::new(c, parse_pauli(s, n_qubits)?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n_qubits, terms)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// Coefficient of the identity term, 0 if absent.
    pub fn constant(&self) -> f64 {
        self.terms
            .iter()
            .find(|t| t.string.is_identity())
            .map_or(0.0, |t| t.coefficient)
    }

    /// One `<coefficient> <pauli-text>` line per term, no header.
    pub fn to_lines(&self) -> String {
        let mut s = String::new();
        for t in &self.terms {
            s.push_str(&format!("{} {}\n", t.coefficient, t.string));
        }
        s
    }
}

/// One-norm of a sum; free-function form.
pub fn one_norm(h: &PauliSum) -> f64 {
    h.one_norm()
}

/// A Hamiltonian file: `qubits: <n>` then `<coefficient> <pauli-text>` lines.
/// Optional `electrons:`, `molecule:` and `geometry:` headers may precede the
/// terms. Blank lines and lines starting with `#` are skipped.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianFile {
    pub hamiltonian: PauliSum,
    pub n_electrons: Option<usize>,
    pub molecule: Option<String>,
    pub geometry: Option<String>,
}

impl HamiltonianFile {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("qubits: {}\n", self.hamiltonian.n_qubits());
        if let Some(k) = self.n_electrons {
            s.push_str(&format!("electrons: {k}\n"));
        }
        if let Some(m) = &self.molecule {
            s.push_str(&format!("molecule: {m}\n"));
        }
        if let Some(g) = &self.geometry {
            s.push_str(&format!("geometry: {g}\n"));
        }
        s.push_str(&self.hamiltonian.to_lines());
        s
    }
}

fn parse_coefficient(tok: &str, line: usize) -> Result<f64> {
    if tok.contains(['j', 'J', 'i']) && !tok.to_ascii_lowercase().contains("inf") {
        return Err(Error::Parse {
            line,
            msg: format!("complex coefficient `{tok}` is not supported"),
        });
    }
    let c: f64 = tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad coefficient `{tok}`"),
    })?;
    if !c.is_finite() {
        return Err(Error::Parse {
            line,
            msg: format!("non-finite coefficient `{tok}`"),
        });
    }
    Ok(c)
}

impl FromStr for HamiltonianFile {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut n_qubits: Option<usize> = None;
        let mut n_electrons = None;
        let mut molecule = None;
        let mut geometry = None;
        let mut terms = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((key, value)) = line.split_once(':') {
                let value = value.trim();
                let bad = |what: &str| Error::Parse {
                    line: lineno,
                    msg: format!("bad {what} `{value}`"),
                };
                match key.trim() {
                    "qubits" => {
                        if n_qubits.is_some() {
                            return Err(Error::Parse {
                                line: lineno,
                                msg: "duplicate `qubits:` header".into(),
                            });
                        }
                        n_qubits = Some(value.parse().map_err(|_| bad("qubit count"))?);
                    }
                    "electrons" => n_electrons = Some(value.parse().map_err(|_| bad("electron count"))?),
                    "molecule" => molecule = Some(value.to_string()),
                    "geometry" => geometry = Some(value.to_string()),
                    other => {
                        return Err(Error::Parse {
                            line: lineno,
                            msg: format!("unknown header `{other}`"),
                        })
                    }
                }
                continue;
            }
            let n = n_qubits.ok_or(Error::Parse {
                line: lineno,
                msg: "term before `qubits:` header".into(),
            })?;
            let (coef, rest) = line.split_once(char::is_whitespace).ok_or(Error::Parse {
                line: lineno,
                msg: "expected `<coefficient> <pauli-text>`".into(),
            })?;
            let c = parse_coefficient(coef, lineno)?;
            let s = parse_pauli(rest, n).map_err(|e| Error::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
            terms.push(PauliTerm::new(c, s)?);
        }

        let n = n_qubits.ok_or(Error::Empty)?;
        if terms.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self {
            hamiltonian: PauliSum::new(n, terms)?,
            n_electrons,
            molecule,
            geometry,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> PauliString {
        parse_pauli(s, n).unwrap()
    }

    #[test]
    fn parse_examples() {
        let id = p("I", 4);
        assert!(id.is_identity());
        let s = p("Y0 X1 X2 Y3", 4);
        assert_eq!(s.x_bits(), vec![true, true, true, true]);
        assert_eq!(s.z_bits(), vec![true, false, false, true]);
        assert_eq!(s.phase(), 0);
        let s = p("Z0 Z1", 4);
        assert_eq!(s.x_bits(), vec![false; 4]);
        assert_eq!(s.z_bits(), vec![true, true, false, false]);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_pauli("Z0 Z0", 4).is_err());
        assert!(parse_pauli("Z4", 4).is_err());
        assert!(parse_pauli("W1", 4).is_err());
        assert!(parse_pauli("", 4).is_err());
        assert!(parse_pauli("Zx", 4).is_err());
        assert_eq!(parse_pauli("-Y0 X1", 4).unwrap().phase(), 2);
        assert_eq!(parse_pauli("-iI", 4).unwrap().phase(), 3);
        assert_eq!(parse_pauli("iZ3", 4).unwrap().phase(), 1);
        assert!(parse_pauli("-", 4).is_err());
    }

    #[test]
    fn single_qubit_products() {
        let x = p("X0", 1);
        let z = p("Z0", 1);
        let xx = x.multiply(&x).unwrap();
        assert!(xx.is_identity());
        assert_eq!(xx.phase(), 0);
        // ZX = iY
        let zx = z.multiply(&x).unwrap();
        assert_eq!(zx.get(0), Pauli::Y);
        assert_eq!(zx.phase(), 1);
        // XZ = -iY
        let xz = x.multiply(&z).unwrap();
        assert_eq!(xz.phase(), 3);
    }

    #[test]
    fn commutation_examples() {
        assert!(p("Z0", 4).commutes(&p("Z1", 4)).unwrap());
        assert!(!p("Z0", 4).commutes(&p("X0", 4)).unwrap());
        assert!(p("Y0 X1 X2 Y3", 4).commutes(&p("X0 X1 Y2 Y3", 4)).unwrap());
        assert!(p("Z0", 3).commutes(&p("Z0", 4)).is_err());
    }

    #[test]
    fn diagonal_examples() {
        assert!(p("Z0 Z3", 4).is_diagonal());
        assert!(!p("Y0 X1 X2 Y3", 4).is_diagonal());
        assert!(p("I", 4).is_diagonal());
    }

    #[test]
    fn one_norm_examples() {
        assert_eq!(PauliSum::empty(2).unwrap().one_norm(), 0.0);
        let g2 = PauliSum::from_pairs(
            4,
            &[
                (0.0453, "Y0 X1 X2 Y3"),
                (-0.0453, "Y0 Y1 X2 X3"),
                (-0.0453, "X0 X1 Y2 Y3"),
                (0.0453, "X0 Y1 Y2 X3"),
            ],
        )
        .unwrap();
        assert!((g2.one_norm() - 0.1812).abs() < 1e-12);
    }

    #[test]
    fn sum_dedup_and_order() {
        let h = PauliSum::from_pairs(2, &[(1.0, "Z0"), (0.5, "X1"), (2.0, "Z0"), (1e-13, "Y0")]).unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(h.terms()[0].coefficient, 3.0);
        assert_eq!(h.terms()[1].string.to_string(), "X1");
        let h = PauliSum::from_pairs(1, &[(1.0, "Z0"), (-1.0, "Z0")]).unwrap();
        assert!(h.is_empty());
    }

    #[test]
    fn negative_phase_folds_into_coefficient() {
        let s = p("X0", 1).with_phase(2);
        let t = PauliTerm::new(0.5, s).unwrap();
        assert_eq!(t.coefficient, -0.5);
        assert_eq!(t.string.phase(), 0);
        assert!(PauliTerm::new(0.5, s.with_phase(1)).is_err());
    }

    #[test]
    fn file_parse() {
        let text = "# c\nqubits: 2\nelectrons: 1\n\n0.5 I\n-1.25 Z0 X1\n";
        let f: HamiltonianFile = text.parse().unwrap();
        assert_eq!(f.n_electrons, Some(1));
        assert_eq!(f.hamiltonian.len(), 2);
        assert_eq!(f.hamiltonian.constant(), 0.5);
        let again: HamiltonianFile = f.to_text().parse().unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn file_errors() {
        assert!(matches!("".parse::<HamiltonianFile>(), Err(Error::Empty)));
        assert!(matches!("qubits: 2\n".parse::<HamiltonianFile>(), Err(Error::Empty)));
        assert!("0.5 Z0\n".parse::<HamiltonianFile>().is_err());
        assert!("qubits: 2\n0.5+1j Z0\n".parse::<HamiltonianFile>().is_err());
        assert!("qubits: 2\n(0.5,0.1) Z0\n".parse::<HamiltonianFile>().is_err());
        assert!("qubits: 2\n0.5 Z2\n".parse::<HamiltonianFile>().is_err());
        assert!("qubits: 2\nfoo: 1\n0.5 Z1\n".parse::<HamiltonianFile>().is_err());
    }
}
