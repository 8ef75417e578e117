#![allow(dead_code)]

use std::path::PathBuf;

use codespace_core::prelude::*;
use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn h2() -> HamiltonianFile {
    HamiltonianFile::read(fixture("h2.ham")).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Kronecker product of 2x2 factors, qubit 0 leftmost.
pub fn dense_pauli(p: &PauliString) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for q in 0..p.n_qubits() {
        let f = match p.get(q) {
            Pauli::I => DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
            Pauli::X => DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
            Pauli::Y => DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
            Pauli::Z => DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
        };
        m = m.kronecker(&f);
    }
    let ph = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][p.phase() as usize];
    m * ph
}

pub fn dense_sum(h: &PauliSum) -> DMatrix<Complex64> {
    let dim = 1 << h.n_qubits();
    let mut m = DMatrix::zeros(dim, dim);
    for t in h.terms() {
        m += dense_pauli(&t.string) * c(t.coefficient, 0.0);
    }
    m
}

fn gate_matrix(g: &CliffordGate, n: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n;
    let bit = |q: usize| 1usize << (n - 1 - q);
    let mut m = DMatrix::zeros(dim, dim);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for b in 0..dim {
        match *g {
            CliffordGate::H(q) => {
                m[(b & !bit(q), b)] += c(r, 0.0);
                m[(b | bit(q), b)] += c(if b & bit(q) != 0 { -r } else { r }, 0.0);
            }
            CliffordGate::S(q) => m[(b, b)] = if b & bit(q) != 0 { c(0.0, 1.0) } else { c(1.0, 0.0) },
            CliffordGate::Sdg(q) => m[(b, b)] = if b & bit(q) != 0 { c(0.0, -1.0) } else { c(1.0, 0.0) },
            CliffordGate::X(q) => m[(b ^ bit(q), b)] = c(1.0, 0.0),
            CliffordGate::Cnot { control, target } => {
                let out = if b & bit(control) != 0 { b ^ bit(target) } else { b };
                m[(out, b)] = c(1.0, 0.0);
            }
            CliffordGate::Cz(a, d) => {
                m[(b, b)] = if b & bit(a) != 0 && b & bit(d) != 0 { c(-1.0, 0.0) } else { c(1.0, 0.0) }
            }
        }
    }
    m
}

/// Dense unitary of a Clifford circuit, first gate acting first.
pub fn dense_clifford(u: &CliffordCircuit) -> DMatrix<Complex64> {
    let n = u.n_qubits();
    let mut m = DMatrix::identity(1 << n, 1 << n);
    for g in u.gates() {
        m = gate_matrix(g, n) * m;
    }
    m
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Energy of a computational basis state from the diagonal terms only.
pub fn basis_energy(h: &PauliSum, label: &str) -> f64 {
    let bits: Vec<bool> = label.chars().map(|ch| ch == '1').collect();
    h.terms()
        .iter()
        .filter(|t| t.string.is_diagonal())
        .map(|t| {
            let odd = t.string.support().iter().filter(|&&q| bits[q]).count() % 2 == 1;
            if odd {
                -t.coefficient
            } else {
                t.coefficient
            }
        })
        .sum()
}

/// Central finite difference of `f` at `x` with step `h`.
pub fn finite_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|k| {
            let mut p = x.to_vec();
            p[k] = x[k] + h;
            let up = f(&p);
            p[k] = x[k] - h;
            let down = f(&p);
            (up - down) / (2.0 * h)
        })
        .collect()
}
