//! Dense statevector simulation.
//!
//! Amplitude index bit `n-1-q` holds qubit `q`, so qubit 0 is the leftmost
//! character of a ket label such as `|1100⟩`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::circuit::{Axis, Gate, ParamCircuit};
use crate::clifford::{check_electrons, conjugate_by_circuit, hf_mask, CliffordCircuit, CliffordGate};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

/// Largest register the dense engine accepts.
pub const MAX_DENSE_QUBITS: usize = 24;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct State {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// `i^k`.
fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

impl State {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Basis state from a label like `"1100"` (qubit 0 first).
    pub fn from_label(label: &str) -> Result<Self> {
        let mut s = Self::zero(label.len())?;
        let mut idx = 0usize;
        for ch in label.chars() {
            idx <<= 1;
            match ch {
                '0' => {}
                '1' => idx |= 1,
                _ => {
                    return Err(Error::Config(format!("bad basis label `{label}`")));
                }
            }
        }
        s.amps[0] = ZERO;
        s.amps[idx] = ONE;
        Ok(s)
    }

    /// `|1…1 0…0⟩` with the first `n_electrons` qubits occupied.
    pub fn hartree_fock(n_qubits: usize, n_electrons: usize) -> Result<Self> {
        check_electrons(n_qubits, n_electrons)?;
        let label: String = (0..n_qubits)
            .map(|q| if q < n_electrons { '1' } else { '0' })
            .collect();
        Self::from_label(&label)
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << n_qubits {
            return Err(Error::Config(format!(
                "{} amplitudes for {n_qubits} qubits",
                amps.len()
            )));
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &State) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩| ≈ 1`.
    pub fn equal_up_to_phase(&self, other: &State, tol: f64) -> bool {
        (self.inner(other).norm() - 1.0).abs() <= tol
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    fn index_mask(&self, qubit_mask: u64) -> usize {
        (qubit_mask.reverse_bits() >> (64 - self.n_qubits)) as usize
    }

    pub fn apply_single(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let b = self.bit(q);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | b]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | b] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_clifford(&mut self, g: &CliffordGate) {
        match *g {
            CliffordGate::H(q) => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                self.apply_single(q, [[h, h], [h, -h]]);
            }
            CliffordGate::S(q) => self.apply_single(q, [[ONE, ZERO], [ZERO, I]]),
            CliffordGate::Sdg(q) => self.apply_single(q, [[ONE, ZERO], [ZERO, -I]]),
            CliffordGate::X(q) => {
                let b = self.bit(q);
                for i in 0..self.amps.len() {
                    if i & b == 0 {
                        self.amps.swap(i, i | b);
                    }
                }
            }
            CliffordGate::Cnot { control, target } => {
                let (c, t) = (self.bit(control), self.bit(target));
                for i in 0..self.amps.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
            CliffordGate::Cz(a, b) => {
                let m = self.bit(a) | self.bit(b);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & m == m {
                        *amp = -*amp;
                    }
                }
            }
        }
    }

    pub fn apply_clifford_circuit(&mut self, c: &CliffordCircuit) {
        for g in c.gates() {
            self.apply_clifford(g);
        }
    }

    /// `exp(-i θ σ)` on one qubit.
    pub fn apply_rotation(&mut self, axis: Axis, q: usize, theta: f64) {
        self.apply_single(q, rotation_matrix(axis, theta));
    }

    fn pauli_parts(&self, p: &PauliString) -> (usize, usize, Complex64) {
        let xm = self.index_mask(p.x_mask());
        let zm = self.index_mask(p.z_mask());
        // P = i^{phase + #Y} X^x Z^z
        let k = p.phase() as u32 + (p.x_mask() & p.z_mask()).count_ones();
        (xm, zm, i_pow(k))
    }

    /// `|ψ⟩ -> P|ψ⟩`.
    pub fn apply_pauli(&mut self, p: &PauliString) {
        let (xm, zm, ph) = self.pauli_parts(p);
        let mut out = vec![ZERO; self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            let sgn = if (b & zm).count_ones() % 2 == 1 { -ph } else { ph };
            out[b ^ xm] = sgn * a;
        }
        self.amps = out;
    }

    /// `exp(-i θ P) = cos θ − i sin θ P`, applied in place.
    pub fn apply_pauli_exp(&mut self, p: &PauliString, theta: f64) {
        let (xm, zm, ph) = self.pauli_parts(p);
        let (s, c) = theta.sin_cos();
        let coef = |b: usize| if (b & zm).count_ones() % 2 == 1 { -ph } else { ph };
        let mis = Complex64::new(0.0, -s);
        if xm == 0 {
            for (b, a) in self.amps.iter_mut().enumerate() {
                *a *= c + mis * coef(b);
            }
            return;
        }
        for b in 0..self.amps.len() {
            let bp = b ^ xm;
            if b < bp {
                let (a, d) = (self.amps[b], self.amps[bp]);
                // (P ψ)[bp] = coef(b) ψ[b], (P ψ)[b] = coef(bp) ψ[bp]
                self.amps[bp] = c * d + mis * coef(b) * a;
                self.amps[b] = c * a + mis * coef(bp) * d;
            }
        }
    }

    /// `⟨ψ|P|ψ⟩`, complex in general.
    pub fn expectation_pauli(&self, p: &PauliString) -> Complex64 {
        let (xm, zm, ph) = self.pauli_parts(p);
        let mut acc = ZERO;
        for (b, a) in self.amps.iter().enumerate() {
            let term = self.amps[b ^ xm].conj() * a;
            if (b & zm).count_ones() % 2 == 1 {
                acc -= term;
            } else {
                acc += term;
            }
        }
        acc * ph
    }

    /// `⟨ψ|H|ψ⟩`, summed term by term in file order.
    pub fn expectation(&self, h: &PauliSum) -> Result<f64> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch {
                left: self.n_qubits,
                right: h.n_qubits(),
            });
        }
        let mut acc = ZERO;
        for t in h.terms() {
            acc += t.coefficient * self.expectation_pauli(&t.string);
        }
        let tol = 1e-10 * h.one_norm().max(1.0);
        if acc.im.abs() > tol {
            return Err(Error::NonHermitian(acc.im));
        }
        Ok(acc.re)
    }

    /// `index,re,im` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,re,im\n");
        for (i, a) in self.amps.iter().enumerate() {
            s.push_str(&format!("{i},{},{}\n", a.re, a.im));
        }
        s
    }
}

pub fn rotation_matrix(axis: Axis, theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    let c = Complex64::new(c, 0.0);
    match axis {
        Axis::X => {
            let m = Complex64::new(0.0, -s);
            [[c, m], [m, c]]
        }
        Axis::Y => {
            let s = Complex64::new(s, 0.0);
            [[c, -s], [s, c]]
        }
        Axis::Z => [
            [Complex64::new(c.re, -s), ZERO],
            [ZERO, Complex64::new(c.re, s)],
        ],
    }
}

fn check_params(c: &ParamCircuit, params: &[f64]) -> Result<()> {
    if params.len() != c.n_params() {
        return Err(Error::ParamLength {
            expected: c.n_params(),
            got: params.len(),
        });
    }
    Ok(())
}

fn apply_gate(state: &mut State, gate: &Gate, params: &[f64], shift: f64) {
    match gate {
        Gate::Clifford(g) => state.apply_clifford(g),
        Gate::Rotation {
            axis,
            qubit,
            slot,
            negate,
        } => {
            let t = params[*slot] + shift;
            state.apply_rotation(*axis, *qubit, if *negate { -t } else { t });
        }
        Gate::PauliExp { generator, slot } => {
            state.apply_pauli_exp(generator, params[*slot] + shift);
        }
    }
}

/// Apply `c` to `initial` with the given parameter values.
pub fn run(c: &ParamCircuit, params: &[f64], initial: &State) -> Result<State> {
    run_shifted(c, params, initial, None)
}

/// As [`run`], but gate number `shift.0` sees its parameter offset by `shift.1`.
pub fn run_shifted(
    c: &ParamCircuit,
    params: &[f64],
    initial: &State,
    shift: Option<(usize, f64)>,
) -> Result<State> {
    check_params(c, params)?;
    if initial.n_qubits() != c.n_qubits() {
        return Err(Error::SizeMismatch {
            left: c.n_qubits(),
            right: initial.n_qubits(),
        });
    }
    let mut s = initial.clone();
    for (i, g) in c.gates().iter().enumerate() {
        let d = match shift {
            Some((j, d)) if j == i => d,
            _ => 0.0,
        };
        apply_gate(&mut s, g, params, d);
    }
    Ok(s)
}

/// Single-qubit Bloch-vector expectations `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)` of
/// `Rx(θx) Ry(θy) Rz(θz) |b⟩`.
fn bloch(bit: bool, theta_z: f64, theta_y: f64, theta_x: f64) -> [f64; 3] {
    let mut v = if bit { [ZERO, ONE] } else { [ONE, ZERO] };
    for (axis, t) in [(Axis::Z, theta_z), (Axis::Y, theta_y), (Axis::X, theta_x)] {
        let m = rotation_matrix(axis, t);
        v = [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
    }
    let x = 2.0 * (v[0].conj() * v[1]).re;
    let y = 2.0 * (v[0].conj() * v[1]).im;
    let z = v[0].norm_sqr() - v[1].norm_sqr();
    [x, y, z]
}

/// Energy of `U† R(θ) |HF⟩` without building a statevector: each term is
/// conjugated by `U` and evaluated on the product state `R(θ)|HF⟩`.
///
/// `rotation_params` is laid out qubit-major as `(θz, θy, θx)` per qubit.
pub fn fastpath_expectation(
    u: &CliffordCircuit,
    rotation_params: &[f64],
    n_electrons: usize,
    h: &PauliSum,
) -> Result<f64> {
    let n = u.n_qubits();
    if h.n_qubits() != n {
        return Err(Error::SizeMismatch {
            left: n,
            right: h.n_qubits(),
        });
    }
    if rotation_params.len() != 3 * n {
        return Err(Error::ParamLength {
            expected: 3 * n,
            got: rotation_params.len(),
        });
    }
    check_electrons(n, n_electrons)?;
    let occ = hf_mask(n_electrons);
    let blochs: Vec<[f64; 3]> = (0..n)
        .map(|q| {
            let p = &rotation_params[3 * q..3 * q + 3];
            bloch(occ >> q & 1 == 1, p[0], p[1], p[2])
        })
        .collect();
    let mut energy = 0.0;
    for t in h.terms() {
        let img = conjugate_by_circuit(&t.string, u)?;
        let sign = img.sign().ok_or(Error::NonHermitian(1.0))?;
        let mut v = sign;
        for q in img.support() {
            v *= match img.get(q) {
                Pauli::X => blochs[q][0],
                Pauli::Y => blochs[q][1],
                Pauli::Z => blochs[q][2],
                Pauli::I => 1.0,
            };
        }
        energy += t.coefficient * v;
    }
    Ok(energy)
}
