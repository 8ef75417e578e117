//! Exact reference values: dense Hamiltonian matrices, the lowest eigenpair,
//! and the Hartree-Fock energy.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::clifford::{check_electrons, hf_mask};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::simulator::State;

/// Largest register [`to_matrix`] will build (16384 × 16384).
pub const MAX_ORACLE_QUBITS: usize = 14;

#[derive(Clone, Debug)]
pub struct DenseOperator {
    pub n_qubits: usize,
    pub matrix: Mat<Complex64>,
}

impl DenseOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let m = &self.matrix;
        (0..m.nrows()).all(|i| (i..m.ncols()).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol))
    }

    pub fn apply(&self, s: &State) -> Vec<Complex64> {
        let m = &self.matrix;
        let v = s.amplitudes();
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
            .collect()
    }
}

fn guard(n: usize) -> Result<()> {
    if n > MAX_ORACLE_QUBITS {
        return Err(Error::SizeGuard(n, MAX_ORACLE_QUBITS));
    }
    Ok(())
}

fn index_mask(n: usize, m: u64) -> usize {
    (m.reverse_bits() >> (64 - n)) as usize
}

/// Visit every nonzero `(row, col, value)` of `Σ c_k P_k`.
fn for_each_entry(h: &PauliSum, mut f: impl FnMut(usize, usize, Complex64)) {
    let n = h.n_qubits();
    for t in h.terms() {
        let xm = index_mask(n, t.string.x_mask());
        let zm = index_mask(n, t.string.z_mask());
        let k = t.string.phase() as u32 + (t.string.x_mask() & t.string.z_mask()).count_ones();
        let ph = match k % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        } * t.coefficient;
        for col in 0..1usize << n {
            let v = if (col & zm).count_ones() % 2 == 1 { -ph } else { ph };
            f(col ^ xm, col, v);
        }
    }
}

/// Kronecker assembly of `Σ c_k P_k`.
pub fn to_matrix(h: &PauliSum) -> Result<DenseOperator> {
    let n = h.n_qubits();
    guard(n)?;
    let dim = 1usize << n;
    let mut m = Mat::<Complex64>::zeros(dim, dim);
    for_each_entry(h, |r, c, v| m[(r, c)] += v);
    let op = DenseOperator { n_qubits: n, matrix: m };
    if !op.is_hermitian(1e-10) {
        return Err(Error::NonHermitian(f64::NAN));
    }
    Ok(op)
}

/// Lowest eigenvalue and a matching eigenvector; eigenvalues come back
/// in ascending order.
///
/// Terms with an even number of `Y` factors give a real symmetric matrix,
/// which is diagonalized in real arithmetic.
pub fn ground_energy(h: &PauliSum) -> Result<(f64, State)> {
    let n = h.n_qubits();
    guard(n)?;
    let dim = 1usize << n;
    let real = h.terms().iter().all(|t| t.string.y_count() % 2 == 0);
    let (value, vector): (f64, Vec<Complex64>) = if real {
        let mut m = Mat::<f64>::zeros(dim, dim);
        for_each_entry(h, |r, c, v| m[(r, c)] += v.re);
        let eig = m.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
        (
            eig.S()[0],
            eig.U().col(0).iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    } else {
        let op = to_matrix(h)?;
        let eig = op
            .matrix
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        (eig.S()[0].re, eig.U().col(0).iter().copied().collect())
    };
    Ok((value, State::from_amplitudes(n, vector)?))
}

/// `⟨HF|H|HF⟩` from the diagonal terms; off-diagonal terms contribute nothing.
pub fn hf_energy(h: &PauliSum, n_electrons: usize) -> Result<f64> {
    check_electrons(h.n_qubits(), n_electrons)?;
    let occ = hf_mask(n_electrons);
    Ok(h.terms()
        .iter()
        .filter(|t| t.string.is_diagonal())
        .map(|t| {
            if (t.string.z_mask() & occ).count_ones() % 2 == 1 {
                -t.coefficient
            } else {
                t.coefficient
            }
        })
        .sum())
}
