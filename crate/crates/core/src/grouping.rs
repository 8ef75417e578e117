//! Partition a Hamiltonian into mutually commuting groups.
//!
//! The diagonal (Z/I-only) terms always form their own group, placed first.
//! The rest are distributed by sorted greedy insertion under general
//! (full-operator) commutativity.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliTerm};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommutingGroup {
    /// 1-based creation index within its partition.
    pub index: usize,
    pub terms: PauliSum,
    pub is_z_only: bool,
}

impl CommutingGroup {
    /// Validates that all terms pairwise commute.
    pub fn new(index: usize, terms: PauliSum) -> Result<Self> {
        let ts = terms.terms();
        for (i, a) in ts.iter().enumerate() {
            for b in &ts[i + 1..] {
                if !a.string.commutes_unchecked(&b.string) {
                    return Err(Error::NotCommuting(a.string.to_string(), b.string.to_string()));
                }
            }
        }
        let is_z_only = ts.iter().all(|t| t.string.is_diagonal());
        Ok(Self {
            index,
            terms,
            is_z_only,
        })
    }

    pub fn one_norm(&self) -> f64 {
        self.terms.one_norm()
    }

    pub fn n_qubits(&self) -> usize {
        self.terms.n_qubits()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Partition {
    pub groups: Vec<CommutingGroup>,
    /// SHA-256 of the source Hamiltonian's canonical text.
    pub source_hash: String,
}

impl Partition {
    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.groups.first().map_or(0, |g| g.n_qubits())
    }

    /// Sum of all group terms, in group order.
    pub fn reassemble(&self) -> Result<PauliSum> {
        let n = self.n_qubits();
        PauliSum::new(
            n,
            self.groups
                .iter()
                .flat_map(|g| g.terms.terms().iter().copied()),
        )
    }
}

pub fn hamiltonian_hash(h: &PauliSum) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("qubits: {}\n", h.n_qubits()).as_bytes());
    hasher.update(h.to_lines().as_bytes());
    format!("{:x}", hasher.finalize())
}

/// Split off the diagonal terms (identity included) as a z-only group.
pub fn extract_z_group(h: &PauliSum) -> Result<(CommutingGroup, PauliSum)> {
    let (diag, rest): (Vec<PauliTerm>, Vec<PauliTerm>) =
        h.terms().iter().partition(|t| t.string.is_diagonal());
    let n = h.n_qubits();
    let group = CommutingGroup {
        index: 1,
        terms: PauliSum::new(n, diag)?,
        is_z_only: true,
    };
    Ok((group, PauliSum::new(n, rest)?))
}

pub fn partition(h: &PauliSum) -> Result<Partition> {
    if h.is_empty() {
        return Err(Error::Empty);
    }
    let n = h.n_qubits();
    let (zgroup, rest) = extract_z_group(h)?;

    // Input position of each term, to restore file order inside groups.
    let position = |t: &PauliTerm| {
        h.terms()
            .iter()
            .position(|u| u.string == t.string)
            .unwrap_or(usize::MAX)
    };

    let mut order: Vec<PauliTerm> = rest.terms().to_vec();
    order.sort_by(|a, b| {
        b.coefficient
            .abs()
            .total_cmp(&a.coefficient.abs())
            .then_with(|| a.string.lex_key().cmp(&b.string.lex_key()))
    });

    let mut bins: Vec<Vec<PauliTerm>> = Vec::new();
    for t in order {
        let slot = bins
            .iter_mut()
            .find(|bin| bin.iter().all(|u| u.string.commutes_unchecked(&t.string)));
        match slot {
            Some(bin) => bin.push(t),
            None => bins.push(vec![t]),
        }
    }

    let mut groups = Vec::with_capacity(bins.len() + 1);
    if !zgroup.terms.is_empty() {
        groups.push(zgroup);
    }
    for mut bin in bins {
        bin.sort_by_key(|t| position(t));
        let index = groups.len() + 1;
        groups.push(CommutingGroup {
            index,
            terms: PauliSum::new(n, bin)?,
            is_z_only: false,
        });
    }
    Ok(Partition {
        groups,
        source_hash: hamiltonian_hash(h),
    })
}

/// Z-only group stays first; the others by descending one-norm, ties by index.
pub fn order_groups(p: &Partition) -> Partition {
    let mut groups = p.groups.clone();
    let split = usize::from(groups.first().is_some_and(|g| g.is_z_only));
    groups[split..].sort_by(|a, b| {
        b.one_norm()
            .total_cmp(&a.one_norm())
            .then(a.index.cmp(&b.index))
    });
    Partition {
        groups,
        source_hash: p.source_hash.clone(),
    }
}
