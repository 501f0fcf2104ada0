//! Effective diagonal unitaries of displacement sequences.

use crate::error::{QubusError, Result};
use crate::float::{wrap_angle, Float};
use crate::state::HybridState;

/// Disentanglement tolerance used when none is supplied explicitly.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Amplitude magnitude below which a branch phase is reported as undefined.
const AMP_FLOOR: f64 = 1e-12;

/// Per-branch phases accrued by a displacement sequence, as angles in
/// (−π, π]. Entries are `None` where the branch amplitude vanishes and the
/// phase is therefore undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTable<T: Float> {
    n_qubits: usize,
    entries: Vec<Option<T>>,
}

impl<T: Float> PhaseTable<T> {
    pub fn new(n_qubits: usize, entries: Vec<Option<T>>) -> Result<Self> {
        if entries.len() != 1 << n_qubits {
            return Err(QubusError::DimensionMismatch {
                state: entries.len(),
                expected: 1 << n_qubits,
            });
        }
        Ok(Self { n_qubits, entries })
    }

    pub fn from_angles(n_qubits: usize, angles: &[T]) -> Result<Self> {
        Self::new(n_qubits, angles.iter().map(|&a| Some(a)).collect())
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn get(&self, index: usize) -> Option<T> {
        self.entries[index]
    }

    pub fn entries(&self) -> &[Option<T>] {
        &self.entries
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(Option::is_some)
    }
}

/// Per-branch phase ratio between two disentangled states, φ = arg(after/before).
///
/// Both states must have the bus within `DEFAULT_TOL` of vacuum; branches with
/// vanishing amplitude are reported as undefined entries.
pub fn extract_diagonal_unitary<T: Float>(
    before: &HybridState<T>,
    after: &HybridState<T>,
) -> Result<PhaseTable<T>> {
    if before.n_qubits() != after.n_qubits() {
        return Err(QubusError::DimensionMismatch {
            state: after.n_qubits(),
            expected: before.n_qubits(),
        });
    }
    let tol = T::from_f64(DEFAULT_TOL);
    for (name, state) in [("before", before), ("after", after)] {
        if !state.is_bus_disentangled(tol) {
            let _ = name;
            return Err(QubusError::BusEntangled {
                max_alpha: state.max_alpha_norm().to_f64(),
            });
        }
    }
    let floor = T::from_f64(AMP_FLOOR);
    let entries = before
        .branches()
        .iter()
        .zip(after.branches())
        .map(|(b, a)| {
            if b.amp.norm() <= floor || a.amp.norm() <= floor {
                None
            } else {
                Some((a.amp * b.amp.conj()).arg())
            }
        })
        .collect();
    PhaseTable::new(before.n_qubits(), entries)
}

/// The entangling phase sum φ(00) − φ(01) − φ(10) + φ(11) of a two-qubit table,
/// wrapped into (−π, π].
pub fn entangling_sum<T: Float>(table: &PhaseTable<T>) -> Result<T> {
    if table.n_qubits() != 2 {
        return Err(QubusError::IncompletePhaseTable(format!(
            "need a 2-qubit table, got {} qubits",
            table.n_qubits()
        )));
    }
    let phi = |i: usize| -> Result<T> {
        table
            .get(i)
            .ok_or_else(|| QubusError::IncompletePhaseTable(format!("entry {i:02b} undefined")))
    };
    Ok(wrap_angle(phi(0)? - phi(1)? - phi(2)? + phi(3)?))
}

/// True iff the table equals CPHASE up to local Z-rotations and global phase,
/// i.e. its entangling sum is ±π (mod 2π) within `tol`.
pub fn is_cphase_equivalent<T: Float>(table: &PhaseTable<T>, tol: T) -> Result<bool> {
    let sum = entangling_sum(table)?;
    Ok((sum.abs() - T::PI()).abs() <= tol)
}
