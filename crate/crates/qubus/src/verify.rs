//! Cluster-state stabilizer verification.

use num_complex::Complex;

use crate::error::{QubusError, Result};
use crate::float::Float;
use crate::lattice::LatticeSpec;
use crate::state::{sigma_z, Branch, HybridState};

/// Outcome of a stabilizer check: one expectation value Re⟨K_a⟩ per qubit,
/// where K_a = X_a ∏_{b∈nbr(a)} Z_b.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport<T: Float> {
    pub pass: bool,
    pub stabilizer_values: Vec<T>,
}

impl<T: Float> VerifyReport<T> {
    pub fn min_stabilizer(&self) -> T {
        self.stabilizer_values
            .iter()
            .copied()
            .fold(T::infinity(), T::min)
    }
}

/// Multiplies each branch amplitude by exp(i·Σ_q θ_q·z_q), the software
/// Z-rotation frame that reconciles geometric phase gates with ideal CPHASE.
pub fn apply_correction_frame<T: Float>(
    state: &HybridState<T>,
    angles: &[T],
) -> Result<HybridState<T>> {
    if angles.len() != state.n_qubits() {
        return Err(QubusError::DimensionMismatch {
            state: state.n_qubits(),
            expected: angles.len(),
        });
    }
    let n = state.n_qubits();
    let mut rotated = Vec::with_capacity(state.dim());
    for index in 0..state.dim() {
        let mut theta = T::zero();
        for (q, &angle) in angles.iter().enumerate().take(n) {
            theta += angle * T::from_f64(sigma_z(index, q) as f64);
        }
        let phase = Complex::new(theta.cos(), theta.sin());
        let b = state.branch(index);
        rotated.push(Branch {
            amp: b.amp * phase,
            alpha: b.alpha,
        });
    }
    Ok(HybridState::from_branches(n, rotated))
}

/// Evaluates every cluster stabilizer K_a after applying the correction frame.
/// Passes iff all expectation values equal +1 within `tol`.
pub fn verify_cluster_state<T: Float>(
    state: &HybridState<T>,
    lattice: &LatticeSpec,
    correction_frame: &[T],
    tol: T,
) -> Result<VerifyReport<T>> {
    if state.n_qubits() != lattice.n_qubits() {
        return Err(QubusError::DimensionMismatch {
            state: state.n_qubits(),
            expected: lattice.n_qubits(),
        });
    }
    if !state.is_bus_disentangled(tol) {
        return Err(QubusError::BusEntangled {
            max_alpha: state.max_alpha_norm().to_f64(),
        });
    }
    let corrected = apply_correction_frame(state, correction_frame)?;
    let amps = corrected.amplitudes();
    let n = lattice.n_qubits();
    let mut values = Vec::with_capacity(n);
    let mut pass = true;
    for a in 0..n {
        let nbrs = lattice.neighbors(a);
        let mut acc = Complex::new(T::zero(), T::zero());
        for (s, amp) in amps.iter().enumerate() {
            let mut zprod = 1i8;
            for &b in &nbrs {
                zprod *= sigma_z(s, b);
            }
            let flipped = s ^ (1 << a);
            acc = acc + amp.conj() * amps[flipped] * T::from_f64(zprod as f64);
        }
        if (acc.re - T::one()).abs() > tol || acc.im.abs() > tol {
            pass = false;
        }
        values.push(acc.re);
    }
    Ok(VerifyReport {
        pass,
        stabilizer_values: values,
    })
}

/// The ideal cluster state on `lattice`: |+⟩^⊗n with CZ applied across every
/// edge, built directly from the phase pattern (−1)^{|{edges with both bits 1}|}.
/// This is the bus-free reference path used to cross-check bus constructions.
pub fn ideal_cluster_state<T: Float>(lattice: &LatticeSpec) -> Result<HybridState<T>> {
    let n = lattice.n_qubits();
    let base = HybridState::<T>::init_register(n)?;
    let edges = lattice.edges();
    let branches = (0..base.dim())
        .map(|s| {
            let mut ones = 0usize;
            for &(u, v) in &edges {
                if (s >> u) & 1 == 1 && (s >> v) & 1 == 1 {
                    ones += 1;
                }
            }
            let sign = if ones % 2 == 0 { T::one() } else { -T::one() };
            Branch {
                amp: base.branch(s).amp * sign,
                alpha: Complex::new(T::zero(), T::zero()),
            }
        })
        .collect();
    Ok(HybridState::from_branches(n, branches))
}
