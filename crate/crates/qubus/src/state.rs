//! Exact joint state of a qubit register and one two-quadrature bus.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{QubusError, Result};
use crate::float::Float;

/// Largest register the dense branch representation will allocate for.
pub const MAX_QUBITS: usize = 26;

/// One of the two phase-space axes of the bus field.
///
/// `Position` displaces the bus along the real axis of its amplitude,
/// `Momentum` along the imaginary axis. Qubits coupled to opposite
/// quadratures pick up conditional phase; same-quadrature couplings commute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrature {
    #[serde(rename = "x")]
    Position,
    #[serde(rename = "p")]
    Momentum,
}

impl Quadrature {
    /// Unit direction of the displacement in the complex bus plane.
    #[inline]
    pub fn unit<T: Float>(self) -> Complex<T> {
        match self {
            Quadrature::Position => Complex::new(T::one(), T::zero()),
            Quadrature::Momentum => Complex::new(T::zero(), T::one()),
        }
    }

    #[inline]
    pub fn opposite(self) -> Quadrature {
        match self {
            Quadrature::Position => Quadrature::Momentum,
            Quadrature::Momentum => Quadrature::Position,
        }
    }
}

impl std::fmt::Display for Quadrature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Quadrature::Position => write!(f, "x"),
            Quadrature::Momentum => write!(f, "p"),
        }
    }
}

/// Direction of a conditional displacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn factor<T: Float>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    #[inline]
    pub fn negated(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// A single bus operation: displace the bus by `sign · σ_z(qubit) · magnitude`
/// along the given quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondDisplacement<T: Float> {
    pub qubit: usize,
    pub quad: Quadrature,
    pub sign: Sign,
    pub magnitude: T,
}

impl<T: Float> CondDisplacement<T> {
    pub fn new(qubit: usize, quad: Quadrature, sign: Sign, magnitude: T) -> Result<Self> {
        if !(magnitude > T::zero()) || !magnitude.is_finite() {
            return Err(QubusError::InvalidArgument(format!(
                "displacement magnitude must be positive and finite, got {magnitude}"
            )));
        }
        Ok(Self {
            qubit,
            quad,
            sign,
            magnitude,
        })
    }

    /// The sign-negated twin; applying it right after `self` undoes the displacement.
    pub fn negated(&self) -> Self {
        Self {
            sign: self.sign.negated(),
            ..*self
        }
    }
}

/// σ_z eigenvalue of `qubit` in computational-basis branch `index`:
/// +1 for bit 0, −1 for bit 1.
#[inline]
pub fn sigma_z(index: usize, qubit: usize) -> i8 {
    if (index >> qubit) & 1 == 0 {
        1
    } else {
        -1
    }
}

/// Composes one displacement `d` onto an existing bus displacement `alpha`.
///
/// Returns the phase factor picked up by the branch amplitude and the new
/// displacement: D(d)D(α) = exp(i·Im(d·conj(α)))·D(α + d). This is the single
/// algebraic rule everything else in the crate is built on.
#[inline]
pub fn displacement_step<T: Float>(alpha: Complex<T>, d: Complex<T>) -> (Complex<T>, Complex<T>) {
    let phase = (d * alpha.conj()).im;
    (Complex::new(phase.cos(), phase.sin()), alpha + d)
}

/// One computational-basis branch of the joint state: the complex amplitude
/// and the branch's bus displacement from vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch<T: Float> {
    pub amp: Complex<T>,
    pub alpha: Complex<T>,
}

/// Exact state of `n` qubits and one bus, stored densely over all 2^n basis
/// bitstrings. Bit `q` of a branch index is qubit `q` (0 ↔ σ_z = +1).
///
/// Global phase convention: `init_register` produces all-real positive
/// amplitudes and every subsequent update multiplies branch amplitudes by the
/// composition phase above; no renormalization of global phase is ever done.
/// Only relative phases are observable and only those are asserted in tests.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState<T: Float> {
    n_qubits: usize,
    branches: Vec<Branch<T>>,
}

impl<T: Float> HybridState<T> {
    /// |+⟩^⊗n with the bus at vacuum: 2^n branches, each with amplitude
    /// 2^{−n/2} and zero displacement.
    pub fn init_register(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(QubusError::InvalidArgument(
                "register must contain at least one qubit".into(),
            ));
        }
        if n > MAX_QUBITS {
            return Err(QubusError::InvalidArgument(format!(
                "register of {n} qubits exceeds dense-representation limit {MAX_QUBITS}"
            )));
        }
        let dim = 1usize << n;
        let amp = T::one() / T::from_f64(dim as f64).sqrt();
        let branch = Branch {
            amp: Complex::new(amp, T::zero()),
            alpha: Complex::new(T::zero(), T::zero()),
        };
        Ok(Self {
            n_qubits: n,
            branches: vec![branch; dim],
        })
    }

    /// Rebuilds a state from explicit branches; used by the verification and
    /// reference-construction paths.
    pub(crate) fn from_branches(n_qubits: usize, branches: Vec<Branch<T>>) -> Self {
        debug_assert_eq!(branches.len(), 1 << n_qubits);
        Self { n_qubits, branches }
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.branches.len()
    }

    #[inline]
    pub fn branch(&self, index: usize) -> &Branch<T> {
        &self.branches[index]
    }

    pub fn branches(&self) -> &[Branch<T>] {
        &self.branches
    }

    /// Amplitudes only, as a state vector (meaningful once the bus is disentangled).
    pub fn amplitudes(&self) -> Vec<Complex<T>> {
        self.branches.iter().map(|b| b.amp).collect()
    }

    /// Applies one conditional displacement, returning the new state.
    pub fn apply_cdisp(&self, op: &CondDisplacement<T>) -> Result<Self> {
        let mut next = self.clone();
        next.apply_cdisp_mut(op)?;
        Ok(next)
    }

    /// In-place variant used by the sequential drivers.
    pub fn apply_cdisp_mut(&mut self, op: &CondDisplacement<T>) -> Result<()> {
        if op.qubit >= self.n_qubits {
            return Err(QubusError::QubitOutOfRange {
                qubit: op.qubit,
                n_qubits: self.n_qubits,
            });
        }
        let unit = op.quad.unit::<T>();
        let base = unit * (op.sign.factor::<T>() * op.magnitude);
        // Branch displacements take few distinct values (one per sign pattern
        // over the currently displaced qubits), so the rotation factors are
        // memoized per distinct alpha. Keys are exact bit patterns: branches
        // with the same history produce bit-identical alphas.
        let mut cache: Vec<(u64, u64, Complex<T>, Complex<T>)> = Vec::new();
        for (index, branch) in self.branches.iter_mut().enumerate() {
            let z = T::from_f64(sigma_z(index, op.qubit) as f64);
            let d = base * z;
            let key = (branch.alpha.re.to_f64().to_bits(), branch.alpha.im.to_f64().to_bits());
            let phase = cache
                .iter()
                .find(|&&(re, im, cz, _)| {
                    let _ = cz;
                    (re, im) == key
                })
                .map(|&(_, _, plus, minus)| if z > T::zero() { plus } else { minus });
            let phase = match phase {
                Some(p) => p,
                None => {
                    let angle = (base * branch.alpha.conj()).im;
                    let plus = Complex::new(angle.cos(), angle.sin());
                    let minus = plus.conj();
                    if cache.len() < 64 {
                        cache.push((key.0, key.1, plus, minus));
                    }
                    if z > T::zero() {
                        plus
                    } else {
                        minus
                    }
                }
            };
            branch.amp = branch.amp * phase;
            branch.alpha = branch.alpha + d;
        }
        Ok(())
    }

    /// Applies a sequence of conditional displacements in order.
    pub fn apply_all<'a, I>(&self, ops: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a CondDisplacement<T>>,
        T: 'a,
    {
        let mut next = self.clone();
        for op in ops {
            next.apply_cdisp_mut(op)?;
        }
        Ok(next)
    }

    /// Largest branch displacement norm |alpha|.
    pub fn max_alpha_norm(&self) -> T {
        self.branches
            .iter()
            .map(|b| b.alpha.norm())
            .fold(T::zero(), T::max)
    }

    /// True iff every branch's bus displacement is within `tol` of vacuum.
    pub fn is_bus_disentangled(&self, tol: T) -> bool {
        self.max_alpha_norm() <= tol
    }

    /// Σ |amp|².
    pub fn norm_sqr(&self) -> T {
        self.branches.iter().map(|b| b.amp.norm_sqr()).sum()
    }
}

/// |⟨a|b⟩|² over the qubit amplitudes, i.e. fidelity modulo global phase.
pub fn fidelity<T: Float>(a: &HybridState<T>, b: &HybridState<T>) -> Result<T> {
    if a.n_qubits() != b.n_qubits() {
        return Err(QubusError::DimensionMismatch {
            state: b.n_qubits(),
            expected: a.n_qubits(),
        });
    }
    let mut inner = Complex::new(T::zero(), T::zero());
    for (x, y) in a.branches.iter().zip(&b.branches) {
        inner = inner + x.amp.conj() * y.amp;
    }
    Ok(inner.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::float::default_beta;
    use approx::assert_abs_diff_eq;

    #[test]
    fn init_register_single_qubit() {
        let s: HybridState<f64> = HybridState::init_register(1).unwrap();
        assert_eq!(s.dim(), 2);
        for b in s.branches() {
            assert_abs_diff_eq!(b.amp.re, 0.7071067811865476, epsilon = 1e-12);
            assert_abs_diff_eq!(b.amp.im, 0.0, epsilon = 1e-15);
            assert_eq!(b.alpha, num_complex::Complex::new(0.0, 0.0));
        }
    }

    #[test]
    fn init_register_two_qubits() {
        let s: HybridState<f64> = HybridState::init_register(2).unwrap();
        assert_eq!(s.dim(), 4);
        for b in s.branches() {
            assert_abs_diff_eq!(b.amp.re, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn init_register_normalized() {
        let s: HybridState<f64> = HybridState::init_register(3).unwrap();
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn init_register_rejects_zero() {
        assert_eq!(
            HybridState::<f64>::init_register(0).unwrap_err(),
            QubusError::InvalidArgument("register must contain at least one qubit".into())
        );
    }

    #[test]
    fn first_displacement_accrues_no_phase() {
        let beta = default_beta::<f64>();
        let s = HybridState::<f64>::init_register(1).unwrap();
        let op = CondDisplacement::new(0, Quadrature::Position, Sign::Plus, beta).unwrap();
        let s = s.apply_cdisp(&op).unwrap();
        assert_abs_diff_eq!(s.branch(0).alpha.re, beta, epsilon = 1e-15);
        assert_abs_diff_eq!(s.branch(1).alpha.re, -beta, epsilon = 1e-15);
        // Amplitudes unchanged.
        for b in s.branches() {
            assert_abs_diff_eq!(b.amp.re, 0.7071067811865476, epsilon = 1e-12);
            assert_abs_diff_eq!(b.amp.im, 0.0, epsilon = 1e-15);
        }
        assert!(!s.is_bus_disentangled(1e-9));
    }

    #[test]
    fn qubit_out_of_range() {
        let beta = default_beta::<f64>();
        let s = HybridState::<f64>::init_register(2).unwrap();
        let op = CondDisplacement::new(5, Quadrature::Position, Sign::Plus, beta).unwrap();
        assert_eq!(
            s.apply_cdisp(&op).unwrap_err(),
            QubusError::QubitOutOfRange {
                qubit: 5,
                n_qubits: 2
            }
        );
    }

    #[test]
    fn rejects_nonpositive_magnitude() {
        assert!(CondDisplacement::new(0, Quadrature::Position, Sign::Plus, 0.0).is_err());
        assert!(CondDisplacement::new(0, Quadrature::Position, Sign::Plus, -1.0).is_err());
        assert!(CondDisplacement::new(0, Quadrature::Position, Sign::Plus, f64::NAN).is_err());
    }

    #[test]
    fn fresh_register_disentangled() {
        let s: HybridState<f64> = HybridState::init_register(2).unwrap();
        assert!(s.is_bus_disentangled(1e-9));
    }
}
