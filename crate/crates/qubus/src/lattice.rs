//! Rectangular cluster-state targets.

use serde::{Deserialize, Serialize};

use crate::error::{QubusError, Result};

/// An m×n rectangular lattice of qubits. Qubits are addressed either by
/// `(row, col)` coordinates or by a flat row-major index `row * n + col`.
/// The edge set is all horizontal and vertical nearest-neighbor pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub m: usize,
    pub n: usize,
}

impl LatticeSpec {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(QubusError::InvalidArgument(format!(
                "lattice dimensions must be at least 1×1, got {m}×{n}"
            )));
        }
        Ok(Self { m, n })
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.m * self.n
    }

    /// |edges| = m(n−1) + n(m−1).
    #[inline]
    pub fn n_edges(&self) -> usize {
        self.m * (self.n - 1) + self.n * (self.m - 1)
    }

    #[inline]
    pub fn index(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < self.m && c < self.n);
        r * self.n + c
    }

    #[inline]
    pub fn coord(&self, idx: usize) -> (usize, usize) {
        (idx / self.n, idx % self.n)
    }

    #[inline]
    pub fn contains(&self, r: usize, c: usize) -> bool {
        r < self.m && c < self.n
    }

    /// All edges as flat-index pairs `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n_edges());
        for r in 0..self.m {
            for c in 0..self.n {
                let u = self.index(r, c);
                if c + 1 < self.n {
                    out.push((u, self.index(r, c + 1)));
                }
                if r + 1 < self.m {
                    out.push((u, self.index(r + 1, c)));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        if u == v || u >= self.n_qubits() || v >= self.n_qubits() {
            return false;
        }
        let (ru, cu) = self.coord(u);
        let (rv, cv) = self.coord(v);
        ru.abs_diff(rv) + cu.abs_diff(cv) == 1
    }

    pub fn neighbors(&self, idx: usize) -> Vec<usize> {
        let (r, c) = self.coord(idx);
        let mut out = Vec::with_capacity(4);
        if r > 0 {
            out.push(self.index(r - 1, c));
        }
        if c > 0 {
            out.push(self.index(r, c - 1));
        }
        if c + 1 < self.n {
            out.push(self.index(r, c + 1));
        }
        if r + 1 < self.m {
            out.push(self.index(r + 1, c));
        }
        out.sort_unstable();
        out
    }

    pub fn transpose(&self) -> LatticeSpec {
        LatticeSpec {
            m: self.n,
            n: self.m,
        }
    }
}
