//! Exhaustive search for the maximum number of lattice edges a single pass
//! can create when every qubit connects to the bus exactly once.

use std::collections::HashMap;

use crate::error::{QubusError, Result};
use crate::lattice::LatticeSpec;
use crate::schedule::BusOp;
use crate::state::Quadrature;

/// Largest qubit count the search will accept.
pub const SEARCH_LIMIT: usize = 12;

/// Live-set cap per quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchWidth {
    /// At most one qubit on each quadrature.
    One,
    /// At most two qubits on each quadrature (closed-box paths).
    Two,
}

impl SearchWidth {
    #[inline]
    fn cap(self) -> u32 {
        match self {
            SearchWidth::One => 1,
            SearchWidth::Two => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub max_edges: usize,
    /// One maximizing schedule: each qubit attached exactly once, all
    /// attachments released at the end, no unwanted or duplicate edges.
    /// Deterministic tie-break: lexicographically smallest op sequence under
    /// attach-before-detach, qubit-index, position-before-momentum order.
    pub witness: Vec<BusOp>,
}

struct Searcher<'a> {
    lattice: &'a LatticeSpec,
    adj: Vec<u16>,
    full: u16,
    cap: u32,
    memo: HashMap<u64, u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Node {
    attached: u16,
    live_x: u16,
    live_p: u16,
}

impl Node {
    #[inline]
    fn key(self) -> u64 {
        self.attached as u64 | (self.live_x as u64) << 16 | (self.live_p as u64) << 32
    }
}

/// Moves are enumerated in the witness's lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Move {
    Attach(usize, Quadrature),
    Detach(usize),
}

impl<'a> Searcher<'a> {
    fn new(lattice: &'a LatticeSpec, width: SearchWidth) -> Self {
        let n = lattice.n_qubits();
        let adj = (0..n)
            .map(|q| {
                let mut mask = 0u16;
                for nb in lattice.neighbors(q) {
                    mask |= 1 << nb;
                }
                mask
            })
            .collect();
        Searcher {
            lattice,
            adj,
            full: ((1u32 << n) - 1) as u16,
            cap: width.cap(),
            memo: HashMap::new(),
        }
    }

    /// Admissible bound on further edges: every unattached qubit can create at
    /// most min(cap, open neighbors) edges at its single attach, where a
    /// neighbor is open unless it has already been attached and detached.
    fn upper_bound(&self, node: Node) -> usize {
        let closed = node.attached & !(node.live_x | node.live_p);
        let mut ub = 0usize;
        let mut rest = (!node.attached) & self.full;
        while rest != 0 {
            let q = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let open = (self.adj[q] & !closed).count_ones();
            ub += open.min(self.cap) as usize;
        }
        ub
    }

    fn moves(&self, node: Node) -> Vec<(Move, usize, Node)> {
        let mut out = Vec::new();
        let live = node.live_x | node.live_p;
        for q in 0..self.lattice.n_qubits() {
            let bit = 1u16 << q;
            if node.attached & bit != 0 {
                continue;
            }
            for quad in [Quadrature::Position, Quadrature::Momentum] {
                let (own, opp) = match quad {
                    Quadrature::Position => (node.live_x, node.live_p),
                    Quadrature::Momentum => (node.live_p, node.live_x),
                };
                if own.count_ones() >= self.cap {
                    continue;
                }
                // Every qubit on the opposite quadrature entangles with q;
                // all of them must be lattice neighbors or the attach is illegal.
                if opp & !self.adj[q] != 0 {
                    continue;
                }
                let gain = opp.count_ones() as usize;
                let next = match quad {
                    Quadrature::Position => Node {
                        attached: node.attached | bit,
                        live_x: node.live_x | bit,
                        live_p: node.live_p,
                    },
                    Quadrature::Momentum => Node {
                        attached: node.attached | bit,
                        live_x: node.live_x,
                        live_p: node.live_p | bit,
                    },
                };
                out.push((Move::Attach(q, quad), gain, next));
            }
        }
        for q in 0..self.lattice.n_qubits() {
            let bit = 1u16 << q;
            if live & bit == 0 {
                continue;
            }
            let next = Node {
                attached: node.attached,
                live_x: node.live_x & !bit,
                live_p: node.live_p & !bit,
            };
            out.push((Move::Detach(q), 0, next));
        }
        out
    }

    fn best(&mut self, node: Node) -> usize {
        if node.attached == self.full {
            return 0;
        }
        let key = node.key();
        if let Some(&v) = self.memo.get(&key) {
            return v as usize;
        }
        let ub = self.upper_bound(node);
        let mut best = 0usize;
        if ub > 0 {
            for (_, gain, next) in self.moves(node) {
                let value = gain + self.best(next);
                if value > best {
                    best = value;
                    if best == ub {
                        break;
                    }
                }
            }
        }
        self.memo.insert(key, best as u8);
        best
    }

    fn reconstruct(&mut self, mut node: Node) -> Vec<BusOp> {
        let mut ops = Vec::new();
        while node.attached != self.full {
            let target = self.best(node);
            let mut advanced = false;
            for (mv, gain, next) in self.moves(node) {
                if gain + self.best(next) == target {
                    ops.push(self.op_for(mv, node));
                    node = next;
                    advanced = true;
                    break;
                }
            }
            assert!(advanced, "search reconstruction lost the optimum");
        }
        // Release whatever is still live, lowest index first.
        let mut live = node.live_x | node.live_p;
        while live != 0 {
            let q = live.trailing_zeros() as usize;
            live &= live - 1;
            ops.push(self.op_for(Move::Detach(q), node));
        }
        ops
    }

    fn op_for(&self, mv: Move, node: Node) -> BusOp {
        match mv {
            Move::Attach(q, quad) => {
                let (r, c) = self.lattice.coord(q);
                BusOp::attach(r, c, quad)
            }
            Move::Detach(q) => {
                let (r, c) = self.lattice.coord(q);
                let quad = if node.live_x & (1 << q) != 0 {
                    Quadrature::Position
                } else {
                    Quadrature::Momentum
                };
                BusOp::detach(r, c, quad)
            }
        }
    }
}

/// Exhausts all attach-once operation sequences respecting the width limit
/// and returns the maximum number of lattice edges created plus one witness.
pub fn brute_force_max_edges(lattice: &LatticeSpec, width: SearchWidth) -> Result<SearchResult> {
    let n = lattice.n_qubits();
    if n > SEARCH_LIMIT {
        return Err(QubusError::SearchTooLarge {
            qubits: n,
            limit: SEARCH_LIMIT,
        });
    }
    let mut searcher = Searcher::new(lattice, width);
    let root = Node {
        attached: 0,
        live_x: 0,
        live_p: 0,
    };
    let max_edges = searcher.best(root);
    let witness = searcher.reconstruct(root);
    Ok(SearchResult { max_edges, witness })
}
