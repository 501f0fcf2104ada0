//! Schedule generation for m×n cluster lattices and the operation-count
//! formulas the plans are measured against.
//!
//! All planners assign quadratures by checkerboard parity — qubit (r, c)
//! couples to position when r+c is even, momentum otherwise — so every
//! lattice edge joins opposite quadratures and same-parity qubits can share
//! a quadrature without entangling.

use std::collections::BTreeMap;

use num_rational::Ratio;

use crate::error::{QubusError, Result};
use crate::lattice::LatticeSpec;
use crate::schedule::{walk_ops, BusOp, Schedule, Strategy};
use crate::state::Quadrature;

/// Bus operations with one bus per CPHASE gate: N = 8mn − 4(m+n), which is
/// four operations per lattice edge.
pub fn ops_no_reuse(m: usize, n: usize) -> Result<u64> {
    if m == 0 || n == 0 {
        return Err(QubusError::InvalidArgument(
            "lattice dimensions must be at least 1".into(),
        ));
    }
    let (m, n) = (m as u64, n as u64);
    Ok(8 * m * n - 4 * (m + n))
}

/// Minimum bus operations with at most one qubit per quadrature: 4mn − 8.
/// Requires m, n ≥ 2 (the combinatorial argument counts the four corners).
pub fn ops_width1_min(m: usize, n: usize) -> Result<u64> {
    if m < 2 || n < 2 {
        return Err(QubusError::InvalidArgument(
            "width-1 bound requires m, n >= 2".into(),
        ));
    }
    let (m, n) = (m as u64, n as u64);
    Ok(4 * m * n - 8)
}

/// Minimum bus operations on a width-2 path: N_min = 3mn − 2(m+n) + 4.
/// Exact attainment needs even mn; the formula value is returned regardless.
pub fn ops_width2_min(m: usize, n: usize) -> Result<u64> {
    if m < 2 || n < 2 {
        return Err(QubusError::InvalidArgument(
            "width-2 bound requires m, n >= 2".into(),
        ));
    }
    let (m, n) = (m as u64, n as u64);
    Ok(3 * m * n - 2 * (m + n) + 4)
}

/// Minimum bus operations with length-b bricks and one bus per brick:
/// N_min(b) = (3 + 2/b)·mn − 2(m+n), exact as a rational.
pub fn ops_bricks(m: usize, n: usize, b: usize) -> Result<Ratio<i64>> {
    if m == 0 || n == 0 {
        return Err(QubusError::InvalidArgument(
            "lattice dimensions must be at least 1".into(),
        ));
    }
    if b == 0 {
        return Err(QubusError::InvalidArgument(
            "brick length must be at least 1".into(),
        ));
    }
    let (m, n, b) = (m as i64, n as i64, b as i64);
    Ok(Ratio::new((3 * b + 2) * m * n - 2 * (m + n) * b, b))
}

/// Cluster edges left over after a width-2 pass that visits every qubit once:
/// mn/2 − (m+n) + 2. Only defined for even mn. May be negative on degenerate
/// single-row lattices, where the width-2 edge bound exceeds the edge count.
pub fn remaining_edges_width2(m: usize, n: usize) -> Result<i64> {
    if (m * n) % 2 != 0 {
        return Err(QubusError::InvalidArgument(
            "remaining-edge count is unsupported for odd mn".into(),
        ));
    }
    let (m, n) = (m as i64, n as i64);
    Ok(m * n / 2 - (m + n) + 2)
}

#[inline]
pub(crate) fn quad_of(r: usize, c: usize) -> Quadrature {
    if (r + c) % 2 == 0 {
        Quadrature::Position
    } else {
        Quadrature::Momentum
    }
}

pub(crate) fn attach(r: usize, c: usize) -> BusOp {
    BusOp::attach(r, c, quad_of(r, c))
}

pub(crate) fn detach(r: usize, c: usize) -> BusOp {
    BusOp::detach(r, c, quad_of(r, c))
}

/// One bus per edge: attach both endpoints, detach both, switch bus.
fn emit_no_reuse(lat: &LatticeSpec) -> Vec<BusOp> {
    let mut ops = Vec::new();
    let edges = lat.edges();
    for (i, &(u, v)) in edges.iter().enumerate() {
        let (ur, uc) = lat.coord(u);
        let (vr, vc) = lat.coord(v);
        ops.push(attach(ur, uc));
        ops.push(attach(vr, vc));
        ops.push(detach(ur, uc));
        ops.push(detach(vr, vc));
        if i + 1 < edges.len() {
            ops.push(BusOp::NewBus);
        }
    }
    ops
}

/// Serpentine qubit order: row 0 left-to-right, row 1 right-to-left, ...
fn snake_path(m: usize, n: usize) -> Vec<(usize, usize)> {
    let mut path = Vec::with_capacity(m * n);
    for r in 0..m {
        if r % 2 == 0 {
            path.extend((0..n).map(|c| (r, c)));
        } else {
            path.extend((0..n).rev().map(|c| (r, c)));
        }
    }
    path
}

/// Width-1 line: a snake pass visiting each qubit once (one per quadrature
/// live at a time), then per-column line passes over the verticals the snake
/// missed. Single bus throughout.
fn emit_line(lat: &LatticeSpec) -> Vec<BusOp> {
    let (m, n) = (lat.m, lat.n);
    let path = snake_path(m, n);
    let mut ops = Vec::new();
    ops.push(attach(path[0].0, path[0].1));
    for k in 1..path.len() {
        ops.push(attach(path[k].0, path[k].1));
        ops.push(detach(path[k - 1].0, path[k - 1].1));
    }
    let &(lr, lc) = path.last().unwrap();
    ops.push(detach(lr, lc));

    // The snake already created the vertical at each U-turn: row r turns at
    // column n−1 when r is even, column 0 otherwise.
    let snake_vertical = |r: usize, c: usize| -> bool {
        if r % 2 == 0 {
            c == n - 1
        } else {
            c == 0
        }
    };
    for c in 0..n {
        let mut r = 0;
        while r + 1 < m {
            if snake_vertical(r, c) {
                r += 1;
                continue;
            }
            // Maximal run of missing verticals starting at r.
            let mut r_end = r;
            while r_end + 1 < m - 1 && !snake_vertical(r_end + 1, c) {
                r_end += 1;
            }
            ops.push(attach(r, c));
            for rr in r + 1..=r_end + 1 {
                ops.push(attach(rr, c));
                ops.push(detach(rr - 1, c));
            }
            ops.push(detach(r_end + 1, c));
            r = r_end + 2;
        }
    }
    ops
}

/// Width-2 zig-zag over two-row bands with U-turns. The departing column's
/// stitch to the band above is reactivated just before its last detach; the
/// turn column's stitch comes free from the qubit kept live through the turn.
/// Odd m gets a final single-row pass stitched to the band above.
fn emit_zigzag_canonical(m: usize, n: usize) -> (Vec<BusOp>, usize) {
    let bands = m / 2;
    let tail = m % 2 == 1;
    let mut ops = Vec::new();
    let mut turns = 0usize;

    for k in 0..bands {
        let r = 2 * k;
        let cols: Vec<usize> = if k % 2 == 0 {
            (0..n).collect()
        } else {
            (0..n).rev().collect()
        };
        let c0 = cols[0];
        let stitched = k > 0;

        ops.push(attach(r, c0));
        ops.push(attach(r + 1, c0));
        if stitched {
            // Turn entry: the band above kept (r−1, c0) live; its stitch edge
            // formed at the attach of (r, c0) just above.
            ops.push(detach(r - 1, c0));
        }
        for w in cols.windows(2) {
            let (cur, next) = (w[0], w[1]);
            let react = stitched && cur != c0;
            if react {
                ops.push(attach(r - 1, cur));
            }
            ops.push(attach(r, next));
            ops.push(detach(r, cur));
            if react {
                ops.push(detach(r - 1, cur));
            }
            ops.push(attach(r + 1, next));
            ops.push(detach(r + 1, cur));
        }
        let cl = *cols.last().unwrap();
        if stitched && cl != c0 {
            ops.push(attach(r - 1, cl));
            ops.push(detach(r, cl));
            ops.push(detach(r - 1, cl));
        } else {
            ops.push(detach(r, cl));
        }
        if k + 1 < bands || tail {
            turns += 1; // bottom row qubit stays live through the U-turn
        } else {
            ops.push(detach(r + 1, cl));
        }
    }

    if tail {
        let row = m - 1;
        let cols: Vec<usize> = if bands % 2 == 0 {
            (0..n).collect()
        } else {
            (0..n).rev().collect()
        };
        let c0 = cols[0];
        ops.push(attach(row, c0)); // stitch edge with the live (row−1, c0)
        ops.push(detach(row - 1, c0));
        for w in cols.windows(2) {
            let (cur, next) = (w[0], w[1]);
            if cur != c0 {
                ops.push(attach(row - 1, cur));
            }
            ops.push(attach(row, next));
            ops.push(detach(row, cur));
            if cur != c0 {
                ops.push(detach(row - 1, cur));
            }
        }
        let cl = *cols.last().unwrap();
        ops.push(attach(row - 1, cl));
        ops.push(detach(row, cl));
        ops.push(detach(row - 1, cl));
    }

    (ops, turns)
}

/// Emits one two-row brick: core columns `c0..=c1` of rows (r, r+1), with the
/// left boundary pair reactivated when `has_left` and the band above stitched
/// in when `has_top`. Runs on a fresh bus and leaves it empty.
pub(crate) fn emit_brick2(ops: &mut Vec<BusOp>, r: usize, c0: usize, c1: usize, has_left: bool, has_top: bool) {
    if has_left {
        ops.push(attach(r, c0 - 1));
        ops.push(attach(r, c0));
        ops.push(detach(r, c0 - 1));
        ops.push(attach(r + 1, c0 - 1));
        ops.push(attach(r + 1, c0));
        ops.push(detach(r + 1, c0 - 1));
    } else {
        ops.push(attach(r, c0));
        ops.push(attach(r + 1, c0));
    }
    for cur in c0..c1 {
        let next = cur + 1;
        if has_top {
            ops.push(attach(r - 1, cur));
        }
        ops.push(attach(r, next));
        ops.push(detach(r, cur));
        if has_top {
            ops.push(detach(r - 1, cur));
        }
        ops.push(attach(r + 1, next));
        ops.push(detach(r + 1, cur));
    }
    if has_top {
        ops.push(attach(r - 1, c1));
    }
    ops.push(detach(r, c1));
    if has_top {
        ops.push(detach(r - 1, c1));
    }
    ops.push(detach(r + 1, c1));
}

/// Emits one single-row tail brick: columns `c0..=c1` of `row`, stitched to
/// the row above, with the left neighbor reactivated when `has_left`.
pub(crate) fn emit_brick1(ops: &mut Vec<BusOp>, row: usize, c0: usize, c1: usize, has_left: bool) {
    if has_left {
        ops.push(attach(row, c0 - 1));
        ops.push(attach(row, c0));
        ops.push(detach(row, c0 - 1));
    } else {
        ops.push(attach(row, c0));
    }
    for cur in c0..c1 {
        ops.push(attach(row - 1, cur));
        ops.push(attach(row, cur + 1));
        ops.push(detach(row, cur));
        ops.push(detach(row - 1, cur));
    }
    ops.push(attach(row - 1, c1));
    ops.push(detach(row, c1));
    ops.push(detach(row - 1, c1));
}

/// Descriptor of one brick within a plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrickSchedule {
    pub index: usize,
    /// Core rows (two for band bricks, one for a tail brick).
    pub rows: Vec<usize>,
    /// Inclusive core column range.
    pub cols: (usize, usize),
    pub has_left: bool,
    pub has_top: bool,
    pub ops: Vec<BusOp>,
    /// Attach + detach count.
    pub op_count: usize,
    /// Edges (CPHASE gates) created by this brick's bus.
    pub gate_count: usize,
    /// Distinct qubits this brick's bus touches.
    pub qubits_touched: usize,
}

impl BrickSchedule {
    /// A full-length two-row brick with both a left boundary and a stitched
    /// band above; these are the bricks the 3b+2 / 4b / 6b+4 accounting
    /// describes.
    pub fn is_interior(&self, b: usize) -> bool {
        self.rows.len() == 2
            && self.has_left
            && self.has_top
            && self.cols.1 - self.cols.0 + 1 == b
    }
}

/// A lattice decomposed into bricks, one bus per brick.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrickPlan {
    pub b: usize,
    pub lattice: LatticeSpec,
    pub bricks: Vec<BrickSchedule>,
    /// Qubits reactivated by more than one brick, with the brick indices.
    pub shared_qubits: BTreeMap<(usize, usize), Vec<usize>>,
}

impl BrickPlan {
    /// Concatenates the bricks into one schedule with NewBus boundaries.
    pub fn to_schedule(&self) -> Schedule {
        let mut ops = Vec::new();
        for (i, brick) in self.bricks.iter().enumerate() {
            if i > 0 {
                ops.push(BusOp::NewBus);
            }
            ops.extend(brick.ops.iter().copied());
        }
        Schedule::new(self.lattice, Strategy::Bricks(self.b), ops, 0)
    }

    pub fn total_ops(&self) -> usize {
        self.bricks.iter().map(|b| b.op_count).sum()
    }
}

fn column_chunks(n: usize, b: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut c = 0;
    while c < n {
        let end = (c + b - 1).min(n - 1);
        out.push((c, end));
        c = end + 1;
    }
    out
}

fn brick_plan_canonical(lat: &LatticeSpec, b: usize) -> BrickPlan {
    let (m, n) = (lat.m, lat.n);
    let bands = m / 2;
    let tail = m % 2 == 1;
    let mut bricks: Vec<BrickSchedule> = Vec::new();

    let mut push_brick = |rows: Vec<usize>, cols: (usize, usize), has_left, has_top, ops: Vec<BusOp>| {
        let index = bricks.len();
        let op_count = ops.iter().filter(|o| o.is_displacement()).count();
        let mut touched: Vec<(usize, usize)> = ops
            .iter()
            .filter_map(|o| match o {
                BusOp::Attach { qubit, .. } => Some(*qubit),
                _ => None,
            })
            .collect();
        touched.sort_unstable();
        touched.dedup();
        bricks.push(BrickSchedule {
            index,
            rows,
            cols,
            has_left,
            has_top,
            ops,
            op_count,
            gate_count: 0, // filled from the walk below
            qubits_touched: touched.len(),
        });
    };

    for k in 0..bands {
        let r = 2 * k;
        let has_top = k > 0;
        for (ci, &(c0, c1)) in column_chunks(n, b).iter().enumerate() {
            let mut ops = Vec::new();
            emit_brick2(&mut ops, r, c0, c1, ci > 0, has_top);
            push_brick(vec![r, r + 1], (c0, c1), ci > 0, has_top, ops);
        }
    }
    if tail {
        let row = m - 1;
        for (ci, &(c0, c1)) in column_chunks(n, b).iter().enumerate() {
            let mut ops = Vec::new();
            emit_brick1(&mut ops, row, c0, c1, ci > 0);
            push_brick(vec![row], (c0, c1), ci > 0, true, ops);
        }
    }

    let mut plan = BrickPlan {
        b,
        lattice: *lat,
        bricks,
        shared_qubits: BTreeMap::new(),
    };

    // Fill per-brick gate counts from the concatenated walk and collect the
    // qubits shared between bricks.
    let schedule = plan.to_schedule();
    let gates = walk_ops(lat, &schedule.ops).segment_gates;
    for (brick, g) in plan.bricks.iter_mut().zip(gates) {
        brick.gate_count = g;
    }
    let mut seen: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for brick in &plan.bricks {
        let mut qubits: Vec<(usize, usize)> = brick
            .ops
            .iter()
            .filter_map(|o| match o {
                BusOp::Attach { qubit, .. } => Some(*qubit),
                _ => None,
            })
            .collect();
        qubits.sort_unstable();
        qubits.dedup();
        for q in qubits {
            seen.entry(q).or_default().push(brick.index);
        }
    }
    plan.shared_qubits = seen.into_iter().filter(|(_, v)| v.len() > 1).collect();
    plan
}

fn transpose_plan(plan: BrickPlan) -> BrickPlan {
    BrickPlan {
        b: plan.b,
        lattice: plan.lattice.transpose(),
        bricks: plan
            .bricks
            .into_iter()
            .map(|mut brick| {
                brick.ops = brick.ops.into_iter().map(BusOp::transposed).collect();
                brick
            })
            .collect(),
        shared_qubits: plan
            .shared_qubits
            .into_iter()
            .map(|((r, c), v)| ((c, r), v))
            .collect(),
    }
}

/// Decomposes the lattice into length-b bricks, one bus per brick, oriented
/// to minimize total operations (bands pair up the dimension that measures
/// cheaper; ties keep rows paired).
pub fn brick_plan(lattice: &LatticeSpec, b: usize) -> Result<BrickPlan> {
    if b == 0 {
        return Err(QubusError::InvalidArgument(
            "brick length must be at least 1".into(),
        ));
    }
    if lattice.m < 2 || lattice.n < 2 {
        return Err(QubusError::InvalidArgument(
            "brick planning requires a lattice of at least 2×2".into(),
        ));
    }
    let row_plan = brick_plan_canonical(lattice, b);
    let col_plan = brick_plan_canonical(&lattice.transpose(), b);
    if col_plan.total_ops() < row_plan.total_ops() {
        Ok(transpose_plan(col_plan))
    } else {
        Ok(row_plan)
    }
}

/// Generates a validated bus-operation schedule for the lattice under the
/// given strategy. The result creates exactly the lattice's edge set; this is
/// enforced by the planner test suite via `validate_schedule` and exact
/// simulation.
pub fn plan(lattice: &LatticeSpec, strategy: Strategy) -> Result<Schedule> {
    if lattice.n_qubits() < 2 {
        return Err(QubusError::InvalidArgument(
            "lattice has no edges to create".into(),
        ));
    }
    match strategy {
        Strategy::NoReuse => Ok(Schedule::new(
            *lattice,
            strategy,
            emit_no_reuse(lattice),
            0,
        )),
        Strategy::Line => Ok(Schedule::new(*lattice, strategy, emit_line(lattice), 0)),
        Strategy::ZigZag2 => {
            if lattice.m < 2 || lattice.n < 2 {
                return Err(QubusError::InvalidArgument(
                    "zig-zag planning requires a lattice of at least 2×2".into(),
                ));
            }
            let (row_ops, row_turns) = emit_zigzag_canonical(lattice.m, lattice.n);
            let (col_ops, col_turns) = emit_zigzag_canonical(lattice.n, lattice.m);
            if col_ops.len() < row_ops.len() {
                let ops = col_ops.into_iter().map(BusOp::transposed).collect();
                Ok(Schedule::new(*lattice, strategy, ops, col_turns))
            } else {
                Ok(Schedule::new(*lattice, strategy, row_ops, row_turns))
            }
        }
        Strategy::Bricks(b) => Ok(brick_plan(lattice, b)?.to_schedule()),
    }
}
