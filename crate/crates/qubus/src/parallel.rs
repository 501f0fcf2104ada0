//! Time-slotted parallel-bus schedules for dynamic strip generation.
//!
//! Each bus line owns a band of the strip (two rows or one row, per pitch)
//! and runs its own attach/detach sequence; adjacent lines share a stitching
//! row, so line starts are staggered. A stagger of six slots is the smallest
//! that keeps adjacent lines off shared qubits at the same time: the upper
//! line's very first operation reactivates the shared row's first qubit,
//! whose last touch by the lower line happens five slots into that line.

use serde::{Deserialize, Serialize};

use crate::error::{QubusError, Result};
use crate::float::Float;
use crate::lattice::LatticeSpec;
use crate::multibus::MultiBusState;
use crate::planner::{attach, detach, emit_brick1, emit_brick2};
use crate::schedule::{walk_ops, BusOp};

/// Paper-fixed stagger between adjacent bus lines, in slots.
pub const DEFAULT_STAGGER: usize = 6;

/// How bus lines map onto strip rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pitch {
    /// One bus per two-row band (width-2 plans); requires even strip width.
    #[serde(rename = "one-per-two-rows")]
    OnePerTwoRows,
    /// One bus per row (width-1 plans): less efficient per bus, wider strip
    /// in the same time frame.
    #[serde(rename = "one-per-row")]
    OnePerRow,
}

impl std::fmt::Display for Pitch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Pitch::OnePerTwoRows => write!(f, "one-per-two-rows"),
            Pitch::OnePerRow => write!(f, "one-per-row"),
        }
    }
}

impl std::str::FromStr for Pitch {
    type Err = QubusError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-per-two-rows" => Ok(Pitch::OnePerTwoRows),
            "one-per-row" => Ok(Pitch::OnePerRow),
            other => Err(QubusError::InvalidArgument(format!(
                "unknown pitch {other:?}"
            ))),
        }
    }
}

/// Strip generation request: `width` rows are produced `horizon` columns deep
/// by `buses` parallel bus lines, optionally chunked into length-`brick`
/// bricks with a fresh bus per brick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StripSpec {
    pub width: usize,
    pub horizon: usize,
    pub buses: usize,
    pub pitch: Pitch,
    pub brick: Option<usize>,
}

impl StripSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width < 2 {
            return Err(QubusError::InvalidArgument(
                "strip width must be at least 2".into(),
            ));
        }
        if self.horizon == 0 {
            return Err(QubusError::InvalidArgument(
                "horizon must be at least 1 column".into(),
            ));
        }
        if self.buses == 0 {
            return Err(QubusError::InvalidArgument(
                "need at least one bus".into(),
            ));
        }
        match self.pitch {
            Pitch::OnePerTwoRows => {
                if self.width % 2 != 0 {
                    return Err(QubusError::InvalidArgument(
                        "pitch one-per-two-rows requires an even strip width".into(),
                    ));
                }
                if self.buses != self.width / 2 {
                    return Err(QubusError::InvalidArgument(format!(
                        "pitch one-per-two-rows on width {} takes exactly {} buses",
                        self.width,
                        self.width / 2
                    )));
                }
            }
            Pitch::OnePerRow => {
                if self.buses != self.width {
                    return Err(QubusError::InvalidArgument(format!(
                        "pitch one-per-row on width {} takes exactly {} buses",
                        self.width, self.width
                    )));
                }
            }
        }
        if self.brick == Some(0) {
            return Err(QubusError::InvalidArgument(
                "brick length must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Per-bus-use accounting within one line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentStats {
    /// Attach + detach operations performed by this bus.
    pub ops: usize,
    /// CPHASE gates (edges) this bus created.
    pub gates: usize,
}

/// One bus line: the rows it owns, its start slot, and its op sequence.
/// Operation `i` (counting displacements only) runs in slot `start_slot + i`;
/// NewBus markers take no slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BusLine {
    pub index: usize,
    pub rows: Vec<usize>,
    pub start_slot: usize,
    pub ops: Vec<BusOp>,
    pub segments: Vec<SegmentStats>,
}

impl BusLine {
    pub fn displacement_count(&self) -> usize {
        self.ops.iter().filter(|o| o.is_displacement()).count()
    }
}

/// A complete parallel schedule over a width×horizon strip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelSchedule {
    pub strip: StripSpec,
    pub lattice: LatticeSpec,
    pub stagger: usize,
    pub lines: Vec<BusLine>,
}

impl ParallelSchedule {
    /// All operations ordered by slot (NewBus markers ride along at the slot
    /// of their line's next displacement).
    pub fn slot_entries(&self) -> Vec<(usize, usize, BusOp)> {
        let mut entries = Vec::new();
        for line in &self.lines {
            let mut slot = line.start_slot;
            for op in &line.ops {
                entries.push((slot, line.index, *op));
                if op.is_displacement() {
                    slot += 1;
                }
            }
        }
        entries.sort_by_key(|&(slot, bus, _)| (slot, bus));
        entries
    }

    /// Slots used: last occupied slot + 1; zero for an empty schedule.
    pub fn makespan_slots(&self) -> usize {
        self.lines
            .iter()
            .map(|l| {
                let n = l.displacement_count();
                if n == 0 {
                    0
                } else {
                    l.start_slot + n
                }
            })
            .max()
            .unwrap_or(0)
    }
}

/// Total schedule duration: slots, and seconds once τ (the per-operation
/// time) is supplied.
pub fn makespan(schedule: &ParallelSchedule) -> usize {
    schedule.makespan_slots()
}

pub fn makespan_seconds(schedule: &ParallelSchedule, tau: f64) -> f64 {
    schedule.makespan_slots() as f64 * tau
}

fn column_chunks(n: usize, brick: Option<usize>) -> Vec<(usize, usize)> {
    let b = brick.unwrap_or(n).max(1);
    let mut out = Vec::new();
    let mut c = 0;
    while c < n {
        let end = (c + b - 1).min(n - 1);
        out.push((c, end));
        c = end + 1;
    }
    out
}

/// First brick of a stitched two-row line, reactivating the shared qubit of
/// column 0 as the very first operation on the fresh bus.
fn emit_brick2_react_first(ops: &mut Vec<BusOp>, r: usize, c0: usize, c1: usize) {
    ops.push(attach(r - 1, c0));
    ops.push(attach(r, c0));
    ops.push(attach(r + 1, c0));
    if c1 > c0 {
        ops.push(attach(r, c0 + 1));
        ops.push(detach(r - 1, c0));
        ops.push(detach(r, c0));
        ops.push(attach(r + 1, c0 + 1));
        ops.push(detach(r + 1, c0));
        for cur in c0 + 1..c1 {
            ops.push(attach(r - 1, cur));
            ops.push(attach(r, cur + 1));
            ops.push(detach(r, cur));
            ops.push(detach(r - 1, cur));
            ops.push(attach(r + 1, cur + 1));
            ops.push(detach(r + 1, cur));
        }
        ops.push(attach(r - 1, c1));
        ops.push(detach(r, c1));
        ops.push(detach(r - 1, c1));
        ops.push(detach(r + 1, c1));
    } else {
        ops.push(detach(r - 1, c0));
        ops.push(detach(r, c0));
        ops.push(detach(r + 1, c0));
    }
}

/// First brick of a stitched one-row line, shared qubit first.
fn emit_brick1_react_first(ops: &mut Vec<BusOp>, row: usize, c0: usize, c1: usize) {
    ops.push(attach(row - 1, c0));
    ops.push(attach(row, c0));
    if c1 > c0 {
        ops.push(attach(row, c0 + 1));
        ops.push(detach(row - 1, c0));
        ops.push(detach(row, c0));
        for cur in c0 + 1..c1 {
            ops.push(attach(row - 1, cur));
            ops.push(attach(row, cur + 1));
            ops.push(detach(row, cur));
            ops.push(detach(row - 1, cur));
        }
        ops.push(attach(row - 1, c1));
        ops.push(detach(row, c1));
        ops.push(detach(row - 1, c1));
    } else {
        ops.push(detach(row - 1, c0));
        ops.push(detach(row, c0));
    }
}

/// Plain width-1 line over one row (no stitching), brick-chunked.
fn emit_row_brick(ops: &mut Vec<BusOp>, row: usize, c0: usize, c1: usize, has_left: bool) {
    if has_left {
        ops.push(attach(row, c0 - 1));
        ops.push(attach(row, c0));
        ops.push(detach(row, c0 - 1));
    } else {
        ops.push(attach(row, c0));
    }
    for cur in c0..c1 {
        ops.push(attach(row, cur + 1));
        ops.push(detach(row, cur));
    }
    ops.push(detach(row, c1));
}

fn line_ops(strip: &StripSpec, line_index: usize) -> Vec<BusOp> {
    let chunks = column_chunks(strip.horizon, strip.brick);
    let mut ops = Vec::new();
    match strip.pitch {
        Pitch::OnePerTwoRows => {
            let r = 2 * line_index;
            for (ci, &(c0, c1)) in chunks.iter().enumerate() {
                if ci > 0 {
                    ops.push(BusOp::NewBus);
                }
                if line_index == 0 {
                    emit_brick2(&mut ops, r, c0, c1, ci > 0, false);
                } else if line_index == 1 && ci == 0 {
                    emit_brick2_react_first(&mut ops, r, c0, c1);
                } else {
                    emit_brick2(&mut ops, r, c0, c1, ci > 0, true);
                }
            }
        }
        Pitch::OnePerRow => {
            let row = line_index;
            for (ci, &(c0, c1)) in chunks.iter().enumerate() {
                if ci > 0 {
                    ops.push(BusOp::NewBus);
                }
                if row == 0 {
                    emit_row_brick(&mut ops, row, c0, c1, ci > 0);
                } else if ci == 0 {
                    emit_brick1_react_first(&mut ops, row, c0, c1);
                } else {
                    emit_brick1(&mut ops, row, c0, c1, true);
                }
            }
        }
    }
    ops
}

/// Builds the parallel schedule with the paper's six-slot stagger.
pub fn schedule_parallel(strip: &StripSpec) -> Result<ParallelSchedule> {
    schedule_parallel_with_stagger(strip, DEFAULT_STAGGER)
}

/// Builds the parallel schedule with an explicit stagger; staggers below six
/// are constructed as requested so their collisions can be inspected with
/// `check_conflicts`.
pub fn schedule_parallel_with_stagger(
    strip: &StripSpec,
    stagger: usize,
) -> Result<ParallelSchedule> {
    strip.validate()?;
    let lattice = LatticeSpec::new(strip.width, strip.horizon)?;
    let mut lines = Vec::with_capacity(strip.buses);
    for j in 0..strip.buses {
        let ops = line_ops(strip, j);
        let rows = match strip.pitch {
            Pitch::OnePerTwoRows => vec![2 * j, 2 * j + 1],
            Pitch::OnePerRow => vec![j],
        };
        let segment_ops: Vec<usize> = {
            let mut counts = vec![0usize];
            for op in &ops {
                match op {
                    BusOp::NewBus => counts.push(0),
                    _ => *counts.last_mut().unwrap() += 1,
                }
            }
            counts
        };
        let segment_gates = walk_ops(&lattice, &ops).segment_gates;
        let segments = segment_ops
            .into_iter()
            .zip(segment_gates)
            .map(|(ops, gates)| SegmentStats { ops, gates })
            .collect();
        lines.push(BusLine {
            index: j,
            rows,
            start_slot: j * stagger,
            ops,
            segments,
        });
    }
    Ok(ParallelSchedule {
        strip: *strip,
        lattice,
        stagger,
        lines,
    })
}

/// A scheduling fault found by `check_conflicts`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParallelViolation {
    /// Two bus lines hold the same qubit in overlapping slot windows.
    QubitClash {
        qubit: (usize, usize),
        slot: usize,
        buses: (usize, usize),
    },
    /// Adjacent lines start closer than the six-slot stagger.
    StaggerTooSmall {
        lower_bus: usize,
        upper_bus: usize,
        gap: usize,
    },
}

/// Empty iff no qubit is held by two buses in the same slot and all adjacent
/// line starts respect the six-slot stagger.
pub fn check_conflicts(schedule: &ParallelSchedule) -> Vec<ParallelViolation> {
    let mut violations = Vec::new();
    // Live windows per qubit: (line, attach slot, detach slot).
    let mut windows: std::collections::HashMap<(usize, usize), Vec<(usize, usize, usize)>> =
        std::collections::HashMap::new();
    for line in &schedule.lines {
        let mut open: std::collections::HashMap<(usize, usize), usize> =
            std::collections::HashMap::new();
        let mut slot = line.start_slot;
        let mut last = line.start_slot;
        for op in &line.ops {
            match *op {
                BusOp::Attach { qubit, .. } => {
                    open.insert(qubit, slot);
                }
                BusOp::Detach { qubit, .. } => {
                    if let Some(start) = open.remove(&qubit) {
                        windows.entry(qubit).or_default().push((
                            line.index,
                            start,
                            slot,
                        ));
                    }
                }
                BusOp::NewBus => {}
            }
            if op.is_displacement() {
                last = slot;
                slot += 1;
            }
        }
        // Unterminated attachments stay live to the line's end.
        for (qubit, start) in open {
            windows.entry(qubit).or_default().push((line.index, start, last));
        }
    }
    for (qubit, mut spans) in windows {
        spans.sort_unstable_by_key(|&(_, start, _)| start);
        for pair in spans.windows(2) {
            let (bus_a, _, end_a) = pair[0];
            let (bus_b, start_b, _) = pair[1];
            if bus_a != bus_b && start_b <= end_a {
                violations.push(ParallelViolation::QubitClash {
                    qubit,
                    slot: start_b,
                    buses: (bus_a, bus_b),
                });
            }
        }
    }
    for pair in schedule.lines.windows(2) {
        let gap = pair[1].start_slot.saturating_sub(pair[0].start_slot);
        if gap < DEFAULT_STAGGER {
            violations.push(ParallelViolation::StaggerTooSmall {
                lower_bus: pair[0].index,
                upper_bus: pair[1].index,
                gap,
            });
        }
    }
    violations.sort_by_key(|v| match *v {
        ParallelViolation::QubitClash { slot, qubit, .. } => (0, slot, qubit.0, qubit.1),
        ParallelViolation::StaggerTooSmall { lower_bus, .. } => (1, lower_bus, 0, 0),
    });
    violations
}

/// Runs the merged schedule through the exact multi-bus simulator, applying
/// ops in slot order.
pub fn simulate_merged<T: Float>(schedule: &ParallelSchedule) -> Result<MultiBusState<T>> {
    let mut state = MultiBusState::new(
        schedule.lattice.n_qubits(),
        schedule.lines.len(),
        crate::float::default_beta::<T>(),
    )?;
    for (_, bus, op) in schedule.slot_entries() {
        state.apply_bus_op(bus, &op, &schedule.lattice)?;
    }
    Ok(state)
}

/// Correction frame for the merged schedule: walks ops in slot order with one
/// live set per bus line and applies the per-edge ±π/4 rule.
pub fn merged_correction_frame<T: Float>(schedule: &ParallelSchedule) -> Result<Vec<T>> {
    let lattice = &schedule.lattice;
    let mut live: Vec<std::collections::HashMap<usize, crate::state::Quadrature>> =
        vec![Default::default(); schedule.lines.len()];
    let quarter = T::PI() / T::from_f64(4.0);
    let mut frame = vec![T::zero(); lattice.n_qubits()];
    for (slot, bus, op) in schedule.slot_entries() {
        match op {
            BusOp::Attach { qubit: (r, c), quad } => {
                let q = lattice.index(r, c);
                for (&p, &pq) in &live[bus] {
                    if pq != quad.opposite() {
                        continue;
                    }
                    if !lattice.is_edge(q, p) {
                        return Err(QubusError::MalformedSchedule(format!(
                            "slot {slot}: unwanted entanglement between {:?} and {:?}",
                            lattice.coord(q),
                            lattice.coord(p)
                        )));
                    }
                    let sigma = match pq {
                        crate::state::Quadrature::Position => T::one(),
                        crate::state::Quadrature::Momentum => -T::one(),
                    };
                    frame[q] -= sigma * quarter;
                    frame[p] -= sigma * quarter;
                }
                live[bus].insert(q, quad);
            }
            BusOp::Detach { qubit: (r, c), .. } => {
                live[bus].remove(&lattice.index(r, c));
            }
            BusOp::NewBus => {}
        }
    }
    Ok(frame)
}
