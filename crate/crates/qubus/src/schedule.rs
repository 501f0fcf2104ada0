//! Bus-operation schedules: construction-order lists of attach/detach/new-bus
//! events, their JSON form, a combinatorial validator, and lowering onto the
//! exact simulator.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{QubusError, Result};
use crate::float::Float;
use crate::lattice::LatticeSpec;
use crate::state::{CondDisplacement, HybridState, Quadrature, Sign, MAX_QUBITS};

/// One schedule entry. `Attach` couples a qubit to a bus quadrature (one
/// conditional displacement with positive sign), `Detach` removes it (the
/// sign-negated displacement on the same quadrature), `NewBus` discards the
/// current bus and starts a fresh one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BusOp {
    Attach {
        qubit: (usize, usize),
        quad: Quadrature,
    },
    Detach {
        qubit: (usize, usize),
        quad: Quadrature,
    },
    NewBus,
}

impl BusOp {
    pub fn attach(r: usize, c: usize, quad: Quadrature) -> Self {
        BusOp::Attach {
            qubit: (r, c),
            quad,
        }
    }

    pub fn detach(r: usize, c: usize, quad: Quadrature) -> Self {
        BusOp::Detach {
            qubit: (r, c),
            quad,
        }
    }

    /// Attach and detach count toward N; bus switches do not.
    pub fn is_displacement(&self) -> bool {
        !matches!(self, BusOp::NewBus)
    }

    /// Swaps row/column coordinates; used when planning on a transposed lattice.
    pub fn transposed(self) -> Self {
        match self {
            BusOp::Attach {
                qubit: (r, c),
                quad,
            } => BusOp::attach(c, r, quad),
            BusOp::Detach {
                qubit: (r, c),
                quad,
            } => BusOp::detach(c, r, quad),
            BusOp::NewBus => BusOp::NewBus,
        }
    }
}

/// Planning strategy tag carried by schedules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// One bus per CPHASE gate (four operations per edge).
    NoReuse,
    /// Width-1 line: a single qubit on each quadrature at a time.
    Line,
    /// Width-2 zig-zag bands with U-turns.
    ZigZag2,
    /// Width-2 bands split into length-b bricks, one bus per brick.
    Bricks(usize),
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Strategy::NoReuse => write!(f, "no-reuse"),
            Strategy::Line => write!(f, "line"),
            Strategy::ZigZag2 => write!(f, "zigzag2"),
            Strategy::Bricks(b) => write!(f, "bricks:{b}"),
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = QubusError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "no-reuse" => Ok(Strategy::NoReuse),
            "line" => Ok(Strategy::Line),
            "zigzag2" => Ok(Strategy::ZigZag2),
            other => {
                if let Some(b) = other.strip_prefix("bricks:") {
                    let b: usize = b.parse().map_err(|_| {
                        QubusError::InvalidArgument(format!("bad brick length in {other:?}"))
                    })?;
                    Ok(Strategy::Bricks(b))
                } else {
                    Err(QubusError::InvalidArgument(format!(
                        "unknown strategy {other:?}"
                    )))
                }
            }
        }
    }
}

impl Serialize for Strategy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Strategy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Schedule-level accounting carried in the JSON `meta` block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleMeta {
    /// Number of attach plus detach operations (bus switches excluded).
    #[serde(rename = "N")]
    pub n_ops: usize,
    pub buses: usize,
    pub turns: usize,
}

/// An ordered bus-operation schedule for building one lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub lattice: LatticeSpec,
    pub strategy: Strategy,
    pub ops: Vec<BusOp>,
    pub meta: ScheduleMeta,
}

impl Schedule {
    /// Assembles a schedule, deriving N and the bus count from the op list.
    pub fn new(lattice: LatticeSpec, strategy: Strategy, ops: Vec<BusOp>, turns: usize) -> Self {
        let n_ops = ops.iter().filter(|o| o.is_displacement()).count();
        let buses = 1 + ops.iter().filter(|o| !o.is_displacement()).count();
        Schedule {
            lattice,
            strategy,
            ops,
            meta: ScheduleMeta {
                n_ops,
                buses,
                turns,
            },
        }
    }

    pub fn attach_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|o| matches!(o, BusOp::Attach { .. }))
            .count()
    }

    pub fn detach_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|o| matches!(o, BusOp::Detach { .. }))
            .count()
    }

    /// Attach+detach counts per bus segment (split at NewBus markers).
    pub fn segment_op_counts(&self) -> Vec<usize> {
        let mut out = vec![0usize];
        for op in &self.ops {
            match op {
                BusOp::NewBus => out.push(0),
                _ => *out.last_mut().unwrap() += 1,
            }
        }
        out
    }

    /// Edges created per bus segment, from the validator walk.
    pub fn segment_gate_counts(&self) -> Vec<usize> {
        walk_ops(&self.lattice, &self.ops).segment_gates
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("schedule serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| QubusError::MalformedSchedule(e.to_string()))
    }
}

/// A rule violation found while walking a schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// An attach created entanglement with a non-neighbor.
    UnwantedEntanglement {
        a: (usize, usize),
        b: (usize, usize),
        op_index: usize,
    },
    /// An edge was created a second time.
    DuplicateEdge {
        a: (usize, usize),
        b: (usize, usize),
        op_index: usize,
    },
    AttachWhileAttached {
        qubit: (usize, usize),
        op_index: usize,
    },
    DetachWithoutAttach {
        qubit: (usize, usize),
        op_index: usize,
    },
    DetachQuadratureMismatch {
        qubit: (usize, usize),
        op_index: usize,
    },
    QubitOutsideLattice {
        qubit: (usize, usize),
        op_index: usize,
    },
    /// The live attachment set was nonempty at a NewBus marker or at the end
    /// of the schedule (`op_index == ops.len()` for the latter).
    BusNotEmpty {
        op_index: usize,
        live: Vec<(usize, usize)>,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::UnwantedEntanglement { a, b, op_index } => {
                write!(f, "op {op_index}: unwanted entanglement {a:?}–{b:?}")
            }
            Violation::DuplicateEdge { a, b, op_index } => {
                write!(f, "op {op_index}: duplicate edge {a:?}–{b:?}")
            }
            Violation::AttachWhileAttached { qubit, op_index } => {
                write!(f, "op {op_index}: attach of already-live {qubit:?}")
            }
            Violation::DetachWithoutAttach { qubit, op_index } => {
                write!(f, "op {op_index}: detach of non-live {qubit:?}")
            }
            Violation::DetachQuadratureMismatch { qubit, op_index } => {
                write!(f, "op {op_index}: detach quadrature differs for {qubit:?}")
            }
            Violation::QubitOutsideLattice { qubit, op_index } => {
                write!(f, "op {op_index}: qubit {qubit:?} outside lattice")
            }
            Violation::BusNotEmpty { op_index, live } => {
                write!(f, "op {op_index}: bus boundary with live qubits {live:?}")
            }
        }
    }
}

/// Result of the combinatorial schedule walk.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// True iff there are no violations and the created edges equal the
    /// lattice's full edge set.
    pub valid: bool,
    /// Lattice edges created, in creation order, as flat-index pairs (u < v).
    pub created_edges: Vec<(usize, usize)>,
    pub violations: Vec<Violation>,
}

/// Entanglement event: edge (u, v) created at `op_index`, with conditional
/// phase sign `sigma` (+1 for phase +π/4·z_u·z_v at β² = π/8, −1 for −π/4).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct EdgeEvent {
    pub u: usize,
    pub v: usize,
    pub sigma: i8,
    #[allow(dead_code)]
    pub op_index: usize,
}

pub(crate) struct WalkOutcome {
    pub violations: Vec<Violation>,
    pub created: Vec<(usize, usize)>,
    pub edge_events: Vec<EdgeEvent>,
    pub segment_gates: Vec<usize>,
}

/// Walks a schedule maintaining live attachment sets per quadrature. Each
/// attach creates an edge with every qubit live on the opposite quadrature;
/// the walk records those edges, their phase signs, and any rule violations.
pub(crate) fn walk_ops(lattice: &LatticeSpec, ops: &[BusOp]) -> WalkOutcome {
    let mut live: HashMap<usize, Quadrature> = HashMap::new();
    let mut violations = Vec::new();
    let mut created: Vec<(usize, usize)> = Vec::new();
    let mut created_set: std::collections::HashSet<(usize, usize)> =
        std::collections::HashSet::new();
    let mut edge_events = Vec::new();
    let mut segment_gates = vec![0usize];

    for (i, op) in ops.iter().enumerate() {
        match *op {
            BusOp::Attach { qubit: (r, c), quad } => {
                if !lattice.contains(r, c) {
                    violations.push(Violation::QubitOutsideLattice {
                        qubit: (r, c),
                        op_index: i,
                    });
                    continue;
                }
                let q = lattice.index(r, c);
                if live.contains_key(&q) {
                    violations.push(Violation::AttachWhileAttached {
                        qubit: (r, c),
                        op_index: i,
                    });
                    continue;
                }
                let mut partners: Vec<usize> = live
                    .iter()
                    .filter(|(_, &lq)| lq == quad.opposite())
                    .map(|(&p, _)| p)
                    .collect();
                partners.sort_unstable();
                for p in partners {
                    let key = (q.min(p), q.max(p));
                    if !lattice.is_edge(key.0, key.1) {
                        violations.push(Violation::UnwantedEntanglement {
                            a: lattice.coord(key.0),
                            b: lattice.coord(key.1),
                            op_index: i,
                        });
                    } else if !created_set.insert(key) {
                        violations.push(Violation::DuplicateEdge {
                            a: lattice.coord(key.0),
                            b: lattice.coord(key.1),
                            op_index: i,
                        });
                    } else {
                        created.push(key);
                        *segment_gates.last_mut().unwrap() += 1;
                        // The already-live partner attached first; the phase
                        // sign follows from which quadrature opened the loop.
                        let sigma = match quad.opposite() {
                            Quadrature::Position => 1,
                            Quadrature::Momentum => -1,
                        };
                        edge_events.push(EdgeEvent {
                            u: key.0,
                            v: key.1,
                            sigma,
                            op_index: i,
                        });
                    }
                }
                live.insert(q, quad);
            }
            BusOp::Detach { qubit: (r, c), quad } => {
                if !lattice.contains(r, c) {
                    violations.push(Violation::QubitOutsideLattice {
                        qubit: (r, c),
                        op_index: i,
                    });
                    continue;
                }
                let q = lattice.index(r, c);
                match live.remove(&q) {
                    None => violations.push(Violation::DetachWithoutAttach {
                        qubit: (r, c),
                        op_index: i,
                    }),
                    Some(attached) if attached != quad => {
                        violations.push(Violation::DetachQuadratureMismatch {
                            qubit: (r, c),
                            op_index: i,
                        })
                    }
                    Some(_) => {}
                }
            }
            BusOp::NewBus => {
                if !live.is_empty() {
                    let mut held: Vec<_> = live.keys().map(|&q| lattice.coord(q)).collect();
                    held.sort_unstable();
                    violations.push(Violation::BusNotEmpty {
                        op_index: i,
                        live: held,
                    });
                }
                segment_gates.push(0);
            }
        }
    }
    if !live.is_empty() {
        let mut held: Vec<_> = live.keys().map(|&q| lattice.coord(q)).collect();
        held.sort_unstable();
        violations.push(Violation::BusNotEmpty {
            op_index: ops.len(),
            live: held,
        });
    }

    WalkOutcome {
        violations,
        created,
        edge_events,
        segment_gates,
    }
}

/// Validates a bus-op list against a lattice: every created edge must be a
/// lattice edge, no edge may be created twice, attach/detach events must
/// alternate per qubit, every bus must end empty, and (for `valid`) the
/// created edges must cover the full edge set.
pub fn validate_ops(lattice: &LatticeSpec, ops: &[BusOp]) -> ValidationReport {
    let walk = walk_ops(lattice, ops);
    let complete = walk.created.len() == lattice.n_edges();
    ValidationReport {
        valid: walk.violations.is_empty() && complete,
        created_edges: walk.created,
        violations: walk.violations,
    }
}

/// Validates a full schedule.
pub fn validate_schedule(schedule: &Schedule) -> ValidationReport {
    validate_ops(&schedule.lattice, &schedule.ops)
}

/// Per-qubit software Z-rotation angles that turn the schedule's geometric
/// phase gates into ideal CPHASE gates: each created edge contributes
/// −σ·π/4 to both endpoint qubits, where σ is the edge's phase sign.
///
/// Fails if the walk finds any violation, since the frame is only meaningful
/// for physically clean schedules.
pub fn correction_frame<T: Float>(lattice: &LatticeSpec, ops: &[BusOp]) -> Result<Vec<T>> {
    let walk = walk_ops(lattice, ops);
    if let Some(v) = walk.violations.first() {
        return Err(QubusError::MalformedSchedule(v.to_string()));
    }
    let quarter = T::PI() / T::from_f64(4.0);
    let mut frame = vec![T::zero(); lattice.n_qubits()];
    for ev in &walk.edge_events {
        let delta = -T::from_f64(ev.sigma as f64) * quarter;
        frame[ev.u] += delta;
        frame[ev.v] += delta;
    }
    Ok(frame)
}

/// Runs a schedule through the exact simulator: attaches lower to positive
/// conditional displacements of length `beta`, detaches to their negations,
/// and every NewBus boundary requires an empty attachment set.
pub fn simulate_ops<T: Float>(
    lattice: &LatticeSpec,
    ops: &[BusOp],
    beta: T,
) -> Result<HybridState<T>> {
    let n = lattice.n_qubits();
    if n > MAX_QUBITS {
        return Err(QubusError::InvalidArgument(format!(
            "lattice of {n} qubits exceeds simulation limit {MAX_QUBITS}"
        )));
    }
    let mut live: HashMap<usize, Quadrature> = HashMap::new();
    let mut state = HybridState::<T>::init_register(n)?;
    for (i, op) in ops.iter().enumerate() {
        match *op {
            BusOp::Attach { qubit: (r, c), quad } => {
                if !lattice.contains(r, c) {
                    return Err(QubusError::MalformedSchedule(format!(
                        "op {i}: qubit ({r},{c}) outside lattice"
                    )));
                }
                let q = lattice.index(r, c);
                if live.insert(q, quad).is_some() {
                    return Err(QubusError::MalformedSchedule(format!(
                        "op {i}: attach of already-live qubit ({r},{c})"
                    )));
                }
                state.apply_cdisp_mut(&CondDisplacement::new(q, quad, Sign::Plus, beta)?)?;
            }
            BusOp::Detach { qubit: (r, c), quad } => {
                if !lattice.contains(r, c) {
                    return Err(QubusError::MalformedSchedule(format!(
                        "op {i}: qubit ({r},{c}) outside lattice"
                    )));
                }
                let q = lattice.index(r, c);
                match live.remove(&q) {
                    Some(attached) if attached == quad => {}
                    Some(_) => {
                        return Err(QubusError::MalformedSchedule(format!(
                            "op {i}: detach quadrature differs for ({r},{c})"
                        )))
                    }
                    None => {
                        return Err(QubusError::MalformedSchedule(format!(
                            "op {i}: detach of non-live qubit ({r},{c})"
                        )))
                    }
                }
                state.apply_cdisp_mut(&CondDisplacement::new(q, quad, Sign::Minus, beta)?)?;
            }
            BusOp::NewBus => {
                if !live.is_empty() {
                    return Err(QubusError::MalformedSchedule(format!(
                        "op {i}: bus switch with live attachments"
                    )));
                }
            }
        }
    }
    Ok(state)
}

/// Convenience wrapper running a schedule at the default β.
pub fn simulate_schedule<T: Float>(schedule: &Schedule) -> Result<HybridState<T>> {
    simulate_ops(
        &schedule.lattice,
        &schedule.ops,
        crate::float::default_beta::<T>(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use Quadrature::{Momentum as P, Position as X};

    #[test]
    fn closed_box_is_clean() {
        // The 2×2 closed box: four attaches create all four edges.
        let lat = LatticeSpec::new(2, 2).unwrap();
        let ops = vec![
            BusOp::attach(0, 0, X),
            BusOp::attach(1, 0, P),
            BusOp::attach(0, 1, P),
            BusOp::attach(1, 1, X),
            BusOp::detach(0, 0, X),
            BusOp::detach(1, 0, P),
            BusOp::detach(0, 1, P),
            BusOp::detach(1, 1, X),
        ];
        let report = validate_ops(&lat, &ops);
        assert!(report.valid, "{:?}", report.violations);
        assert_eq!(report.created_edges.len(), 4);
    }

    #[test]
    fn non_neighbor_attach_is_unwanted() {
        // (2,0) attaches to position while (1,0) and (0,1) sit on momentum;
        // (0,1) is not its neighbor, so that entanglement is unwanted.
        let lat = LatticeSpec::new(3, 2).unwrap();
        let ops = vec![
            BusOp::attach(0, 0, X),
            BusOp::attach(1, 0, P),
            BusOp::attach(0, 1, P),
            BusOp::attach(2, 0, X),
        ];
        let report = validate_ops(&lat, &ops);
        assert!(!report.valid);
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::UnwantedEntanglement {
                a: (0, 1),
                b: (2, 0),
                ..
            }
        )));
        // Same-quadrature co-residents never entangle: no (0,0)–(2,0) report.
        assert!(!report.violations.iter().any(|v| matches!(
            v,
            Violation::UnwantedEntanglement {
                a: (0, 0),
                b: (2, 0),
                ..
            }
        )));
    }

    #[test]
    fn empty_schedule_is_incomplete_but_clean() {
        let lat = LatticeSpec::new(2, 2).unwrap();
        let report = validate_ops(&lat, &[]);
        assert!(!report.valid);
        assert!(report.violations.is_empty());
        assert!(report.created_edges.is_empty());
    }

    #[test]
    fn newbus_with_live_qubits_is_flagged() {
        let lat = LatticeSpec::new(1, 2).unwrap();
        let ops = vec![BusOp::attach(0, 0, X), BusOp::NewBus];
        let report = validate_ops(&lat, &ops);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::BusNotEmpty { op_index: 1, .. })));
    }

    #[test]
    fn duplicate_edge_is_flagged() {
        let lat = LatticeSpec::new(1, 2).unwrap();
        let ops = vec![
            BusOp::attach(0, 0, X),
            BusOp::attach(0, 1, P),
            BusOp::detach(0, 0, X),
            BusOp::detach(0, 1, P),
            BusOp::attach(0, 0, X),
            BusOp::attach(0, 1, P),
            BusOp::detach(0, 0, X),
            BusOp::detach(0, 1, P),
        ];
        let report = validate_ops(&lat, &ops);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DuplicateEdge { .. })));
    }

    #[test]
    fn json_round_trip() {
        let lat = LatticeSpec::new(2, 2).unwrap();
        let ops = vec![
            BusOp::attach(0, 0, X),
            BusOp::NewBus,
            BusOp::detach(0, 0, X),
        ];
        let sched = Schedule::new(lat, Strategy::Bricks(2), ops, 1);
        let text = sched.to_json();
        let parsed = Schedule::from_json(&text).unwrap();
        assert_eq!(sched, parsed);
        assert_eq!(parsed.meta.n_ops, 2);
        assert_eq!(parsed.meta.buses, 2);
    }

    #[test]
    fn strategy_strings_round_trip() {
        for s in [
            Strategy::NoReuse,
            Strategy::Line,
            Strategy::ZigZag2,
            Strategy::Bricks(5),
        ] {
            let text = s.to_string();
            assert_eq!(text.parse::<Strategy>().unwrap(), s);
        }
        assert!("spiral".parse::<Strategy>().is_err());
    }

    #[test]
    fn simulate_rejects_bad_detach() {
        let lat = LatticeSpec::new(1, 2).unwrap();
        let ops = vec![BusOp::detach(0, 0, X)];
        assert!(matches!(
            simulate_ops::<f64>(&lat, &ops, 0.5),
            Err(QubusError::MalformedSchedule(_))
        ));
    }
}
