//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its measured numbers.
//!
//! Run with `cargo test -p qubus --test acceptance -- --nocapture` to see the
//! per-criterion summary lines.

use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qubus::budget::{
    dephasing_prob, max_brick_size, max_brick_size_no_reuse, reuse_advantage, BrickLimit,
    NoiseParams,
};
use qubus::float::wrap_angle;
use qubus::lattice::LatticeSpec;
use qubus::parallel::{
    check_conflicts, merged_correction_frame, schedule_parallel, simulate_merged, Pitch, StripSpec,
};
use qubus::phase::{entangling_sum, extract_diagonal_unitary};
use qubus::planner::{ops_bricks, ops_no_reuse, ops_width1_min, ops_width2_min};
use qubus::schedule::{correction_frame, simulate_schedule, validate_ops, Strategy};
use qubus::search::{brute_force_max_edges, SearchWidth};
use qubus::state::sigma_z;
use qubus::verify::verify_cluster_state;
use qubus::{default_beta, CondDisplacement, HybridState64, Quadrature, Sign};

use Quadrature::{Momentum as P, Position as X};
use Sign::{Minus, Plus};

fn op(qubit: usize, quad: Quadrature, sign: Sign, beta: f64) -> CondDisplacement<f64> {
    CondDisplacement::new(qubit, quad, sign, beta).unwrap()
}

/// U_e(x₂)U_e(−p₁)U_e(−x₂)U_e(p₁), applied right-to-left.
fn two_qubit_gate(beta: f64) -> Vec<CondDisplacement<f64>> {
    vec![
        op(0, P, Plus, beta),
        op(1, X, Minus, beta),
        op(0, P, Minus, beta),
        op(1, X, Plus, beta),
    ]
}

/// U_e(x₃)U_e(−p₂)U_e(−x₃)U_e(−x₁)U_e(p₂)U_e(x₁), applied right-to-left.
fn six_op_chain(beta: f64) -> Vec<CondDisplacement<f64>> {
    vec![
        op(0, X, Plus, beta),
        op(1, P, Plus, beta),
        op(0, X, Minus, beta),
        op(2, X, Minus, beta),
        op(1, P, Minus, beta),
        op(2, X, Plus, beta),
    ]
}

/// Criterion 1: the four-op gate disentangles the bus and its phase table has
/// entangling sum π within 1e−9, in under a millisecond.
#[test]
fn criterion_1_gate_correctness() {
    let beta = default_beta::<f64>();
    let before = HybridState64::init_register(2).unwrap();

    let started = Instant::now();
    let after = before.apply_all(&two_qubit_gate(beta)).unwrap();
    let max_alpha = after.max_alpha_norm();
    let table = extract_diagonal_unitary(&before, &after).unwrap();
    let sum = entangling_sum(&table).unwrap();
    let elapsed = started.elapsed();

    assert!(max_alpha <= 1e-9, "max |alpha| = {max_alpha:e}");
    assert!(
        (sum - std::f64::consts::PI).abs() <= 1e-9,
        "entangling sum {sum}"
    );
    assert!(elapsed < Duration::from_millis(1), "took {elapsed:?}");
    println!(
        "criterion 1: PASS (max|alpha|={max_alpha:.2e}, sum={sum:.12}, {elapsed:?})"
    );
}

/// Criterion 2: the six-op chain produces (π/4)(z₁z₂ + z₂z₃) within 1e−9,
/// equals two composed gates, and costs 6 operations instead of 8.
#[test]
fn criterion_2_chained_gates() {
    let beta = default_beta::<f64>();
    let before = HybridState64::init_register(3).unwrap();
    let chain = six_op_chain(beta);
    assert_eq!(chain.len(), 6);
    assert_eq!(2 * two_qubit_gate(beta).len(), 8);

    let after = before.apply_all(&chain).unwrap();
    let table = extract_diagonal_unitary(&before, &after).unwrap();
    let mut worst: f64 = 0.0;
    for index in 0..8 {
        let z0 = sigma_z(index, 0) as f64;
        let z1 = sigma_z(index, 1) as f64;
        let z2 = sigma_z(index, 2) as f64;
        let expected = std::f64::consts::FRAC_PI_4 * (z0 * z1 + z1 * z2);
        let delta = wrap_angle(table.get(index).unwrap() - expected).abs();
        worst = worst.max(delta);
    }
    assert!(worst <= 1e-9, "worst branch residual {worst:e}");

    // Pointwise equality with two independent gates on (0,1) and (1,2).
    let gate01 = before.apply_all(&two_qubit_gate(beta)).unwrap();
    let gate12 = {
        let ops = vec![
            op(1, P, Plus, beta),
            op(2, X, Minus, beta),
            op(1, P, Minus, beta),
            op(2, X, Plus, beta),
        ];
        before.apply_all(&ops).unwrap()
    };
    let t01 = extract_diagonal_unitary(&before, &gate01).unwrap();
    let t12 = extract_diagonal_unitary(&before, &gate12).unwrap();
    for index in 0..8 {
        let composed = t01.get(index).unwrap() + t12.get(index).unwrap();
        let delta = wrap_angle(table.get(index).unwrap() - composed).abs();
        assert!(delta <= 1e-9, "branch {index}: {delta:e}");
    }
    println!("criterion 2: PASS (6 ops vs 8, worst residual {worst:.2e})");
}

/// Criterion 3: zig-zag and b=2 brick plans build verified clusters on the
/// five reference lattices within 1e−6, in under 10 seconds total.
#[test]
fn criterion_3_end_to_end_builds() {
    let started = Instant::now();
    let mut summary = Vec::new();
    for (m, n) in [(2usize, 2usize), (2, 3), (3, 3), (3, 4), (4, 4)] {
        let lattice = LatticeSpec::new(m, n).unwrap();
        for strategy in [Strategy::ZigZag2, Strategy::Bricks(2)] {
            let schedule = qubus::planner::plan(&lattice, strategy).unwrap();
            let state = simulate_schedule::<f64>(&schedule).unwrap();
            let frame = correction_frame::<f64>(&lattice, &schedule.ops).unwrap();
            let report = verify_cluster_state(&state, &lattice, &frame, 1e-6).unwrap();
            assert!(
                report.pass,
                "{strategy} on {m}x{n}: {:?}",
                report.stabilizer_values
            );
            let min = report.min_stabilizer();
            assert!((min - 1.0).abs() <= 1e-6);
            summary.push(format!("{m}x{n}/{strategy}: min K = {min:.9}"));
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!("criterion 3: PASS ({}; {elapsed:?})", summary.join(", "));
}

/// Criterion 4: all four count formulas reproduce their closed forms exactly
/// over 2 ≤ m, n ≤ 50, including the b = 1 reduction to 5mn − 2(m+n).
#[test]
fn criterion_4_formula_reproduction() {
    for m in 2..=50usize {
        for n in 2..=50usize {
            let lattice = LatticeSpec::new(m, n).unwrap();
            let (mi, ni) = (m as u64, n as u64);
            assert_eq!(ops_no_reuse(m, n).unwrap(), 8 * mi * ni - 4 * (mi + ni));
            assert_eq!(ops_no_reuse(m, n).unwrap(), 4 * lattice.n_edges() as u64);
            assert_eq!(ops_width1_min(m, n).unwrap(), 4 * mi * ni - 8);
            assert_eq!(
                ops_width2_min(m, n).unwrap(),
                3 * mi * ni - 2 * (mi + ni) + 4
            );
            for b in 1..=6usize {
                let got = ops_bricks(m, n, b).unwrap();
                let expect = num_rational::Ratio::new(
                    (3 * b as i64 + 2) * (m * n) as i64 - 2 * (m + n) as i64 * b as i64,
                    b as i64,
                );
                assert_eq!(got, expect, "{m}x{n} b={b}");
            }
            let b1 = ops_bricks(m, n, 1).unwrap();
            assert!(b1.is_integer());
            assert_eq!(
                b1.to_integer(),
                5 * (m * n) as i64 - 2 * (m + n) as i64
            );
        }
    }
    println!("criterion 4: PASS (formulas exact over 2..=50 squared, b in 1..=6)");
}

/// Criterion 5: exhaustive search reproduces the edge bounds mn−1 (width 1)
/// and 3mn/2−2 (width 2, even mn, both dimensions ≥ 2) on every lattice with
/// mn ≤ 12, with violation-free witnesses, in under 60 seconds.
#[test]
fn criterion_5_edge_bound_oracle() {
    let started = Instant::now();
    let mut cases = 0usize;
    for m in 1..=12usize {
        for n in m..=12usize {
            if m * n > 12 || m * n < 2 {
                continue;
            }
            let lattice = LatticeSpec::new(m, n).unwrap();
            let w1 = brute_force_max_edges(&lattice, SearchWidth::One).unwrap();
            assert_eq!(w1.max_edges, m * n - 1, "width1 {m}x{n}");
            let report = validate_ops(&lattice, &w1.witness);
            assert!(report.violations.is_empty(), "width1 {m}x{n} witness");
            assert_eq!(report.created_edges.len(), w1.max_edges);
            cases += 1;

            // The width-2 closed-box bound needs two genuine rows/columns and
            // even mn; on 1×n it would exceed the total edge count.
            if m >= 2 && n >= 2 && (m * n) % 2 == 0 {
                let w2 = brute_force_max_edges(&lattice, SearchWidth::Two).unwrap();
                assert_eq!(w2.max_edges, 3 * m * n / 2 - 2, "width2 {m}x{n}");
                let report = validate_ops(&lattice, &w2.witness);
                assert!(report.violations.is_empty(), "width2 {m}x{n} witness");
                assert_eq!(report.created_edges.len(), w2.max_edges);
                cases += 1;
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!("criterion 5: PASS ({cases} searches agree with bounds; {elapsed:?})");
}

/// Criterion 6: the worked example with γτ = 5×10⁻⁴, η = 10⁻⁴, β² = π/8,
/// ε = 10⁻² gives brick sizes 5 (17 qubits, 20 gates) versus 2 (8 qubits,
/// 8 gates), with ε(b=5) ≤ 0.01 < ε(b=6).
#[test]
fn criterion_6_worked_example() {
    let params = NoiseParams::with_default_beta(5e-4, 1e-4, 0.01).unwrap();
    let lego = max_brick_size(&params);
    let single = max_brick_size_no_reuse(&params);
    assert_eq!(lego, BrickLimit::Bounded(5));
    assert_eq!(lego.qubits_connected(), Some(17));
    assert_eq!(lego.gates(), Some(20));
    assert_eq!(single, BrickLimit::Bounded(2));
    assert_eq!(single.qubits_connected(), Some(8));
    assert_eq!(single.gates(), Some(8));

    let eps5 = dephasing_prob(&params, 6 * 5 + 4, 4 * 5);
    let eps6 = dephasing_prob(&params, 6 * 6 + 4, 4 * 6);
    assert!(eps5 <= 0.01, "eps(b=5) = {eps5}");
    assert!(0.01 < eps6, "eps(b=6) = {eps6}");

    // Headline factor: at least twice the connected qubits with reuse.
    assert!(lego.qubits_connected().unwrap() >= 2 * single.qubits_connected().unwrap());
    println!(
        "criterion 6: PASS (b_lego=5/17q/20g, b_single=2/8q/8g, eps5={eps5:.6}, eps6={eps6:.6})"
    );
}

/// Criterion 7: the width-4 two-bus schedule is collision-free with the
/// six-slot stagger and delivers 20 CPHASE gates per bus use at b = 5 (shown
/// on a horizon long enough to contain an interior brick); the merged
/// simulation of the 4×6 strip passes stabilizer verification. Under 30 s.
#[test]
fn criterion_7_parallel_schedule() {
    let started = Instant::now();

    // Gate accounting needs an interior brick, so measure on a 4×10 horizon.
    let accounting = StripSpec {
        width: 4,
        horizon: 10,
        buses: 2,
        pitch: Pitch::OnePerTwoRows,
        brick: Some(5),
    };
    let sched = schedule_parallel(&accounting).unwrap();
    assert!(check_conflicts(&sched).is_empty());
    assert_eq!(sched.lines[1].start_slot - sched.lines[0].start_slot, 6);
    let max_gates = sched
        .lines
        .iter()
        .flat_map(|l| l.segments.iter().map(|s| s.gates))
        .max()
        .unwrap();
    assert_eq!(max_gates, 20, "largest per-bus-use gate count");
    let interior = &sched.lines[1].segments[1];
    assert_eq!((interior.ops, interior.gates), (34, 20));

    // The stitched line's interior bus-use matches the brick error budget.
    let params = NoiseParams::with_default_beta(5e-4, 1e-4, 0.01).unwrap();
    assert!(dephasing_prob(&params, interior.ops as u64, interior.gates as u64) <= 0.01);

    // Merged exact simulation of the 4×6 strip (24 qubits).
    let strip = StripSpec {
        width: 4,
        horizon: 6,
        buses: 2,
        pitch: Pitch::OnePerTwoRows,
        brick: Some(5),
    };
    let sched = schedule_parallel(&strip).unwrap();
    assert!(check_conflicts(&sched).is_empty());
    let state = simulate_merged::<f64>(&sched).unwrap();
    assert!(state.is_disentangled());
    let frame = merged_correction_frame::<f64>(&sched).unwrap();
    let report = state.verify_cluster(&sched.lattice, &frame, 1e-6).unwrap();
    assert!(report.pass, "min K = {}", report.min_stabilizer());

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    println!(
        "criterion 7: PASS (interior bus-use 34 ops/20 gates, 4x6 min K = {:.9}, {elapsed:?})",
        report.min_stabilizer()
    );
}

/// Criterion 8: the rate-based reuse verdict agrees with directly comparing
/// solved brick sizes on 1000 random draws, except inside the documented
/// crossover band (pre-floor estimates within one brick of each other),
/// where disagreements are reported rather than failed.
#[test]
fn criterion_8_reuse_advantage_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(20110329);
    let mut in_band_disagreements = 0usize;
    let mut in_band = 0usize;
    for draw in 0..1000 {
        let gamma_tau = 10f64.powf(rng.gen_range(-6.0..-2.0));
        let eta_beta = 10f64.powf(rng.gen_range(-6.0..-2.0));
        // Draws fix ε at the paper's 10⁻² working point; β² is folded into η.
        let params = NoiseParams::new(gamma_tau, eta_beta, 1.0, 0.01).unwrap();
        let advantage = reuse_advantage(&params);
        let lego = max_brick_size(&params);
        let single = max_brick_size_no_reuse(&params);
        let direct_better = match (lego.qubits_connected(), single.qubits_connected()) {
            (Some(a), Some(b)) => a > b,
            (None, Some(_)) => true,
            (Some(_), None) => false,
            (None, None) => false,
        };
        if advantage.in_margin_band {
            in_band += 1;
            if direct_better != advantage.lego_better {
                in_band_disagreements += 1;
            }
        } else {
            assert_eq!(
                direct_better, advantage.lego_better,
                "draw {draw}: gamma_tau={gamma_tau:e} eta_beta={eta_beta:e} \
                 lego={lego:?} single={single:?}"
            );
        }
    }
    println!(
        "criterion 8: PASS (1000 draws; {in_band} in crossover band, \
         {in_band_disagreements} reported disagreements inside it)"
    );
}
