//! Acceptance checks for the toolkit, one test per criterion. Each test
//! prints a single summary line on success and enforces a pinned runtime
//! budget, so the harness output reads as one pass/fail line per
//! criterion.

use std::collections::HashSet;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use latsurg::compiler::{
    compile_circuit, execute_schedule, parse_circuit, random_circuit, ExecConfig, ScheduleConfig,
    Tier,
};
use latsurg::dense::{
    apply_to_state, gate_matrix, global_phase_distance, rotation_matrix, DenseState, DenseUnitary,
};
use latsurg::gates::{decompose_gate, Angle, GateIR, GateKind, RotationTerm};
use latsurg::grid::GridRegistry;
use latsurg::noise::{
    build_decode_table, decode_and_correct, inject_error, logical_error_rate, ErrorEvent,
};
use latsurg::patch::{build_patch, read_check_signs, Orientation, PatchKind, PatchLayout};
use latsurg::pauli::{PauliLetter, PauliString};
use latsurg::protocols::{logical_cnot, logical_cz, logical_h, DenseWorkspace, ProtocolTrace};
use latsurg::render::render_ascii;
use latsurg::suites::run_suite;
use latsurg::surgery::{
    inject_state, rough_merge, seed_logical_tag, smooth_merge, SeedState,
};
use latsurg::tableau::{tableau_new, Tableau};

const GOLDEN_CIRCUIT: &str = include_str!("golden/five_qubit.circuit");
const GOLDEN_SCHEDULE: &str = include_str!("golden/five_qubit.schedule.json");
const GOLDEN_ASCII: &str = include_str!("golden/five_qubit.ascii.txt");

const ALL_SEEDS: [SeedState; 6] = [
    SeedState::Zero,
    SeedState::One,
    SeedState::Plus,
    SeedState::Minus,
    SeedState::PlusI,
    SeedState::MinusI,
];

fn finish(criterion: u32, start: Instant, budget: Duration, detail: &str) {
    let took = start.elapsed();
    assert!(
        took <= budget,
        "criterion {criterion} exceeded its {budget:?} budget: took {took:?}"
    );
    println!("criterion {criterion}: PASS - {detail} ({took:.2?} of {budget:?})");
}

fn all_plus_one(t: &Tableau, p: &PatchLayout) -> bool {
    let (z, x) = read_check_signs(t, p).unwrap();
    !z.contains(&-1) && !x.contains(&-1)
}

// ---------------------------------------------------------------------------
// Criterion 1: every gate-table row decomposes into axis rotations whose
// product reproduces the canonical unitary up to a global phase.
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_gate_rows_decompose_to_their_canonical_unitaries() {
    let start = Instant::now();
    let paulis = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
    let mut rows: Vec<(String, GateIR, usize)> = vec![
        ("X".into(), GateIR::plain(GateKind::X, &[0]).unwrap(), 1),
        ("Y".into(), GateIR::plain(GateKind::Y, &[0]).unwrap(), 1),
        ("Z".into(), GateIR::plain(GateKind::Z, &[0]).unwrap(), 1),
        ("RX(0.3)".into(), GateIR::rotation(GateKind::RX, 0, Angle::Radians(0.3)).unwrap(), 1),
        ("RY(0.7)".into(), GateIR::rotation(GateKind::RY, 0, Angle::Radians(0.7)).unwrap(), 1),
        ("RZ(1.1)".into(), GateIR::rotation(GateKind::RZ, 0, Angle::Radians(1.1)).unwrap(), 1),
        ("H".into(), GateIR::plain(GateKind::H, &[0]).unwrap(), 1),
        ("S".into(), GateIR::plain(GateKind::S, &[0]).unwrap(), 1),
        ("T".into(), GateIR::plain(GateKind::T, &[0]).unwrap(), 1),
        ("CNOT".into(), GateIR::plain(GateKind::Cnot, &[0, 1]).unwrap(), 2),
    ];
    for p1 in paulis {
        for p2 in paulis {
            rows.push((
                format!("C({p1:?},{p2:?})"),
                GateIR::controlled_pauli(p1, p2, 0, 1).unwrap(),
                2,
            ));
        }
    }
    assert_eq!(rows.len(), 19, "ten named rows plus all nine controlled-Pauli pairs");

    let mut worst = 0.0f64;
    for (name, gate, arity) in &rows {
        let canonical = gate_matrix(gate).unwrap();
        let terms = decompose_gate(gate).unwrap();
        let mut acc = DenseUnitary::identity(1 << arity);
        for term in &terms {
            acc = acc.matmul(&rotation_matrix(term).unwrap()).unwrap();
        }
        let err = global_phase_distance(&acc, &canonical).unwrap();
        assert!(err < 1e-10, "{name}: decomposition error {err:.3e}");
        worst = worst.max(err);
        if matches!(name.as_str(), "X" | "Y" | "Z") {
            assert_eq!(terms.len(), 1, "{name} decomposes as one axis turn");
            assert_eq!(
                terms[0].angle().to_string(),
                "pi/2",
                "{name} must carry the corrected quarter-turn angle"
            );
            println!(
                "criterion 1: note - {name} row uses angle pi/2: a full pi turn about {name} \
                 collapses to -I, while the pi/2 turn equals {name} up to the global phase -i, \
                 so the quarter-turn is the corrected table entry"
            );
        }
    }
    finish(
        1,
        start,
        Duration::from_secs(1),
        &format!("19 gate rows match their canonical unitaries, max elementwise error {worst:.3e}"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: merge outcomes equal the product of the prepared eigenvalues,
// and the signed joint operator lands in the merged stabilizer group.
// ---------------------------------------------------------------------------

fn facing_pair(d: usize, rough: bool, seed: u64) -> (Tableau, GridRegistry, PatchLayout, PatchLayout) {
    let long = 4 * d + 3;
    let short = 2 * d + 1;
    let (rows, cols) = if rough { (short, long) } else { (long, short) };
    let mut reg = GridRegistry::new(rows, cols);
    let t = tableau_new(rows * cols, seed);
    let a = build_patch(&mut reg, PatchKind::Rotated, d, (0, 0), Orientation::RoughLeftRight)
        .unwrap();
    let off = 2 * d + 2;
    let origin = if rough { (0, off) } else { (off, 0) };
    let b =
        build_patch(&mut reg, PatchKind::Rotated, d, origin, Orientation::RoughLeftRight).unwrap();
    (t, reg, a, b)
}

#[test]
fn criterion_2_merge_outcomes_equal_eigenvalue_products() {
    let start = Instant::now();
    let mut merges = 0u32;
    for d in [2usize, 3] {
        for rough in [true, false] {
            let pairs: [(SeedState, SeedState); 4] = if rough {
                [
                    (SeedState::Plus, SeedState::Plus),
                    (SeedState::Plus, SeedState::Minus),
                    (SeedState::Minus, SeedState::Plus),
                    (SeedState::Minus, SeedState::Minus),
                ]
            } else {
                [
                    (SeedState::Zero, SeedState::Zero),
                    (SeedState::Zero, SeedState::One),
                    (SeedState::One, SeedState::Zero),
                    (SeedState::One, SeedState::One),
                ]
            };
            for (sa, sb) in pairs {
                for seed in 0..100u64 {
                    let (mut t, mut reg, a, b) =
                        facing_pair(d, rough, 131 * seed + 17 * d as u64 + rough as u64);
                    inject_state(&mut t, &a, sa).unwrap();
                    inject_state(&mut t, &b, sb).unwrap();
                    let (_, ea) = seed_logical_tag(sa, &a).unwrap();
                    let (_, eb) = seed_logical_tag(sb, &b).unwrap();
                    let res = if rough {
                        rough_merge(&mut t, &mut reg, &a, &b).unwrap()
                    } else {
                        smooth_merge(&mut t, &mut reg, &a, &b).unwrap()
                    };
                    assert_eq!(
                        res.joint_outcome,
                        ea * eb,
                        "d={d} rough={rough} {sa:?}x{sb:?} seed {seed}: outcome"
                    );
                    let signed = if res.joint_outcome < 0 {
                        res.joint_operator.negated()
                    } else {
                        res.joint_operator.clone()
                    };
                    assert_eq!(
                        t.contains_stabilizer(&signed).unwrap(),
                        Some(1),
                        "d={d} rough={rough} {sa:?}x{sb:?} seed {seed}: signed joint operator"
                    );
                    merges += 1;
                }
            }
        }
    }
    assert_eq!(merges, 1600);
    finish(
        2,
        start,
        Duration::from_secs(10),
        "1600 merges (d in {2,3} x both kinds x 4 eigenpairs x 100 seeds): outcome = eigenvalue \
         product and the outcome-signed joint operator is stabilized",
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: the two-patch protocols induce exactly the ideal conjugation
// on logical generators, across all eight (m1, m2, m3) outcome branches.
// ---------------------------------------------------------------------------

fn protocol_fixture(
    d: usize,
    seed: u64,
) -> (Tableau, GridRegistry, PatchLayout, PatchLayout, PatchLayout) {
    let gap = 2 * d + 2;
    let side = 4 * d + 3;
    let mut reg = GridRegistry::new(side, side);
    let t = tableau_new(side * side, seed);
    let control = build_patch(&mut reg, PatchKind::Rotated, d, (0, 0), Orientation::RoughLeftRight)
        .unwrap();
    let trn = build_patch(&mut reg, PatchKind::Rotated, d, (gap, 0), Orientation::RoughLeftRight)
        .unwrap();
    let target =
        build_patch(&mut reg, PatchKind::Rotated, d, (gap, gap), Orientation::RoughLeftRight)
            .unwrap();
    (t, reg, control, target, trn)
}

fn seed_letter(s: SeedState) -> PauliLetter {
    match s {
        SeedState::Zero | SeedState::One => PauliLetter::Z,
        SeedState::Plus | SeedState::Minus => PauliLetter::X,
        SeedState::PlusI | SeedState::MinusI => PauliLetter::Y,
    }
}

fn logical_rep(p: &PatchLayout, letter: PauliLetter, n: usize) -> PauliString {
    match letter {
        PauliLetter::I => PauliString::identity(n),
        PauliLetter::X => p.logical_x().clone(),
        PauliLetter::Z => p.logical_z().clone(),
        PauliLetter::Y => p.logical_x().mul(p.logical_z()).unwrap().unsigned(),
    }
}

/// Image of a one-sided logical generator under ideal conjugation, as the
/// pair of letters carried by the (first, second) patch afterwards.
fn conjugated_letters(protocol: &str, first: bool, l: PauliLetter) -> (PauliLetter, PauliLetter) {
    use PauliLetter::{I, X, Y, Z};
    match (protocol, first, l) {
        ("cnot", true, X) => (X, X),
        ("cnot", true, Y) => (Y, X),
        ("cnot", true, Z) => (Z, I),
        ("cnot", false, X) => (I, X),
        ("cnot", false, Y) => (Z, Y),
        ("cnot", false, Z) => (Z, Z),
        ("cz", true, X) => (X, Z),
        ("cz", true, Y) => (Y, Z),
        ("cz", true, Z) => (Z, I),
        ("cz", false, X) => (Z, X),
        ("cz", false, Y) => (Z, Y),
        ("cz", false, Z) => (I, Z),
        _ => unreachable!("protocol {protocol} letter {l:?}"),
    }
}

fn outcome_branch(trace: &ProtocolTrace, mid_op: &str) -> (i8, i8, i8) {
    let get = |name: &str| {
        trace
            .steps
            .iter()
            .find(|s| s.op == name)
            .unwrap_or_else(|| panic!("trace has no {name} step"))
            .outcomes[0]
    };
    (get("smooth_merge"), get(mid_op), get("z_readout"))
}

#[test]
fn criterion_3_cnot_and_cz_induce_the_ideal_conjugation_maps() {
    let start = Instant::now();
    for (protocol, mid_op) in [("cnot", "rough_merge"), ("cz", "xz_joint")] {
        let mut branches: HashSet<(i8, i8, i8)> = HashSet::new();
        let mut letters: HashSet<(bool, PauliLetter)> = HashSet::new();
        let mut trials = 0u32;
        for d in [2usize, 3] {
            let side = 4 * d + 3;
            let n = side * side;
            let mut rng = ChaCha12Rng::seed_from_u64(300 + d as u64);
            for k in 0..50u64 {
                let (mut t, mut reg, c, tgt, trn) =
                    protocol_fixture(d, 1000 * d as u64 + 3 * k + protocol.len() as u64);
                let sc = ALL_SEEDS[rng.gen_range(0..6)];
                let st = ALL_SEEDS[rng.gen_range(0..6)];
                inject_state(&mut t, &c, sc).unwrap();
                inject_state(&mut t, &tgt, st).unwrap();
                let (_, sign_c) = seed_logical_tag(sc, &c).unwrap();
                let (_, sign_t) = seed_logical_tag(st, &tgt).unwrap();
                let trace = if protocol == "cnot" {
                    logical_cnot(&mut t, &mut reg, &c, &tgt, &trn).unwrap()
                } else {
                    logical_cz(&mut t, &mut reg, &c, &tgt, &trn).unwrap()
                };
                branches.insert(outcome_branch(&trace, mid_op));
                for (input, first, sign) in
                    [(seed_letter(sc), true, sign_c), (seed_letter(st), false, sign_t)]
                {
                    let (lc, lt) = conjugated_letters(protocol, first, input);
                    let expected = logical_rep(&c, lc, n)
                        .mul(&logical_rep(&tgt, lt, n))
                        .unwrap()
                        .unsigned();
                    assert_eq!(
                        t.contains_stabilizer(&expected).unwrap(),
                        Some(sign),
                        "{protocol} d={d} trial {k}: image of {input:?} on \
                         {}-side ({sc:?},{st:?})",
                        if first { "first" } else { "second" }
                    );
                    letters.insert((first, input));
                }
                assert_eq!(
                    t.contains_stabilizer(trn.logical_x()).unwrap(),
                    Some(1),
                    "{protocol} d={d} trial {k}: transitional patch reset to |+>"
                );
                for p in [&c, &tgt, &trn] {
                    assert!(
                        all_plus_one(&t, p),
                        "{protocol} d={d} trial {k}: residual check flips"
                    );
                }
                trials += 1;
            }
        }
        assert_eq!(trials, 100, "{protocol}: 100 seeded trials");
        assert_eq!(
            branches.len(),
            8,
            "{protocol}: all (m1,m2,m3) branches must be exercised, saw {branches:?}"
        );
        assert_eq!(
            letters.len(),
            6,
            "{protocol}: X/Y/Z inputs must be exercised on both sides, saw {letters:?}"
        );
    }
    finish(
        3,
        start,
        Duration::from_secs(30),
        "200 seeded trials (cnot + cz, d in {2,3}): generator images equal ideal conjugation \
         with prepared signs, all 8 outcome branches exercised per protocol",
    );
}

// ---------------------------------------------------------------------------
// Criterion 4: the six seed states inject with correct tags at d in {2,3};
// dense non-Clifford injection and d=2 -> d=3 growth hold target fidelity.
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_injection_and_growth_reach_their_targets() {
    let start = Instant::now();
    let mut cases = 0u32;
    for d in [2usize, 3] {
        let side = 2 * d + 1;
        for (i, &s) in ALL_SEEDS.iter().enumerate() {
            for rep in 0..5u64 {
                let mut reg = GridRegistry::new(side, side);
                let mut t =
                    tableau_new(side * side, 40_000 + 100 * d as u64 + 10 * i as u64 + rep);
                let p = build_patch(
                    &mut reg,
                    PatchKind::Rotated,
                    d,
                    (0, 0),
                    Orientation::RoughLeftRight,
                )
                .unwrap();
                inject_state(&mut t, &p, s).unwrap();
                let (tag, sign) = seed_logical_tag(s, &p).unwrap();
                assert_eq!(
                    t.contains_stabilizer(&tag).unwrap(),
                    Some(sign),
                    "d={d} {s:?} rep {rep}: logical tag"
                );
                assert!(all_plus_one(&t, &p), "d={d} {s:?} rep {rep}: check frame");
                cases += 1;
            }
        }
    }
    assert_eq!(cases, 60);

    let alpha = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let beta = Complex64::from_polar(FRAC_1_SQRT_2, PI / 4.0);
    let mut worst = 1.0f64;
    for seed in 0..3u64 {
        let mut reg_a = GridRegistry::new(9, 9);
        let p2 = build_patch(&mut reg_a, PatchKind::Rotated, 2, (0, 0), Orientation::RoughLeftRight)
            .unwrap();
        let mut reg_b = GridRegistry::new(9, 9);
        let p3 = build_patch(&mut reg_b, PatchKind::Rotated, 3, (0, 0), Orientation::RoughLeftRight)
            .unwrap();
        let mut ws = DenseWorkspace::for_patches(&[&p2, &p3], 500 + seed).unwrap();
        let term = RotationTerm::new(
            PauliString::single(p2.n(), 0, PauliLetter::Z).unwrap(),
            Angle::EIGHTH_PI,
        )
        .unwrap();
        ws.inject_rotation_dense(&p2, &term).unwrap();
        let f2 = ws.logical_fidelity(&p2, alpha, beta).unwrap();
        assert!(f2 >= 1.0 - 1e-10, "seed {seed}: post-injection fidelity {f2}");
        ws.expand_dense(&p2, &p3).unwrap();
        let f3 = ws.logical_fidelity(&p3, alpha, beta).unwrap();
        assert!(f3 >= 1.0 - 1e-10, "seed {seed}: post-growth fidelity {f3}");
        worst = worst.min(f2).min(f3);
    }
    finish(
        4,
        start,
        Duration::from_secs(30),
        &format!(
            "60 tableau injections carry clean tags; dense magic-angle injection plus d=2->3 \
             growth keeps fidelity >= {worst:.12}"
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 5: the patch-level Hadamard maps all six states correctly and
// hands back the original orientation and footprint.
// ---------------------------------------------------------------------------

fn h_image(s: SeedState) -> SeedState {
    match s {
        SeedState::Zero => SeedState::Plus,
        SeedState::One => SeedState::Minus,
        SeedState::Plus => SeedState::Zero,
        SeedState::Minus => SeedState::One,
        SeedState::PlusI => SeedState::MinusI,
        SeedState::MinusI => SeedState::PlusI,
    }
}

#[test]
fn criterion_5_hadamard_maps_states_and_restores_the_footprint() {
    let start = Instant::now();
    let d = 3usize;
    let gap = 2 * d + 2;
    let side = gap + 2 * d + 1;
    for k in 0..50u64 {
        let s = ALL_SEEDS[(k % 6) as usize];
        let mut reg = GridRegistry::new(side, side);
        let mut t = tableau_new(side * side, 5_000 + k);
        let p = build_patch(&mut reg, PatchKind::Rotated, d, (0, 0), Orientation::RoughLeftRight)
            .unwrap();
        let _other =
            build_patch(&mut reg, PatchKind::Rotated, d, (0, gap), Orientation::RoughLeftRight)
                .unwrap();
        inject_state(&mut t, &p, s).unwrap();
        let (home, _trace) = logical_h(&mut t, &mut reg, &p).unwrap();
        assert_eq!(home.origin(), p.origin(), "trial {k}: origin restored");
        assert_eq!(home.orientation(), p.orientation(), "trial {k}: orientation restored");
        assert_eq!(home.d(), d, "trial {k}: distance preserved");
        let (tag, sign) = seed_logical_tag(h_image(s), &home).unwrap();
        assert_eq!(
            t.contains_stabilizer(&tag).unwrap(),
            Some(sign),
            "trial {k}: H on {s:?}"
        );
        assert!(all_plus_one(&t, &home), "trial {k}: check frame after H");
    }
    finish(
        5,
        start,
        Duration::from_secs(10),
        "50 seeded trials at d=3: all six states map under H and the original orientation and \
         footprint come back",
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: the lookup decoder corrects every single-site error at d=3,
// and Monte Carlo failure rates separate d=3 below d=2 by over 3 sigma.
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_decoder_corrects_singles_and_separates_distances() {
    let start = Instant::now();
    let d = 3usize;
    let side = 2 * d + 1;
    let mut reg = GridRegistry::new(side, side);
    let patch =
        build_patch(&mut reg, PatchKind::Rotated, d, (0, 0), Orientation::RoughLeftRight).unwrap();
    let table = build_decode_table(&patch).unwrap();
    let mut singles = 0u32;
    for &cell in patch.data_qubits() {
        let q = cell.0 * side + cell.1;
        for letter in [PauliLetter::X, PauliLetter::Y, PauliLetter::Z] {
            for plus in [false, true] {
                let mut t = tableau_new(patch.n(), 9);
                let seed = if plus { SeedState::Plus } else { SeedState::Zero };
                inject_state(&mut t, &patch, seed).unwrap();
                inject_error(
                    &mut t,
                    patch.n(),
                    &ErrorEvent { location: q, pauli: letter, round: 0 },
                )
                .unwrap();
                let out = decode_and_correct(&mut t, &patch, &table).unwrap();
                assert!(!out.flagged, "cell {cell:?} {letter:?}: decoder flagged");
                assert!(!out.syndrome.is_trivial(), "cell {cell:?} {letter:?}: undetected");
                assert!(all_plus_one(&t, &patch), "cell {cell:?} {letter:?}: residual flips");
                let tag = if plus { patch.logical_x() } else { patch.logical_z() };
                assert_eq!(
                    t.contains_stabilizer(tag).unwrap(),
                    Some(1),
                    "cell {cell:?} {letter:?}: logical sector flipped"
                );
            }
            singles += 1;
        }
    }
    assert_eq!(singles, 27, "every single-site error class at d=3");

    let trials = 100_000u64;
    let p_phys = 1e-2;
    let e2 = logical_error_rate(2, p_phys, trials, 90).unwrap();
    let e3 = logical_error_rate(3, p_phys, trials, 91).unwrap();
    assert!(
        e3.rate < e2.rate,
        "d=3 must beat d=2: {} vs {}",
        e3.rate,
        e2.rate
    );
    let sigma = (e2.stderr.powi(2) + e3.stderr.powi(2)).sqrt();
    let separation = (e2.rate - e3.rate) / sigma;
    assert!(separation > 3.0, "separation {separation:.2} sigma is too small");
    finish(
        6,
        start,
        Duration::from_secs(120),
        &format!(
            "27/27 single-site errors corrected; at p={p_phys} over {trials} trials each, \
             rate(d=2)={:.5}+/-{:.5} vs rate(d=3)={:.5}+/-{:.5}, separation {separation:.1} sigma",
            e2.rate, e2.stderr, e3.rate, e3.stderr
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: the reference five-qubit program compiles to the pinned
// six-step schedule with the expected action multisets and metrics.
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_reference_program_compiles_to_the_pinned_schedule() {
    let start = Instant::now();
    let schedule = compile_circuit(GOLDEN_CIRCUIT, &ScheduleConfig::default()).unwrap();
    assert_eq!(schedule.steps.len(), 6, "six timesteps");
    let expected: [&[&str]; 6] = [
        &["Z_{pi/8} @ q0", "Z_{pi/8} @ q1", "Z_{pi/4} @ q4"],
        &["cnot q2 -> q0 [trn 0]"],
        &["Z_{pi/4} @ q4", "X_L @ q0", "Z_{pi/4} @ q1", "Z_{pi/4} @ q2"],
        &["X_{pi/4} @ q2", "cnot q0 -> q1 [trn 0]"],
        &["Z_{pi/4} @ q2", "cz q3 ~ q4 [trn 0]"],
        &["Z_L @ q3", "Z_{pi/4} @ q4"],
    ];
    for (step, exp) in schedule.steps.iter().zip(expected) {
        let mut got: Vec<String> = step.actions.iter().map(|a| a.to_string()).collect();
        let mut want: Vec<String> = exp.iter().map(|s| s.to_string()).collect();
        got.sort();
        want.sort();
        assert_eq!(got, want, "step {} action multiset", step.index);
    }
    assert_eq!(schedule.metrics.tiles_used, 6);
    assert_eq!(schedule.metrics.timesteps, 6);
    finish(
        7,
        start,
        Duration::from_secs(1),
        "reference program compiles to six steps with the pinned action multisets and \
         {tiles_used: 6, timesteps: 6}",
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: random programs replayed through the pipeline agree with
// directly computed dense references on both execution tiers.
// ---------------------------------------------------------------------------

fn parse_tag(n: usize, tag: &str) -> (PauliString, f64) {
    let sign = match tag.as_bytes()[0] {
        b'+' => 1.0,
        b'-' => -1.0,
        _ => panic!("tag {tag} has no sign"),
    };
    let (letters, cells) = tag[1..].split_once('@').unwrap_or_else(|| panic!("bad tag {tag}"));
    let qubits: Vec<usize> = cells
        .split('q')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(letters.len(), qubits.len(), "tag {tag} shape");
    let pairs: Vec<(usize, PauliLetter)> = letters
        .chars()
        .zip(qubits)
        .map(|(ch, q)| {
            let l = match ch {
                'X' => PauliLetter::X,
                'Y' => PauliLetter::Y,
                'Z' => PauliLetter::Z,
                other => panic!("tag {tag} has letter {other}"),
            };
            (q, l)
        })
        .collect();
    (PauliString::from_support(n, &pairs).unwrap(), sign)
}

#[test]
fn criterion_8_random_programs_agree_with_dense_references() {
    let start = Instant::now();

    let mut rng = ChaCha12Rng::seed_from_u64(881);
    let mut worst = 1.0f64;
    for i in 0..50u64 {
        let src = random_circuit(&mut rng, 5, 12, false);
        let schedule = compile_circuit(&src, &ScheduleConfig::default()).unwrap();
        let rep = execute_schedule(&schedule, &ExecConfig { tier: Tier::Logical, seed: 10_000 + i })
            .unwrap();
        let f = rep.fidelity.expect("statevector tier reports fidelity");
        assert!(f >= 1.0 - 1e-8, "circuit {i}: fidelity {f}\n{src}");
        worst = worst.min(f);
    }

    let mut rng = ChaCha12Rng::seed_from_u64(882);
    let mut tag_checks = 0u32;
    for i in 0..50u64 {
        let src = random_circuit(&mut rng, 4, 8, true);
        let ir = parse_circuit(&src).unwrap();
        let mut reference = DenseState::zero(ir.n_qubits).unwrap();
        for g in &ir.gates {
            apply_to_state(&mut reference, &gate_matrix(g).unwrap(), &g.qubits).unwrap();
        }
        let schedule = compile_circuit(&src, &ScheduleConfig::default()).unwrap();
        let mut first_tags: Option<Vec<String>> = None;
        for seed in 0..20u64 {
            let rep = execute_schedule(
                &schedule,
                &ExecConfig { tier: Tier::Physical, seed: 777 * i + seed },
            )
            .unwrap();
            match &first_tags {
                None => first_tags = Some(rep.tags.clone()),
                Some(t0) => assert_eq!(
                    &rep.tags, t0,
                    "circuit {i} seed {seed}: tags must be seed-invariant\n{src}"
                ),
            }
            for tag in &rep.tags {
                let (op, sign) = parse_tag(ir.n_qubits, tag);
                let e = reference.expectation_pauli(&op).unwrap();
                assert!(
                    (e.re - sign).abs() < 1e-9 && e.im.abs() < 1e-9,
                    "circuit {i} seed {seed}: tag {tag} has reference expectation {e}\n{src}"
                );
                tag_checks += 1;
            }
        }
        assert!(
            !first_tags.unwrap_or_default().is_empty(),
            "circuit {i} produced no tags\n{src}"
        );
    }
    finish(
        8,
        start,
        Duration::from_secs(120),
        &format!(
            "50 statevector replays with fidelity >= {worst:.10}; 50 stabilizer programs x 20 \
             seeds: {tag_checks} tag checks against dense references, all seed-invariant"
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: equal seeds reproduce byte-identical outputs, and the pinned
// golden schedule and render stay exact.
// ---------------------------------------------------------------------------

#[test]
fn criterion_9_fixed_seeds_reproduce_byte_identical_outputs() {
    let start = Instant::now();
    let s1 = compile_circuit(GOLDEN_CIRCUIT, &ScheduleConfig::default()).unwrap();
    let s2 = compile_circuit(GOLDEN_CIRCUIT, &ScheduleConfig::default()).unwrap();
    let j1 = serde_json::to_string(&s1).unwrap();
    assert_eq!(j1, serde_json::to_string(&s2).unwrap(), "compilation is deterministic");
    assert_eq!(format!("{j1}\n"), GOLDEN_SCHEDULE, "schedule JSON matches the pinned golden");

    let a1 = render_ascii(&s1).unwrap();
    assert_eq!(a1, render_ascii(&s2).unwrap(), "rendering is deterministic");
    assert_eq!(a1, GOLDEN_ASCII, "ascii render matches the pinned golden");

    for tier in [Tier::Logical, Tier::Physical] {
        let r1 = execute_schedule(&s1, &ExecConfig { tier, seed: 2718 }).unwrap();
        let r2 = execute_schedule(&s1, &ExecConfig { tier, seed: 2718 }).unwrap();
        assert_eq!(
            serde_json::to_string(&r1).unwrap(),
            serde_json::to_string(&r2).unwrap(),
            "{tier:?} execution logs are byte-identical at equal seeds"
        );
    }

    let d1 = run_suite("decoder", 2718).unwrap();
    let d2 = run_suite("decoder", 2718).unwrap();
    assert_eq!(d1.csv, d2.csv, "decoder CSV block is seed-reproducible");
    let lines1: Vec<String> =
        d1.checks.iter().map(|c| serde_json::to_string(c).unwrap()).collect();
    let lines2: Vec<String> =
        d2.checks.iter().map(|c| serde_json::to_string(c).unwrap()).collect();
    assert_eq!(lines1, lines2, "decoder suite records are seed-reproducible");

    finish(
        9,
        start,
        Duration::from_secs(120),
        "compilation, rendering, both execution tiers, and the decoder suite reproduce \
         byte-identical output at equal seeds; pinned goldens match exactly",
    );
}
