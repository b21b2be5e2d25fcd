//! Pinned patch-level properties: syndrome locality (exhaustive) and
//! extraction-mode agreement on random code-space states.

use latsurg::grid::GridRegistry;
use latsurg::patch::{
    build_patch, measure_syndromes, prepare_plus, prepare_zero, Orientation, PatchKind,
    SyndromeMode,
};
use latsurg::pauli::{PauliLetter, PauliString};
use latsurg::tableau::Tableau;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Every single data-qubit Pauli error on a rotated d=3 patch flips exactly
/// the checks that anticommute with it: 9 qubits × 3 letters, all 27 cases.
#[test]
fn syndrome_locality_all_27_single_errors() {
    let mut reg = GridRegistry::new(7, 7);
    let p = build_patch(&mut reg, PatchKind::Rotated, 3, (0, 0), Orientation::RoughLeftRight)
        .unwrap();
    let mut cases = 0;
    for &cell in p.data_qubits() {
        let q = reg.cell_index(cell).unwrap();
        for letter in [PauliLetter::X, PauliLetter::Y, PauliLetter::Z] {
            let mut t = Tableau::new(reg.cell_count(), 7);
            prepare_zero(&mut t, &p).unwrap();
            let err = PauliString::single(p.n(), q, letter).unwrap();
            t.apply_pauli(&err).unwrap();
            let rec = measure_syndromes(&mut t, &p, SyndromeMode::Direct).unwrap();
            for (i, c) in p.z_checks().iter().enumerate() {
                let expect_flip = !c.operator.commutes(&err).unwrap();
                assert_eq!(
                    rec.z_values[i] == -1,
                    expect_flip,
                    "cell {cell:?} letter {letter:?} Z-check {i}"
                );
            }
            for (i, c) in p.x_checks().iter().enumerate() {
                let expect_flip = !c.operator.commutes(&err).unwrap();
                assert_eq!(
                    rec.x_values[i] == -1,
                    expect_flip,
                    "cell {cell:?} letter {letter:?} X-check {i}"
                );
            }
            cases += 1;
        }
    }
    assert_eq!(cases, 27);
}

/// Circuit-mode and direct-mode records agree on 100 random code-space
/// states when started from the same stream position.
#[test]
fn extraction_modes_agree_on_code_space() {
    let mut rng = ChaCha12Rng::seed_from_u64(515);
    for trial in 0..100 {
        let (kind, d) = match trial % 4 {
            0 => (PatchKind::Rotated, 2),
            1 => (PatchKind::Rotated, 3),
            2 => (PatchKind::Unrotated, 2),
            _ => (PatchKind::Unrotated, 3),
        };
        let side = 2 * d + 1;
        let mut reg = GridRegistry::new(side, side);
        let p = build_patch(&mut reg, kind, d, (0, 0), Orientation::RoughLeftRight).unwrap();
        let mut t = Tableau::new(reg.cell_count(), 9000 + trial as u64);
        // Random code-space state: |0⟩ or |+⟩ base, then random logical
        // Paulis and possibly a logical measurement collapse.
        if rng.gen::<bool>() {
            prepare_zero(&mut t, &p).unwrap();
        } else {
            prepare_plus(&mut t, &p).unwrap();
        }
        if rng.gen::<bool>() {
            t.apply_pauli(p.logical_x()).unwrap();
        }
        if rng.gen::<bool>() {
            t.apply_pauli(p.logical_z()).unwrap();
        }
        if rng.gen::<bool>() {
            let _ = t.measure_pauli(p.logical_x()).unwrap();
        }
        let mut t2 = t.clone();
        let direct = measure_syndromes(&mut t, &p, SyndromeMode::Direct).unwrap();
        let circuit = measure_syndromes(&mut t2, &p, SyndromeMode::Circuit).unwrap();
        assert_eq!(direct, circuit, "trial {trial} ({kind:?}, d={d})");
        assert_eq!(t.rng_draws(), t2.rng_draws(), "trial {trial}: stream divergence");
    }
}

/// Stabilize is idempotent on its own output and the logical sector never
/// drifts: preparing |0⟩ pins Z_L through arbitrarily many rounds.
#[test]
fn repeated_rounds_are_stable() {
    for kind in [PatchKind::Rotated, PatchKind::Unrotated] {
        let mut reg = GridRegistry::new(7, 7);
        let p = build_patch(&mut reg, kind, 3, (0, 0), Orientation::RoughLeftRight).unwrap();
        let mut t = Tableau::new(reg.cell_count(), 77);
        prepare_zero(&mut t, &p).unwrap();
        let base = measure_syndromes(&mut t, &p, SyndromeMode::Direct).unwrap();
        for _ in 0..5 {
            let rec = measure_syndromes(&mut t, &p, SyndromeMode::Direct).unwrap();
            assert_eq!(rec.z_values, base.z_values);
            assert_eq!(rec.x_values, base.x_values);
        }
        assert_eq!(t.contains_stabilizer(p.logical_z()).unwrap(), Some(1));
    }
}
