//! Logical-qubit protocols built from the merge/split primitives: joint
//! CNOT and CZ channels through a transitional patch, the transversal
//! Hadamard with footprint restoration, logical Pauli application and
//! readout, rotation seeding, teleported quarter-turn rotations, and an
//! exact statevector mirror for the non-Clifford injection path.
//!
//! Every protocol returns a [`ProtocolTrace`]: a serializable record of
//! the operations performed, the measurement outcomes observed, and the
//! net logical Pauli applied to each data patch. Under a fixed tableau
//! seed a protocol's trace is byte-stable, which the reproducible-log
//! guarantees elsewhere build on.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{apply_to_state, fidelity, gate_matrix, rotation_matrix, DenseState};
use crate::error::{Error, Result};
use crate::gates::{Angle, GateIR, GateKind, RotationTerm};
use crate::grid::{GridRegistry, TileId};
use crate::patch::{canonical_correction, canonicalize, prepare_plus, CheckKind, PatchLayout};
use crate::pauli::{PauliLetter, PauliString};
use crate::surgery::{
    hadamard_realign, inject_state, injection_plan, merge_flexible, rough_split, seed_gates,
    seed_logical_tag, smooth_split, transversal_h, InjectionPlan, InjectionStep, JointOperator,
    SeedState, SplitResult,
};
use crate::tableau::{CliffordGate, Tableau};

/// One operation inside a protocol: its name, the tiles it touched, the
/// measurement outcomes it produced (omitted when none), and an optional
/// free-form label (an operator name, a seed name, …).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub op: String,
    pub tiles: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outcomes: Vec<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl TraceStep {
    fn new(op: impl Into<String>, tiles: &[TileId]) -> TraceStep {
        TraceStep {
            op: op.into(),
            tiles: tiles.iter().map(|t| t.0).collect(),
            outcomes: Vec::new(),
            detail: None,
        }
    }

    fn with_outcomes(mut self, outcomes: &[i8]) -> TraceStep {
        self.outcomes = outcomes.to_vec();
        self
    }

    fn with_detail(mut self, detail: impl Into<String>) -> TraceStep {
        self.detail = Some(detail.into());
        self
    }
}

/// Net logical Pauli a protocol applied to one data patch ("I" when
/// none). Transitional patches are excluded: they are reset at protocol
/// end, so nothing applied to them survives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchCorrection {
    pub tile: u32,
    pub pauli: String,
}

/// Serializable record of one protocol run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolTrace {
    pub protocol: String,
    pub steps: Vec<TraceStep>,
    pub corrections: Vec<PatchCorrection>,
}

impl ProtocolTrace {
    fn new(protocol: impl Into<String>) -> ProtocolTrace {
        ProtocolTrace { protocol: protocol.into(), steps: Vec::new(), corrections: Vec::new() }
    }

    fn push(&mut self, step: TraceStep) {
        self.steps.push(step);
    }
}

/// A logical Pauli label on one patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicalPauli {
    #[serde(rename = "X_L")]
    X,
    #[serde(rename = "Z_L")]
    Z,
}

impl LogicalPauli {
    pub fn name(self) -> &'static str {
        match self {
            LogicalPauli::X => "X_L",
            LogicalPauli::Z => "Z_L",
        }
    }

    /// The operator representative on a concrete patch.
    pub fn representative(self, p: &PatchLayout) -> PauliString {
        match self {
            LogicalPauli::X => p.logical_x().clone(),
            LogicalPauli::Z => p.logical_z().clone(),
        }
    }
}

impl std::fmt::Display for LogicalPauli {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One outcome-keyed entry of a joint-protocol correction table: the
/// logical Pauli each data patch receives for one sign combination of
/// the second joint measurement and the product of the first joint
/// outcome with the final transitional Z readout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrectionRule {
    pub second_joint: i8,
    pub first_times_readout: i8,
    pub first_patch: Option<LogicalPauli>,
    pub second_patch: Option<LogicalPauli>,
}

/// CNOT repairs: `first_patch` is the control, `second_patch` the
/// target. Frozen here and re-derived exhaustively by the module tests.
pub const CNOT_CORRECTIONS: [CorrectionRule; 4] = [
    CorrectionRule { second_joint: 1, first_times_readout: 1, first_patch: None, second_patch: None },
    CorrectionRule {
        second_joint: 1,
        first_times_readout: -1,
        first_patch: None,
        second_patch: Some(LogicalPauli::X),
    },
    CorrectionRule {
        second_joint: -1,
        first_times_readout: 1,
        first_patch: Some(LogicalPauli::Z),
        second_patch: None,
    },
    CorrectionRule {
        second_joint: -1,
        first_times_readout: -1,
        first_patch: Some(LogicalPauli::Z),
        second_patch: Some(LogicalPauli::X),
    },
];

/// CZ repairs for the two data patches in argument order. Frozen here
/// and re-derived exhaustively by the module tests.
pub const CZ_CORRECTIONS: [CorrectionRule; 4] = [
    CorrectionRule { second_joint: 1, first_times_readout: 1, first_patch: None, second_patch: None },
    CorrectionRule {
        second_joint: 1,
        first_times_readout: -1,
        first_patch: None,
        second_patch: Some(LogicalPauli::Z),
    },
    CorrectionRule {
        second_joint: -1,
        first_times_readout: 1,
        first_patch: Some(LogicalPauli::Z),
        second_patch: None,
    },
    CorrectionRule {
        second_joint: -1,
        first_times_readout: -1,
        first_patch: Some(LogicalPauli::Z),
        second_patch: Some(LogicalPauli::Z),
    },
];

/// The table row matching an observed sign pair.
pub fn correction_rule(
    table: &'static [CorrectionRule; 4],
    second_joint: i8,
    first_times_readout: i8,
) -> Result<&'static CorrectionRule> {
    table
        .iter()
        .find(|r| r.second_joint == second_joint && r.first_times_readout == first_times_readout)
        .ok_or_else(|| {
            Error::InvalidState(format!(
                "no correction rule for sign pair ({second_joint:+}, {first_times_readout:+})"
            ))
        })
}

/// Per-patch accumulator of applied logical Paulis, reported in trace
/// corrections as "I" / "X_L" / "Z_L" / "Y_L".
#[derive(Debug, Default, Clone, Copy)]
struct PauliBits {
    x: bool,
    z: bool,
}

impl PauliBits {
    fn toggle(&mut self, which: LogicalPauli) {
        match which {
            LogicalPauli::X => self.x = !self.x,
            LogicalPauli::Z => self.z = !self.z,
        }
    }

    fn name(self) -> &'static str {
        match (self.x, self.z) {
            (false, false) => "I",
            (true, false) => "X_L",
            (false, true) => "Z_L",
            (true, true) => "Y_L",
        }
    }
}

fn ensure_plus(t: &Tableau, trn: &PatchLayout) -> Result<()> {
    match t.contains_stabilizer(trn.logical_x())? {
        Some(1) => Ok(()),
        _ => Err(Error::InvalidState(
            "the transitional patch must hold logical |+> before a joint protocol".into(),
        )),
    }
}

/// Return a transitional patch to logical |+⟩: reset its whole block,
/// then re-prepare it.
pub fn reset_to_plus(t: &mut Tableau, trn: &PatchLayout) -> Result<()> {
    t.reset_qubits(&trn.block_indices())?;
    prepare_plus(t, trn)
}

/// Raw measurement signs of one joint protocol, for derivation tests:
/// first joint outcome, first split product, second joint outcome,
/// second split product, final transitional Z readout.
#[derive(Debug, Clone, Copy)]
#[cfg_attr(not(test), allow(dead_code))]
struct JointRecord {
    m1: i8,
    s1: i8,
    m2: i8,
    #[allow(dead_code)]
    s2: i8,
    m3: i8,
}

/// Record the split outcomes into the trace and return the seam outcome
/// product. The recorded byproduct is deliberately not applied: the
/// operator-level split leaves both patches exactly in the post-joint-
/// measurement state, so the byproduct a hardware run would owe is
/// informational here and applying it would double-correct.
fn record_split(trace: &mut ProtocolTrace, op_name: &str, split: &SplitResult) -> i8 {
    trace.push(
        TraceStep::new(op_name, &[split.left.tile(), split.right.tile()])
            .with_outcomes(&split.row_outcomes),
    );
    split.row_outcomes.iter().copied().product::<i8>()
}

fn final_corrections(
    accums: &HashMap<u32, PauliBits>,
    patches: &[&PatchLayout],
) -> Vec<PatchCorrection> {
    patches
        .iter()
        .map(|p| PatchCorrection {
            tile: p.tile().0,
            pauli: accums.get(&p.tile().0).copied().unwrap_or_default().name().into(),
        })
        .collect()
}

fn cnot_core(
    t: &mut Tableau,
    reg: &mut GridRegistry,
    control: &PatchLayout,
    target: &PatchLayout,
    trn: &PatchLayout,
    finish: bool,
) -> Result<(ProtocolTrace, JointRecord)> {
    ensure_plus(t, trn)?;
    let mut trace = ProtocolTrace::new("cnot");
    let mut accums: HashMap<u32, PauliBits> = HashMap::new();
    accums.insert(control.tile().0, PauliBits::default());
    accums.insert(target.tile().0, PauliBits::default());

    let merge1 = merge_flexible(t, reg, control, trn, JointOperator::ZZ)?;
    let m1 = merge1.joint_outcome;
    trace.push(TraceStep::new("smooth_merge", &[control.tile(), trn.tile()]).with_outcomes(&[m1]));
    let split1 = smooth_split(t, reg, &merge1.merged)?;
    let s1 = record_split(&mut trace, "smooth_split", &split1);

    let merge2 = merge_flexible(t, reg, trn, target, JointOperator::XX)?;
    let m2 = merge2.joint_outcome;
    trace.push(TraceStep::new("rough_merge", &[trn.tile(), target.tile()]).with_outcomes(&[m2]));
    let split2 = rough_split(t, reg, &merge2.merged)?;
    let s2 = record_split(&mut trace, "rough_split", &split2);

    let m3 = t.measure_pauli(trn.logical_z())?;
    trace.push(TraceStep::new("z_readout", &[trn.tile()]).with_outcomes(&[m3]));

    let record = JointRecord { m1, s1, m2, s2, m3 };
    if finish {
        let rule = correction_rule(&CNOT_CORRECTIONS, m2, m1 * m3)?;
        for (which, patch) in [(rule.first_patch, control), (rule.second_patch, target)] {
            if let Some(lp) = which {
                t.apply_pauli(&lp.representative(patch))?;
                if let Some(bits) = accums.get_mut(&patch.tile().0) {
                    bits.toggle(lp);
                }
                trace.push(TraceStep::new("correction", &[patch.tile()]).with_detail(lp.name()));
            }
        }
        reset_to_plus(t, trn)?;
        trace.push(TraceStep::new("reset_plus", &[trn.tile()]));
        trace.corrections = final_corrections(&accums, &[control, target]);
    }
    Ok((trace, record))
}

/// Joint logical CNOT from `control` onto `target` through a
/// transitional patch: a smooth (ZZ) merge-and-split with the
/// transitional patch, a rough (XX) merge-and-split onto the target, a
/// transitional Z readout, then table-driven Pauli repairs and a
/// transitional reset to logical |+⟩.
///
/// The transitional patch must hold logical |+⟩ on entry; the strict
/// facing-boundary merges are used when the tiles literally face each
/// other, the routed operator-level merges otherwise.
pub fn logical_cnot(
    t: &mut Tableau,
    reg: &mut GridRegistry,
    control: &PatchLayout,
    target: &PatchLayout,
    trn: &PatchLayout,
) -> Result<ProtocolTrace> {
    Ok(cnot_core(t, reg, control, target, trn, true)?.0)
}

fn cz_core(
    t: &mut Tableau,
    reg: &mut GridRegistry,
    a: &PatchLayout,
    b: &PatchLayout,
    trn: &PatchLayout,
    finish: bool,
) -> Result<(ProtocolTrace, JointRecord)> {
    ensure_plus(t, trn)?;
    let mut trace = ProtocolTrace::new("cz");
    let mut accums: HashMap<u32, PauliBits> = HashMap::new();
    accums.insert(a.tile().0, PauliBits::default());
    accums.insert(b.tile().0, PauliBits::default());

    let merge1 = merge_flexible(t, reg, a, trn, JointOperator::ZZ)?;
    let m1 = merge1.joint_outcome;
    trace.push(TraceStep::new("smooth_merge", &[a.tile(), trn.tile()]).with_outcomes(&[m1]));
    let split1 = smooth_split(t, reg, &merge1.merged)?;
    let s1 = record_split(&mut trace, "smooth_split", &split1);

    let joint = trn.logical_x().mul(b.logical_z())?.unsigned();
    let m2 = t.measure_pauli(&joint)?;
    trace.push(
        TraceStep::new("xz_joint", &[trn.tile(), b.tile()])
            .with_outcomes(&[m2])
            .with_detail("X_L*Z_L"),
    );

    let m3 = t.measure_pauli(trn.logical_z())?;
    trace.push(TraceStep::new("z_readout", &[trn.tile()]).with_outcomes(&[m3]));

    let record = JointRecord { m1, s1, m2, s2: 1, m3 };
    if finish {
        let rule = correction_rule(&CZ_CORRECTIONS, m2, m1 * m3)?;
        for (which, patch) in [(rule.first_patch, a), (rule.second_patch, b)] {
            if let Some(lp) = which {
                t.apply_pauli(&lp.representative(patch))?;
                if let Some(bits) = accums.get_mut(&patch.tile().0) {
                    bits.toggle(lp);
                }
                trace.push(TraceStep::new("correction", &[patch.tile()]).with_detail(lp.name()));
            }
        }
        reset_to_plus(t, trn)?;
        trace.push(TraceStep::new("reset_plus", &[trn.tile()]));
        trace.corrections = final_corrections(&accums, &[a, b]);
    }
    Ok((trace, record))
}

/// Joint logical CZ between two data patches through a transitional
/// patch: a smooth (ZZ) merge-and-split with the transitional patch, a
/// direct mixed joint readout of transitional-X times the second
/// patch's Z, a transitional Z readout, then table-driven Z repairs and
/// a transitional reset. Symmetric on its two data patches.
pub fn logical_cz(
    t: &mut Tableau,
    reg: &mut GridRegistry,
    a: &PatchLayout,
    b: &PatchLayout,
    trn: &PatchLayout,
) -> Result<ProtocolTrace> {
    Ok(cz_core(t, reg, a, b, trn, true)?.0)
}

fn logical_name(p: &PatchLayout, op: &PauliString) -> &'static str {
    if op.is_identity_letters() {
        "I"
    } else if op.same_letters(p.logical_x()) {
        "X_L"
    } else if op.same_letters(p.logical_z()) {
        "Z_L"
    } else {
        "Y_L"
    }
}

/// Logical Hadamard on one patch: the transversal data-qubit Hadamard
/// (which exchanges the roles of the boundary types), then the realign
/// procedure that restores the original orientation and footprint
/// through an auxiliary neighbouring block. Returns the rebuilt layout
/// together with the trace; the teleport repairs inside the realign are
/// applied eagerly and reported as this protocol's net correction.
pub fn logical_h(
    t: &mut Tableau,
    reg: &mut GridRegistry,
    p: &PatchLayout,
) -> Result<(PatchLayout, ProtocolTrace)> {
    let mut trace = ProtocolTrace::new("hadamard");
    let rotated = transversal_h(t, p)?;
    trace.push(TraceStep::new("transversal_h", &[p.tile()]));
    let (home, byproduct) = hadamard_realign(t, reg, &rotated)?;
    let name = logical_name(&home, &byproduct);
    trace.push(TraceStep::new("realign", &[p.tile(), home.tile()]).with_detail(name));
    trace.corrections = vec![PatchCorrection { tile: home.tile().0, pauli: name.into() }];
    Ok((home, trace))
}

/// Apply a logical Pauli to one patch through its representative.
pub fn logical_pauli(
    t: &mut Tableau,
    p: &PatchLayout,
    which: LogicalPauli,
) -> Result<ProtocolTrace> {
    t.apply_pauli(&which.representative(p))?;
    let mut trace = ProtocolTrace::new("pauli");
    trace.push(TraceStep::new("logical_pauli", &[p.tile()]).with_detail(which.name()));
    trace.corrections = vec![PatchCorrection { tile: p.tile().0, pauli: which.name().into() }];
    Ok(trace)
}

/// Measure one logical operator of a patch in the X, Y, or Z basis and
/// return the ±1 outcome.
pub fn measure_logical(t: &mut Tableau, p: &PatchLayout, basis: PauliLetter) -> Result<i8> {
    let op = match basis {
        PauliLetter::X => p.logical_x().clone(),
        PauliLetter::Z => p.logical_z().clone(),
        PauliLetter::Y => p.logical_x().mul(p.logical_z())?.unsigned(),
        PauliLetter::I => {
            return Err(Error::InvalidState("measurement basis must be X, Y, or Z".into()))
        }
    };
    t.measure_pauli(&op)
}

/// The axis of a single-qubit rotation term: its qubit and Pauli letter.
pub fn single_qubit_axis(r: &RotationTerm) -> Result<(usize, PauliLetter)> {
    let support = r.pauli().support();
    if support.len() != 1 {
        return Err(Error::UnsupportedGate(format!(
            "a weight-{} rotation term cannot seed a single patch",
            support.len()
        )));
    }
    let q = support[0];
    Ok((q, r.pauli().letter(q)))
}

/// Quarter-turn class of a dyadic angle: for φ = jπ/4 returns j mod 4
/// (a half-turn offset only changes the global phase). Errors when the
/// angle is not an exact multiple of π/4.
pub fn quarter_turn_class(angle: &Angle) -> Result<u8> {
    let (num, den) = angle.dyadic_parts().ok_or_else(|| {
        Error::UnsupportedGate(
            "only exact dyadic multiples of pi/4 have a stabilizer seed".into(),
        )
    })?;
    if den == 0 || 4 % den != 0 {
        return Err(Error::UnsupportedGate(format!(
            "angle {angle} is not a multiple of pi/4; use the statevector tier"
        )));
    }
    Ok(((num * (4 / den as i32)).rem_euclid(8) as u8) % 4)
}

/// The stabilizer seed a dyadic rotation produces on its axis reference
/// state (|+⟩ for a Z axis, |0⟩ for an X or Y axis).
pub fn seed_for_rotation(axis: PauliLetter, angle: &Angle) -> Result<SeedState> {
    let j = quarter_turn_class(angle)?;
    Ok(match (axis, j) {
        (PauliLetter::Z, 0) => SeedState::Plus,
        (PauliLetter::Z, 1) => SeedState::PlusI,
        (PauliLetter::Z, 2) => SeedState::Minus,
        (PauliLetter::Z, 3) => SeedState::MinusI,
        (PauliLetter::X, 0) => SeedState::Zero,
        (PauliLetter::X, 1) => SeedState::MinusI,
        (PauliLetter::X, 2) => SeedState::One,
        (PauliLetter::X, 3) => SeedState::PlusI,
        (PauliLetter::Y, 0) => SeedState::Zero,
        (PauliLetter::Y, 1) => SeedState::Plus,
        (PauliLetter::Y, 2) => SeedState::One,
        (PauliLetter::Y, 3) => SeedState::Minus,
        (PauliLetter::I, _) => {
            return Err(Error::UnsupportedGate("rotation axis must be X, Y, or Z".into()))
        }
        _ => unreachable!("class is taken mod 4"),
    })
}

/// Prepare a data patch in the seed state a dyadic rotation produces:
/// the axis reference state is rotated, spread along the patch's middle
/// data line, and stabilized. Errors for multi-qubit axes and for
/// angles that are not quarter-turn multiples (those need the
/// statevector tier).
pub fn inject_rotation(t: &mut Tableau, p: &PatchLayout, r: &RotationTerm) -> Result<ProtocolTrace> {
    let (_, axis) = single_qubit_axis(r)?;
    let seed = seed_for_rotation(axis, &r.angle())?;
    inject_state(t, p, seed)?;
    let mut trace = ProtocolTrace::new("inject");
    trace.push(
        TraceStep::new("inject", &[p.tile()])
            .with_detail(format!("{}_{{{}}}", axis.symbol(), r.angle())),
    );
    Ok(trace)
}

/// Apply a quarter-turn rotation to a live data patch through a
/// transitional resource patch: the matching ±i eigenphase seed is
/// injected on the resource, a joint readout of the data patch's axis
/// operator times the resource Z ties them together, the resource X
/// readout closes the teleportation, and the axis Pauli repairs the
/// wrong branch (`o1·o2 = −1`). Half-turn classes reduce to a direct
/// logical Pauli; class 0 is a no-op. The resource patch is reset to
/// logical |+⟩ afterwards.
pub fn teleported_rotation(
    t: &mut Tableau,
    p: &PatchLayout,
    trn: &PatchLayout,
    r: &RotationTerm,
) -> Result<ProtocolTrace> {
    let (_, axis) = single_qubit_axis(r)?;
    let j = quarter_turn_class(&r.angle())?;
    let axis_rep = match axis {
        PauliLetter::X => p.logical_x().clone(),
        PauliLetter::Z => p.logical_z().clone(),
        PauliLetter::Y => p.logical_x().mul(p.logical_z())?.unsigned(),
        PauliLetter::I => {
            return Err(Error::UnsupportedGate("rotation axis must be X, Y, or Z".into()))
        }
    };
    let axis_name = format!("{}_L", axis.symbol());
    let mut trace = ProtocolTrace::new("rotation");
    let mut applied = false;
    match j {
        0 => {}
        2 => {
            t.apply_pauli(&axis_rep)?;
            applied = true;
            trace.push(TraceStep::new("logical_pauli", &[p.tile()]).with_detail(axis_name.clone()));
        }
        1 | 3 => {
            let resource = if j == 1 { SeedState::PlusI } else { SeedState::MinusI };
            inject_state(t, trn, resource)?;
            trace.push(
                TraceStep::new("resource_inject", &[trn.tile()])
                    .with_detail(format!("{resource:?}")),
            );
            let o1 = t.measure_pauli(&axis_rep.mul(trn.logical_z())?.unsigned())?;
            trace.push(
                TraceStep::new("joint_readout", &[p.tile(), trn.tile()])
                    .with_outcomes(&[o1])
                    .with_detail(format!("{axis_name}*Z_L")),
            );
            let o2 = t.measure_pauli(trn.logical_x())?;
            trace.push(TraceStep::new("x_readout", &[trn.tile()]).with_outcomes(&[o2]));
            if o1 * o2 == -1 {
                t.apply_pauli(&axis_rep)?;
                applied = true;
                trace.push(TraceStep::new("correction", &[p.tile()]).with_detail(axis_name.clone()));
            }
            reset_to_plus(t, trn)?;
            trace.push(TraceStep::new("reset_plus", &[trn.tile()]));
        }
        _ => unreachable!("class is taken mod 4"),
    }
    trace.corrections = vec![PatchCorrection {
        tile: p.tile().0,
        pauli: if applied { axis_name } else { "I".into() },
    }];
    Ok(trace)
}

/// The logical repair the stabilizer tier owes after an injection that
/// observed `record` (check outcomes in stabilizer-id order): the
/// record is replayed over each of the two reference seeds with forced
/// outcomes, and the seed's tag read back. Returns (apply-logical-X,
/// apply-logical-Z). The record's outcome distribution is
/// seed-independent — the spread seed operator is a logical
/// representative, which commutes with every check — so the replay is
/// always consistent.
fn injection_frame_fix(
    p: &PatchLayout,
    plan: &InjectionPlan,
    record: &[i8],
) -> Result<(bool, bool)> {
    let ids = p.stabilizer_ids();
    if record.len() != ids.len() {
        return Err(Error::Dimension(format!(
            "{} recorded outcomes for {} checks",
            record.len(),
            ids.len()
        )));
    }
    let mut fixes = [false, false];
    for (slot, seed) in [(0usize, SeedState::Zero), (1usize, SeedState::Plus)] {
        let mut t = Tableau::new(p.n(), 0);
        for g in seed_gates(seed, p.cell_index(plan.seed_cell)) {
            t.apply_clifford(g)?;
        }
        for step in &plan.steps {
            match *step {
                InjectionStep::Cnot { control, target } => t.apply_clifford(CliffordGate::Cnot(
                    p.cell_index(control),
                    p.cell_index(target),
                ))?,
                InjectionStep::Swap { a, b } => t
                    .apply_clifford(CliffordGate::Swap(p.cell_index(a), p.cell_index(b)))?,
            }
        }
        for (id, &o) in ids.iter().zip(record) {
            t.measure_pauli_forced(&p.check(*id)?.operator, o)?;
        }
        canonicalize(&mut t, p)?;
        let (tag, sign) = seed_logical_tag(seed, p)?;
        let v = t
            .contains_stabilizer(&tag)?
            .ok_or_else(|| Error::InvalidState("injection replay lost the seed tag".into()))?;
        fixes[slot] = v != sign;
    }
    Ok((fixes[0], fixes[1]))
}

/// Exact statevector mirror of a few small patches: every data cell,
/// check ancilla, and injection helper cell of the covered layouts is
/// one dense qubit. Runs the literal injection and growth schedules
/// with Born-sampled check readouts, so non-Clifford seeds can be
/// followed exactly and compared against encoded references.
#[derive(Debug)]
pub struct DenseWorkspace {
    cells: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
    state: DenseState,
    rng: ChaCha12Rng,
}

fn push_cell(
    cells: &mut Vec<(usize, usize)>,
    index: &mut HashMap<(usize, usize), usize>,
    cell: (usize, usize),
) {
    if !index.contains_key(&cell) {
        index.insert(cell, cells.len());
        cells.push(cell);
    }
}

impl DenseWorkspace {
    /// Workspace covering the given layouts (which must share one
    /// canvas). Cell order: each layout's data cells, then its check
    /// ancillas, then its injection helper cells, deduplicated in
    /// encounter order. Errors when the total exceeds the dense-tier
    /// qubit cap.
    pub fn for_patches(patches: &[&PatchLayout], seed: u64) -> Result<DenseWorkspace> {
        let mut cells: Vec<(usize, usize)> = Vec::new();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        for p in patches {
            for &c in p.data_qubits() {
                push_cell(&mut cells, &mut index, c);
            }
            for ch in p.z_checks().iter().chain(p.x_checks().iter()) {
                push_cell(&mut cells, &mut index, ch.ancilla);
            }
            let plan = injection_plan(p)?;
            for step in &plan.steps {
                if let InjectionStep::Swap { a, b } = *step {
                    push_cell(&mut cells, &mut index, a);
                    push_cell(&mut cells, &mut index, b);
                }
            }
        }
        let state = DenseState::zero(cells.len())?;
        Ok(DenseWorkspace { cells, index, state, rng: ChaCha12Rng::seed_from_u64(seed) })
    }

    /// Number of dense qubits.
    pub fn n(&self) -> usize {
        self.state.n()
    }

    /// The current statevector.
    pub fn state(&self) -> &DenseState {
        &self.state
    }

    /// The covered canvas cells, in workspace-qubit order.
    pub fn cells(&self) -> &[(usize, usize)] {
        &self.cells
    }

    fn qubit(&self, cell: (usize, usize)) -> Result<usize> {
        self.index.get(&cell).copied().ok_or_else(|| {
            Error::IndexOutOfRange(format!("cell {cell:?} is outside the dense workspace"))
        })
    }

    /// A canvas-indexed operator re-expressed over workspace qubits.
    fn compact(&self, p: &PatchLayout, op: &PauliString) -> Result<PauliString> {
        let cols = p.canvas_cols();
        let mut letters = Vec::new();
        for q in op.support() {
            letters.push((self.qubit((q / cols, q % cols))?, op.letter(q)));
        }
        Ok(PauliString::from_support(self.state.n(), &letters)?.with_phase(op.phase()))
    }

    fn apply_gate(&mut self, kind: GateKind, cells: &[(usize, usize)]) -> Result<()> {
        let qubits: Vec<usize> = cells.iter().map(|&c| self.qubit(c)).collect::<Result<_>>()?;
        let operands: Vec<usize> = (0..qubits.len()).collect();
        let u = gate_matrix(&GateIR::plain(kind, &operands)?)?;
        apply_to_state(&mut self.state, &u, &qubits)
    }

    fn apply_swap(&mut self, a: (usize, usize), b: (usize, usize)) -> Result<()> {
        self.apply_gate(GateKind::Cnot, &[a, b])?;
        self.apply_gate(GateKind::Cnot, &[b, a])?;
        self.apply_gate(GateKind::Cnot, &[a, b])
    }

    /// One ancilla-mediated stabilization round over a layout's checks
    /// in stabilizer-id order (Z checks, then X checks): each ancilla
    /// runs its extraction circuit, is Born-read in the computational
    /// basis, and is reset. Returns the Z- and X-check outcome lists.
    pub fn stabilization_round(&mut self, p: &PatchLayout) -> Result<(Vec<i8>, Vec<i8>)> {
        let mut z_values = Vec::new();
        let mut x_values = Vec::new();
        for id in p.stabilizer_ids() {
            let check = p.check(id)?;
            let kind = check.kind;
            let ancilla = check.ancilla;
            let support = check.support.clone();
            self.apply_gate(GateKind::H, &[ancilla])?;
            for &cell in &support {
                match kind {
                    CheckKind::Z => self.apply_gate(GateKind::Cz, &[ancilla, cell])?,
                    CheckKind::X => self.apply_gate(GateKind::Cnot, &[ancilla, cell])?,
                }
            }
            self.apply_gate(GateKind::H, &[ancilla])?;
            let anc = self.qubit(ancilla)?;
            let readout = PauliString::single(self.state.n(), anc, PauliLetter::Z)?;
            let o = self.state.measure_pauli(&readout, &mut self.rng)?;
            if o == -1 {
                self.apply_gate(GateKind::X, &[ancilla])?;
            }
            match kind {
                CheckKind::Z => z_values.push(o),
                CheckKind::X => x_values.push(o),
            }
        }
        Ok((z_values, x_values))
    }

    /// Run the injection schedule exactly for an arbitrary (possibly
    /// non-Clifford) single-qubit-axis rotation: rotate the axis
    /// reference on the seed cell, spread it along the middle data
    /// line, stabilize once, apply the canonical sign corrections, and
    /// repair the logical frame by replaying the observed record on the
    /// stabilizer tier. Returns the record (Z-check values, then
    /// X-check values).
    pub fn inject_rotation_dense(
        &mut self,
        p: &PatchLayout,
        r: &RotationTerm,
    ) -> Result<Vec<i8>> {
        let (_, axis) = single_qubit_axis(r)?;
        if axis == PauliLetter::I {
            return Err(Error::UnsupportedGate("rotation axis must be X, Y, or Z".into()));
        }
        let plan = injection_plan(p)?;
        if axis == PauliLetter::Z {
            self.apply_gate(GateKind::H, &[plan.seed_cell])?;
        }
        let seed_q = self.qubit(plan.seed_cell)?;
        let axis_term = RotationTerm::new(PauliString::single(1, 0, axis)?, r.angle())?;
        apply_to_state(&mut self.state, &rotation_matrix(&axis_term)?, &[seed_q])?;
        for step in &plan.steps {
            match *step {
                InjectionStep::Cnot { control, target } => {
                    self.apply_gate(GateKind::Cnot, &[control, target])?
                }
                InjectionStep::Swap { a, b } => self.apply_swap(a, b)?,
            }
        }
        let (z_values, x_values) = self.stabilization_round(p)?;
        let correction = canonical_correction(p, &z_values, &x_values)?;
        if !correction.is_identity_letters() {
            let compacted = self.compact(p, &correction)?;
            self.state.apply_pauli(&compacted)?;
        }
        let mut record = z_values;
        record.extend_from_slice(&x_values);
        let (x_fix, z_fix) = injection_frame_fix(p, &plan, &record)?;
        if x_fix {
            let op = self.compact(p, p.logical_x())?;
            self.state.apply_pauli(&op)?;
        }
        if z_fix {
            let op = self.compact(p, p.logical_z())?;
            self.state.apply_pauli(&op)?;
        }
        Ok(record)
    }

    /// Mirror of stabilizer-tier patch growth from `old` to `new`
    /// (same kind, origin, and orientation; larger distance): pin each
    /// fresh cell of the extended logical-X line to |+⟩ (fresh
    /// workspace cells already hold |0⟩), stabilize the enlarged layout
    /// once, and apply the canonical sign corrections. The enlarged
    /// logical representatives commute with every rebuild readout, so
    /// no logical repair is owed. Returns the Z- and X-check outcomes.
    pub fn expand_dense(
        &mut self,
        old: &PatchLayout,
        new: &PatchLayout,
    ) -> Result<(Vec<i8>, Vec<i8>)> {
        if new.d() <= old.d() {
            return Err(Error::InvalidState(format!(
                "growth requires a larger distance, got {} → {}",
                old.d(),
                new.d()
            )));
        }
        if new.origin() != old.origin()
            || new.orientation() != old.orientation()
            || new.kind() != old.kind()
        {
            return Err(Error::Geometry(
                "growth target must share the origin, orientation, and kind of the source".into(),
            ));
        }
        let old_block: std::collections::HashSet<usize> =
            old.block_indices().into_iter().collect();
        let cols = new.canvas_cols();
        for q in new.logical_x().support() {
            if !old_block.contains(&q) {
                self.apply_gate(GateKind::H, &[(q / cols, q % cols)])?;
            }
        }
        let (z_values, x_values) = self.stabilization_round(new)?;
        let correction = canonical_correction(new, &z_values, &x_values)?;
        if !correction.is_identity_letters() {
            let compacted = self.compact(new, &correction)?;
            self.state.apply_pauli(&compacted)?;
        }
        Ok((z_values, x_values))
    }

    /// The encoded state α|0⟩_L + β|1⟩_L of a layout in the all-+1
    /// check frame, with |1⟩_L := X_L|0⟩_L and every other workspace
    /// cell in |0⟩.
    pub fn encoded_reference(
        &self,
        p: &PatchLayout,
        alpha: Complex64,
        beta: Complex64,
    ) -> Result<DenseState> {
        let n = self.state.n();
        let mut zero_l = DenseState::zero(n)?;
        for id in p.stabilizer_ids() {
            let op = self.compact(p, &p.check(id)?.operator)?;
            zero_l.project_pauli(&op, 1)?;
        }
        zero_l.project_pauli(&self.compact(p, p.logical_z())?, 1)?;
        let mut one_l = zero_l.clone();
        one_l.apply_pauli(&self.compact(p, p.logical_x())?)?;
        let amps = zero_l
            .amplitudes()
            .iter()
            .zip(one_l.amplitudes())
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        DenseState::from_amplitudes(n, amps)
    }

    /// Squared overlap of the workspace state with α|0⟩_L + β|1⟩_L of
    /// the given layout.
    pub fn logical_fidelity(
        &self,
        p: &PatchLayout,
        alpha: Complex64,
        beta: Complex64,
    ) -> Result<f64> {
        fidelity(&self.state, &self.encoded_reference(p, alpha, beta)?)
    }
}
