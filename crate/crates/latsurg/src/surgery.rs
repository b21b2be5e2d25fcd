//! Patch surgery: the operations that merge, split, grow, shrink, and
//! re-orient encoded patches on the shared canvas.
//!
//! A merge joins two like-oriented neighbouring patches through the gutter
//! row between their tiles. The gutter qubits ("transitional row") are
//! reset into the basis matching the facing boundary, and two commuting
//! operator measurements are performed:
//!
//! * the **joint logical** — the product of the two patches' facing logical
//!   representatives, whose outcome is the reported merge result, and
//! * the **bridge** — the same product extended over every transitional
//!   qubit, which entangles the row with both patches.
//!
//! Both operators commute with the conserved anti-product (a rough merge
//! never disturbs Z_L(a)·Z_L(b); a smooth merge never disturbs
//! X_L(a)·X_L(b)). Measuring the joint logical first makes the reported
//! outcome's random draw (when there is one) the first draw of the merge;
//! the bridge always consumes exactly one draw on a fresh row.
//!
//! A split measures the transitional qubits one by one in the conjugate
//! basis, releases the row, and reports a byproduct: the logical correction
//! owed on the second (right or bottom) patch by the convention that the
//! row outcomes multiply into the post-split logical correlation. The
//! byproduct is recorded, never applied — callers decide when to absorb it.
//!
//! Growth, shrinkage, and re-orientation carry the encoded state through
//! rebuild steps exactly: the rebuilt layout's logical representatives are
//! arranged to commute with every measurement of the rebuild (pinned
//! extension cells for growth, basis-matched readout of the vacated cells
//! for shrinkage, outcome-corrected teleport hops for re-orientation), and
//! canonicalization never touches the logical sector, so the only
//! corrections owed are fixed by the recorded measurement outcomes.

use crate::error::{Error, Result};
use crate::grid::{CellState, GridRegistry, SeamId};
use crate::patch::{
    build_patch, canonicalize, prepare_zero, stabilize, Orientation, PatchLayout,
};
use crate::pauli::{PauliLetter, PauliString};
use crate::tableau::{CliffordGate, Tableau};

/// Which joint logical a merge measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointOperator {
    /// X_L(a)·X_L(b), measured by a rough merge.
    XX,
    /// Z_L(a)·Z_L(b), measured by a smooth merge.
    ZZ,
}

/// A pair of patches joined through an active transitional row.
///
/// `left` is the left (horizontal merge) or top (vertical merge) patch.
/// The union satisfies the usual layout invariants: the generator list
/// returned by [`MergedPatch::stabilizer_generators`] is abelian, and the
/// merged logical representatives commute with every generator while
/// anticommuting with each other.
#[derive(Debug, Clone)]
pub struct MergedPatch {
    left: PatchLayout,
    right: PatchLayout,
    seam: SeamId,
    seam_cells: Vec<(usize, usize)>,
    joint_operator: JointOperator,
    joint: PauliString,
    bridge: PauliString,
    logical_x: PauliString,
    logical_z: PauliString,
}

impl MergedPatch {
    /// Left (or top) constituent.
    pub fn left(&self) -> &PatchLayout {
        &self.left
    }

    /// Right (or bottom) constituent.
    pub fn right(&self) -> &PatchLayout {
        &self.right
    }

    /// The active transitional row's registry handle.
    pub fn seam(&self) -> SeamId {
        self.seam
    }

    /// Transitional cells, ordered along the shared edge.
    pub fn seam_cells(&self) -> &[(usize, usize)] {
        &self.seam_cells
    }

    /// Which joint logical the merge measured.
    pub fn joint_operator(&self) -> JointOperator {
        self.joint_operator
    }

    /// The joint logical product measured by the merge.
    pub fn joint(&self) -> &PauliString {
        &self.joint
    }

    /// The seam-spanning bridge operator measured by the merge.
    pub fn bridge(&self) -> &PauliString {
        &self.bridge
    }

    /// Logical X representative of the merged patch.
    pub fn logical_x(&self) -> &PauliString {
        &self.logical_x
    }

    /// Logical Z representative of the merged patch.
    pub fn logical_z(&self) -> &PauliString {
        &self.logical_z
    }

    /// A complete, independent, pairwise-commuting stabilizer generator
    /// list for the merged patch: both constituents' checks, the
    /// nearest-neighbour transitional pair operators in the row's reset
    /// basis, the joint logical, and the bridge.
    pub fn stabilizer_generators(&self) -> Result<Vec<PauliString>> {
        let n = self.joint.n();
        let pair_letter = match self.joint_operator {
            JointOperator::XX => PauliLetter::Z,
            JointOperator::ZZ => PauliLetter::X,
        };
        let mut out: Vec<PauliString> = Vec::new();
        for check in self.left.z_checks().iter().chain(self.left.x_checks()) {
            out.push(check.operator.clone());
        }
        for check in self.right.z_checks().iter().chain(self.right.x_checks()) {
            out.push(check.operator.clone());
        }
        for pair in self.seam_cells.windows(2) {
            let a = self.left.cell_index(pair[0]);
            let b = self.left.cell_index(pair[1]);
            out.push(PauliString::from_support(
                n,
                &[(a, pair_letter), (b, pair_letter)],
            )?);
        }
        out.push(self.joint.clone());
        out.push(self.bridge.clone());
        Ok(out)
    }
}

/// Result of a merge.
#[derive(Debug, Clone)]
pub struct MergeResult {
    /// The joined pair with its active transitional row.
    pub merged: MergedPatch,
    /// Outcome of the joint logical measurement.
    pub joint_outcome: i8,
    /// Which joint logical was measured.
    pub joint_operator: JointOperator,
    /// Transitional cells consumed by the merge.
    pub transitional_qubits: Vec<(usize, usize)>,
}

/// Result of a split.
#[derive(Debug, Clone)]
pub struct SplitResult {
    /// Left (or top) patch, restored to its pre-merge footprint.
    pub left: PatchLayout,
    /// Right (or bottom) patch.
    pub right: PatchLayout,
    /// Per-transitional-qubit measurement outcomes, in seam order.
    pub row_outcomes: Vec<i8>,
    /// Correction owed on the right patch under the convention that the
    /// row outcomes multiply into the post-split logical correlation.
    /// Recorded, never applied here; identity when the outcome product
    /// is +1.
    pub byproduct: PauliString,
}

/// How the two tiles of a merge face each other.
struct MergeGeometry {
    /// Whether argument `a` is the geometric left/top patch.
    a_first: bool,
    horizontal: bool,
}

fn merge_geometry(a: &PatchLayout, b: &PatchLayout) -> Result<MergeGeometry> {
    if a.d() != b.d() {
        return Err(Error::Geometry(format!(
            "cannot merge distance-{} with distance-{}",
            a.d(),
            b.d()
        )));
    }
    if a.orientation() != b.orientation() {
        return Err(Error::Geometry(
            "cannot merge patches with different orientations".into(),
        ));
    }
    if a.tile() == b.tile() {
        return Err(Error::Geometry("cannot merge a patch with itself".into()));
    }
    let gap = 2 * a.d() + 2;
    let (ar, ac) = a.origin();
    let (br, bc) = b.origin();
    if ar == br && ac.abs_diff(bc) == gap {
        Ok(MergeGeometry { a_first: ac < bc, horizontal: true })
    } else if ac == bc && ar.abs_diff(br) == gap {
        Ok(MergeGeometry { a_first: ar < br, horizontal: false })
    } else {
        Err(Error::Geometry(format!(
            "tiles at {:?} and {:?} are not adjacent across one gutter row",
            a.origin(),
            b.origin()
        )))
    }
}

fn merge_impl(
    t: &mut Tableau,
    reg: &mut GridRegistry,
    a: &PatchLayout,
    b: &PatchLayout,
    joint_operator: JointOperator,
) -> Result<MergeResult> {
    let geo = merge_geometry(a, b)?;
    let rough_facing = match (geo.horizontal, a.orientation()) {
        (true, Orientation::RoughLeftRight) => true,
        (false, Orientation::RoughTopBottom) => true,
        _ => false,
    };
    match joint_operator {
        JointOperator::XX if !rough_facing => {
            return Err(Error::Geometry(
                "rough merge requires the facing boundaries to be rough".into(),
            ));
        }
        JointOperator::ZZ if rough_facing => {
            return Err(Error::Geometry(
                "smooth merge requires the facing boundaries to be smooth".into(),
            ));
        }
        _ => {}
    }
    let (first, second) = if geo.a_first { (a, b) } else { (b, a) };

    let seam_cells = reg.seam_between(first.tile(), second.tile())?;
    let seam = reg.activate_seam(first.tile(), second.tile())?;
    merge_core(t, first, second, joint_operator, seam, seam_cells)
}

/// Merge two patches through an explicitly routed transitional row. The
/// joint logical product is measured operator-level with its bridge check
/// anchored on free gutter cells chosen by [`routed_seam_cells`], so the
/// tiles need not be facing neighbours; distance equality is still
/// required (the seam is d cells). The geometric conventions (which patch
/// is "left", where the split correction lands) follow row-major origin
/// order. Used by protocol steps whose tile placement is routed rather
/// than literally adjacent.
pub(crate) fn merge_routed(
    t: &mut Tableau,
    reg: &mut GridRegistry,
    a: &PatchLayout,
    b: &PatchLayout,
    joint_operator: JointOperator,
) -> Result<MergeResult> {
    if a.d() != b.d() {
        return Err(Error::Geometry(format!(
            "cannot merge distance-{} with distance-{}",
            a.d(),
            b.d()
        )));
    }
    if a.tile() == b.tile() {
        return Err(Error::Geometry("cannot merge a patch with itself".into()));
    }
    let a_first = a.origin() <= b.origin();
    let (first, second) = if a_first { (a, b) } else { (b, a) };
    let seam_cells = routed_seam_cells(reg, first, second)?;
    let seam = reg.activate_routed_seam(first.tile(), second.tile(), seam_cells.clone())?;
    merge_core(t, first, second, joint_operator, seam, seam_cells)
}

/// Strict facing-boundary merge when the tiles literally face each other
/// across one gutter with the right boundary types; the routed
/// operator-level merge otherwise.
pub(crate) fn merge_flexible(
    t: &mut Tableau,
    reg: &mut GridRegistry,
    a: &PatchLayout,
    b: &PatchLayout,
    joint_operator: JointOperator,
) -> Result<MergeResult> {
    let strict = merge_geometry(a, b).ok().map_or(false, |geo| {
        let rough_facing = matches!(
            (geo.horizontal, a.orientation()),
            (true, Orientation::RoughLeftRight) | (false, Orientation::RoughTopBottom)
        );
        match joint_operator {
            JointOperator::XX => rough_facing,
            JointOperator::ZZ => !rough_facing,
        }
    });
    if strict {
        merge_impl(t, reg, a, b, joint_operator)
    } else {
        merge_routed(t, reg, a, b, joint_operator)
    }
}

/// Pick `d` free cells to host a routed seam between two patches:
/// a deterministic row-major scan of the rectangle spanned by both blocks
/// (the gutter cells between and beside them), widened to the whole canvas
/// when the rectangle is too crowded.
fn routed_seam_cells(
    reg: &GridRegistry,
    first: &PatchLayout,
    second: &PatchLayout,
) -> Result<Vec<(usize, usize)>> {
    let d = first.d();
    let side = 2 * d + 1;
    let scan = |rlo: usize, rhi: usize, clo: usize, chi: usize| -> Result<Vec<(usize, usize)>> {
        let mut cells = Vec::with_capacity(d);
        for r in rlo..rhi {
            for c in clo..chi {
                if cells.len() == d {
                    return Ok(cells);
                }
                if reg.cell_state((r, c))? == CellState::Free {
                    cells.push((r, c));
                }
            }
        }
        Ok(cells)
    };
    let (r1, c1) = first.origin();
    let (r2, c2) = second.origin();
    let rlo = r1.min(r2);
    let clo = c1.min(c2);
    let rhi = (r1 + side).max(r2 + side).min(reg.rows());
    let chi = (c1 + side).max(c2 + side).min(reg.cols());
    let mut cells = scan(rlo, rhi, clo, chi)?;
    if cells.len() < d {
        cells = scan(0, reg.rows(), 0, reg.cols())?;
    }
    if cells.len() < d {
        return Err(Error::Geometry(
            "not enough free gutter cells to route a transitional row".into(),
        ));
    }
    Ok(cells)
}

/// Operator-level body shared by the strict and routed merges: reset the
/// claimed transitional row into the basis stabilized by the merge kind,
/// measure the joint logical product (the reported outcome), then the
/// bridge check tying the row to it.
fn merge_core(
    t: &mut Tableau,
    first: &PatchLayout,
    second: &PatchLayout,
    joint_operator: JointOperator,
    seam: SeamId,
    seam_cells: Vec<(usize, usize)>,
) -> Result<MergeResult> {
    let seam_indices: Vec<usize> =
        seam_cells.iter().map(|&cell| first.cell_index(cell)).collect();

    // Reset the transitional row into the basis stabilized by the facing
    // boundary: |0⟩ for a rough merge, |+⟩ for a smooth one.
    t.reset_qubits(&seam_indices)?;
    let (la, lb, seam_letter) = match joint_operator {
        JointOperator::XX => {
            (first.logical_x(), second.logical_x(), PauliLetter::X)
        }
        JointOperator::ZZ => {
            for &q in &seam_indices {
                t.apply_clifford(CliffordGate::H(q))?;
            }
            (first.logical_z(), second.logical_z(), PauliLetter::Z)
        }
    };

    let joint = la.mul(lb)?;
    let seam_support: Vec<(usize, PauliLetter)> =
        seam_indices.iter().map(|&q| (q, seam_letter)).collect();
    let bridge = joint.mul(&PauliString::from_support(t.n(), &seam_support)?)?;

    // Joint logical first (its outcome is the reported one), bridge second.
    let joint_outcome = t.measure_pauli(&joint)?;
    t.measure_pauli(&bridge)?;

    let (logical_x, logical_z) = match joint_operator {
        JointOperator::XX => {
            (first.logical_x().clone(), first.logical_z().mul(second.logical_z())?)
        }
        JointOperator::ZZ => {
            (first.logical_x().mul(second.logical_x())?, first.logical_z().clone())
        }
    };

    let merged = MergedPatch {
        left: first.clone(),
        right: second.clone(),
        seam,
        seam_cells: seam_cells.clone(),
        joint_operator,
        joint,
        bridge,
        logical_x,
        logical_z,
    };
    Ok(MergeResult { merged, joint_outcome, joint_operator, transitional_qubits: seam_cells })
}

/// Merge two patches across their facing rough boundaries, measuring
/// X_L(a)·X_L(b). Preserves the eigenvalue of Z_L(a)·Z_L(b); the outcome
/// is deterministic exactly when the joint X product was already pinned.
pub fn rough_merge(
    t: &mut Tableau,
    reg: &mut GridRegistry,
    a: &PatchLayout,
    b: &PatchLayout,
) -> Result<MergeResult> {
    merge_impl(t, reg, a, b, JointOperator::XX)
}

/// Merge two patches across their facing smooth boundaries, measuring
/// Z_L(a)·Z_L(b). Preserves the eigenvalue of X_L(a)·X_L(b).
pub fn smooth_merge(
    t: &mut Tableau,
    reg: &mut GridRegistry,
    a: &PatchLayout,
    b: &PatchLayout,
) -> Result<MergeResult> {
    merge_impl(t, reg, a, b, JointOperator::ZZ)
}

fn split_impl(
    t: &mut Tableau,
    reg: &mut GridRegistry,
    m: &MergedPatch,
    expect: JointOperator,
) -> Result<SplitResult> {
    if m.joint_operator != expect {
        return Err(Error::InvalidState(
            "split basis does not match the merge that produced this patch".into(),
        ));
    }
    let row_letter = match expect {
        JointOperator::XX => PauliLetter::X,
        JointOperator::ZZ => PauliLetter::Z,
    };
    let seam_indices: Vec<usize> =
        m.seam_cells.iter().map(|&cell| m.left.cell_index(cell)).collect();

    let mut row_outcomes = Vec::with_capacity(seam_indices.len());
    let mut product: i8 = 1;
    for &q in &seam_indices {
        let op = PauliString::single(t.n(), q, row_letter)?;
        let o = t.measure_pauli(&op)?;
        row_outcomes.push(o);
        product *= o;
    }
    t.reset_qubits(&seam_indices)?;
    reg.release_seam(m.seam)?;

    let byproduct = if product == -1 {
        match expect {
            JointOperator::XX => m.right.logical_z().clone(),
            JointOperator::ZZ => m.right.logical_x().clone(),
        }
    } else {
        PauliString::identity(t.n())
    };
    Ok(SplitResult {
        left: m.left.clone(),
        right: m.right.clone(),
        row_outcomes,
        byproduct,
    })
}

/// Undo a rough merge: measure each transitional qubit in the X basis,
/// release the row, and report the Z_L correction owed on the right patch
/// when the row outcome product is −1.
pub fn rough_split(
    t: &mut Tableau,
    reg: &mut GridRegistry,
    m: &MergedPatch,
) -> Result<SplitResult> {
    split_impl(t, reg, m, JointOperator::XX)
}

/// Undo a smooth merge: measure each transitional qubit in the Z basis,
/// release the row, and report the X_L correction owed on the right patch
/// when the row outcome product is −1.
pub fn smooth_split(
    t: &mut Tableau,
    reg: &mut GridRegistry,
    m: &MergedPatch,
) -> Result<SplitResult> {
    split_impl(t, reg, m, JointOperator::ZZ)
}

/// Single-qubit states a seed qubit can carry into an injection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedState {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
}

/// Gates preparing a seed state from |0⟩ on qubit `q`.
pub fn seed_gates(seed: SeedState, q: usize) -> Vec<CliffordGate> {
    match seed {
        SeedState::Zero => vec![],
        SeedState::One => vec![CliffordGate::X(q)],
        SeedState::Plus => vec![CliffordGate::H(q)],
        SeedState::Minus => vec![CliffordGate::X(q), CliffordGate::H(q)],
        SeedState::PlusI => vec![CliffordGate::H(q), CliffordGate::S(q)],
        SeedState::MinusI => {
            vec![CliffordGate::X(q), CliffordGate::H(q), CliffordGate::S(q)]
        }
    }
}

/// The logical operator and sign that tag a freshly injected seed state.
pub fn seed_logical_tag(seed: SeedState, p: &PatchLayout) -> Result<(PauliString, i8)> {
    let y = phase_cleared(p.logical_x().mul(p.logical_z())?);
    Ok(match seed {
        SeedState::Zero => (p.logical_z().clone(), 1),
        SeedState::One => (p.logical_z().clone(), -1),
        SeedState::Plus => (p.logical_x().clone(), 1),
        SeedState::Minus => (p.logical_x().clone(), -1),
        SeedState::PlusI => (y, 1),
        SeedState::MinusI => (y, -1),
    })
}

/// One entangling step of an injection schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InjectionStep {
    /// Copy the growing chain onto the helper cell between two chain sites.
    Cnot { control: (usize, usize), target: (usize, usize) },
    /// Move the helper's share outward onto the next chain site.
    Swap { a: (usize, usize), b: (usize, usize) },
}

/// The geometric schedule an injection follows: seed cell, entangling
/// steps in order, and the chain of data cells that ends up holding the
/// spread state.
#[derive(Debug, Clone)]
pub struct InjectionPlan {
    pub seed_cell: (usize, usize),
    pub steps: Vec<InjectionStep>,
    pub chain: Vec<(usize, usize)>,
}

/// Build the injection schedule for a patch: the middle data line along
/// the rough-to-rough axis is grown outward from its centre cell, one
/// CNOT onto the intermediate helper cell and one outward SWAP per
/// extension, until all `d` line cells share the seed state.
pub fn injection_plan(p: &PatchLayout) -> Result<InjectionPlan> {
    let d = p.d();
    let (or, oc) = p.origin();
    let horizontal = p.orientation() == Orientation::RoughLeftRight;
    // Middle odd line of the block (rounded toward the origin at even d).
    let line = 2 * ((d - 1) / 2) + 1;
    let place = |off: usize| -> (usize, usize) {
        if horizontal {
            (or + line, oc + off)
        } else {
            (or + off, oc + line)
        }
    };
    let chain: Vec<(usize, usize)> = (0..d).map(|i| place(2 * i + 1)).collect();
    let helper = |i: usize| place(2 * i + 2);

    let si = (d - 1) / 2;
    let mut steps = Vec::new();
    for s in 1..d {
        let right = si + s;
        let left = si.checked_sub(s);
        if right < d {
            steps.push(InjectionStep::Cnot { control: chain[right - 1], target: helper(right - 1) });
        }
        if let Some(l) = left {
            steps.push(InjectionStep::Cnot { control: chain[l + 1], target: helper(l) });
        }
        if right < d {
            steps.push(InjectionStep::Swap { a: helper(right - 1), b: chain[right] });
        }
        if let Some(l) = left {
            steps.push(InjectionStep::Swap { a: helper(l), b: chain[l] });
        }
    }
    Ok(InjectionPlan { seed_cell: chain[si], steps, chain })
}

/// Write a seed state into a patch: reset the whole tile block, prepare
/// the seed on its cell, spread it along the middle data line per the
/// injection schedule, then run one stabilization round and canonicalize.
/// The encoding circuit preserves the seed's Pauli axis (check projections
/// and canonicalization corrections cannot rotate it), so the stabilized
/// patch is a definite eigenstate of the seed's logical tag; its sign is
/// read back from the tableau and flipped with an anticommuting logical
/// Pauli when the measurement record left it inverted. The resulting
/// logical state is the seed state, exactly.
pub fn inject_state(t: &mut Tableau, p: &PatchLayout, seed: SeedState) -> Result<()> {
    let plan = injection_plan(p)?;
    t.reset_qubits(&p.block_indices())?;
    for gate in seed_gates(seed, p.cell_index(plan.seed_cell)) {
        t.apply_clifford(gate)?;
    }
    for step in &plan.steps {
        match *step {
            InjectionStep::Cnot { control, target } => t.apply_clifford(
                CliffordGate::Cnot(p.cell_index(control), p.cell_index(target)),
            )?,
            InjectionStep::Swap { a, b } => t.apply_clifford(CliffordGate::Swap(
                p.cell_index(a),
                p.cell_index(b),
            ))?,
        }
    }
    stabilize(t, p, 1)?;
    canonicalize(t, p)?;
    let (tag, sign) = seed_logical_tag(seed, p)?;
    let value = t.contains_stabilizer(&tag)?.ok_or_else(|| {
        Error::InvalidState(
            "injected patch is not an eigenstate of the seed's logical tag".into(),
        )
    })?;
    if value != sign {
        let flip = match seed {
            SeedState::Plus | SeedState::Minus => p.logical_z(),
            _ => p.logical_x(),
        };
        t.apply_pauli(flip)?;
    }
    Ok(())
}

/// Normalize a Pauli product's phase to +1 (drops a global sign or ±i),
/// leaving the Hermitian letter content.
fn phase_cleared(mut p: PauliString) -> PauliString {
    let k = p.phase().exponent();
    if k != 0 {
        p.mul_phase_exponent((4 - k) % 4);
    }
    p
}

/// Check that the block of side `2*d_new+1` at `origin` fits the canvas
/// and collides with nothing except (optionally) the patch being rebuilt.
fn validate_block(
    reg: &GridRegistry,
    origin: (usize, usize),
    d_new: usize,
    own: Option<&PatchLayout>,
) -> Result<()> {
    let side = 2 * d_new + 1;
    if origin.0 + side > reg.rows() || origin.1 + side > reg.cols() {
        return Err(Error::Geometry(format!(
            "block of side {side} at {origin:?} exceeds the {}×{} canvas",
            reg.rows(),
            reg.cols()
        )));
    }
    for r in origin.0..origin.0 + side {
        for c in origin.1..origin.1 + side {
            let state = reg.cell_state((r, c))?;
            let ok = match state {
                CellState::Free => true,
                CellState::Data(id) | CellState::Ancilla(id) => {
                    own.is_some_and(|p| p.tile() == id)
                }
                CellState::Transitional(_) => false,
            };
            if !ok {
                return Err(Error::Overlap(format!(
                    "cell ({r}, {c}) is occupied by another tile or seam"
                )));
            }
        }
    }
    Ok(())
}

/// Grow a patch in place to a larger distance. The tile keeps its origin;
/// the extra block cells are reset to |0⟩ — except the cells extending the
/// logical X line, which are prepared |+⟩ so both logical sectors survive
/// the growth (a |0⟩ there would leave the enlarged X chain unpinned and
/// erase the X sector, just as a |+⟩ on the Z line would erase Z). One
/// stabilization round and canonicalization follow.
///
/// The enlarged logical representatives extend the old ones only over
/// freshly pinned +1 cells and commute with every measurement of the
/// rebuild, and canonicalization corrections never touch the logical
/// sector, so the encoded state — including one entangled with the rest
/// of the canvas — is carried over exactly, with no correction owed.
pub fn expand_patch(
    t: &mut Tableau,
    reg: &mut GridRegistry,
    p: &PatchLayout,
    d_new: usize,
) -> Result<PatchLayout> {
    if d_new <= p.d() {
        return Err(Error::InvalidState(format!(
            "expansion requires a larger distance, got {} → {}",
            p.d(),
            d_new
        )));
    }
    validate_block(reg, p.origin(), d_new, Some(p))?;

    let old_block: std::collections::HashSet<usize> =
        p.block_indices().into_iter().collect();
    reg.release_tile(p.tile())?;
    let new_p = build_patch(reg, p.kind(), d_new, p.origin(), p.orientation())?;
    let fresh: Vec<usize> = new_p
        .block_indices()
        .into_iter()
        .filter(|q| !old_block.contains(q))
        .collect();
    t.reset_qubits(&fresh)?;
    for q in new_p.logical_x().support() {
        if !old_block.contains(&q) {
            t.apply_clifford(CliffordGate::H(q))?;
        }
    }

    stabilize(t, &new_p, 1)?;
    canonicalize(t, &new_p)?;
    Ok(new_p)
}

/// Shrink a patch in place to a smaller distance (≥ 2). Shed data qubits
/// are measured in the Z basis — except the cells on the logical X line,
/// which are read out in the X basis (the mirror of expansion's |+⟩
/// preparation there: a Z readout of the X line would sever every
/// rough-to-rough chain and erase the X sector). The vacated cells are
/// then reset and the reduced layout restabilized.
///
/// Each old logical representative factors into the kept stub times the
/// shed cells just read out, so the stub inherits the old operator's role
/// up to the product of those readouts: a −1 X-line product leaves the
/// state with the logical X sign inverted (cured by the new logical Z),
/// and dually for the Z line. The cures are applied eagerly and returned;
/// with them the encoded state — including one entangled with the rest of
/// the canvas — is carried over exactly.
pub fn contract_patch(
    t: &mut Tableau,
    reg: &mut GridRegistry,
    p: &PatchLayout,
    d_new: usize,
) -> Result<(PatchLayout, PauliString)> {
    if d_new < 2 {
        return Err(Error::InvalidState(format!(
            "cannot contract below distance 2, got {d_new}"
        )));
    }
    if d_new >= p.d() {
        return Err(Error::InvalidState(format!(
            "contraction requires a smaller distance, got {} → {}",
            p.d(),
            d_new
        )));
    }
    let side_new = 2 * d_new + 1;
    let (or, oc) = p.origin();
    let kept = |cell: (usize, usize)| -> bool {
        cell.0 < or + side_new && cell.1 < oc + side_new
    };
    // Measure out the shed data: X basis on the logical X line, Z
    // elsewhere, collapsing their share of the state and recording the
    // readout products over each logical line.
    let x_line: std::collections::HashSet<usize> =
        p.logical_x().support().into_iter().collect();
    let z_line: std::collections::HashSet<usize> =
        p.logical_z().support().into_iter().collect();
    let mut x_product: i8 = 1;
    let mut z_product: i8 = 1;
    for &cell in p.data_qubits() {
        if !kept(cell) {
            let q = p.cell_index(cell);
            let on_x_line = x_line.contains(&q);
            let basis = if on_x_line { PauliLetter::X } else { PauliLetter::Z };
            let outcome = t.measure_pauli(&PauliString::single(t.n(), q, basis)?)?;
            if on_x_line {
                x_product *= outcome;
            } else if z_line.contains(&q) {
                z_product *= outcome;
            }
        }
    }
    let shed_block: Vec<usize> = p
        .block_indices()
        .into_iter()
        .filter(|&q| !kept((q / p.canvas_cols(), q % p.canvas_cols())))
        .collect();
    t.reset_qubits(&shed_block)?;

    reg.release_tile(p.tile())?;
    let new_p = build_patch(reg, p.kind(), d_new, p.origin(), p.orientation())?;
    stabilize(t, &new_p, 1)?;
    canonicalize(t, &new_p)?;
    let mut byproduct = PauliString::identity(t.n());
    if x_product == -1 {
        t.apply_pauli(new_p.logical_z())?;
        byproduct = byproduct.mul(new_p.logical_z())?;
    }
    if z_product == -1 {
        t.apply_pauli(new_p.logical_x())?;
        byproduct = phase_cleared(byproduct.mul(new_p.logical_x())?);
    }
    Ok((new_p, byproduct))
}

/// Apply a Hadamard to every data qubit. The encoded state is conjugated
/// (|0⟩_L ↔ |+⟩_L and so on) and the returned layout relabels the patch
/// accordingly: check families swap on the same supports, the logical
/// representatives trade places, and the rough/smooth tags flip. Applying
/// it twice restores both the state and the original labelling.
pub fn transversal_h(t: &mut Tableau, p: &PatchLayout) -> Result<PatchLayout> {
    for q in p.data_indices() {
        t.apply_clifford(CliffordGate::H(q))?;
    }
    Ok(p.hadamard_relabeled())
}

/// Move an encoded state into a freshly built patch via a one-bit
/// teleportation: the target is prepared |0⟩_L, the joint X_L·X_L product
/// is measured, the source is read out destructively in the Z basis, and
/// the outcome-dependent logical corrections are applied to the target.
/// Returns the corrections applied.
fn teleport(
    t: &mut Tableau,
    source: &PatchLayout,
    target: &PatchLayout,
) -> Result<PauliString> {
    prepare_zero(t, target)?;
    let m = t.measure_pauli(&source.logical_x().mul(target.logical_x())?)?;
    // Destructive Z-basis readout of the source: every data qubit is
    // measured; the logical Z value is the product over its support.
    let mut z_value: i8 = 1;
    let z_support: std::collections::HashSet<usize> =
        source.logical_z().support().into_iter().collect();
    for &cell in source.data_qubits() {
        let q = source.cell_index(cell);
        let z = PauliString::single(t.n(), q, PauliLetter::Z)?;
        let o = t.measure_pauli(&z)?;
        if z_support.contains(&q) {
            z_value *= o;
        }
    }
    t.reset_qubits(&source.block_indices())?;

    let mut applied = PauliString::identity(t.n());
    if z_value == -1 {
        t.apply_pauli(target.logical_x())?;
        applied = applied.mul(target.logical_x())?;
    }
    if m == -1 {
        t.apply_pauli(target.logical_z())?;
        applied = phase_cleared(applied.mul(target.logical_z())?);
    }
    Ok(applied)
}

/// Restore a transversally-rotated patch to the opposite (original)
/// orientation on its original footprint, preserving the encoded state.
///
/// The state is teleported into an auxiliary patch built on a free
/// neighbouring block, the home block is rebuilt with the flipped
/// orientation, and the state is teleported back. Teleportation
/// corrections are applied eagerly; the returned byproduct is the
/// correction the final hop applied to the rebuilt patch (identity when
/// none was needed).
pub fn hadamard_realign(
    t: &mut Tableau,
    reg: &mut GridRegistry,
    p: &PatchLayout,
) -> Result<(PatchLayout, PauliString)> {
    let d = p.d();
    let target_orientation = match p.orientation() {
        Orientation::RoughLeftRight => Orientation::RoughTopBottom,
        Orientation::RoughTopBottom => Orientation::RoughLeftRight,
    };
    let gap = 2 * d + 2;
    let (or, oc) = p.origin();
    let mut candidates: Vec<(usize, usize)> = vec![(or, oc + gap), (or + gap, oc)];
    if oc >= gap {
        candidates.push((or, oc - gap));
    }
    if or >= gap {
        candidates.push((or - gap, oc));
    }
    let aux_origin = candidates
        .into_iter()
        .find(|&origin| validate_block(reg, origin, d, None).is_ok())
        .ok_or_else(|| {
            Error::Geometry("no free neighbouring block for the auxiliary patch".into())
        })?;

    let aux = build_patch(reg, p.kind(), d, aux_origin, target_orientation)?;
    teleport(t, p, &aux)?;
    reg.release_tile(p.tile())?;

    let home = build_patch(reg, p.kind(), d, p.origin(), target_orientation)?;
    let byproduct = teleport(t, &aux, &home)?;
    reg.release_tile(aux.tile())?;
    Ok((home, byproduct))
}
