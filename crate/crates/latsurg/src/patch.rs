//! Surface-code patch geometry: data/ancilla placement on the canvas,
//! stabilizer enumeration, logical operators, and syndrome extraction.
//!
//! A distance-d patch occupies one (2d+1)×(2d+1) tile block.
//!
//! **Rotated** patches put their d² data qubits at odd-odd block cells and
//! check ancillas at even-even cells `(2a, 2b)`, `0 ≤ a,b ≤ d`: interior
//! positions carry weight-4 checks in a checkerboard (Z where a+b is odd),
//! and the border ring carries the alternating weight-2 boundary checks —
//! Z-type on the smooth sides, X-type on the rough sides.
//!
//! **Unrotated** patches use the interior (2d−1)×(2d−1) sub-block: data where
//! r+c is even (d² + (d−1)² of them), X-checks at (even r, odd c), Z-checks
//! at (odd r, even c), truncated to weight 3 at the boundary.
//!
//! In the default orientation the rough boundaries are left/right, so the
//! weight-d logical X runs horizontally (rough to rough) and the weight-d
//! logical Z vertically (smooth to smooth). The swapped orientation is the
//! transpose of the whole construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2;
use crate::grid::{GridRegistry, TileId};
use crate::pauli::{PauliLetter, PauliString};
use crate::tableau::{CliffordGate, Tableau};

/// Patch construction family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatchKind {
    Rotated,
    Unrotated,
}

/// Which pair of sides is rough (hosts the logical-X endpoints).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Rough left/right, smooth top/bottom (default).
    RoughLeftRight,
    /// Rough top/bottom, smooth left/right.
    RoughTopBottom,
}

/// One side of a patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Top,
    Bottom,
    Left,
    Right,
}

/// Boundary typing of a side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryType {
    Rough,
    Smooth,
}

/// Stabilizer family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckKind {
    Z,
    X,
}

/// Addresses one stabilizer of a patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StabilizerId {
    pub kind: CheckKind,
    pub index: usize,
}

/// One stabilizer check: its ancilla cell, data support, and operator.
#[derive(Debug, Clone)]
pub struct CheckInfo {
    pub kind: CheckKind,
    /// Canvas cell of the measurement ancilla.
    pub ancilla: (usize, usize),
    /// Canvas cells of the data support, sorted row-major.
    pub support: Vec<(usize, usize)>,
    /// The check operator over the full canvas index map.
    pub operator: PauliString,
}

/// A constructed patch, immutable after building.
#[derive(Debug, Clone)]
pub struct PatchLayout {
    kind: PatchKind,
    d: usize,
    origin: (usize, usize),
    orientation: Orientation,
    tile: TileId,
    data_qubits: Vec<(usize, usize)>,
    z_checks: Vec<CheckInfo>,
    x_checks: Vec<CheckInfo>,
    logical_x: PauliString,
    logical_z: PauliString,
    canvas_cols: usize,
    n: usize,
}

/// Syndrome values for one extraction round, one entry per stabilizer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndromeRecord {
    pub round: usize,
    /// Z-check values, index-aligned with the patch's Z stabilizer list.
    pub z_values: Vec<i8>,
    /// X-check values, index-aligned with the patch's X stabilizer list.
    pub x_values: Vec<i8>,
}

/// How syndromes are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyndromeMode {
    /// Measure each check operator directly on the data qubits.
    Direct,
    /// Execute the ancilla-mediated extraction circuits.
    Circuit,
}

/// One element of a syndrome-extraction gate sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircuitOp {
    Gate(CliffordGate),
    MeasureZ(usize),
}

/// Local (block-relative) layout before placement: data cells, checks as
/// (kind, ancilla, support), and the two logical supports.
struct LocalLayout {
    data: Vec<(usize, usize)>,
    checks: Vec<(CheckKind, (usize, usize), Vec<(usize, usize)>)>,
    logical_x: Vec<(usize, usize)>,
    logical_z: Vec<(usize, usize)>,
}

fn rotated_local(d: usize) -> LocalLayout {
    let mut data = Vec::new();
    for i in 0..d {
        for j in 0..d {
            data.push((2 * i + 1, 2 * j + 1));
        }
    }
    let in_block = |r: isize, c: isize| -> Option<(usize, usize)> {
        let max = (2 * d) as isize;
        if r >= 0 && c >= 0 && r <= max && c <= max && r % 2 == 1 && c % 2 == 1 {
            Some((r as usize, c as usize))
        } else {
            None
        }
    };
    let mut checks = Vec::new();
    for a in 0..=d {
        for b in 0..=d {
            let kind = if (a + b) % 2 == 1 { CheckKind::Z } else { CheckKind::X };
            let interior_r = a >= 1 && a <= d - 1;
            let interior_c = b >= 1 && b <= d - 1;
            let keep = if interior_r && interior_c {
                true
            } else if (a == 0 || a == d) && interior_c {
                // Top/bottom border: smooth sides host Z checks only.
                kind == CheckKind::Z
            } else if (b == 0 || b == d) && interior_r {
                // Left/right border: rough sides host X checks only.
                kind == CheckKind::X
            } else {
                false // corners
            };
            if !keep {
                continue;
            }
            let (r, c) = (2 * a, 2 * b);
            let mut support: Vec<(usize, usize)> = [(-1, -1), (-1, 1), (1, -1), (1, 1)]
                .iter()
                .filter_map(|&(dr, dc)| in_block(r as isize + dr, c as isize + dc))
                .collect();
            support.sort_unstable();
            checks.push((kind, (r, c), support));
        }
    }
    let logical_x = (0..d).map(|j| (1, 2 * j + 1)).collect();
    let logical_z = (0..d).map(|i| (2 * i + 1, 1)).collect();
    LocalLayout { data, checks, logical_x, logical_z }
}

fn unrotated_local(d: usize) -> LocalLayout {
    let lo = 1usize;
    let hi = 2 * d - 1;
    let mut data = Vec::new();
    for r in lo..=hi {
        for c in lo..=hi {
            if (r + c) % 2 == 0 {
                data.push((r, c));
            }
        }
    }
    let is_data = |r: isize, c: isize| -> Option<(usize, usize)> {
        if r >= lo as isize && c >= lo as isize && r <= hi as isize && c <= hi as isize && (r + c) % 2 == 0
        {
            Some((r as usize, c as usize))
        } else {
            None
        }
    };
    let mut checks = Vec::new();
    for r in lo..=hi {
        for c in lo..=hi {
            if (r + c) % 2 == 0 {
                continue;
            }
            // X-type stars at (even r, odd c) touch the rough left/right
            // boundaries; Z-type plaquettes at (odd r, even c) the smooth.
            let kind = if r % 2 == 0 { CheckKind::X } else { CheckKind::Z };
            let mut support: Vec<(usize, usize)> = [(-1, 0), (1, 0), (0, -1), (0, 1)]
                .iter()
                .filter_map(|&(dr, dc)| is_data(r as isize + dr, c as isize + dc))
                .collect();
            support.sort_unstable();
            checks.push((kind, (r, c), support));
        }
    }
    let logical_x = (0..d).map(|j| (1, 2 * j + 1)).collect();
    let logical_z = (0..d).map(|i| (2 * i + 1, 1)).collect();
    LocalLayout { data, checks, logical_x, logical_z }
}

fn transpose(layout: LocalLayout) -> LocalLayout {
    let flip = |v: Vec<(usize, usize)>| -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = v.into_iter().map(|(r, c)| (c, r)).collect();
        out.sort_unstable();
        out
    };
    LocalLayout {
        data: flip(layout.data),
        checks: layout
            .checks
            .into_iter()
            .map(|(k, (r, c), support)| (k, (c, r), flip(support)))
            .collect(),
        logical_x: flip(layout.logical_x),
        logical_z: flip(layout.logical_z),
    }
}

/// Build a patch on the canvas: reserve its tile, place data and checks, and
/// form the stabilizer/logical operators over the canvas index map.
pub fn build_patch(
    reg: &mut GridRegistry,
    kind: PatchKind,
    d: usize,
    origin: (usize, usize),
    orientation: Orientation,
) -> Result<PatchLayout> {
    if d < 2 {
        return Err(Error::Dimension(format!("patch distance must be ≥ 2, got {d}")));
    }
    let tile = reg.allocate_tile(d, origin)?;
    let mut local = match kind {
        PatchKind::Rotated => rotated_local(d),
        PatchKind::Unrotated => unrotated_local(d),
    };
    if orientation == Orientation::RoughTopBottom {
        local = transpose(local);
    }
    let place = |(r, c): (usize, usize)| -> (usize, usize) { (origin.0 + r, origin.1 + c) };
    let data_qubits: Vec<(usize, usize)> = local.data.iter().map(|&c| place(c)).collect();
    reg.designate_data(tile, &data_qubits)?;
    let n = reg.cell_count();
    let string_on = |cells: &[(usize, usize)], letter: PauliLetter| -> Result<PauliString> {
        let mut p = PauliString::identity(n);
        for &cell in cells {
            p.set_letter(reg.cell_index(cell)?, letter);
        }
        Ok(p)
    };
    let mut z_checks = Vec::new();
    let mut x_checks = Vec::new();
    for (k, anc, support) in &local.checks {
        let support: Vec<(usize, usize)> = support.iter().map(|&c| place(c)).collect();
        let letter = match k {
            CheckKind::Z => PauliLetter::Z,
            CheckKind::X => PauliLetter::X,
        };
        let info = CheckInfo {
            kind: *k,
            ancilla: place(*anc),
            support: support.clone(),
            operator: string_on(&support, letter)?,
        };
        match k {
            CheckKind::Z => z_checks.push(info),
            CheckKind::X => x_checks.push(info),
        }
    }
    let lx_cells: Vec<(usize, usize)> = local.logical_x.iter().map(|&c| place(c)).collect();
    let lz_cells: Vec<(usize, usize)> = local.logical_z.iter().map(|&c| place(c)).collect();
    let logical_x = string_on(&lx_cells, PauliLetter::X)?;
    let logical_z = string_on(&lz_cells, PauliLetter::Z)?;
    Ok(PatchLayout {
        kind,
        d,
        origin,
        orientation,
        tile,
        data_qubits,
        z_checks,
        x_checks,
        logical_x,
        logical_z,
        canvas_cols: reg.cols(),
        n,
    })
}

impl PatchLayout {
    pub fn kind(&self) -> PatchKind {
        self.kind
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn origin(&self) -> (usize, usize) {
        self.origin
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn tile(&self) -> TileId {
        self.tile
    }

    /// Canvas qubit count the operators are defined over.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Data cells, sorted row-major.
    pub fn data_qubits(&self) -> &[(usize, usize)] {
        &self.data_qubits
    }

    /// Tableau indices of the data cells.
    pub fn data_indices(&self) -> Vec<usize> {
        self.data_qubits.iter().map(|&(r, c)| r * self.canvas_cols + c).collect()
    }

    pub fn z_checks(&self) -> &[CheckInfo] {
        &self.z_checks
    }

    pub fn x_checks(&self) -> &[CheckInfo] {
        &self.x_checks
    }

    /// The check addressed by `id`.
    pub fn check(&self, id: StabilizerId) -> Result<&CheckInfo> {
        let list = match id.kind {
            CheckKind::Z => &self.z_checks,
            CheckKind::X => &self.x_checks,
        };
        list.get(id.index).ok_or_else(|| {
            Error::IndexOutOfRange(format!("no {:?}-check #{}", id.kind, id.index))
        })
    }

    /// All stabilizer ids, Z first then X, in index order.
    pub fn stabilizer_ids(&self) -> Vec<StabilizerId> {
        let z = (0..self.z_checks.len()).map(|i| StabilizerId { kind: CheckKind::Z, index: i });
        let x = (0..self.x_checks.len()).map(|i| StabilizerId { kind: CheckKind::X, index: i });
        z.chain(x).collect()
    }

    pub fn logical_x(&self) -> &PauliString {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &PauliString {
        &self.logical_z
    }

    /// Boundary type of one side under the current orientation.
    pub fn boundary(&self, side: Side) -> BoundaryType {
        let rough_lr = self.orientation == Orientation::RoughLeftRight;
        match side {
            Side::Left | Side::Right => {
                if rough_lr {
                    BoundaryType::Rough
                } else {
                    BoundaryType::Smooth
                }
            }
            Side::Top | Side::Bottom => {
                if rough_lr {
                    BoundaryType::Smooth
                } else {
                    BoundaryType::Rough
                }
            }
        }
    }

    /// Tableau index of a canvas cell (row-major over the canvas).
    pub fn cell_index(&self, cell: (usize, usize)) -> usize {
        cell.0 * self.canvas_cols + cell.1
    }

    /// Column count of the canvas the patch's operators are indexed over.
    pub fn canvas_cols(&self) -> usize {
        self.canvas_cols
    }

    /// Tableau indices of every cell in the patch's tile block.
    pub fn block_indices(&self) -> Vec<usize> {
        let side = 2 * self.d + 1;
        let mut out = Vec::with_capacity(side * side);
        for r in self.origin.0..self.origin.0 + side {
            for c in self.origin.1..self.origin.1 + side {
                out.push(r * self.canvas_cols + c);
            }
        }
        out
    }

    /// The layout seen after a transversal Hadamard: every operator is
    /// conjugated X ↔ Z, so check families swap (same ancillas and
    /// supports), the logical representatives trade places, and the
    /// rough/smooth tags flip.
    pub(crate) fn hadamard_relabeled(&self) -> PatchLayout {
        let swap_letters = |p: &PauliString| -> PauliString {
            let mut out = PauliString::identity(p.n());
            for q in p.support() {
                let l = match p.letter(q) {
                    PauliLetter::X => PauliLetter::Z,
                    PauliLetter::Z => PauliLetter::X,
                    other => other,
                };
                out.set_letter(q, l);
            }
            out
        };
        let flip_check = |c: &CheckInfo| -> CheckInfo {
            CheckInfo {
                kind: match c.kind {
                    CheckKind::Z => CheckKind::X,
                    CheckKind::X => CheckKind::Z,
                },
                ancilla: c.ancilla,
                support: c.support.clone(),
                operator: swap_letters(&c.operator),
            }
        };
        PatchLayout {
            kind: self.kind,
            d: self.d,
            origin: self.origin,
            orientation: match self.orientation {
                Orientation::RoughLeftRight => Orientation::RoughTopBottom,
                Orientation::RoughTopBottom => Orientation::RoughLeftRight,
            },
            tile: self.tile,
            data_qubits: self.data_qubits.clone(),
            z_checks: self.x_checks.iter().map(flip_check).collect(),
            x_checks: self.z_checks.iter().map(flip_check).collect(),
            logical_x: swap_letters(&self.logical_z),
            logical_z: swap_letters(&self.logical_x),
            canvas_cols: self.canvas_cols,
            n: self.n,
        }
    }
}

/// The stored logical representatives (X_L, Z_L).
pub fn logical_operators(p: &PatchLayout) -> (PauliString, PauliString) {
    (p.logical_x.clone(), p.logical_z.clone())
}

/// Ancilla-mediated extraction sequence for one stabilizer: the ancilla is
/// Hadamard-framed, entangled with every support qubit (CZ for Z-type, CNOT
/// for X-type), un-framed, and read out in Z. The readout equals the check
/// value and projects the data accordingly.
pub fn syndrome_circuit(p: &PatchLayout, id: StabilizerId) -> Result<Vec<CircuitOp>> {
    let check = p.check(id)?;
    let anc = p.cell_index(check.ancilla);
    let mut ops = vec![CircuitOp::Gate(CliffordGate::H(anc))];
    for &cell in &check.support {
        let q = p.cell_index(cell);
        let gate = match check.kind {
            CheckKind::Z => CliffordGate::Cz(anc, q),
            CheckKind::X => CliffordGate::Cnot(anc, q),
        };
        ops.push(CircuitOp::Gate(gate));
    }
    ops.push(CircuitOp::Gate(CliffordGate::H(anc)));
    ops.push(CircuitOp::MeasureZ(anc));
    Ok(ops)
}

/// Measure every stabilizer once (Z-checks in index order, then X-checks)
/// and report the record. Circuit mode runs the extraction circuits and
/// resets each ancilla afterward; both modes project identically and consume
/// the random stream at the same rate (one draw per non-deterministic
/// check).
pub fn measure_syndromes(
    t: &mut Tableau,
    p: &PatchLayout,
    mode: SyndromeMode,
) -> Result<SyndromeRecord> {
    measure_syndromes_round(t, p, mode, 0)
}

fn measure_syndromes_round(
    t: &mut Tableau,
    p: &PatchLayout,
    mode: SyndromeMode,
    round: usize,
) -> Result<SyndromeRecord> {
    let mut record = SyndromeRecord { round, z_values: Vec::new(), x_values: Vec::new() };
    for id in p.stabilizer_ids() {
        let check = p.check(id)?;
        let value = match mode {
            SyndromeMode::Direct => t.measure_pauli(&check.operator)?,
            SyndromeMode::Circuit => {
                let mut outcome = None;
                for op in syndrome_circuit(p, id)? {
                    match op {
                        CircuitOp::Gate(g) => t.apply_clifford(g)?,
                        CircuitOp::MeasureZ(q) => {
                            let z = PauliString::single(t.n(), q, PauliLetter::Z)?;
                            outcome = Some(t.measure_pauli(&z)?);
                        }
                    }
                }
                let anc = p.cell_index(check.ancilla);
                t.reset_qubits(&[anc])?;
                outcome.expect("circuit ends with a measurement")
            }
        };
        match id.kind {
            CheckKind::Z => record.z_values.push(value),
            CheckKind::X => record.x_values.push(value),
        }
    }
    Ok(record)
}

/// Run `rounds` direct extraction rounds. After the first round the state is
/// a definite eigenstate of every check, so later noiseless rounds repeat
/// the same record.
pub fn stabilize(t: &mut Tableau, p: &PatchLayout, rounds: usize) -> Result<Vec<SyndromeRecord>> {
    if rounds < 1 {
        return Err(Error::Dimension("stabilize needs ≥ 1 round".into()));
    }
    let mut records = Vec::with_capacity(rounds);
    for round in 0..rounds {
        records.push(measure_syndromes_round(t, p, SyndromeMode::Direct, round)?);
    }
    Ok(records)
}

/// Read all check signs without disturbing the state. Requires the state to
/// be an eigenstate of every check (i.e. after a stabilize round).
pub fn read_check_signs(t: &Tableau, p: &PatchLayout) -> Result<(Vec<i8>, Vec<i8>)> {
    let mut z = Vec::new();
    let mut x = Vec::new();
    for id in p.stabilizer_ids() {
        let check = p.check(id)?;
        let sign = t.contains_stabilizer(&check.operator)?.ok_or_else(|| {
            Error::InvalidState(format!("state is not an eigenstate of {:?}-check #{}", id.kind, id.index))
        })?;
        match id.kind {
            CheckKind::Z => z.push(sign),
            CheckKind::X => x.push(sign),
        }
    }
    Ok((z, x))
}

/// Apply a Pauli correction that returns every check to the +1 eigenvalue
/// without touching the logical sector (the signs of X_L and Z_L are
/// preserved). Requires an eigenstate of every check.
pub fn canonicalize(t: &mut Tableau, p: &PatchLayout) -> Result<()> {
    let (z_signs, x_signs) = read_check_signs(t, p)?;
    let correction = canonical_correction(p, &z_signs, &x_signs)?;
    if !correction.is_identity_letters() {
        t.apply_pauli(&correction)?;
    }
    let (z_after, x_after) = read_check_signs(t, p)?;
    if z_after.contains(&-1) || x_after.contains(&-1) {
        return Err(Error::InvalidState("canonicalization left a negative check".into()));
    }
    Ok(())
}

/// The correction [`canonicalize`] would apply for a recorded sign pattern:
/// a data-qubit Pauli that cures every −1 check without touching the
/// logical sector. Negative X-checks are cured by a Z-type string
/// constrained to commute with X_L (Z-type strings cannot flip Z-checks or
/// Z_L); negative Z-checks dually by an X-type string. Exposed so other
/// state representations can canonicalize from the same sign data.
pub fn canonical_correction(
    p: &PatchLayout,
    z_signs: &[i8],
    x_signs: &[i8],
) -> Result<PauliString> {
    let data = p.data_indices();
    let mut correction = PauliString::identity(p.n());
    if x_signs.contains(&-1) {
        let cure = solve_correction(
            &data,
            p.x_checks.iter().map(|c| &c.operator),
            x_signs,
            p.logical_x(),
            PauliLetter::Z,
            p.n(),
        )?;
        correction = correction.mul(&cure)?;
    }
    if z_signs.contains(&-1) {
        let cure = solve_correction(
            &data,
            p.z_checks.iter().map(|c| &c.operator),
            z_signs,
            p.logical_z(),
            PauliLetter::X,
            p.n(),
        )?;
        correction = correction.mul(&cure)?;
    }
    Ok(correction)
}

/// Solve for a `letter`-type string on `data` qubits that anticommutes with
/// exactly the checks whose sign is −1 and commutes with `protected`.
fn solve_correction<'a>(
    data: &[usize],
    checks: impl Iterator<Item = &'a PauliString>,
    signs: &[i8],
    protected: &PauliString,
    letter: PauliLetter,
    n: usize,
) -> Result<PauliString> {
    let mut rows: Vec<Vec<bool>> = Vec::new();
    let mut rhs: Vec<bool> = Vec::new();
    for (check, &sign) in checks.zip(signs) {
        rows.push(
            data.iter()
                .map(|&q| check.letter(q) != PauliLetter::I)
                .collect(),
        );
        rhs.push(sign == -1);
    }
    rows.push(
        data.iter()
            .map(|&q| protected.letter(q) != PauliLetter::I)
            .collect(),
    );
    rhs.push(false);
    let solution = gf2::solve(&rows, &rhs, data.len())
        .ok_or_else(|| Error::InvalidState("no Pauli correction exists for this sign pattern".into()))?;
    let mut corr = PauliString::identity(n);
    for (&q, &on) in data.iter().zip(&solution) {
        if on {
            corr.set_letter(q, letter);
        }
    }
    Ok(corr)
}

/// Prepare the canonical logical |0⟩: stabilize once from fresh |0⟩ data and
/// canonicalize. All checks and Z_L end at +1.
pub fn prepare_zero(t: &mut Tableau, p: &PatchLayout) -> Result<()> {
    stabilize(t, p, 1)?;
    canonicalize(t, p)
}

/// Prepare the canonical logical |+⟩: put the data row in |+⟩^⊗, stabilize,
/// canonicalize. All checks and X_L end at +1.
pub fn prepare_plus(t: &mut Tableau, p: &PatchLayout) -> Result<()> {
    for q in p.data_indices() {
        t.apply_clifford(CliffordGate::H(q))?;
    }
    stabilize(t, p, 1)?;
    canonicalize(t, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn registry_for(d: usize) -> GridRegistry {
        GridRegistry::new(2 * d + 1, 2 * d + 1)
    }

    #[test]
    fn rotated_d3_counts() {
        let mut reg = registry_for(3);
        let p = build_patch(&mut reg, PatchKind::Rotated, 3, (0, 0), Orientation::RoughLeftRight)
            .unwrap();
        assert_eq!(p.data_qubits().len(), 9);
        assert_eq!(p.z_checks().len(), 4);
        assert_eq!(p.x_checks().len(), 4);
        for c in p.z_checks().iter().chain(p.x_checks()) {
            assert!(c.support.len() == 2 || c.support.len() == 4);
        }
    }

    #[test]
    fn rotated_d2_counts() {
        let mut reg = registry_for(2);
        let p = build_patch(&mut reg, PatchKind::Rotated, 2, (0, 0), Orientation::RoughLeftRight)
            .unwrap();
        assert_eq!(p.data_qubits().len(), 4);
        assert_eq!(p.z_checks().len() + p.x_checks().len(), 3);
    }

    #[test]
    fn unrotated_d3_counts() {
        let mut reg = registry_for(3);
        let p = build_patch(&mut reg, PatchKind::Unrotated, 3, (0, 0), Orientation::RoughLeftRight)
            .unwrap();
        assert_eq!(p.data_qubits().len(), 13);
        assert_eq!(p.z_checks().len(), 6);
        assert_eq!(p.x_checks().len(), 6);
    }

    #[test]
    fn d1_rejected() {
        let mut reg = registry_for(1);
        assert!(build_patch(&mut reg, PatchKind::Rotated, 1, (0, 0), Orientation::RoughLeftRight)
            .is_err());
    }

    #[test]
    fn logical_operator_algebra() {
        for (kind, d) in [
            (PatchKind::Rotated, 2),
            (PatchKind::Rotated, 3),
            (PatchKind::Unrotated, 2),
            (PatchKind::Unrotated, 3),
        ] {
            let mut reg = registry_for(d);
            let p = build_patch(&mut reg, kind, d, (0, 0), Orientation::RoughLeftRight).unwrap();
            let (lx, lz) = logical_operators(&p);
            assert_eq!(lx.weight(), d, "{kind:?} d={d}");
            assert_eq!(lz.weight(), d);
            assert!(!lx.commutes(&lz).unwrap());
            for c in p.z_checks().iter().chain(p.x_checks()) {
                assert!(lx.commutes(&c.operator).unwrap());
                assert!(lz.commutes(&c.operator).unwrap());
            }
        }
    }

    #[test]
    fn stabilizers_commute_and_are_independent() {
        for (kind, d) in [
            (PatchKind::Rotated, 2),
            (PatchKind::Rotated, 3),
            (PatchKind::Unrotated, 3),
        ] {
            let mut reg = registry_for(d);
            let p = build_patch(&mut reg, kind, d, (0, 0), Orientation::RoughLeftRight).unwrap();
            let all: Vec<&CheckInfo> = p.z_checks().iter().chain(p.x_checks()).collect();
            assert_eq!(all.len(), p.data_qubits().len() - 1, "{kind:?} d={d}");
            for i in 0..all.len() {
                for j in 0..all.len() {
                    assert!(all[i].operator.commutes(&all[j].operator).unwrap());
                }
            }
            // Independence: symplectic (x|z) rows have full rank.
            let n = p.n();
            let rows: Vec<Vec<bool>> = all
                .iter()
                .map(|c| {
                    let mut row = Vec::with_capacity(2 * n);
                    for q in 0..n {
                        let l = c.operator.letter(q);
                        row.push(l == PauliLetter::X || l == PauliLetter::Y);
                    }
                    for q in 0..n {
                        let l = c.operator.letter(q);
                        row.push(l == PauliLetter::Z || l == PauliLetter::Y);
                    }
                    row
                })
                .collect();
            assert_eq!(crate::gf2::rank(&rows), all.len());
        }
    }

    #[test]
    fn orientation_transpose_swaps_boundaries() {
        let mut reg = registry_for(3);
        let p = build_patch(&mut reg, PatchKind::Rotated, 3, (0, 0), Orientation::RoughTopBottom)
            .unwrap();
        assert_eq!(p.boundary(Side::Top), BoundaryType::Rough);
        assert_eq!(p.boundary(Side::Left), BoundaryType::Smooth);
        // Logical X now runs vertically: all its support in one column.
        let cells: Vec<usize> = p.logical_x().support();
        let cols: Vec<usize> = cells.iter().map(|&q| q % reg.cols()).collect();
        assert!(cols.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(p.data_qubits().len(), 9);
        assert_eq!(p.z_checks().len(), 4);
        assert_eq!(p.x_checks().len(), 4);
    }

    #[test]
    fn fresh_zero_state_syndromes() {
        let mut reg = registry_for(3);
        let p = build_patch(&mut reg, PatchKind::Rotated, 3, (0, 0), Orientation::RoughLeftRight)
            .unwrap();
        let mut t = Tableau::new(reg.cell_count(), 11);
        let records = stabilize(&mut t, &p, 2).unwrap();
        assert!(records[0].z_values.iter().all(|&v| v == 1));
        // X outcomes freeze after round one.
        assert_eq!(records[0].z_values, records[1].z_values);
        assert_eq!(records[0].x_values, records[1].x_values);
    }

    #[test]
    fn plus_state_syndromes() {
        let mut reg = registry_for(3);
        let p = build_patch(&mut reg, PatchKind::Rotated, 3, (0, 0), Orientation::RoughLeftRight)
            .unwrap();
        let mut t = Tableau::new(reg.cell_count(), 11);
        for q in p.data_indices() {
            t.apply_clifford(CliffordGate::H(q)).unwrap();
        }
        let rec = measure_syndromes(&mut t, &p, SyndromeMode::Direct).unwrap();
        assert!(rec.x_values.iter().all(|&v| v == 1));
    }

    #[test]
    fn syndrome_circuit_templates() {
        let mut reg = registry_for(3);
        let p = build_patch(&mut reg, PatchKind::Rotated, 3, (0, 0), Orientation::RoughLeftRight)
            .unwrap();
        let z0 = StabilizerId { kind: CheckKind::Z, index: 0 };
        let ops = syndrome_circuit(&p, z0).unwrap();
        let w = p.check(z0).unwrap().support.len();
        assert_eq!(ops.len(), w + 3);
        assert!(matches!(ops[0], CircuitOp::Gate(CliffordGate::H(_))));
        assert!(matches!(ops[1], CircuitOp::Gate(CliffordGate::Cz(_, _))));
        assert!(matches!(ops[ops.len() - 2], CircuitOp::Gate(CliffordGate::H(_))));
        assert!(matches!(ops[ops.len() - 1], CircuitOp::MeasureZ(_)));
        let x0 = StabilizerId { kind: CheckKind::X, index: 0 };
        let ops = syndrome_circuit(&p, x0).unwrap();
        assert!(matches!(ops[1], CircuitOp::Gate(CliffordGate::Cnot(_, _))));
        assert!(syndrome_circuit(&p, StabilizerId { kind: CheckKind::Z, index: 9 }).is_err());
    }

    #[test]
    fn circuit_and_direct_modes_agree() {
        let mut reg = registry_for(3);
        let p = build_patch(&mut reg, PatchKind::Rotated, 3, (0, 0), Orientation::RoughLeftRight)
            .unwrap();
        let mut t = Tableau::new(reg.cell_count(), 21);
        prepare_zero(&mut t, &p).unwrap();
        // Same tableau (and same stream position) measured both ways.
        let mut t2 = t.clone();
        let direct = measure_syndromes(&mut t, &p, SyndromeMode::Direct).unwrap();
        let circuit = measure_syndromes(&mut t2, &p, SyndromeMode::Circuit).unwrap();
        assert_eq!(direct, circuit);
        assert_eq!(t.rng_draws(), t2.rng_draws());
    }

    #[test]
    fn single_x_error_flips_adjacent_z_checks() {
        let mut reg = registry_for(3);
        let p = build_patch(&mut reg, PatchKind::Rotated, 3, (0, 0), Orientation::RoughLeftRight)
            .unwrap();
        let mut t = Tableau::new(reg.cell_count(), 31);
        prepare_zero(&mut t, &p).unwrap();
        let victim = p.data_qubits()[4]; // central data qubit
        let err = PauliString::single(p.n(), p.cell_index(victim), PauliLetter::X).unwrap();
        t.apply_pauli(&err).unwrap();
        let rec = measure_syndromes(&mut t, &p, SyndromeMode::Direct).unwrap();
        for (i, c) in p.z_checks().iter().enumerate() {
            let should_flip = !c.operator.commutes(&err).unwrap();
            assert_eq!(rec.z_values[i] == -1, should_flip, "Z-check {i}");
        }
        assert!(rec.x_values.iter().all(|&v| v == 1));
    }

    #[test]
    fn prepare_zero_and_plus_are_canonical() {
        for kind in [PatchKind::Rotated, PatchKind::Unrotated] {
            let mut reg = registry_for(3);
            let p = build_patch(&mut reg, kind, 3, (0, 0), Orientation::RoughLeftRight).unwrap();
            let mut t = Tableau::new(reg.cell_count(), 41);
            prepare_zero(&mut t, &p).unwrap();
            let (z, x) = read_check_signs(&t, &p).unwrap();
            assert!(z.iter().chain(x.iter()).all(|&s| s == 1));
            assert_eq!(t.contains_stabilizer(p.logical_z()).unwrap(), Some(1));

            let mut t = Tableau::new(reg.cell_count(), 42);
            prepare_plus(&mut t, &p).unwrap();
            let (z, x) = read_check_signs(&t, &p).unwrap();
            assert!(z.iter().chain(x.iter()).all(|&s| s == 1));
            assert_eq!(t.contains_stabilizer(p.logical_x()).unwrap(), Some(1));
        }
    }
}
