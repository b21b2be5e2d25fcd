//! Circuit compilation and execution: a line-oriented circuit grammar, a
//! lowering pass onto patch-level actions, a fence scheduler that packs
//! those actions into parallel timesteps on a tile grid, a serializable
//! schedule format, and an executor that runs a schedule either on the
//! statevector tier (exact, any angle) or on the stabilizer tier (patch
//! protocols on a tableau).
//!
//! The schedule format is versioned JSON whose field order is fixed by
//! the struct definitions here, so a compiled schedule is byte-stable
//! for a given input and configuration.

use std::collections::HashSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{apply_to_state, fidelity, gate_matrix, rotation_matrix, DenseState};
use crate::error::{Error, Result};
use crate::gates::{decompose_gate, Angle, GateIR, GateKind, RotationTerm};
use crate::grid::GridRegistry;
use crate::patch::{build_patch, prepare_plus, prepare_zero, Orientation, PatchKind, PatchLayout};
use crate::pauli::{PauliLetter, PauliString};
use crate::protocols::{
    logical_cnot, logical_cz, logical_pauli, measure_logical, quarter_turn_class,
    teleported_rotation, LogicalPauli, ProtocolTrace,
};
use crate::tableau::Tableau;

// ---------------------------------------------------------------------------
// Circuit text parsing
// ---------------------------------------------------------------------------

/// A parsed circuit: the declared qubit count and the gate list in
/// program order.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitIR {
    pub n_qubits: usize,
    pub gates: Vec<GateIR>,
}

fn perr<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, col, msg: msg.into() })
}

/// Split one line body into (1-based column, token) pairs.
fn tokenize(body: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &body[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &body[s..]));
    }
    out
}

fn parse_operand(line: usize, tok: (usize, &str), declared: usize) -> Result<usize> {
    let (col, text) = tok;
    let digits = match text.strip_prefix('q') {
        Some(d) if !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()) => d,
        _ => return perr(line, col, format!("expected a qubit operand like q0, got '{text}'")),
    };
    let idx: usize = digits
        .parse()
        .map_err(|_| Error::Parse { line, col, msg: format!("qubit index '{text}' is too large") })?;
    if idx >= declared {
        return perr(
            line,
            col,
            format!("qubit q{idx} is outside the declared range of {declared} qubit(s)"),
        );
    }
    Ok(idx)
}

fn parse_gate_line(line: usize, toks: &[(usize, &str)], declared: usize) -> Result<GateIR> {
    let (hcol, head) = toks[0];
    let operand_count = toks.len() - 1;
    let expect = |want: usize, extra_lead: usize| -> Result<()> {
        if operand_count != want + extra_lead {
            return perr(
                line,
                hcol,
                format!("{head} takes {want} qubit operand(s), got {}", operand_count - extra_lead.min(operand_count)),
            );
        }
        Ok(())
    };
    let wrap = |r: Result<GateIR>| -> Result<GateIR> {
        r.map_err(|e| Error::Parse { line, col: hcol, msg: e.to_string() })
    };

    let plain1 = |kind: GateKind| -> Result<GateIR> {
        expect(1, 0)?;
        let q = parse_operand(line, toks[1], declared)?;
        wrap(GateIR::plain(kind, &[q]))
    };
    let plain2 = |kind: GateKind| -> Result<GateIR> {
        expect(2, 0)?;
        let a = parse_operand(line, toks[1], declared)?;
        let b = parse_operand(line, toks[2], declared)?;
        if a == b {
            return perr(
                line,
                toks[2].0,
                format!("{head} operands must be distinct; q{a} appears twice"),
            );
        }
        wrap(GateIR::plain(kind, &[a, b]))
    };

    match head {
        "X" => plain1(GateKind::X),
        "Y" => plain1(GateKind::Y),
        "Z" => plain1(GateKind::Z),
        "H" => plain1(GateKind::H),
        "S" => plain1(GateKind::S),
        "T" => plain1(GateKind::T),
        "CNOT" => plain2(GateKind::Cnot),
        "CZ" => plain2(GateKind::Cz),
        "CPP" => {
            expect(2, 1)?;
            let (lcol, ltext) = toks[1];
            let chars: Vec<char> = ltext.chars().collect();
            if chars.len() != 2 {
                return perr(line, lcol, format!("CPP takes a two-letter Pauli pair like ZX, got '{ltext}'"));
            }
            let letter = |c: char| -> Result<PauliLetter> {
                match c {
                    'X' => Ok(PauliLetter::X),
                    'Y' => Ok(PauliLetter::Y),
                    'Z' => Ok(PauliLetter::Z),
                    _ => perr(line, lcol, format!("CPP letters must be X, Y, or Z, got '{c}'")),
                }
            };
            let (p1, p2) = (letter(chars[0])?, letter(chars[1])?);
            let a = parse_operand(line, toks[2], declared)?;
            let b = parse_operand(line, toks[3], declared)?;
            if a == b {
                return perr(
                    line,
                    toks[3].0,
                    format!("CPP operands must be distinct; q{a} appears twice"),
                );
            }
            wrap(GateIR::controlled_pauli(p1, p2, a, b))
        }
        _ => {
            let rot_kind = match head.get(..2) {
                Some("RX") => Some(GateKind::RX),
                Some("RY") => Some(GateKind::RY),
                Some("RZ") => Some(GateKind::RZ),
                _ => None,
            };
            if let Some(kind) = rot_kind {
                let rest = &head[2..];
                if !(rest.len() >= 2 && rest.starts_with('(') && rest.ends_with(')')) {
                    return perr(
                        line,
                        hcol,
                        format!("rotation gates take an inline angle like {}(pi/4)", &head[..2]),
                    );
                }
                let angle_text = &rest[1..rest.len() - 1];
                let angle = Angle::parse(angle_text).map_err(|e| Error::Parse {
                    line,
                    col: hcol + 3,
                    msg: e.to_string(),
                })?;
                expect(1, 0)?;
                let q = parse_operand(line, toks[1], declared)?;
                wrap(GateIR::rotation(kind, q, angle))
            } else {
                perr(line, hcol, format!("unknown gate '{head}'"))
            }
        }
    }
}

/// Parse circuit text. The grammar is line oriented: `#` starts a
/// comment, blank lines are skipped, the first directive must be
/// `qubits <N>` (N ≥ 1, exactly once), and each following line is one
/// gate — `X|Y|Z|H|S|T q<i>`, `RX|RY|RZ(<angle>) q<i>` with a dyadic
/// (`pi/4`, `-3pi/4`) or floating-point radian angle, `CNOT q<i> q<j>`,
/// `CZ q<i> q<j>`, or `CPP <P1><P2> q<i> q<j>`. Errors carry the
/// 1-based line and column of the offending token.
pub fn parse_circuit(text: &str) -> Result<CircuitIR> {
    let mut n_qubits: Option<usize> = None;
    let mut decl_line = 0usize;
    let mut gates = Vec::new();
    for (ln0, raw) in text.lines().enumerate() {
        let line = ln0 + 1;
        let body = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let toks = tokenize(body);
        if toks.is_empty() {
            continue;
        }
        let (hcol, head) = toks[0];
        if head == "qubits" {
            if n_qubits.is_some() {
                return perr(
                    line,
                    hcol,
                    format!("duplicate qubits declaration (first on line {decl_line})"),
                );
            }
            if toks.len() != 2 {
                return perr(line, hcol, "qubits takes exactly one count");
            }
            let (ccol, ctext) = toks[1];
            let n: usize = ctext.parse().map_err(|_| Error::Parse {
                line,
                col: ccol,
                msg: format!("invalid qubit count '{ctext}'"),
            })?;
            if n == 0 {
                return perr(line, ccol, "qubit count must be at least 1");
            }
            n_qubits = Some(n);
            decl_line = line;
            continue;
        }
        match n_qubits {
            Some(declared) => gates.push(parse_gate_line(line, &toks, declared)?),
            None => return perr(line, hcol, "gates must come after the qubits declaration"),
        }
    }
    let n_qubits = n_qubits
        .ok_or(Error::Parse { line: 1, col: 1, msg: "no qubits declaration".into() })?;
    Ok(CircuitIR { n_qubits, gates })
}

// ---------------------------------------------------------------------------
// Lowering
// ---------------------------------------------------------------------------

/// One patch-level operation awaiting a timestep: the unit the fence
/// scheduler packs.
#[derive(Debug, Clone, PartialEq)]
enum LoweredOp {
    /// A single-qubit axis rotation kept as a rotation (odd quarter
    /// turns and non-dyadic angles).
    Rotation { qubit: usize, axis: PauliLetter, angle: Angle },
    /// A half-turn rotation reduced to a direct logical Pauli.
    Pauli { qubit: usize, axis: PauliLetter },
    Cnot { control: usize, target: usize },
    Cz { a: usize, b: usize },
}

impl LoweredOp {
    fn is_two_qubit(&self) -> bool {
        matches!(self, LoweredOp::Cnot { .. } | LoweredOp::Cz { .. })
    }
}

/// Lower a parsed circuit to the patch-level operation stream, in
/// program order. Single-qubit gates decompose into axis rotations,
/// which are then classified: full turns vanish, half turns become
/// logical Paulis, everything else stays a rotation. CNOT and CZ map to
/// their joint-measurement protocols directly, as do `CPP ZX` (= CNOT)
/// and `CPP ZZ` (= CZ); other controlled-Pauli pairs have no protocol
/// here and are rejected by name.
fn lower_circuit(c: &CircuitIR) -> Result<Vec<LoweredOp>> {
    let mut out = Vec::new();
    for g in &c.gates {
        match g.kind {
            GateKind::Cnot => {
                out.push(LoweredOp::Cnot { control: g.qubits[0], target: g.qubits[1] })
            }
            GateKind::Cz => out.push(LoweredOp::Cz { a: g.qubits[0], b: g.qubits[1] }),
            GateKind::Cpp => {
                let (p1, p2) = g.paulis.expect("validated at parse");
                match (p1, p2) {
                    (PauliLetter::Z, PauliLetter::X) => {
                        out.push(LoweredOp::Cnot { control: g.qubits[0], target: g.qubits[1] })
                    }
                    (PauliLetter::Z, PauliLetter::Z) => {
                        out.push(LoweredOp::Cz { a: g.qubits[0], b: g.qubits[1] })
                    }
                    _ => {
                        return Err(Error::UnsupportedGate(format!(
                            "C({}{}) has no joint-measurement protocol; only C(ZX) and C(ZZ) are schedulable",
                            p1.symbol(),
                            p2.symbol()
                        )))
                    }
                }
            }
            _ => {
                let qubit = g.qubits[0];
                for term in decompose_gate(g)? {
                    let axis = term.pauli().letter(0);
                    let angle = term.angle();
                    if angle.is_zero() {
                        continue;
                    }
                    match quarter_turn_class(&angle) {
                        Ok(0) => {}
                        Ok(2) => out.push(LoweredOp::Pauli { qubit, axis }),
                        Ok(_) => out.push(LoweredOp::Rotation { qubit, axis, angle }),
                        // Non-dyadic angles stay rotations; the
                        // statevector tier runs them, the stabilizer
                        // tier decides support at execution.
                        Err(_) => out.push(LoweredOp::Rotation { qubit, axis, angle }),
                    }
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Schedule format
// ---------------------------------------------------------------------------

/// Cell dimensions of the canvas a schedule runs on, plus the patch
/// distance its tiles use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub d: usize,
}

/// What a tile holds: a circuit qubit, or a transitional patch used by
/// two-qubit protocols and teleported rotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TileRole {
    Data,
    Trn,
}

/// One tile of the layout: its id (allocation order), role, the circuit
/// qubit it carries (data tiles only), and its cell origin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileSpec {
    pub id: u32,
    pub role: TileRole,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit: Option<usize>,
    pub origin: (usize, usize),
}

/// One schedulable action. `trn` fields index the transitional tiles in
/// declaration order (tile id = data count + index).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Action {
    /// Apply the axis rotation e^{−iφ·axis} to one qubit.
    Inject { qubit: usize, axis: String, angle: Angle },
    Cnot { control: usize, target: usize, trn: usize },
    Cz { a: usize, b: usize, trn: usize },
    /// Apply a logical Pauli ("X_L", "Y_L", or "Z_L").
    LogicalPauli { qubit: usize, pauli: String },
    /// Read one qubit out in the X, Y, or Z basis. The compiler never
    /// emits this (the grammar has no measurement statement); it exists
    /// for hand-written and tool-generated schedules.
    Measure { qubit: usize, basis: String },
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Inject { qubit, axis, angle } => write!(f, "{axis}_{{{angle}}} @ q{qubit}"),
            Action::Cnot { control, target, trn } => {
                write!(f, "cnot q{control} -> q{target} [trn {trn}]")
            }
            Action::Cz { a, b, trn } => write!(f, "cz q{a} ~ q{b} [trn {trn}]"),
            Action::LogicalPauli { qubit, pauli } => write!(f, "{pauli} @ q{qubit}"),
            Action::Measure { qubit, basis } => write!(f, "measure {basis} @ q{qubit}"),
        }
    }
}

/// One timestep: its 1-based index and the actions that run in it, in
/// program order. Actions within a step touch disjoint tile sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleStep {
    pub index: usize,
    pub actions: Vec<Action>,
}

/// Headline schedule costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleMetrics {
    pub tiles_used: usize,
    pub timesteps: usize,
}

/// A compiled schedule: versioned, self-describing (the grid, the tile
/// layout, the per-step actions, the costs, and the original circuit
/// text it was compiled from).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurgerySchedule {
    pub version: u32,
    pub grid: GridSpec,
    pub tiles: Vec<TileSpec>,
    pub steps: Vec<ScheduleStep>,
    pub metrics: ScheduleMetrics,
    pub source: String,
}

// ---------------------------------------------------------------------------
// Scheduling
// ---------------------------------------------------------------------------

/// Compilation knobs: patch distance, number of transitional tiles, and
/// an optional explicit canvas size (must be at least the computed
/// minimum; the minimum is used when absent).
#[derive(Debug, Clone)]
pub struct ScheduleConfig {
    pub d: usize,
    pub trn_count: usize,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig { d: 2, trn_count: 1, rows: None, cols: None }
    }
}

/// Tile origins: data tiles stacked in the left column (qubit i in row
/// block i), transitional tiles in a second column, one gutter of cells
/// between any two blocks.
fn tile_origins(
    n: usize,
    trn_count: usize,
    d: usize,
) -> (Vec<(usize, usize)>, Vec<(usize, usize)>, usize, usize) {
    let side = 2 * d + 1;
    let stride = 2 * d + 2;
    let data: Vec<_> = (0..n).map(|i| (i * stride, 0)).collect();
    let trn: Vec<_> = (0..trn_count).map(|j| (j * stride, stride)).collect();
    let tall = n.max(trn_count);
    let min_rows = (tall - 1) * stride + side;
    let min_cols = if trn_count > 0 { stride + side } else { side };
    (data, trn, min_rows, min_cols)
}

/// Pack the lowered stream into timesteps. Placement rules, applied in
/// program order: every action lands strictly after the last step that
/// touched any of its tiles; single-tile actions additionally land
/// strictly after the latest preceding two-qubit action's step (those
/// protocols occupy routing cells the whole step); a two-qubit action
/// lands at the earliest step with a free transitional tile, and takes
/// the lowest-numbered one free there.
fn build_schedule(
    circuit: &CircuitIR,
    ops: &[LoweredOp],
    cfg: &ScheduleConfig,
    source: &str,
) -> Result<SurgerySchedule> {
    if cfg.d < 2 {
        return Err(Error::Dimension(format!("patch distance must be ≥ 2, got {}", cfg.d)));
    }
    let n = circuit.n_qubits;
    if cfg.trn_count == 0 && ops.iter().any(LoweredOp::is_two_qubit) {
        return Err(Error::Geometry(
            "two-qubit protocols need at least one transitional tile, but trn_count is 0".into(),
        ));
    }
    let (data_origins, trn_origins, min_rows, min_cols) = tile_origins(n, cfg.trn_count, cfg.d);
    let rows = cfg.rows.unwrap_or(min_rows);
    let cols = cfg.cols.unwrap_or(min_cols);
    if rows < min_rows || cols < min_cols {
        return Err(Error::Geometry(format!(
            "{n} data and {} transitional tile(s) at distance {} need at least a \
             {min_rows}x{min_cols} grid, got {rows}x{cols}",
            cfg.trn_count, cfg.d
        )));
    }

    let mut last_step = vec![0usize; n];
    let mut fence = 0usize;
    let mut steps: Vec<Vec<Action>> = Vec::new();
    let mut busy: Vec<HashSet<usize>> = Vec::new();
    let reach = |steps: &mut Vec<Vec<Action>>, busy: &mut Vec<HashSet<usize>>, s: usize| {
        while steps.len() < s {
            steps.push(Vec::new());
            busy.push(HashSet::new());
        }
    };

    for op in ops {
        match *op {
            LoweredOp::Rotation { qubit, axis, angle } => {
                let s = last_step[qubit].max(fence) + 1;
                reach(&mut steps, &mut busy, s);
                steps[s - 1].push(Action::Inject {
                    qubit,
                    axis: axis.symbol().to_string(),
                    angle,
                });
                last_step[qubit] = s;
            }
            LoweredOp::Pauli { qubit, axis } => {
                let s = last_step[qubit].max(fence) + 1;
                reach(&mut steps, &mut busy, s);
                steps[s - 1].push(Action::LogicalPauli {
                    qubit,
                    pauli: format!("{}_L", axis.symbol()),
                });
                last_step[qubit] = s;
            }
            LoweredOp::Cnot { control, target } | LoweredOp::Cz { a: control, b: target } => {
                let mut s = last_step[control].max(last_step[target]) + 1;
                let u = loop {
                    reach(&mut steps, &mut busy, s);
                    if busy[s - 1].len() < cfg.trn_count {
                        break (0..cfg.trn_count)
                            .find(|u| !busy[s - 1].contains(u))
                            .expect("a free transitional index exists");
                    }
                    s += 1;
                };
                busy[s - 1].insert(u);
                steps[s - 1].push(match *op {
                    LoweredOp::Cnot { control, target } => {
                        Action::Cnot { control, target, trn: u }
                    }
                    LoweredOp::Cz { a, b } => Action::Cz { a, b, trn: u },
                    _ => unreachable!(),
                });
                last_step[control] = s;
                last_step[target] = s;
                fence = fence.max(s);
            }
        }
    }

    let mut tiles = Vec::with_capacity(n + cfg.trn_count);
    for (i, &origin) in data_origins.iter().enumerate() {
        tiles.push(TileSpec { id: i as u32, role: TileRole::Data, qubit: Some(i), origin });
    }
    for (j, &origin) in trn_origins.iter().enumerate() {
        tiles.push(TileSpec { id: (n + j) as u32, role: TileRole::Trn, qubit: None, origin });
    }
    let steps: Vec<ScheduleStep> = steps
        .into_iter()
        .enumerate()
        .map(|(i, actions)| ScheduleStep { index: i + 1, actions })
        .collect();
    let schedule = SurgerySchedule {
        version: 1,
        grid: GridSpec { rows, cols, d: cfg.d },
        metrics: ScheduleMetrics { tiles_used: tiles.len(), timesteps: steps.len() },
        tiles,
        steps,
        source: source.to_string(),
    };
    validate_schedule(&schedule)?;
    Ok(schedule)
}

/// Compile circuit text to a schedule: parse, lower, pack.
pub fn compile_circuit(text: &str, cfg: &ScheduleConfig) -> Result<SurgerySchedule> {
    let circuit = parse_circuit(text)?;
    let ops = lower_circuit(&circuit)?;
    build_schedule(&circuit, &ops, cfg, text)
}

// ---------------------------------------------------------------------------
// Schedule validation
// ---------------------------------------------------------------------------

fn parse_axis(s: &str) -> Result<PauliLetter> {
    match s {
        "X" => Ok(PauliLetter::X),
        "Y" => Ok(PauliLetter::Y),
        "Z" => Ok(PauliLetter::Z),
        _ => Err(Error::InvalidState(format!("axis must be X, Y, or Z, got '{s}'"))),
    }
}

fn parse_pauli_name(s: &str) -> Result<PauliLetter> {
    match s {
        "X_L" => Ok(PauliLetter::X),
        "Y_L" => Ok(PauliLetter::Y),
        "Z_L" => Ok(PauliLetter::Z),
        _ => Err(Error::InvalidState(format!(
            "logical Pauli must be X_L, Y_L, or Z_L, got '{s}'"
        ))),
    }
}

/// Structural invariants every executable schedule satisfies: version 1;
/// data tiles first (tile i carries qubit i), transitional tiles after
/// (no qubit); sequential 1-based step indices; metrics consistent with
/// the tile and step counts; action operands in range with distinct
/// tiles per action; and disjoint active-tile sets within each step.
pub fn validate_schedule(s: &SurgerySchedule) -> Result<()> {
    if s.version != 1 {
        return Err(Error::InvalidState(format!("unsupported schedule version {}", s.version)));
    }
    let n_data = s.tiles.iter().filter(|t| t.role == TileRole::Data).count();
    let n_trn = s.tiles.len() - n_data;
    if n_data == 0 {
        return Err(Error::InvalidState("a schedule needs at least one data tile".into()));
    }
    for (i, t) in s.tiles.iter().enumerate() {
        if t.id as usize != i {
            return Err(Error::InvalidState(format!(
                "tile ids must be sequential from 0; position {i} has id {}",
                t.id
            )));
        }
        if i < n_data {
            if t.role != TileRole::Data || t.qubit != Some(i) {
                return Err(Error::InvalidState(format!(
                    "data tiles must come first, tile {i} carrying qubit {i}"
                )));
            }
        } else if t.role != TileRole::Trn || t.qubit.is_some() {
            return Err(Error::InvalidState(
                "transitional tiles must follow the data tiles and carry no qubit".into(),
            ));
        }
    }
    if s.metrics.tiles_used != s.tiles.len() {
        return Err(Error::InvalidState(format!(
            "metrics.tiles_used is {}, but {} tiles are declared",
            s.metrics.tiles_used,
            s.tiles.len()
        )));
    }
    if s.metrics.timesteps != s.steps.len() {
        return Err(Error::InvalidState(format!(
            "metrics.timesteps is {}, but {} steps are declared",
            s.metrics.timesteps,
            s.steps.len()
        )));
    }
    for (i, step) in s.steps.iter().enumerate() {
        if step.index != i + 1 {
            return Err(Error::InvalidState(format!(
                "step at position {} must have index {}, got {}",
                i,
                i + 1,
                step.index
            )));
        }
        let mut active: HashSet<usize> = HashSet::new();
        let mut touch = |tile: usize| -> Result<()> {
            if !active.insert(tile) {
                return Err(Error::InvalidState(format!(
                    "step {}: tile {} is used by two actions",
                    step.index, tile
                )));
            }
            Ok(())
        };
        let check_qubit = |q: usize| -> Result<()> {
            if q >= n_data {
                return Err(Error::IndexOutOfRange(format!(
                    "step {}: qubit q{q} exceeds the {n_data} data tile(s)",
                    step.index
                )));
            }
            Ok(())
        };
        let check_trn = |u: usize| -> Result<()> {
            if u >= n_trn {
                return Err(Error::IndexOutOfRange(format!(
                    "step {}: transitional index {u} exceeds the {n_trn} transitional tile(s)",
                    step.index
                )));
            }
            Ok(())
        };
        for a in &step.actions {
            match a {
                Action::Inject { qubit, axis, .. } => {
                    check_qubit(*qubit)?;
                    parse_axis(axis)?;
                    touch(*qubit)?;
                }
                Action::Cnot { control, target, trn } => {
                    check_qubit(*control)?;
                    check_qubit(*target)?;
                    check_trn(*trn)?;
                    if control == target {
                        return Err(Error::InvalidState(format!(
                            "step {}: cnot operands must be distinct",
                            step.index
                        )));
                    }
                    touch(*control)?;
                    touch(*target)?;
                    touch(n_data + *trn)?;
                }
                Action::Cz { a: x, b: y, trn } => {
                    check_qubit(*x)?;
                    check_qubit(*y)?;
                    check_trn(*trn)?;
                    if x == y {
                        return Err(Error::InvalidState(format!(
                            "step {}: cz operands must be distinct",
                            step.index
                        )));
                    }
                    touch(*x)?;
                    touch(*y)?;
                    touch(n_data + *trn)?;
                }
                Action::LogicalPauli { qubit, pauli } => {
                    check_qubit(*qubit)?;
                    parse_pauli_name(pauli)?;
                    touch(*qubit)?;
                }
                Action::Measure { qubit, basis } => {
                    check_qubit(*qubit)?;
                    parse_axis(basis)?;
                    touch(*qubit)?;
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

/// Which machine runs the schedule: the exact statevector over the
/// circuit qubits, or the stabilizer tableau over the full canvas with
/// patch protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Logical,
    Physical,
}

impl Tier {
    pub fn name(self) -> &'static str {
        match self {
            Tier::Logical => "logical",
            Tier::Physical => "physical",
        }
    }
}

/// Execution knobs.
#[derive(Debug, Clone)]
pub struct ExecConfig {
    pub tier: Tier,
    pub seed: u64,
}

/// One executed action: what ran, the ±1 outcomes it produced (protocol
/// measurement streams on the stabilizer tier, readouts on both tiers),
/// and an optional note (net corrections, no-op reasons).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionReport {
    pub action: Action,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outcomes: Vec<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// One executed timestep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub index: usize,
    pub actions: Vec<ActionReport>,
}

/// One explicit readout (measure actions only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub qubit: usize,
    pub basis: String,
    pub outcome: i8,
}

/// The full record of one schedule execution. `tags` (stabilizer tier)
/// lists every single-qubit and two-qubit logical product the final
/// state is an eigenstate of, as `±L@qi` / `±L1L2@qiqj` (the Y letter
/// uses the sign-free X·Z product as its representative). `fidelity`
/// (statevector tier, measurement-free schedules with a non-empty
/// source) compares the scheduled action stream against the source
/// circuit's canonical gate matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionReport {
    pub tier: String,
    pub seed: u64,
    pub qubits: usize,
    pub steps: Vec<StepReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub measurements: Vec<MeasurementRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
}

/// Run a schedule at the requested tier. Both tiers are deterministic
/// for a fixed seed; the statevector tier supports every angle, while
/// the stabilizer tier runs quarter-turn rotations through a
/// transitional patch and accepts a non-dyadic rotation only when the
/// target is an eigenstate of its axis (where it is a pure phase).
pub fn execute_schedule(s: &SurgerySchedule, cfg: &ExecConfig) -> Result<ExecutionReport> {
    validate_schedule(s)?;
    match cfg.tier {
        Tier::Logical => execute_logical(s, cfg.seed),
        Tier::Physical => execute_physical(s, cfg.seed),
    }
}

/// The ideal state of circuit text: each gate's canonical matrix applied
/// in program order to |0…0⟩.
fn reference_state(source: &str, n: usize) -> Result<DenseState> {
    let c = parse_circuit(source)?;
    if c.n_qubits != n {
        return Err(Error::Dimension(format!(
            "schedule has {n} data tile(s) but its source declares {} qubit(s)",
            c.n_qubits
        )));
    }
    let mut st = DenseState::zero(n)?;
    for g in &c.gates {
        apply_to_state(&mut st, &gate_matrix(g)?, &g.qubits)?;
    }
    Ok(st)
}

fn single_qubit_rotation(axis: PauliLetter, angle: Angle) -> Result<RotationTerm> {
    RotationTerm::new(PauliString::single(1, 0, axis)?, angle)
}

fn execute_logical(s: &SurgerySchedule, seed: u64) -> Result<ExecutionReport> {
    let n = s.tiles.iter().filter(|t| t.role == TileRole::Data).count();
    let mut state = DenseState::zero(n)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut steps_out = Vec::with_capacity(s.steps.len());
    let mut measurements = Vec::new();
    for step in &s.steps {
        let mut acts = Vec::with_capacity(step.actions.len());
        for action in &step.actions {
            let mut outcomes = Vec::new();
            match action {
                Action::Inject { qubit, axis, angle } => {
                    let term = single_qubit_rotation(parse_axis(axis)?, *angle)?;
                    apply_to_state(&mut state, &rotation_matrix(&term)?, &[*qubit])?;
                }
                Action::Cnot { control, target, .. } => {
                    let g = GateIR::plain(GateKind::Cnot, &[*control, *target])?;
                    apply_to_state(&mut state, &gate_matrix(&g)?, &[*control, *target])?;
                }
                Action::Cz { a, b, .. } => {
                    let g = GateIR::plain(GateKind::Cz, &[*a, *b])?;
                    apply_to_state(&mut state, &gate_matrix(&g)?, &[*a, *b])?;
                }
                Action::LogicalPauli { qubit, pauli } => {
                    let kind = match parse_pauli_name(pauli)? {
                        PauliLetter::X => GateKind::X,
                        PauliLetter::Y => GateKind::Y,
                        _ => GateKind::Z,
                    };
                    let g = GateIR::plain(kind, &[*qubit])?;
                    apply_to_state(&mut state, &gate_matrix(&g)?, &[*qubit])?;
                }
                Action::Measure { qubit, basis } => {
                    let p = PauliString::single(n, *qubit, parse_axis(basis)?)?;
                    let o = state.measure_pauli(&p, &mut rng)?;
                    outcomes.push(o);
                    measurements.push(MeasurementRecord {
                        qubit: *qubit,
                        basis: basis.clone(),
                        outcome: o,
                    });
                }
            }
            acts.push(ActionReport { action: action.clone(), outcomes, note: None });
        }
        steps_out.push(StepReport { index: step.index, actions: acts });
    }
    let fid = if measurements.is_empty() && !s.source.trim().is_empty() {
        Some(fidelity(&state, &reference_state(&s.source, n)?)?)
    } else {
        None
    };
    Ok(ExecutionReport {
        tier: Tier::Logical.name().into(),
        seed,
        qubits: n,
        steps: steps_out,
        measurements,
        tags: Vec::new(),
        fidelity: fid,
    })
}

/// The sign-free operator representative of one logical axis on a patch.
fn axis_rep(p: &PatchLayout, letter: PauliLetter) -> Result<PauliString> {
    Ok(match letter {
        PauliLetter::X => p.logical_x().clone(),
        PauliLetter::Z => p.logical_z().clone(),
        PauliLetter::Y => p.logical_x().mul(p.logical_z())?.unsigned(),
        PauliLetter::I => {
            return Err(Error::InvalidState("the identity has no axis representative".into()))
        }
    })
}

fn trace_outcomes(tr: &ProtocolTrace) -> Vec<i8> {
    tr.steps.iter().flat_map(|s| s.outcomes.iter().copied()).collect()
}

fn trace_note(tr: &ProtocolTrace) -> Option<String> {
    if tr.corrections.is_empty() {
        None
    } else {
        Some(
            tr.corrections
                .iter()
                .map(|c| format!("t{}:{}", c.tile, c.pauli))
                .collect::<Vec<_>>()
                .join(","),
        )
    }
}

/// Every single- and two-qubit logical product the tableau currently
/// stabilizes, in a fixed order: singles by qubit then letter (X, Y, Z),
/// pairs by qubit pair then letter pair.
fn logical_tags(t: &Tableau, data: &[PatchLayout]) -> Result<Vec<String>> {
    const LETTERS: [PauliLetter; 3] = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
    let sign_char = |s: i8| if s > 0 { '+' } else { '-' };
    let mut tags = Vec::new();
    for (i, p) in data.iter().enumerate() {
        for l in LETTERS {
            if let Some(sign) = t.contains_stabilizer(&axis_rep(p, l)?)? {
                tags.push(format!("{}{}@q{i}", sign_char(sign), l.symbol()));
            }
        }
    }
    for i in 0..data.len() {
        for j in i + 1..data.len() {
            for li in LETTERS {
                for lj in LETTERS {
                    let rep = axis_rep(&data[i], li)?.mul(&axis_rep(&data[j], lj)?)?.unsigned();
                    if let Some(sign) = t.contains_stabilizer(&rep)? {
                        tags.push(format!(
                            "{}{}{}@q{i}q{j}",
                            sign_char(sign),
                            li.symbol(),
                            lj.symbol()
                        ));
                    }
                }
            }
        }
    }
    Ok(tags)
}

fn execute_physical(s: &SurgerySchedule, seed: u64) -> Result<ExecutionReport> {
    let d = s.grid.d;
    let mut reg = GridRegistry::new(s.grid.rows, s.grid.cols);
    let mut t = Tableau::new(reg.cell_count(), seed);
    let mut data: Vec<PatchLayout> = Vec::new();
    let mut trns: Vec<PatchLayout> = Vec::new();
    for spec in &s.tiles {
        let p = build_patch(&mut reg, PatchKind::Rotated, d, spec.origin, Orientation::RoughLeftRight)?;
        if p.tile().0 != spec.id {
            return Err(Error::InvalidState(format!(
                "tile allocation order diverged: expected id {}, got {}",
                spec.id,
                p.tile().0
            )));
        }
        match spec.role {
            TileRole::Data => {
                prepare_zero(&mut t, &p)?;
                data.push(p);
            }
            TileRole::Trn => {
                prepare_plus(&mut t, &p)?;
                trns.push(p);
            }
        }
    }

    let mut steps_out = Vec::with_capacity(s.steps.len());
    let mut measurements = Vec::new();
    for step in &s.steps {
        let mut acts = Vec::with_capacity(step.actions.len());
        for action in &step.actions {
            let (outcomes, note) = match action {
                Action::Inject { qubit, axis, angle } => {
                    run_physical_rotation(&mut t, &data[*qubit], &trns, parse_axis(axis)?, *angle, step.index)?
                }
                Action::Cnot { control, target, trn } => {
                    let tr = logical_cnot(&mut t, &mut reg, &data[*control], &data[*target], &trns[*trn])?;
                    (trace_outcomes(&tr), trace_note(&tr))
                }
                Action::Cz { a, b, trn } => {
                    let tr = logical_cz(&mut t, &mut reg, &data[*a], &data[*b], &trns[*trn])?;
                    (trace_outcomes(&tr), trace_note(&tr))
                }
                Action::LogicalPauli { qubit, pauli } => {
                    let p = &data[*qubit];
                    match parse_pauli_name(pauli)? {
                        PauliLetter::X => {
                            logical_pauli(&mut t, p, LogicalPauli::X)?;
                        }
                        PauliLetter::Z => {
                            logical_pauli(&mut t, p, LogicalPauli::Z)?;
                        }
                        _ => t.apply_pauli(&axis_rep(p, PauliLetter::Y)?)?,
                    }
                    (Vec::new(), None)
                }
                Action::Measure { qubit, basis } => {
                    let o = measure_logical(&mut t, &data[*qubit], parse_axis(basis)?)?;
                    measurements.push(MeasurementRecord {
                        qubit: *qubit,
                        basis: basis.clone(),
                        outcome: o,
                    });
                    (vec![o], None)
                }
            };
            acts.push(ActionReport { action: action.clone(), outcomes, note });
        }
        steps_out.push(StepReport { index: step.index, actions: acts });
    }
    let tags = logical_tags(&t, &data)?;
    Ok(ExecutionReport {
        tier: Tier::Physical.name().into(),
        seed,
        qubits: data.len(),
        steps: steps_out,
        measurements,
        tags,
        fidelity: None,
    })
}

/// One axis rotation on the stabilizer tier. Quarter-turn classes: 0 is
/// a no-op, 2 is the axis logical Pauli, odd classes teleport through a
/// transitional patch (any transitional tile serves — they are reset
/// between uses, so sequential reuse is state-equivalent to a dedicated
/// one). A non-dyadic angle is exact only when the patch is an
/// eigenstate of the axis (the rotation is then a pure phase);
/// otherwise the step is refused at this tier.
fn run_physical_rotation(
    t: &mut Tableau,
    p: &PatchLayout,
    trns: &[PatchLayout],
    axis: PauliLetter,
    angle: Angle,
    step_index: usize,
) -> Result<(Vec<i8>, Option<String>)> {
    let eigenphase_or_refuse = |t: &mut Tableau, what: &str| -> Result<(Vec<i8>, Option<String>)> {
        if t.contains_stabilizer(&axis_rep(p, axis)?)?.is_some() {
            Ok((Vec::new(), Some("axis_eigenphase".into())))
        } else {
            Err(Error::UnsupportedAtTier {
                step: step_index,
                tier: Tier::Physical.name().into(),
                msg: format!(
                    "{what} ({}-axis by {angle}) on a non-eigenstate needs the statevector tier",
                    axis.symbol()
                ),
            })
        }
    };
    match quarter_turn_class(&angle) {
        Ok(0) => Ok((Vec::new(), Some("identity".into()))),
        Ok(2) => {
            t.apply_pauli(&axis_rep(p, axis)?)?;
            Ok((Vec::new(), Some(format!("{}_L", axis.symbol()))))
        }
        Ok(_) => match trns.first() {
            Some(trn) => {
                let tr = teleported_rotation(t, p, trn, &single_qubit_rotation(axis, angle)?)?;
                Ok((trace_outcomes(&tr), trace_note(&tr)))
            }
            None => eigenphase_or_refuse(t, "a quarter-turn rotation without a transitional tile"),
        },
        Err(_) => eigenphase_or_refuse(t, "a non-dyadic rotation"),
    }
}

// ---------------------------------------------------------------------------
// Random circuit generation
// ---------------------------------------------------------------------------

/// Generate random circuit text in the grammar accepted here: 1 to
/// `max_qubits` qubits, up to `max_gates` gates. With `clifford_only`
/// every gate is schedulable on the stabilizer tier (plain Paulis, H, S,
/// quarter-turn rotations, CNOT/CZ/CPP-ZX/CPP-ZZ); otherwise T gates,
/// eighth-turn and radian-angle rotations join the pool. Deterministic
/// for a given generator state.
pub fn random_circuit(rng: &mut impl Rng, max_qubits: usize, max_gates: usize, clifford_only: bool) -> String {
    let n = rng.gen_range(1..=max_qubits.max(1));
    let g = rng.gen_range(0..=max_gates);
    let mut out = format!("qubits {n}\n");
    for _ in 0..g {
        let two_ok = n >= 2;
        let kind = rng.gen_range(0..if two_ok { 10 } else { 6 });
        let q0 = rng.gen_range(0..n);
        match kind {
            0 => out.push_str(&format!("X q{q0}\n")),
            1 => out.push_str(&format!("Y q{q0}\n")),
            2 => out.push_str(&format!("Z q{q0}\n")),
            3 => out.push_str(&format!("H q{q0}\n")),
            4 => {
                if clifford_only || rng.gen_bool(0.5) {
                    out.push_str(&format!("S q{q0}\n"));
                } else {
                    out.push_str(&format!("T q{q0}\n"));
                }
            }
            5 => {
                let axis = ["RX", "RY", "RZ"][rng.gen_range(0..3)];
                let angle = if clifford_only {
                    let num = rng.gen_range(-3i32..=4);
                    let den = [1u32, 2, 4][rng.gen_range(0..3)];
                    Angle::dyadic(num, den).expect("valid dyadic").to_string()
                } else if rng.gen_bool(0.5) {
                    let num = rng.gen_range(-7i32..=8);
                    let den = [1u32, 2, 4, 8][rng.gen_range(0..4)];
                    Angle::dyadic(num, den).expect("valid dyadic").to_string()
                } else {
                    format!("{:.4}", rng.gen_range(-1.5f64..1.5))
                };
                out.push_str(&format!("{axis}({angle}) q{q0}\n"));
            }
            _ => {
                let mut q1 = rng.gen_range(0..n);
                while q1 == q0 {
                    q1 = rng.gen_range(0..n);
                }
                match kind {
                    6 => out.push_str(&format!("CNOT q{q0} q{q1}\n")),
                    7 => out.push_str(&format!("CZ q{q0} q{q1}\n")),
                    8 => out.push_str(&format!("CPP ZX q{q0} q{q1}\n")),
                    _ => out.push_str(&format!("CPP ZZ q{q0} q{q1}\n")),
                }
            }
        }
    }
    out
}
