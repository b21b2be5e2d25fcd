//! Deterministic visualization of a surgery schedule: an ASCII frame
//! sequence (one frame for the layout, one per timestep) and an SVG
//! document with the same content. Both are pure functions of the
//! schedule, so repeated renders are byte-identical.
//!
//! ASCII legend: `o` data cell, `z`/`x` check ancilla, space = other
//! cells inside a tile footprint, `.` free canvas. Tiles touched by an
//! action in the current step are drawn uppercase (`O`/`Z`/`X`), and
//! each joint measurement paints a `#` link through the free cells
//! between the shuttle tile and its operands — the seam corridor the
//! merge occupies.

use std::collections::BTreeSet;

use crate::compiler::{validate_schedule, Action, SurgerySchedule, TileRole};
use crate::error::{Error, Result};
use crate::grid::GridRegistry;
use crate::patch::{build_patch, Orientation, PatchKind};

/// Everything the painters need, precomputed once per schedule.
struct Scene {
    rows: usize,
    cols: usize,
    tiles: Vec<SceneTile>,
}

struct SceneTile {
    label: String,
    /// Canvas (row, col) of the tile's center cell.
    center: (usize, usize),
    data: Vec<(usize, usize)>,
    z_ancillas: Vec<(usize, usize)>,
    x_ancillas: Vec<(usize, usize)>,
    /// Full footprint extent: origin..origin+side on both axes.
    extent: ((usize, usize), (usize, usize)),
}

fn build_scene(s: &SurgerySchedule) -> Result<Scene> {
    validate_schedule(s)?;
    let d = s.grid.d;
    let side = 2 * d + 1;
    let mut reg = GridRegistry::new(s.grid.rows, s.grid.cols);
    let mut tiles = Vec::with_capacity(s.tiles.len());
    for spec in &s.tiles {
        let p = build_patch(&mut reg, PatchKind::Rotated, d, spec.origin, Orientation::RoughLeftRight)?;
        if p.tile().0 != spec.id {
            return Err(Error::InvalidState(format!(
                "tile allocation order diverged from the schedule at tile {}",
                spec.id
            )));
        }
        let label = match (spec.role, spec.qubit) {
            (TileRole::Data, Some(q)) => format!("tile {}: data q{q} @ {:?}", spec.id, spec.origin),
            (TileRole::Data, None) => format!("tile {}: data @ {:?}", spec.id, spec.origin),
            (TileRole::Trn, _) => format!("tile {}: trn @ {:?}", spec.id, spec.origin),
        };
        tiles.push(SceneTile {
            label,
            center: (spec.origin.0 + d, spec.origin.1 + d),
            data: p.data_qubits().to_vec(),
            z_ancillas: p.z_checks().iter().map(|c| c.ancilla).collect(),
            x_ancillas: p.x_checks().iter().map(|c| c.ancilla).collect(),
            extent: (spec.origin, (spec.origin.0 + side, spec.origin.1 + side)),
        });
    }
    Ok(Scene { rows: s.grid.rows, cols: s.grid.cols, tiles })
}

/// Tiles an action touches, as scene indices, plus the seam links a
/// joint measurement paints (shuttle tile, operand tile).
fn action_marks(s: &SurgerySchedule, a: &Action) -> (Vec<usize>, Vec<(usize, usize)>) {
    let n_data = s.tiles.iter().filter(|t| t.role == TileRole::Data).count();
    let data_tile = |q: usize| q; // data-first tile convention: tile i = qubit i
    let trn_tile = |j: usize| n_data + j;
    match a {
        Action::Inject { qubit, .. }
        | Action::LogicalPauli { qubit, .. }
        | Action::Measure { qubit, .. } => (vec![data_tile(*qubit)], vec![]),
        Action::Cnot { control, target, trn } => {
            let t = trn_tile(*trn);
            (
                vec![data_tile(*control), data_tile(*target), t],
                vec![(t, data_tile(*control)), (t, data_tile(*target))],
            )
        }
        Action::Cz { a, b, trn } => {
            let t = trn_tile(*trn);
            (
                vec![data_tile(*a), data_tile(*b), t],
                vec![(t, data_tile(*a)), (t, data_tile(*b))],
            )
        }
    }
}

/// Paint one frame's canvas: base footprints, uppercase active tiles,
/// `#` seam links over free cells.
fn paint_canvas(
    scene: &Scene,
    active: &BTreeSet<usize>,
    links: &[(usize, usize)],
) -> Vec<Vec<u8>> {
    let mut canvas = vec![vec![b'.'; scene.cols]; scene.rows];
    for (i, t) in scene.tiles.iter().enumerate() {
        let hot = active.contains(&i);
        let ((r0, c0), (r1, c1)) = t.extent;
        for r in r0..r1 {
            for c in c0..c1 {
                canvas[r][c] = b' ';
            }
        }
        for &(r, c) in &t.data {
            canvas[r][c] = if hot { b'O' } else { b'o' };
        }
        for &(r, c) in &t.z_ancillas {
            canvas[r][c] = if hot { b'Z' } else { b'z' };
        }
        for &(r, c) in &t.x_ancillas {
            canvas[r][c] = if hot { b'X' } else { b'x' };
        }
    }
    for &(from, to) in links {
        let (r1, c1) = scene.tiles[from].center;
        let (r2, c2) = scene.tiles[to].center;
        let mut mark = |r: usize, c: usize| {
            if canvas[r][c] == b'.' {
                canvas[r][c] = b'#';
            }
        };
        for r in r1.min(r2)..=r1.max(r2) {
            mark(r, c1);
        }
        for c in c1.min(c2)..=c1.max(c2) {
            mark(r2, c);
        }
    }
    canvas
}

struct Frame {
    title: String,
    notes: Vec<String>,
    active: BTreeSet<usize>,
    links: Vec<(usize, usize)>,
}

fn build_frames(s: &SurgerySchedule, scene: &Scene) -> Vec<Frame> {
    let mut frames = Vec::with_capacity(s.steps.len() + 1);
    frames.push(Frame {
        title: "layout".into(),
        notes: scene.tiles.iter().map(|t| t.label.clone()).collect(),
        active: BTreeSet::new(),
        links: Vec::new(),
    });
    for step in &s.steps {
        let mut active = BTreeSet::new();
        let mut links = Vec::new();
        let mut notes = Vec::new();
        for a in &step.actions {
            let (tiles, seam) = action_marks(s, a);
            active.extend(tiles);
            links.extend(seam);
            notes.push(format!("* {a}"));
        }
        frames.push(Frame { title: format!("step {}", step.index), notes, active, links });
    }
    frames
}

/// Render the whole schedule as an ASCII frame sequence.
pub fn render_ascii(s: &SurgerySchedule) -> Result<String> {
    let scene = build_scene(s)?;
    let frames = build_frames(s, &scene);
    let mut out = String::new();
    for frame in &frames {
        out.push_str(&format!("== {} ==\n", frame.title));
        for note in &frame.notes {
            out.push_str(note);
            out.push('\n');
        }
        for row in paint_canvas(&scene, &frame.active, &frame.links) {
            out.push_str(std::str::from_utf8(&row).expect("canvas is ASCII"));
            out.push('\n');
        }
        out.push('\n');
    }
    Ok(out)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Render the whole schedule as one SVG document: the same frames as
/// the ASCII view, stacked vertically, one colored square per cell.
pub fn render_svg(s: &SurgerySchedule) -> Result<String> {
    const CELL: usize = 12;
    const MARGIN: usize = 16;
    const TEXT_H: usize = 16;
    let scene = build_scene(s)?;
    let frames = build_frames(s, &scene);

    let grid_w = scene.cols * CELL;
    let grid_h = scene.rows * CELL;
    let frame_heights: Vec<usize> = frames
        .iter()
        .map(|f| TEXT_H * (1 + f.notes.len()) + grid_h + MARGIN)
        .collect();
    let total_h = MARGIN + frame_heights.iter().sum::<usize>();
    let total_w = 2 * MARGIN + grid_w.max(360);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{total_w}\" height=\"{total_h}\" \
         viewBox=\"0 0 {total_w} {total_h}\" font-family=\"monospace\" font-size=\"12\">\n"
    ));
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{total_w}\" height=\"{total_h}\" fill=\"#ffffff\"/>\n"
    ));

    let mut y = MARGIN;
    for (frame, height) in frames.iter().zip(&frame_heights) {
        out.push_str(&format!("<g transform=\"translate({MARGIN},{y})\">\n"));
        out.push_str(&format!(
            "<text x=\"0\" y=\"12\" font-weight=\"bold\">{}</text>\n",
            xml_escape(&frame.title)
        ));
        let mut ty = TEXT_H;
        for note in &frame.notes {
            out.push_str(&format!(
                "<text x=\"0\" y=\"{}\" fill=\"#444444\">{}</text>\n",
                ty + 12,
                xml_escape(note)
            ));
            ty += TEXT_H;
        }
        let canvas = paint_canvas(&scene, &frame.active, &frame.links);
        for (r, row) in canvas.iter().enumerate() {
            for (c, &cell) in row.iter().enumerate() {
                let fill = match cell {
                    b'o' => "#555555",
                    b'O' => "#111111",
                    b'z' => "#9db7e8",
                    b'Z' => "#2f5fc4",
                    b'x' => "#e8b49d",
                    b'X' => "#c4552f",
                    b'#' => "#e8a020",
                    b' ' => "#eeeeee",
                    _ => continue, // free canvas: leave the background
                };
                out.push_str(&format!(
                    "<rect x=\"{}\" y=\"{}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{fill}\"/>\n",
                    c * CELL,
                    ty + r * CELL,
                ));
            }
        }
        out.push_str("</g>\n");
        y += height;
    }
    out.push_str("</svg>\n");
    Ok(out)
}
