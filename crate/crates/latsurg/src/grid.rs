//! Canvas bookkeeping: tile allocation, gutters, and the cell ↔ tableau-qubit
//! index map.
//!
//! The canvas is a fixed rows × cols field of cells; every cell is backed by
//! one tableau qubit via the bijection `index = row · cols + col`, so indices
//! never move during a tile's lifetime. A distance-d tile occupies a
//! (2d+1)×(2d+1) cell block. Adjacent tiles are separated by a one-cell
//! gutter (origin stride 2d+2); the *seam* between two facing tiles is the d
//! gutter cells that sit between facing boundary data cells (odd offsets
//! along the shared edge).

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Identifier of an allocated tile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TileId(pub u32);

/// Identifier of an active seam.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeamId(pub u32);

/// Ownership state of one canvas cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellState {
    Free,
    /// Data qubit of a patch living on this tile.
    Data(TileId),
    /// Check-ancilla (or as-yet-undesignated) cell of a tile.
    Ancilla(TileId),
    /// Transitional qubit of an active seam.
    Transitional(SeamId),
}

/// Geometry of one allocated tile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TileInfo {
    pub d: usize,
    /// Top-left cell of the (2d+1)×(2d+1) block.
    pub origin: (usize, usize),
}

impl TileInfo {
    /// Block side length in cells.
    pub fn side(&self) -> usize {
        2 * self.d + 1
    }

    /// All cells of the block, row-major.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        let (r0, c0) = self.origin;
        let side = self.side();
        let mut out = Vec::with_capacity(side * side);
        for r in r0..r0 + side {
            for c in c0..c0 + side {
                out.push((r, c));
            }
        }
        out
    }

    fn contains(&self, cell: (usize, usize)) -> bool {
        let (r0, c0) = self.origin;
        let side = self.side();
        cell.0 >= r0 && cell.0 < r0 + side && cell.1 >= c0 && cell.1 < c0 + side
    }
}

/// An active seam: the transitional cells joining two tiles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeamInfo {
    pub a: TileId,
    pub b: TileId,
    pub cells: Vec<(usize, usize)>,
}

/// Bookkeeping authority for the shared canvas.
#[derive(Debug, Clone)]
pub struct GridRegistry {
    rows: usize,
    cols: usize,
    cells: Vec<CellState>,
    tiles: BTreeMap<TileId, TileInfo>,
    seams: BTreeMap<SeamId, SeamInfo>,
    next_tile: u32,
    next_seam: u32,
}

impl GridRegistry {
    /// An empty canvas of the given cell dimensions.
    pub fn new(rows: usize, cols: usize) -> GridRegistry {
        GridRegistry {
            rows,
            cols,
            cells: vec![CellState::Free; rows * cols],
            tiles: BTreeMap::new(),
            seams: BTreeMap::new(),
            next_tile: 0,
            next_seam: 0,
        }
    }

    /// Canvas height in cells.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Canvas width in cells.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Total cells = tableau qubits backing this canvas.
    pub fn cell_count(&self) -> usize {
        self.rows * self.cols
    }

    /// The cell → tableau-qubit bijection.
    pub fn cell_index(&self, cell: (usize, usize)) -> Result<usize> {
        if cell.0 >= self.rows || cell.1 >= self.cols {
            return Err(Error::IndexOutOfRange(format!(
                "cell ({}, {}) outside {}×{} canvas",
                cell.0, cell.1, self.rows, self.cols
            )));
        }
        Ok(cell.0 * self.cols + cell.1)
    }

    /// Inverse of [`cell_index`](Self::cell_index).
    pub fn index_cell(&self, index: usize) -> Result<(usize, usize)> {
        if index >= self.cells.len() {
            return Err(Error::IndexOutOfRange(format!(
                "index {index} outside {} cells",
                self.cells.len()
            )));
        }
        Ok((index / self.cols, index % self.cols))
    }

    /// Ownership state of a cell.
    pub fn cell_state(&self, cell: (usize, usize)) -> Result<CellState> {
        Ok(self.cells[self.cell_index(cell)?])
    }

    /// Info for an allocated tile.
    pub fn tile(&self, id: TileId) -> Result<&TileInfo> {
        self.tiles
            .get(&id)
            .ok_or_else(|| Error::IndexOutOfRange(format!("unknown tile {}", id.0)))
    }

    /// All allocated tiles in id order.
    pub fn tiles(&self) -> impl Iterator<Item = (TileId, &TileInfo)> {
        self.tiles.iter().map(|(k, v)| (*k, v))
    }

    /// All active seams in id order.
    pub fn seams(&self) -> impl Iterator<Item = (SeamId, &SeamInfo)> {
        self.seams.iter().map(|(k, v)| (*k, v))
    }

    /// Reserve a (2d+1)×(2d+1) block with top-left corner `origin`. All its
    /// cells start as [`CellState::Ancilla`]; patch construction later
    /// designates the data subset.
    pub fn allocate_tile(&mut self, d: usize, origin: (usize, usize)) -> Result<TileId> {
        if d < 1 {
            return Err(Error::Dimension("tile distance must be ≥ 1".into()));
        }
        let side = 2 * d + 1;
        let (r0, c0) = origin;
        if r0 + side > self.rows || c0 + side > self.cols {
            return Err(Error::IndexOutOfRange(format!(
                "{side}×{side} block at ({r0}, {c0}) exceeds {}×{} canvas",
                self.rows, self.cols
            )));
        }
        let info = TileInfo { d, origin };
        for cell in info.cells() {
            let idx = self.cell_index(cell)?;
            if self.cells[idx] != CellState::Free {
                return Err(Error::Overlap(format!(
                    "cell ({}, {}) already {:?}",
                    cell.0, cell.1, self.cells[idx]
                )));
            }
        }
        let id = TileId(self.next_tile);
        self.next_tile += 1;
        for cell in info.cells() {
            let idx = self.cell_index(cell)?;
            self.cells[idx] = CellState::Ancilla(id);
        }
        self.tiles.insert(id, info);
        Ok(id)
    }

    /// Mark the listed cells of a tile as data qubits (the rest of the block
    /// stays ancilla). Cells must lie inside the tile's block.
    pub fn designate_data(&mut self, id: TileId, data_cells: &[(usize, usize)]) -> Result<()> {
        let info = *self.tile(id)?;
        for &cell in data_cells {
            if !info.contains(cell) {
                return Err(Error::Geometry(format!(
                    "cell ({}, {}) outside tile {} block",
                    cell.0, cell.1, id.0
                )));
            }
        }
        for &cell in data_cells {
            let idx = self.cell_index(cell)?;
            self.cells[idx] = CellState::Data(id);
        }
        Ok(())
    }

    /// The d transitional cells between two facing tiles, ordered along the
    /// shared edge. Tiles must have equal d, aligned origins, and be exactly
    /// one gutter apart (origin stride 2d+2).
    pub fn seam_between(&self, a: TileId, b: TileId) -> Result<Vec<(usize, usize)>> {
        let ta = *self.tile(a)?;
        let tb = *self.tile(b)?;
        if ta.d != tb.d {
            return Err(Error::Geometry(format!(
                "tile distances differ: {} vs {}",
                ta.d, tb.d
            )));
        }
        let d = ta.d;
        let stride = 2 * d + 2;
        let (ar, ac) = ta.origin;
        let (br, bc) = tb.origin;
        if ar == br && (ac.abs_diff(bc) == stride) {
            // Horizontal neighbors: gutter column between the blocks.
            let left = ac.min(bc);
            let gutter_col = left + 2 * d + 1;
            Ok((0..d).map(|i| (ar + 2 * i + 1, gutter_col)).collect())
        } else if ac == bc && (ar.abs_diff(br) == stride) {
            // Vertical neighbors: gutter row between the blocks.
            let top = ar.min(br);
            let gutter_row = top + 2 * d + 1;
            Ok((0..d).map(|i| (gutter_row, ac + 2 * i + 1)).collect())
        } else {
            Err(Error::Geometry(format!(
                "tiles {} and {} are not adjacent across one gutter",
                a.0, b.0
            )))
        }
    }

    /// Claim the seam cells between two tiles for an active merge. The cells
    /// must currently be free.
    pub fn activate_seam(&mut self, a: TileId, b: TileId) -> Result<SeamId> {
        let cells = self.seam_between(a, b)?;
        self.claim_seam(a, b, cells)
    }

    /// Claim an explicit set of free cells as the transitional row joining
    /// two tiles that need not be facing neighbours, for a merge routed
    /// through the gutter network. Both tiles must exist and every cell must
    /// currently be free.
    pub fn activate_routed_seam(
        &mut self,
        a: TileId,
        b: TileId,
        cells: Vec<(usize, usize)>,
    ) -> Result<SeamId> {
        self.tile(a)?;
        self.tile(b)?;
        if cells.is_empty() {
            return Err(Error::Geometry("a routed seam needs at least one cell".into()));
        }
        self.claim_seam(a, b, cells)
    }

    fn claim_seam(&mut self, a: TileId, b: TileId, cells: Vec<(usize, usize)>) -> Result<SeamId> {
        for &cell in &cells {
            let idx = self.cell_index(cell)?;
            if self.cells[idx] != CellState::Free {
                return Err(Error::Overlap(format!(
                    "seam cell ({}, {}) already {:?}",
                    cell.0, cell.1, self.cells[idx]
                )));
            }
        }
        let id = SeamId(self.next_seam);
        self.next_seam += 1;
        for &cell in &cells {
            let idx = self.cell_index(cell)?;
            self.cells[idx] = CellState::Transitional(id);
        }
        self.seams.insert(id, SeamInfo { a, b, cells });
        Ok(id)
    }

    /// Release an active seam, freeing its transitional cells. The caller is
    /// responsible for resetting the underlying tableau qubits first.
    pub fn release_seam(&mut self, id: SeamId) -> Result<SeamInfo> {
        let info = self
            .seams
            .remove(&id)
            .ok_or_else(|| Error::IndexOutOfRange(format!("unknown seam {}", id.0)))?;
        for &cell in &info.cells {
            let idx = self.cell_index(cell)?;
            self.cells[idx] = CellState::Free;
        }
        Ok(info)
    }

    /// Free a tile's block, returning the tableau indices released so the
    /// caller can reset those qubits to |0⟩. Refused while any active seam
    /// references the tile.
    pub fn release_tile(&mut self, id: TileId) -> Result<Vec<usize>> {
        let info = *self.tile(id)?;
        if let Some((seam, _)) = self.seams.iter().find(|(_, s)| s.a == id || s.b == id) {
            return Err(Error::Overlap(format!(
                "tile {} is joined by active seam {}; split or release the seam first",
                id.0, seam.0
            )));
        }
        let mut indices = Vec::new();
        for cell in info.cells() {
            let idx = self.cell_index(cell)?;
            self.cells[idx] = CellState::Free;
            indices.push(idx);
        }
        self.tiles.remove(&id);
        Ok(indices)
    }

    /// Number of non-free cells (occupancy-conservation checks).
    pub fn occupied_cells(&self) -> usize {
        self.cells.iter().filter(|c| **c != CellState::Free).count()
    }
}
