//! Occupancy grid and shortest-path motion costs.
//!
//! Move costs are 8-connected grid distances (axis step = `cell_size`,
//! diagonal step = `cell_size * sqrt(2)`) computed by Dijkstra's algorithm.
//! Distance fields are memoized per source cell since the grid is static
//! within an episode.

use crate::cost::Cost;
use crate::error::WorldError;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, RwLock};

pub const SQRT2: f64 = std::f64::consts::SQRT_2;

/// A grid coordinate, column-then-row.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: u32,
    pub y: u32,
}

impl Cell {
    pub fn new(x: u32, y: u32) -> Cell {
        Cell { x, y }
    }

    /// Chebyshev (chessboard) distance, used for the robot's reach test.
    pub fn chebyshev(self, other: Cell) -> u32 {
        let dx = self.x.abs_diff(other.x);
        let dy = self.y.abs_diff(other.y);
        dx.max(dy)
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OccupancyGrid {
    width: u32,
    height: u32,
    cell_size: f64,
    blocked: Vec<bool>,
}

impl OccupancyGrid {
    pub fn new(width: u32, height: u32, cell_size: f64) -> OccupancyGrid {
        assert!(width > 0 && height > 0 && cell_size > 0.0);
        OccupancyGrid {
            width,
            height,
            cell_size,
            blocked: vec![false; (width * height) as usize],
        }
    }

    /// Parses a row-major raster: `'.'` free, `'#'` blocked.
    pub fn from_raster(rows: &[String], cell_size: f64) -> Result<OccupancyGrid, WorldError> {
        if rows.is_empty() {
            return Err(WorldError::Grid("grid raster has no rows".into()));
        }
        let width = rows[0].chars().count();
        if width == 0 {
            return Err(WorldError::Grid("grid raster row 0 is empty".into()));
        }
        let mut blocked = Vec::with_capacity(width * rows.len());
        for (y, row) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(WorldError::Grid(format!(
                    "grid raster row {y} has length {}, expected {width}",
                    row.chars().count()
                )));
            }
            for (x, ch) in row.chars().enumerate() {
                match ch {
                    '.' => blocked.push(false),
                    '#' => blocked.push(true),
                    other => {
                        return Err(WorldError::Grid(format!(
                            "grid raster row {y} col {x}: unexpected character {other:?}"
                        )))
                    }
                }
            }
        }
        if blocked.iter().all(|&b| b) {
            return Err(WorldError::Grid("grid has no unblocked cell".into()));
        }
        Ok(OccupancyGrid {
            width: width as u32,
            height: rows.len() as u32,
            cell_size,
            blocked,
        })
    }

    pub fn block(&mut self, cell: Cell) {
        let i = self.idx(cell);
        self.blocked[i] = true;
    }

    pub fn to_raster(&self) -> Vec<String> {
        (0..self.height)
            .map(|y| {
                (0..self.width)
                    .map(|x| if self.blocked[self.idx(Cell::new(x, y))] { '#' } else { '.' })
                    .collect()
            })
            .collect()
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    fn idx(&self, c: Cell) -> usize {
        (c.y * self.width + c.x) as usize
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.x < self.width && c.y < self.height
    }

    pub fn is_blocked(&self, c: Cell) -> bool {
        self.blocked[self.idx(c)]
    }

    pub fn set_blocked(&mut self, c: Cell, blocked: bool) {
        let i = self.idx(c);
        self.blocked[i] = blocked;
    }

    pub fn free_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height)
            .flat_map(move |y| (0..self.width).map(move |x| Cell::new(x, y)))
            .filter(move |&c| !self.is_blocked(c))
    }

    fn check_cell(&self, c: Cell) -> Result<(), WorldError> {
        if !self.in_bounds(c) {
            return Err(WorldError::CellOutOfBounds(c));
        }
        if self.is_blocked(c) {
            return Err(WorldError::CellBlocked(c));
        }
        Ok(())
    }

    /// Unblocked neighbors with step costs under the given connectivity.
    fn neighbors_with(
        &self,
        c: Cell,
        conn: Connectivity,
    ) -> impl Iterator<Item = (Cell, f64)> + '_ {
        const OFFS: [(i64, i64); 8] = [
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
        ];
        let n = match conn {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        };
        let size = self.cell_size;
        OFFS[..n].iter().filter_map(move |&(dx, dy)| {
            let nx = c.x as i64 + dx;
            let ny = c.y as i64 + dy;
            if nx < 0 || ny < 0 {
                return None;
            }
            let n = Cell::new(nx as u32, ny as u32);
            if !self.in_bounds(n) || self.is_blocked(n) {
                return None;
            }
            let step = if dx != 0 && dy != 0 { size * SQRT2 } else { size };
            Some((n, step))
        })
    }

    fn neighbors(&self, c: Cell) -> impl Iterator<Item = (Cell, f64)> + '_ {
        self.neighbors_with(c, Connectivity::Eight)
    }
}

/// Neighborhood used for motion distances. All planning runs 8-connected;
/// the 4-connected mode serves axis-constrained bases.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Connectivity {
    Four,
    Eight,
}

/// Single-source shortest distances over the grid. Unreachable cells carry
/// `f64::INFINITY`.
#[derive(Clone, Debug)]
pub struct DistanceField {
    source: Cell,
    dist: Vec<f64>,
    width: u32,
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    cell: Cell,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, ties broken by cell for determinism
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap()
            .then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl DistanceField {
    pub fn compute(grid: &OccupancyGrid, source: Cell) -> Result<DistanceField, WorldError> {
        DistanceField::compute_with(grid, source, Connectivity::Eight)
    }

    pub fn compute_with(
        grid: &OccupancyGrid,
        source: Cell,
        conn: Connectivity,
    ) -> Result<DistanceField, WorldError> {
        grid.check_cell(source)?;
        let n = (grid.width * grid.height) as usize;
        let mut dist = vec![f64::INFINITY; n];
        dist[grid.idx(source)] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(HeapEntry { dist: 0.0, cell: source });
        while let Some(HeapEntry { dist: d, cell }) = heap.pop() {
            if d > dist[grid.idx(cell)] {
                continue;
            }
            for (nb, step) in grid.neighbors_with(cell, conn) {
                let nd = d + step;
                if nd < dist[grid.idx(nb)] {
                    dist[grid.idx(nb)] = nd;
                    heap.push(HeapEntry { dist: nd, cell: nb });
                }
            }
        }
        Ok(DistanceField {
            source,
            dist,
            width: grid.width,
        })
    }

    pub fn source(&self) -> Cell {
        self.source
    }

    pub fn dist(&self, c: Cell) -> f64 {
        self.dist[(c.y * self.width + c.x) as usize]
    }
}

/// Exact shortest-path distance between two unblocked cells; `INFINITY` when
/// disconnected.
pub fn shortest_dist(grid: &OccupancyGrid, from: Cell, to: Cell) -> Result<f64, WorldError> {
    shortest_dist_with(grid, from, to, Connectivity::Eight)
}

/// [`shortest_dist`] under an explicit connectivity.
pub fn shortest_dist_with(
    grid: &OccupancyGrid,
    from: Cell,
    to: Cell,
    conn: Connectivity,
) -> Result<f64, WorldError> {
    grid.check_cell(from)?;
    grid.check_cell(to)?;
    Ok(DistanceField::compute_with(grid, from, conn)?.dist(to))
}

/// Grid plus a memo table of distance fields keyed by source cell.
///
/// Fields are computed on first use; concurrent readers share the cached
/// `Arc`. Within an episode the grid never changes, so entries are never
/// invalidated.
#[derive(Debug)]
pub struct MotionContext {
    grid: Arc<OccupancyGrid>,
    fields: RwLock<HashMap<Cell, Arc<DistanceField>>>,
}

impl MotionContext {
    pub fn new(grid: Arc<OccupancyGrid>) -> MotionContext {
        MotionContext {
            grid,
            fields: RwLock::new(HashMap::new()),
        }
    }

    pub fn grid(&self) -> &Arc<OccupancyGrid> {
        &self.grid
    }

    pub fn field(&self, source: Cell) -> Result<Arc<DistanceField>, WorldError> {
        if let Some(f) = self.fields.read().unwrap().get(&source) {
            return Ok(f.clone());
        }
        let field = Arc::new(DistanceField::compute(&self.grid, source)?);
        self.fields
            .write()
            .unwrap()
            .entry(source)
            .or_insert_with(|| field.clone());
        Ok(field)
    }

    pub fn dist(&self, from: Cell, to: Cell) -> Result<f64, WorldError> {
        self.grid.check_cell(to)?;
        Ok(self.field(from)?.dist(to))
    }

    /// Move cost between two cells, rounded to fixed precision. `None` when
    /// the cells are disconnected.
    pub fn move_cost(&self, from: Cell, to: Cell) -> Result<Option<Cost>, WorldError> {
        let d = self.dist(from, to)?;
        Ok(d.is_finite().then(|| Cost::from_units(d)))
    }

    /// Reconstructs one shortest path from `from` to `to` by greedy descent
    /// on the distance field. Returns the cell sequence including both
    /// endpoints, or `None` when disconnected.
    pub fn path(&self, from: Cell, to: Cell) -> Result<Option<Vec<Cell>>, WorldError> {
        let field = self.field(from)?;
        self.grid.check_cell(to)?;
        if !field.dist(to).is_finite() {
            return Ok(None);
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            let d = field.dist(cur);
            let mut best: Option<(Cell, f64)> = None;
            for (nb, step) in self.grid.neighbors(cur) {
                let nd = field.dist(nb);
                // predecessor on a shortest path satisfies nd + step == d
                if (nd + step - d).abs() < 1e-9 {
                    match best {
                        Some((bc, bd)) if (nd, nb) >= (bd, bc) => {}
                        _ => best = Some((nb, nd)),
                    }
                }
            }
            cur = best.expect("finite field cell must have a predecessor").0;
            path.push(cur);
        }
        path.reverse();
        Ok(Some(path))
    }
}
