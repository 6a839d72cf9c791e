//! Georeferenced rectangular grid with a nodata sentinel.
//!
//! Row 0 is the northernmost row; cells are stored row-major. Grids are
//! immutable after construction as far as the public pipeline is concerned,
//! so they can be shared freely across threads.

use crate::error::{Error, Result};
use crate::scalar::{c, Scalar};

/// Default nodata sentinel written when a grid never declared one.
pub const DEFAULT_NODATA: f64 = -9999.0;

/// Grid dimensions and georeferencing. `xll`/`yll` locate the lower-left
/// corner of the lower-left cell in map units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridHeader<T> {
    pub ncols: usize,
    pub nrows: usize,
    pub xll: T,
    pub yll: T,
    pub cellsize: T,
    pub nodata: T,
}

impl<T: Scalar> GridHeader<T> {
    pub fn new(ncols: usize, nrows: usize, xll: T, yll: T, cellsize: T, nodata: T) -> Result<Self> {
        if ncols == 0 || nrows == 0 {
            return Err(Error::InvalidGrid(format!(
                "dimensions must be positive, got {ncols}x{nrows}"
            )));
        }
        if !(cellsize > T::zero()) {
            return Err(Error::InvalidGrid(format!(
                "cellsize must be positive, got {cellsize}"
            )));
        }
        Ok(Self {
            ncols,
            nrows,
            xll,
            yll,
            cellsize,
            nodata,
        })
    }

    /// Square header at origin with the given cell size and default nodata.
    pub fn square(ncols: usize, nrows: usize, cellsize: f64) -> Result<Self> {
        Self::new(
            ncols,
            nrows,
            T::zero(),
            T::zero(),
            c(cellsize),
            c(DEFAULT_NODATA),
        )
    }

    pub fn cell_count(&self) -> usize {
        self.ncols * self.nrows
    }
}

/// How cell values are to be interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Real-valued measurements (elevations, distances, indices).
    Continuous,
    /// Integer class codes or ranks.
    Categorical,
    /// Integer identifiers (zones, flow codes, stream levels).
    Label,
}

/// Rectangular raster of scalar cells.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterGrid<T> {
    header: GridHeader<T>,
    kind: GridKind,
    cells: Vec<T>,
}

impl<T: Scalar> RasterGrid<T> {
    /// Build a grid, enforcing the cell-count invariant and, for
    /// categorical/label grids, integer-valued cells.
    pub fn new(header: GridHeader<T>, kind: GridKind, cells: Vec<T>) -> Result<Self> {
        if cells.len() != header.cell_count() {
            return Err(Error::InvalidGrid(format!(
                "cell vector length {} does not match {}x{} grid",
                cells.len(),
                header.nrows,
                header.ncols
            )));
        }
        let grid = Self {
            header,
            kind,
            cells,
        };
        grid.check_kind()?;
        Ok(grid)
    }

    /// Uniform grid of `value`.
    pub fn filled(header: GridHeader<T>, kind: GridKind, value: T) -> Self {
        let cells = vec![value; header.cell_count()];
        Self {
            header,
            kind,
            cells,
        }
    }

    fn check_kind(&self) -> Result<()> {
        if self.kind == GridKind::Continuous {
            return Ok(());
        }
        for (i, &v) in self.cells.iter().enumerate() {
            if self.is_nodata(v) {
                continue;
            }
            if !v.is_finite() || v.fract() != T::zero() {
                return Err(Error::InvalidGrid(format!(
                    "non-integer value {v} in categorical/label grid at row {}, col {}",
                    i / self.header.ncols,
                    i % self.header.ncols
                )));
            }
        }
        Ok(())
    }

    /// Same lattice, different cells. Panics if the length differs.
    pub fn with_cells(&self, kind: GridKind, cells: Vec<T>) -> Result<Self> {
        Self::new(self.header, kind, cells)
    }

    /// Reinterpret the value semantics, re-validating the integer invariant.
    pub fn with_kind(self, kind: GridKind) -> Result<Self> {
        Self::new(self.header, kind, self.cells)
    }

    pub fn header(&self) -> &GridHeader<T> {
        &self.header
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn nrows(&self) -> usize {
        self.header.nrows
    }

    pub fn ncols(&self) -> usize {
        self.header.ncols
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    #[inline]
    pub fn idx(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.header.nrows && col < self.header.ncols);
        row * self.header.ncols + col
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.cells[self.idx(row, col)]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: T) {
        let i = self.idx(row, col);
        self.cells[i] = v;
    }

    #[inline]
    pub fn is_nodata(&self, v: T) -> bool {
        v == self.header.nodata || v.is_nan()
    }

    /// Cell value, or `None` for nodata.
    #[inline]
    pub fn value(&self, row: usize, col: usize) -> Option<T> {
        let v = self.get(row, col);
        if self.is_nodata(v) {
            None
        } else {
            Some(v)
        }
    }

    #[inline]
    pub fn value_at(&self, i: usize) -> Option<T> {
        let v = self.cells[i];
        if self.is_nodata(v) {
            None
        } else {
            Some(v)
        }
    }

    pub fn count_data(&self) -> usize {
        self.cells.iter().filter(|&&v| !self.is_nodata(v)).count()
    }

    /// Per-cell map preserving nodata.
    pub fn map_values<F: Fn(T) -> T>(&self, kind: GridKind, f: F) -> Result<Self> {
        let nodata = self.header.nodata;
        let cells = self
            .cells
            .iter()
            .map(|&v| if self.is_nodata(v) { nodata } else { f(v) })
            .collect();
        Self::new(self.header, kind, cells)
    }

    /// In-bounds 8-neighbourhood of `(row, col)`.
    pub fn neighbors8(&self, row: usize, col: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (nrows, ncols) = (self.header.nrows as isize, self.header.ncols as isize);
        let (r, c) = (row as isize, col as isize);
        NEIGHBOR_OFFSETS.iter().filter_map(move |&(dr, dc)| {
            let (nr, nc) = (r + dr, c + dc);
            if nr >= 0 && nc >= 0 && nr < nrows && nc < ncols {
                Some((nr as usize, nc as usize))
            } else {
                None
            }
        })
    }
}

/// The 8 neighbour offsets as `(drow, dcol)`, in D8 code order
/// E, SE, S, SW, W, NW, N, NE.
pub const NEIGHBOR_OFFSETS: [(isize, isize); 8] = [
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
];

/// True iff the two grids share the same lattice: equal dimensions, and
/// cellsize/corner coordinates within `1e-6 * cellsize`.
pub fn grids_aligned<T: Scalar>(a: &GridHeader<T>, b: &GridHeader<T>) -> bool {
    if a.ncols != b.ncols || a.nrows != b.nrows {
        return false;
    }
    let tol = c::<T>(1e-6) * a.cellsize;
    (a.cellsize - b.cellsize).abs() <= tol
        && (a.xll - b.xll).abs() <= tol
        && (a.yll - b.yll).abs() <= tol
}

/// Alignment check that reports a descriptive error on mismatch.
pub fn require_aligned<T: Scalar>(a: &GridHeader<T>, b: &GridHeader<T>, what: &str) -> Result<()> {
    if grids_aligned(a, b) {
        Ok(())
    } else {
        Err(Error::Alignment(format!(
            "{what}: {}x{} cellsize {} at ({}, {}) vs {}x{} cellsize {} at ({}, {})",
            a.nrows, a.ncols, a.cellsize, a.xll, a.yll, b.nrows, b.ncols, b.cellsize, b.xll, b.yll
        )))
    }
}
