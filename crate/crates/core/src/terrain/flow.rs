//! D8 flow directions and flow accumulation.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::raster::{GridKind, RasterGrid, NEIGHBOR_OFFSETS};
use crate::scalar::{c, Scalar};

/// D8 direction codes in neighbour order E, SE, S, SW, W, NW, N, NE.
/// Code 0 marks sinks/outlets.
pub const FLOW_CODES: [u8; 8] = [1, 2, 4, 8, 16, 32, 64, 128];

/// Offset `(drow, dcol)` for a direction code.
pub fn code_offset(code: u8) -> Option<(isize, isize)> {
    FLOW_CODES
        .iter()
        .position(|&c_| c_ == code)
        .map(|k| NEIGHBOR_OFFSETS[k])
}

/// Single-direction routing grid. Every data cell holds one of the eight
/// codes or 0; following codes never revisits a cell.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowDirGrid<T> {
    grid: RasterGrid<T>,
}

impl<T: Scalar> FlowDirGrid<T> {
    /// Wrap a label grid of direction codes, validating the code set.
    pub fn from_grid(grid: RasterGrid<T>) -> Result<Self> {
        let grid = grid.with_kind(GridKind::Label)?;
        for i in 0..grid.cells().len() {
            if let Some(v) = grid.value_at(i) {
                let code = v.to_u8();
                if !code.is_some_and(|c_| c_ == 0 || FLOW_CODES.contains(&c_)) {
                    return Err(Error::InvalidGrid(format!(
                        "invalid flow code {v} at cell {i}"
                    )));
                }
            }
        }
        Ok(Self { grid })
    }

    pub fn as_grid(&self) -> &RasterGrid<T> {
        &self.grid
    }

    pub fn nrows(&self) -> usize {
        self.grid.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.grid.ncols()
    }

    /// Direction code at a cell; `None` for nodata.
    #[inline]
    pub fn code(&self, row: usize, col: usize) -> Option<u8> {
        self.grid.value(row, col).and_then(|v| v.to_u8())
    }

    /// The cell this cell drains to, or `None` for outlets and nodata.
    #[inline]
    pub fn downstream(&self, row: usize, col: usize) -> Option<(usize, usize)> {
        let code = self.code(row, col)?;
        if code == 0 {
            return None;
        }
        let (dr, dc) = code_offset(code)?;
        let (r, c_) = (row as isize + dr, col as isize + dc);
        if r < 0 || c_ < 0 || r >= self.grid.nrows() as isize || c_ >= self.grid.ncols() as isize {
            return None;
        }
        Some((r as usize, c_ as usize))
    }

    #[inline]
    pub fn downstream_idx(&self, i: usize) -> Option<usize> {
        let (row, col) = (i / self.grid.ncols(), i % self.grid.ncols());
        self.downstream(row, col)
            .map(|(r, c_)| r * self.grid.ncols() + c_)
    }
}

/// Steepest-descent D8 directions for a depression-filled DEM.
///
/// Drop is divided by distance (diagonals weigh `sqrt(2)` farther); ties go
/// to the first code in `FLOW_CODES` order. Cells with no strictly lower
/// neighbour become outlets (code 0).
pub fn d8_flow_directions<T: Scalar>(filled: &RasterGrid<T>) -> FlowDirGrid<T> {
    let (nrows, ncols) = (filled.nrows(), filled.ncols());
    let nodata = filled.header().nodata;
    let inv_sqrt2 = c::<T>(std::f64::consts::FRAC_1_SQRT_2);

    let mut cells = Vec::with_capacity(nrows * ncols);
    for row in 0..nrows {
        for col in 0..ncols {
            let Some(z0) = filled.value(row, col) else {
                cells.push(nodata);
                continue;
            };
            let mut best_grade = T::zero();
            let mut best_code = 0u8;
            for (k, &(dr, dc)) in NEIGHBOR_OFFSETS.iter().enumerate() {
                let (r, c_) = (row as isize + dr, col as isize + dc);
                if r < 0 || c_ < 0 || r >= nrows as isize || c_ >= ncols as isize {
                    continue;
                }
                let Some(zn) = filled.value(r as usize, c_ as usize) else {
                    continue;
                };
                let drop = z0 - zn;
                if drop <= T::zero() {
                    continue;
                }
                let diagonal = dr != 0 && dc != 0;
                let grade = if diagonal { drop * inv_sqrt2 } else { drop };
                if grade > best_grade {
                    best_grade = grade;
                    best_code = FLOW_CODES[k];
                }
            }
            cells.push(T::from_u8(best_code).unwrap());
        }
    }
    let grid = RasterGrid::new(*filled.header(), GridKind::Label, cells)
        .expect("direction grid matches DEM lattice");
    FlowDirGrid { grid }
}

/// Number of cells (including itself) draining through each cell, computed
/// in topological order. A cycle in the direction graph is a routing error.
pub fn flow_accumulation<T: Scalar>(dirs: &FlowDirGrid<T>) -> Result<RasterGrid<T>> {
    let grid = dirs.as_grid();
    let n = grid.cells().len();

    let mut indegree = vec![0u8; n];
    let mut data_cells = 0usize;
    for i in 0..n {
        if grid.value_at(i).is_none() {
            continue;
        }
        data_cells += 1;
        if let Some(j) = dirs.downstream_idx(i) {
            if grid.value_at(j).is_some() {
                indegree[j] += 1;
            }
        }
    }

    let mut acc = vec![1.0f64; n];
    let mut queue: VecDeque<usize> = (0..n)
        .filter(|&i| grid.value_at(i).is_some() && indegree[i] == 0)
        .collect();
    let mut processed = 0usize;
    while let Some(i) = queue.pop_front() {
        processed += 1;
        if let Some(j) = dirs.downstream_idx(i) {
            if grid.value_at(j).is_some() {
                acc[j] += acc[i];
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    queue.push_back(j);
                }
            }
        }
    }
    if processed != data_cells {
        return Err(Error::Routing(format!(
            "cycle in flow directions: {} of {} cells unreachable",
            data_cells - processed,
            data_cells
        )));
    }

    let nodata = grid.header().nodata;
    let cells = (0..n)
        .map(|i| {
            if grid.value_at(i).is_none() {
                nodata
            } else {
                c(acc[i])
            }
        })
        .collect();
    RasterGrid::new(*grid.header(), GridKind::Continuous, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::GridHeader;
    use crate::terrain::fill_sinks;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(ncols: usize, nrows: usize, mut f: impl FnMut(usize, usize) -> f64) -> RasterGrid<f64> {
        let header = GridHeader::square(ncols, nrows, 30.0).unwrap();
        let cells = (0..nrows * ncols)
            .map(|i| f(i / ncols, i % ncols))
            .collect();
        RasterGrid::new(header, GridKind::Continuous, cells).unwrap()
    }

    #[test]
    fn eastward_plane_routes_east() {
        let dem = grid(5, 5, |_, c| 100.0 - c as f64);
        let dirs = d8_flow_directions(&dem);
        for r in 0..5 {
            for c in 0..4 {
                assert_eq!(dirs.code(r, c), Some(1), "cell ({r},{c})");
            }
            assert_eq!(dirs.code(r, 4), Some(0)); // east edge is the outlet
        }
    }

    #[test]
    fn center_peak_drains_to_lowest_neighbor() {
        // Centre highest; the single lowest neighbour is NW.
        let cells = vec![
            1.0, 5.0, 6.0, //
            5.0, 10.0, 7.0, //
            6.0, 7.0, 8.0,
        ];
        let header = GridHeader::square(3, 3, 30.0).unwrap();
        let dem = RasterGrid::new(header, GridKind::Continuous, cells).unwrap();
        let dirs = d8_flow_directions(&dem);
        // Drop to NW is 9 but diagonal: 9/sqrt(2) = 6.36 beats drops of 5
        // (cardinal) and all others.
        assert_eq!(dirs.code(1, 1), Some(32));
    }

    #[test]
    fn single_cell_accumulates_one() {
        let dem = grid(1, 1, |_, _| 7.0);
        let acc = flow_accumulation(&d8_flow_directions(&dem)).unwrap();
        assert_eq!(acc.get(0, 0), 1.0);
    }

    #[test]
    fn chain_accumulation_counts_upstream() {
        let k = 7;
        let dem = grid(k, 1, |_, c| 100.0 - c as f64);
        let acc = flow_accumulation(&d8_flow_directions(&dem)).unwrap();
        let expected: Vec<f64> = (1..=k).map(|v| v as f64).collect();
        assert_eq!(acc.cells(), &expected[..]);
    }

    #[test]
    fn routing_acyclic_and_conservative_on_random_filled_dems() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let dem = grid(10, 10, |_, _| rng.gen_range(0.0..40.0));
            let filled = fill_sinks(&dem);
            let dirs = d8_flow_directions(&filled);
            let acc = flow_accumulation(&dirs).unwrap(); // Ok == acyclic
            let outlet_sum: f64 = (0..100)
                .filter(|&i| dirs.as_grid().value_at(i) == Some(0.0))
                .map(|i| acc.cells()[i])
                .sum();
            assert_eq!(outlet_sum, 100.0);
        }
    }

    #[test]
    fn cycle_is_a_routing_error() {
        // Two cells pointing at each other.
        let header = GridHeader::square(2, 1, 30.0).unwrap();
        let grid = RasterGrid::new(header, GridKind::Label, vec![1.0, 16.0]).unwrap();
        let dirs = FlowDirGrid::from_grid(grid).unwrap();
        assert!(matches!(flow_accumulation(&dirs), Err(Error::Routing(_))));
    }
}
