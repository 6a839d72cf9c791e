//! Hydrology products derived from a DEM: slope, depression filling, D8
//! routing, flow accumulation, stream extraction with levels, distance to
//! streams, and the two sub-watershed delineations (outlet-based D8 and
//! sink-based MFD).

mod delineate;
mod distance;
mod fill;
mod flow;
mod slope;
mod streams;

pub use delineate::{delineate_d8, delineate_mfd, mfd_basins, MfdBasins};
pub use distance::distance_to_streams;
pub use fill::{fill_sinks, FILL_EPSILON};
pub use flow::{code_offset, d8_flow_directions, flow_accumulation, FlowDirGrid, FLOW_CODES};
pub use slope::slope_degrees;
pub use streams::{extract_streams, stream_cutoff_cells, StreamNetwork, MAX_STREAM_LEVEL};

use crate::error::{Error, Result};
use crate::raster::{GridKind, RasterGrid};
use crate::scalar::Scalar;

/// Integer labelling of sub-watersheds (or any zones). Ids are positive;
/// 0 marks unassigned cells and nodata follows the underlying grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneRaster<T> {
    grid: RasterGrid<T>,
}

impl<T: Scalar> ZoneRaster<T> {
    /// Wrap a label grid, validating that every data cell is a non-negative
    /// integer id.
    pub fn from_grid(grid: RasterGrid<T>) -> Result<Self> {
        let grid = grid.with_kind(GridKind::Label)?;
        for i in 0..grid.cells().len() {
            if let Some(v) = grid.value_at(i) {
                if v < T::zero() {
                    return Err(Error::InvalidGrid(format!(
                        "negative zone id {v} at cell {i}"
                    )));
                }
            }
        }
        Ok(Self { grid })
    }

    /// Build from per-cell ids, taking lattice and nodata cells from a
    /// template grid.
    pub fn from_labels(template: &RasterGrid<T>, labels: &[u32]) -> Result<Self> {
        assert_eq!(labels.len(), template.cells().len());
        let nodata = template.header().nodata;
        let cells = labels
            .iter()
            .enumerate()
            .map(|(i, &id)| {
                if template.value_at(i).is_none() {
                    nodata
                } else {
                    T::from_u32(id).expect("zone id representable")
                }
            })
            .collect();
        let grid = RasterGrid::new(*template.header(), GridKind::Label, cells)?;
        Ok(Self { grid })
    }

    pub fn as_grid(&self) -> &RasterGrid<T> {
        &self.grid
    }

    pub fn into_grid(self) -> RasterGrid<T> {
        self.grid
    }

    /// Zone id at a cell; `None` for nodata, `Some(0)` for unassigned.
    #[inline]
    pub fn zone(&self, row: usize, col: usize) -> Option<u32> {
        self.zone_at(self.grid.idx(row, col))
    }

    #[inline]
    pub fn zone_at(&self, i: usize) -> Option<u32> {
        self.grid.value_at(i).map(|v| v.to_u32().unwrap_or(0))
    }

    /// Largest id present (0 for an empty or all-unassigned raster).
    pub fn max_zone(&self) -> u32 {
        (0..self.grid.cells().len())
            .filter_map(|i| self.zone_at(i))
            .max()
            .unwrap_or(0)
    }

    /// True when ids 1.. partition the non-nodata cells (no unassigned 0s).
    pub fn is_partition(&self) -> bool {
        (0..self.grid.cells().len())
            .filter(|&i| self.grid.value_at(i).is_some())
            .all(|i| self.zone_at(i).is_some_and(|z| z >= 1))
    }
}
