//! Stream extraction by drainage-area threshold and stream levels
//! (Strahler order clamped to 5).

use crate::error::{Error, Result};
use crate::raster::{require_aligned, GridKind, RasterGrid};
use crate::scalar::{c, Scalar};
use crate::terrain::flow::FlowDirGrid;

/// Stream levels are Strahler orders clamped to this ceiling.
pub const MAX_STREAM_LEVEL: u8 = 5;

/// Stream mask (1 = stream) plus per-cell level (1..=5 on stream cells,
/// 0 elsewhere). Levels never decrease downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamNetwork<T> {
    mask: RasterGrid<T>,
    level: RasterGrid<T>,
}

impl<T: Scalar> StreamNetwork<T> {
    /// Assemble a network from aligned mask/level grids, enforcing that
    /// levels are 1..=5 exactly on stream cells and 0 elsewhere.
    pub fn new(mask: RasterGrid<T>, level: RasterGrid<T>) -> Result<Self> {
        require_aligned(mask.header(), level.header(), "stream mask vs level")?;
        let mask = mask.with_kind(GridKind::Label)?;
        let level = level.with_kind(GridKind::Label)?;
        for i in 0..mask.cells().len() {
            let m = mask.value_at(i);
            let l = level.value_at(i).and_then(|v| v.to_u8());
            match (m, l) {
                (None, _) => {}
                (Some(v), Some(0)) if v == T::zero() => {}
                (Some(v), Some(1..=MAX_STREAM_LEVEL)) if v == T::one() => {}
                _ => {
                    return Err(Error::InvalidGrid(format!(
                        "stream mask/level mismatch at cell {i}"
                    )))
                }
            }
        }
        Ok(Self { mask, level })
    }

    pub fn mask(&self) -> &RasterGrid<T> {
        &self.mask
    }

    pub fn level(&self) -> &RasterGrid<T> {
        &self.level
    }

    #[inline]
    pub fn is_stream(&self, row: usize, col: usize) -> bool {
        self.mask.value(row, col) == Some(T::one())
    }

    #[inline]
    pub fn is_stream_at(&self, i: usize) -> bool {
        self.mask.value_at(i) == Some(T::one())
    }

    /// Level at a cell; 0 for non-stream cells, `None` for nodata.
    #[inline]
    pub fn level_at(&self, row: usize, col: usize) -> Option<u8> {
        self.level.value(row, col).and_then(|v| v.to_u8())
    }

    pub fn stream_cell_count(&self) -> usize {
        (0..self.mask.cells().len())
            .filter(|&i| self.is_stream_at(i))
            .count()
    }

    pub fn is_empty(&self) -> bool {
        self.stream_cell_count() == 0
    }

    /// True if at least one stream cell carries the given level.
    pub fn has_level(&self, level: u8) -> bool {
        let lv = T::from_u8(level).unwrap();
        (0..self.level.cells().len()).any(|i| self.level.value_at(i) == Some(lv))
    }
}

/// Accumulation cutoff in cells for an area threshold: the smallest integer
/// count whose drained area reaches `threshold_ha` hectares.
pub fn stream_cutoff_cells(threshold_ha: f64, cellsize: f64) -> u64 {
    (threshold_ha * 1e4 / (cellsize * cellsize)).ceil() as u64
}

/// Extract the stream network: cells whose drained area
/// `acc * cellsize^2` reaches `threshold_ha` hectares, levelled by Strahler
/// order over the masked network (clamped to [`MAX_STREAM_LEVEL`]).
pub fn extract_streams<T: Scalar>(
    dirs: &FlowDirGrid<T>,
    acc: &RasterGrid<T>,
    threshold_ha: T,
) -> Result<StreamNetwork<T>> {
    if !(threshold_ha > T::zero()) {
        return Err(Error::Argument(format!(
            "stream threshold must be positive, got {threshold_ha} ha"
        )));
    }
    require_aligned(dirs.as_grid().header(), acc.header(), "flow dirs vs accumulation")?;

    let n = acc.cells().len();
    let cellsize = acc.header().cellsize;
    let area_min = threshold_ha * c(1e4);

    let mut stream = vec![false; n];
    for i in 0..n {
        if let Some(a) = acc.value_at(i) {
            stream[i] = a * cellsize * cellsize >= area_min;
        }
    }

    // Strahler order over the stream subgraph, sources first.
    let mut donors = vec![0u8; n];
    for i in 0..n {
        if !stream[i] {
            continue;
        }
        if let Some(j) = dirs.downstream_idx(i) {
            if stream[j] {
                donors[j] = donors[j].saturating_add(1);
            }
        }
    }
    let mut remaining = donors.clone();
    let mut order = vec![0u8; n];
    let mut max_donor_order = vec![0u8; n];
    let mut max_donor_count = vec![0u8; n];
    let mut queue: Vec<usize> = (0..n).filter(|&i| stream[i] && donors[i] == 0).collect();
    let mut head = 0;
    while head < queue.len() {
        let i = queue[head];
        head += 1;
        let ord = if donors[i] == 0 {
            1
        } else if max_donor_count[i] >= 2 {
            max_donor_order[i] + 1
        } else {
            max_donor_order[i]
        };
        order[i] = ord.min(MAX_STREAM_LEVEL);
        if let Some(j) = dirs.downstream_idx(i) {
            if stream[j] {
                if order[i] > max_donor_order[j] {
                    max_donor_order[j] = order[i];
                    max_donor_count[j] = 1;
                } else if order[i] == max_donor_order[j] {
                    max_donor_count[j] = max_donor_count[j].saturating_add(1);
                }
                remaining[j] -= 1;
                if remaining[j] == 0 {
                    queue.push(j);
                }
            }
        }
    }

    let nodata = acc.header().nodata;
    let mask_cells = (0..n)
        .map(|i| {
            if acc.value_at(i).is_none() {
                nodata
            } else if stream[i] {
                T::one()
            } else {
                T::zero()
            }
        })
        .collect();
    let level_cells = (0..n)
        .map(|i| {
            if acc.value_at(i).is_none() {
                nodata
            } else {
                T::from_u8(order[i]).unwrap()
            }
        })
        .collect();
    Ok(StreamNetwork {
        mask: RasterGrid::new(*acc.header(), GridKind::Label, mask_cells)?,
        level: RasterGrid::new(*acc.header(), GridKind::Label, level_cells)?,
    })
}
