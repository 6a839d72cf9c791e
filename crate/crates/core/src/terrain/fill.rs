//! Depression filling by priority-flood with an epsilon gradient.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::raster::{GridKind, RasterGrid};
use crate::scalar::{c, Scalar};

/// Epsilon gradient (map units) imposed across filled depressions so that
/// every cell keeps a strictly descending path to the boundary.
pub const FILL_EPSILON: f64 = 1e-5;

struct HeapItem<T> {
    w: T,
    seq: u64,
    idx: usize,
}

// Min-heap ordering on (w, seq); seq breaks elevation ties deterministically.
impl<T: Scalar> Ord for HeapItem<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .w
            .partial_cmp(&self.w)
            .unwrap_or(Ordering::Equal)
            .then(other.seq.cmp(&self.seq))
    }
}
impl<T: Scalar> PartialOrd for HeapItem<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> PartialEq for HeapItem<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for HeapItem<T> {}

/// Minimal raised surface with no interior depressions.
///
/// Cells on the grid edge or adjacent to nodata act as outlets and keep
/// their elevation; interior cells are raised to at least
/// `upstream + FILL_EPSILON` where required. A DEM whose descents all exceed
/// the epsilon is returned unchanged.
pub fn fill_sinks<T: Scalar>(dem: &RasterGrid<T>) -> RasterGrid<T> {
    let (nrows, ncols) = (dem.nrows(), dem.ncols());
    let n = nrows * ncols;
    let eps = c::<T>(FILL_EPSILON);

    let mut filled: Vec<T> = dem.cells().to_vec();
    let mut queued = vec![false; n];
    let mut heap: BinaryHeap<HeapItem<T>> = BinaryHeap::new();
    let mut seq = 0u64;

    for row in 0..nrows {
        for col in 0..ncols {
            let i = dem.idx(row, col);
            let Some(z) = dem.value(row, col) else {
                queued[i] = true; // nodata never processed
                continue;
            };
            let on_edge = row == 0 || col == 0 || row == nrows - 1 || col == ncols - 1;
            let beside_nodata = dem
                .neighbors8(row, col)
                .any(|(r, c_)| dem.value(r, c_).is_none());
            if on_edge || beside_nodata {
                queued[i] = true;
                heap.push(HeapItem { w: z, seq, idx: i });
                seq += 1;
            }
        }
    }

    while let Some(HeapItem { w, idx, .. }) = heap.pop() {
        filled[idx] = w;
        let (row, col) = (idx / ncols, idx % ncols);
        for (r, c_) in dem.neighbors8(row, col) {
            let j = r * ncols + c_;
            if queued[j] {
                continue;
            }
            queued[j] = true;
            let raised = w + eps;
            let wj = if dem.get(r, c_) > raised {
                dem.get(r, c_)
            } else {
                raised
            };
            heap.push(HeapItem {
                w: wj,
                seq,
                idx: j,
            });
            seq += 1;
        }
    }

    RasterGrid::new(*dem.header(), GridKind::Continuous, filled)
        .expect("filled grid matches DEM lattice")
}

/// True when some interior data cell has no strictly lower 8-neighbour
/// (used by tests to check `fill_sinks` postconditions).
#[cfg(test)]
pub(crate) fn has_interior_sink<T: Scalar>(dem: &RasterGrid<T>) -> bool {
    let (nrows, ncols) = (dem.nrows(), dem.ncols());
    for row in 1..nrows.saturating_sub(1) {
        for col in 1..ncols.saturating_sub(1) {
            let Some(z) = dem.value(row, col) else {
                continue;
            };
            let beside_nodata = dem
                .neighbors8(row, col)
                .any(|(r, c_)| dem.value(r, c_).is_none());
            if beside_nodata {
                continue; // drains through nodata
            }
            let has_lower = dem
                .neighbors8(row, col)
                .any(|(r, c_)| dem.value(r, c_).is_some_and(|zn| zn < z));
            if !has_lower {
                return true;
            }
        }
    }
    false
}
