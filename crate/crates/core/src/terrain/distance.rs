//! Exact Euclidean distance to stream cells of a given level.
//!
//! Uses the two-pass Felzenszwalb-Huttenlocher transform: a column sweep for
//! nearest-source row offsets, then a row-wise lower envelope of parabolas
//! over squared distances. Squared cell distances are exact integers, so the
//! result matches a brute-force nearest-cell scan bit for bit.

use crate::error::{Error, Result};
use crate::raster::{GridKind, RasterGrid};
use crate::scalar::{c, Scalar};
use crate::terrain::streams::{StreamNetwork, MAX_STREAM_LEVEL};

/// Squared Euclidean distances (in cell units) from each cell to the nearest
/// `true` source. Cells with no source anywhere get `f64::INFINITY`.
pub(crate) fn squared_distance_cells(sources: &[bool], nrows: usize, ncols: usize) -> Vec<f64> {
    const INF: f64 = f64::INFINITY;
    debug_assert_eq!(sources.len(), nrows * ncols);

    // Pass 1: per column, distance in rows to the nearest source.
    let mut rowdist = vec![INF; nrows * ncols];
    for col in 0..ncols {
        let mut d = INF;
        for row in 0..nrows {
            d = if sources[row * ncols + col] {
                0.0
            } else {
                d + 1.0
            };
            rowdist[row * ncols + col] = d;
        }
        d = INF;
        for row in (0..nrows).rev() {
            d = if sources[row * ncols + col] {
                0.0
            } else {
                d + 1.0
            };
            let i = row * ncols + col;
            if d < rowdist[i] {
                rowdist[i] = d;
            }
        }
    }

    // Pass 2: per row, lower envelope of parabolas f(c') = rowdist(c')^2.
    let mut out = vec![INF; nrows * ncols];
    let mut v = vec![0usize; ncols]; // parabola sites
    let mut z = vec![0.0f64; ncols + 1]; // envelope boundaries
    for row in 0..nrows {
        let f = |col: usize| {
            let d = rowdist[row * ncols + col];
            if d.is_finite() {
                d * d
            } else {
                INF
            }
        };
        let mut k = 0usize;
        let mut started = false;
        for q in 0..ncols {
            if !f(q).is_finite() {
                continue;
            }
            if !started {
                v[0] = q;
                z[0] = -INF;
                z[1] = INF;
                started = true;
                continue;
            }
            loop {
                let p = v[k];
                let s = ((f(q) + (q * q) as f64) - (f(p) + (p * p) as f64))
                    / (2.0 * q as f64 - 2.0 * p as f64);
                if s <= z[k] {
                    if k == 0 {
                        v[0] = q;
                        z[0] = -INF;
                        z[1] = INF;
                        break;
                    }
                    k -= 1;
                } else {
                    k += 1;
                    v[k] = q;
                    z[k] = s;
                    z[k + 1] = INF;
                    break;
                }
            }
        }
        if !started {
            continue; // row stays infinite; nearest source may be in another row
        }
        let mut k = 0usize;
        for q in 0..ncols {
            while z[k + 1] < q as f64 {
                k += 1;
            }
            let p = v[k];
            let dq = q as f64 - p as f64;
            out[row * ncols + q] = dq * dq + f(p);
        }
    }
    out
}

/// Per-cell Euclidean distance in map units to the nearest stream cell of
/// the given level (1..=5). Where that level is absent everywhere, every
/// data cell gets positive infinity; nodata cells stay nodata.
pub fn distance_to_streams<T: Scalar>(
    network: &StreamNetwork<T>,
    level: u8,
) -> Result<RasterGrid<T>> {
    if level == 0 || level > MAX_STREAM_LEVEL {
        return Err(Error::Argument(format!(
            "stream level must be in 1..={MAX_STREAM_LEVEL}, got {level}"
        )));
    }
    let grid = network.level();
    let (nrows, ncols) = (grid.nrows(), grid.ncols());
    let lv = T::from_u8(level).unwrap();
    let sources: Vec<bool> = (0..nrows * ncols)
        .map(|i| grid.value_at(i) == Some(lv))
        .collect();

    let nodata = grid.header().nodata;
    let cellsize = grid.header().cellsize;
    let cells = if sources.iter().any(|&s| s) {
        let d2 = squared_distance_cells(&sources, nrows, ncols);
        (0..nrows * ncols)
            .map(|i| {
                if grid.value_at(i).is_none() {
                    nodata
                } else {
                    c::<T>(d2[i].sqrt()) * cellsize
                }
            })
            .collect()
    } else {
        (0..nrows * ncols)
            .map(|i| {
                if grid.value_at(i).is_none() {
                    nodata
                } else {
                    T::infinity()
                }
            })
            .collect()
    };
    RasterGrid::new(*grid.header(), GridKind::Continuous, cells)
}
