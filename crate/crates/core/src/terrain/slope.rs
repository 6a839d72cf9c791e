//! Slope from a DEM via Horn's 3x3 operator.

use crate::raster::{GridKind, RasterGrid};
use crate::scalar::{c, Scalar};

/// Reflect an out-of-range index back into `[0, n)`.
#[inline]
fn mirror(i: isize, n: usize) -> usize {
    let n = n as isize;
    let m = if i < 0 {
        -i
    } else if i >= n {
        2 * n - 2 - i
    } else {
        i
    };
    m.clamp(0, n - 1) as usize
}

/// Per-cell slope in degrees, in `[0, 90)`.
///
/// Uses Horn's weighted finite differences over the 3x3 neighbourhood.
/// Neighbours outside the grid are mirrored; nodata neighbours fall back to
/// the centre value, and nodata centres stay nodata.
pub fn slope_degrees<T: Scalar>(dem: &RasterGrid<T>) -> RasterGrid<T> {
    let (nrows, ncols) = (dem.nrows(), dem.ncols());
    let nodata = dem.header().nodata;
    let cellsize = dem.header().cellsize;
    let eight = c::<T>(8.0);

    let mut cells = Vec::with_capacity(nrows * ncols);
    for row in 0..nrows {
        for col in 0..ncols {
            let Some(z0) = dem.value(row, col) else {
                cells.push(nodata);
                continue;
            };
            let at = |dr: isize, dc: isize| -> T {
                let r = mirror(row as isize + dr, nrows);
                let c_ = mirror(col as isize + dc, ncols);
                dem.value(r, c_).unwrap_or(z0)
            };
            // 3x3 kernel: a b c / d e f / g h i, row 0 north.
            let (a, b, bc) = (at(-1, -1), at(-1, 0), at(-1, 1));
            let (d, f) = (at(0, -1), at(0, 1));
            let (g, h, i) = (at(1, -1), at(1, 0), at(1, 1));

            let dzdx = ((bc + f + f + i) - (a + d + d + g)) / (eight * cellsize);
            let dzdy = ((g + h + h + i) - (a + b + b + bc)) / (eight * cellsize);
            let slope = (dzdx * dzdx + dzdy * dzdy).sqrt().atan().to_degrees();
            cells.push(slope);
        }
    }
    RasterGrid::new(*dem.header(), GridKind::Continuous, cells)
        .expect("slope grid matches DEM lattice")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::GridHeader;
    use approx::assert_relative_eq;

    fn grid(ncols: usize, nrows: usize, f: impl Fn(usize, usize) -> f64) -> RasterGrid<f64> {
        let header = GridHeader::square(ncols, nrows, 30.0).unwrap();
        let cells = (0..nrows * ncols)
            .map(|i| f(i / ncols, i % ncols))
            .collect();
        RasterGrid::new(header, GridKind::Continuous, cells).unwrap()
    }

    #[test]
    fn flat_dem_has_zero_slope() {
        let s = slope_degrees(&grid(5, 5, |_, _| 100.0));
        assert!(s.cells().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unit_gradient_plane_is_45_degrees_interior() {
        // Rising 30 m per 30 m cell eastward.
        let s = slope_degrees(&grid(6, 6, |_, c| 30.0 * c as f64));
        for r in 1..5 {
            for c in 1..5 {
                assert_relative_eq!(s.get(r, c), 45.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn slopes_bounded_below_90() {
        // Steep synthetic relief stays within [0, 90).
        let s = slope_degrees(&grid(16, 16, |r, c| {
            500.0 * ((r as f64 * 0.9).sin() + (c as f64 * 1.3).cos())
        }));
        for &v in s.cells() {
            assert!((0.0..90.0).contains(&v), "slope {v} out of range");
        }
    }

    #[test]
    fn nodata_center_propagates() {
        let mut dem = grid(3, 3, |_, _| 50.0);
        dem.set(1, 1, -9999.0);
        let s = slope_degrees(&dem);
        assert_eq!(s.value(1, 1), None);
        assert_eq!(s.value(0, 0), Some(0.0));
    }
}
