//! ESRI ASCII grid reader and writer.
//!
//! Format: six `KEY value` header lines (`ncols`, `nrows`, `xllcorner` or
//! `xllcenter`, `yllcorner` or `yllcenter`, `cellsize`, `NODATA_value`),
//! keys case-insensitive, then `nrows * ncols` whitespace-separated cell
//! values in row-major north-to-south order. On read, a missing
//! `NODATA_value` defaults to -9999; center-convention corners are converted
//! to the lower-left corner. Writing always uses the corner convention and
//! always emits a `NODATA_value` line, so `read(write(g))` reproduces `g`
//! exactly.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::{GridHeader, GridKind, RasterGrid, DEFAULT_NODATA};
use crate::scalar::{c, Scalar};

fn header_err(key: &str, reason: impl Into<String>) -> Error {
    Error::Header {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn parse_scalar<T: Scalar>(key: &str, text: &str) -> Result<T> {
    text.parse::<T>()
        .map_err(|_| header_err(key, format!("not a number: `{text}`")))
}

fn parse_dim(key: &str, text: &str) -> Result<usize> {
    let n: usize = text
        .parse()
        .map_err(|_| header_err(key, format!("not a positive integer: `{text}`")))?;
    if n == 0 {
        return Err(header_err(key, "must be at least 1"));
    }
    Ok(n)
}

/// Read an ESRI ASCII grid. The returned grid is tagged
/// [`GridKind::Continuous`]; callers holding categorical data reinterpret it
/// via [`RasterGrid::with_kind`].
pub fn read_ascii_grid<T: Scalar>(path: impl AsRef<Path>) -> Result<RasterGrid<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_ascii_grid(&text)
}

/// Parse grid text; see [`read_ascii_grid`].
pub fn parse_ascii_grid<T: Scalar>(text: &str) -> Result<RasterGrid<T>> {
    let mut ncols: Option<usize> = None;
    let mut nrows: Option<usize> = None;
    // (value, is_center_convention)
    let mut xll: Option<(T, bool)> = None;
    let mut yll: Option<(T, bool)> = None;
    let mut cellsize: Option<T> = None;
    let mut nodata: Option<T> = None;

    let mut rest = text;
    loop {
        let line_end = rest.find('\n').map(|i| i + 1).unwrap_or(rest.len());
        let line = &rest[..line_end];
        let mut tokens = line.split_whitespace();
        let Some(first) = tokens.next() else {
            if line_end == rest.len() && rest.trim().is_empty() {
                break; // blank tail
            }
            rest = &rest[line_end..];
            continue; // blank line between header and body
        };
        if !first.chars().next().is_some_and(|ch| ch.is_ascii_alphabetic()) {
            break; // start of the cell body
        }

        let key = first.to_ascii_lowercase();
        let value = tokens
            .next()
            .ok_or_else(|| header_err(&key, "missing value"))?;
        if tokens.next().is_some() {
            return Err(header_err(&key, "trailing tokens on header line"));
        }
        match key.as_str() {
            "ncols" => ncols = Some(parse_dim(&key, value)?),
            "nrows" => nrows = Some(parse_dim(&key, value)?),
            "xllcorner" => xll = Some((parse_scalar(&key, value)?, false)),
            "xllcenter" => xll = Some((parse_scalar(&key, value)?, true)),
            "yllcorner" => yll = Some((parse_scalar(&key, value)?, false)),
            "yllcenter" => yll = Some((parse_scalar(&key, value)?, true)),
            "cellsize" => cellsize = Some(parse_scalar(&key, value)?),
            "nodata_value" => nodata = Some(parse_scalar(&key, value)?),
            other => return Err(header_err(other, "unknown header key")),
        }
        rest = &rest[line_end..];
    }

    let ncols = ncols.ok_or_else(|| header_err("ncols", "missing"))?;
    let nrows = nrows.ok_or_else(|| header_err("nrows", "missing"))?;
    let cellsize = cellsize.ok_or_else(|| header_err("cellsize", "missing"))?;
    if !(cellsize > T::zero()) {
        return Err(header_err("cellsize", "must be positive"));
    }
    let half = cellsize / c(2.0);
    let (x, x_center) = xll.ok_or_else(|| header_err("xllcorner", "missing"))?;
    let (y, y_center) = yll.ok_or_else(|| header_err("yllcorner", "missing"))?;
    let xll = if x_center { x - half } else { x };
    let yll = if y_center { y - half } else { y };
    let nodata = nodata.unwrap_or_else(|| c(DEFAULT_NODATA));

    let header = GridHeader::new(ncols, nrows, xll, yll, cellsize, nodata)?;
    let expected = header.cell_count();
    let tokens: Vec<&str> = rest.split_whitespace().collect();
    if tokens.len() != expected {
        return Err(Error::CellCount {
            expected,
            found: tokens.len(),
        });
    }
    let mut cells = Vec::with_capacity(expected);
    for (i, token) in tokens.into_iter().enumerate() {
        let v = token.parse::<T>().map_err(|_| Error::Token {
            token: token.to_string(),
            row: i / ncols,
            col: i % ncols,
        })?;
        cells.push(v);
    }
    RasterGrid::new(header, GridKind::Continuous, cells)
}

/// Write a grid as an ESRI ASCII file, one raster row per line.
pub fn write_ascii_grid<T: Scalar>(grid: &RasterGrid<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut out = std::io::BufWriter::new(file);
    out.write_all(format_ascii_grid(grid).as_bytes())
        .map_err(io_err)?;
    out.flush().map_err(io_err)
}

/// Render a grid in ESRI ASCII form. `Display` of the scalar type emits the
/// shortest decimal that parses back to the same value, which is what makes
/// the write/read round-trip exact.
pub fn format_ascii_grid<T: Scalar>(grid: &RasterGrid<T>) -> String {
    let h = grid.header();
    let mut s = String::new();
    s.push_str(&format!("ncols {}\n", h.ncols));
    s.push_str(&format!("nrows {}\n", h.nrows));
    s.push_str(&format!("xllcorner {}\n", h.xll));
    s.push_str(&format!("yllcorner {}\n", h.yll));
    s.push_str(&format!("cellsize {}\n", h.cellsize));
    s.push_str(&format!("NODATA_value {}\n", h.nodata));
    for row in 0..h.nrows {
        for col in 0..h.ncols {
            if col > 0 {
                s.push(' ');
            }
            s.push_str(&format!("{}", grid.get(row, col)));
        }
        s.push('\n');
    }
    s
}
