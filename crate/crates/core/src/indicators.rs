//! Ranking of raw layers into the five flood-risk criteria.
//!
//! Slope and elevation use fixed class bounds; distance from streams
//! combines per-level proximity bands with a permanent-water override;
//! hydro-lithological formations and land use map class codes to expert
//! ratings. All rankings are per-cell and propagate nodata.

use std::fmt;

use crate::error::{Error, Result};
use crate::raster::{require_aligned, GridKind, RasterGrid};
use crate::scalar::{c, Scalar};
use crate::terrain::StreamNetwork;

/// Integer codes expected in the hydro-lithological input layer.
pub mod hydrolith_codes {
    pub const WATER: u8 = 1;
    pub const IMPERVIOUS: u8 = 2;
    pub const PERVIOUS: u8 = 3;
}

/// Integer codes expected in the land-use input layer.
pub mod landuse_codes {
    pub const WATER: u8 = 1;
    pub const ROAD: u8 = 2;
    pub const BUILDING: u8 = 3;
    pub const SOIL: u8 = 4;
    pub const VEGETATION: u8 = 5;
}

/// The five criteria, in weight-vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndicatorName {
    Slope,
    Elevation,
    DistStreams,
    HydroLith,
    LandUse,
}

impl IndicatorName {
    pub const ALL: [IndicatorName; 5] = [
        IndicatorName::Slope,
        IndicatorName::Elevation,
        IndicatorName::DistStreams,
        IndicatorName::HydroLith,
        IndicatorName::LandUse,
    ];

    /// Position in the weight vector (w1..w5).
    pub fn index(self) -> usize {
        match self {
            IndicatorName::Slope => 0,
            IndicatorName::Elevation => 1,
            IndicatorName::DistStreams => 2,
            IndicatorName::HydroLith => 3,
            IndicatorName::LandUse => 4,
        }
    }

    /// Runoff-converging indicators, the ones `*-RC` variants constrain.
    pub fn converging_related(self) -> bool {
        matches!(self, IndicatorName::Slope | IndicatorName::DistStreams)
    }

    pub fn legal_ranks(self) -> &'static [u8] {
        match self {
            IndicatorName::Slope => &[0, 1, 2, 3, 4, 5],
            IndicatorName::Elevation => &[1, 2, 3, 4, 5],
            IndicatorName::DistStreams => &[0, 1, 2, 3, 4, 5],
            IndicatorName::HydroLith => &[1, 3, 4],
            IndicatorName::LandUse => &[1, 2, 3, 4, 5],
        }
    }
}

impl fmt::Display for IndicatorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IndicatorName::Slope => "slope",
            IndicatorName::Elevation => "elevation",
            IndicatorName::DistStreams => "dist_streams",
            IndicatorName::HydroLith => "hydrolith",
            IndicatorName::LandUse => "landuse",
        };
        f.write_str(s)
    }
}

/// A criterion layer holding only that indicator's legal ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedIndicator<T> {
    name: IndicatorName,
    grid: RasterGrid<T>,
}

impl<T: Scalar> RankedIndicator<T> {
    pub fn new(name: IndicatorName, grid: RasterGrid<T>) -> Result<Self> {
        let grid = grid.with_kind(GridKind::Categorical)?;
        let legal = name.legal_ranks();
        for i in 0..grid.cells().len() {
            if let Some(v) = grid.value_at(i) {
                if !v.to_u8().is_some_and(|r| legal.contains(&r)) {
                    return Err(Error::InvalidGrid(format!(
                        "rank {v} at cell {i} outside the {name} rank set"
                    )));
                }
            }
        }
        Ok(Self { name, grid })
    }

    pub fn name(&self) -> IndicatorName {
        self.name
    }

    pub fn grid(&self) -> &RasterGrid<T> {
        &self.grid
    }

    pub fn converging_related(&self) -> bool {
        self.name.converging_related()
    }
}

/// The five ranked criteria on one lattice, in weight-vector order.
#[derive(Debug, Clone)]
pub struct IndicatorStack<T> {
    indicators: Vec<RankedIndicator<T>>,
}

impl<T: Scalar> IndicatorStack<T> {
    pub fn new(indicators: Vec<RankedIndicator<T>>) -> Result<Self> {
        if indicators.len() != 5 {
            return Err(Error::Argument(format!(
                "expected 5 indicators, got {}",
                indicators.len()
            )));
        }
        let mut ordered: Vec<Option<RankedIndicator<T>>> = vec![None; 5];
        for ind in indicators {
            let slot = &mut ordered[ind.name().index()];
            if slot.is_some() {
                return Err(Error::Argument(format!("duplicate indicator {}", ind.name())));
            }
            *slot = Some(ind);
        }
        let indicators: Vec<RankedIndicator<T>> =
            ordered.into_iter().map(|o| o.unwrap()).collect();
        for ind in &indicators[1..] {
            require_aligned(
                indicators[0].grid().header(),
                ind.grid().header(),
                "indicator stack",
            )?;
        }
        Ok(Self { indicators })
    }

    pub fn get(&self, name: IndicatorName) -> &RankedIndicator<T> {
        &self.indicators[name.index()]
    }

    /// Indicators in weight-vector order.
    pub fn iter(&self) -> impl Iterator<Item = &RankedIndicator<T>> {
        self.indicators.iter()
    }
}

fn rank_grid<T: Scalar>(
    name: IndicatorName,
    input: &RasterGrid<T>,
    f: impl Fn(T, usize) -> Result<T>,
) -> Result<RankedIndicator<T>> {
    let nodata = input.header().nodata;
    let mut cells = Vec::with_capacity(input.cells().len());
    for i in 0..input.cells().len() {
        match input.value_at(i) {
            None => cells.push(nodata),
            Some(v) => cells.push(f(v, i)?),
        }
    }
    RankedIndicator::new(
        name,
        RasterGrid::new(*input.header(), GridKind::Categorical, cells)?,
    )
}

/// Rank slope (degrees): 0 -> 5; (0,2] -> 4; (2,6] -> 3; (6,12] -> 2;
/// (12,20] -> 1; >20 -> 0.
pub fn rank_slope<T: Scalar>(slope_deg: &RasterGrid<T>) -> Result<RankedIndicator<T>> {
    rank_grid(IndicatorName::Slope, slope_deg, |v, i| {
        if v < T::zero() {
            return Err(Error::Argument(format!(
                "negative slope {v} at cell {i}"
            )));
        }
        let r = if v == T::zero() {
            5
        } else if v <= c(2.0) {
            4
        } else if v <= c(6.0) {
            3
        } else if v <= c(12.0) {
            2
        } else if v <= c(20.0) {
            1
        } else {
            0
        };
        Ok(c(r as f64))
    })
}

/// Rank elevation (m): <=12 -> 5; (12,23] -> 4; (23,46] -> 3; (46,152] -> 2;
/// >152 -> 1.
pub fn rank_elevation<T: Scalar>(dem: &RasterGrid<T>) -> Result<RankedIndicator<T>> {
    rank_grid(IndicatorName::Elevation, dem, |v, _| {
        let r = if v <= c(12.0) {
            5
        } else if v <= c(23.0) {
            4
        } else if v <= c(46.0) {
            3
        } else if v <= c(152.0) {
            2
        } else {
            1
        };
        Ok(c(r as f64))
    })
}

/// Proximity rating earned from one stream level at distance `d` meters.
/// Bands follow the published class table; distances beyond the last band
/// rate 1. Level 5's closest band is closed downward so a nearer cell is
/// never rated below a farther one.
fn level_band_rank<T: Scalar>(level: u8, d: T) -> u8 {
    let within = |x: f64| d <= c(x);
    match level {
        1 => {
            if within(500.0) {
                2
            } else {
                1
            }
        }
        2 => {
            if within(500.0) {
                3
            } else if within(1000.0) {
                2
            } else {
                1
            }
        }
        3 => {
            if within(500.0) {
                4
            } else if within(1000.0) {
                3
            } else if within(1500.0) {
                2
            } else {
                1
            }
        }
        4 => {
            if within(1000.0) {
                4
            } else if within(2000.0) {
                3
            } else if within(3000.0) {
                2
            } else {
                1
            }
        }
        5 => {
            if within(2000.0) {
                4
            } else if within(4000.0) {
                3
            } else if within(6000.0) {
                2
            } else {
                1
            }
        }
        _ => 0,
    }
}

/// Rank distance from streams. Permanent-water cells rate 5; otherwise a
/// cell takes the maximum rating earned across the levels present in the
/// network. With no stream of any level in the window the rating is 0.
///
/// `distances[k]` is the level `k+1` distance grid in meters (infinite where
/// that level is absent).
pub fn rank_distance<T: Scalar>(
    network: &StreamNetwork<T>,
    distances: &[RasterGrid<T>; 5],
    water_mask: &RasterGrid<T>,
) -> Result<RankedIndicator<T>> {
    for d in distances.iter() {
        require_aligned(network.mask().header(), d.header(), "distance grids")?;
    }
    require_aligned(network.mask().header(), water_mask.header(), "water mask")?;

    let present: Vec<bool> = (1..=5).map(|lv| network.has_level(lv)).collect();
    let template = &distances[0];
    let nodata = template.header().nodata;
    let mut cells = Vec::with_capacity(template.cells().len());
    for i in 0..template.cells().len() {
        let water = water_mask.value_at(i);
        if water.is_none() {
            cells.push(nodata);
            continue;
        }
        if water == Some(T::one()) {
            cells.push(c(5.0));
            continue;
        }
        let mut best: Option<u8> = None;
        let mut void = false;
        for lv in 1..=5u8 {
            if !present[(lv - 1) as usize] {
                continue;
            }
            match distances[(lv - 1) as usize].value_at(i) {
                None => {
                    void = true;
                    break;
                }
                Some(d) if d.is_finite() => {
                    let r = level_band_rank(lv, d);
                    best = Some(best.map_or(r, |b| b.max(r)));
                }
                Some(_) => {}
            }
        }
        if void {
            cells.push(nodata);
        } else {
            cells.push(c(best.unwrap_or(0) as f64));
        }
    }
    RankedIndicator::new(
        IndicatorName::DistStreams,
        RasterGrid::new(*template.header(), GridKind::Categorical, cells)?,
    )
}

fn rank_codes<T: Scalar>(
    name: IndicatorName,
    classes: &RasterGrid<T>,
    map: &[(u8, u8)],
) -> Result<RankedIndicator<T>> {
    let ncols = classes.ncols();
    rank_grid(name, classes, |v, i| {
        let code = v.to_u8();
        let rank = code.and_then(|c_| map.iter().find(|&&(k, _)| k == c_).map(|&(_, r)| r));
        match rank {
            Some(r) => Ok(c(r as f64)),
            None => Err(Error::ClassCode {
                code: v.to_f64().unwrap_or(f64::NAN),
                row: i / ncols,
                col: i % ncols,
            }),
        }
    })
}

/// Rank hydro-lithological formations: water -> 4, impervious -> 3,
/// pervious -> 1.
pub fn rank_hydrolith<T: Scalar>(classes: &RasterGrid<T>) -> Result<RankedIndicator<T>> {
    use hydrolith_codes::*;
    rank_codes(
        IndicatorName::HydroLith,
        classes,
        &[(WATER, 4), (IMPERVIOUS, 3), (PERVIOUS, 1)],
    )
}

/// Rank land use: water -> 5, road -> 4, building -> 3, soil -> 2,
/// vegetation -> 1.
pub fn rank_landuse<T: Scalar>(classes: &RasterGrid<T>) -> Result<RankedIndicator<T>> {
    use landuse_codes::*;
    rank_codes(
        IndicatorName::LandUse,
        classes,
        &[
            (WATER, 5),
            (ROAD, 4),
            (BUILDING, 3),
            (SOIL, 2),
            (VEGETATION, 1),
        ],
    )
}
