//! Scoring of risk maps against a flood ground-truth mask, per-basin level
//! distributions, and sweep stability statistics.

use crate::error::{Error, Result};
use crate::raster::{require_aligned, GridKind, RasterGrid};
use crate::risk::{ModelVariant, RiskProduct};
use crate::scalar::{c, Scalar};
use crate::terrain::ZoneRaster;

/// Ground truth for validation: flooded cells plus permanent water bodies
/// excluded from scoring.
#[derive(Debug, Clone)]
pub struct FloodMask<T> {
    truth: RasterGrid<T>,
    permanent_water: RasterGrid<T>,
}

impl<T: Scalar> FloodMask<T> {
    /// `truth` holds 0/1 flood cells; `permanent_water` (0/1, defaulting to
    /// all zeros) marks cells never counted in either direction.
    pub fn new(truth: RasterGrid<T>, permanent_water: Option<RasterGrid<T>>) -> Result<Self> {
        let permanent_water = match permanent_water {
            Some(g) => {
                require_aligned(truth.header(), g.header(), "truth vs permanent water")?;
                g.with_kind(GridKind::Categorical)?
            }
            None => RasterGrid::filled(*truth.header(), GridKind::Categorical, T::zero()),
        };
        let truth = truth.with_kind(GridKind::Categorical)?;
        for grid in [&truth, &permanent_water] {
            for i in 0..grid.cells().len() {
                if let Some(v) = grid.value_at(i) {
                    if v != T::zero() && v != T::one() {
                        return Err(Error::InvalidGrid(format!(
                            "mask value {v} at cell {i} is not 0 or 1"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            truth,
            permanent_water,
        })
    }

    pub fn truth(&self) -> &RasterGrid<T> {
        &self.truth
    }

    pub fn permanent_water(&self) -> &RasterGrid<T> {
        &self.permanent_water
    }
}

/// Correct/fit percentages with the cell counts behind them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationScores<T> {
    pub correct_pct: T,
    pub fit_pct: T,
    pub intersection: u64,
    pub fa_fri: u64,
    pub fa_water: u64,
    pub union: u64,
    /// Set when the truth mask had no flooded cells; both ratios are then
    /// defined as 0.
    pub degenerate: bool,
}

/// Positive prediction mask from a risk product: 1 where the class is High
/// or Very High (4 or 5), else 0.
pub fn positive_mask<T: Scalar>(product: &RiskProduct<T>) -> RasterGrid<T> {
    let levels = &product.levels;
    let nodata = levels.header().nodata;
    let four = c::<T>(4.0);
    let cells = (0..levels.cells().len())
        .map(|i| match levels.value_at(i) {
            None => nodata,
            Some(v) if v >= four => T::one(),
            Some(_) => T::zero(),
        })
        .collect();
    RasterGrid::new(*levels.header(), GridKind::Categorical, cells)
        .expect("mask matches levels lattice")
}

/// Correct = 100 * |pred AND truth| / |truth|;
/// Fit = 100 * |pred AND truth| / |pred OR truth|.
///
/// Permanent-water cells and cells that are nodata in either grid are
/// excluded from every count. An empty truth yields 0/0 with the degenerate
/// flag set.
pub fn score<T: Scalar>(pred: &RasterGrid<T>, mask: &FloodMask<T>) -> Result<ValidationScores<T>> {
    require_aligned(pred.header(), mask.truth.header(), "prediction vs truth")?;

    let mut intersection = 0u64;
    let mut fa_fri = 0u64;
    let mut fa_water = 0u64;
    let mut union = 0u64;
    for i in 0..pred.cells().len() {
        if mask.permanent_water.value_at(i) == Some(T::one()) {
            continue;
        }
        let (Some(p), Some(t)) = (pred.value_at(i), mask.truth.value_at(i)) else {
            continue;
        };
        let p = p == T::one();
        let t = t == T::one();
        if p {
            fa_fri += 1;
        }
        if t {
            fa_water += 1;
        }
        if p && t {
            intersection += 1;
        }
        if p || t {
            union += 1;
        }
    }

    let degenerate = fa_water == 0;
    let hundred = c::<T>(100.0);
    let (correct_pct, fit_pct) = if degenerate {
        (T::zero(), T::zero())
    } else {
        (
            hundred * c::<T>(intersection as f64) / c(fa_water as f64),
            hundred * c::<T>(intersection as f64) / c(union as f64),
        )
    };
    Ok(ValidationScores {
        correct_pct,
        fit_pct,
        intersection,
        fa_fri,
        fa_water,
        union,
        degenerate,
    })
}

/// One row of a per-basin level histogram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelDistributionRow<T> {
    pub basin: u32,
    pub level: u8,
    pub cells: u64,
    /// Share of the basin's classified cells at this level; the five rows of
    /// a basin sum to 1.
    pub ratio: T,
}

/// Histogram of risk levels 1..=5 per basin, in (basin, level) order.
pub fn level_distribution<T: Scalar>(
    product: &RiskProduct<T>,
    basins: &ZoneRaster<T>,
) -> Result<Vec<LevelDistributionRow<T>>> {
    require_aligned(
        product.levels.header(),
        basins.as_grid().header(),
        "levels vs basins",
    )?;
    let max_basin = basins.max_zone() as usize;
    let mut counts = vec![[0u64; 5]; max_basin + 1];
    for i in 0..product.levels.cells().len() {
        let (Some(b), Some(v)) = (basins.zone_at(i), product.levels.value_at(i)) else {
            continue;
        };
        if b == 0 {
            continue;
        }
        let Some(level) = v.to_u8().filter(|l| (1..=5).contains(l)) else {
            continue;
        };
        counts[b as usize][(level - 1) as usize] += 1;
    }

    let mut rows = Vec::new();
    for (basin, levels) in counts.iter().enumerate().skip(1) {
        let total: u64 = levels.iter().sum();
        if total == 0 {
            continue;
        }
        for (k, &cells) in levels.iter().enumerate() {
            rows.push(LevelDistributionRow {
                basin: basin as u32,
                level: (k + 1) as u8,
                cells,
                ratio: c::<T>(cells as f64) / c(total as f64),
            });
        }
    }
    Ok(rows)
}

/// Share of classified cells at High or Very High (levels 4-5).
pub fn high_risk_ratio<T: Scalar>(levels: &RasterGrid<T>) -> T {
    let four = c::<T>(4.0);
    let mut high = 0u64;
    let mut total = 0u64;
    for i in 0..levels.cells().len() {
        if let Some(v) = levels.value_at(i) {
            total += 1;
            if v >= four {
                high += 1;
            }
        }
    }
    if total == 0 {
        T::zero()
    } else {
        c::<T>(high as f64) / c(total as f64)
    }
}

/// Summary statistics of one metric across the sweep projects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricStats<T> {
    pub min: T,
    pub max: T,
    pub mean: T,
    /// Population standard deviation.
    pub std_dev: T,
    pub range: T,
}

/// Min/max/mean/population-sigma/range of a series.
pub fn stability_stats<T: Scalar>(xs: &[T]) -> Result<MetricStats<T>> {
    if xs.is_empty() {
        return Err(Error::Argument("empty metric series".into()));
    }
    let n = c::<T>(xs.len() as f64);
    let mut min = xs[0];
    let mut max = xs[0];
    let mut sum = T::zero();
    for &x in xs {
        min = min.min(x);
        max = max.max(x);
        sum = sum + x;
    }
    let mean = sum / n;
    let mut ss = T::zero();
    for &x in xs {
        let d = x - mean;
        ss = ss + d * d;
    }
    Ok(MetricStats {
        min,
        max,
        mean,
        std_dev: (ss / n).sqrt(),
        range: max - min,
    })
}

#[derive(Debug, Clone)]
pub struct StabilityRow<T> {
    pub variant: ModelVariant,
    pub metric: String,
    pub stats: MetricStats<T>,
}

#[derive(Debug, Clone)]
pub struct StabilityReport<T> {
    pub rows: Vec<StabilityRow<T>>,
}

impl<T: Scalar> StabilityReport<T> {
    /// CSV with one row per (variant, metric).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("variant,metric,min,max,mean,std_dev,range\n");
        for row in &self.rows {
            let s = &row.stats;
            out.push_str(&format!(
                "{},{},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
                row.variant,
                row.metric,
                s.min.to_f64().unwrap(),
                s.max.to_f64().unwrap(),
                s.mean.to_f64().unwrap(),
                s.std_dev.to_f64().unwrap(),
                s.range.to_f64().unwrap()
            ));
        }
        out
    }
}

/// Per-variant correct/fit stability across the sweep. Every variant needs
/// at least two project scores.
pub fn sweep_stability<T: Scalar>(
    series: &[(ModelVariant, Vec<ValidationScores<T>>)],
) -> Result<StabilityReport<T>> {
    let mut rows = Vec::new();
    for (variant, scores) in series {
        if scores.len() < 2 {
            return Err(Error::Argument(format!(
                "stability for {variant} needs at least 2 projects, got {}",
                scores.len()
            )));
        }
        let correct: Vec<T> = scores.iter().map(|s| s.correct_pct).collect();
        let fit: Vec<T> = scores.iter().map(|s| s.fit_pct).collect();
        rows.push(StabilityRow {
            variant: *variant,
            metric: "correct".into(),
            stats: stability_stats(&correct)?,
        });
        rows.push(StabilityRow {
            variant: *variant,
            metric: "fit".into(),
            stats: stability_stats(&fit)?,
        });
    }
    Ok(StabilityReport { rows })
}
