//! Flood risk index models and five-class risk mapping.
//!
//! The index is a weighted sum of the five ranked criteria. Pixel models use
//! the raw ranks; sub-watershed models first replace selected criteria by
//! their zonal maximum. The resulting index raster is sliced into five
//! classes by natural breaks.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::indicators::{IndicatorName, IndicatorStack, RankedIndicator};
use crate::jenks::jenks_breaks_seeded;
use crate::raster::{require_aligned, GridKind, RasterGrid};
use crate::scalar::{c, Scalar};
use crate::terrain::ZoneRaster;

/// Number of risk classes (Very Low .. Very High).
pub const RISK_CLASSES: usize = 5;

/// Which delineation a variant constrains with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZoneSource {
    Mfd,
    D8,
}

/// The five investigated model variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelVariant {
    /// Plain per-pixel weighted sum.
    PixelAhp,
    /// MFD zones constrain the converging-related criteria.
    MfdRc,
    /// MFD zones constrain all five criteria.
    MfdAll,
    /// D8 zones constrain the converging-related criteria.
    D8Rc,
    /// D8 zones constrain all five criteria.
    D8All,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 5] = [
        ModelVariant::PixelAhp,
        ModelVariant::MfdRc,
        ModelVariant::MfdAll,
        ModelVariant::D8Rc,
        ModelVariant::D8All,
    ];

    /// Does this variant pass `name` through the zonal-maximum constraint?
    pub fn constrains(self, name: IndicatorName) -> bool {
        match self {
            ModelVariant::PixelAhp => false,
            ModelVariant::MfdRc | ModelVariant::D8Rc => name.converging_related(),
            ModelVariant::MfdAll | ModelVariant::D8All => true,
        }
    }

    pub fn zone_source(self) -> Option<ZoneSource> {
        match self {
            ModelVariant::PixelAhp => None,
            ModelVariant::MfdRc | ModelVariant::MfdAll => Some(ZoneSource::Mfd),
            ModelVariant::D8Rc | ModelVariant::D8All => Some(ZoneSource::D8),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ModelVariant::PixelAhp => "pixel-ahp",
            ModelVariant::MfdRc => "mfd-rc",
            ModelVariant::MfdAll => "mfd-all",
            ModelVariant::D8Rc => "d8-rc",
            ModelVariant::D8All => "d8-all",
        }
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ModelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pixel-ahp" | "ahp" => Ok(ModelVariant::PixelAhp),
            "mfd-rc" => Ok(ModelVariant::MfdRc),
            "mfd-all" => Ok(ModelVariant::MfdAll),
            "d8-rc" => Ok(ModelVariant::D8Rc),
            "d8-all" => Ok(ModelVariant::D8All),
            other => Err(Error::Argument(format!(
                "unknown model variant `{other}` (expected pixel-ahp, mfd-rc, mfd-all, d8-rc, d8-all)"
            ))),
        }
    }
}

/// Replace every cell by the maximum grid value over its zone. Cells with
/// zone id 0 (unassigned) keep their own value; nodata propagates.
pub fn zonal_max_grid<T: Scalar>(
    zones: &ZoneRaster<T>,
    grid: &RasterGrid<T>,
) -> Result<RasterGrid<T>> {
    require_aligned(zones.as_grid().header(), grid.header(), "zones vs values")?;
    let n = grid.cells().len();

    let mut max_by_zone: Vec<Option<T>> = vec![None; zones.max_zone() as usize + 1];
    for i in 0..n {
        let (Some(z), Some(v)) = (zones.zone_at(i), grid.value_at(i)) else {
            continue;
        };
        if z == 0 {
            continue;
        }
        let slot = &mut max_by_zone[z as usize];
        *slot = Some(slot.map_or(v, |m: T| m.max(v)));
    }

    let nodata = grid.header().nodata;
    let cells = (0..n)
        .map(|i| match (zones.zone_at(i), grid.value_at(i)) {
            (_, None) => nodata,
            (Some(z), Some(v)) if z > 0 => max_by_zone[z as usize].unwrap_or(v),
            (_, Some(v)) => v, // unassigned or nodata zone: passthrough
        })
        .collect();
    RasterGrid::new(*grid.header(), grid.kind(), cells)
}

/// [`zonal_max_grid`] keeping the indicator wrapper (the output stays within
/// the same rank set).
pub fn zonal_max<T: Scalar>(
    zones: &ZoneRaster<T>,
    indicator: &RankedIndicator<T>,
) -> Result<RankedIndicator<T>> {
    RankedIndicator::new(indicator.name(), zonal_max_grid(zones, indicator.grid())?)
}

/// Per-cell flood risk index for a model variant: the weighted sum of the
/// five criteria, each either raw or zone-constrained per the variant.
/// Nodata in any participating layer voids the cell.
pub fn compute_fri<T: Scalar>(
    stack: &IndicatorStack<T>,
    weights: &crate::ahp::EigenResult<T>,
    variant: ModelVariant,
    zones_mfd: Option<&ZoneRaster<T>>,
    zones_d8: Option<&ZoneRaster<T>>,
) -> Result<RasterGrid<T>> {
    if weights.weights.len() != 5 {
        return Err(Error::Argument(format!(
            "expected 5 weights, got {}",
            weights.weights.len()
        )));
    }
    let zones = match variant.zone_source() {
        None => None,
        Some(ZoneSource::Mfd) => Some(zones_mfd.ok_or_else(|| {
            Error::Config(format!("variant {variant} requires the MFD zone raster"))
        })?),
        Some(ZoneSource::D8) => Some(zones_d8.ok_or_else(|| {
            Error::Config(format!("variant {variant} requires the D8 zone raster"))
        })?),
    };

    let mut layers: Vec<RasterGrid<T>> = Vec::with_capacity(5);
    for ind in stack.iter() {
        if variant.constrains(ind.name()) {
            let zones = zones.expect("constraining variants carry a zone source");
            layers.push(zonal_max_grid(zones, ind.grid())?);
        } else {
            layers.push(ind.grid().clone());
        }
    }

    let template = stack.get(IndicatorName::Slope).grid();
    let nodata = template.header().nodata;
    let n = template.cells().len();
    let mut cells = Vec::with_capacity(n);
    'cell: for i in 0..n {
        let mut fri = T::zero();
        for (layer, &w) in layers.iter().zip(&weights.weights) {
            match layer.value_at(i) {
                Some(v) => fri = fri + w * v,
                None => {
                    cells.push(nodata);
                    continue 'cell;
                }
            }
        }
        cells.push(fri);
    }
    RasterGrid::new(*template.header(), GridKind::Continuous, cells)
}

/// A risk index raster with its five-class map and the class-maximum breaks
/// that produced it.
#[derive(Debug, Clone)]
pub struct RiskProduct<T> {
    pub fri: RasterGrid<T>,
    /// Classes 1..=5 (Very Low .. Very High).
    pub levels: RasterGrid<T>,
    pub breaks: Vec<T>,
}

/// Slice a risk index into five classes by natural breaks. Break values
/// belong to the lower class. The index must carry at least five distinct
/// finite values.
pub fn classify_fri<T: Scalar>(fri: &RasterGrid<T>) -> Result<RiskProduct<T>> {
    classify_fri_seeded(fri, 0)
}

/// [`classify_fri`] with an explicit subsampling seed (only relevant above
/// [`crate::jenks::JENKS_SUBSAMPLE_LIMIT`] data cells).
pub fn classify_fri_seeded<T: Scalar>(fri: &RasterGrid<T>, seed: u64) -> Result<RiskProduct<T>> {
    let n = fri.cells().len();
    let data: Vec<T> = (0..n).filter_map(|i| fri.value_at(i)).collect();
    let breaks = jenks_breaks_seeded(&data, RISK_CLASSES, seed)?;

    let nodata = fri.header().nodata;
    let cells = (0..n)
        .map(|i| match fri.value_at(i) {
            None => nodata,
            Some(v) => {
                let class = 1 + breaks.iter().filter(|&&b| b < v).count();
                c(class as f64)
            }
        })
        .collect();
    let levels = RasterGrid::new(*fri.header(), GridKind::Categorical, cells)?;
    Ok(RiskProduct {
        fri: fri.clone(),
        levels,
        breaks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ahp::EigenResult;
    use crate::indicators::RankedIndicator;
    use crate::raster::GridHeader;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn header(ncols: usize, nrows: usize) -> GridHeader<f64> {
        GridHeader::square(ncols, nrows, 30.0).unwrap()
    }

    fn rank_grid(h: GridHeader<f64>, ranks: Vec<f64>) -> RasterGrid<f64> {
        RasterGrid::new(h, GridKind::Categorical, ranks).unwrap()
    }

    fn zones_of(h: GridHeader<f64>, ids: Vec<f64>) -> ZoneRaster<f64> {
        ZoneRaster::from_grid(RasterGrid::new(h, GridKind::Label, ids).unwrap()).unwrap()
    }

    fn eigen(ws: [f64; 5]) -> EigenResult<f64> {
        EigenResult {
            lambda_max: 5.0,
            weights: ws.to_vec(),
            ci: 0.0,
            cr: 0.0,
        }
    }

    /// Stack with the given slope/dist ranks and constant other layers.
    fn stack_from(
        h: GridHeader<f64>,
        slope: Vec<f64>,
        elev: Vec<f64>,
        dist: Vec<f64>,
        hydro: Vec<f64>,
        lu: Vec<f64>,
    ) -> IndicatorStack<f64> {
        IndicatorStack::new(vec![
            RankedIndicator::new(IndicatorName::Slope, rank_grid(h, slope)).unwrap(),
            RankedIndicator::new(IndicatorName::Elevation, rank_grid(h, elev)).unwrap(),
            RankedIndicator::new(IndicatorName::DistStreams, rank_grid(h, dist)).unwrap(),
            RankedIndicator::new(IndicatorName::HydroLith, rank_grid(h, hydro)).unwrap(),
            RankedIndicator::new(IndicatorName::LandUse, rank_grid(h, lu)).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn zonal_max_single_zone_takes_global_max() {
        let h = header(3, 1);
        let zones = zones_of(h, vec![1.0, 1.0, 1.0]);
        let grid = rank_grid(h, vec![1.0, 3.0, 5.0]);
        let out = zonal_max_grid(&zones, &grid).unwrap();
        assert_eq!(out.cells(), &[5.0, 5.0, 5.0]);
    }

    #[test]
    fn zonal_max_two_zones() {
        let h = header(4, 1);
        let zones = zones_of(h, vec![1.0, 1.0, 2.0, 2.0]);
        let grid = rank_grid(h, vec![2.0, 1.0, 4.0, 3.0]);
        let out = zonal_max_grid(&zones, &grid).unwrap();
        assert_eq!(out.cells(), &[2.0, 2.0, 4.0, 4.0]);
    }

    #[test]
    fn zonal_max_unassigned_passthrough_and_nodata() {
        let h = header(4, 1);
        let zones = zones_of(h, vec![1.0, 1.0, 0.0, 1.0]);
        let mut grid = rank_grid(h, vec![2.0, 5.0, 1.0, -9999.0]);
        grid = grid.with_kind(GridKind::Categorical).unwrap();
        let out = zonal_max_grid(&zones, &grid).unwrap();
        assert_eq!(out.cells(), &[5.0, 5.0, 1.0, -9999.0]);
    }

    #[test]
    fn zonal_max_matches_brute_force_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..200 {
            let (nr, nc) = (rng.gen_range(1..=20), rng.gen_range(1..=20));
            let h = header(nc, nr);
            let n = nr * nc;
            let zone_count = rng.gen_range(1..=6u32);
            let ids: Vec<f64> = (0..n)
                .map(|_| rng.gen_range(0..=zone_count) as f64)
                .collect();
            let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=5) as f64).collect();
            let zones = zones_of(h, ids.clone());
            let grid = rank_grid(h, vals.clone());
            let fast = zonal_max_grid(&zones, &grid).unwrap();

            for i in 0..n {
                let expected = if ids[i] == 0.0 {
                    vals[i]
                } else {
                    (0..n)
                        .filter(|&j| ids[j] == ids[i])
                        .map(|j| vals[j])
                        .fold(f64::MIN, f64::max)
                };
                assert_eq!(fast.cells()[i], expected);
            }
        }
    }

    #[test]
    fn zonal_max_alignment_error() {
        let zones = zones_of(header(2, 1), vec![1.0, 1.0]);
        let grid = rank_grid(header(3, 1), vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            zonal_max_grid(&zones, &grid),
            Err(Error::Alignment(_))
        ));
    }

    #[test]
    fn pixel_fri_is_rank_under_equal_ranks() {
        let h = header(2, 1);
        let stack = stack_from(
            h,
            vec![3.0, 3.0],
            vec![3.0, 3.0],
            vec![3.0, 3.0],
            vec![3.0, 3.0],
            vec![3.0, 3.0],
        );
        let w = eigen([0.214, 0.068, 0.302, 0.100, 0.316]);
        let fri = compute_fri(&stack, &w, ModelVariant::PixelAhp, None, None).unwrap();
        for &v in fri.cells() {
            assert!((v - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constrained_fri_matches_hand_arithmetic() {
        // Raw ranks (S=2,E=5,D=1,H=3,L=1); zone maxima raise S to 4, D to 3.
        let h = header(2, 1);
        let stack = stack_from(
            h,
            vec![2.0, 4.0],
            vec![5.0, 5.0],
            vec![1.0, 3.0],
            vec![3.0, 3.0],
            vec![1.0, 1.0],
        );
        let zones = zones_of(h, vec![1.0, 1.0]);
        let w = eigen([0.214, 0.068, 0.302, 0.100, 0.315]);
        let fri = compute_fri(&stack, &w, ModelVariant::MfdRc, Some(&zones), None).unwrap();
        let expected = 0.214 * 4.0 + 0.068 * 5.0 + 0.302 * 3.0 + 0.100 * 3.0 + 0.315 * 1.0;
        assert!((fri.get(0, 0) - expected).abs() < 1e-12);
        assert!((expected - 2.717).abs() < 1e-12);
    }

    #[test]
    fn missing_zone_raster_is_a_config_error() {
        let h = header(1, 1);
        let stack = stack_from(h, vec![1.0], vec![1.0], vec![1.0], vec![1.0], vec![1.0]);
        let w = eigen([0.2; 5]);
        assert!(matches!(
            compute_fri(&stack, &w, ModelVariant::D8All, None, None),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn singleton_zones_reduce_every_variant_to_pixel() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = header(6, 5);
        let n = 30;
        let rand_ranks =
            |rng: &mut ChaCha8Rng, lo: u8| -> Vec<f64> {
                (0..n).map(|_| rng.gen_range(lo..=5) as f64).collect()
            };
        let stack = stack_from(
            h,
            rand_ranks(&mut rng, 0),
            rand_ranks(&mut rng, 1),
            rand_ranks(&mut rng, 0),
            (0..n).map(|_| [1.0, 3.0, 4.0][rng.gen_range(0..3)]).collect(),
            rand_ranks(&mut rng, 1),
        );
        let singleton = zones_of(h, (1..=n).map(|i| i as f64).collect());
        let w = eigen([0.25, 0.1, 0.3, 0.15, 0.2]);
        let pixel = compute_fri(&stack, &w, ModelVariant::PixelAhp, None, None).unwrap();
        for variant in [ModelVariant::MfdAll, ModelVariant::D8All] {
            let fri =
                compute_fri(&stack, &w, variant, Some(&singleton), Some(&singleton)).unwrap();
            for (a, b) in fri.cells().iter().zip(pixel.cells()) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn classify_uniform_ranks_reproduces_ranks() {
        let h = header(5, 1);
        let fri = RasterGrid::new(h, GridKind::Continuous, vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let product = classify_fri(&fri).unwrap();
        assert_eq!(product.levels.cells(), fri.cells());
        assert_eq!(product.breaks, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn classify_constant_fri_errors_with_count() {
        let h = header(4, 1);
        let fri = RasterGrid::new(h, GridKind::Continuous, vec![2.0; 4]).unwrap();
        match classify_fri(&fri) {
            Err(Error::Classification(msg)) => assert!(msg.contains("found 1"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn class_means_strictly_increase() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let h = header(16, 16);
        let cells: Vec<f64> = (0..256)
            .map(|i| {
                let base = (i % 16) as f64 * 0.3;
                base + rng.gen_range(0.0..0.25)
            })
            .collect();
        let fri = RasterGrid::new(h, GridKind::Continuous, cells).unwrap();
        let product = classify_fri(&fri).unwrap();
        let mut sums = [(0.0f64, 0usize); 5];
        for i in 0..256 {
            let class = product.levels.cells()[i] as usize - 1;
            sums[class].0 += product.fri.cells()[i];
            sums[class].1 += 1;
        }
        let means: Vec<f64> = sums
            .iter()
            .filter(|&&(_, count)| count > 0)
            .map(|&(sum, count)| sum / count as f64)
            .collect();
        assert!(means.windows(2).all(|w| w[0] < w[1]), "{means:?}");
    }

    #[test]
    fn fri_monotone_in_any_single_rank() {
        // Raising one indicator's rank at a cell cannot lower its FRI.
        let h = header(1, 1);
        let base = stack_from(h, vec![2.0], vec![3.0], vec![2.0], vec![3.0], vec![2.0]);
        let raised = stack_from(h, vec![3.0], vec![3.0], vec![2.0], vec![3.0], vec![2.0]);
        let w = eigen([0.214, 0.068, 0.302, 0.100, 0.315]);
        let lo = compute_fri(&base, &w, ModelVariant::PixelAhp, None, None).unwrap();
        let hi = compute_fri(&raised, &w, ModelVariant::PixelAhp, None, None).unwrap();
        assert!(hi.get(0, 0) >= lo.get(0, 0));
    }
}
