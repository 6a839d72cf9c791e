//! Raster analytics for AHP-based flood risk estimation.
//!
//! The pipeline mirrors the usual GIS workflow end to end: derive terrain
//! products from a DEM (slope, filled surface, D8 directions, accumulation,
//! streams with levels, distances, and two sub-watershed delineations),
//! rank the five criteria layers, weight them from pairwise judgment
//! matrices with a consistency gate, optionally constrain criteria by
//! sub-watershed zonal maxima, slice the resulting index into five classes
//! by natural breaks, and score the map against a flood truth mask.
//!
//! All numeric kernels are generic over [`Scalar`]; the aliases below pin
//! the `f64` instantiations the CLI and tests use.

pub mod ahp;
pub mod ascii;
pub mod error;
pub mod indicators;
pub mod jenks;
pub mod raster;
pub mod risk;
pub mod scalar;
pub mod synth;
pub mod terrain;
pub mod validation;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default working precision.
pub type Value = f64;
/// Grid of [`Value`] cells.
pub type Grid = raster::RasterGrid<Value>;
pub type Header = raster::GridHeader<Value>;
pub type FlowDir = terrain::FlowDirGrid<Value>;
pub type Streams = terrain::StreamNetwork<Value>;
pub type Zones = terrain::ZoneRaster<Value>;
pub type Indicator = indicators::RankedIndicator<Value>;
pub type Stack = indicators::IndicatorStack<Value>;
pub type Judgment = ahp::JudgmentMatrix<Value>;
pub type Eigen = ahp::EigenResult<Value>;
pub type Risk = risk::RiskProduct<Value>;
pub type Scores = validation::ValidationScores<Value>;
pub type Scene = synth::SyntheticScene<Value>;
