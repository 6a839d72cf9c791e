//! Sub-watershed delineation.
//!
//! Two semantics are provided: D8 zones group cells that flow out through
//! the same stream link (outlet-based), while MFD zones group cells that
//! send the largest share of multiple-flow-direction mass into the same
//! sink of the *unfilled* DEM (sink-based).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::raster::{require_aligned, RasterGrid, NEIGHBOR_OFFSETS};
use crate::scalar::Scalar;
use crate::terrain::flow::FlowDirGrid;
use crate::terrain::streams::StreamNetwork;
use crate::terrain::ZoneRaster;

/// Split the stream network into links at junctions and label every cell by
/// the link its D8 path first reaches.
///
/// Link ids are assigned in row-major discovery order. Cells whose path
/// leaves the grid without touching a stream (small boundary drainages) are
/// grouped per terminal outlet cell, with fresh ids after the link ids, so
/// the result always partitions the data cells.
pub fn delineate_d8<T: Scalar>(
    dirs: &FlowDirGrid<T>,
    network: &StreamNetwork<T>,
) -> Result<ZoneRaster<T>> {
    require_aligned(
        dirs.as_grid().header(),
        network.mask().header(),
        "flow dirs vs stream network",
    )?;
    if network.is_empty() {
        return Err(Error::Delineation("stream network is empty".to_string()));
    }

    let grid = dirs.as_grid();
    let n = grid.cells().len();
    let stream: Vec<bool> = (0..n).map(|i| network.is_stream_at(i)).collect();

    // Stream-to-stream donor counts decide where links start: at sources
    // (no donors) and immediately below junctions (two or more donors).
    let mut stream_donors = vec![0u8; n];
    for i in 0..n {
        if !stream[i] {
            continue;
        }
        if let Some(j) = dirs.downstream_idx(i) {
            if stream[j] {
                stream_donors[j] = stream_donors[j].saturating_add(1);
            }
        }
    }

    let mut link = vec![0u32; n];
    let mut next_id = 0u32;
    for i in 0..n {
        if !stream[i] || link[i] != 0 || stream_donors[i] == 1 {
            continue;
        }
        next_id += 1;
        let mut cur = i;
        loop {
            link[cur] = next_id;
            let Some(j) = dirs.downstream_idx(cur) else {
                break;
            };
            if !stream[j] || stream_donors[j] != 1 || link[j] != 0 {
                break;
            }
            cur = j;
        }
    }
    let link_count = next_id;

    // Resolve each hillslope cell to the first stream link on its path, or
    // to its terminal outlet cell when the path never meets a stream.
    #[derive(Clone, Copy, PartialEq)]
    enum Target {
        Unknown,
        Link(u32),
        Outlet(usize),
    }
    let mut target = vec![Target::Unknown; n];
    for i in 0..n {
        if grid.value_at(i).is_none() || stream[i] || target[i] != Target::Unknown {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = i;
        let found = loop {
            if stream[cur] {
                break Target::Link(link[cur]);
            }
            match target[cur] {
                Target::Unknown => {}
                known => break known,
            }
            path.push(cur);
            if path.len() > n {
                return Err(Error::Routing(
                    "cycle in flow directions during delineation".to_string(),
                ));
            }
            match dirs.downstream_idx(cur) {
                Some(j) if grid.value_at(j).is_some() => cur = j,
                _ => break Target::Outlet(cur),
            }
        };
        for p in path {
            target[p] = found;
        }
    }

    // Non-stream terminal outlets get ids after the links, in row-major
    // order of the outlet cell.
    let mut outlet_ids: BTreeMap<usize, u32> = BTreeMap::new();
    for t in &target {
        if let Target::Outlet(o) = t {
            outlet_ids.entry(*o).or_insert(0);
        }
    }
    let mut next = link_count;
    for id in outlet_ids.values_mut() {
        next += 1;
        *id = next;
    }

    let mut zones = vec![0u32; n];
    for i in 0..n {
        if grid.value_at(i).is_none() {
            continue;
        }
        zones[i] = if stream[i] {
            link[i]
        } else {
            match target[i] {
                Target::Link(id) => id,
                Target::Outlet(o) => outlet_ids[&o],
                Target::Unknown => unreachable!("all data cells resolved"),
            }
        };
    }
    ZoneRaster::from_labels(grid, &zones)
}

/// MFD sink basins together with the total mass routed into each sink.
#[derive(Debug, Clone)]
pub struct MfdBasins<T> {
    pub zones: ZoneRaster<T>,
    /// Mass retained by each sink region, indexed by `zone id - 1`. One unit
    /// of mass starts on every data cell, so the total equals the data cell
    /// count.
    pub sink_mass: Vec<f64>,
    pub data_cells: usize,
}

/// Sink-basin labelling of the unfilled DEM by largest MFD-8 mass share.
///
/// Sinks are cells with no strictly lower 8-neighbour; 8-adjacent sink cells
/// of equal elevation merge into one sink region (flat bottoms). Each cell
/// distributes mass to all strictly lower neighbours in proportion to
/// drop/distance and is assigned the sink receiving the largest share of its
/// own unit mass, ties to the smallest sink id.
pub fn mfd_basins<T: Scalar>(dem: &RasterGrid<T>) -> MfdBasins<T> {
    let (nrows, ncols) = (dem.nrows(), dem.ncols());
    let n = nrows * ncols;

    let lower_neighbors = |i: usize| -> Vec<(usize, f64)> {
        let (row, col) = (i / ncols, i % ncols);
        let Some(z0) = dem.value(row, col) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for &(dr, dc) in NEIGHBOR_OFFSETS.iter() {
            let (r, c_) = (row as isize + dr, col as isize + dc);
            if r < 0 || c_ < 0 || r >= nrows as isize || c_ >= ncols as isize {
                continue;
            }
            let j = r as usize * ncols + c_ as usize;
            let Some(zn) = dem.value(r as usize, c_ as usize) else {
                continue;
            };
            if zn < z0 {
                let drop = (z0 - zn).to_f64().unwrap();
                let dist = if dr != 0 && dc != 0 {
                    std::f64::consts::SQRT_2
                } else {
                    1.0
                };
                out.push((j, drop / dist));
            }
        }
        out
    };

    // Sink cells and merged sink regions.
    let is_sink: Vec<bool> = (0..n)
        .map(|i| dem.value_at(i).is_some() && lower_neighbors(i).is_empty())
        .collect();
    let mut region = vec![0u32; n];
    let mut region_count = 0u32;
    for i in 0..n {
        if !is_sink[i] || region[i] != 0 {
            continue;
        }
        region_count += 1;
        let mut stack = vec![i];
        region[i] = region_count;
        while let Some(p) = stack.pop() {
            let (row, col) = (p / ncols, p % ncols);
            let zp = dem.get(row, col);
            for (r, c_) in dem.neighbors8(row, col) {
                let q = r * ncols + c_;
                if is_sink[q] && region[q] == 0 && dem.get(r, c_) == zp {
                    region[q] = region_count;
                    stack.push(q);
                }
            }
        }
    }

    // Rank data cells by elevation, ties by index for determinism. Flow is
    // strictly downhill, so descending order is topological.
    let mut by_elevation: Vec<usize> = (0..n).filter(|&i| dem.value_at(i).is_some()).collect();
    by_elevation.sort_by(|&a, &b| {
        dem.cells()[a]
            .partial_cmp(&dem.cells()[b])
            .unwrap()
            .then(a.cmp(&b))
    });
    let data_cells = by_elevation.len();

    // Pass 1, downhill: route one unit of mass per cell into the sinks.
    let mut mass = vec![0.0f64; n];
    for &i in &by_elevation {
        mass[i] += 1.0;
    }
    let mut sink_mass = vec![0.0f64; region_count as usize];
    for &i in by_elevation.iter().rev() {
        let lowers = lower_neighbors(i);
        if lowers.is_empty() {
            sink_mass[(region[i] - 1) as usize] += mass[i];
            continue;
        }
        let total: f64 = lowers.iter().map(|&(_, w)| w).sum();
        let m = mass[i];
        for (j, w) in lowers {
            mass[j] += m * w / total;
        }
    }

    // Pass 2, uphill: per-cell share of its own mass per sink region; the
    // argmax (smallest id on ties) is the cell's zone.
    let mut share: Vec<BTreeMap<u32, f64>> = vec![BTreeMap::new(); n];
    let mut zones = vec![0u32; n];
    for &i in &by_elevation {
        if is_sink[i] {
            share[i].insert(region[i], 1.0);
            zones[i] = region[i];
            continue;
        }
        let lowers = lower_neighbors(i);
        let total: f64 = lowers.iter().map(|&(_, w)| w).sum();
        let mut mine = BTreeMap::new();
        for (j, w) in lowers {
            let f = w / total;
            for (&sink, &s) in &share[j] {
                *mine.entry(sink).or_insert(0.0) += f * s;
            }
        }
        let mut best_id = 0u32;
        let mut best_share = f64::NEG_INFINITY;
        for (&sink, &s) in &mine {
            if s > best_share {
                best_share = s;
                best_id = sink;
            }
        }
        zones[i] = best_id;
        share[i] = mine;
    }

    let zones = ZoneRaster::from_labels(dem, &zones).expect("zone labels valid");
    MfdBasins {
        zones,
        sink_mass,
        data_cells,
    }
}

/// Sub-watersheds of the unfilled DEM under MFD sink semantics; see
/// [`mfd_basins`] for the mass bookkeeping.
pub fn delineate_mfd<T: Scalar>(dem: &RasterGrid<T>) -> ZoneRaster<T> {
    mfd_basins(dem).zones
}
