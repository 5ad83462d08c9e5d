use std::f64::consts::PI;

use glam::DVec3;
use web_time::Instant;

use super::{ms_since, PipelineConfig, VolumeBasis};
use crate::exec;
use crate::grid::{CascadeSet, CoefficientGrid};
use crate::render::{GBuffer, Rsm};

/// Adds one cosine lobe per lit RSM texel to every cascade containing it.
/// Each lobe is scaled by the texel flux and `1 / (π · cell²)`, which turns
/// the cell's intensity into irradiance at gather time.
///
/// Returns the wall-clock time spent per cascade.
pub fn inject_light(rsm: &Rsm, cascades: &mut CascadeSet, basis: &VolumeBasis, config: &PipelineConfig) -> Vec<f64> {
    let lit: Vec<usize> = (0..rsm.flux.len())
        .filter(|&i| rsm.flux[i] != DVec3::ZERO)
        .collect();
    let mut times = Vec::with_capacity(cascades.cascade_count());
    for grid in &mut cascades.light {
        let start = Instant::now();
        let geom = *grid.geometry();
        let offset = if config.half_cell_offset { 0.5 * geom.cell_size } else { 0.0 };
        let weight = 1.0 / (PI * geom.cell_size * geom.cell_size);
        let vpls = exec::map_range(lit.len(), |j| {
            let i = lit[j];
            let p = rsm.position[i] + rsm.normal[i] * offset;
            geom.world_to_cell(p)
                .map(|cell| (cell, basis.lobe(rsm.normal[i]), rsm.flux[i] * weight))
        });
        // Serial accumulation in texel order keeps the sums independent of
        // the thread count.
        for (cell, lobe, flux) in vpls.into_iter().flatten() {
            add_lobe(grid, cell, &lobe, flux);
        }
        times.push(ms_since(start));
    }
    times
}

fn add_lobe(grid: &mut CoefficientGrid, cell: [usize; 3], lobe: &[f32], rgb: DVec3) {
    let cell = cell.map(|c| c as i64);
    let mut delta = vec![0f32; lobe.len()];
    for (ch, scale) in rgb.to_array().into_iter().enumerate() {
        if scale == 0.0 {
            continue;
        }
        for (d, l) in delta.iter_mut().zip(lobe) {
            *d = (*l as f64 * scale) as f32;
        }
        grid.accumulate(cell, ch, &delta).expect("cell comes from world_to_cell");
    }
}

/// Surface sample used for geometry injection.
struct Occluder {
    position: DVec3,
    normal: DVec3,
    area: f64,
}

fn rsm_occluders(rsm: &Rsm) -> Vec<Occluder> {
    (0..rsm.depth.len())
        .filter(|&i| rsm.is_hit(i))
        .map(|i| Occluder {
            position: rsm.position[i],
            normal: rsm.normal[i],
            area: rsm.texel_area(i),
        })
        .collect()
}

fn gbuffer_occluders(g: &GBuffer) -> Vec<Occluder> {
    (0..g.len())
        .filter(|&i| g.hit[i])
        .map(|i| Occluder {
            position: g.position[i],
            normal: g.normal[i],
            area: g.pixel_area(i),
        })
        .collect()
}

/// Fills the geometry cascades with blocking lobes from surface samples.
///
/// Within one source a cell accumulates `area / cell²` times the cosine lobe
/// about the sample normal; that total is scaled down so its blocking weight
/// never exceeds 1. Across sources the cell keeps whichever source reports
/// the larger capped weight, so a surface seen by both the light and the
/// camera is not counted twice.
pub fn inject_geometry(
    rsm: Option<&Rsm>,
    gbuffer: Option<&GBuffer>,
    cascades: &mut CascadeSet,
    basis: &VolumeBasis,
) -> Vec<f64> {
    let sources: Vec<Vec<Occluder>> = [rsm.map(rsm_occluders), gbuffer.map(gbuffer_occluders)]
        .into_iter()
        .flatten()
        .collect();
    let m = basis.coefficient_count();
    let mut times = Vec::with_capacity(cascades.cascade_count());
    for grid in &mut cascades.geometry {
        let start = Instant::now();
        let geom = *grid.geometry();
        let cells = geom.cells.pow(3);
        let inv_area = 1.0 / (geom.cell_size * geom.cell_size);
        // Best capped weight so far and its lobe, per cell.
        let mut best_weight = vec![0f64; cells];
        let mut best_lobe = vec![0f64; cells * m];
        for samples in &sources {
            let lobes = exec::map_range(samples.len(), |j| {
                let s = &samples[j];
                geom.world_to_cell(s.position)
                    .map(|cell| (grid.cell_index(cell), basis.lobe(s.normal), s.area * inv_area))
            });
            let mut weight = vec![0f64; cells];
            let mut lobe_sum = vec![0f64; cells * m];
            for (idx, lobe, w) in lobes.into_iter().flatten() {
                weight[idx] += w;
                for (acc, l) in lobe_sum[idx * m..(idx + 1) * m].iter_mut().zip(&lobe) {
                    *acc += w * *l as f64;
                }
            }
            for idx in 0..cells {
                let w = weight[idx];
                if w <= 0.0 {
                    continue;
                }
                let capped = w.min(1.0);
                if capped > best_weight[idx] {
                    best_weight[idx] = capped;
                    let scale = capped / w;
                    for (b, s) in best_lobe[idx * m..(idx + 1) * m].iter_mut().zip(&lobe_sum[idx * m..(idx + 1) * m]) {
                        *b = s * scale;
                    }
                }
            }
        }
        let n = geom.cells;
        let mut delta = vec![0f32; m];
        for idx in 0..cells {
            if best_weight[idx] == 0.0 {
                continue;
            }
            for (d, b) in delta.iter_mut().zip(&best_lobe[idx * m..(idx + 1) * m]) {
                *d = *b as f32;
            }
            let cell = [(idx % n) as i64, ((idx / n) % n) as i64, (idx / (n * n)) as i64];
            grid.accumulate(cell, 0, &delta).expect("index within grid");
        }
        times.push(ms_since(start));
    }
    times
}
