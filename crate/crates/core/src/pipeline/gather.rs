use glam::DVec3;
use web_time::Instant;

use super::{ms_since, GatherDirection, PipelineConfig, VolumeBasis};
use crate::exec;
use crate::grid::CascadeSet;
use crate::render::{GBuffer, Image};

/// Volume value at `p` in direction `dir`, per channel. Reads the finest
/// cascade containing `p`, blended toward the next coarser one near its
/// faces; zero outside every cascade.
pub fn gather_point(cascades: &CascadeSet, basis: &VolumeBasis, p: DVec3, dir: DVec3, clamp: bool) -> DVec3 {
    let Some(k) = cascades.finest_containing(p) else {
        return DVec3::ZERO;
    };
    let m = basis.coefficient_count();
    let mut bv = vec![0f32; m];
    basis.spec().basis_values_f32(dir.as_vec3(), &mut bv);
    let mut coeffs = vec![0f32; m];
    let eval = |k: usize, coeffs: &mut [f32]| -> DVec3 {
        let grid = &cascades.light[k];
        let mut out = [0.0; 3];
        for (ch, o) in out.iter_mut().enumerate() {
            grid.sample_trilinear_unchecked(p, ch, coeffs);
            let v: f32 = bv.iter().zip(coeffs.iter()).map(|(a, b)| a * b).sum();
            *o = if clamp { v.max(0.0) } else { v } as f64;
        }
        DVec3::from(out)
    };
    let fine = eval(k, &mut coeffs);
    let last = cascades.cascade_count() - 1;
    let w = if k == last { 1.0 } else { cascades.light[k].geometry().blend_weight(p) };
    if w >= 1.0 {
        return fine;
    }
    let coarse = eval(k + 1, &mut coeffs);
    fine * w + coarse * (1.0 - w)
}

/// Per-pixel indirect irradiance (the light buffer) and its wall-clock time.
pub fn gather(gbuffer: &GBuffer, cascades: &CascadeSet, basis: &VolumeBasis, config: &PipelineConfig) -> (Image, f64) {
    let start = Instant::now();
    let (w, h) = (gbuffer.width(), gbuffer.height());
    let sign = match config.gather_direction {
        GatherDirection::Incoming => -1.0,
        GatherDirection::Outgoing => 1.0,
    };
    let rows = exec::map_range(h, |y| {
        (0..w)
            .map(|x| {
                let i = y * w + x;
                if !gbuffer.hit[i] {
                    return [0.0; 3];
                }
                let dir = gbuffer.normal[i] * sign;
                gather_point(cascades, basis, gbuffer.position[i], dir, config.clamp_negative).to_array()
            })
            .collect::<Vec<_>>()
    });
    let img = Image::from_pixels(w, h, rows.into_iter().flatten().collect()).expect("sizes agree");
    (img, ms_since(start))
}
