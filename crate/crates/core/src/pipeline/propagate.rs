use std::sync::OnceLock;

use glam::{DVec3, IVec3, Vec3};
use web_time::Instant;

use super::{ms_since, FaceWeight, PipelineConfig, VolumeBasis};
use crate::exec;
use crate::grid::{CascadeSet, CoefficientGrid};

/// +x, −x, +y, −y, +z, −z.
pub const AXES: [IVec3; 6] = [IVec3::X, IVec3::NEG_X, IVec3::Y, IVec3::NEG_Y, IVec3::Z, IVec3::NEG_Z];

/// Grid resolution per face edge for the solid-angle quadrature.
const FACE_QUADRATURE: usize = 320;

/// Light leaving a source cell along `axis` toward one face of the neighbor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transfer {
    /// Index into [`AXES`] of the step from source to destination.
    pub axis: usize,
    /// Index into [`AXES`] of the destination face's outward normal.
    pub face: usize,
    /// Unit direction from the source center to the face center.
    pub direction: Vec3,
    /// Solid angle of the face seen from the source center.
    pub solid_angle: f64,
}

/// Solid angle of the neighbor face `face` (outward normal) of the cell one
/// step along `axis`, seen from the source cell center; unit cells.
///
/// Midpoint rule over the face of `cos θ / r²`.
pub fn face_solid_angle(axis: IVec3, face: IVec3) -> f64 {
    let a = axis.as_dvec3();
    let f = face.as_dvec3();
    let center = a + 0.5 * f;
    // Two unit vectors spanning the face.
    let u = if f.x != 0.0 { DVec3::Y } else { DVec3::X };
    let v = f.cross(u);
    let n = FACE_QUADRATURE;
    let h = 1.0 / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let p = center + u * ((i as f64 + 0.5) * h - 0.5) + v * ((j as f64 + 0.5) * h - 0.5);
            let r2 = p.length_squared();
            sum += p.dot(f).abs() / (r2 * r2.sqrt());
        }
    }
    sum * h * h
}

/// The 30 transfers, grouped by source axis (5 per axis).
pub fn transfers() -> &'static [Transfer; 30] {
    static TABLE: OnceLock<[Transfer; 30]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let front = face_solid_angle(IVec3::X, IVec3::X);
        let side = face_solid_angle(IVec3::X, IVec3::Y);
        let mut out = [Transfer {
            axis: 0,
            face: 0,
            direction: Vec3::ZERO,
            solid_angle: 0.0,
        }; 30];
        let mut k = 0;
        for (ai, a) in AXES.iter().enumerate() {
            for (fi, f) in AXES.iter().enumerate() {
                if *f == -*a {
                    continue;
                }
                let d = a.as_dvec3() + 0.5 * f.as_dvec3();
                out[k] = Transfer {
                    axis: ai,
                    face: fi,
                    direction: d.normalize().as_vec3(),
                    solid_angle: if f == a { front } else { side },
                };
                k += 1;
            }
        }
        out
    })
}

/// Iterates light propagation in every light cascade. Each cascade ends up
/// holding its injection plus the output of every iteration.
///
/// Returns the wall-clock time spent per cascade.
pub fn propagate(cascades: &mut CascadeSet, basis: &VolumeBasis, config: &PipelineConfig) -> Vec<f64> {
    let mut times = Vec::with_capacity(cascades.cascade_count());
    for k in 0..cascades.cascade_count() {
        let start = Instant::now();
        let geometry = config.indirect_shadows.then(|| &cascades.geometry[k]);
        let mut src = cascades.light[k].clone();
        let mut dst = src.clone();
        for _ in 0..config.iterations {
            step(&src, geometry, &mut dst, basis, config.clamp_negative, config.face_weight);
            cascades.light[k].add_assign(&dst);
            std::mem::swap(&mut src, &mut dst);
        }
        times.push(ms_since(start));
    }
    times
}

/// One propagation iteration, `src → dst`. Each destination cell gathers
/// from its six neighbors, so writes are disjoint.
///
/// Basis functions are evaluated per cell and direction through the kernel
/// table, the way a shader would, rather than hoisted out of the cell loop.
fn step(
    src: &CoefficientGrid,
    geometry: Option<&CoefficientGrid>,
    dst: &mut CoefficientGrid,
    basis: &VolumeBasis,
    clamp: bool,
    weight: FaceWeight,
) {
    let n = src.dims();
    let m = src.coeff_count();
    let stride = src.cell_stride();
    let spec = basis.spec();
    let table = transfers();
    let src_data = src.data();
    let geo_data = geometry.map(CoefficientGrid::data);
    let half = matches!(dst.precision(), crate::grid::Precision::Half);
    let norm = 1.0 / weight.divisor();

    exec::for_each_chunk_mut(dst.data_mut(), n * n * stride, |z, slab| {
        let mut bv = vec![0f32; m];
        let mut occ_bv = vec![0f32; m];
        let mut g_mid = vec![0f32; m];
        for y in 0..n {
            for x in 0..n {
                let out = &mut slab[(y * n + x) * stride..(y * n + x + 1) * stride];
                out.fill(0.0);
                for (ai, a) in AXES.iter().enumerate() {
                    let (sx, sy, sz) = (x as i32 - a.x, y as i32 - a.y, z as i32 - a.z);
                    if sx < 0 || sy < 0 || sz < 0 || sx >= n as i32 || sy >= n as i32 || sz >= n as i32 {
                        continue;
                    }
                    let src_index = ((sz as usize * n + sy as usize) * n) + sx as usize;
                    let s = &src_data[src_index * stride..(src_index + 1) * stride];
                    if let Some(g) = geo_data {
                        face_geometry(g, n, m, [x, y, z], *a, &mut g_mid);
                    }
                    for t in &table[ai * 5..ai * 5 + 5] {
                        spec.basis_values_f32(t.direction, &mut bv);
                        let occlusion = if geo_data.is_some() {
                            // Surfaces facing against the flow block it.
                            spec.basis_values_f32(-t.direction, &mut occ_bv);
                            let b: f32 = occ_bv.iter().zip(&g_mid).map(|(u, v)| u * v).sum();
                            1.0 - b.clamp(0.0, 1.0)
                        } else {
                            1.0
                        };
                        let k = (occlusion as f64 * t.solid_angle * norm) as f32;
                        let lobe = basis.axis_lobe(t.face);
                        for ch in 0..3 {
                            let sc = &s[ch * m..(ch + 1) * m];
                            let mut intensity: f32 = bv.iter().zip(sc).map(|(u, v)| u * v).sum();
                            if clamp {
                                intensity = intensity.max(0.0);
                            }
                            let scale = intensity * k;
                            for (o, l) in out[ch * m..(ch + 1) * m].iter_mut().zip(lobe) {
                                *o += l * scale;
                            }
                        }
                    }
                }
                if half {
                    for v in out.iter_mut() {
                        *v = half::f16::from_f32(*v).to_f32();
                    }
                }
            }
        }
    });
}

/// Trilinear sample of the half-shifted geometry grid at the center of the
/// face that `dst` shares with the neighbor one step back along `axis`:
/// the mean of the four geometry cells on that face's corners.
/// The loop visits the face-normal layer twice, hence 1/8 per visit.
fn face_geometry(g: &[f32], n: usize, m: usize, dst: [usize; 3], axis: IVec3, out: &mut [f32]) {
    let axis = axis.to_array();
    let mut lo = [0usize; 3];
    let mut hi = [0usize; 3];
    for c in 0..3 {
        if axis[c] == 0 {
            lo[c] = dst[c];
            hi[c] = (dst[c] + 1).min(n - 1);
        } else {
            // Geometry cell g sits on the light-cell corner g.
            let face = dst[c] + usize::from(axis[c] < 0);
            lo[c] = face;
            hi[c] = face;
        }
    }
    out.fill(0.0);
    for z in [lo[2], hi[2]] {
        for y in [lo[1], hi[1]] {
            for x in [lo[0], hi[0]] {
                let i = (z * n + y) * n + x;
                for (o, v) in out.iter_mut().zip(&g[i * m..(i + 1) * m]) {
                    *o += 0.125 * v;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solid_angles_match_rectangle_formula() {
        // Centered 1×1 rectangle at distance h: 4·asin(1 / (1 + 4h²)).
        let front = 4.0 * (1.0f64 / (1.0 + 4.0 * 1.5 * 1.5)).asin();
        let contact = 4.0 * (1.0f64 / (1.0 + 4.0 * 0.5 * 0.5)).asin();
        assert!((face_solid_angle(IVec3::X, IVec3::X) - front).abs() < 1e-5);
        // Rays through the contact face leave through the front or one of
        // the four side faces.
        let side = (contact - front) / 4.0;
        for f in [IVec3::Y, IVec3::NEG_Y, IVec3::Z, IVec3::NEG_Z] {
            assert!((face_solid_angle(IVec3::X, f) - side).abs() < 1e-5);
        }
        assert!((face_solid_angle(IVec3::NEG_Z, IVec3::X) - side).abs() < 1e-5);
        assert!((front - 0.4006).abs() < 1e-4);
        assert!((side - 0.4234).abs() < 1e-4);
    }

    #[test]
    fn transfer_table() {
        let t = transfers();
        for tr in t.iter() {
            assert_ne!(AXES[tr.face], -AXES[tr.axis]);
            assert!((tr.direction.length() - 1.0).abs() < 1e-6);
            let d = AXES[tr.axis].as_vec3() + 0.5 * AXES[tr.face].as_vec3();
            assert!((tr.direction - d.normalize()).length() < 1e-6);
        }
        assert_eq!(t.iter().filter(|tr| tr.axis == tr.face).count(), 6);
    }

    #[test]
    fn face_geometry_reads_the_four_corner_cells() {
        let n = 4;
        let mut g = vec![0f32; n * n * n];
        // Geometry cell (2, 1, 1) is the light-cell corner (2, 1, 1).
        g[(n + 1) * n + 2] = 1.0;
        let mut out = [0f32];
        // Face between light cells (1,1,1) and (2,1,1) has corners x = 2,
        // y and z in {1, 2}.
        face_geometry(&g, n, 1, [2, 1, 1], IVec3::X, &mut out);
        assert_eq!(out[0], 0.25);
        face_geometry(&g, n, 1, [1, 1, 1], IVec3::NEG_X, &mut out);
        assert_eq!(out[0], 0.25);
        face_geometry(&g, n, 1, [1, 0, 0], IVec3::NEG_X, &mut out);
        assert_eq!(out[0], 0.25);
        face_geometry(&g, n, 1, [3, 1, 1], IVec3::X, &mut out);
        assert_eq!(out[0], 0.0);
        g.fill(1.0);
        face_geometry(&g, n, 1, [3, 3, 3], IVec3::Z, &mut out);
        assert_eq!(out[0], 1.0);
    }
}
