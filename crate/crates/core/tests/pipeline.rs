use std::f64::consts::PI;

use glam::DVec3;
use lpv_core::basis::quadrature::fibonacci_sphere;
use lpv_core::basis::{BasisKind, EvalMode};
use lpv_core::grid::{CascadeConfig, CascadeSet, Precision};
use lpv_core::pipeline::{
    gather, gather_point, inject_geometry, inject_light, propagate, render_frame, volume_energy, Pipeline,
    PipelineConfig, VolumeBasis,
};
use lpv_core::render::{atrium_mini, render_gbuffer, render_rsm, Camera, Material, Rsm, Scene, SpotLight};

fn small_config(kind: BasisKind) -> PipelineConfig {
    PipelineConfig {
        basis: kind,
        half_cell_offset: false,
        cascades: CascadeConfig {
            cell_count: 8,
            extents: vec![8.0, 16.0],
            anchor: [0.0; 3],
            precision: Precision::Full,
        },
        ..PipelineConfig::default()
    }
}

fn setup(kind: BasisKind) -> (PipelineConfig, VolumeBasis, CascadeSet) {
    let cfg = small_config(kind);
    let basis = VolumeBasis::from_config(&cfg).unwrap();
    let set = CascadeSet::new(cfg.cascades.clone(), basis.coefficient_count()).unwrap();
    (cfg, basis, set)
}

/// An RSM whose texels are given directly.
fn rsm_from(texels: &[(DVec3, DVec3, DVec3)]) -> Rsm {
    let n = texels.len();
    Rsm {
        frustum: SpotLight::default().frustum(1).unwrap(),
        depth: vec![1.0; n],
        position: texels.iter().map(|t| t.0).collect(),
        normal: texels.iter().map(|t| t.1).collect(),
        flux: texels.iter().map(|t| t.2).collect(),
        texel_solid_angle: 1e-4,
    }
}

fn all_zero(set: &CascadeSet) -> bool {
    set.light.iter().all(|g| g.data().iter().all(|v| *v == 0.0))
}

fn eval(basis: &VolumeBasis, coeffs: &[f32], dir: DVec3) -> f64 {
    let c: Vec<f64> = coeffs.iter().map(|v| *v as f64).collect();
    basis.spec().evaluate(&c, dir, EvalMode::Exact).unwrap()
}

/// Numeric projection of `max(cos θ, 0)` about +z onto (Y00, Y1-1, Y10, Y11).
fn sh2_cosine_oracle() -> [f64; 4] {
    let (nt, np) = (600, 1200);
    let y0 = 0.5 * (1.0 / PI).sqrt();
    let y1 = (3.0 / (4.0 * PI)).sqrt();
    let mut c = [0.0; 4];
    for i in 0..nt {
        let theta = (i as f64 + 0.5) * PI / nt as f64;
        for j in 0..np {
            let phi = (j as f64 + 0.5) * 2.0 * PI / np as f64;
            let d = DVec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
            let w = theta.sin() * (PI / nt as f64) * (2.0 * PI / np as f64) * d.z.max(0.0);
            c[0] += w * y0;
            c[1] += w * y1 * d.y;
            c[2] += w * y1 * d.z;
            c[3] += w * y1 * d.x;
        }
    }
    c
}

fn low_res_camera() -> Camera {
    Camera {
        width: 96,
        height: 54,
        ..Camera::default()
    }
}

fn low_res(kind: BasisKind) -> PipelineConfig {
    PipelineConfig {
        basis: kind,
        rsm_resolution: 48,
        threads: 1,
        ..PipelineConfig::default()
    }
}

#[test]
fn zero_flux_rsm_leaves_cascades_unchanged() {
    let (cfg, basis, mut set) = setup(BasisKind::Sh2);
    let rsm = rsm_from(&[(DVec3::new(0.3, 0.2, 0.1), DVec3::Z, DVec3::ZERO)]);
    inject_light(&rsm, &mut set, &basis, &cfg);
    assert!(all_zero(&set));
}

#[test]
fn single_texel_injection_matches_hand_composed_lobe() {
    let p = DVec3::new(0.3, 0.2, 0.1);
    let oracle = sh2_cosine_oracle();
    for kind in [BasisKind::Sh2, BasisKind::Srbf8v2] {
        let (cfg, basis, mut set) = setup(kind);
        inject_light(&rsm_from(&[(p, DVec3::Z, DVec3::X)]), &mut set, &basis, &cfg);
        for grid in &set.light {
            let geom = *grid.geometry();
            let cell = geom.world_to_cell(p).unwrap();
            let weight = 1.0 / (PI * geom.cell_size * geom.cell_size);
            let expected: Vec<f64> = if kind == BasisKind::Sh2 {
                oracle.iter().map(|c| c * weight).collect()
            } else {
                let lobe = basis.spec().clamped_cosine_lobe(DVec3::Z, EvalMode::Table).unwrap();
                lobe.values().iter().map(|c| c * weight).collect()
            };
            let red = grid.get(cell, 0);
            for (a, b) in red.iter().zip(&expected) {
                assert!((*a as f64 - b).abs() <= 1e-5 * weight, "{kind}: {a} vs {b}");
            }
            assert!(grid.get(cell, 1).iter().chain(grid.get(cell, 2)).all(|v| *v == 0.0));
            let nonzero = grid
                .data()
                .chunks_exact(grid.cell_stride())
                .filter(|c| c.iter().any(|v| *v != 0.0))
                .count();
            assert_eq!(nonzero, 1);
        }
    }
}

#[test]
fn two_texels_in_one_cell_add() {
    let a = (DVec3::new(0.3, 0.2, 0.1), DVec3::Z, DVec3::new(1.0, 0.5, 0.0));
    let b = (DVec3::new(0.6, 0.7, 0.4), DVec3::new(0.0, 0.6, 0.8), DVec3::new(0.2, 0.0, 2.0));
    let (cfg, basis, mut sa) = setup(BasisKind::Srbf8v2);
    let mut sb = sa.clone();
    let mut both = sa.clone();
    inject_light(&rsm_from(&[a]), &mut sa, &basis, &cfg);
    inject_light(&rsm_from(&[b]), &mut sb, &basis, &cfg);
    inject_light(&rsm_from(&[a, b]), &mut both, &basis, &cfg);
    for k in 0..both.cascade_count() {
        for ((x, y), s) in sa.light[k].data().iter().zip(sb.light[k].data()).zip(both.light[k].data()) {
            assert!((x + y - s).abs() <= 1e-6 * s.abs().max(1e-3));
        }
    }
}

#[test]
fn empty_buffers_leave_geometry_zero() {
    let (_, basis, mut set) = setup(BasisKind::Sh2);
    inject_geometry(None, None, &mut set, &basis);
    assert!(set.geometry.iter().all(|g| g.data().iter().all(|v| *v == 0.0)));
}

/// Wall in the plane x = 0, lit head-on from +x.
fn wall_rsm() -> Rsm {
    let (a, b) = (-3.0, 3.0);
    let scene = Scene::from_triangles(
        &[
            ([DVec3::new(0.0, a, a), DVec3::new(0.0, b, a), DVec3::new(0.0, b, b)], 0),
            ([DVec3::new(0.0, a, a), DVec3::new(0.0, b, b), DVec3::new(0.0, a, b)], 0),
        ],
        vec![Material {
            albedo: DVec3::splat(0.8),
        }],
    )
    .unwrap();
    let light = SpotLight {
        position: DVec3::new(3.0, 0.3, 0.2),
        direction: -DVec3::X,
        cone_angle: 1.2,
        ..SpotLight::default()
    };
    render_rsm(&scene, &light, 256).unwrap()
}

#[test]
fn wall_blocking_is_the_area_ratio_times_the_lobe() {
    let rsm = wall_rsm();
    // A wall spanning the whole cell: area ratio 1.
    let p = DVec3::new(0.0, 0.5, 0.5);
    for kind in BasisKind::ALL {
        let (_, basis, mut set) = setup(kind);
        inject_geometry(Some(&rsm), None, &mut set, &basis);
        let grid = &set.geometry[0];
        let coeffs = grid.get(grid.world_to_cell(p).unwrap(), 0);
        let lobe = basis.spec().clamped_cosine_lobe(DVec3::X, EvalMode::Table).unwrap().to_f32();
        for d in [DVec3::X, DVec3::Y, DVec3::Z, -DVec3::Y] {
            let (got, want) = (eval(&basis, coeffs, d), eval(&basis, &lobe, d));
            assert!((got - want).abs() < 0.02, "{kind} {d}: {got} vs {want}");
        }
    }
}

#[test]
fn wall_blocks_along_its_normal() {
    let rsm = wall_rsm();
    let p = DVec3::new(0.0, 0.5, 0.5);
    let value = |kind: BasisKind, d: DVec3| {
        let (_, basis, mut set) = setup(kind);
        inject_geometry(Some(&rsm), None, &mut set, &basis);
        let grid = &set.geometry[0];
        eval(&basis, grid.get(grid.world_to_cell(p).unwrap(), 0), d)
    };
    for kind in [BasisKind::Sh2, BasisKind::Srbf14] {
        assert!(value(kind, DVec3::X) >= 0.7, "{kind}");
    }
    for d in [DVec3::Y, DVec3::Z, -DVec3::Y] {
        assert!(value(BasisKind::Srbf14, d) < 0.2);
    }
    // Two bands give 0.25 + 0.5 cos θ: a quarter of the weight at 90°.
    assert!((value(BasisKind::Sh2, DVec3::Y) - 0.25).abs() < 0.02);
}

#[test]
fn zero_light_volume_stays_zero() {
    let (cfg, basis, mut set) = setup(BasisKind::Srbf8v2);
    inject_geometry(Some(&wall_rsm()), None, &mut set, &basis);
    propagate(&mut set, &basis, &PipelineConfig { iterations: 12, ..cfg });
    assert!(all_zero(&set));
}

fn put_lobe(set: &mut CascadeSet, basis: &VolumeBasis, k: usize, cell: [usize; 3], axis: DVec3, scale: f32) {
    let lobe: Vec<f32> = basis.spec().clamped_cosine_lobe(axis, EvalMode::Table).unwrap().to_f32();
    let delta: Vec<f32> = lobe.iter().map(|v| v * scale).collect();
    set.light[k].accumulate(cell.map(|c| c as i64), 0, &delta).unwrap();
}

fn directional_mean(basis: &VolumeBasis, coeffs: &[f32]) -> f64 {
    let dirs = fibonacci_sphere(100);
    dirs.iter().map(|d| eval(basis, coeffs, *d)).sum::<f64>() / dirs.len() as f64
}

#[test]
fn lobe_propagates_toward_its_axis() {
    for kind in [BasisKind::Sh2, BasisKind::Srbf4, BasisKind::Srbf8v2] {
        let (cfg, basis, mut set) = setup(kind);
        put_lobe(&mut set, &basis, 0, [4, 4, 4], DVec3::X, 1.0);
        let cfg = PipelineConfig {
            iterations: 1,
            indirect_shadows: false,
            ..cfg
        };
        propagate(&mut set, &basis, &cfg);
        let plus = directional_mean(&basis, set.light[0].get([5, 4, 4], 0));
        let minus = directional_mean(&basis, set.light[0].get([3, 4, 4], 0));
        assert!(plus > minus, "{kind}: {plus} vs {minus}");
        assert!(plus > 0.0);
    }
}

/// Deterministic pseudo-random field of lobes in cascade 0.
fn scatter(set: &mut CascadeSet, basis: &VolumeBasis, seed: u64) {
    let mut s = seed;
    let mut next = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((s >> 33) as f64) / (1u64 << 31) as f64
    };
    for _ in 0..40 {
        let cell = [0, 0, 0].map(|_| (next() * 8.0) as usize % 8);
        let axis = DVec3::new(next() - 0.5, next() - 0.5, next() - 0.5).normalize();
        put_lobe(set, basis, 0, cell, axis, (0.1 + next()) as f32);
    }
}

#[test]
fn propagation_is_linear_without_clamping() {
    for kind in [BasisKind::Sh2, BasisKind::Srbf8v2] {
        for shadows in [false, true] {
            let (cfg, basis, mut empty) = setup(kind);
            if shadows {
                inject_geometry(Some(&wall_rsm()), None, &mut empty, &basis);
            }
            let cfg = PipelineConfig {
                clamp_negative: false,
                indirect_shadows: shadows,
                ..cfg
            };
            let (mut a, mut b, mut ab) = (empty.clone(), empty.clone(), empty.clone());
            scatter(&mut a, &basis, 1);
            scatter(&mut b, &basis, 2);
            scatter(&mut ab, &basis, 1);
            scatter(&mut ab, &basis, 2);
            for s in [&mut a, &mut b, &mut ab] {
                propagate(s, &basis, &cfg);
            }
            let scale = ab.light[0].data().iter().fold(0f32, |m, v| m.max(v.abs()));
            for ((x, y), s) in a.light[0].data().iter().zip(b.light[0].data()).zip(ab.light[0].data()) {
                assert!((x + y - s).abs() <= 1e-5 * scale, "{kind} shadows={shadows}");
            }
        }
    }
}

/// Light leaving a plane of +x lobes at x-cell 1; energy arriving at x-cells
/// 5..8 with and without a blocking plane on the light-cell corner x = 4.
fn transmitted(kind: BasisKind) -> (f64, f64) {
    let (cfg, basis, mut open) = setup(kind);
    for z in 0..8 {
        for y in 0..8 {
            put_lobe(&mut open, &basis, 0, [1, y, z], DVec3::X, 1.0);
        }
    }
    let mut walled = open.clone();
    let lobe: Vec<f32> = basis.spec().clamped_cosine_lobe(-DVec3::X, EvalMode::Table).unwrap().to_f32();
    for z in 0..8 {
        for y in 0..8 {
            walled.geometry[0].accumulate([4, y, z], 0, &lobe).unwrap();
        }
    }
    let cfg = PipelineConfig {
        indirect_shadows: true,
        ..cfg
    };
    propagate(&mut open, &basis, &cfg);
    propagate(&mut walled, &basis, &cfg);
    let beyond = |set: &CascadeSet| -> f64 {
        let g = &set.light[0];
        let mut e = 0.0;
        for z in 0..8 {
            for y in 0..8 {
                for x in 5..8 {
                    e += basis.sphere_integral(g.get([x, y, z], 0));
                }
            }
        }
        e
    };
    (beyond(&walled), beyond(&open))
}

#[test]
fn blocking_wall_transmits_at_most_ten_percent() {
    let (walled, open) = transmitted(BasisKind::Srbf14);
    assert!(open > 0.0);
    assert!(walled <= 0.1 * open, "{}", walled / open);
}

#[test]
fn band_limited_walls_leak_at_most_their_lobe_deficit() {
    // Blocking lobes peak at 0.75 (sh2) and 0.70 (srbf8v2), so at least
    // the remainder leaks through head-on.
    for (kind, bound) in [(BasisKind::Sh2, 0.35), (BasisKind::Srbf8v2, 0.4)] {
        let (walled, open) = transmitted(kind);
        assert!(walled / open < bound, "{kind}: {}", walled / open);
    }
}

#[test]
fn energy_never_decreases_with_iterations() {
    for kind in [BasisKind::Sh2, BasisKind::Srbf8v2] {
        let (cfg, basis, mut base) = setup(kind);
        scatter(&mut base, &basis, 7);
        inject_geometry(Some(&wall_rsm()), None, &mut base, &basis);
        let mut last = volume_energy(&basis, &base, 0, 0);
        for iterations in 1..=10 {
            let mut set = base.clone();
            propagate(&mut set, &basis, &PipelineConfig { iterations, ..cfg.clone() });
            let e = volume_energy(&basis, &set, 0, 0);
            assert!(e >= last, "{kind}: {iterations} iterations {e} < {last}");
            last = e;
        }
    }
}

#[test]
fn zero_cascades_gather_black() {
    let cfg = low_res(BasisKind::Srbf8v2);
    let basis = VolumeBasis::from_config(&cfg).unwrap();
    let scene = atrium_mini();
    let camera = low_res_camera();
    let gb = render_gbuffer(&scene, &camera, &[SpotLight::default()]).unwrap();
    let set = Pipeline::new(cfg.clone()).unwrap().cascades_for(&camera).unwrap();
    let (img, _) = gather(&gb, &set, &basis, &cfg);
    assert!(img.pixels().iter().all(|p| *p == [0.0; 3]));
}

#[test]
fn uniform_field_lights_a_flat_wall_evenly() {
    let (a, b) = (-20.0, 20.0);
    let scene = Scene::from_triangles(
        &[
            ([DVec3::new(a, a, 3.0), DVec3::new(b, a, 3.0), DVec3::new(b, b, 3.0)], 0),
            ([DVec3::new(a, a, 3.0), DVec3::new(b, b, 3.0), DVec3::new(a, b, 3.0)], 0),
        ],
        vec![Material {
            albedo: DVec3::splat(0.8),
        }],
    )
    .unwrap();
    let camera = Camera {
        position: DVec3::ZERO,
        look_at: DVec3::Z,
        width: 64,
        height: 36,
        ..Camera::default()
    };
    for kind in [BasisKind::Sh2, BasisKind::Srbf8v2] {
        let (cfg, basis, mut set) = setup(kind);
        // The wall faces -z; gathering reads +z.
        let lobe: Vec<f32> = basis.spec().clamped_cosine_lobe(DVec3::Z, EvalMode::Table).unwrap().to_f32();
        for grid in &mut set.light {
            let n = grid.dims() as i64;
            for z in 0..n {
                for y in 0..n {
                    for x in 0..n {
                        for ch in 0..3 {
                            grid.accumulate([x, y, z], ch, &lobe).unwrap();
                        }
                    }
                }
            }
        }
        let gb = render_gbuffer(&scene, &camera, &[]).unwrap();
        let (img, _) = gather(&gb, &set, &basis, &cfg);
        let values: Vec<f64> = img.pixels().iter().map(|p| p[0]).collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
        assert!(mean > 0.0);
        assert!(var.sqrt() / mean < 0.05, "{kind}: cv {}", var.sqrt() / mean);
    }
}

#[test]
fn interior_points_ignore_coarser_cascades() {
    let (cfg, basis, mut set) = setup(BasisKind::Srbf8v2);
    scatter(&mut set, &basis, 3);
    for z in 0..8 {
        put_lobe(&mut set, &basis, 1, [4, 4, z], DVec3::Y, 2.0);
    }
    propagate(&mut set, &basis, &PipelineConfig { indirect_shadows: false, ..cfg });
    let mut no_coarse = set.clone();
    no_coarse.light[1].clear();
    // Cascade 0 spans [-4, 4] with 1 m cells.
    for p in [DVec3::new(0.2, 0.4, -0.3), DVec3::new(1.9, -1.9, 1.5), DVec3::new(-1.5, 0.0, 1.9)] {
        for d in [DVec3::X, -DVec3::Y, DVec3::new(0.6, 0.0, 0.8)] {
            let a = gather_point(&set, &basis, p, d, true);
            let b = gather_point(&no_coarse, &basis, p, d, true);
            assert_eq!(a, b);
        }
    }
    // Near the boundary the coarse cascade contributes.
    let p = DVec3::new(3.8, 0.0, 0.0);
    assert_ne!(
        gather_point(&set, &basis, p, DVec3::Y, true),
        gather_point(&no_coarse, &basis, p, DVec3::Y, true)
    );
}

#[test]
fn zero_flux_frame_is_black_downstream() {
    let light = SpotLight {
        flux_scale: 0.0,
        ..SpotLight::default()
    };
    let out = render_frame(&atrium_mini(), &light, &low_res_camera(), &low_res(BasisKind::Sh2)).unwrap();
    assert!(out.rsm.flux.iter().all(|f| *f == DVec3::ZERO));
    assert!(all_zero(&out.cascades));
    for img in [&out.image, &out.indirect, &out.direct] {
        assert!(img.pixels().iter().all(|p| *p == [0.0; 3]));
    }
}

#[test]
fn light_pointing_away_gives_black_indirect() {
    let light = SpotLight {
        position: DVec3::new(0.0, 5.5, 0.0),
        direction: DVec3::Y,
        ..SpotLight::default()
    };
    let out = render_frame(&atrium_mini(), &light, &low_res_camera(), &low_res(BasisKind::Srbf8v2)).unwrap();
    assert!(out.indirect.pixels().iter().all(|p| *p == [0.0; 3]));
}

#[test]
fn red_wall_bleeds_onto_nearby_surfaces() {
    for kind in [BasisKind::Sh2, BasisKind::Srbf8v2] {
        let out = render_frame(&atrium_mini(), &SpotLight::default(), &low_res_camera(), &low_res(kind)).unwrap();
        let gb = &out.gbuffer;
        let (mut r, mut b, mut n) = (0.0, 0.0, 0);
        for i in 0..gb.len() {
            let albedo = gb.albedo[i];
            let neutral = (albedo.x - albedo.z).abs() < 1e-9 && (albedo.x - albedo.y).abs() < 1e-9;
            if gb.hit[i] && neutral && gb.position[i].x < -2.5 {
                let p = out.indirect.pixels()[i];
                r += p[0];
                b += p[2];
                n += 1;
            }
        }
        assert!(n > 50, "{kind}: only {n} probe pixels");
        assert!(r > 2.0 * b, "{kind}: red {r} blue {b}");
    }
}

#[test]
fn doubling_flux_doubles_indirect() {
    let cfg = PipelineConfig {
        clamp_negative: false,
        ..low_res(BasisKind::Srbf8v2)
    };
    let light = SpotLight::default();
    let bright = SpotLight {
        flux_scale: 2.0 * light.flux_scale,
        ..light.clone()
    };
    let a = render_frame(&atrium_mini(), &light, &low_res_camera(), &cfg).unwrap();
    let b = render_frame(&atrium_mini(), &bright, &low_res_camera(), &cfg).unwrap();
    let peak = b.indirect.pixels().iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(peak > 0.0);
    for (x, y) in a.indirect.pixels().iter().flatten().zip(b.indirect.pixels().iter().flatten()) {
        assert!((2.0 * x - y).abs() <= 0.01 * y.abs() + 1e-9 * peak, "{x} {y}");
    }
}

#[test]
fn basis_choice_leaves_raster_buffers_bit_identical() {
    let scene = atrium_mini();
    let light = SpotLight::default();
    let a = render_frame(&scene, &light, &low_res_camera(), &low_res(BasisKind::Sh2)).unwrap();
    let b = render_frame(&scene, &light, &low_res_camera(), &low_res(BasisKind::Srbf8v2)).unwrap();
    assert_eq!(a.rsm.depth, b.rsm.depth);
    assert_eq!(a.rsm.position, b.rsm.position);
    assert_eq!(a.rsm.normal, b.rsm.normal);
    assert_eq!(a.rsm.flux, b.rsm.flux);
    assert_eq!(a.gbuffer.position, b.gbuffer.position);
    assert_eq!(a.gbuffer.normal, b.gbuffer.normal);
    assert_eq!(a.gbuffer.albedo, b.gbuffer.albedo);
    assert_eq!(a.gbuffer.direct, b.gbuffer.direct);
    assert_eq!(a.direct, b.direct);
    assert_ne!(a.indirect, b.indirect);
}

#[test]
fn thread_count_does_not_change_the_frame() {
    let scene = atrium_mini();
    let light = SpotLight::default();
    let one = render_frame(&scene, &light, &low_res_camera(), &low_res(BasisKind::Srbf8v2)).unwrap();
    let many = render_frame(
        &scene,
        &light,
        &low_res_camera(),
        &PipelineConfig {
            threads: 4,
            ..low_res(BasisKind::Srbf8v2)
        },
    )
    .unwrap();
    assert_eq!(one.image, many.image);
    assert_eq!(one.indirect, many.indirect);
}

