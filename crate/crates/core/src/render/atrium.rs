//! Built-in stand-in scene: a small open-roof atrium.

use glam::DVec3;

use super::scene::{Material, Scene, Triangle};

pub const ATRIUM_MINI: &str = "atrium-mini";

pub const HALF_WIDTH: f64 = 5.0;
pub const HEIGHT: f64 = 6.0;
pub const HALF_DEPTH: f64 = 7.0;
pub const PILLAR_SIZE: f64 = 0.8;
/// Pillar centers in the xz-plane.
pub const PILLARS: [(f64, f64); 4] = [(-2.4, -3.0), (-2.4, 3.0), (2.4, -3.0), (2.4, 3.0)];

pub const WHITE: usize = 0;
pub const RED: usize = 1;
pub const GREEN: usize = 2;
pub const STONE: usize = 3;
pub const CLOTH: usize = 4;

pub fn materials() -> Vec<Material> {
    [
        DVec3::splat(0.75),
        DVec3::new(0.8, 0.1, 0.1),
        DVec3::new(0.1, 0.8, 0.1),
        DVec3::splat(0.6),
        DVec3::new(0.7, 0.6, 0.4),
    ]
    .into_iter()
    .map(|albedo| Material { albedo })
    .collect()
}

/// Two triangles over the planar quad `a b c d`, wound so the normal points
/// along `facing`.
fn quad(out: &mut Vec<Triangle>, [a, b, c, d]: [DVec3; 4], facing: DVec3, material: usize) {
    let mut t0 = Triangle::new([a, b, c], material).expect("non-degenerate quad");
    let mut t1 = Triangle::new([a, c, d], material).expect("non-degenerate quad");
    if t0.normal.dot(facing) < 0.0 {
        t0 = Triangle::new([a, c, b], material).unwrap();
        t1 = Triangle::new([a, d, c], material).unwrap();
    }
    out.push(t0);
    out.push(t1);
}

/// Axis-aligned box with outward faces; the bottom face is omitted.
fn pillar(out: &mut Vec<Triangle>, cx: f64, cz: f64, height: f64, material: usize) {
    let h = PILLAR_SIZE * 0.5;
    let (x0, x1, z0, z1) = (cx - h, cx + h, cz - h, cz + h);
    let p = DVec3::new;
    quad(out, [p(x0, 0.0, z0), p(x0, 0.0, z1), p(x0, height, z1), p(x0, height, z0)], -DVec3::X, material);
    quad(out, [p(x1, 0.0, z0), p(x1, 0.0, z1), p(x1, height, z1), p(x1, height, z0)], DVec3::X, material);
    quad(out, [p(x0, 0.0, z0), p(x1, 0.0, z0), p(x1, height, z0), p(x0, height, z0)], -DVec3::Z, material);
    quad(out, [p(x0, 0.0, z1), p(x1, 0.0, z1), p(x1, height, z1), p(x0, height, z1)], DVec3::Z, material);
    quad(out, [p(x0, height, z0), p(x1, height, z0), p(x1, height, z1), p(x0, height, z1)], DVec3::Y, material);
}

/// 10 × 6 × 14 m box open at the top: red wall at x = −5, green wall at
/// x = +5, four 0.8 m pillars and one hanging curtain quad.
pub fn atrium_mini() -> Scene {
    let (w, h, d) = (HALF_WIDTH, HEIGHT, HALF_DEPTH);
    let p = DVec3::new;
    let mut tris = Vec::new();
    quad(&mut tris, [p(-w, 0.0, -d), p(w, 0.0, -d), p(w, 0.0, d), p(-w, 0.0, d)], DVec3::Y, WHITE);
    quad(&mut tris, [p(-w, 0.0, -d), p(-w, 0.0, d), p(-w, h, d), p(-w, h, -d)], DVec3::X, RED);
    quad(&mut tris, [p(w, 0.0, -d), p(w, 0.0, d), p(w, h, d), p(w, h, -d)], -DVec3::X, GREEN);
    quad(&mut tris, [p(-w, 0.0, -d), p(w, 0.0, -d), p(w, h, -d), p(-w, h, -d)], DVec3::Z, WHITE);
    quad(&mut tris, [p(-w, 0.0, d), p(w, 0.0, d), p(w, h, d), p(-w, h, d)], -DVec3::Z, WHITE);
    for (x, z) in PILLARS {
        pillar(&mut tris, x, z, h, STONE);
    }
    quad(&mut tris, [p(-1.5, 1.5, 5.0), p(1.5, 1.5, 5.0), p(1.5, 5.0, 5.0), p(-1.5, 5.0, 5.0)], -DVec3::Z, CLOTH);
    Scene::new(tris, materials()).expect("built-in scene is valid")
}
