//! Two-band real spherical harmonics, ordered `(Y00, Y1-1, Y10, Y11)`.

use glam::{DVec3, Vec3};

pub const Y0: f64 = 0.282_094_791_773_878_14;
pub const Y1: f64 = 0.488_602_511_902_919_9;

/// Zonal projection of `max(cos θ, 0)` onto band 0: `√π / 2`.
pub const CLAMPED_COSINE_Z0: f64 = 0.886_226_925_452_758;
/// Zonal projection of `max(cos θ, 0)` onto band 1: `√(π / 3)`.
pub const CLAMPED_COSINE_Z1: f64 = 1.023_326_707_946_488_5;

#[inline]
pub fn basis(d: DVec3) -> [f64; 4] {
    [Y0, Y1 * d.y, Y1 * d.z, Y1 * d.x]
}

#[inline]
pub fn basis_f32(d: Vec3) -> [f32; 4] {
    let y1 = Y1 as f32;
    [Y0 as f32, y1 * d.y, y1 * d.z, y1 * d.x]
}

/// Clamped cosine lobe about `axis`, rotated with the closed-form zonal rule.
pub fn clamped_cosine_lobe(axis: DVec3) -> [f64; 4] {
    [
        CLAMPED_COSINE_Z0,
        CLAMPED_COSINE_Z1 * axis.y,
        CLAMPED_COSINE_Z1 * axis.z,
        CLAMPED_COSINE_Z1 * axis.x,
    ]
}
