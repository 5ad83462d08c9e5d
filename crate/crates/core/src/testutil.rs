//! Shared helpers for unit tests.

use glam::DVec3;
use rand::Rng;
use rand_pcg::Pcg64;

pub fn rng(seed: u64) -> Pcg64 {
    Pcg64::new(0xcafe_f00d_d15e_a5e5 ^ seed as u128, 0x0a02_bdbf_7bb3_c0a7)
}

/// Uniform direction on the unit sphere.
pub fn random_unit(r: &mut impl Rng) -> DVec3 {
    let z: f64 = r.gen_range(-1.0..=1.0);
    let phi: f64 = r.gen_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).max(0.0).sqrt();
    DVec3::new(s * phi.cos(), s * phi.sin(), z)
}
