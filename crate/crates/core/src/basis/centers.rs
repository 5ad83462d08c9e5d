//! Shipped SRBF center sets.
//!
//! Only the cube-vertex set is fully pinned down by its source description;
//! the others are reconstructions chosen for symmetry.

use glam::DVec3;

use std::f64::consts::PI;

pub fn tetrahedron() -> Vec<DVec3> {
    [
        DVec3::new(1.0, 1.0, 1.0),
        DVec3::new(1.0, -1.0, -1.0),
        DVec3::new(-1.0, 1.0, -1.0),
        DVec3::new(-1.0, -1.0, 1.0),
    ]
    .into_iter()
    .map(DVec3::normalize)
    .collect()
}

/// Poles on ±z plus six equatorial points 60° apart.
pub fn poles_and_hexagon() -> Vec<DVec3> {
    let mut out = vec![DVec3::Z, DVec3::NEG_Z];
    for k in 0..6 {
        let phi = k as f64 * PI / 3.0;
        out.push(DVec3::new(phi.cos(), phi.sin(), 0.0));
    }
    out
}

/// The eight normalized cube vertices.
pub fn cube_vertices() -> Vec<DVec3> {
    let mut out = Vec::with_capacity(8);
    for &z in &[1.0, -1.0] {
        for &(x, y) in &[(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
            out.push(DVec3::new(x, y, z).normalize());
        }
    }
    out
}

pub fn main_axes() -> Vec<DVec3> {
    vec![
        DVec3::X,
        DVec3::NEG_X,
        DVec3::Y,
        DVec3::NEG_Y,
        DVec3::Z,
        DVec3::NEG_Z,
    ]
}

/// Main axes plus the (1,1,1) / (-1,-1,-1) diagonal pair.
pub fn axes_and_diagonal() -> Vec<DVec3> {
    let mut out = main_axes();
    out.push(DVec3::ONE.normalize());
    out.push(-DVec3::ONE.normalize());
    out
}

pub fn axes_and_cube() -> Vec<DVec3> {
    let mut out = main_axes();
    out.extend(cube_vertices());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_sets_are_unit_and_distinct() {
        for set in [
            tetrahedron(),
            poles_and_hexagon(),
            cube_vertices(),
            axes_and_diagonal(),
            axes_and_cube(),
        ] {
            for (i, a) in set.iter().enumerate() {
                assert!((a.length() - 1.0).abs() < 1e-12);
                for b in &set[i + 1..] {
                    assert!(a.distance(*b) > 1e-3);
                }
            }
        }
    }

    #[test]
    fn set_sizes() {
        assert_eq!(tetrahedron().len(), 4);
        assert_eq!(poles_and_hexagon().len(), 8);
        assert_eq!(cube_vertices().len(), 8);
        assert_eq!(axes_and_diagonal().len(), 8);
        assert_eq!(axes_and_cube().len(), 14);
    }
}
