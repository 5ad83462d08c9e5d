use std::path::Path;

use glam::DVec3;

use super::bvh::{Bvh, Closest};
use crate::error::{invalid, Result};

/// Parametric distance below which intersections are ignored.
pub const RAY_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: DVec3,
    pub max: DVec3,
}

impl Aabb {
    pub const EMPTY: Aabb = Aabb {
        min: DVec3::splat(f64::INFINITY),
        max: DVec3::splat(f64::NEG_INFINITY),
    };

    pub fn grow(&mut self, p: DVec3) {
        self.min = self.min.min(p);
        self.max = self.max.max(p);
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: self.min.min(other.min),
            max: self.max.max(other.max),
        }
    }

    pub fn size(&self) -> DVec3 {
        self.max - self.min
    }

    pub fn contains(&self, p: DVec3) -> bool {
        p.cmpge(self.min).all() && p.cmple(self.max).all()
    }

    /// Slightly enlarged so slab tests never reject rays grazing a face.
    pub(crate) fn padded(&self) -> Aabb {
        let pad = DVec3::splat(1e-9) + self.size().abs() * 1e-9;
        Aabb {
            min: self.min - pad,
            max: self.max + pad,
        }
    }

    /// Entry distance of the ray into the box, if it enters within `[0, t_max]`.
    #[inline]
    pub(crate) fn hit(&self, origin: DVec3, inv_dir: DVec3, t_max: f64) -> Option<f64> {
        let t0 = (self.min - origin) * inv_dir;
        let t1 = (self.max - origin) * inv_dir;
        // NaN arises for 0 * inf when the origin sits on a slab and the ray
        // is parallel to it; treat that slab as not constraining.
        let lo = t0.min(t1);
        let hi = t0.max(t1);
        let mut enter = 0.0f64;
        let mut exit = t_max;
        for a in 0..3 {
            if !lo[a].is_nan() {
                enter = enter.max(lo[a]);
            }
            if !hi[a].is_nan() {
                exit = exit.min(hi[a]);
            }
        }
        (enter <= exit).then_some(enter)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    /// Diffuse albedo, each component in [0, 1].
    pub albedo: DVec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub vertices: [DVec3; 3],
    /// Unit face normal following the counter-clockwise winding.
    pub normal: DVec3,
    pub material: usize,
}

impl Triangle {
    /// Fails on zero-area triangles.
    pub fn new(vertices: [DVec3; 3], material: usize) -> Result<Self> {
        let [a, b, c] = vertices;
        let n = (b - a).cross(c - a);
        let len = n.length();
        if !len.is_finite() || len <= 1e-14 {
            return Err(invalid("degenerate triangle"));
        }
        Ok(Self {
            vertices,
            normal: n / len,
            material,
        })
    }

    pub fn area(&self) -> f64 {
        let [a, b, c] = self.vertices;
        0.5 * (b - a).cross(c - a).length()
    }

    pub fn centroid(&self) -> DVec3 {
        (self.vertices[0] + self.vertices[1] + self.vertices[2]) / 3.0
    }

    pub fn bounds(&self) -> Aabb {
        let mut b = Aabb::EMPTY;
        self.vertices.iter().for_each(|v| b.grow(*v));
        b
    }

    /// Möller–Trumbore; edges are inclusive so rays through shared edges hit.
    #[inline]
    pub fn intersect(&self, origin: DVec3, dir: DVec3) -> Option<f64> {
        let [v0, v1, v2] = self.vertices;
        let e1 = v1 - v0;
        let e2 = v2 - v0;
        let p = dir.cross(e2);
        let det = e1.dot(p);
        if det.abs() < 1e-14 {
            return None;
        }
        let inv = 1.0 / det;
        let s = origin - v0;
        let u = s.dot(p) * inv;
        if !(0.0..=1.0).contains(&u) {
            return None;
        }
        let q = s.cross(e1);
        let v = dir.dot(q) * inv;
        if v < 0.0 || u + v > 1.0 {
            return None;
        }
        let t = e2.dot(q) * inv;
        (t > RAY_EPSILON).then_some(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub position: DVec3,
    /// Geometric normal of the triangle, not flipped toward the ray.
    pub normal: DVec3,
    pub material: usize,
    pub triangle: usize,
}

impl Hit {
    /// Normal facing back along `dir`, for two-sided shading.
    pub fn facing_normal(&self, dir: DVec3) -> DVec3 {
        if self.normal.dot(dir) > 0.0 {
            -self.normal
        } else {
            self.normal
        }
    }
}

/// Immutable triangle scene with a BVH for ray queries.
#[derive(Debug, Clone)]
pub struct Scene {
    triangles: Vec<Triangle>,
    materials: Vec<Material>,
    bounds: Aabb,
    bvh: Bvh,
}

impl Scene {
    pub fn new(triangles: Vec<Triangle>, materials: Vec<Material>) -> Result<Self> {
        for m in &materials {
            if !m.albedo.is_finite() || m.albedo.min_element() < 0.0 || m.albedo.max_element() > 1.0 {
                return Err(invalid(format!("albedo {} outside [0, 1]", m.albedo)));
            }
        }
        let mut bounds = Aabb::EMPTY;
        for t in &triangles {
            if t.material >= materials.len() {
                return Err(invalid(format!("material index {} out of range", t.material)));
            }
            if (t.normal.length() - 1.0).abs() > 1e-9 {
                return Err(invalid("triangle normal is not unit length"));
            }
            bounds = bounds.union(&t.bounds());
        }
        let bvh = Bvh::build(&triangles);
        Ok(Self {
            triangles,
            materials,
            bounds,
            bvh,
        })
    }

    /// Builds from vertex triples with a single material per triangle.
    pub fn from_triangles(tris: &[([DVec3; 3], usize)], materials: Vec<Material>) -> Result<Self> {
        let triangles = tris
            .iter()
            .map(|(v, m)| Triangle::new(*v, *m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(triangles, materials)
    }

    /// `"atrium-mini"` or a path to an OBJ file.
    pub fn load(source: &str) -> Result<Self> {
        if source == super::atrium::ATRIUM_MINI {
            return Ok(super::atrium::atrium_mini());
        }
        super::obj::load_obj(Path::new(source))
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn materials(&self) -> &[Material] {
        &self.materials
    }

    pub fn bounds(&self) -> Aabb {
        self.bounds
    }

    pub fn albedo(&self, material: usize) -> DVec3 {
        self.materials[material].albedo
    }

    fn hit_from(&self, c: Closest, origin: DVec3, dir: DVec3) -> Option<Hit> {
        (c.index != usize::MAX).then(|| {
            let tri = &self.triangles[c.index];
            Hit {
                t: c.t,
                position: origin + dir * c.t,
                normal: tri.normal,
                material: tri.material,
                triangle: c.index,
            }
        })
    }

    /// Nearest intersection along a unit-length `dir`.
    pub fn raycast(&self, origin: DVec3, dir: DVec3) -> Option<Hit> {
        let c = self.bvh.closest(&self.triangles, origin, dir, f64::INFINITY);
        self.hit_from(c, origin, dir)
    }

    /// Linear scan over every triangle; the reference for [`Scene::raycast`].
    pub fn raycast_brute_force(&self, origin: DVec3, dir: DVec3) -> Option<Hit> {
        let mut best = Closest::none(f64::INFINITY);
        for (i, t) in self.triangles.iter().enumerate() {
            if let Some(d) = t.intersect(origin, dir) {
                best.offer(d, i);
            }
        }
        self.hit_from(best, origin, dir)
    }

    /// Whether anything lies along the ray strictly before `t_max`.
    pub fn occluded(&self, origin: DVec3, dir: DVec3, t_max: f64) -> bool {
        self.bvh.closest(&self.triangles, origin, dir, t_max).index != usize::MAX
    }

    /// Reflection through the plane x = 0, keeping outward normals.
    pub fn mirrored_x(&self) -> Scene {
        let flip = DVec3::new(-1.0, 1.0, 1.0);
        let triangles = self
            .triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.vertices;
                // Swapping two vertices keeps the winding consistent with the
                // reflected normal.
                Triangle {
                    vertices: [a * flip, c * flip, b * flip],
                    normal: t.normal * flip,
                    material: t.material,
                }
            })
            .collect();
        Scene::new(triangles, self.materials.clone()).expect("reflection preserves validity")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_unit, rng};
    use rand::Rng;

    fn white() -> Vec<Material> {
        vec![Material { albedo: DVec3::ONE }]
    }

    fn unit_quad_at_z(z: f64) -> Vec<([DVec3; 3], usize)> {
        let p = |x: f64, y: f64| DVec3::new(x, y, z);
        vec![
            ([p(-0.5, -0.5), p(0.5, -0.5), p(0.5, 0.5)], 0),
            ([p(-0.5, -0.5), p(0.5, 0.5), p(-0.5, 0.5)], 0),
        ]
    }

    #[test]
    fn perpendicular_hit_distance() {
        let scene = Scene::from_triangles(&unit_quad_at_z(3.0), white()).unwrap();
        let hit = scene.raycast(DVec3::ZERO, DVec3::Z).unwrap();
        assert!((hit.t - 3.0).abs() < 1e-5);
        assert!((hit.position - DVec3::new(0.0, 0.0, 3.0)).length() < 1e-5);
        assert_eq!(hit.facing_normal(DVec3::Z), -DVec3::Z);
    }

    #[test]
    fn parallel_ray_misses() {
        let scene = Scene::from_triangles(&unit_quad_at_z(3.0), white()).unwrap();
        assert!(scene.raycast(DVec3::new(0.0, 0.0, 1.0), DVec3::X).is_none());
        assert!(scene.raycast(DVec3::new(-2.0, 0.0, 3.0), DVec3::X).is_none());
    }

    #[test]
    fn behind_origin_is_ignored() {
        let scene = Scene::from_triangles(&unit_quad_at_z(-1.0), white()).unwrap();
        assert!(scene.raycast(DVec3::ZERO, DVec3::Z).is_none());
        assert!(scene.raycast(DVec3::ZERO, -DVec3::Z).is_some());
    }

    #[test]
    fn axis_aligned_quads_are_watertight() {
        let scene = Scene::from_triangles(&unit_quad_at_z(5000.0), white()).unwrap();
        // Rays through the shared diagonal and just inside the outer edges.
        for i in 0..=40 {
            let s = -0.4999 + i as f64 * 0.9998 / 40.0;
            for target in [DVec3::new(s, s, 5000.0), DVec3::new(s, -0.4999, 5000.0), DVec3::new(0.4999, s, 5000.0)] {
                let origin = DVec3::new(0.0, 0.0, 10.0);
                let dir = (target - origin).normalize();
                assert!(scene.raycast(origin, dir).is_some(), "missed {target}");
            }
        }
    }

    #[test]
    fn bvh_matches_brute_force() {
        let scene = super::super::atrium::atrium_mini();
        let mut r = rng(11);
        let b = scene.bounds();
        for _ in 0..100_000 {
            let origin = b.min + DVec3::new(r.gen(), r.gen(), r.gen()) * b.size();
            let dir = random_unit(&mut r);
            let fast = scene.raycast(origin, dir);
            let slow = scene.raycast_brute_force(origin, dir);
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn occlusion_respects_distance() {
        let scene = Scene::from_triangles(&unit_quad_at_z(2.0), white()).unwrap();
        assert!(scene.occluded(DVec3::ZERO, DVec3::Z, 3.0));
        assert!(!scene.occluded(DVec3::ZERO, DVec3::Z, 1.5));
    }

    #[test]
    fn validation() {
        let bad = vec![Material {
            albedo: DVec3::new(1.2, 0.0, 0.0),
        }];
        assert!(Scene::from_triangles(&unit_quad_at_z(0.0), bad).is_err());
        assert!(Scene::from_triangles(&[([DVec3::ZERO, DVec3::X, DVec3::X * 2.0], 0)], white()).is_err());
        assert!(Scene::from_triangles(&[([DVec3::ZERO, DVec3::X, DVec3::Y], 1)], white()).is_err());
    }

    #[test]
    fn mirror_keeps_normals_consistent() {
        let scene = super::super::atrium::atrium_mini();
        let m = scene.mirrored_x();
        for (a, b) in scene.triangles().iter().zip(m.triangles()) {
            let recomputed = Triangle::new(b.vertices, 0).unwrap().normal;
            assert!((recomputed - b.normal).length() < 1e-9);
            assert!((b.normal.x + a.normal.x).abs() < 1e-12);
        }
    }
}
