use glam::DVec3;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Largest frustum half-angle used for spot light shadow maps.
pub const MAX_FRUSTUM_HALF_ANGLE: f64 = 1.5;

/// Pinhole projection with view-space depth along `forward`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perspective {
    pub origin: DVec3,
    pub forward: DVec3,
    pub right: DVec3,
    pub up: DVec3,
    pub tan_x: f64,
    pub tan_y: f64,
    pub width: usize,
    pub height: usize,
}

impl Perspective {
    pub fn new(origin: DVec3, forward: DVec3, up_hint: DVec3, tan_x: f64, tan_y: f64, width: usize, height: usize) -> Result<Self> {
        let forward = forward.try_normalize().ok_or_else(|| invalid("view direction is zero"))?;
        let hint = if forward.cross(up_hint).length() < 1e-6 {
            if forward.y.abs() < 0.9 { DVec3::Y } else { DVec3::Z }
        } else {
            up_hint
        };
        let right = forward.cross(hint).normalize();
        let up = right.cross(forward);
        if width == 0 || height == 0 {
            return Err(invalid("resolution must be non-zero"));
        }
        Ok(Self {
            origin,
            forward,
            right,
            up,
            tan_x,
            tan_y,
            width,
            height,
        })
    }

    /// Direction through the pixel center with unit view-space depth.
    #[inline]
    pub fn ray_unnormalized(&self, px: usize, py: usize) -> DVec3 {
        let sx = 2.0 * (px as f64 + 0.5) / self.width as f64 - 1.0;
        let sy = 1.0 - 2.0 * (py as f64 + 0.5) / self.height as f64;
        self.forward + self.right * (sx * self.tan_x) + self.up * (sy * self.tan_y)
    }

    pub fn ray(&self, px: usize, py: usize) -> DVec3 {
        self.ray_unnormalized(px, py).normalize()
    }

    /// World position of a pixel at view-space depth `depth`.
    pub fn reconstruct(&self, px: usize, py: usize, depth: f64) -> DVec3 {
        self.origin + self.ray_unnormalized(px, py) * depth
    }

    pub fn view_depth(&self, p: DVec3) -> f64 {
        (p - self.origin).dot(self.forward)
    }

    /// Approximate solid angle of one pixel: `dx · dy / L³` with `L` the
    /// length of its unit-depth ray.
    pub fn pixel_solid_angle(&self, px: usize, py: usize) -> f64 {
        let dx = 2.0 * self.tan_x / self.width as f64;
        let dy = 2.0 * self.tan_y / self.height as f64;
        dx * dy / self.ray_unnormalized(px, py).length().powi(3)
    }

    /// Solid angle of the full frustum.
    pub fn solid_angle(&self) -> f64 {
        let a = self.tan_x / (1.0 + self.tan_x * self.tan_x).sqrt();
        let b = self.tan_y / (1.0 + self.tan_y * self.tan_y).sqrt();
        4.0 * (a * b).asin()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Camera {
    pub position: DVec3,
    pub look_at: DVec3,
    pub up: DVec3,
    pub vertical_fov_deg: f64,
    pub width: usize,
    pub height: usize,
}

impl Default for Camera {
    fn default() -> Self {
        Self {
            position: DVec3::new(2.5, 2.6, -6.0),
            look_at: DVec3::new(-3.0, 1.5, 0.5),
            up: DVec3::Y,
            vertical_fov_deg: 60.0,
            width: 960,
            height: 540,
        }
    }
}

impl Camera {
    pub fn perspective(&self) -> Result<Perspective> {
        if !(self.vertical_fov_deg > 0.0 && self.vertical_fov_deg < 180.0) {
            return Err(invalid("vertical field of view must be in (0, 180) degrees"));
        }
        let tan_y = (self.vertical_fov_deg.to_radians() * 0.5).tan();
        let tan_x = tan_y * self.width as f64 / self.height.max(1) as f64;
        Perspective::new(self.position, self.look_at - self.position, self.up, tan_x, tan_y, self.width, self.height)
    }

    pub fn mirrored_x(&self) -> Camera {
        let flip = DVec3::new(-1.0, 1.0, 1.0);
        Camera {
            position: self.position * flip,
            look_at: self.look_at * flip,
            up: self.up * flip,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpotLight {
    pub position: DVec3,
    pub direction: DVec3,
    /// Half-angle of the cone in radians, in (0, π/2].
    pub cone_angle: f64,
    /// Radiant intensity per channel on the axis.
    pub color: DVec3,
    pub flux_scale: f64,
}

impl Default for SpotLight {
    fn default() -> Self {
        Self {
            position: DVec3::new(1.0, 4.5, 0.0),
            direction: DVec3::new(-6.0, -1.5, 0.0).normalize(),
            cone_angle: 0.6,
            color: DVec3::splat(1.0),
            flux_scale: 120.0,
        }
    }
}

impl SpotLight {
    pub fn validate(&self) -> Result<()> {
        if !(self.cone_angle > 0.0 && self.cone_angle <= std::f64::consts::FRAC_PI_2) {
            return Err(invalid("cone angle must be in (0, π/2]"));
        }
        if !self.color.is_finite() || self.color.min_element() < 0.0 || !(self.flux_scale >= 0.0) {
            return Err(invalid("light intensity must be non-negative"));
        }
        if self.direction.try_normalize().is_none() || !self.position.is_finite() {
            return Err(invalid("light position and direction must be finite and non-zero"));
        }
        Ok(())
    }

    pub fn intensity(&self) -> DVec3 {
        self.color * self.flux_scale
    }

    pub fn axis(&self) -> DVec3 {
        self.direction.normalize()
    }

    /// 1 on the axis, falling linearly in cosine to 0 at the cone edge.
    pub fn falloff(&self, dir: DVec3) -> f64 {
        let cos_cone = self.cone_angle.cos();
        let c = dir.normalize().dot(self.axis());
        ((c - cos_cone) / (1.0 - cos_cone)).clamp(0.0, 1.0)
    }

    /// Square shadow-map frustum enclosing the cone.
    pub fn frustum(&self, resolution: usize) -> Result<Perspective> {
        self.validate()?;
        let t = self.cone_angle.min(MAX_FRUSTUM_HALF_ANGLE).tan();
        Perspective::new(self.position, self.direction, DVec3::Y, t, t, resolution, resolution)
    }

    pub fn mirrored_x(&self) -> SpotLight {
        let flip = DVec3::new(-1.0, 1.0, 1.0);
        SpotLight {
            position: self.position * flip,
            direction: self.direction * flip,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_ray_and_reconstruction() {
        let cam = Camera {
            width: 4,
            height: 2,
            ..Camera::default()
        };
        let p = cam.perspective().unwrap();
        let mid = (p.ray(1, 0) + p.ray(2, 1)).normalize();
        assert!(mid.dot(p.forward) > 0.9);
        let q = p.reconstruct(3, 1, 2.5);
        assert!((p.view_depth(q) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn frustum_solid_angle() {
        // A 90° square frustum is one face of a cube: 4π/6.
        let p = Perspective::new(DVec3::ZERO, DVec3::Z, DVec3::Y, 1.0, 1.0, 8, 8).unwrap();
        assert!((p.solid_angle() - 4.0 * std::f64::consts::PI / 6.0).abs() < 1e-12);
    }

    #[test]
    fn falloff_shape() {
        let light = SpotLight {
            direction: DVec3::Z,
            cone_angle: 0.5,
            ..SpotLight::default()
        };
        assert_eq!(light.falloff(DVec3::Z), 1.0);
        let edge = DVec3::new(0.5f64.sin(), 0.0, 0.5f64.cos());
        assert!(light.falloff(edge).abs() < 1e-12);
        assert_eq!(light.falloff(-DVec3::Z), 0.0);
        assert!(SpotLight { cone_angle: 2.0, ..light.clone() }.validate().is_err());
        assert!(SpotLight { flux_scale: -1.0, ..light }.validate().is_err());
    }

    #[test]
    fn looking_straight_down() {
        let p = Perspective::new(DVec3::ZERO, -DVec3::Y, DVec3::Y, 1.0, 1.0, 2, 2).unwrap();
        assert!(p.right.is_finite() && (p.right.length() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mirrored_camera_mirrors_rays() {
        let cam = Camera {
            width: 6,
            height: 3,
            ..Camera::default()
        };
        let a = cam.perspective().unwrap();
        let b = cam.mirrored_x().perspective().unwrap();
        for y in 0..3 {
            for x in 0..6 {
                let r = a.ray(x, y);
                let m = b.ray(5 - x, y);
                assert!((DVec3::new(-r.x, r.y, r.z) - m).length() < 1e-12);
            }
        }
    }
}
