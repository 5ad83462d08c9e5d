use std::f64::consts::PI;

use glam::DVec3;

use super::image::Image;
use super::scene::Scene;
use super::view::{Camera, Perspective, SpotLight};
use crate::error::Result;
use crate::exec;

pub const DEFAULT_RSM_RESOLUTION: usize = 256;

/// Offset applied along the surface normal before tracing shadow rays.
const SHADOW_BIAS: f64 = 1e-5;

/// Reflective shadow map: every lit texel is a virtual point light.
#[derive(Debug, Clone, PartialEq)]
pub struct Rsm {
    pub frustum: Perspective,
    /// View-space depth; 0 where the ray escaped.
    pub depth: Vec<f32>,
    pub position: Vec<DVec3>,
    /// Unit normal facing the light.
    pub normal: Vec<DVec3>,
    pub flux: Vec<DVec3>,
    /// Solid angle each texel's flux is weighted by: the frustum's solid
    /// angle shared evenly.
    pub texel_solid_angle: f64,
}

impl Rsm {
    pub fn resolution(&self) -> usize {
        self.frustum.width
    }

    pub fn is_hit(&self, i: usize) -> bool {
        self.depth[i] > 0.0
    }

    pub fn total_flux(&self) -> DVec3 {
        self.flux.iter().sum()
    }

    pub fn reconstruct_position(&self, i: usize) -> DVec3 {
        let r = self.resolution();
        self.frustum.reconstruct(i % r, i / r, self.depth[i] as f64)
    }
}

/// One ray per texel through the light's frustum. Texel flux is
/// `albedo · intensity · falloff · Ω_frustum / texel_count`.
pub fn render_rsm(scene: &Scene, light: &SpotLight, resolution: usize) -> Result<Rsm> {
    let frustum = light.frustum(resolution)?;
    let texel_solid_angle = frustum.solid_angle() / (resolution * resolution) as f64;
    let intensity = light.intensity();
    let texels = exec::map_range(resolution * resolution, |i| {
        let dir = frustum.ray(i % resolution, i / resolution);
        match scene.raycast(frustum.origin, dir) {
            Some(hit) => {
                let falloff = light.falloff(dir);
                let flux = scene.albedo(hit.material) * intensity * (falloff * texel_solid_angle);
                (frustum.view_depth(hit.position) as f32, hit.position, hit.facing_normal(dir), flux)
            }
            None => (0.0, DVec3::ZERO, DVec3::ZERO, DVec3::ZERO),
        }
    });
    let mut rsm = Rsm {
        frustum,
        depth: Vec::with_capacity(texels.len()),
        position: Vec::with_capacity(texels.len()),
        normal: Vec::with_capacity(texels.len()),
        flux: Vec::with_capacity(texels.len()),
        texel_solid_angle,
    };
    for (d, p, n, f) in texels {
        rsm.depth.push(d);
        rsm.position.push(p);
        rsm.normal.push(n);
        rsm.flux.push(f);
    }
    Ok(rsm)
}

/// Camera-view surface attributes and direct lighting.
#[derive(Debug, Clone, PartialEq)]
pub struct GBuffer {
    pub view: Perspective,
    pub hit: Vec<bool>,
    pub position: Vec<DVec3>,
    /// Unit normal facing the camera.
    pub normal: Vec<DVec3>,
    pub albedo: Vec<DVec3>,
    /// Outgoing direct radiance.
    pub direct: Vec<DVec3>,
    /// View-space depth; 0 for background.
    pub depth: Vec<f64>,
}

impl GBuffer {
    pub fn width(&self) -> usize {
        self.view.width
    }

    pub fn height(&self) -> usize {
        self.view.height
    }

    pub fn len(&self) -> usize {
        self.hit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hit.is_empty()
    }

    pub fn direct_image(&self) -> Image {
        let px = self.direct.iter().map(|d| d.to_array()).collect();
        Image::from_pixels(self.width(), self.height(), px).expect("buffer sizes agree")
    }

    /// Surface area one pixel covers at its hit point.
    pub fn pixel_area(&self, i: usize) -> f64 {
        if !self.hit[i] {
            return 0.0;
        }
        let to = self.position[i] - self.view.origin;
        let cos = self.normal[i].dot(-to.normalize()).abs().max(MIN_PROJECTED_COS);
        let w = self.width();
        self.view.pixel_solid_angle(i % w, i / w) * to.length_squared() / cos
    }
}

/// Grazing samples are clamped so their footprint stays bounded.
pub const MIN_PROJECTED_COS: f64 = 0.2;

impl Rsm {
    /// Surface area one texel covers at its hit point.
    pub fn texel_area(&self, i: usize) -> f64 {
        if !self.is_hit(i) {
            return 0.0;
        }
        let to = self.position[i] - self.frustum.origin;
        let cos = self.normal[i].dot(-to.normalize()).abs().max(MIN_PROJECTED_COS);
        let r = self.resolution();
        self.frustum.pixel_solid_angle(i % r, i / r) * to.length_squared() / cos
    }
}

/// Direct radiance at a surface point from one spot light:
/// `albedo/π · I · max(n·l, 0) · falloff / r²`, zero when shadowed.
pub fn direct_radiance(scene: &Scene, light: &SpotLight, p: DVec3, n: DVec3, albedo: DVec3) -> DVec3 {
    let to_light = light.position - p;
    let dist = to_light.length();
    if dist <= 0.0 {
        return DVec3::ZERO;
    }
    let l = to_light / dist;
    let cos = n.dot(l);
    let falloff = light.falloff(-l);
    if cos <= 0.0 || falloff <= 0.0 {
        return DVec3::ZERO;
    }
    let origin = p + n * SHADOW_BIAS;
    if scene.occluded(origin, l, dist - 2.0 * SHADOW_BIAS) {
        return DVec3::ZERO;
    }
    albedo / PI * light.intensity() * (cos * falloff / (dist * dist))
}

pub fn render_gbuffer(scene: &Scene, camera: &Camera, lights: &[SpotLight]) -> Result<GBuffer> {
    let view = camera.perspective()?;
    for l in lights {
        l.validate()?;
    }
    let (w, h) = (view.width, view.height);
    let rows = exec::map_range(h, |y| {
        (0..w)
            .map(|x| {
                let dir = view.ray(x, y);
                scene.raycast(view.origin, dir).map(|hit| {
                    let n = hit.facing_normal(dir);
                    let albedo = scene.albedo(hit.material);
                    let direct = lights
                        .iter()
                        .map(|l| direct_radiance(scene, l, hit.position, n, albedo))
                        .sum::<DVec3>();
                    (hit.position, n, albedo, direct, view.view_depth(hit.position))
                })
            })
            .collect::<Vec<_>>()
    });
    let n = w * h;
    let mut g = GBuffer {
        view,
        hit: Vec::with_capacity(n),
        position: Vec::with_capacity(n),
        normal: Vec::with_capacity(n),
        albedo: Vec::with_capacity(n),
        direct: Vec::with_capacity(n),
        depth: Vec::with_capacity(n),
    };
    for px in rows.into_iter().flatten() {
        let (p, nn, a, d, z) = px.unwrap_or((DVec3::ZERO, DVec3::ZERO, DVec3::ZERO, DVec3::ZERO, 0.0));
        g.hit.push(px.is_some());
        g.position.push(p);
        g.normal.push(nn);
        g.albedo.push(a);
        g.direct.push(d);
        g.depth.push(z);
    }
    Ok(g)
}

/// `direct + albedo/π · indirect` per surface pixel; background stays black.
pub fn compose(gbuffer: &GBuffer, indirect: &Image) -> Result<Image> {
    let mut out = Image::new(gbuffer.width(), gbuffer.height());
    out.same_size(indirect)?;
    for (i, px) in out.pixels_mut().iter_mut().enumerate() {
        if !gbuffer.hit[i] {
            continue;
        }
        let e = DVec3::from(indirect.pixels()[i]);
        *px = (gbuffer.direct[i] + gbuffer.albedo[i] / PI * e).to_array();
    }
    Ok(out)
}
