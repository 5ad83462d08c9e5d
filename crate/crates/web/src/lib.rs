//! wasm-bindgen bindings behind `www/index.html`.

use glam::DVec3;
use lpv_core::basis::{poisson_kernel, singular_integral, BasisKind, BasisSpec, EvalMode};
use lpv_core::pipeline::{Pipeline, PipelineConfig};
use lpv_core::render::{atrium_mini, Camera, SpotLight};
use wasm_bindgen::prelude::*;

fn basis_kind(name: &str) -> Result<BasisKind, String> {
    name.parse::<BasisKind>().map_err(|e| e.to_string())
}

/// `[θ, G(cos θ, λ), H(cos θ, λ, λ)]` triples for θ evenly spaced over [0, π].
pub fn kernel_curve_values(lambda: f64, samples: usize) -> Result<Vec<f64>, String> {
    if samples < 2 {
        return Err("need at least two samples".into());
    }
    let mut out = Vec::with_capacity(samples * 3);
    for i in 0..samples {
        let theta = std::f64::consts::PI * i as f64 / (samples - 1) as f64;
        let t = theta.cos();
        let g = poisson_kernel(t, lambda).map_err(|e| e.to_string())?;
        let h = singular_integral(t, lambda, lambda).map_err(|e| e.to_string())?;
        out.extend([theta, g, h]);
    }
    Ok(out)
}

/// Clamped cosine lobe about `axis` sampled around the great circle through
/// the axis and the axis' most perpendicular main direction:
/// `[φ, exact, approx]` triples for φ over [0, 2π).
pub fn lobe_profile_values(basis: &str, axis: [f64; 3], samples: usize) -> Result<Vec<f64>, String> {
    let axis = DVec3::from_array(axis);
    if !(axis.is_finite() && axis.length() > 0.0) {
        return Err("axis must be a finite nonzero vector".into());
    }
    if samples == 0 {
        return Err("need at least one sample".into());
    }
    let axis = axis.normalize();
    let spec = BasisSpec::new(basis_kind(basis)?).map_err(|e| e.to_string())?;
    let lobe = spec
        .clamped_cosine_lobe(axis, EvalMode::Table)
        .map_err(|e| e.to_string())?;
    let helper = if axis.x.abs() < 0.9 { DVec3::X } else { DVec3::Y };
    let side = (helper - axis * axis.dot(helper)).normalize();
    let mut out = Vec::with_capacity(samples * 3);
    for i in 0..samples {
        let phi = std::f64::consts::TAU * i as f64 / samples as f64;
        let d = (axis * phi.cos() + side * phi.sin()).normalize();
        let approx = spec
            .evaluate(lobe.values(), d, EvalMode::Table)
            .map_err(|e| e.to_string())?;
        out.extend([phi, phi.cos().max(0.0), approx]);
    }
    Ok(out)
}

/// Preview render of atrium-mini as RGBA bytes.
pub fn render_preview_rgba(
    basis: &str,
    indirect_shadows: bool,
    iterations: usize,
    cells: usize,
    width: usize,
    height: usize,
) -> Result<Vec<u8>, String> {
    let mut config = PipelineConfig {
        basis: basis_kind(basis)?,
        iterations,
        indirect_shadows,
        rsm_resolution: 128,
        ..PipelineConfig::default()
    };
    config.cascades.cell_count = cells;
    let camera = Camera {
        width,
        height,
        ..Camera::default()
    };
    let frame = Pipeline::new(config)
        .and_then(|p| p.render_frame(&atrium_mini(), &SpotLight::default(), &camera))
        .map_err(|e| e.to_string())?;
    let rgb = frame.image.to_rgb8();
    let mut rgba = Vec::with_capacity(width * height * 4);
    for p in rgb.chunks_exact(3) {
        rgba.extend([p[0], p[1], p[2], 255]);
    }
    Ok(rgba)
}

#[wasm_bindgen]
pub fn kernel_curve(lambda: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    kernel_curve_values(lambda, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn lobe_profile(basis: &str, x: f64, y: f64, z: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    lobe_profile_values(basis, [x, y, z], samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn render_preview(
    basis: &str,
    indirect_shadows: bool,
    iterations: usize,
    cells: usize,
    width: usize,
    height: usize,
) -> Result<Vec<u8>, JsError> {
    render_preview_rgba(basis, indirect_shadows, iterations, cells, width, height).map_err(|e| JsError::new(&e))
}
