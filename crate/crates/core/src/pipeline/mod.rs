//! Injection, propagation and gathering wired into a frame renderer.

mod gather;
mod inject;
mod propagate;
mod timings;

use glam::DVec3;
use serde::{Deserialize, Serialize};
use web_time::Instant;

use crate::basis::{BasisKind, BasisOptions, BasisSpec, EvalMode};
use crate::error::{invalid, Result};
use crate::exec;
use crate::grid::{CascadeConfig, CascadeSet};
use crate::render::{self, Camera, GBuffer, Image, Rsm, Scene, SpotLight};

pub use gather::{gather, gather_point};
pub use inject::{inject_geometry, inject_light};
pub use propagate::{face_solid_angle, propagate, Transfer, AXES};
pub use timings::{timing_report, PhaseTimings, TimingRow};

/// Which hemisphere of the volume's distribution a surface reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GatherDirection {
    /// Evaluate at −normal: light travelling toward the surface.
    #[default]
    Incoming,
    /// Evaluate at +normal.
    Outgoing,
}

/// Scale of the lobe a face receives: `I · ΔΩ / divisor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceWeight {
    /// `ΔΩ / π`: the re-emitted cosine lobe carries the flux `I · ΔΩ`
    /// that reached the face.
    #[default]
    Pi,
    /// `ΔΩ / 4π`: a quarter of that flux survives each step.
    FourPi,
}

impl FaceWeight {
    pub fn divisor(self) -> f64 {
        match self {
            FaceWeight::Pi => std::f64::consts::PI,
            FaceWeight::FourPi => 4.0 * std::f64::consts::PI,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub basis: BasisKind,
    /// Overrides the basis' default kernel width (SRBF only).
    pub lambda: Option<f64>,
    pub iterations: usize,
    pub indirect_shadows: bool,
    pub cascades: CascadeConfig,
    /// Shift each virtual point light half a cell along its normal.
    pub half_cell_offset: bool,
    /// Clamp negative lobe values during propagation and gathering.
    pub clamp_negative: bool,
    pub gather_direction: GatherDirection,
    pub face_weight: FaceWeight,
    pub rsm_resolution: usize,
    /// 0 = all cores, 1 = single thread.
    pub threads: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            basis: BasisKind::Sh2,
            lambda: None,
            iterations: 8,
            indirect_shadows: true,
            cascades: CascadeConfig::default(),
            half_cell_offset: true,
            clamp_negative: true,
            gather_direction: GatherDirection::Incoming,
            face_weight: FaceWeight::Pi,
            rsm_resolution: render::DEFAULT_RSM_RESOLUTION,
            threads: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(invalid("iterations must be at least 1"));
        }
        if self.rsm_resolution < 1 {
            return Err(invalid("rsm resolution must be at least 1"));
        }
        if self.lambda.is_some() && !self.basis.is_srbf() {
            return Err(invalid("lambda only applies to SRBF bases"));
        }
        self.cascades.validate()
    }
}

/// A basis plus the per-basis constants propagation needs: cosine lobes
/// about the six axes and the 30 source-to-face transfers.
#[derive(Debug, Clone)]
pub struct VolumeBasis {
    spec: BasisSpec,
    axis_lobes: [Vec<f32>; 6],
}

impl VolumeBasis {
    pub fn new(spec: BasisSpec) -> Result<Self> {
        let mut axis_lobes: [Vec<f32>; 6] = Default::default();
        for (lobe, axis) in axis_lobes.iter_mut().zip(AXES) {
            *lobe = spec.clamped_cosine_lobe(axis.as_dvec3(), EvalMode::Table)?.to_f32();
        }
        Ok(Self { spec, axis_lobes })
    }

    pub fn from_config(config: &PipelineConfig) -> Result<Self> {
        let options = BasisOptions {
            lambda: config.lambda,
            ..BasisOptions::default()
        };
        Self::new(BasisSpec::with_options(config.basis, &options)?)
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn coefficient_count(&self) -> usize {
        self.spec.coefficient_count()
    }

    pub(crate) fn axis_lobe(&self, axis: usize) -> &[f32] {
        &self.axis_lobes[axis]
    }

    /// Clamped cosine lobe about a unit `normal`.
    pub(crate) fn lobe(&self, normal: DVec3) -> Vec<f32> {
        self.spec
            .clamped_cosine_lobe(normal, EvalMode::Table)
            .map(|c| c.to_f32())
            .unwrap_or_else(|_| vec![0.0; self.coefficient_count()])
    }

    /// Integral of the reconstructed function over the sphere.
    pub fn sphere_integral(&self, coeffs: &[f32]) -> f64 {
        if self.spec.is_srbf() {
            // Every Abel-Poisson kernel integrates to 4π.
            4.0 * std::f64::consts::PI * coeffs.iter().map(|c| *c as f64).sum::<f64>()
        } else {
            (4.0 * std::f64::consts::PI).sqrt() * coeffs[0] as f64
        }
    }
}

/// Sphere integral of one channel summed over every cell of a cascade.
pub fn volume_energy(basis: &VolumeBasis, cascades: &CascadeSet, cascade: usize, channel: usize) -> f64 {
    let grid = &cascades.light[cascade];
    let m = grid.coeff_count();
    grid.data()
        .chunks_exact(grid.cell_stride())
        .map(|cell| basis.sphere_integral(&cell[channel * m..(channel + 1) * m]))
        .sum()
}

/// Everything one frame produces.
#[derive(Debug, Clone)]
pub struct FrameOutput {
    pub image: Image,
    pub indirect: Image,
    pub direct: Image,
    pub rsm: Rsm,
    pub gbuffer: GBuffer,
    pub cascades: CascadeSet,
    pub timings: PhaseTimings,
}

/// Reusable renderer; building the basis happens once.
#[derive(Debug, Clone)]
pub struct Pipeline {
    config: PipelineConfig,
    basis: VolumeBasis,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self> {
        config.validate()?;
        let basis = VolumeBasis::from_config(&config)?;
        Ok(Self { config, basis })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn basis(&self) -> &VolumeBasis {
        &self.basis
    }

    /// Cascades for a frame, anchored at the camera.
    pub fn cascades_for(&self, camera: &Camera) -> Result<CascadeSet> {
        let mut cfg = self.config.cascades.clone();
        cfg.anchor = camera.position.to_array();
        CascadeSet::new(cfg, self.basis.coefficient_count())
    }

    /// RSM → G-buffer → injection → propagation → gathering → composition.
    pub fn render_frame(&self, scene: &Scene, light: &SpotLight, camera: &Camera) -> Result<FrameOutput> {
        exec::with_threads(self.config.threads, || self.render_frame_inner(scene, light, camera))
    }

    fn render_frame_inner(&self, scene: &Scene, light: &SpotLight, camera: &Camera) -> Result<FrameOutput> {
        let start = Instant::now();
        let rsm = render::render_rsm(scene, light, self.config.rsm_resolution)?;
        let rsm_ms = ms_since(start);

        let start = Instant::now();
        let gbuffer = render::render_gbuffer(scene, camera, std::slice::from_ref(light))?;
        let gbuffer_ms = ms_since(start);

        let VolumeOutput {
            cascades,
            indirect,
            mut timings,
        } = self.render_volume_inner(&rsm, &gbuffer, camera)?;
        timings.rsm_ms = rsm_ms;
        timings.gbuffer_ms = gbuffer_ms;
        let image = render::compose(&gbuffer, &indirect)?;
        Ok(FrameOutput {
            image,
            indirect,
            direct: gbuffer.direct_image(),
            rsm,
            gbuffer,
            cascades,
            timings,
        })
    }
}

impl Pipeline {
    /// Injection, propagation and gathering on existing light and camera
    /// buffers. The raster timings in the result are zero.
    pub fn render_volume(&self, rsm: &Rsm, gbuffer: &GBuffer, camera: &Camera) -> Result<VolumeOutput> {
        exec::with_threads(self.config.threads, || self.render_volume_inner(rsm, gbuffer, camera))
    }

    fn render_volume_inner(&self, rsm: &Rsm, gbuffer: &GBuffer, camera: &Camera) -> Result<VolumeOutput> {
        let cfg = &self.config;
        let mut timings = PhaseTimings::new(cfg.cascades.cascade_count());
        let mut cascades = self.cascades_for(camera)?;
        let light_ms = inject_light(rsm, &mut cascades, &self.basis, cfg);
        let geometry_ms = if cfg.indirect_shadows {
            inject_geometry(Some(rsm), Some(gbuffer), &mut cascades, &self.basis)
        } else {
            vec![0.0; cascades.cascade_count()]
        };
        for (k, (l, g)) in light_ms.iter().zip(&geometry_ms).enumerate() {
            timings.injection_ms[k] = l + g;
        }
        timings.propagation_ms = propagate(&mut cascades, &self.basis, cfg);
        let (indirect, gather_ms) = gather(gbuffer, &cascades, &self.basis, cfg);
        timings.light_buffer_ms = gather_ms;
        Ok(VolumeOutput {
            cascades,
            indirect,
            timings,
        })
    }
}

/// Result of [`Pipeline::render_volume`].
#[derive(Debug, Clone)]
pub struct VolumeOutput {
    pub cascades: CascadeSet,
    pub indirect: Image,
    pub timings: PhaseTimings,
}

/// One-shot convenience around [`Pipeline`].
pub fn render_frame(scene: &Scene, light: &SpotLight, camera: &Camera, config: &PipelineConfig) -> Result<FrameOutput> {
    Pipeline::new(config.clone())?.render_frame(scene, light, camera)
}

pub(crate) fn ms_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}
