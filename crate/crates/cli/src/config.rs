use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use lpv_core::basis::BasisKind;
use lpv_core::grid::Precision;
use lpv_core::pipeline::{FaceWeight, GatherDirection, PipelineConfig};
use lpv_core::render::{Camera, ImageFormat, SpotLight};
use serde::{Deserialize, Serialize};

/// Overrides `output_dir` when set.
pub const OUT_DIR_ENV: &str = "LPV_OUT_DIR";

/// Everything a render or bench run needs. Unset fields take their
/// defaults, which reproduce the reference setup: 3 cascades of 32³ cells,
/// 8 iterations, a 256² RSM and a 960×540 frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// `atrium-mini` or a path to an OBJ file.
    pub scene: String,
    pub light: SpotLight,
    pub camera: Camera,
    pub pipeline: PipelineConfig,
    pub output_dir: PathBuf,
    pub image_format: ImageFormat,
    /// Multiplier applied to written images.
    pub exposure: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scene: "atrium-mini".into(),
            light: SpotLight::default(),
            camera: Camera::default(),
            pipeline: PipelineConfig::default(),
            output_dir: PathBuf::from("out"),
            image_format: ImageFormat::Png,
            exposure: 1.0,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.pipeline.validate()?;
        self.light.validate()?;
        self.camera.perspective()?;
        if self.camera.width == 0 || self.camera.height == 0 {
            bail!("image size must be positive");
        }
        if !(self.exposure.is_finite() && self.exposure > 0.0) {
            bail!("exposure must be positive");
        }
        Ok(())
    }
}

fn parse_extents(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}")))
        .collect()
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    match s {
        "full" => Ok(Precision::Full),
        "half" => Ok(Precision::Half),
        _ => Err(format!("`{s}`: expected full or half")),
    }
}

fn parse_format(s: &str) -> Result<ImageFormat, String> {
    match s {
        "png" => Ok(ImageFormat::Png),
        "ppm" => Ok(ImageFormat::Ppm),
        _ => Err(format!("`{s}`: expected png or ppm")),
    }
}

fn parse_gather(s: &str) -> Result<GatherDirection, String> {
    match s {
        "incoming" => Ok(GatherDirection::Incoming),
        "outgoing" => Ok(GatherDirection::Outgoing),
        _ => Err(format!("`{s}`: expected incoming or outgoing")),
    }
}

fn parse_face_weight(s: &str) -> Result<FaceWeight, String> {
    match s {
        "pi" => Ok(FaceWeight::Pi),
        "four_pi" | "four-pi" => Ok(FaceWeight::FourPi),
        _ => Err(format!("`{s}`: expected pi or four_pi")),
    }
}

/// Flags layered over the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON config file; flags override its fields.
    #[arg(long, short = 'c')]
    pub config: Option<PathBuf>,
    /// `atrium-mini` or an OBJ path.
    #[arg(long)]
    pub scene: Option<String>,
    #[arg(long, value_parser = clap::value_parser!(BasisKind))]
    pub basis: Option<BasisKind>,
    /// SRBF kernel width.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long, value_name = "BOOL")]
    pub indirect_shadows: Option<bool>,
    /// Cascade edge lengths in meters, finest first.
    #[arg(long, value_parser = parse_extents, value_name = "A,B,..")]
    pub extents: Option<Vec<f64>>,
    /// Cells per cascade axis.
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long, value_parser = parse_precision, value_name = "full|half")]
    pub precision: Option<Precision>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    #[arg(long)]
    pub rsm_resolution: Option<usize>,
    #[arg(long, value_name = "BOOL")]
    pub half_cell_offset: Option<bool>,
    #[arg(long, value_name = "BOOL")]
    pub clamp_negative: Option<bool>,
    #[arg(long, value_parser = parse_gather, value_name = "incoming|outgoing")]
    pub gather: Option<GatherDirection>,
    #[arg(long, value_parser = parse_face_weight, value_name = "pi|four_pi")]
    pub face_weight: Option<FaceWeight>,
    /// 0 = all cores, 1 = deterministic single thread.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = parse_format, value_name = "png|ppm")]
    pub format: Option<ImageFormat>,
    #[arg(long)]
    pub exposure: Option<f64>,
}

impl Overrides {
    /// Defaults, then the config file, then the environment, then flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(dir) = std::env::var_os(OUT_DIR_ENV) {
            cfg.output_dir = dir.into();
        }
        self.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&self, cfg: &mut RunConfig) {
        let p = &mut cfg.pipeline;
        if let Some(v) = &self.scene {
            cfg.scene = v.clone();
        }
        if let Some(v) = self.basis {
            p.basis = v;
            if !v.is_srbf() {
                p.lambda = None;
            }
        }
        if let Some(v) = self.lambda {
            p.lambda = Some(v);
        }
        if let Some(v) = self.iterations {
            p.iterations = v;
        }
        if let Some(v) = self.indirect_shadows {
            p.indirect_shadows = v;
        }
        if let Some(v) = &self.extents {
            p.cascades.extents = v.clone();
        }
        if let Some(v) = self.cells {
            p.cascades.cell_count = v;
        }
        if let Some(v) = self.precision {
            p.cascades.precision = v;
        }
        if let Some(v) = self.rsm_resolution {
            p.rsm_resolution = v;
        }
        if let Some(v) = self.half_cell_offset {
            p.half_cell_offset = v;
        }
        if let Some(v) = self.clamp_negative {
            p.clamp_negative = v;
        }
        if let Some(v) = self.gather {
            p.gather_direction = v;
        }
        if let Some(v) = self.face_weight {
            p.face_weight = v;
        }
        if let Some(v) = self.threads {
            p.threads = v;
        }
        if let Some(v) = self.width {
            cfg.camera.width = v;
        }
        if let Some(v) = self.height {
            cfg.camera.height = v;
        }
        if let Some(v) = &self.out {
            cfg.output_dir = v.clone();
        }
        if let Some(v) = self.format {
            cfg.image_format = v;
        }
        if let Some(v) = self.exposure {
            cfg.exposure = v;
        }
    }
}
