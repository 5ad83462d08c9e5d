use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use lpv_core::pipeline::{PhaseTimings, Pipeline};
use lpv_core::render::{write_image, Image, ImageFormat, Scene};

use crate::config::RunConfig;

/// Paths written by [`cmd_render`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderOutputs {
    pub final_image: PathBuf,
    pub indirect_image: PathBuf,
    pub timings: PathBuf,
}

pub fn write_scaled(img: &Image, path: &Path, format: ImageFormat, exposure: f64) -> Result<()> {
    let mut img = img.clone();
    if exposure != 1.0 {
        for p in img.pixels_mut() {
            for c in p.iter_mut() {
                *c *= exposure;
            }
        }
    }
    write_image(&img, path, format).with_context(|| format!("writing {}", path.display()))
}

pub fn timings_text(cfg: &RunConfig, t: &PhaseTimings) -> String {
    let p = &cfg.pipeline;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "basis {}, {} iterations, indirect shadows {}",
        p.basis,
        p.iterations,
        if p.indirect_shadows { "on" } else { "off" }
    );
    let _ = writeln!(out, "{:<18}{:>12}", "phase", "ms");
    let _ = writeln!(out, "{:<18}{:>12.3}", "rsm", t.rsm_ms);
    let _ = writeln!(out, "{:<18}{:>12.3}", "gbuffer", t.gbuffer_ms);
    for (k, v) in t.injection_ms.iter().enumerate() {
        let _ = writeln!(out, "{:<18}{:>12.3}", format!("injection[{k}]"), v);
    }
    for (k, v) in t.propagation_ms.iter().enumerate() {
        let _ = writeln!(out, "{:<18}{:>12.3}", format!("propagation[{k}]"), v);
    }
    let _ = writeln!(out, "{:<18}{:>12.3}", "light buffer", t.light_buffer_ms);
    let _ = writeln!(out, "{:<18}{:>12.3}", "total", t.total_ms());
    out
}

/// Renders one frame and writes `<basis>_final`, `<basis>_indirect` and
/// `<basis>_timings.txt` into the output directory.
pub fn cmd_render(cfg: &RunConfig) -> Result<RenderOutputs> {
    cfg.validate()?;
    let scene = Scene::load(&cfg.scene).with_context(|| format!("loading scene `{}`", cfg.scene))?;
    let pipeline = Pipeline::new(cfg.pipeline.clone())?;
    let frame = pipeline.render_frame(&scene, &cfg.light, &cfg.camera)?;

    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let stem = cfg.pipeline.basis.name();
    let ext = cfg.image_format.extension();
    let outputs = RenderOutputs {
        final_image: dir.join(format!("{stem}_final.{ext}")),
        indirect_image: dir.join(format!("{stem}_indirect.{ext}")),
        timings: dir.join(format!("{stem}_timings.txt")),
    };
    write_scaled(&frame.image, &outputs.final_image, cfg.image_format, cfg.exposure)?;
    write_scaled(&frame.indirect, &outputs.indirect_image, cfg.image_format, cfg.exposure)?;
    fs::write(&outputs.timings, timings_text(cfg, &frame.timings))
        .with_context(|| format!("writing {}", outputs.timings.display()))?;
    Ok(outputs)
}
