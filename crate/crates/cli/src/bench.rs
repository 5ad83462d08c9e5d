use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use lpv_core::basis::BasisKind;
use lpv_core::pipeline::{timing_report, PhaseTimings, Pipeline, PipelineConfig, TimingRow};
use lpv_core::render::{render_gbuffer, render_rsm, Scene};

use crate::config::RunConfig;

pub const DEFAULT_WARMUP: usize = 5;
pub const DEFAULT_FRAMES: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    pub bases: Vec<BasisKind>,
    pub warmup: usize,
    pub frames: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            bases: vec![BasisKind::Sh2, BasisKind::Srbf4, BasisKind::Srbf8v2],
            warmup: DEFAULT_WARMUP,
            frames: DEFAULT_FRAMES,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<TimingRow>,
    /// Whether propagation got strictly slower down the basis list, in every
    /// cascade, with and without shadows. `None` for a single basis.
    pub ordering: Option<bool>,
    pub text: String,
}

fn strictly_increasing(rows: &[TimingRow], pick: impl Fn(&TimingRow) -> &PhaseTimings) -> bool {
    rows.windows(2).all(|w| {
        let (a, b) = (pick(&w[0]), pick(&w[1]));
        a.propagation_ms.iter().zip(&b.propagation_ms).all(|(x, y)| x < y)
    })
}

/// Times injection, propagation and gathering per basis, with and without
/// indirect shadows. The RSM and G-buffer are rendered once up front; they
/// do not depend on the basis.
pub fn cmd_bench(cfg: &RunConfig, opts: &BenchOptions) -> Result<BenchReport> {
    cfg.validate()?;
    if opts.bases.is_empty() {
        bail!("bench needs at least one basis");
    }
    if opts.frames == 0 {
        bail!("bench needs at least one measured frame");
    }
    let scene = Scene::load(&cfg.scene).with_context(|| format!("loading scene `{}`", cfg.scene))?;
    let rsm = render_rsm(&scene, &cfg.light, cfg.pipeline.rsm_resolution)?;
    let gbuffer = render_gbuffer(&scene, &cfg.camera, std::slice::from_ref(&cfg.light))?;

    let mut rows = Vec::with_capacity(opts.bases.len());
    for &basis in &opts.bases {
        let mut medians = [PhaseTimings::default(), PhaseTimings::default()];
        for (slot, shadows) in medians.iter_mut().zip([true, false]) {
            let pipeline = Pipeline::new(PipelineConfig {
                basis,
                lambda: if basis.is_srbf() { cfg.pipeline.lambda } else { None },
                indirect_shadows: shadows,
                ..cfg.pipeline.clone()
            })?;
            for _ in 0..opts.warmup {
                pipeline.render_volume(&rsm, &gbuffer, &cfg.camera)?;
            }
            let mut frames = Vec::with_capacity(opts.frames);
            for _ in 0..opts.frames {
                frames.push(pipeline.render_volume(&rsm, &gbuffer, &cfg.camera)?.timings);
            }
            *slot = PhaseTimings::median(&frames);
        }
        let [with_shadows, without_shadows] = medians;
        rows.push(TimingRow {
            label: basis.name().to_uppercase().replace("V", "v"),
            with_shadows,
            without_shadows,
        });
    }

    let mut text = timing_report(&rows);
    let names: Vec<&str> = opts.bases.iter().map(|b| b.name()).collect();
    let _ = writeln!(
        text,
        "\n{} warmup + {} measured frames, median; {}³ cells, {} iterations, {} threads",
        opts.warmup,
        opts.frames,
        cfg.pipeline.cascades.cell_count,
        cfg.pipeline.iterations,
        match cfg.pipeline.threads {
            0 => "all".to_string(),
            n => n.to_string(),
        }
    );
    let ordering = if rows.len() > 1 {
        let with = strictly_increasing(&rows, |r| &r.with_shadows);
        let without = strictly_increasing(&rows, |r| &r.without_shadows);
        let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
        let order = names.join(" < ");
        let _ = writeln!(text, "propagation {order} (with indirect shadows): {}", verdict(with));
        let _ = writeln!(text, "propagation {order} (without indirect shadows): {}", verdict(without));
        Some(with && without)
    } else {
        let _ = writeln!(text, "propagation ordering: n/a (one basis)");
        None
    };
    Ok(BenchReport { rows, ordering, text })
}
