use std::path::Path;

use anyhow::{Context, Result};
use lpv_core::render::{diff_image, read_image, write_image, Image, ImageFormat};

pub const DEFAULT_GAIN: f64 = 15.0;

/// `|a − b| · gain` per channel, written to `out` (format from its
/// extension).
pub fn cmd_diff(a: &Path, b: &Path, gain: f64, out: &Path) -> Result<Image> {
    let format = ImageFormat::from_path(out)?;
    let ia = read_image(a).with_context(|| format!("reading {}", a.display()))?;
    let ib = read_image(b).with_context(|| format!("reading {}", b.display()))?;
    let diff = diff_image(&ia, &ib, gain)
        .with_context(|| format!("comparing {} and {}", a.display(), b.display()))?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_image(&diff, out, format).with_context(|| format!("writing {}", out.display()))?;
    Ok(diff)
}
