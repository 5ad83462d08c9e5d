use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use glam::DVec3;
use lpv_core::basis::quadrature::fibonacci_sphere;
use lpv_core::basis::{BasisKind, BasisSpec, EvalMode};

use crate::mesh;

pub const DEFAULT_SAMPLES: usize = 2000;
pub const DEFAULT_SUBDIVISIONS: usize = 3;

/// A lobe axis with a name usable in file names.
#[derive(Debug, Clone, PartialEq)]
pub struct LobeAxis {
    pub label: String,
    pub direction: DVec3,
}

impl LobeAxis {
    pub fn new(label: impl Into<String>, v: DVec3) -> Result<Self> {
        if !(v.is_finite() && v.length() > 0.0) {
            bail!("axis must be a finite nonzero vector");
        }
        Ok(Self {
            label: label.into(),
            direction: v.normalize(),
        })
    }

    /// The six main axes and normalize(−2, 1, −3).
    pub fn defaults() -> Vec<LobeAxis> {
        let named = ["+x", "-x", "+y", "-y", "+z", "-z"];
        let mut axes: Vec<LobeAxis> = named.iter().map(|n| n.parse().expect("named axis")).collect();
        axes.push("-2,1,-3".parse().expect("literal axis"));
        axes
    }
}

impl FromStr for LobeAxis {
    type Err = anyhow::Error;

    /// `+x`, `-z`, ... or three comma-separated components.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let named = match s {
            "+x" | "x" => Some(DVec3::X),
            "-x" => Some(-DVec3::X),
            "+y" | "y" => Some(DVec3::Y),
            "-y" => Some(-DVec3::Y),
            "+z" | "z" => Some(DVec3::Z),
            "-z" => Some(-DVec3::Z),
            _ => None,
        };
        if let Some(v) = named {
            let label = if s.len() == 1 { format!("+{s}") } else { s.to_string() };
            return LobeAxis::new(label, v);
        }
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .with_context(|| format!("axis `{s}`"))?;
        let [x, y, z] = parts[..] else {
            bail!("axis `{s}`: expected three components");
        };
        let label = parts.iter().map(|p| format!("{p}")).collect::<Vec<_>>().join(",");
        LobeAxis::new(format!("({label})"), DVec3::new(x, y, z))
    }
}

fn file_label(label: &str) -> String {
    label
        .chars()
        .filter_map(|c| match c {
            '+' => Some('p'),
            '-' => Some('m'),
            ',' => Some('_'),
            '(' | ')' | ' ' => None,
            c => Some(c),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LobeOptions {
    pub bases: Vec<BasisKind>,
    pub axes: Vec<LobeAxis>,
    pub samples: usize,
    pub subdivisions: usize,
}

impl Default for LobeOptions {
    fn default() -> Self {
        Self {
            bases: BasisKind::ALL.to_vec(),
            axes: LobeAxis::defaults(),
            samples: DEFAULT_SAMPLES,
            subdivisions: DEFAULT_SUBDIVISIONS,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LobeReport {
    /// `rms[basis][axis]`, in option order.
    pub rms: Vec<Vec<f64>>,
    pub csv: PathBuf,
    pub meshes: Vec<PathBuf>,
    pub summary: String,
}

/// Samples every basis's clamped cosine lobe about every axis: one CSV of
/// `(direction, exact, approximation, error)` rows (the axis, then a
/// Fibonacci point set), one OBJ per lobe with
/// vertices pushed out to `max(value, 0)`, and an RMS table. Lobes are
/// rotated and evaluated through the kernel tables.
pub fn cmd_lobe(opts: &LobeOptions, out_dir: &Path) -> Result<LobeReport> {
    if opts.bases.is_empty() || opts.axes.is_empty() {
        bail!("lobe needs at least one basis and one axis");
    }
    if opts.samples == 0 {
        bail!("lobe needs at least one sample direction");
    }
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let dirs = fibonacci_sphere(opts.samples);
    let (sphere, faces) = mesh::icosphere(opts.subdivisions);
    let mode = EvalMode::Table;

    let mut csv = String::from("basis,axis,dx,dy,dz,exact,approx,error\n");
    let mut rms = Vec::with_capacity(opts.bases.len());
    let mut meshes = Vec::new();
    for &kind in &opts.bases {
        let spec = BasisSpec::new(kind)?;
        let mut row = Vec::with_capacity(opts.axes.len());
        for axis in &opts.axes {
            let lobe = spec.clamped_cosine_lobe(axis.direction, mode)?;
            let c = lobe.values();
            let mut sq = 0.0;
            // The axis itself leads each block; the RMS uses the point set.
            for (i, d) in std::iter::once(&axis.direction).chain(&dirs).enumerate() {
                let exact = d.dot(axis.direction).max(0.0);
                let approx = spec.evaluate(c, *d, mode)?;
                if i > 0 {
                    sq += (approx - exact).powi(2);
                }
                let _ = writeln!(
                    csv,
                    "{kind},\"{}\",{:.6},{:.6},{:.6},{exact:.6},{approx:.6},{:.6}",
                    axis.label,
                    d.x,
                    d.y,
                    d.z,
                    approx - exact
                );
            }
            row.push((sq / dirs.len() as f64).sqrt());

            let vertices = sphere
                .iter()
                .map(|d| Ok(*d * spec.evaluate(c, *d, mode)?.max(0.0)))
                .collect::<Result<Vec<_>>>()?;
            let path = out_dir.join(format!("lobe_{kind}_{}.obj", file_label(&axis.label)));
            let header = format!("{kind} clamped cosine lobe about {}", axis.label);
            fs::write(&path, mesh::to_obj(&header, &vertices, &faces))
                .with_context(|| format!("writing {}", path.display()))?;
            meshes.push(path);
        }
        rms.push(row);
    }

    let csv_path = out_dir.join("lobes.csv");
    fs::write(&csv_path, csv).with_context(|| format!("writing {}", csv_path.display()))?;
    let summary = rms_table(opts, &rms);
    fs::write(out_dir.join("lobe_rms.txt"), &summary).context("writing lobe_rms.txt")?;
    Ok(LobeReport {
        rms,
        csv: csv_path,
        meshes,
        summary,
    })
}

fn rms_table(opts: &LobeOptions, rms: &[Vec<f64>]) -> String {
    let w = opts.axes.iter().map(|a| a.label.len()).max().unwrap_or(0).max(8) + 2;
    let mut out = format!("RMS error of the clamped cosine lobe ({} directions)\n", opts.samples);
    let _ = write!(out, "{:<9}", "basis");
    for a in &opts.axes {
        let _ = write!(out, "{:>w$}", a.label);
    }
    out.push('\n');
    for (kind, row) in opts.bases.iter().zip(rms) {
        let _ = write!(out, "{:<9}", kind.name());
        for v in row {
            let _ = write!(out, "{v:>w$.5}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parsing() {
        let a: LobeAxis = "-2,1,-3".parse().unwrap();
        assert_eq!(a.label, "(-2,1,-3)");
        assert!((a.direction - DVec3::new(-2.0, 1.0, -3.0).normalize()).length() < 1e-15);
        assert_eq!("z".parse::<LobeAxis>().unwrap().label, "+z");
        assert!("1,2".parse::<LobeAxis>().is_err());
        assert!("0,0,0".parse::<LobeAxis>().is_err());
        assert!("up".parse::<LobeAxis>().is_err());
        assert_eq!(file_label("(-2,1,-3)"), "m2_1_m3");
        assert_eq!(file_label("+x"), "px");
        assert_eq!(LobeAxis::defaults().len(), 7);
    }
}
