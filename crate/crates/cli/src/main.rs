use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use lpv_cli::bench::{DEFAULT_FRAMES, DEFAULT_WARMUP};
use lpv_cli::diff::DEFAULT_GAIN;
use lpv_cli::lobe::{DEFAULT_SAMPLES, DEFAULT_SUBDIVISIONS};
use lpv_cli::{cmd_bench, cmd_diff, cmd_lobe, cmd_render, BenchOptions, LobeAxis, LobeOptions, Overrides, RunConfig};
use lpv_core::basis::BasisKind;

#[derive(Parser)]
#[command(name = "lpv", version, about = "Cascaded light propagation volumes with SH and SRBF bases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render one frame: final image, indirect-only image, timings.
    Render {
        #[command(flatten)]
        overrides: Overrides,
        /// Print the resolved config as JSON and exit.
        #[arg(long)]
        print_config: bool,
    },
    /// Median phase timings per basis, with and without indirect shadows.
    Bench {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, value_delimiter = ',', default_value = "sh2,srbf4,srbf8v2")]
        bases: Vec<BasisKind>,
        #[arg(long, default_value_t = DEFAULT_WARMUP)]
        warmup: usize,
        #[arg(long, default_value_t = DEFAULT_FRAMES)]
        frames: usize,
    },
    /// Sample clamped cosine lobes: CSV, OBJ meshes and an RMS table.
    Lobe {
        #[arg(long, value_delimiter = ',', default_value = "sh2,srbf4,srbf8v1,srbf8v2,srbf8v3,srbf14")]
        bases: Vec<BasisKind>,
        /// `;`-separated axes: `+x`, `-z`, or `x,y,z`. Defaults to the six
        /// main axes and (-2,1,-3).
        #[arg(long, value_delimiter = ';', allow_hyphen_values = true)]
        axes: Vec<LobeAxis>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Icosphere subdivision level of the meshes.
        #[arg(long, default_value_t = DEFAULT_SUBDIVISIONS)]
        subdivisions: usize,
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
    },
    /// Scaled absolute difference of two images.
    Diff {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GAIN)]
        gain: f64,
        /// Output image; `.png` or `.ppm`.
        #[arg(long, short = 'o', default_value = "diff.png")]
        out: PathBuf,
    },
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(lpv_cli::OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| RunConfig::default().output_dir)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Render { overrides, print_config } => {
            let cfg = overrides.resolve()?;
            if print_config {
                println!("{}", cfg.to_json());
                return Ok(());
            }
            let out = cmd_render(&cfg)?;
            for p in [&out.final_image, &out.indirect_image, &out.timings] {
                println!("wrote {}", p.display());
            }
        }
        Command::Bench {
            overrides,
            bases,
            warmup,
            frames,
        } => {
            let cfg = overrides.resolve()?;
            let report = cmd_bench(&cfg, &BenchOptions { bases, warmup, frames })?;
            print!("{}", report.text);
            std::fs::create_dir_all(&cfg.output_dir)?;
            let path = cfg.output_dir.join("bench.txt");
            std::fs::write(&path, &report.text)?;
            println!("wrote {}", path.display());
        }
        Command::Lobe {
            bases,
            axes,
            samples,
            subdivisions,
            out,
        } => {
            let opts = LobeOptions {
                bases,
                axes: if axes.is_empty() { LobeAxis::defaults() } else { axes },
                samples,
                subdivisions,
            };
            let dir = out_dir(out);
            let report = cmd_lobe(&opts, &dir)?;
            print!("{}", report.summary);
            println!("wrote {} and {} meshes in {}", report.csv.display(), report.meshes.len(), dir.display());
        }
        Command::Diff { a, b, gain, out } => {
            cmd_diff(&a, &b, gain, &out)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
