//! Configuration and subcommands behind the `lpv` binary.

pub mod bench;
pub mod config;
pub mod diff;
pub mod lobe;
pub mod mesh;
pub mod render;

pub use bench::{cmd_bench, BenchOptions, BenchReport};
pub use config::{Overrides, RunConfig, OUT_DIR_ENV};
pub use diff::cmd_diff;
pub use lobe::{cmd_lobe, LobeAxis, LobeOptions, LobeReport};
pub use render::{cmd_render, RenderOutputs};
