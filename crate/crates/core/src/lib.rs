pub mod basis;
pub mod error;
pub mod exec;
pub mod grid;
pub mod pipeline;
pub mod render;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
