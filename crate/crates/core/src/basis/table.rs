use super::kernel::{check_lambda, poisson_unchecked};
use crate::error::{invalid, Result};

/// Closed form a [`KernelTable`] is generated from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelGenerator {
    Poisson { lambda: f64 },
    Singular { lambda_i: f64, lambda_j: f64 },
}

impl KernelGenerator {
    /// Effective Poisson parameter of the generator.
    pub fn parameter(&self) -> f64 {
        match *self {
            KernelGenerator::Poisson { lambda } => lambda,
            KernelGenerator::Singular { lambda_i, lambda_j } => lambda_i * lambda_j,
        }
    }

    pub fn closed_form(&self, t: f64) -> f64 {
        poisson_unchecked(t.clamp(-1.0, 1.0), self.parameter())
    }
}

/// A kernel sampled at `n` evenly spaced dot products over `[-1, 1]`.
///
/// Lookups use the truncating index `floor((t + 1) * 0.5 * (n - 1))`, the
/// same addressing a shader would use with `texelFetch` on a 1-D buffer.
#[derive(Debug, Clone)]
pub struct KernelTable {
    generator: KernelGenerator,
    entries: Vec<f64>,
    entries_f32: Vec<f32>,
}

impl KernelTable {
    pub fn build(generator: KernelGenerator, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("kernel table needs at least 2 entries, got {n}")));
        }
        match generator {
            KernelGenerator::Poisson { lambda } => check_lambda(lambda)?,
            KernelGenerator::Singular { lambda_i, lambda_j } => {
                check_lambda(lambda_i)?;
                check_lambda(lambda_j)?;
            }
        }
        let last = (n - 1) as f64;
        let entries: Vec<f64> = (0..n)
            .map(|k| generator.closed_form(-1.0 + 2.0 * k as f64 / last))
            .collect();
        let entries_f32 = entries.iter().map(|&v| v as f32).collect();
        Ok(Self {
            generator,
            entries,
            entries_f32,
        })
    }

    pub fn generator(&self) -> KernelGenerator {
        self.generator
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Dot product the entry at `index` was generated for.
    pub fn abscissa(&self, index: usize) -> f64 {
        -1.0 + 2.0 * index as f64 / (self.entries.len() - 1) as f64
    }

    #[inline]
    pub fn index_of(&self, t: f64) -> usize {
        let last = self.entries.len() - 1;
        let idx = ((t + 1.0) * 0.5 * last as f64).floor();
        if idx <= 0.0 {
            0
        } else {
            (idx as usize).min(last)
        }
    }

    #[inline]
    pub fn lookup(&self, t: f64) -> f64 {
        self.entries[self.index_of(t)]
    }

    /// Single-precision lookup used by the volume kernels.
    #[inline]
    pub fn lookup_f32(&self, t: f32) -> f32 {
        let last = self.entries_f32.len() - 1;
        let idx = ((t + 1.0) * 0.5 * last as f32) as i32;
        self.entries_f32[idx.clamp(0, last as i32) as usize]
    }

    /// Rows of `index, t, value` for external inspection.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,t,value\n");
        for (k, v) in self.entries.iter().enumerate() {
            out.push_str(&format!("{k},{:.9},{:.9}\n", self.abscissa(k), v));
        }
        out
    }
}
