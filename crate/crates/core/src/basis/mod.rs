//! Spherical-function bases used to store directional light in the volumes.
//!
//! Two families are supported: two-band spherical harmonics and spherical
//! radial basis functions built from the Abel-Poisson kernel on a fixed set
//! of centers. SRBF coefficients are obtained by projecting onto the kernels
//! and correcting with the inverse Gram matrix; rotation re-projects the
//! rotated kernels onto the original centers.

pub mod centers;
mod kernel;
mod normalization;
pub mod quadrature;
pub mod sh2;
mod table;

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;
use std::sync::OnceLock;

use glam::{DMat3, DQuat, DVec3, Vec3};
use serde::{Deserialize, Serialize};

pub use kernel::{poisson_kernel, singular_integral};
pub use normalization::NormalizationMatrix;
pub use table::{KernelGenerator, KernelTable};

use crate::error::{invalid, Error, Result};
use kernel::{check_lambda, poisson_unchecked};

pub const DEFAULT_TABLE_SIZE: usize = 1024;
pub const DEFAULT_QUADRATURE_SAMPLES: usize = 4096;
/// Kernel parameter of the pole/hexagon and axes/diagonal 8-center sets.
///
/// Below 0.45 these sets approximate an off-axis clamped cosine better than
/// SH2; above roughly 0.47 the 1024-entry kernel table drifts more than 1%
/// of the lobe peak from the closed form.
pub const DEFAULT_LAMBDA_8: f64 = 0.45;
/// Kernel parameter of the cube-vertex 8-center set, and of the 8-center
/// visualization.
pub const CUBE_LAMBDA_8: f64 = 0.25;

const UNIT_TOLERANCE: f64 = 1e-6;

/// Which basis a volume stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BasisKind {
    Sh2,
    Srbf4,
    Srbf8v1,
    Srbf8v2,
    Srbf8v3,
    Srbf14,
}

impl BasisKind {
    pub const ALL: [BasisKind; 6] = [
        BasisKind::Sh2,
        BasisKind::Srbf4,
        BasisKind::Srbf8v1,
        BasisKind::Srbf8v2,
        BasisKind::Srbf8v3,
        BasisKind::Srbf14,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Sh2 => "sh2",
            BasisKind::Srbf4 => "srbf4",
            BasisKind::Srbf8v1 => "srbf8v1",
            BasisKind::Srbf8v2 => "srbf8v2",
            BasisKind::Srbf8v3 => "srbf8v3",
            BasisKind::Srbf14 => "srbf14",
        }
    }

    pub fn coefficient_count(self) -> usize {
        match self {
            BasisKind::Sh2 | BasisKind::Srbf4 => 4,
            BasisKind::Srbf8v1 | BasisKind::Srbf8v2 | BasisKind::Srbf8v3 => 8,
            BasisKind::Srbf14 => 14,
        }
    }

    pub fn is_srbf(self) -> bool {
        self != BasisKind::Sh2
    }

    /// Shipped center set; empty for SH2.
    pub fn default_centers(self) -> Vec<DVec3> {
        match self {
            BasisKind::Sh2 => Vec::new(),
            BasisKind::Srbf4 => centers::tetrahedron(),
            BasisKind::Srbf8v1 => centers::poles_and_hexagon(),
            BasisKind::Srbf8v2 => centers::cube_vertices(),
            BasisKind::Srbf8v3 => centers::axes_and_diagonal(),
            BasisKind::Srbf14 => centers::axes_and_cube(),
        }
    }

    /// Default kernel parameter. The 4- and 14-center values come from
    /// [`sweep_lambda`] and are computed once per process.
    pub fn default_lambda(self) -> Option<f64> {
        static SRBF4: OnceLock<f64> = OnceLock::new();
        static SRBF14: OnceLock<f64> = OnceLock::new();
        match self {
            BasisKind::Sh2 => None,
            BasisKind::Srbf8v1 | BasisKind::Srbf8v3 => Some(DEFAULT_LAMBDA_8),
            BasisKind::Srbf8v2 => Some(CUBE_LAMBDA_8),
            BasisKind::Srbf4 => Some(*SRBF4.get_or_init(|| sweep_lambda(self).0)),
            BasisKind::Srbf14 => Some(*SRBF14.get_or_init(|| sweep_lambda(self).0)),
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        BasisKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| Error::UnknownBasis(s.to_string()))
    }
}

impl TryFrom<String> for BasisKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BasisKind> for String {
    fn from(k: BasisKind) -> String {
        k.name().to_string()
    }
}

/// Grid of kernel parameters searched when a center set has no fixed default.
pub fn lambda_sweep_grid() -> impl Iterator<Item = f64> {
    (1..=18).map(|k| k as f64 / 20.0)
}

/// Pick the kernel parameter minimizing the +z clamped-cosine RMS error,
/// measured with table lookups as the volumes use them.
///
/// Returns `(best_lambda, best_rms)`.
pub fn sweep_lambda(kind: BasisKind) -> (f64, f64) {
    let mut best = (f64::NAN, f64::INFINITY);
    for lambda in lambda_sweep_grid() {
        let options = BasisOptions {
            lambda: Some(lambda),
            ..BasisOptions::default()
        };
        let Ok(basis) = BasisSpec::with_options(kind, &options) else {
            continue;
        };
        let Ok(rms) = basis.lobe_rms_error(DVec3::Z, DEFAULT_QUADRATURE_SAMPLES, EvalMode::Table)
        else {
            continue;
        };
        if rms < best.1 {
            best = (lambda, rms);
        }
    }
    best
}

/// How kernel values are obtained during evaluation and rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalMode {
    /// Closed-form kernel evaluation.
    Exact,
    /// Nearest-below lookup in the precomputed 1-D tables.
    #[default]
    Table,
}

/// Expansion coefficients of one spherical function.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoefficientVector(Vec<f64>);

impl CoefficientVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self(self.0.iter().map(|v| v * k).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn to_f32(&self) -> Vec<f32> {
        self.0.iter().map(|&v| v as f32).collect()
    }
}

impl Deref for CoefficientVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Construction knobs for [`BasisSpec::with_options`].
#[derive(Debug, Clone)]
pub struct BasisOptions {
    pub lambda: Option<f64>,
    pub centers: Option<Vec<DVec3>>,
    pub table_size: usize,
    pub quadrature_samples: usize,
}

impl Default for BasisOptions {
    fn default() -> Self {
        Self {
            lambda: None,
            centers: None,
            table_size: DEFAULT_TABLE_SIZE,
            quadrature_samples: DEFAULT_QUADRATURE_SAMPLES,
        }
    }
}

#[derive(Debug, Clone)]
struct Srbf {
    centers: Vec<DVec3>,
    centers_f32: Vec<Vec3>,
    lambda: f64,
    kernel_table: KernelTable,
    singular_table: KernelTable,
    norm: NormalizationMatrix,
    cosine_lobe_z: CoefficientVector,
}

#[derive(Debug, Clone)]
enum Repr {
    Sh2,
    Srbf(Box<Srbf>),
}

/// A fully precomputed basis: centers, kernel parameter, lookup tables,
/// normalization matrix and the clamped-cosine lobe about +z.
///
/// Immutable after construction and safe to share between threads.
#[derive(Debug, Clone)]
pub struct BasisSpec {
    kind: BasisKind,
    repr: Repr,
}

fn check_unit(d: DVec3, what: &str) -> Result<()> {
    if d.is_finite() && (d.length() - 1.0).abs() <= UNIT_TOLERANCE {
        Ok(())
    } else {
        Err(invalid(format!("{what} {d} is not unit length")))
    }
}

/// Rotation taking +z onto `axis`. The anti-parallel case is a half turn
/// about +x.
pub fn rotation_from_z(axis: DVec3) -> DMat3 {
    let axis = axis.normalize();
    let c = axis.z;
    if c >= 1.0 - 1e-12 {
        DMat3::IDENTITY
    } else if c <= -1.0 + 1e-12 {
        DMat3::from_diagonal(DVec3::new(1.0, -1.0, -1.0))
    } else {
        DMat3::from_quat(DQuat::from_rotation_arc(DVec3::Z, axis))
    }
}

impl BasisSpec {
    pub fn new(kind: BasisKind) -> Result<Self> {
        Self::with_options(kind, &BasisOptions::default())
    }

    pub fn with_lambda(kind: BasisKind, lambda: f64) -> Result<Self> {
        Self::with_options(
            kind,
            &BasisOptions {
                lambda: Some(lambda),
                ..BasisOptions::default()
            },
        )
    }

    pub fn with_options(kind: BasisKind, options: &BasisOptions) -> Result<Self> {
        if kind == BasisKind::Sh2 {
            return Ok(Self {
                kind,
                repr: Repr::Sh2,
            });
        }
        let centers = options
            .centers
            .clone()
            .unwrap_or_else(|| kind.default_centers());
        if centers.len() != kind.coefficient_count() {
            return Err(invalid(format!(
                "{kind} needs {} centers, got {}",
                kind.coefficient_count(),
                centers.len()
            )));
        }
        for c in &centers {
            check_unit(*c, "center")?;
        }
        let lambda = match options.lambda {
            Some(l) => l,
            None => kind.default_lambda().expect("srbf kinds have a default"),
        };
        check_lambda(lambda)?;

        let norm = NormalizationMatrix::build(&centers, lambda)?;
        let kernel_table = KernelTable::build(KernelGenerator::Poisson { lambda }, options.table_size)?;
        let singular_table = KernelTable::build(
            KernelGenerator::Singular {
                lambda_i: lambda,
                lambda_j: lambda,
            },
            options.table_size,
        )?;
        let centers_f32 = centers.iter().map(|c| c.as_vec3()).collect();
        let mut srbf = Srbf {
            centers,
            centers_f32,
            lambda,
            kernel_table,
            singular_table,
            norm,
            cosine_lobe_z: CoefficientVector::default(),
        };
        if options.quadrature_samples < 1 {
            return Err(invalid("quadrature needs at least one sample"));
        }
        srbf.cosine_lobe_z = srbf.project(
            &|eta: DVec3| eta.z.max(0.0),
            &quadrature::fibonacci_sphere(options.quadrature_samples),
        );
        Ok(Self {
            kind,
            repr: Repr::Srbf(Box::new(srbf)),
        })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn coefficient_count(&self) -> usize {
        self.kind.coefficient_count()
    }

    pub fn is_srbf(&self) -> bool {
        matches!(self.repr, Repr::Srbf(_))
    }

    pub fn lambda(&self) -> Option<f64> {
        self.srbf().map(|s| s.lambda)
    }

    pub fn centers(&self) -> &[DVec3] {
        self.srbf().map_or(&[], |s| &s.centers)
    }

    pub fn kernel_table(&self) -> Option<&KernelTable> {
        self.srbf().map(|s| &s.kernel_table)
    }

    pub fn singular_table(&self) -> Option<&KernelTable> {
        self.srbf().map(|s| &s.singular_table)
    }

    pub fn normalization(&self) -> Option<&NormalizationMatrix> {
        self.srbf().map(|s| &s.norm)
    }

    /// Clamped cosine lobe about +z in this basis.
    pub fn cosine_lobe_z(&self) -> CoefficientVector {
        match &self.repr {
            Repr::Sh2 => CoefficientVector(sh2::clamped_cosine_lobe(DVec3::Z).to_vec()),
            Repr::Srbf(s) => s.cosine_lobe_z.clone(),
        }
    }

    fn srbf(&self) -> Option<&Srbf> {
        match &self.repr {
            Repr::Sh2 => None,
            Repr::Srbf(s) => Some(s),
        }
    }

    fn check_len(&self, n: usize) -> Result<()> {
        let expected = self.coefficient_count();
        if n != expected {
            return Err(Error::LengthMismatch { expected, got: n });
        }
        Ok(())
    }

    /// Reconstruct the function at `eta`.
    pub fn evaluate(&self, coeffs: &[f64], eta: DVec3, mode: EvalMode) -> Result<f64> {
        self.check_len(coeffs.len())?;
        check_unit(eta, "direction")?;
        Ok(self.evaluate_unchecked(coeffs, eta, mode))
    }

    pub(crate) fn evaluate_unchecked(&self, coeffs: &[f64], eta: DVec3, mode: EvalMode) -> f64 {
        match &self.repr {
            Repr::Sh2 => sh2::basis(eta).iter().zip(coeffs).map(|(y, c)| y * c).sum(),
            Repr::Srbf(s) => s
                .centers
                .iter()
                .zip(coeffs)
                .map(|(xi, c)| {
                    let t = eta.dot(*xi);
                    let g = match mode {
                        EvalMode::Exact => poisson_unchecked(t.clamp(-1.0, 1.0), s.lambda),
                        EvalMode::Table => s.kernel_table.lookup(t),
                    };
                    c * g
                })
                .sum(),
        }
    }

    /// Basis function values at `d` in single precision; SRBF values come
    /// from the kernel table. `out` must hold `coefficient_count()` values.
    #[inline]
    pub fn basis_values_f32(&self, d: Vec3, out: &mut [f32]) {
        match &self.repr {
            Repr::Sh2 => out[..4].copy_from_slice(&sh2::basis_f32(d)),
            Repr::Srbf(s) => {
                for (o, xi) in out.iter_mut().zip(&s.centers_f32) {
                    *o = s.kernel_table.lookup_f32(xi.dot(d));
                }
            }
        }
    }

    /// Project `f` with a uniform Fibonacci quadrature of `samples` points.
    pub fn project<F>(&self, f: F, samples: usize) -> Result<CoefficientVector>
    where
        F: Fn(DVec3) -> f64,
    {
        if samples == 0 {
            return Err(invalid("projection needs at least one sample"));
        }
        let dirs = quadrature::fibonacci_sphere(samples);
        Ok(match &self.repr {
            Repr::Sh2 => project_sh2(&f, &dirs),
            Repr::Srbf(s) => s.project(&f, &dirs),
        })
    }

    /// Project tabulated samples. Directions are assumed to cover the sphere
    /// uniformly.
    pub fn project_samples(&self, dirs: &[DVec3], values: &[f64]) -> Result<CoefficientVector> {
        if dirs.is_empty() {
            return Err(invalid("empty sample set"));
        }
        if dirs.len() != values.len() {
            return Err(invalid(format!(
                "{} directions but {} values",
                dirs.len(),
                values.len()
            )));
        }
        let w = quadrature::uniform_weight(dirs.len());
        Ok(match &self.repr {
            Repr::Sh2 => {
                let mut c = [0.0; 4];
                for (d, v) in dirs.iter().zip(values) {
                    for (ci, y) in c.iter_mut().zip(sh2::basis(*d)) {
                        *ci += v * y * w;
                    }
                }
                CoefficientVector(c.to_vec())
            }
            Repr::Srbf(s) => {
                let w = 1.0 / dirs.len() as f64;
                let mut alpha = vec![0.0; s.centers.len()];
                for (d, v) in dirs.iter().zip(values) {
                    for (a, xi) in alpha.iter_mut().zip(&s.centers) {
                        *a += v * poisson_unchecked(d.dot(*xi).clamp(-1.0, 1.0), s.lambda) * w;
                    }
                }
                CoefficientVector(s.norm.solve(&alpha))
            }
        })
    }

    /// Rotate an expansion by `rotation`.
    ///
    /// SH2 rotation is exact. SRBF rotation re-projects the rotated kernels
    /// onto the fixed centers: `c' = A⁻¹ R c` with `R[i][j] = H(ξi · Rot ξj)`,
    /// which is exact only when the center set is closed under the rotation.
    pub fn rotate(&self, coeffs: &[f64], rotation: DMat3, mode: EvalMode) -> Result<CoefficientVector> {
        self.check_len(coeffs.len())?;
        Ok(match &self.repr {
            Repr::Sh2 => {
                let v = rotation * DVec3::new(coeffs[3], coeffs[1], coeffs[2]);
                CoefficientVector(vec![coeffs[0], v.y, v.z, v.x])
            }
            Repr::Srbf(s) => CoefficientVector(s.rotate(coeffs, rotation, mode)),
        })
    }

    /// SRBF clamped-cosine lobe about `axis`, obtained by rotating the
    /// precomputed +z lobe.
    pub fn rotate_srbf_lobe(&self, axis: DVec3, mode: EvalMode) -> Result<CoefficientVector> {
        check_unit(axis, "lobe axis")?;
        let s = self
            .srbf()
            .ok_or_else(|| invalid("rotate_srbf_lobe needs an SRBF basis"))?;
        Ok(CoefficientVector(s.rotate(
            &s.cosine_lobe_z,
            rotation_from_z(axis),
            mode,
        )))
    }

    /// Clamped cosine lobe about `axis`: closed form for SH2, rotated +z
    /// lobe for SRBF.
    pub fn clamped_cosine_lobe(&self, axis: DVec3, mode: EvalMode) -> Result<CoefficientVector> {
        check_unit(axis, "lobe axis")?;
        match &self.repr {
            Repr::Sh2 => Ok(sh2_clamped_cosine_lobe(axis)?),
            Repr::Srbf(_) => self.rotate_srbf_lobe(axis, mode),
        }
    }

    /// RMS difference between this basis's clamped cosine lobe about `axis`
    /// and `max(η · axis, 0)`, over `samples` uniform directions. `mode`
    /// applies to both the lobe rotation and its reconstruction.
    pub fn lobe_rms_error(&self, axis: DVec3, samples: usize, mode: EvalMode) -> Result<f64> {
        if samples < 1000 {
            return Err(invalid(format!("lobe RMS needs at least 1000 samples, got {samples}")));
        }
        let axis = axis.normalize();
        let lobe = self.clamped_cosine_lobe(axis, mode)?;
        let dirs = quadrature::fibonacci_sphere(samples);
        let sum: f64 = dirs
            .iter()
            .map(|eta| {
                let approx = self.evaluate_unchecked(&lobe, *eta, mode);
                let exact = eta.dot(axis).max(0.0);
                (approx - exact).powi(2)
            })
            .sum();
        Ok((sum / samples as f64).sqrt())
    }
}

fn project_sh2<F: Fn(DVec3) -> f64>(f: &F, dirs: &[DVec3]) -> CoefficientVector {
    let w = quadrature::uniform_weight(dirs.len());
    let mut c = [0.0; 4];
    for d in dirs {
        let v = f(*d);
        for (ci, y) in c.iter_mut().zip(sh2::basis(*d)) {
            *ci += v * y * w;
        }
    }
    CoefficientVector(c.to_vec())
}

impl Srbf {
    /// The closed-form singular integral is the kernel convolution under the
    /// normalized measure `dη / 4π`, so the projection integrals use the same
    /// measure; otherwise `A⁻¹ α` would be scaled by `4π`.
    fn project<F: Fn(DVec3) -> f64>(&self, f: &F, dirs: &[DVec3]) -> CoefficientVector {
        let w = 1.0 / dirs.len() as f64;
        let mut alpha = vec![0.0; self.centers.len()];
        for d in dirs {
            let v = f(*d);
            if v == 0.0 {
                continue;
            }
            for (a, xi) in alpha.iter_mut().zip(&self.centers) {
                *a += v * poisson_unchecked(d.dot(*xi).clamp(-1.0, 1.0), self.lambda) * w;
            }
        }
        CoefficientVector(self.norm.solve(&alpha))
    }

    fn rotate(&self, coeffs: &[f64], rotation: DMat3, mode: EvalMode) -> Vec<f64> {
        let n = self.centers.len();
        let product = self.lambda * self.lambda;
        let rotated: Vec<DVec3> = self.centers.iter().map(|c| rotation * *c).collect();
        let mut rc = vec![0.0; n];
        for (i, xi) in self.centers.iter().enumerate() {
            rc[i] = rotated
                .iter()
                .zip(coeffs)
                .map(|(xj, c)| {
                    let t = xi.dot(*xj);
                    let h = match mode {
                        EvalMode::Exact => poisson_unchecked(t.clamp(-1.0, 1.0), product),
                        EvalMode::Table => self.singular_table.lookup(t),
                    };
                    h * c
                })
                .sum();
        }
        self.norm.solve(&rc)
    }
}

/// Two-band SH clamped cosine lobe about `axis`.
pub fn sh2_clamped_cosine_lobe(axis: DVec3) -> Result<CoefficientVector> {
    check_unit(axis, "lobe axis")?;
    Ok(CoefficientVector(sh2::clamped_cosine_lobe(axis).to_vec()))
}
