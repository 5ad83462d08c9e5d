//! Nested light and geometry volumes.

use glam::DVec3;
use half::f16;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::render::Image;

/// Width of the boundary ramp used when blending into the next cascade.
pub const BLEND_RAMP_CELLS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Full,
    /// Every stored value is round-tripped through a 16-bit float.
    Half,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CascadeConfig {
    pub cell_count: usize,
    /// Edge lengths in meters, finest first.
    pub extents: Vec<f64>,
    /// Point the cascades follow. The pipeline sets it to the camera
    /// position each frame, so it is not part of serialized configs.
    #[serde(skip)]
    pub anchor: [f64; 3],
    pub precision: Precision,
}

impl Default for CascadeConfig {
    fn default() -> Self {
        Self {
            cell_count: 32,
            extents: vec![12.5, 25.0, 50.0],
            anchor: [0.0; 3],
            precision: Precision::Full,
        }
    }
}

impl CascadeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cell_count < 2 {
            return Err(invalid("cascades need at least 2 cells per axis"));
        }
        if self.extents.is_empty() {
            return Err(invalid("at least one cascade extent is required"));
        }
        if self.extents.iter().any(|e| !e.is_finite() || *e <= 0.0) {
            return Err(invalid("cascade extents must be positive"));
        }
        if self.extents.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("cascade extents must be strictly increasing"));
        }
        if !DVec3::from(self.anchor).is_finite() {
            return Err(invalid("cascade anchor must be finite"));
        }
        for k in 1..self.extents.len() {
            let inner = self.geometry(k - 1);
            let outer = self.geometry(k);
            if inner.min().cmplt(outer.min()).any() || inner.max().cmpgt(outer.max()).any() {
                return Err(invalid(format!("cascade {} does not contain cascade {}", k, k - 1)));
            }
        }
        Ok(())
    }

    pub fn cascade_count(&self) -> usize {
        self.extents.len()
    }

    /// World placement of cascade `k`, with its center snapped to a multiple
    /// of its own cell size.
    pub fn geometry(&self, k: usize) -> CascadeGeometry {
        let extent = self.extents[k];
        let cell_size = extent / self.cell_count as f64;
        let center = (DVec3::from(self.anchor) / cell_size).round() * cell_size;
        CascadeGeometry {
            origin: center - DVec3::splat(extent * 0.5),
            cell_size,
            cells: self.cell_count,
        }
    }
}

/// Axis-aligned placement of one cascade in world space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeGeometry {
    pub origin: DVec3,
    pub cell_size: f64,
    pub cells: usize,
}

impl CascadeGeometry {
    pub fn extent(&self) -> f64 {
        self.cell_size * self.cells as f64
    }

    pub fn min(&self) -> DVec3 {
        self.origin
    }

    pub fn max(&self) -> DVec3 {
        self.origin + DVec3::splat(self.extent())
    }

    pub fn center(&self) -> DVec3 {
        self.origin + DVec3::splat(self.extent() * 0.5)
    }

    pub fn contains(&self, p: DVec3) -> bool {
        p.cmpge(self.min()).all() && p.cmple(self.max()).all()
    }

    /// Cell holding `p`, or `None` when `p` lies outside the cascade.
    pub fn world_to_cell(&self, p: DVec3) -> Option<[usize; 3]> {
        if !self.contains(p) {
            return None;
        }
        let u = (p - self.origin) / self.cell_size;
        let last = self.cells - 1;
        Some([
            (u.x.floor() as usize).min(last),
            (u.y.floor() as usize).min(last),
            (u.z.floor() as usize).min(last),
        ])
    }

    pub fn cell_center(&self, cell: [usize; 3]) -> DVec3 {
        self.origin
            + (DVec3::new(cell[0] as f64, cell[1] as f64, cell[2] as f64) + 0.5) * self.cell_size
    }

    /// 1 in the interior, falling linearly to 0 across the outermost
    /// [`BLEND_RAMP_CELLS`] cells of every face.
    pub fn blend_weight(&self, p: DVec3) -> f64 {
        if !self.contains(p) {
            return 0.0;
        }
        let to_min = p - self.min();
        let to_max = self.max() - p;
        let d = to_min.min(to_max).min_element();
        (d / (BLEND_RAMP_CELLS * self.cell_size)).clamp(0.0, 1.0)
    }
}

/// Dense per-cell, per-channel coefficient storage for one cascade.
///
/// Layout is `[z][y][x][channel][coefficient]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientGrid {
    geometry: CascadeGeometry,
    channels: usize,
    coeffs: usize,
    precision: Precision,
    data: Vec<f32>,
}

impl CoefficientGrid {
    pub fn new(geometry: CascadeGeometry, channels: usize, coeffs: usize, precision: Precision) -> Self {
        let n = geometry.cells.pow(3) * channels * coeffs;
        Self {
            geometry,
            channels,
            coeffs,
            precision,
            data: vec![0.0; n],
        }
    }

    pub fn geometry(&self) -> &CascadeGeometry {
        &self.geometry
    }

    pub fn dims(&self) -> usize {
        self.geometry.cells
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn coeff_count(&self) -> usize {
        self.coeffs
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// Floats per cell (all channels).
    pub fn cell_stride(&self) -> usize {
        self.channels * self.coeffs
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn clear(&mut self) {
        self.data.fill(0.0);
    }

    #[inline]
    pub fn cell_index(&self, cell: [usize; 3]) -> usize {
        let n = self.geometry.cells;
        (cell[2] * n + cell[1]) * n + cell[0]
    }

    fn checked_cell(&self, cell: [i64; 3]) -> Result<[usize; 3]> {
        let n = self.geometry.cells as i64;
        if cell.iter().any(|c| *c < 0 || *c >= n) {
            return Err(Error::CellOutOfRange {
                x: cell[0],
                y: cell[1],
                z: cell[2],
                dims: self.geometry.cells,
            });
        }
        Ok([cell[0] as usize, cell[1] as usize, cell[2] as usize])
    }

    #[inline]
    fn offset(&self, cell: [usize; 3], channel: usize) -> usize {
        self.cell_index(cell) * self.cell_stride() + channel * self.coeffs
    }

    pub fn get(&self, cell: [usize; 3], channel: usize) -> &[f32] {
        let o = self.offset(cell, channel);
        &self.data[o..o + self.coeffs]
    }

    /// Component-wise add `delta` into one cell/channel.
    pub fn accumulate(&mut self, cell: [i64; 3], channel: usize, delta: &[f32]) -> Result<()> {
        let cell = self.checked_cell(cell)?;
        if channel >= self.channels {
            return Err(invalid(format!("channel {channel} out of range")));
        }
        if delta.len() != self.coeffs {
            return Err(Error::LengthMismatch {
                expected: self.coeffs,
                got: delta.len(),
            });
        }
        let o = self.offset(cell, channel);
        let half = self.precision == Precision::Half;
        for (dst, d) in self.data[o..o + self.coeffs].iter_mut().zip(delta) {
            *dst = store(*dst + d, half);
        }
        Ok(())
    }

    /// Add every value of `other` into `self`. Both grids must share a shape.
    pub fn add_assign(&mut self, other: &CoefficientGrid) {
        assert_eq!(self.data.len(), other.data.len());
        let half = self.precision == Precision::Half;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = store(*a + b, half);
        }
    }

    pub fn world_to_cell(&self, p: DVec3) -> Option<[usize; 3]> {
        self.geometry.world_to_cell(p)
    }

    /// Trilinear interpolation of the 8 cell centers around `p`, clamped to
    /// the edge cells within half a cell of the boundary.
    pub fn sample_trilinear(&self, p: DVec3, channel: usize, out: &mut [f32]) -> Result<()> {
        if !self.geometry.contains(p) {
            return Err(Error::OutsideCascade { cascade: 0 });
        }
        self.sample_trilinear_unchecked(p, channel, out);
        Ok(())
    }

    pub(crate) fn sample_trilinear_unchecked(&self, p: DVec3, channel: usize, out: &mut [f32]) {
        let n = self.geometry.cells;
        let u = (p - self.geometry.origin) / self.geometry.cell_size - 0.5;
        let base = u.floor();
        let f = (u - base).as_vec3();
        let clampi = |v: f64| (v as i64).clamp(0, n as i64 - 1) as usize;
        let (x0, y0, z0) = (clampi(base.x), clampi(base.y), clampi(base.z));
        let (x1, y1, z1) = (clampi(base.x + 1.0), clampi(base.y + 1.0), clampi(base.z + 1.0));
        out[..self.coeffs].fill(0.0);
        let corners = [
            ([x0, y0, z0], (1.0 - f.x) * (1.0 - f.y) * (1.0 - f.z)),
            ([x1, y0, z0], f.x * (1.0 - f.y) * (1.0 - f.z)),
            ([x0, y1, z0], (1.0 - f.x) * f.y * (1.0 - f.z)),
            ([x1, y1, z0], f.x * f.y * (1.0 - f.z)),
            ([x0, y0, z1], (1.0 - f.x) * (1.0 - f.y) * f.z),
            ([x1, y0, z1], f.x * (1.0 - f.y) * f.z),
            ([x0, y1, z1], (1.0 - f.x) * f.y * f.z),
            ([x1, y1, z1], f.x * f.y * f.z),
        ];
        for (cell, w) in corners {
            if w == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.get(cell, channel)) {
                *o += w * v;
            }
        }
    }

    /// One coefficient of one channel over a z-slice, row-major in (y, x).
    pub fn slice(&self, z: usize, channel: usize, coeff: usize) -> Result<Vec<f32>> {
        let n = self.geometry.cells;
        if z >= n || channel >= self.channels || coeff >= self.coeffs {
            return Err(invalid("slice index out of range"));
        }
        let mut out = Vec::with_capacity(n * n);
        for y in 0..n {
            for x in 0..n {
                out.push(self.get([x, y, z], channel)[coeff]);
            }
        }
        Ok(out)
    }

    pub fn slice_csv(&self, z: usize, channel: usize, coeff: usize) -> Result<String> {
        let values = self.slice(z, channel, coeff)?;
        let n = self.geometry.cells;
        let mut out = String::from("x,y,value\n");
        for (i, v) in values.iter().enumerate() {
            out.push_str(&format!("{},{},{v}\n", i % n, i / n));
        }
        Ok(out)
    }

    /// Slice as a grayscale image, normalized by its largest magnitude.
    pub fn slice_image(&self, z: usize, channel: usize, coeff: usize) -> Result<Image> {
        let values = self.slice(z, channel, coeff)?;
        let n = self.geometry.cells;
        let peak = values.iter().fold(0f32, |m, v| m.max(v.abs()));
        let scale = if peak > 0.0 { 1.0 / peak } else { 0.0 };
        let mut img = Image::new(n, n);
        for (i, v) in values.iter().enumerate() {
            let g = (v.abs() * scale) as f64;
            // Flip so +y points up in the image.
            img.set(i % n, n - 1 - i / n, [g, g, g]);
        }
        Ok(img)
    }
}

#[inline]
fn store(v: f32, half: bool) -> f32 {
    if half {
        f16::from_f32(v).to_f32()
    } else {
        v
    }
}

/// Light cascades (RGB) and geometry cascades (one blocking channel).
#[derive(Debug, Clone)]
pub struct CascadeSet {
    config: CascadeConfig,
    pub light: Vec<CoefficientGrid>,
    /// Blocking lobes. Each grid is shifted half a cell toward the minimum
    /// corner of its light grid, so its cell centers sit on light-cell
    /// corners and a light-cell face center lies between four of them.
    pub geometry: Vec<CoefficientGrid>,
}

impl CascadeSet {
    pub fn new(config: CascadeConfig, coeffs: usize) -> Result<Self> {
        config.validate()?;
        let light = (0..config.cascade_count())
            .map(|k| CoefficientGrid::new(config.geometry(k), 3, coeffs, config.precision))
            .collect();
        let geometry = (0..config.cascade_count())
            .map(|k| {
                let mut g = config.geometry(k);
                g.origin -= DVec3::splat(0.5 * g.cell_size);
                CoefficientGrid::new(g, 1, coeffs, config.precision)
            })
            .collect();
        Ok(Self {
            config,
            light,
            geometry,
        })
    }

    pub fn config(&self) -> &CascadeConfig {
        &self.config
    }

    pub fn cascade_count(&self) -> usize {
        self.light.len()
    }

    pub fn coeff_count(&self) -> usize {
        self.light[0].coeff_count()
    }

    /// Finest cascade containing `p`.
    pub fn finest_containing(&self, p: DVec3) -> Option<usize> {
        (0..self.cascade_count()).find(|&k| self.light[k].geometry().contains(p))
    }

    pub fn clear(&mut self) {
        self.light.iter_mut().for_each(CoefficientGrid::clear);
        self.geometry.iter_mut().for_each(CoefficientGrid::clear);
    }
}
