//! Periodic computational domain and sampled functions on it.
//!
//! A [`Grid`] is the torus `[0, L)^n` sampled at `G` points per axis with
//! cell centers `x_j = j*L/G`. Its Fourier eigenvalue lattice is
//! `lambda_k = |2*pi*k/L|^2` over integer frequencies `k` in
//! `[-G/2, G/2)^n`. A [`GridFunction`] is a real-valued sample vector in
//! row-major axis order (axis 0 slowest) — the universal operand of every
//! operator and norm in this crate.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magic bytes of the raw binary sample format.
pub const BINARY_MAGIC: [u8; 4] = *b"SBLB";
/// Version of the raw binary sample format.
pub const BINARY_VERSION: u32 = 1;
/// Header length in bytes: magic, version, n, G, L, reserved padding.
pub const BINARY_HEADER_LEN: usize = 32;

/// The periodic computational domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    points_per_axis: usize,
    period: f64,
}

impl Grid {
    /// Build a grid; rejects `n` outside {1,2,3}, non-power-of-two or
    /// too-small `G`, and non-positive `L`.
    pub fn new(n: usize, points_per_axis: usize, period: f64) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidGrid(format!(
                "dimension n = {n} not in {{1,2,3}}"
            )));
        }
        if points_per_axis < 8 {
            return Err(Error::InvalidGrid(format!(
                "points per axis G = {points_per_axis} below minimum 8"
            )));
        }
        if !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis G = {points_per_axis} is not a power of two"
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "period L = {period} must be positive"
            )));
        }
        Ok(Self {
            n,
            points_per_axis,
            period,
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Total number of cells, `G^n`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell width `L/G`.
    pub fn cell_width(&self) -> f64 {
        self.period / self.points_per_axis as f64
    }

    /// Cell volume `(L/G)^n`.
    pub fn cell_volume(&self) -> f64 {
        self.cell_width().powi(self.n as i32)
    }

    /// Smallest nonzero Laplacian eigenvalue, `(2*pi/L)^2`.
    pub fn lambda_min_nonzero(&self) -> f64 {
        let xi = 2.0 * std::f64::consts::PI / self.period;
        xi * xi
    }

    /// Largest eigenvalue on the lattice, `n * (pi*G/L)^2` (Nyquist in
    /// every axis).
    pub fn lambda_max(&self) -> f64 {
        let xi = std::f64::consts::PI * self.points_per_axis as f64 / self.period;
        self.n as f64 * xi * xi
    }

    /// Signed integer frequency of coefficient index `i` along one axis:
    /// `i` for `i < G/2`, `i - G` otherwise, so frequencies lie in
    /// `[-G/2, G/2)`.
    pub fn wavenumber(&self, index: usize) -> i64 {
        let g = self.points_per_axis as i64;
        let i = index as i64;
        if i < g / 2 {
            i
        } else {
            i - g
        }
    }

    /// Decode a flat row-major index into per-axis indices (axis 0 slowest).
    pub fn decode(&self, flat: usize) -> [usize; 3] {
        let g = self.points_per_axis;
        let mut out = [0usize; 3];
        let mut rem = flat;
        for axis in (0..self.n).rev() {
            out[axis] = rem % g;
            rem /= g;
        }
        out
    }

    /// Flat index of per-axis indices, wrapping each axis periodically.
    pub fn encode_wrapped(&self, coords: &[i64]) -> usize {
        let g = self.points_per_axis as i64;
        let mut flat = 0usize;
        for &coord in coords.iter().take(self.n) {
            let c = coord.rem_euclid(g) as usize;
            flat = flat * self.points_per_axis + c;
        }
        flat
    }

    /// Laplacian eigenvalue of the coefficient at flat index `flat`.
    pub fn eigenvalue(&self, flat: usize) -> f64 {
        let idx = self.decode(flat);
        let scale = 2.0 * std::f64::consts::PI / self.period;
        let mut lambda = 0.0;
        for &i in idx.iter().take(self.n) {
            let xi = scale * self.wavenumber(i) as f64;
            lambda += xi * xi;
        }
        lambda
    }

    /// Position of the cell center at flat index `flat`.
    pub fn position(&self, flat: usize) -> [f64; 3] {
        let idx = self.decode(flat);
        let h = self.cell_width();
        let mut x = [0.0; 3];
        for axis in 0..self.n {
            x[axis] = idx[axis] as f64 * h;
        }
        x
    }

    /// Periodic Euclidean distance between the cell centers at two flat
    /// indices.
    pub fn periodic_distance(&self, a: usize, b: usize) -> f64 {
        let ia = self.decode(a);
        let ib = self.decode(b);
        let h = self.cell_width();
        let g = self.points_per_axis as i64;
        let mut d2 = 0.0;
        for axis in 0..self.n {
            let mut di = (ia[axis] as i64 - ib[axis] as i64).rem_euclid(g);
            if di > g / 2 {
                di -= g;
            }
            let d = di as f64 * h;
            d2 += d * d;
        }
        d2.sqrt()
    }

    /// Periodic distance of a point to a fixed center, both in `[0,L)^n`.
    pub fn periodic_point_distance(&self, x: &[f64], center: &[f64]) -> f64 {
        let l = self.period;
        let mut d2 = 0.0;
        for axis in 0..self.n {
            let mut d = (x[axis] - center[axis]).rem_euclid(l);
            if d > l / 2.0 {
                d -= l;
            }
            d2 += d * d;
        }
        d2.sqrt()
    }
}

/// A real-valued function sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    /// Wrap a sample vector; rejects length mismatches and non-finite
    /// samples.
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "sample count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite sample {bad}")));
        }
        Ok(Self { grid, values })
    }

    /// Sample a closure at every cell center. The closure receives the
    /// position as a slice of length `n`.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let n = grid.dimension();
        let values = (0..grid.len())
            .map(|i| {
                let x = grid.position(i);
                f(&x[..n])
            })
            .collect();
        Self::from_values(grid, values)
    }

    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        Self::from_values(grid, vec![c; grid.len()])
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `cell_volume * sum(values)`.
    pub fn integral(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().sum::<f64>()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Pointwise sum; rejects grid mismatches.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    /// Pointwise difference; rejects grid mismatches.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    /// Subtract the mean in place and return the value removed.
    pub fn remove_mean(&mut self) -> f64 {
        let m = self.mean();
        for v in &mut self.values {
            *v -= m;
        }
        m
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GridFunctionJson::from(self)).expect("grid function serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dto: GridFunctionJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        dto.try_into()
    }

    /// Write the raw little-endian binary format: a 32-byte header
    /// (magic "SBLB", version, n, G, L) followed by `G^n` f64 samples.
    pub fn write_binary(&self, mut out: impl Write) -> Result<()> {
        let mut header = [0u8; BINARY_HEADER_LEN];
        header[0..4].copy_from_slice(&BINARY_MAGIC);
        header[4..8].copy_from_slice(&BINARY_VERSION.to_le_bytes());
        header[8..12].copy_from_slice(&(self.grid.dimension() as u32).to_le_bytes());
        header[12..16].copy_from_slice(&(self.grid.points_per_axis() as u32).to_le_bytes());
        header[16..24].copy_from_slice(&self.grid.period().to_le_bytes());
        out.write_all(&header)?;
        for v in &self.values {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(mut input: impl Read) -> Result<Self> {
        let mut header = [0u8; BINARY_HEADER_LEN];
        input.read_exact(&mut header)?;
        if header[0..4] != BINARY_MAGIC {
            return Err(Error::Parse("bad magic, not an SBLB file".into()));
        }
        let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
        if version != BINARY_VERSION {
            return Err(Error::Parse(format!("unsupported SBLB version {version}")));
        }
        let n = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        let g = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
        let l = f64::from_le_bytes(header[16..24].try_into().unwrap());
        let grid = Grid::new(n, g, l)?;
        let mut values = vec![0.0f64; grid.len()];
        let mut buf = [0u8; 8];
        for v in &mut values {
            input.read_exact(&mut buf)?;
            *v = f64::from_le_bytes(buf);
        }
        Self::from_values(grid, values)
    }

    pub fn write_binary_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_binary(std::io::BufWriter::new(file))
    }

    pub fn read_binary_file(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_binary(std::io::BufReader::new(file))
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct GridJson {
    pub n: usize,
    #[serde(rename = "G")]
    pub g: usize,
    #[serde(rename = "L")]
    pub l: f64,
}

#[derive(Serialize, Deserialize)]
struct GridFunctionJson {
    grid: GridJson,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "is_false")]
    weight: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl From<&GridFunction> for GridFunctionJson {
    fn from(f: &GridFunction) -> Self {
        Self {
            grid: GridJson {
                n: f.grid.dimension(),
                g: f.grid.points_per_axis(),
                l: f.grid.period(),
            },
            values: f.values.clone(),
            weight: false,
        }
    }
}

impl TryFrom<GridFunctionJson> for GridFunction {
    type Error = Error;

    fn try_from(dto: GridFunctionJson) -> Result<Self> {
        let grid = Grid::new(dto.grid.n, dto.grid.g, dto.grid.l)?;
        GridFunction::from_values(grid, dto.values)
    }
}
