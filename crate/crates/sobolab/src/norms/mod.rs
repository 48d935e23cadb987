//! Grid realizations of Lebesgue, Sobolev, thermic Besov, Morrey and
//! weighted norms, together with the Hardy–Littlewood and heat-family
//! maximal functions and Muckenhoupt weight constants.
//!
//! Balls are discrete: a cell belongs to `B(x0, r)` iff its center's
//! periodic Euclidean distance to `x0` is strictly less than `r`. The
//! sup-scans over centers are data-parallel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::rearrange;
use crate::spectral::{self, Spectrum};

/// A strictly positive spatial weight sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    inner: GridFunction,
}

impl WeightField {
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "weight field samples must be positive and finite, got {bad}"
            )));
        }
        Ok(Self {
            inner: GridFunction::from_values(grid, values)?,
        })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let g = GridFunction::from_fn(grid, f)?;
        Self::from_values(grid, g.into_values())
    }

    pub fn ones(grid: Grid) -> Self {
        Self {
            inner: GridFunction::constant(grid, 1.0).expect("constant is finite"),
        }
    }

    pub fn grid(&self) -> Grid {
        self.inner.grid()
    }

    pub fn values(&self) -> &[f64] {
        self.inner.values()
    }

    pub fn as_grid_function(&self) -> &GridFunction {
        &self.inner
    }

    /// Same JSON shape as a grid function plus a `"weight": true` marker.
    pub fn to_json(&self) -> String {
        let mut value: serde_json::Value =
            serde_json::from_str(&self.inner.to_json()).expect("round trip");
        value["weight"] = serde_json::Value::Bool(true);
        value.to_string()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if value.get("weight") != Some(&serde_json::Value::Bool(true)) {
            return Err(Error::Parse("missing \"weight\": true marker".into()));
        }
        let f = GridFunction::from_json(text)?;
        Self::from_values(f.grid(), f.into_values())
    }
}

/// Log-spaced ball radii from one cell width up to half the period. In
/// one dimension a final covering radius `(L + h)/2` is appended so the
/// largest ball contains every cell under the strict `< r` membership
/// rule (the antipodal cell center sits at exactly `L/2`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusSet {
    radii: Vec<f64>,
}

impl RadiusSet {
    pub fn log_spaced(grid: Grid, count: usize) -> Result<Self> {
        if count < 12 {
            return Err(Error::InvalidParameter(format!(
                "radius set needs at least 12 radii, got {count}"
            )));
        }
        let h = grid.cell_width();
        let r_max = grid.period() / 2.0;
        let lo = h.ln();
        let hi = r_max.ln();
        let step = (hi - lo) / (count - 1) as f64;
        let mut radii: Vec<f64> = (0..count).map(|i| (lo + step * i as f64).exp()).collect();
        radii[0] = h;
        radii[count - 1] = r_max;
        if grid.dimension() == 1 {
            radii.push((grid.period() + h) / 2.0);
        }
        Ok(Self { radii })
    }

    pub fn default_for(grid: Grid) -> Self {
        Self::log_spaced(grid, 16).expect("16 >= 12")
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
}

/// Precomputed offset lists, one per radius: all lattice offsets whose
/// periodic displacement length is `< r`.
struct BallOffsets {
    per_radius: Vec<Vec<i64>>,
    grid: Grid,
}

impl BallOffsets {
    fn build(grid: Grid, radii: &RadiusSet) -> Self {
        let h = grid.cell_width();
        let g = grid.points_per_axis() as i64;
        let half = g / 2;
        let n = grid.dimension();
        let per_radius = radii
            .radii()
            .iter()
            .map(|&r| {
                // each cell may enter a ball once: when the reach spans the
                // whole axis, the window is [-G/2, G/2-1], not both ends
                let reach = (r / h).ceil() as i64;
                let (lo, hi) = if reach >= half {
                    (-half, half - 1)
                } else {
                    (-reach, reach)
                };
                let mut offsets = Vec::new();
                let mut delta = [0i64; 3];
                collect_offsets(&mut delta, 0, n, (lo, hi), r, h, &mut offsets);
                offsets
            })
            .collect();
        Self { per_radius, grid }
    }

    /// Sum of `samples` over the ball of radius index `ri` centered at the
    /// cell with flat index `center`; returns (sum, cell count).
    fn ball_sum(&self, samples: &[f64], ri: usize, center: usize) -> (f64, usize) {
        let grid = self.grid;
        let g = grid.points_per_axis() as i64;
        let c = grid.decode(center);
        let n = grid.dimension();
        let offsets = &self.per_radius[ri];
        let mut sum = 0.0;
        match n {
            1 => {
                let c0 = c[0] as i64;
                for &d in offsets {
                    sum += samples[(c0 + d).rem_euclid(g) as usize];
                }
            }
            _ => {
                // offsets are packed per axis: n entries per ball cell
                for chunk in offsets.chunks_exact(n) {
                    let mut flat = 0usize;
                    for (axis, &d) in chunk.iter().enumerate() {
                        let idx = (c[axis] as i64 + d).rem_euclid(g) as usize;
                        flat = flat * grid.points_per_axis() + idx;
                    }
                    sum += samples[flat];
                }
            }
        }
        (sum, offsets.len() / if n == 1 { 1 } else { n })
    }
}

fn collect_offsets(
    delta: &mut [i64; 3],
    axis: usize,
    n: usize,
    window: (i64, i64),
    r: f64,
    h: f64,
    out: &mut Vec<i64>,
) {
    if axis == n {
        // per-axis |d| <= G/2, so |d*h| is the periodic distance
        let d2: f64 = delta[..n].iter().map(|&d| (d as f64 * h).powi(2)).sum();
        if d2.sqrt() < r {
            if n == 1 {
                out.push(delta[0]);
            } else {
                out.extend_from_slice(&delta[..n]);
            }
        }
        return;
    }
    for d in window.0..=window.1 {
        delta[axis] = d;
        collect_offsets(delta, axis + 1, n, window, r, h, out);
    }
}

/// `(cell_volume * sum |f|^p)^(1/p)`; `p = infinity` means the max norm.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    if p == f64::INFINITY {
        return Ok(f.max_abs());
    }
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "L^p norm needs p >= 1, got {p}"
        )));
    }
    let sum: f64 = f.values().iter().map(|v| v.abs().powf(p)).sum();
    Ok((f.grid().cell_volume() * sum).powf(1.0 / p))
}

/// Weak norm `sup_t t^(1/p) f*(t)`, evaluated on the rearranged profile.
pub fn weak_lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "weak L^p norm needs finite p > 1, got {p}"
        )));
    }
    rearrange::weak_lambda_norm(f, p, &rearrange::WeightProfile::one())
}

/// Homogeneous Sobolev norm `|| J^(s/2) f ||_p` for `s > 0`, `p > 1`.
pub fn sobolev_norm(f: &GridFunction, s: f64, p: f64) -> Result<f64> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Sobolev norm needs p > 1, got {p}"
        )));
    }
    lp_norm(&spectral::fractional_laplacian(f, s)?, p)
}

/// The `W^{1,1}` seminorm `|| |grad f| ||_1`.
pub fn w11_seminorm(f: &GridFunction) -> Result<f64> {
    lp_norm(&spectral::gradient_magnitude(f)?, 1.0)
}

/// Settings of the thermic Besov sup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    /// Number of log-spaced probe times.
    pub t_points: usize,
    /// Reject inputs with nonzero mean (the sup diverges on the torus).
    pub strict: bool,
    /// Golden-section refinement iterations around the discrete argmax.
    pub refine_iters: usize,
}

impl Default for BesovParams {
    fn default() -> Self {
        Self {
            t_points: 48,
            strict: true,
            refine_iters: 48,
        }
    }
}

/// The probe times: log-spaced on `[0.1/lambda_max, (L/8)^2]`.
pub fn besov_time_grid(grid: Grid, points: usize) -> Vec<f64> {
    let t_min = 0.1 / grid.lambda_max();
    let t_cap = (grid.period() / 8.0).powi(2);
    let lo = t_min.ln();
    let hi = t_cap.ln();
    let h = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| (lo + h * i as f64).exp()).collect()
}

/// Thermic Besov norm `sup_t t^(beta/2) ||H_t f||_inf` over the capped
/// time window, refined once by golden section around the discrete
/// argmax. In strict mode inputs with nonzero mean are rejected because
/// the sup diverges as `t -> infinity` on the torus.
pub fn besov_norm(f: &GridFunction, beta: f64, params: &BesovParams) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Besov norm needs beta > 0, got {beta}"
        )));
    }
    let scale = f.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    if params.strict && f.mean().abs() > 1e-12 * scale {
        return Err(Error::BesovDivergent);
    }
    let spectrum = Spectrum::of(f);
    let times = besov_time_grid(f.grid(), params.t_points.max(2));
    let eval = |t: f64| -> Result<f64> {
        let ht = spectrum.apply_fn(|lambda| (-t * lambda).exp())?;
        Ok(t.powf(beta / 2.0) * ht.max_abs())
    };
    let mut best = 0.0f64;
    let mut best_idx = 0usize;
    for (i, &t) in times.iter().enumerate() {
        let v = eval(t)?;
        if v > best {
            best = v;
            best_idx = i;
        }
    }
    // golden-section refinement in log t on the bracketing interval
    let lo = times[best_idx.saturating_sub(1)].ln();
    let hi = times[(best_idx + 1).min(times.len() - 1)].ln();
    if hi > lo {
        let golden = 0.618_033_988_749_894_9_f64;
        let mut a = lo;
        let mut b = hi;
        let mut x1 = b - golden * (b - a);
        let mut x2 = a + golden * (b - a);
        let mut f1 = eval(x1.exp())?;
        let mut f2 = eval(x2.exp())?;
        for _ in 0..params.refine_iters {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + golden * (b - a);
                f2 = eval(x2.exp())?;
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - golden * (b - a);
                f1 = eval(x1.exp())?;
            }
            best = best.max(f1.max(f2));
        }
    }
    Ok(best)
}

/// Morrey norm estimate: the sup over all cell centers (strided in 3-D)
/// and radii of `(r^-a * integral_B |f|^p)^(1/p)` with periodic balls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorreyEstimate {
    pub value: f64,
    /// True when centers were subsampled, making the sup a slight
    /// underestimate.
    pub strided_centers: bool,
}

pub fn morrey_norm(f: &GridFunction, p: f64, a: f64, radii: &RadiusSet) -> Result<MorreyEstimate> {
    let grid = f.grid();
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Morrey norm needs p > 1, got {p}"
        )));
    }
    if !(a.is_finite() && a >= 0.0 && a < grid.dimension() as f64) {
        return Err(Error::InvalidParameter(format!(
            "Morrey index a = {a} must satisfy 0 <= a < n = {}",
            grid.dimension()
        )));
    }
    let offsets = BallOffsets::build(grid, radii);
    let samples: Vec<f64> = f.values().iter().map(|v| v.abs().powf(p)).collect();
    let cell_volume = grid.cell_volume();
    let stride = if grid.dimension() == 3 { 2 } else { 1 };
    let centers: Vec<usize> = strided_centers(grid, stride);
    let sup = centers
        .par_iter()
        .map(|&center| {
            let mut local = 0.0f64;
            for (ri, &r) in radii.radii().iter().enumerate() {
                let (sum, _) = offsets.ball_sum(&samples, ri, center);
                local = local.max(r.powf(-a) * cell_volume * sum);
            }
            local
        })
        .reduce(|| 0.0, f64::max);
    Ok(MorreyEstimate {
        value: sup.powf(1.0 / p),
        strided_centers: stride > 1,
    })
}

fn strided_centers(grid: Grid, stride: usize) -> Vec<usize> {
    if stride == 1 {
        return (0..grid.len()).collect();
    }
    (0..grid.len())
        .filter(|&i| {
            let c = grid.decode(i);
            c[..grid.dimension()]
                .iter()
                .all(|i| i.is_multiple_of(stride))
        })
        .collect()
}

/// Centered Hardy–Littlewood maximal function: at each cell the sup over
/// the radius set of ball averages of `|f|`. The smallest ball is the
/// cell itself, so the result dominates `|f|` pointwise.
pub fn maximal_function(f: &GridFunction, radii: &RadiusSet) -> GridFunction {
    let grid = f.grid();
    let offsets = BallOffsets::build(grid, radii);
    let samples: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|center| {
            let mut best = 0.0f64;
            for ri in 0..radii.radii().len() {
                let (sum, count) = offsets.ball_sum(&samples, ri, center);
                if count > 0 {
                    best = best.max(sum / count as f64);
                }
            }
            best
        })
        .collect();
    GridFunction::from_values(grid, values).expect("averages of finite samples are finite")
}

/// Heat-family maximal function: pointwise sup over the probe times of
/// `|H_t f|`.
pub fn maximal_phi(f: &GridFunction, t_grid: &[f64]) -> Result<GridFunction> {
    if t_grid.is_empty() || t_grid.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
        return Err(Error::InvalidParameter(
            "maximal_phi needs positive finite times".into(),
        ));
    }
    let grid = f.grid();
    let spectrum = Spectrum::of(f);
    let mut sup = vec![0.0f64; grid.len()];
    for &t in t_grid {
        let ht = spectrum.apply_fn(|lambda| (-t * lambda).exp())?;
        for (acc, v) in sup.iter_mut().zip(ht.values()) {
            *acc = acc.max(v.abs());
        }
    }
    GridFunction::from_values(grid, sup)
}

/// Muckenhoupt `A_p` constant: the sup over centers and radii of
/// `avg_B(w) * avg_B(w^(-1/(p-1)))^(p-1)`.
pub fn ap_constant(weight: &WeightField, p: f64, radii: &RadiusSet) -> Result<f64> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "A_p constant needs p > 1, got {p}"
        )));
    }
    let grid = weight.grid();
    let offsets = BallOffsets::build(grid, radii);
    let w = weight.values();
    let dual: Vec<f64> = w.iter().map(|v| v.powf(-1.0 / (p - 1.0))).collect();
    let sup = (0..grid.len())
        .into_par_iter()
        .map(|center| {
            let mut local = 0.0f64;
            for ri in 0..radii.radii().len() {
                let (ws, count) = offsets.ball_sum(w, ri, center);
                let (ds, _) = offsets.ball_sum(&dual, ri, center);
                if count > 0 {
                    let c = count as f64;
                    local = local.max((ws / c) * (ds / c).powf(p - 1.0));
                }
            }
            local
        })
        .reduce(|| 0.0, f64::max);
    Ok(sup)
}

/// Muckenhoupt `A_1` constant: `max_x M_B(w)(x) / w(x)` over the same
/// radius set as the maximal function.
pub fn a1_constant(weight: &WeightField, radii: &RadiusSet) -> f64 {
    let maximal = maximal_function(weight.as_grid_function(), radii);
    maximal
        .values()
        .iter()
        .zip(weight.values())
        .map(|(m, w)| m / w)
        .fold(0.0f64, f64::max)
}

/// Weighted Lebesgue norm `(cell_volume * sum |f|^p w)^(1/p)`.
pub fn weighted_lp_norm(f: &GridFunction, weight: &WeightField, p: f64) -> Result<f64> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "weighted L^p norm needs p >= 1, got {p}"
        )));
    }
    f.check_same_grid(weight.as_grid_function())?;
    let sum: f64 = f
        .values()
        .iter()
        .zip(weight.values())
        .map(|(v, w)| v.abs().powf(p) * w)
        .sum();
    Ok((f.grid().cell_volume() * sum).powf(1.0 / p))
}

/// Weighted Sobolev norm `|| J^(s/2) f ||_{L^p(w)}`.
pub fn weighted_sobolev_norm(
    f: &GridFunction,
    weight: &WeightField,
    s: f64,
    p: f64,
) -> Result<f64> {
    weighted_lp_norm(&spectral::fractional_laplacian(f, s)?, weight, p)
}

/// Weighted `W^{1,1}` seminorm `|| |grad f| ||_{L^1(w)}`.
pub fn weighted_w11_seminorm(f: &GridFunction, weight: &WeightField) -> Result<f64> {
    weighted_lp_norm(&spectral::gradient_magnitude(f)?, weight, 1.0)
}
