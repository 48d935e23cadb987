//! Distribution functions, the nonincreasing rearrangement, and classical
//! / weak Lorentz norms.
//!
//! On a grid every level set has measure `cell_volume * count`, so the
//! rearrangement is the descending sort of `|f|` viewed as a step function
//! with uniform step `cell_volume`, and the Lorentz integrals are exact
//! sums over steps using the weight primitive `W`.

mod weight;

pub use weight::{
    bp_constant, two_weight_conditions, BpOutcome, TwoWeightAssessment, TwoWeightCondition,
    TwoWeightVariant, WeightProfile,
};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::spectral;

/// The nonincreasing rearrangement of a grid function: a right-continuous
/// step function on `(0, total_measure)` with uniform step, zero beyond.
#[derive(Debug, Clone, PartialEq)]
pub struct RearrangedProfile {
    sorted_values: Vec<f64>,
    step: f64,
}

impl RearrangedProfile {
    pub(crate) fn new(mut values: Vec<f64>, step: f64) -> Self {
        for v in &mut values {
            *v = v.abs();
        }
        values.sort_by(|a, b| b.partial_cmp(a).expect("finite samples"));
        Self {
            sorted_values: values,
            step,
        }
    }

    /// Sorted samples `v_1 >= v_2 >= ...`, one per measure step.
    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted_values
    }

    /// Measure carried by each sample.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn total_measure(&self) -> f64 {
        self.step * self.sorted_values.len() as f64
    }

    /// `f*(t)`: the value of the step containing `t`, zero past the total
    /// measure.
    pub fn value_at(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.sorted_values.first().copied().unwrap_or(0.0);
        }
        let idx = (t / self.step).floor() as usize;
        self.sorted_values.get(idx).copied().unwrap_or(0.0)
    }

    /// Measure of `{ f* > alpha }`, i.e. the distribution function
    /// recomputed from the profile.
    pub fn distribution(&self, alpha: f64) -> f64 {
        let count = self.sorted_values.partition_point(|&v| v > alpha);
        count as f64 * self.step
    }
}

/// `cell_volume * #{ x : |f(x)| > alpha }`; nonincreasing in `alpha`.
pub fn distribution_function(f: &GridFunction, alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "level alpha = {alpha} must be >= 0"
        )));
    }
    let count = f.values().iter().filter(|v| v.abs() > alpha).count();
    Ok(count as f64 * f.grid().cell_volume())
}

/// Descending sort of `|f|` with step `cell_volume`; equimeasurable with
/// the source by construction.
pub fn rearrangement(f: &GridFunction) -> RearrangedProfile {
    RearrangedProfile::new(f.values().to_vec(), f.grid().cell_volume())
}

/// Classical Lorentz norm `(integral_0^inf f*(t)^p w(t) dt)^(1/p)`,
/// evaluated exactly per step through the primitive `W`.
pub fn lambda_norm(f: &GridFunction, p: f64, w: &WeightProfile) -> Result<f64> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Lorentz norm needs p >= 1, got {p}"
        )));
    }
    Ok(lambda_norm_of_profile(&rearrangement(f), p, w))
}

pub(crate) fn lambda_norm_of_profile(
    profile: &RearrangedProfile,
    p: f64,
    w: &WeightProfile,
) -> f64 {
    let step = profile.step();
    let mut acc = 0.0;
    let mut w_prev = 0.0;
    for (i, &v) in profile.sorted_values().iter().enumerate() {
        let w_next = w.primitive((i + 1) as f64 * step);
        if v > 0.0 {
            acc += v.powf(p) * (w_next - w_prev);
        }
        w_prev = w_next;
    }
    acc.powf(1.0 / p)
}

/// Weak Lorentz norm `sup_t f*(t) W(t)^(1/p)`. The sup over each step of
/// the right-continuous profile is attained at its right endpoint.
pub fn weak_lambda_norm(f: &GridFunction, p: f64, w: &WeightProfile) -> Result<f64> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "weak Lorentz norm needs p > 0, got {p}"
        )));
    }
    Ok(weak_lambda_norm_of_profile(&rearrangement(f), p, w))
}

pub(crate) fn weak_lambda_norm_of_profile(
    profile: &RearrangedProfile,
    p: f64,
    w: &WeightProfile,
) -> f64 {
    let step = profile.step();
    let mut sup = 0.0f64;
    for (i, &v) in profile.sorted_values().iter().enumerate() {
        if v == 0.0 {
            break;
        }
        sup = sup.max(v * w.primitive((i + 1) as f64 * step).powf(1.0 / p));
    }
    sup
}

/// Lorentz–Sobolev norm: the Lorentz norm of the fractional Laplacian.
pub fn lorentz_sobolev_norm(f: &GridFunction, s: f64, p: f64, w: &WeightProfile) -> Result<f64> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Lorentz-Sobolev norm needs p > 1, got {p}"
        )));
    }
    lambda_norm(&spectral::fractional_laplacian(f, s)?, p, w)
}

/// Weak Lorentz–Sobolev norm.
pub fn weak_lorentz_sobolev_norm(
    f: &GridFunction,
    s: f64,
    p: f64,
    w: &WeightProfile,
) -> Result<f64> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "weak Lorentz-Sobolev norm needs p > 1, got {p}"
        )));
    }
    weak_lambda_norm(&spectral::fractional_laplacian(f, s)?, p, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid1d(g: usize, l: f64) -> Grid {
        Grid::new(1, g, l).unwrap()
    }

    fn random_function(grid: Grid, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.len()).map(|_| rng.gen_range(-3.0..3.0)).collect();
        GridFunction::from_values(grid, values).unwrap()
    }

    #[test]
    fn distribution_of_constant() {
        let grid = grid1d(64, 1.0);
        let one = GridFunction::constant(grid, 1.0).unwrap();
        assert_eq!(distribution_function(&one, 2.0).unwrap(), 0.0);
        assert!((distribution_function(&one, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!(distribution_function(&one, -0.1).is_err());
    }

    #[test]
    fn distribution_lp_identity() {
        // p * int alpha^(p-1) d(alpha) d alpha over the sorted level set
        // equals the layer-cake sum, which is ||f||_p^p exactly
        let grid = grid1d(128, 7.0);
        let f = random_function(grid, 11);
        for &p in &[1.0, 2.0, 3.5] {
            let mut levels: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
            levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
            levels.dedup();
            let mut integral = 0.0;
            let mut prev = 0.0;
            for &level in &levels {
                // d(alpha) is constant on [prev, level)
                let d = distribution_function(&f, prev).unwrap();
                integral += d * (level.powf(p) - prev.powf(p));
                prev = level;
            }
            let lp_p =
                f.grid().cell_volume() * f.values().iter().map(|v| v.abs().powf(p)).sum::<f64>();
            assert!(
                (integral - lp_p).abs() <= 1e-10 * lp_p,
                "p = {p}: {integral} vs {lp_p}"
            );
        }
    }

    #[test]
    fn rearrangement_of_indicator() {
        let grid = grid1d(32, 4.0);
        let mut values = vec![0.0; 32];
        for v in values.iter_mut().take(5) {
            *v = 2.5;
        }
        let f = GridFunction::from_values(grid, values).unwrap();
        let profile = rearrangement(&f);
        let m = 5.0 * grid.cell_volume();
        assert_eq!(profile.value_at(0.0), 2.5);
        assert_eq!(profile.value_at(m * 0.99), 2.5);
        assert_eq!(profile.value_at(m * 1.01), 0.0);
    }

    #[test]
    fn rearrangement_is_monotone_and_power_compatible() {
        let grid = grid1d(128, 3.0);
        let f = random_function(grid, 5);
        let g_values: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(6);
            f.values()
                .iter()
                .map(|v| v * rng.gen_range(0.0..1.0))
                .collect()
        };
        let g = GridFunction::from_values(grid, g_values).unwrap();
        let fp = rearrangement(&f);
        let gp = rearrangement(&g);
        for (gs, fs) in gp.sorted_values().iter().zip(fp.sorted_values()) {
            assert!(gs <= fs);
        }

        // (|f|^theta)* = (f*)^theta samplewise
        let theta = 0.5;
        let powered = GridFunction::from_values(
            grid,
            f.values().iter().map(|v| v.abs().powf(theta)).collect(),
        )
        .unwrap();
        let pp = rearrangement(&powered);
        for (a, b) in pp.sorted_values().iter().zip(fp.sorted_values()) {
            assert!((a - b.powf(theta)).abs() < 1e-13);
        }
    }

    #[test]
    fn equimeasurability() {
        let grid = grid1d(64, 2.0);
        let f = random_function(grid, 9);
        let profile = rearrangement(&f);
        for &alpha in &[0.0, 0.3, 1.0, 2.4, 5.0] {
            assert_eq!(
                distribution_function(&f, alpha).unwrap(),
                profile.distribution(alpha)
            );
        }
    }

    #[test]
    fn rearrangement_idempotent() {
        let grid = grid1d(64, 2.0);
        let f = random_function(grid, 4);
        let profile = rearrangement(&f);
        // the profile viewed as a 1-D grid function rearranges to itself
        let as_grid = Grid::new(1, 64, profile.total_measure()).unwrap();
        let as_fn = GridFunction::from_values(as_grid, profile.sorted_values().to_vec()).unwrap();
        let again = rearrangement(&as_fn);
        assert_eq!(again.sorted_values(), profile.sorted_values());
    }

    #[test]
    fn lambda_norm_with_unit_weight_is_lp() {
        let grid = grid1d(128, 5.0);
        let f = random_function(grid, 21);
        let w = WeightProfile::one();
        for &p in &[1.0, 2.0, 3.0] {
            let lorentz = lambda_norm(&f, p, &w).unwrap();
            let lp = (grid.cell_volume() * f.values().iter().map(|v| v.abs().powf(p)).sum::<f64>())
                .powf(1.0 / p);
            assert!((lorentz - lp).abs() <= 1e-12 * lp, "p = {p}");
        }
    }

    #[test]
    fn lambda_norm_with_lorentz_weight_matches_direct_formula() {
        let grid = grid1d(64, 3.0);
        let f = random_function(grid, 8);
        let (p, q) = (2.0, 3.0);
        let w = WeightProfile::lorentz_pq(p, q).unwrap();
        let lorentz = lambda_norm(&f, p, &w).unwrap();
        // direct L^{q,p}: (int (t^{1/q} f*(t))^p dt/t)^{1/p}, identical
        // integrand evaluated in closed form per step
        let profile = rearrangement(&f);
        let step = profile.step();
        let mut acc = 0.0;
        for (i, &v) in profile.sorted_values().iter().enumerate() {
            let t0 = i as f64 * step;
            let t1 = (i + 1) as f64 * step;
            acc += v.powf(p) * (q / p) * (t1.powf(p / q) - t0.powf(p / q));
        }
        let direct = acc.powf(1.0 / p);
        assert!((lorentz - direct).abs() <= 1e-13 * direct);
    }

    #[test]
    fn lambda_norm_is_homogeneous() {
        let grid = grid1d(64, 2.0);
        let f = random_function(grid, 3);
        let w = WeightProfile::power(1.0, 0.2).unwrap();
        let c = -7.3;
        let a = lambda_norm(&f.scaled(c), 2.0, &w).unwrap();
        let b = c.abs() * lambda_norm(&f, 2.0, &w).unwrap();
        assert!((a - b).abs() <= 1e-13 * b);
    }

    #[test]
    fn weak_norm_of_indicator() {
        let grid = grid1d(32, 4.0);
        let mut values = vec![0.0; 32];
        for v in values.iter_mut().take(6) {
            *v = 1.0;
        }
        let f = GridFunction::from_values(grid, values).unwrap();
        let m = 6.0 * grid.cell_volume();
        let p = 2.5;
        let weak = weak_lambda_norm(&f, p, &WeightProfile::one()).unwrap();
        assert!((weak - m.powf(1.0 / p)).abs() < 1e-13);
        assert_eq!(
            weak_lambda_norm(&GridFunction::zeros(grid), p, &WeightProfile::one()).unwrap(),
            0.0
        );
    }

    #[test]
    fn weak_below_strong() {
        let grid = grid1d(128, 6.0);
        let w = WeightProfile::power(2.0, 0.4).unwrap();
        for seed in 0..8 {
            let f = random_function(grid, 100 + seed);
            let weak = weak_lambda_norm(&f, 2.0, &w).unwrap();
            let strong = lambda_norm(&f, 2.0, &w).unwrap();
            assert!(weak <= strong * (1.0 + 1e-12), "seed {seed}");
        }
    }

    #[test]
    fn sobolev_variants() {
        let grid = grid1d(64, 10.0);
        let c = GridFunction::constant(grid, 2.0).unwrap();
        let w = WeightProfile::one();
        assert!(lorentz_sobolev_norm(&c, 0.5, 2.0, &w).unwrap() < 1e-12);

        let f = random_function(grid, 2);
        let s = 0.7;
        let viaw = lorentz_sobolev_norm(&f, s, 2.0, &w).unwrap();
        let g = spectral::fractional_laplacian(&f, s).unwrap();
        let lp = (grid.cell_volume() * g.values().iter().map(|v| v * v).sum::<f64>()).sqrt();
        assert!((viaw - lp).abs() <= 1e-12 * lp);

        // 1-homogeneity
        let a = lorentz_sobolev_norm(&f.scaled(3.7), s, 2.0, &w).unwrap();
        assert!((a - 3.7 * viaw).abs() <= 1e-13 * a);
    }
}
