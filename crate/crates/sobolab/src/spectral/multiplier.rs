//! Spectral multipliers `m(lambda)` and the smooth cutoff pair.
//!
//! The cutoff `theta0` equals 1 on `[0, 1/2)`, 0 on `[1, inf)` and is the
//! standard C-infinity bump transition in between; `theta1 = 1 - theta0`
//! so the pair is an exact partition of unity at every eigenvalue. The
//! dyadic generator is `psi(lambda) = theta0(lambda/2) - theta0(lambda)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn sigma(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

/// Smooth transition S(u) = sigma(u) / (sigma(u) + sigma(1-u)); 0 at u=0,
/// 1 at u=1.
fn smooth_step(u: f64) -> f64 {
    let a = sigma(u);
    let b = sigma(1.0 - u);
    if a == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Low-frequency cutoff: 1 on `[0, 1/2)`, 0 on `[1, inf)`, smooth bump in
/// between.
pub fn theta0(lambda: f64) -> f64 {
    if lambda < 0.5 {
        1.0
    } else if lambda >= 1.0 {
        0.0
    } else {
        smooth_step(2.0 * (1.0 - lambda))
    }
}

/// High-frequency cutoff, the exact complement of [`theta0`].
pub fn theta1(lambda: f64) -> f64 {
    1.0 - theta0(lambda)
}

/// Dyadic block generator `psi(lambda) = theta0(lambda/2) - theta0(lambda)`.
pub fn dyadic_psi(lambda: f64) -> f64 {
    theta0(lambda / 2.0) - theta0(lambda)
}

/// A multiplier evaluable at any eigenvalue `lambda >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralMultiplier {
    Identity,
    /// `lambda^(s/2)`, with `s > 0`; maps `lambda = 0` to 0.
    Power {
        s: f64,
    },
    /// Heat multiplier `exp(-t*lambda)` with `t > 0`; maps `lambda = 0` to 1.
    Heat {
        t: f64,
    },
    /// The smooth low cutoff `theta0`.
    CutoffLow,
    /// The smooth high cutoff `theta1`.
    CutoffHigh,
    /// Dyadic block `psi(2^{-j} lambda)` at level `j`.
    Dyadic {
        level: u32,
    },
    /// Piecewise-linear interpolation of `(lambda, value)` samples;
    /// clamped to the end values outside the sampled range.
    Tabulated {
        lambdas: Vec<f64>,
        values: Vec<f64>,
    },
}

impl SpectralMultiplier {
    pub fn power(s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "power multiplier needs s > 0, got {s}"
            )));
        }
        Ok(Self::Power { s })
    }

    pub fn heat(t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "heat multiplier needs t > 0, got {t}"
            )));
        }
        Ok(Self::Heat { t })
    }

    pub fn tabulated(lambdas: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if lambdas.len() != values.len() || lambdas.is_empty() {
            return Err(Error::InvalidParameter(
                "tabulated multiplier needs equal, nonempty sample vectors".into(),
            ));
        }
        if lambdas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "tabulated multiplier lambdas must be strictly increasing".into(),
            ));
        }
        Ok(Self::Tabulated { lambdas, values })
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        match self {
            Self::Identity => 1.0,
            Self::Power { s } => {
                if lambda == 0.0 {
                    0.0
                } else {
                    lambda.powf(s / 2.0)
                }
            }
            Self::Heat { t } => (-t * lambda).exp(),
            Self::CutoffLow => theta0(lambda),
            Self::CutoffHigh => theta1(lambda),
            Self::Dyadic { level } => dyadic_psi(lambda / 2f64.powi(*level as i32)),
            Self::Tabulated { lambdas, values } => {
                if lambda <= lambdas[0] {
                    return values[0];
                }
                if lambda >= *lambdas.last().unwrap() {
                    return *values.last().unwrap();
                }
                let i = lambdas.partition_point(|&l| l <= lambda);
                let (l0, l1) = (lambdas[i - 1], lambdas[i]);
                let (v0, v1) = (values[i - 1], values[i]);
                v0 + (v1 - v0) * (lambda - l0) / (l1 - l0)
            }
        }
    }
}

/// Parameters of the heat-integral representation of fractional powers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatReprParams {
    /// Integer order of the Laplacian power under the integral; must
    /// exceed the target exponent.
    pub k: u32,
    /// Upper integration horizon.
    pub t_max: f64,
    /// Quadrature node count per decade of `t`.
    pub steps_per_decade: usize,
}

impl HeatReprParams {
    pub fn new(k: u32, t_max: f64, steps_per_decade: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParameter(
                "heat representation needs k >= 1".into(),
            ));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t_max = {t_max} must be positive"
            )));
        }
        if steps_per_decade < 16 {
            return Err(Error::InvalidParameter(format!(
                "steps_per_decade = {steps_per_decade} below minimum 16"
            )));
        }
        Ok(Self {
            k,
            t_max,
            steps_per_decade,
        })
    }

    /// Defaults for a grid and target exponent `s2`: smallest admissible
    /// integer `k` and a horizon deep enough that the tail beyond it is
    /// negligible on mean-zero inputs.
    pub fn for_grid(grid: crate::grid::Grid, s2: f64) -> Result<Self> {
        if !(s2.is_finite() && s2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "target exponent s2 = {s2} must be positive"
            )));
        }
        let k = (s2.floor() as u32) + 1;
        Self::new(k, 40.0 / grid.lambda_min_nonzero(), 24)
    }
}
