//! Weights on `(0, infinity)`, the Arino–Muckenhoupt `B_p` condition, and
//! the two-weight boundedness conditions used by the two-weighted
//! inequality corollaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weight `w` on the half line together with its primitive
/// `W(t) = integral_0^t w`.
///
/// The `Power` kind is `w(t) = c * t^alpha` with closed-form primitive and
/// tail integrals. The `Tabulated` kind is piecewise constant between
/// strictly increasing breakpoints, constant below the first breakpoint,
/// and continues past the last one as the power law
/// `w(t) = w_last * (t/t_last)^tail_alpha`, so every tail integral stays
/// analytic instead of being silently truncated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightProfile {
    Power {
        c: f64,
        alpha: f64,
    },
    Tabulated {
        t: Vec<f64>,
        w: Vec<f64>,
        tail_alpha: f64,
    },
}

impl WeightProfile {
    /// `w(t) = c * t^alpha`; requires `c > 0` and `alpha > -1` (otherwise
    /// `W` diverges at zero and every Lorentz norm is degenerate).
    pub fn power(c: f64, alpha: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "power weight needs c > 0, got {c}"
            )));
        }
        if !(alpha.is_finite() && alpha > -1.0) {
            return Err(Error::InvalidParameter(format!(
                "power weight needs alpha > -1 (W divergent at 0), got {alpha}"
            )));
        }
        Ok(Self::Power { c, alpha })
    }

    /// The constant weight `w = 1`.
    pub fn one() -> Self {
        Self::Power { c: 1.0, alpha: 0.0 }
    }

    /// The weight `t^{p/q - 1}` whose Lorentz space is `L^{q,p}`.
    pub fn lorentz_pq(p: f64, q: f64) -> Result<Self> {
        Self::power(1.0, p / q - 1.0)
    }

    pub fn tabulated(t: Vec<f64>, w: Vec<f64>, tail_alpha: f64) -> Result<Self> {
        if t.is_empty() || t.len() != w.len() {
            return Err(Error::InvalidParameter(
                "tabulated weight needs equal nonempty breakpoint/value vectors".into(),
            ));
        }
        if t[0] <= 0.0 || t.windows(2).any(|win| win[0] >= win[1]) {
            return Err(Error::InvalidParameter(
                "tabulated weight breakpoints must be positive and strictly increasing".into(),
            ));
        }
        if w.iter().any(|&v| !(v.is_finite() && v >= 0.0)) {
            return Err(Error::InvalidParameter(
                "tabulated weight values must be >= 0".into(),
            ));
        }
        if *w.last().unwrap() == 0.0 && tail_alpha != 0.0 {
            return Err(Error::InvalidParameter(
                "tabulated weight tail undefined: last value is zero".into(),
            ));
        }
        if !tail_alpha.is_finite() {
            return Err(Error::InvalidParameter(
                "tail exponent must be finite".into(),
            ));
        }
        Ok(Self::Tabulated { t, w, tail_alpha })
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Power { c, alpha } => {
                if t <= 0.0 {
                    0.0
                } else {
                    c * t.powf(*alpha)
                }
            }
            Self::Tabulated {
                t: bp,
                w,
                tail_alpha,
            } => {
                if t <= 0.0 {
                    return 0.0;
                }
                let last = *bp.last().unwrap();
                if t >= last {
                    return w.last().unwrap() * (t / last).powf(*tail_alpha);
                }
                let i = bp.partition_point(|&b| b <= t);
                w[i]
            }
        }
    }

    /// Primitive `W(t) = integral_0^t w(s) ds`, exact per piece.
    pub fn primitive(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Power { c, alpha } => c * t.powf(alpha + 1.0) / (alpha + 1.0),
            Self::Tabulated {
                t: bp,
                w,
                tail_alpha,
            } => {
                let mut acc = 0.0;
                let mut prev = 0.0;
                for (i, &b) in bp.iter().enumerate() {
                    let upper = b.min(t);
                    if upper > prev {
                        acc += w[i.min(w.len() - 1)] * (upper - prev);
                    }
                    if t <= b {
                        return acc;
                    }
                    prev = b;
                }
                let last = *bp.last().unwrap();
                let w_last = *w.last().unwrap();
                // power-law continuation past the last breakpoint
                let a = *tail_alpha;
                if (a - (-1.0)).abs() < 1e-15 {
                    acc + w_last * last * (t / last).ln()
                } else {
                    acc + w_last * last / (a + 1.0) * ((t / last).powf(a + 1.0) - 1.0)
                }
            }
        }
    }

    /// `integral_r^inf w(t) / t^p dt`, `None` when divergent.
    pub fn tail_integral(&self, r: f64, p: f64) -> Option<f64> {
        match self {
            Self::Power { c, alpha } => {
                let e = alpha - p;
                if e >= -1.0 {
                    None
                } else {
                    Some(c * r.powf(e + 1.0) / -(e + 1.0))
                }
            }
            Self::Tabulated {
                t: bp,
                w,
                tail_alpha,
            } => {
                let last = *bp.last().unwrap();
                let w_last = *w.last().unwrap();
                let tail_exp = tail_alpha - p;
                if w_last > 0.0 && tail_exp >= -1.0 {
                    return None;
                }
                // analytic power tail from max(r, last)
                let start = r.max(last);
                let mut acc = if w_last == 0.0 {
                    0.0
                } else {
                    w_last / last.powf(*tail_alpha) * start.powf(tail_exp + 1.0) / -(tail_exp + 1.0)
                };
                // exact piecewise parts of [r, last); segment [bp_{i-1}, bp_i)
                // carries w[i], with w[0] below the first breakpoint
                let mut prev: f64 = 0.0;
                for (i, &b) in bp.iter().enumerate() {
                    let lo = prev.max(r);
                    let hi = b.min(last);
                    if hi > lo {
                        let wi = w[i];
                        // integral of t^-p over [lo, hi]
                        acc += if (p - 1.0).abs() < 1e-15 {
                            wi * (hi / lo).ln()
                        } else {
                            wi * (hi.powf(1.0 - p) - lo.powf(1.0 - p)) / (1.0 - p)
                        };
                    }
                    prev = b;
                }
                Some(acc)
            }
        }
    }

    /// Asymptotic power exponent of `w` as `t -> infinity`.
    pub(crate) fn alpha_at_infinity(&self) -> f64 {
        match self {
            Self::Power { alpha, .. } => *alpha,
            Self::Tabulated { tail_alpha, .. } => *tail_alpha,
        }
    }
}

/// Outcome of the `B_p` sup: either the constant or a divergence
/// diagnosis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BpOutcome {
    Constant(f64),
    Divergent { reason: String },
}

impl BpOutcome {
    pub fn constant(&self) -> Option<f64> {
        match self {
            Self::Constant(c) => Some(*c),
            Self::Divergent { .. } => None,
        }
    }
}

/// Log-spaced sup grid used by every weight-condition evaluator:
/// 65 points per decade across `[1e-6, 1e+6] * scale`, endpoints included.
pub(crate) fn sup_grid(scale: f64) -> Vec<f64> {
    let decades = 12;
    let per_decade = 65usize;
    let total = decades * (per_decade - 1) + 1;
    let lo = (1e-6 * scale).ln();
    let hi = (1e6 * scale).ln();
    let h = (hi - lo) / (total - 1) as f64;
    (0..total).map(|i| (lo + h * i as f64).exp()).collect()
}

/// `[w]_{B_p} = sup_r r^p * integral_r^inf w(t) t^-p dt / W(r)`.
///
/// Closed form for power weights; for tabulated weights the sup is taken
/// over a log `r`-grid with the analytic power tail.
pub fn bp_constant(w: &WeightProfile, p: f64) -> Result<BpOutcome> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "B_p needs p >= 1, got {p}"
        )));
    }
    match w {
        WeightProfile::Power { alpha, .. } => {
            if *alpha >= p - 1.0 {
                return Ok(BpOutcome::Divergent {
                    reason: format!(
                        "tail integral divergent: alpha = {alpha} >= p - 1 = {}",
                        p - 1.0
                    ),
                });
            }
            // r^p * c r^(alpha-p+1)/(p-alpha-1) / (c r^(alpha+1)/(alpha+1))
            Ok(BpOutcome::Constant((alpha + 1.0) / (p - alpha - 1.0)))
        }
        WeightProfile::Tabulated { t, .. } => {
            if w.alpha_at_infinity() >= p - 1.0 {
                return Ok(BpOutcome::Divergent {
                    reason: format!(
                        "tail integral divergent: tail exponent {} >= p - 1 = {}",
                        w.alpha_at_infinity(),
                        p - 1.0
                    ),
                });
            }
            let scale = t.last().copied().unwrap_or(1.0);
            let mut sup = 0.0f64;
            for r in sup_grid(scale) {
                let tail = match w.tail_integral(r, p) {
                    Some(v) => v,
                    None => {
                        return Ok(BpOutcome::Divergent {
                            reason: "tail integral divergent".into(),
                        })
                    }
                };
                let denom = w.primitive(r);
                if denom > 0.0 {
                    sup = sup.max(r.powf(p) * tail / denom);
                }
            }
            Ok(BpOutcome::Constant(sup))
        }
    }
}

/// Which corollary's two-weight condition set to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoWeightVariant {
    /// Strong-type conditions for `1 < q0 <= p` (the `q0 = p` pair uses
    /// the tail-integral form).
    Strong1,
    /// Strong-type integral conditions for `1 < p < q0`, with
    /// `1/r = 1/p - 1/q0`.
    Strong2R,
    /// Conditions for `0 < q0 < 1 < p`.
    SmallQ0,
    /// Weak-type condition `sup W(t)^{1/p} / t * integral_0^t V^{-1/q0}`.
    Weak,
}

impl TwoWeightVariant {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Strong1 => "strong-1",
            Self::Strong2R => "strong-2-r",
            Self::SmallQ0 => "small-q0",
            Self::Weak => "weak",
        }
    }
}

/// One evaluated condition: the measured sup/integral over the log grid
/// plus the tail-analysis verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoWeightCondition {
    pub name: String,
    pub measured: f64,
    pub finite: bool,
    /// Divergence diagnosis when not finite.
    pub diagnosis: Option<String>,
    /// True when the formula is implemented verbatim from a displayed
    /// condition whose exponent mix is reproduced as printed.
    pub as_printed: bool,
}

/// Result of a two-weight condition check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoWeightAssessment {
    pub variant: String,
    pub conditions: Vec<TwoWeightCondition>,
    pub all_finite: bool,
}

struct PowerWeight {
    c: f64,
    alpha: f64,
}

impl PowerWeight {
    fn of(w: &WeightProfile) -> Result<Self> {
        match w {
            WeightProfile::Power { c, alpha } => Ok(Self { c: *c, alpha: *alpha }),
            WeightProfile::Tabulated { .. } => Err(Error::InvalidParameter(
                "unsupported weight kind for tail analysis: two-weight conditions need power weights"
                    .into(),
            )),
        }
    }

    /// `W(t) = C t^(alpha+1)`.
    fn primitive_coeff(&self) -> f64 {
        self.c / (self.alpha + 1.0)
    }

    /// `integral_r^inf w/t^p = K r^g`, `None` if divergent; returns (K, g).
    fn tail(&self, p: f64) -> Option<(f64, f64)> {
        let e = self.alpha - p;
        if e >= -1.0 {
            None
        } else {
            Some((self.c / -(e + 1.0), e + 1.0))
        }
    }

    /// `integral_0^t w/s^p = K t^g`, `None` if divergent at zero.
    fn lower(&self, p: f64) -> Option<(f64, f64)> {
        let e = self.alpha - p;
        if e <= -1.0 {
            None
        } else {
            Some((self.c / (e + 1.0), e + 1.0))
        }
    }

    /// `integral_0^t v(s) s^q' / V(s)^q' ds = K t^g`, `None` if divergent.
    fn hardy_lower(&self, q_prime: f64) -> Option<(f64, f64)> {
        let e = self.alpha * (1.0 - q_prime);
        if e <= -1.0 {
            None
        } else {
            let coeff = self.c.powf(1.0 - q_prime) * (self.alpha + 1.0).powf(q_prime) / (e + 1.0);
            Some((coeff, e + 1.0))
        }
    }

    /// `integral_0^t V(s)^{-1/q0} ds = K t^g`, `None` if divergent.
    fn primitive_inverse_lower(&self, q0: f64) -> Option<(f64, f64)> {
        let e = -(self.alpha + 1.0) / q0;
        if e <= -1.0 {
            None
        } else {
            Some((self.primitive_coeff().powf(-1.0 / q0) / (e + 1.0), e + 1.0))
        }
    }
}

/// A quantity of the pure-power form `K * t^g`: finite sup over `t > 0`
/// iff `g = 0`.
struct PowerTerm {
    coeff: f64,
    exponent: f64,
}

impl PowerTerm {
    fn mul(self, other: PowerTerm) -> PowerTerm {
        PowerTerm {
            coeff: self.coeff * other.coeff,
            exponent: self.exponent + other.exponent,
        }
    }

    fn pow(self, e: f64) -> PowerTerm {
        PowerTerm {
            coeff: self.coeff.powf(e),
            exponent: self.exponent * e,
        }
    }

    fn into_condition(self, name: &str, as_printed: bool) -> TwoWeightCondition {
        let finite = self.exponent.abs() < 1e-9;
        let (measured, diagnosis) = if finite {
            (self.coeff, None)
        } else {
            // report the sup over the standard log window
            let grid = sup_grid(1.0);
            let sup = grid
                .iter()
                .map(|&t| self.coeff * t.powf(self.exponent))
                .fold(0.0f64, f64::max);
            (
                sup,
                Some(format!(
                    "sup diverges: condition behaves like t^{:.6} as t -> {}",
                    self.exponent,
                    if self.exponent > 0.0 { "infinity" } else { "0" }
                )),
            )
        };
        TwoWeightCondition {
            name: name.into(),
            measured,
            finite,
            diagnosis,
            as_printed,
        }
    }
}

fn divergent_condition(name: &str, reason: &str, as_printed: bool) -> TwoWeightCondition {
    TwoWeightCondition {
        name: name.into(),
        measured: f64::INFINITY,
        finite: false,
        diagnosis: Some(reason.into()),
        as_printed,
    }
}

/// Evaluate the two-weight conditions of the selected variant for the
/// pair `(v, w)`; every condition is reduced to a closed-form power of
/// `t`, so the finite/infinite verdict is exact.
pub fn two_weight_conditions(
    v: &WeightProfile,
    w: &WeightProfile,
    p: f64,
    q0: f64,
    variant: TwoWeightVariant,
) -> Result<TwoWeightAssessment> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "two-weight conditions need p > 1, got {p}"
        )));
    }
    if !(q0.is_finite() && q0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "two-weight conditions need q0 > 0, got {q0}"
        )));
    }
    match variant {
        TwoWeightVariant::Strong1 if !(q0 > 1.0 && q0 <= p) => {
            return Err(Error::InvalidParameter(format!(
                "strong-1 needs 1 < q0 <= p, got q0 = {q0}, p = {p}"
            )))
        }
        TwoWeightVariant::Strong2R if q0 <= p => {
            return Err(Error::InvalidParameter(format!(
                "strong-2-r needs q0 > p, got q0 = {q0}, p = {p}"
            )))
        }
        TwoWeightVariant::SmallQ0 if q0 >= 1.0 => {
            return Err(Error::InvalidParameter(format!(
                "small-q0 needs q0 < 1, got {q0}"
            )))
        }
        _ => {}
    }

    let vw = PowerWeight::of(v)?;
    let ww = PowerWeight::of(w)?;
    let p_prime = p / (p - 1.0);
    let q0_prime = if q0 > 1.0 {
        q0 / (q0 - 1.0)
    } else {
        f64::INFINITY
    };

    let ratio_condition = |name: &str| -> TwoWeightCondition {
        // sup W(t)^{1/p} / V(t)^{1/q0}
        let term = PowerTerm {
            coeff: ww.primitive_coeff().powf(1.0 / p) / vw.primitive_coeff().powf(1.0 / q0),
            exponent: (ww.alpha + 1.0) / p - (vw.alpha + 1.0) / q0,
        };
        term.into_condition(name, false)
    };

    let mut conditions = Vec::new();
    match variant {
        TwoWeightVariant::Strong1 => {
            conditions.push(ratio_condition("sup W^(1/p)/V^(1/q0)"));
            if (q0 - p).abs() < 1e-12 {
                // tail-integral form for the q0 = p pair
                let name = "sup (int_t^inf w/s^p)^(1/p) (int_0^t v s^p'/V^p')^(1/p')";
                match (ww.tail(p), vw.hardy_lower(p_prime)) {
                    (Some((kt, gt)), Some((kh, gh))) => {
                        let term = PowerTerm {
                            coeff: kt,
                            exponent: gt,
                        }
                        .pow(1.0 / p)
                        .mul(
                            PowerTerm {
                                coeff: kh,
                                exponent: gh,
                            }
                            .pow(1.0 / p_prime),
                        );
                        conditions.push(term.into_condition(name, false));
                    }
                    (None, _) => conditions.push(divergent_condition(
                        name,
                        "tail integral of w/s^p divergent at infinity",
                        false,
                    )),
                    (_, None) => conditions.push(divergent_condition(
                        name,
                        "Hardy integral of v s^p'/V^p' divergent at zero",
                        false,
                    )),
                }
            } else {
                // verbatim displayed condition for q0 < p; both inner
                // integrals start at zero as printed
                let name = "sup (int_0^t w/s^p)^(1/p) (int_0^t v s^q0'/V^q0')";
                match (ww.lower(p), vw.hardy_lower(q0_prime)) {
                    (Some((kl, gl)), Some((kh, gh))) => {
                        let term = PowerTerm {
                            coeff: kl,
                            exponent: gl,
                        }
                        .pow(1.0 / p)
                        .mul(PowerTerm {
                            coeff: kh,
                            exponent: gh,
                        });
                        conditions.push(term.into_condition(name, true));
                    }
                    (None, _) => conditions.push(divergent_condition(
                        name,
                        "integral of w/s^p divergent at zero (as printed)",
                        true,
                    )),
                    (_, None) => conditions.push(divergent_condition(
                        name,
                        "Hardy integral of v s^q0'/V^q0' divergent at zero",
                        true,
                    )),
                }
            }
        }
        TwoWeightVariant::Strong2R => {
            // 1/r = 1/p - 1/q0 (reading the printed 1/p - 1/q through the
            // boundedness M_B: Lambda^q0(v) -> Lambda^p(w) it expresses)
            let r = 1.0 / (1.0 / p - 1.0 / q0);
            debug_assert!(r.is_finite());
            // (int_0^inf (W/V)^(r/q0) w ds)^(1/r): pure-power integrand over
            // (0, inf) never converges, so the verdict comes from the
            // endpoint exponents.
            let g = (ww.alpha - vw.alpha) * (r / q0) + ww.alpha;
            let name1 = "(int_0^inf (W/V)^(r/q0) w)^(1/r)";
            if g >= -1.0 {
                conditions.push(divergent_condition(
                    name1,
                    &format!("integrand ~ t^{g:.6} not integrable at infinity"),
                    true,
                ));
            } else {
                conditions.push(divergent_condition(
                    name1,
                    &format!("integrand ~ t^{g:.6} not integrable at zero"),
                    true,
                ));
            }
            let name2 = "(int_0^inf [(int_s^inf w/t^p)^(1/p)(int_0^t v t^q0'/V^q0')^(1/p')]^r v s^q0'/V^q0' ds)^(1/r)";
            match (ww.tail(p), vw.hardy_lower(q0_prime)) {
                (Some((_, gt)), Some((_, gh))) => {
                    // bracket ~ t^(gt/p + gh/p'); density ~ d/ds of hardy_lower
                    let bracket_g = gt / p + gh / p_prime;
                    let density_g = vw.alpha * (1.0 - q0_prime);
                    let g2 = bracket_g * r + density_g;
                    if g2 >= -1.0 {
                        conditions.push(divergent_condition(
                            name2,
                            &format!("integrand ~ s^{g2:.6} not integrable at infinity"),
                            true,
                        ));
                    } else {
                        conditions.push(divergent_condition(
                            name2,
                            &format!("integrand ~ s^{g2:.6} not integrable at zero"),
                            true,
                        ));
                    }
                }
                _ => conditions.push(divergent_condition(name2, "inner integral divergent", true)),
            }
        }
        TwoWeightVariant::SmallQ0 => {
            conditions.push(ratio_condition("sup W^(1/p)/V^(1/q0)"));
            let name = "sup t/V^(1/q0) (int_t^inf w/s^p)^(1/p)";
            match ww.tail(p) {
                Some((kt, gt)) => {
                    let term = PowerTerm {
                        coeff: vw.primitive_coeff().powf(-1.0 / q0),
                        exponent: 1.0 - (vw.alpha + 1.0) / q0,
                    }
                    .mul(
                        PowerTerm {
                            coeff: kt,
                            exponent: gt,
                        }
                        .pow(1.0 / p),
                    );
                    conditions.push(term.into_condition(name, false));
                }
                None => conditions.push(divergent_condition(
                    name,
                    "tail integral of w/s^p divergent at infinity",
                    false,
                )),
            }
        }
        TwoWeightVariant::Weak => {
            let name = "sup W^(1/p)/t int_0^t V^(-1/q0)";
            match vw.primitive_inverse_lower(q0) {
                Some((ki, gi)) => {
                    let term = PowerTerm {
                        coeff: ww.primitive_coeff().powf(1.0 / p),
                        exponent: (ww.alpha + 1.0) / p - 1.0,
                    }
                    .mul(PowerTerm {
                        coeff: ki,
                        exponent: gi,
                    });
                    conditions.push(term.into_condition(name, false));
                }
                None => conditions.push(divergent_condition(
                    name,
                    "integral of V^(-1/q0) divergent at zero",
                    false,
                )),
            }
        }
    }

    let all_finite = conditions.iter().all(|c| c.finite);
    Ok(TwoWeightAssessment {
        variant: variant.name().into(),
        conditions,
        all_finite,
    })
}
