//! Parameter algebra for the inequality catalog, ratio evaluation over
//! corpora, stability studies, and the Hedberg pointwise verifier.
//!
//! Every case measures `lhs / (A^theta * B^(1-theta))` per corpus member;
//! the corpus maximum is the empirical constant. Constants are reported,
//! never compared against an asserted magnitude: the theory proves a
//! constant exists, so acceptance is stability of the measurement, not
//! its size.

pub mod corpus;
mod report;

pub use corpus::{CorpusFamily, CorpusMember, CorpusSpec};
pub use report::{
    Aggregate, Diagnostics, FunctionRecord, GridMeta, Provenance, RefinementRecord,
    VerificationReport,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::norms::{self, BesovParams, RadiusSet, WeightField};
use crate::rearrange::{self, TwoWeightVariant, WeightProfile};
use crate::spectral::{self, SpectralMultiplier};

/// The implemented inequality cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseId {
    Thm1,
    Thm2Lorentz,
    CorWeakLorentz,
    CorTwoWeight,
    Thm3Morrey,
    Thm4Weighted,
    HedbergPointwise,
}

impl CaseId {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Thm1 => "thm1",
            Self::Thm2Lorentz => "thm2-lorentz",
            Self::CorWeakLorentz => "cor-weak-lorentz",
            Self::CorTwoWeight => "cor-two-weight",
            Self::Thm3Morrey => "thm3-morrey",
            Self::Thm4Weighted => "thm4-weighted",
            Self::HedbergPointwise => "hedberg-pointwise",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "thm1" => Ok(Self::Thm1),
            "thm2" | "thm2-lorentz" => Ok(Self::Thm2Lorentz),
            "weak" | "cor-weak-lorentz" => Ok(Self::CorWeakLorentz),
            "two-weight" | "cor-two-weight" => Ok(Self::CorTwoWeight),
            "thm3" | "thm3-morrey" => Ok(Self::Thm3Morrey),
            "thm4" | "thm4-weighted" => Ok(Self::Thm4Weighted),
            "hedberg" | "hedberg-pointwise" => Ok(Self::HedbergPointwise),
            other => Err(Error::InvalidParameter(format!(
                "unknown case id {other:?}"
            ))),
        }
    }
}

/// Analytic spatial weights, regenerable on any grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "field", rename_all = "kebab-case")]
pub enum SpatialWeightSpec {
    Ones,
    /// `w(x) = max(|x - center|, h)^(-1/2)`, the classical A_1 example
    /// sampled with a one-cell clip.
    InverseSqrtDistance,
}

impl SpatialWeightSpec {
    pub fn realize(&self, grid: Grid) -> WeightField {
        match self {
            Self::Ones => WeightField::ones(grid),
            Self::InverseSqrtDistance => {
                let center = [grid.period() / 2.0; 3];
                let h = grid.cell_width();
                WeightField::from_fn(grid, |x| {
                    grid.periodic_point_distance(x, &center[..x.len()])
                        .max(h)
                        .powf(-0.5)
                })
                .expect("clipped inverse power is positive and finite")
            }
        }
    }
}

/// Weight attachments per case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "weights", rename_all = "kebab-case")]
pub enum CaseWeights {
    None,
    Lorentz { w: WeightProfile },
    TwoWeight { v: WeightProfile, w: WeightProfile },
    Spatial { omega: SpatialWeightSpec },
}

/// A fully parameterized inequality instance. Constructors derive the
/// dependent exponents and reject out-of-range combinations, so no
/// evaluation ever runs on invalid parameter algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCase {
    pub id: CaseId,
    /// Fractional order on the left side (`s` for thm1/thm4, `s1`
    /// elsewhere); 0 means the identity.
    pub lhs_order: f64,
    /// Fractional order inside the A-factor; ignored by the gradient
    /// cases (thm1, thm4).
    pub rhs_order: f64,
    pub p: f64,
    pub q: f64,
    pub beta: f64,
    pub theta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub morrey_a: Option<f64>,
    #[serde(flatten)]
    pub weights: CaseWeights,
}

impl InequalityCase {
    /// `||J^(s/2) f||_q <= C ||grad f||_1^theta ||f||_B^(1-theta)` with
    /// `beta = (1 - s q)/(q - 1)`, `theta = 1/q`.
    pub fn thm1(q: f64, s: f64) -> Result<Self> {
        let (beta, theta) = thm1_algebra(q, s)?;
        Ok(Self {
            id: CaseId::Thm1,
            lhs_order: s,
            rhs_order: 1.0,
            p: 1.0,
            q,
            beta,
            theta,
            morrey_a: None,
            weights: CaseWeights::None,
        })
    }

    /// Lorentz version: `||J^(s1/2) f||_{Lambda^q(w)} <= C
    /// ||J^(s/2) f||_{Lambda^p(w)}^theta ||f||_B^(1-theta)` with
    /// `theta = p/q`, `s1 = theta s - (1-theta) beta`, `w in B_p`.
    pub fn thm2(s: f64, beta: f64, p: f64, q: f64, w: WeightProfile) -> Result<Self> {
        let (theta, s1) = interpolation_algebra(s, beta, p, q)?;
        require_bp(&w, p)?;
        Ok(Self {
            id: CaseId::Thm2Lorentz,
            lhs_order: s1,
            rhs_order: s,
            p,
            q,
            beta,
            theta,
            morrey_a: None,
            weights: CaseWeights::Lorentz { w },
        })
    }

    /// Weak-type corollary: same algebra with weak Lorentz norms.
    pub fn weak_lorentz(s: f64, beta: f64, p: f64, q: f64, w: WeightProfile) -> Result<Self> {
        let (theta, s1) = interpolation_algebra(s, beta, p, q)?;
        require_bp(&w, p)?;
        Ok(Self {
            id: CaseId::CorWeakLorentz,
            lhs_order: s1,
            rhs_order: s,
            p,
            q,
            beta,
            theta,
            morrey_a: None,
            weights: CaseWeights::Lorentz { w },
        })
    }

    /// Two-weight corollary: the A-factor uses `Lambda^p(v)`, the left
    /// side `Lambda^q(w)`; the pair must satisfy the strong-type
    /// conditions.
    pub fn two_weight(
        s: f64,
        beta: f64,
        p: f64,
        q: f64,
        v: WeightProfile,
        w: WeightProfile,
    ) -> Result<Self> {
        let (theta, s1) = interpolation_algebra(s, beta, p, q)?;
        let assessment = rearrange::two_weight_conditions(&v, &w, p, p, TwoWeightVariant::Strong1)?;
        if !assessment.all_finite {
            let reasons: Vec<String> = assessment
                .conditions
                .iter()
                .filter(|c| !c.finite)
                .map(|c| format!("{}: {}", c.name, c.diagnosis.clone().unwrap_or_default()))
                .collect();
            return Err(Error::InvalidParameter(format!(
                "two-weight conditions violated: {}",
                reasons.join("; ")
            )));
        }
        Ok(Self {
            id: CaseId::CorTwoWeight,
            lhs_order: s1,
            rhs_order: s,
            p,
            q,
            beta,
            theta,
            morrey_a: None,
            weights: CaseWeights::TwoWeight { v, w },
        })
    }

    /// Morrey version with index `0 <= a < n` (checked against the grid
    /// at evaluation time).
    pub fn thm3(s: f64, beta: f64, p: f64, q: f64, a: f64) -> Result<Self> {
        let (theta, s1) = interpolation_algebra(s, beta, p, q)?;
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Morrey index a = {a} must be >= 0"
            )));
        }
        Ok(Self {
            id: CaseId::Thm3Morrey,
            lhs_order: s1,
            rhs_order: s,
            p,
            q,
            beta,
            theta,
            morrey_a: Some(a),
            weights: CaseWeights::None,
        })
    }

    /// A_1-weighted version of thm1.
    pub fn thm4(q: f64, s: f64, omega: SpatialWeightSpec) -> Result<Self> {
        let (beta, theta) = thm1_algebra(q, s)?;
        Ok(Self {
            id: CaseId::Thm4Weighted,
            lhs_order: s,
            rhs_order: 1.0,
            p: 1.0,
            q,
            beta,
            theta,
            morrey_a: None,
            weights: CaseWeights::Spatial { omega },
        })
    }

    /// Negative-control copy with `beta` shifted off its derived value.
    /// The exponent relations no longer cancel, so the continuum ratio
    /// becomes scale-dependent and a dilation sweep must flag it.
    pub fn with_perturbed_beta(&self, delta: f64) -> Self {
        let mut case = self.clone();
        case.beta += delta;
        case
    }

    /// Hedberg pointwise case: `0 < s1 < s`, `theta = (s1+beta)/(s+beta)`
    /// (the interpolation relation solved for theta).
    pub fn hedberg(s: f64, s1: f64, beta: f64) -> Result<Self> {
        if !(s.is_finite() && s1.is_finite() && beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(
                "hedberg needs finite s, s1 and beta > 0".into(),
            ));
        }
        if !(0.0 < s1 && s1 < s) {
            return Err(Error::InvalidParameter(format!(
                "hedberg needs 0 < s1 < s, got s1 = {s1}, s = {s}"
            )));
        }
        let theta = (s1 + beta) / (s + beta);
        if !(0.0 < theta && theta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "theta = {theta} outside (0,1)"
            )));
        }
        Ok(Self {
            id: CaseId::HedbergPointwise,
            lhs_order: s1,
            rhs_order: s,
            p: 1.0,
            q: 1.0 / theta,
            beta,
            theta,
            morrey_a: None,
            weights: CaseWeights::None,
        })
    }
}

fn thm1_algebra(q: f64, s: f64) -> Result<(f64, f64)> {
    if !(q.is_finite() && q > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "1 < q < infinity violated: q = {q}"
        )));
    }
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidParameter(format!("s >= 0 violated: s = {s}")));
    }
    if s >= 1.0 / q {
        return Err(Error::InvalidParameter(format!(
            "s < 1/q violated: s = {s}, q = {q}"
        )));
    }
    Ok(((1.0 - s * q) / (q - 1.0), 1.0 / q))
}

fn interpolation_algebra(s: f64, beta: f64, p: f64, q: f64) -> Result<(f64, f64)> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::InvalidParameter(format!("s > 0 violated: s = {s}")));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta > 0 violated: beta = {beta}"
        )));
    }
    if !(p.is_finite() && q.is_finite() && 1.0 < p && p < q) {
        return Err(Error::InvalidParameter(format!(
            "1 < p < q < infinity violated: p = {p}, q = {q}"
        )));
    }
    let theta = p / q;
    let s1 = theta * s - (1.0 - theta) * beta;
    if !(-beta < s1 && s1 < s) {
        return Err(Error::InvalidParameter(format!(
            "-beta < s1 < s violated: s1 = {s1}, beta = {beta}, s = {s}"
        )));
    }
    Ok((theta, s1))
}

fn require_bp(w: &WeightProfile, p: f64) -> Result<()> {
    match rearrange::bp_constant(w, p)? {
        rearrange::BpOutcome::Constant(_) => Ok(()),
        rearrange::BpOutcome::Divergent { reason } => Err(Error::InvalidParameter(format!(
            "weight not in B_{p}: {reason}"
        ))),
    }
}

/// Evaluation-time resources: probe grids and radius sets, fixed per run
/// and echoed in reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalSettings {
    pub besov: BesovParams,
    pub radius_count: usize,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            besov: BesovParams::default(),
            radius_count: 16,
        }
    }
}

/// Fractional power with the harness convention `J^0 = Id`; negative
/// orders annihilate the mean.
fn fractional_power(f: &GridFunction, order: f64) -> Result<GridFunction> {
    if order == 0.0 {
        Ok(f.clone())
    } else if order > 0.0 {
        spectral::fractional_laplacian(f, order)
    } else {
        spectral::apply_multiplier_fn(f, |lambda| {
            if lambda == 0.0 {
                0.0
            } else {
                lambda.powf(order / 2.0)
            }
        })
    }
}

/// The three measured quantities of one member, before packaging.
#[derive(Debug, Clone, Copy)]
pub struct CaseEvaluation {
    pub lhs: f64,
    pub factor_a: f64,
    pub factor_b: f64,
    pub ratio: Option<f64>,
    pub flagged: bool,
}

fn package(lhs: f64, factor_a: f64, factor_b: f64, theta: f64) -> CaseEvaluation {
    let denom = factor_a.powf(theta) * factor_b.powf(1.0 - theta);
    if denom > 0.0 && denom.is_finite() {
        CaseEvaluation {
            lhs,
            factor_a,
            factor_b,
            ratio: Some(lhs / denom),
            flagged: false,
        }
    } else {
        // degenerate factor: never report a silent infinity
        CaseEvaluation {
            lhs,
            factor_a,
            factor_b,
            ratio: None,
            flagged: true,
        }
    }
}

/// Evaluate one case on one function: left side, the two factors, and
/// the ratio `lhs / (A^theta B^(1-theta))`.
pub fn evaluate_case(
    case: &InequalityCase,
    f: &GridFunction,
    settings: &EvalSettings,
) -> Result<CaseEvaluation> {
    let grid = f.grid();
    let besov = norms::besov_norm(f, case.beta, &settings.besov)?;
    match (&case.id, &case.weights) {
        (CaseId::Thm1, CaseWeights::None) => {
            let lhs = norms::lp_norm(&fractional_power(f, case.lhs_order)?, case.q)?;
            let a = norms::w11_seminorm(f)?;
            Ok(package(lhs, a, besov, case.theta))
        }
        (CaseId::Thm2Lorentz, CaseWeights::Lorentz { w }) => {
            let lhs = rearrange::lambda_norm(&fractional_power(f, case.lhs_order)?, case.q, w)?;
            let a = rearrange::lambda_norm(&fractional_power(f, case.rhs_order)?, case.p, w)?;
            Ok(package(lhs, a, besov, case.theta))
        }
        (CaseId::CorWeakLorentz, CaseWeights::Lorentz { w }) => {
            let lhs =
                rearrange::weak_lambda_norm(&fractional_power(f, case.lhs_order)?, case.q, w)?;
            let a = rearrange::weak_lambda_norm(&fractional_power(f, case.rhs_order)?, case.p, w)?;
            Ok(package(lhs, a, besov, case.theta))
        }
        (CaseId::CorTwoWeight, CaseWeights::TwoWeight { v, w }) => {
            let lhs = rearrange::lambda_norm(&fractional_power(f, case.lhs_order)?, case.q, w)?;
            let a = rearrange::lambda_norm(&fractional_power(f, case.rhs_order)?, case.p, v)?;
            Ok(package(lhs, a, besov, case.theta))
        }
        (CaseId::Thm3Morrey, CaseWeights::None) => {
            let a_idx = case.morrey_a.expect("thm3 carries a Morrey index");
            let radii = RadiusSet::log_spaced(grid, settings.radius_count)?;
            let lhs =
                norms::morrey_norm(&fractional_power(f, case.lhs_order)?, case.q, a_idx, &radii)?
                    .value;
            let a =
                norms::morrey_norm(&fractional_power(f, case.rhs_order)?, case.p, a_idx, &radii)?
                    .value;
            Ok(package(lhs, a, besov, case.theta))
        }
        (CaseId::Thm4Weighted, CaseWeights::Spatial { omega }) => {
            let field = omega.realize(grid);
            let lhs =
                norms::weighted_lp_norm(&fractional_power(f, case.lhs_order)?, &field, case.q)?;
            let a = norms::weighted_w11_seminorm(f, &field)?;
            Ok(package(lhs, a, besov, case.theta))
        }
        (CaseId::HedbergPointwise, CaseWeights::None) => {
            let radii = RadiusSet::log_spaced(grid, settings.radius_count)?;
            let record = hedberg_check(
                f,
                case.rhs_order,
                case.lhs_order,
                case.beta,
                &radii,
                &settings.besov,
            )?;
            Ok(CaseEvaluation {
                lhs: record.lhs_at_argmax,
                factor_a: record.maximal_at_argmax,
                factor_b: record.besov,
                ratio: Some(record.constant),
                flagged: false,
            })
        }
        _ => Err(Error::InvalidParameter(format!(
            "case {} carries unexpected weights",
            case.id.as_str()
        ))),
    }
}

/// Result of the Hedberg pointwise scan.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HedbergRecord {
    /// `C* = max_x |J^(s1/2) f(x)| / (M_B(J^(s/2) f)(x)^theta B^(1-theta))`
    /// with the `0/0 -> 0` convention.
    pub constant: f64,
    pub argmax_cell: usize,
    pub theta: f64,
    pub lhs_at_argmax: f64,
    pub maximal_at_argmax: f64,
    pub besov: f64,
}

/// Measure the pointwise Hedberg constant of one function.
pub fn hedberg_check(
    f: &GridFunction,
    s: f64,
    s1: f64,
    beta: f64,
    radii: &RadiusSet,
    besov_params: &BesovParams,
) -> Result<HedbergRecord> {
    if !(0.0 < s1 && s1 < s) {
        return Err(Error::InvalidParameter(format!(
            "hedberg needs 0 < s1 < s, got s1 = {s1}, s = {s}"
        )));
    }
    let theta = (s1 + beta) / (s + beta);
    if f.max_abs() == 0.0 {
        return Ok(HedbergRecord {
            constant: 0.0,
            argmax_cell: 0,
            theta,
            lhs_at_argmax: 0.0,
            maximal_at_argmax: 0.0,
            besov: 0.0,
        });
    }
    let besov = norms::besov_norm(f, beta, besov_params)?;
    if besov == 0.0 {
        return Err(Error::InvalidParameter(
            "Besov norm vanished on a nonzero mean-zero function".into(),
        ));
    }
    let h = spectral::fractional_laplacian(f, s1)?;
    let g = spectral::fractional_laplacian(f, s)?;
    let maximal = norms::maximal_function(&g, radii);
    let b_pow = besov.powf(1.0 - theta);
    let mut best = 0.0f64;
    let mut argmax = 0usize;
    for (i, (hv, mv)) in h.values().iter().zip(maximal.values()).enumerate() {
        let num = hv.abs();
        let denom = mv.powf(theta) * b_pow;
        let ratio = if num == 0.0 {
            0.0
        } else if denom == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "maximal function vanished at cell {i} against a nonzero numerator"
            )));
        } else {
            num / denom
        };
        if ratio > best {
            best = ratio;
            argmax = i;
        }
    }
    Ok(HedbergRecord {
        constant: best,
        argmax_cell: argmax,
        theta,
        lhs_at_argmax: h.values()[argmax].abs(),
        maximal_at_argmax: maximal.values()[argmax],
        besov,
    })
}

/// Largest violation factor of the integrated (rearranged) chain
/// `(J^(s1/2) f)*(t)^q <= C*^q (M_B J^(s/2) f)*(t)^p B^(q-p)` over all
/// rearrangement steps; at most 1 up to roundoff when the pointwise
/// constant is correct.
pub fn hedberg_chain_max_violation(
    f: &GridFunction,
    s: f64,
    s1: f64,
    beta: f64,
    p: f64,
    radii: &RadiusSet,
    besov_params: &BesovParams,
) -> Result<f64> {
    let record = hedberg_check(f, s, s1, beta, radii, besov_params)?;
    let q = p / record.theta;
    let h = spectral::fractional_laplacian(f, s1)?;
    let g = spectral::fractional_laplacian(f, s)?;
    let h_star = rearrange::rearrangement(&h);
    let m_star = rearrange::rearrangement(&norms::maximal_function(&g, radii));
    let scale = record.constant.powf(q) * record.besov.powf(q - p);
    let mut worst = 0.0f64;
    for (hv, mv) in h_star.sorted_values().iter().zip(m_star.sorted_values()) {
        let lhs = hv.powf(q);
        let rhs = scale * mv.powf(p);
        if lhs > 0.0 {
            worst = worst.max(lhs / rhs);
        }
    }
    Ok(worst)
}

/// Pointwise ratio `max_x maximal_phi(f)(x) / maximal_function(f)(x)`
/// with the `0/0 -> 0` convention: the measured domination constant of
/// the heat-family maximal function.
pub fn phi_maximal_domination(f: &GridFunction, radii: &RadiusSet, t_grid: &[f64]) -> Result<f64> {
    let phi = norms::maximal_phi(f, t_grid)?;
    let hl = norms::maximal_function(f, radii);
    let mut worst = 0.0f64;
    for (pv, mv) in phi.values().iter().zip(hl.values()) {
        if *pv > 0.0 && *mv > 0.0 {
            worst = worst.max(pv / mv);
        }
    }
    Ok(worst)
}

fn besov_transport_ratio(
    f: &GridFunction,
    case: &InequalityCase,
    settings: &EvalSettings,
) -> Result<Option<f64>> {
    if case.lhs_order <= 0.0 {
        return Ok(None);
    }
    let transported = norms::besov_norm(
        &spectral::fractional_laplacian(f, case.lhs_order)?,
        case.beta + case.lhs_order,
        &settings.besov,
    )?;
    let base = norms::besov_norm(f, case.beta, &settings.besov)?;
    Ok(if base > 0.0 {
        Some(transported / base)
    } else {
        None
    })
}

/// Run a case over a corpus: deterministic given the seed, parallel over
/// members, aggregated in index order.
pub fn run_corpus(
    case: &InequalityCase,
    spec: &CorpusSpec,
    grid: Grid,
    settings: &EvalSettings,
) -> Result<VerificationReport> {
    let members = corpus::generate(spec, grid)?;
    let records: Result<Vec<FunctionRecord>> = members
        .par_iter()
        .map(|m| {
            let eval = evaluate_case(case, &m.function, settings)?;
            Ok(FunctionRecord {
                index: m.index,
                label: m.label.clone(),
                lhs: eval.lhs,
                factor_a: eval.factor_a,
                factor_b: eval.factor_b,
                ratio: eval.ratio,
                flagged: eval.flagged,
            })
        })
        .collect();
    let records = records?;
    let aggregate = report::aggregate(&records);

    // diagnostics measured, not assumed
    let theta0_l1 = spectral::multiplier_kernel_l1(grid, &SpectralMultiplier::CutoffLow)?;
    let theta1_l1 = spectral::multiplier_kernel_l1(grid, &SpectralMultiplier::CutoffHigh)?;
    let transport: Vec<f64> = members
        .par_iter()
        .map(|m| besov_transport_ratio(&m.function, case, settings))
        .collect::<Result<Vec<Option<f64>>>>()?
        .into_iter()
        .flatten()
        .collect();
    let besov_transport_mean_ratio = if transport.is_empty() {
        None
    } else {
        Some(transport.iter().sum::<f64>() / transport.len() as f64)
    };
    let a1 = match &case.weights {
        CaseWeights::Spatial { omega } => Some(norms::a1_constant(
            &omega.realize(grid),
            &RadiusSet::log_spaced(grid, settings.radius_count)?,
        )),
        _ => None,
    };

    let times = norms::besov_time_grid(grid, settings.besov.t_points);
    Ok(VerificationReport {
        case: serde_json::to_value(case).expect("case serializes"),
        grid: grid.into(),
        corpus: serde_json::to_value(spec).expect("corpus spec serializes"),
        records,
        aggregate,
        provenance: Provenance {
            command: None,
            seed: spec.seed,
            besov_t_min: times.first().copied().unwrap_or(0.0),
            besov_t_cap: times.last().copied().unwrap_or(0.0),
            besov_t_points: settings.besov.t_points,
            radii: RadiusSet::log_spaced(grid, settings.radius_count)?
                .radii()
                .to_vec(),
        },
        diagnostics: Diagnostics {
            theta0_kernel_l1: theta0_l1,
            theta1_kernel_l1: theta1_l1,
            besov_transport_mean_ratio,
            a1_constant: a1,
        },
        refinement: None,
    })
}

/// What a scaling sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingMode {
    /// Regenerate the family dilated by each factor.
    Dilation,
    /// Multiply the same member by each factor (a pure homogeneity
    /// check: the spread must vanish).
    Amplitude,
}

/// Ratio stability across a list of scale factors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub mode: ScalingMode,
    pub factors: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `max/min - 1` over the measured ratios.
    pub spread: f64,
    /// Set when the spread exceeds 30%: the parameter algebra does not
    /// make the continuum ratio scale-invariant.
    pub flagged: bool,
}

/// Evaluate the case ratio on one family member regenerated at each
/// scale. The exponent relations make the continuum ratio invariant, so
/// any spread is discretization error — unless the parameters are wrong.
pub fn scaling_check(
    case: &InequalityCase,
    spec: &CorpusSpec,
    member_index: usize,
    factors: &[f64],
    grid: Grid,
    settings: &EvalSettings,
    mode: ScalingMode,
) -> Result<ScalingRecord> {
    if factors.is_empty() {
        return Err(Error::InvalidParameter(
            "scaling check needs at least one factor".into(),
        ));
    }
    let ratios: Result<Vec<f64>> = factors
        .par_iter()
        .map(|&factor| {
            let member = match mode {
                ScalingMode::Dilation => {
                    corpus::generate_dilated(spec, member_index, grid, factor)?
                }
                ScalingMode::Amplitude => {
                    let mut m = corpus::generate_dilated(spec, member_index, grid, 1.0)?;
                    m.function = m.function.scaled(factor);
                    m
                }
            };
            let eval = evaluate_case(case, &member.function, settings)?;
            eval.ratio.ok_or_else(|| {
                Error::InvalidParameter(format!("degenerate ratio at scale factor {factor}"))
            })
        })
        .collect();
    let ratios = ratios?;
    let max = ratios.iter().fold(f64::MIN, |a, &b| a.max(b));
    let min = ratios.iter().fold(f64::MAX, |a, &b| a.min(b));
    let spread = if min > 0.0 {
        max / min - 1.0
    } else {
        f64::INFINITY
    };
    Ok(ScalingRecord {
        mode,
        factors: factors.to_vec(),
        ratios,
        spread,
        flagged: spread > 0.30,
    })
}

pub fn refinement_study(
    case: &InequalityCase,
    spec: &CorpusSpec,
    g_list: &[usize],
    period: f64,
    dimension: usize,
    settings: &EvalSettings,
) -> Result<RefinementRecord> {
    if g_list.is_empty() || g_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "refinement needs an increasing G list".into(),
        ));
    }
    let constants: Result<Vec<f64>> = g_list
        .iter()
        .map(|&g| {
            let grid = Grid::new(dimension, g, period)?;
            Ok(run_corpus(case, spec, grid, settings)?.aggregate.max_ratio)
        })
        .collect();
    let constants = constants?;
    let growth_factor = if constants[0] > 0.0 {
        constants.last().unwrap() / constants[0]
    } else {
        f64::INFINITY
    };
    let monotone_growth = constants.windows(2).all(|w| w[1] > w[0]);
    Ok(RefinementRecord {
        points_per_axis: g_list.to_vec(),
        constants,
        growth_factor,
        flagged: monotone_growth && growth_factor > 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thm1_algebra_examples() {
        let case = InequalityCase::thm1(2.0, 0.0).unwrap();
        assert_eq!(case.beta, 1.0);
        assert_eq!(case.theta, 0.5);
        // beta = theta/(1-theta) at s = 0
        assert!((case.beta - case.theta / (1.0 - case.theta)).abs() < 1e-15);

        let err = InequalityCase::thm1(2.0, 0.6).unwrap_err();
        assert!(err.to_string().contains("s < 1/q violated"), "{err}");
        assert!(InequalityCase::thm1(1.0, 0.0).is_err());
        assert!(InequalityCase::thm1(2.0, -0.1).is_err());
    }

    #[test]
    fn thm2_algebra_examples() {
        let w = WeightProfile::lorentz_pq(2.0, 4.0).unwrap();
        let case = InequalityCase::thm2(1.0, 1.0, 2.0, 4.0, w).unwrap();
        assert_eq!(case.theta, 0.5);
        assert_eq!(case.lhs_order, 0.0);

        // p >= q rejected
        let w = WeightProfile::one();
        assert!(InequalityCase::thm2(1.0, 1.0, 4.0, 2.0, w.clone()).is_err());
        // weight outside B_p rejected
        let bad = WeightProfile::power(1.0, 3.0).unwrap();
        assert!(InequalityCase::thm2(1.0, 1.0, 2.0, 4.0, bad).is_err());
    }

    #[test]
    fn hedberg_theta_inverts_s1_relation() {
        let case = InequalityCase::hedberg(1.0, 0.5, 1.0).unwrap();
        assert_eq!(case.theta, 0.75);
        // s1 = theta s - (1-theta) beta recovers s1
        let s1 = case.theta * 1.0 - (1.0 - case.theta) * 1.0;
        assert!((s1 - 0.5).abs() < 1e-15);
        assert!(InequalityCase::hedberg(0.5, 1.0, 1.0).is_err());
        assert!(InequalityCase::hedberg(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn two_weight_gate() {
        let v = WeightProfile::power(1.0, 0.5).unwrap();
        let w = WeightProfile::power(1.0, 0.5).unwrap();
        assert!(InequalityCase::two_weight(1.0, 1.0, 2.0, 4.0, v, w).is_ok());
        // mismatched powers violate the ratio condition
        let v = WeightProfile::power(1.0, 0.9).unwrap();
        let w = WeightProfile::one();
        assert!(InequalityCase::two_weight(1.0, 1.0, 2.0, 4.0, v, w).is_err());
    }

    #[test]
    fn zero_function_evaluates_to_flagged_zero() {
        let grid = Grid::new(1, 64, 40.0).unwrap();
        let case = InequalityCase::thm1(2.0, 0.0).unwrap();
        let zero = GridFunction::zeros(grid);
        let eval = evaluate_case(&case, &zero, &EvalSettings::default()).unwrap();
        assert_eq!(eval.lhs, 0.0);
        assert_eq!(eval.factor_a, 0.0);
        assert_eq!(eval.factor_b, 0.0);
        assert!(eval.ratio.is_none());
        assert!(eval.flagged);
    }

    #[test]
    fn ratio_is_amplitude_invariant() {
        let grid = Grid::new(1, 128, 40.0).unwrap();
        let spec = CorpusSpec::new(CorpusFamily::Gaussian, 1, 3);
        let member = corpus::generate(&spec, grid).unwrap().remove(0);
        let settings = EvalSettings::default();
        for case in [
            InequalityCase::thm1(2.0, 0.0).unwrap(),
            InequalityCase::hedberg(1.0, 0.5, 1.0).unwrap(),
        ] {
            let base = evaluate_case(&case, &member.function, &settings).unwrap();
            let scaled = evaluate_case(&case, &member.function.scaled(7.3), &settings).unwrap();
            let (r0, r1) = (base.ratio.unwrap(), scaled.ratio.unwrap());
            assert!((r0 - r1).abs() <= 1e-12 * r0, "{} vs {}", r0, r1);
        }
    }

    #[test]
    fn corpus_of_one_has_equal_max_and_mean() {
        let grid = Grid::new(1, 128, 40.0).unwrap();
        let case = InequalityCase::thm1(2.0, 0.0).unwrap();
        let spec = CorpusSpec::new(CorpusFamily::Gaussian, 1, 9);
        let report = run_corpus(&case, &spec, grid, &EvalSettings::default()).unwrap();
        assert_eq!(report.aggregate.max_ratio, report.aggregate.mean_ratio);
        assert_eq!(report.aggregate.corpus_size, 1);
    }

    #[test]
    fn reports_are_bit_deterministic() {
        let grid = Grid::new(1, 128, 40.0).unwrap();
        let case = InequalityCase::thm1(2.0, 0.0).unwrap();
        let spec = CorpusSpec::new(CorpusFamily::MultiBump { bumps: 2 }, 4, 7);
        let a = run_corpus(&case, &spec, grid, &EvalSettings::default()).unwrap();
        let b = run_corpus(&case, &spec, grid, &EvalSettings::default()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn amplitude_mode_has_zero_spread() {
        let grid = Grid::new(1, 128, 40.0).unwrap();
        let case = InequalityCase::thm1(2.0, 0.0).unwrap();
        let spec = CorpusSpec::new(CorpusFamily::Gaussian, 1, 3);
        let record = scaling_check(
            &case,
            &spec,
            0,
            &[0.5, 1.0, 2.0],
            grid,
            &EvalSettings::default(),
            ScalingMode::Amplitude,
        )
        .unwrap();
        assert!(record.spread <= 1e-12, "spread = {}", record.spread);
        assert!(!record.flagged);
        // a single unit factor has exactly zero spread
        let single = scaling_check(
            &case,
            &spec,
            0,
            &[1.0],
            grid,
            &EvalSettings::default(),
            ScalingMode::Dilation,
        )
        .unwrap();
        assert_eq!(single.spread, 0.0);
    }
}
