//! Acceptance suite: one test per criterion, each ending with a
//! `criterion N: PASS` line carrying the measured quantities.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use std::time::Instant;

use sobolab::grid::{Grid, GridFunction};
use sobolab::harness::{
    self, corpus, CaseId, CorpusFamily, CorpusSpec, EvalSettings, InequalityCase, ScalingMode,
    SpatialWeightSpec,
};
use sobolab::norms::{self, RadiusSet};
use sobolab::rearrange::{self, BpOutcome, WeightProfile};
use sobolab::spectral::{self, HeatReprParams};

fn grid1d(g: usize, l: f64) -> Grid {
    Grid::new(1, g, l).unwrap()
}

fn l2(f: &GridFunction) -> f64 {
    norms::lp_norm(f, 2.0).unwrap()
}

fn pass(criterion: usize, detail: String) {
    println!("criterion {criterion}: PASS — {detail}");
}

const DILATIONS: [f64; 5] = [
    0.5,
    std::f64::consts::FRAC_1_SQRT_2,
    1.0,
    std::f64::consts::SQRT_2,
    2.0,
];

/// Criterion 1: the heat-integral route to fractional powers agrees with
/// the direct multiplier route to 1e-6 relative L2 on 12 seeded
/// band-limited functions (n=1, G=256) in under 10 s.
#[test]
fn criterion_01_fractional_power_oracle_equivalence() {
    let start = Instant::now();
    let grid = grid1d(256, 40.0);
    let spec = CorpusSpec::new(
        CorpusFamily::BandLimitedRandom {
            k_min: 1,
            k_max: 24,
        },
        12,
        41,
    );
    let members = corpus::generate(&spec, grid).unwrap();
    let mut worst = 0.0f64;
    for (i, member) in members.iter().enumerate() {
        let s2 = 0.2 + 0.05 * (i % 8) as f64; // exponents in (0, 1), k = 1
        let params = HeatReprParams::for_grid(grid, s2).unwrap();
        let via_heat = spectral::fractional_laplacian_heat(&member.function, s2, &params).unwrap();
        let direct = spectral::fractional_laplacian(&member.function, 2.0 * s2).unwrap();
        let rel = l2(&via_heat.sub(&direct).unwrap()) / l2(&direct);
        assert!(rel < 1e-6, "member {i}: relative L2 deviation {rel}");
        worst = worst.max(rel);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    pass(
        1,
        format!("worst relative L2 deviation {worst:.3e} over 12 functions in {elapsed:?}"),
    );
}

/// Criterion 2: semigroup law, heat/fractional-power commutation, mean
/// conservation and L^p contraction (p in {1,2,inf}) on a 24-member
/// corpus in under 10 s.
#[test]
fn criterion_02_semigroup_and_commutation_suite() {
    let start = Instant::now();
    let grid = grid1d(256, 40.0);
    // raw members (no mean removal) so mass conservation is nontrivial
    let mut spec = CorpusSpec::new(CorpusFamily::MultiBump { bumps: 2 }, 24, 271);
    spec.mean_zero = false;
    let members = corpus::generate(&spec, grid).unwrap();
    assert_eq!(members.len(), 24);
    let lambda_max = grid.lambda_max();
    let pairs = [(0.02, 0.05), (0.3, 0.8), (2.0, 5.0)];
    // contraction needs the kernel resolved; below ~25/lambda_max the
    // truncated kernel's L1 mass exceeds 1 + 1e-10
    let contraction_times = [30.0 / lambda_max, 300.0 / lambda_max, 0.3, 3.0, 25.0];
    for member in &members {
        let f = &member.function;
        let scale = f.max_abs();
        for &(t, s) in &pairs {
            let two = spectral::heat(&spectral::heat(f, t).unwrap(), s).unwrap();
            let one = spectral::heat(f, t + s).unwrap();
            let diff = two.sub(&one).unwrap().max_abs();
            assert!(diff <= 1e-12 * scale, "semigroup: {diff}");
        }
        let (s_frac, t) = (0.8, 0.7);
        let a = spectral::heat(&spectral::fractional_laplacian(f, s_frac).unwrap(), t).unwrap();
        let b = spectral::fractional_laplacian(&spectral::heat(f, t).unwrap(), s_frac).unwrap();
        let comm = a.sub(&b).unwrap().max_abs();
        assert!(
            comm <= 1e-12 * a.max_abs().max(scale),
            "commutation: {comm}"
        );

        let mass = f.integral();
        let l1 = norms::lp_norm(f, 1.0).unwrap();
        for &(t, _) in &pairs {
            let after = spectral::heat(f, t).unwrap().integral();
            assert!(
                (after - mass).abs() <= 1e-12 * l1,
                "mass drift {}",
                after - mass
            );
        }
        for &t in &contraction_times {
            let ht = spectral::heat(f, t).unwrap();
            for p in [1.0, 2.0, f64::INFINITY] {
                let before = norms::lp_norm(f, p).unwrap();
                let after = norms::lp_norm(&ht, p).unwrap();
                assert!(
                    after <= (1.0 + 1e-10) * before,
                    "contraction p={p} t={t}: {after} > {before}"
                );
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    pass(
        2,
        format!("semigroup, commutation, mass, contraction on 24 members in {elapsed:?}"),
    );
}

/// Criterion 3: Lambda^p(1) = L^p to 1e-12; Lambda^p(t^(p/q-1)) equals
/// the direct L^(q,p) formula to 1e-13; weak <= strong everywhere.
#[test]
fn criterion_03_lorentz_identities() {
    let grid = grid1d(512, 40.0);
    let spec = CorpusSpec::new(CorpusFamily::MultiBump { bumps: 3 }, 16, 33);
    let members = corpus::generate(&spec, grid).unwrap();
    let unit = WeightProfile::one();
    let mut worst_lp = 0.0f64;
    let mut worst_lqp = 0.0f64;
    for member in &members {
        let f = &member.function;
        for p in [1.0, 2.0, 3.0] {
            let lorentz = rearrange::lambda_norm(f, p, &unit).unwrap();
            let lp = norms::lp_norm(f, p).unwrap();
            let rel = (lorentz - lp).abs() / lp;
            assert!(rel <= 1e-12, "Lambda^{p}(1) vs L^{p}: {rel}");
            worst_lp = worst_lp.max(rel);
        }
        for (p, q) in [(2.0, 3.0), (2.0, 4.0), (3.0, 5.0)] {
            let w = WeightProfile::lorentz_pq(p, q).unwrap();
            let lorentz = rearrange::lambda_norm(f, p, &w).unwrap();
            // direct L^(q,p): identical integrand in closed form per step
            let profile = rearrange::rearrangement(f);
            let step = profile.step();
            let mut acc = 0.0;
            for (i, &v) in profile.sorted_values().iter().enumerate() {
                let t0 = i as f64 * step;
                let t1 = (i + 1) as f64 * step;
                acc += v.powf(p) * (q / p) * (t1.powf(p / q) - t0.powf(p / q));
            }
            let direct = acc.powf(1.0 / p);
            let rel = (lorentz - direct).abs() / direct;
            assert!(rel <= 1e-13, "L^({q},{p}) identity: {rel}");
            worst_lqp = worst_lqp.max(rel);

            let weak = rearrange::weak_lambda_norm(f, p, &w).unwrap();
            assert!(weak <= lorentz * (1.0 + 1e-12), "weak > strong");
        }
    }
    pass(3, format!("L^p identity worst {worst_lp:.2e}, L^(q,p) identity worst {worst_lqp:.2e}, weak <= strong on 16 members"));
}

/// Criterion 4: B_p closed form (alpha+1)/(p-alpha-1) against an
/// independent quadrature evaluator on 20 (alpha, p) pairs; rejection
/// iff alpha <= -1 or alpha >= p-1; inclusion B_p in B_q.
#[test]
fn criterion_04_bp_closed_forms() {
    // independent oracle: tail integral by log-spaced trapezoid
    // quadrature plus the analytic remainder, sup over a log r-grid
    fn bp_quadrature(c: f64, alpha: f64, p: f64) -> f64 {
        let mut sup = 0.0f64;
        for i in -40..=40 {
            let r = 10f64.powf(i as f64 / 10.0);
            let nodes = 4000;
            let hi = r * 1e8;
            let h = (hi / r).ln() / nodes as f64;
            let mut tail = 0.0;
            for j in 0..=nodes {
                let t = r * (h * j as f64).exp();
                let weight = if j == 0 || j == nodes { 0.5 } else { 1.0 };
                tail += weight * c * t.powf(alpha - p + 1.0) * h; // log substitution
            }
            tail += c * hi.powf(alpha - p + 1.0) / (p - alpha - 1.0);
            let w_primitive = c * r.powf(alpha + 1.0) / (alpha + 1.0);
            sup = sup.max(r.powf(p) * tail / w_primitive);
        }
        sup
    }

    let pairs: Vec<(f64, f64)> = (0..20)
        .map(|i| {
            let p = 1.5 + 0.35 * (i % 5) as f64;
            let alpha = -0.8 + (p - 1.0 + 0.7) * ((i / 5) as f64 + 0.5) / 4.0;
            (alpha.min(p - 1.05), p)
        })
        .collect();
    let mut worst = 0.0f64;
    for &(alpha, p) in &pairs {
        assert!(
            alpha > -1.0 && alpha < p - 1.0,
            "pair generator broke: {alpha}, {p}"
        );
        let w = WeightProfile::power(1.0, alpha).unwrap();
        let closed = rearrange::bp_constant(&w, p).unwrap().constant().unwrap();
        let expected = (alpha + 1.0) / (p - alpha - 1.0);
        assert!((closed - expected).abs() <= 1e-12 * expected);
        let quad = bp_quadrature(1.0, alpha, p);
        let rel = (closed - quad).abs() / quad;
        assert!(
            rel < 1e-3,
            "alpha={alpha} p={p}: closed {closed} vs quadrature {quad}"
        );
        worst = worst.max(rel);

        // inclusion B_p subset B_q with ordered constants
        let q = p + 1.0;
        let at_q = rearrange::bp_constant(&w, q).unwrap().constant().unwrap();
        assert!(at_q <= closed * (1.0 + 1e-12), "inclusion violated");
    }

    // rejection iff alpha <= -1 (construction) or alpha >= p-1 (tail)
    assert!(WeightProfile::power(1.0, -1.0).is_err());
    assert!(WeightProfile::power(1.0, -1.3).is_err());
    for &(alpha, p) in &[(1.0, 2.0), (1.5, 2.0), (0.5, 1.5)] {
        let w = WeightProfile::power(1.0, alpha).unwrap();
        assert!(matches!(
            rearrange::bp_constant(&w, p).unwrap(),
            BpOutcome::Divergent { .. }
        ));
    }
    pass(4, format!("20 pairs, worst closed-vs-quadrature deviation {worst:.2e}; rejections and inclusion verified"));
}

/// Criterion 5: rearrangement lemma suite over 100 seeded cases.
#[test]
fn criterion_05_rearrangement_lemmas() {
    use rand::{Rng, SeedableRng};
    let grid = grid1d(128, 10.0);
    let mut worst_identity = 0.0f64;
    for seed in 0..100u64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let f = GridFunction::from_values(grid, values).unwrap();
        let fp = rearrange::rearrangement(&f);

        // g* <= f* under |g| <= |f|
        let g = GridFunction::from_values(
            grid,
            f.values()
                .iter()
                .map(|v| v * rng.gen_range(0.0..1.0))
                .collect(),
        )
        .unwrap();
        let gp = rearrange::rearrangement(&g);
        for (gs, fs) in gp.sorted_values().iter().zip(fp.sorted_values()) {
            assert!(gs <= fs);
        }

        // (|f|^theta)* = (f*)^theta
        let theta = rng.gen_range(0.2..2.0);
        let powered = GridFunction::from_values(
            grid,
            f.values().iter().map(|v| v.abs().powf(theta)).collect(),
        )
        .unwrap();
        for (a, b) in rearrange::rearrangement(&powered)
            .sorted_values()
            .iter()
            .zip(fp.sorted_values())
        {
            assert!((a - b.powf(theta)).abs() <= 1e-13 * a.max(1e-300));
        }

        // equimeasurability at random levels
        for _ in 0..4 {
            let alpha = rng.gen_range(0.0..4.0);
            assert_eq!(
                rearrange::distribution_function(&f, alpha).unwrap(),
                fp.distribution(alpha)
            );
        }

        // distribution-function L^p identity via the exact layer cake
        let p = rng.gen_range(1.0..3.5);
        let mut levels: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        levels.dedup();
        let mut integral = 0.0;
        let mut prev = 0.0;
        for &level in &levels {
            integral += rearrange::distribution_function(&f, prev).unwrap()
                * (level.powf(p) - prev.powf(p));
            prev = level;
        }
        let lp_p = norms::lp_norm(&f, p).unwrap().powf(p);
        let rel = (integral - lp_p).abs() / lp_p;
        assert!(
            rel <= 1e-10,
            "seed {seed}: distribution identity off by {rel}"
        );
        worst_identity = worst_identity.max(rel);
    }
    pass(
        5,
        format!("100 seeded cases; worst distribution-identity deviation {worst_identity:.2e}"),
    );
}

/// Criterion 6: Hedberg pointwise constant for (s, s1, beta) = (1, 0.5, 1)
/// finite on every member, varying < 25% across G in {256, 512, 1024};
/// the integrated rearranged chain holds at every step with the same C*.
#[test]
fn criterion_06_hedberg_pointwise() {
    let settings = EvalSettings::default();
    let (s, s1, beta) = (1.0, 0.5, 1.0);
    let mut per_grid = Vec::new();
    for g in [256usize, 512, 1024] {
        let grid = grid1d(g, 40.0);
        let spec = CorpusSpec::new(CorpusFamily::Gaussian, 8, 7);
        let members = corpus::generate(&spec, grid).unwrap();
        let radii = RadiusSet::log_spaced(grid, settings.radius_count).unwrap();
        let mut c_max = 0.0f64;
        for m in &members {
            let record =
                harness::hedberg_check(&m.function, s, s1, beta, &radii, &settings.besov).unwrap();
            assert!(record.constant.is_finite() && record.constant > 0.0);
            c_max = c_max.max(record.constant);

            if g == 512 {
                // integrated chain with theta = 0.75, p = 2, q = 8/3
                let violation = harness::hedberg_chain_max_violation(
                    &m.function,
                    s,
                    s1,
                    beta,
                    2.0,
                    &radii,
                    &settings.besov,
                )
                .unwrap();
                assert!(violation <= 1.0 + 1e-9, "chain violated by {violation}");
            }
        }
        per_grid.push(c_max);
    }
    let lo = per_grid.iter().cloned().fold(f64::MAX, f64::min);
    let hi = per_grid.iter().cloned().fold(0.0f64, f64::max);
    let variation = hi / lo - 1.0;
    assert!(
        variation < 0.25,
        "C* varies {variation:.3} across grids: {per_grid:?}"
    );
    pass(6, format!("C* = {per_grid:?} across G = [256, 512, 1024], variation {variation:.2e}; chain holds at every step"));
}

fn stability_gates(
    criterion: usize,
    case: &InequalityCase,
    corpus_count: usize,
) -> (f64, f64, f64) {
    let settings = EvalSettings::default();
    let grid = grid1d(512, 40.0);
    let spec = CorpusSpec::new(CorpusFamily::Gaussian, corpus_count, 7);

    // finite constants over the corpus
    let report = harness::run_corpus(case, &spec, grid, &settings).unwrap();
    assert_eq!(report.aggregate.flagged, 0);
    assert!(report.aggregate.max_ratio.is_finite() && report.aggregate.max_ratio > 0.0);

    // exact amplitude invariance
    let member = corpus::generate(&spec, grid).unwrap().remove(0);
    let base = harness::evaluate_case(case, &member.function, &settings).unwrap();
    let scaled = harness::evaluate_case(case, &member.function.scaled(7.3), &settings).unwrap();
    let (r0, r1) = (base.ratio.unwrap(), scaled.ratio.unwrap());
    assert!(
        (r0 - r1).abs() <= 1e-12 * r0,
        "criterion {criterion}: amplitude invariance broken: {r0} vs {r1}"
    );

    // dilation spread at G = 1024
    let dilation = harness::scaling_check(
        case,
        &spec,
        0,
        &DILATIONS,
        grid1d(1024, 40.0),
        &settings,
        ScalingMode::Dilation,
    )
    .unwrap();
    assert!(
        dilation.spread < 0.05,
        "criterion {criterion}: dilation spread {} >= 5%",
        dilation.spread
    );

    // refinement growth across G in {256, 512, 1024}
    let refinement =
        harness::refinement_study(case, &spec, &[256, 512, 1024], 40.0, 1, &settings).unwrap();
    assert!(
        refinement.growth_factor < 2.0 && !refinement.flagged,
        "criterion {criterion}: refinement grows by {}",
        refinement.growth_factor
    );
    (
        report.aggregate.max_ratio,
        dilation.spread,
        refinement.growth_factor,
    )
}

/// Criterion 7: stability of Theorem 1 over (q, s) in {2,3,4} x {0, 0.1}
/// in under 5 minutes.
#[test]
fn criterion_07_thm1_stability() {
    let start = Instant::now();
    let mut lines = Vec::new();
    for q in [2.0, 3.0, 4.0] {
        for s in [0.0, 0.1] {
            assert!(s < 1.0 / q);
            let case = InequalityCase::thm1(q, s).unwrap();
            let (c_emp, spread, growth) = stability_gates(7, &case, 24);
            lines.push(format!(
                "(q={q}, s={s}): C={c_emp:.4}, spread={spread:.3}, growth={growth:.3}"
            ));
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    pass(7, format!("{} in {elapsed:?}", lines.join("; ")));
}

/// Criterion 8: one validated parameter set for Theorems 2-4 and the
/// weak-type corollary, same gates as criterion 7.
#[test]
fn criterion_08_thm2_to_thm4_stability() {
    let start = Instant::now();
    let w = WeightProfile::lorentz_pq(2.0, 4.0).unwrap();
    let cases = [
        (
            "thm2",
            InequalityCase::thm2(1.0, 1.0, 2.0, 4.0, w.clone()).unwrap(),
        ),
        (
            "weak",
            InequalityCase::weak_lorentz(1.0, 1.0, 2.0, 4.0, w).unwrap(),
        ),
        (
            "thm3",
            InequalityCase::thm3(1.0, 1.0, 2.0, 4.0, 0.5).unwrap(),
        ),
        (
            "thm4",
            InequalityCase::thm4(2.0, 0.0, SpatialWeightSpec::InverseSqrtDistance).unwrap(),
        ),
    ];
    let mut lines = Vec::new();
    for (name, case) in &cases {
        let (c_emp, spread, growth) = stability_gates(8, case, 24);
        lines.push(format!(
            "{name}: C={c_emp:.4}, spread={spread:.3}, growth={growth:.3}"
        ));
    }

    // weak-type consistency: weak ratios never exceed strong ratios by
    // more than the measured weak/strong gap of the A-factor
    let grid = grid1d(512, 40.0);
    let settings = EvalSettings::default();
    let spec = CorpusSpec::new(CorpusFamily::Gaussian, 8, 7);
    for member in corpus::generate(&spec, grid).unwrap() {
        let strong = harness::evaluate_case(&cases[0].1, &member.function, &settings).unwrap();
        let weak = harness::evaluate_case(&cases[1].1, &member.function, &settings).unwrap();
        let gap = (strong.factor_a / weak.factor_a).powf(cases[0].1.theta);
        assert!(
            weak.ratio.unwrap() <= strong.ratio.unwrap() * gap * (1.0 + 1e-9),
            "weak-type consistency broken on member {}",
            member.index
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    pass(8, format!("{} in {elapsed:?}", lines.join("; ")));
}

/// Criterion 9: negative control — beta perturbed by +0.5 makes the
/// dilation spread exceed 30% and the harness flags it.
#[test]
fn criterion_09_negative_control() {
    let settings = EvalSettings::default();
    let spec = CorpusSpec::new(CorpusFamily::Gaussian, 1, 7);
    let grid = grid1d(1024, 40.0);
    // q = 4 keeps the perturbed Besov sup in the dilation-covariant
    // interior regime, so the exponent mismatch is visible
    let valid = InequalityCase::thm1(4.0, 0.0).unwrap();
    let control = harness::scaling_check(
        &valid,
        &spec,
        0,
        &DILATIONS,
        grid,
        &settings,
        ScalingMode::Dilation,
    )
    .unwrap();
    assert!(!control.flagged && control.spread < 0.05);

    let perturbed = valid.with_perturbed_beta(0.5);
    let record = harness::scaling_check(
        &perturbed,
        &spec,
        0,
        &DILATIONS,
        grid,
        &settings,
        ScalingMode::Dilation,
    )
    .unwrap();
    assert!(
        record.spread > 0.30,
        "perturbed spread {} should exceed 30%",
        record.spread
    );
    assert!(record.flagged, "harness failed to flag the broken algebra");
    pass(
        9,
        format!(
            "valid spread {:.3e} vs perturbed spread {:.3e} (flagged)",
            control.spread, record.spread
        ),
    );
}

/// Smoke check outside the numbered list: the 2-D path exercises every
/// operator once at the default smoke scale.
#[test]
fn two_dimensional_smoke() {
    let grid = Grid::new(2, 128, 40.0).unwrap();
    let case = InequalityCase::thm1(2.0, 0.0).unwrap();
    let spec = CorpusSpec::new(CorpusFamily::Gaussian, 3, 5);
    let settings = EvalSettings::default();
    let report = harness::run_corpus(&case, &spec, grid, &settings).unwrap();
    assert_eq!(report.aggregate.flagged, 0);
    assert!(report.aggregate.max_ratio.is_finite() && report.aggregate.max_ratio > 0.0);
    assert_eq!(report.case_id(), CaseId::Thm1.as_str());
    println!("2-D smoke: C_emp = {:.6}", report.aggregate.max_ratio);
}
