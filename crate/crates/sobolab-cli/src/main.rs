//! `sobolab` — norms, weight classes and inequality verification on
//! periodic grids.
//!
//! Exit codes: 0 success, 1 flagged records in a verification, 2
//! parameter error, 3 I/O or parse failure.

mod descriptor;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sobolab::error::Error;
use sobolab::grid::{Grid, GridFunction};
use sobolab::harness::{
    self, CaseId, EvalSettings, InequalityCase, ScalingMode, SpatialWeightSpec,
};
use sobolab::norms::{self, BesovParams, RadiusSet};
use sobolab::rearrange::{self, BpOutcome, TwoWeightVariant, WeightProfile};

#[derive(Parser)]
#[command(
    name = "sobolab",
    version,
    about = "Numerical harmonic analysis on periodic grids"
)]
struct Cli {
    /// Worker threads (default: SOBOLAB_JOBS or all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one norm of one function.
    Norm(NormArgs),
    /// Evaluate a weight-class condition.
    Weight(WeightArgs),
    /// Verify one inequality case over a corpus and write reports.
    Verify(VerifyArgs),
    /// Verify over a parameter grid and write a plot-ready CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GridArgs {
    /// Dimension (1, 2 or 3).
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Points per axis (power of two, >= 8).
    #[arg(long = "G", default_value_t = 512)]
    g: usize,
    /// Period of the torus.
    #[arg(long = "L", default_value_t = 40.0)]
    l: f64,
}

impl GridArgs {
    fn build(&self) -> Result<Grid, Error> {
        Grid::new(self.n, self.g, self.l)
    }
}

#[derive(Args)]
struct NormArgs {
    /// lp | weak-lp | sobolev | w11 | besov | lorentz | weak-lorentz |
    /// morrey | weighted-lp
    #[arg(long)]
    kind: String,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Morrey index.
    #[arg(long)]
    a: Option<f64>,
    /// Weight on (0, inf), e.g. "power:1,0".
    #[arg(long)]
    weight: Option<String>,
    /// Spatial weight field: ones | invsqrt.
    #[arg(long)]
    field: Option<String>,
    /// Analytic descriptor, e.g. "gauss:1,20,0.5" or "const:1".
    #[arg(long, conflicts_with = "input")]
    analytic: Option<String>,
    /// Read the function from a .json or .sblb file.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct WeightArgs {
    /// bp | ap | a1 | two-weight
    #[arg(long)]
    class: String,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q0: Option<f64>,
    /// Weight on (0, inf) for bp, e.g. "power:1,0".
    #[arg(long)]
    weight: Option<String>,
    /// Pair weights for two-weight conditions.
    #[arg(long)]
    v: Option<String>,
    #[arg(long)]
    w: Option<String>,
    /// strong-1 | strong-2-r | small-q0 | weak
    #[arg(long)]
    variant: Option<String>,
    /// Spatial weight field for ap/a1: ones | invsqrt.
    #[arg(long)]
    field: Option<String>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Clone)]
struct CaseArgs {
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    s1: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    /// Morrey index (thm3).
    #[arg(long)]
    a: Option<f64>,
    /// Lorentz weight (thm2 / weak), e.g. "power:1,-0.5".
    #[arg(long)]
    weight: Option<String>,
    /// Two-weight pair.
    #[arg(long)]
    v: Option<String>,
    #[arg(long)]
    w: Option<String>,
    /// Spatial weight field (thm4): ones | invsqrt.
    #[arg(long)]
    field: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// thm1 | thm2 | weak | two-weight | thm3 | thm4 | hedberg
    case: String,
    #[command(flatten)]
    params: CaseArgs,
    /// Corpus descriptor: family:count[:params], e.g. "gaussian:24".
    #[arg(long, default_value = "gaussian:24")]
    corpus: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    grid: GridArgs,
    /// JSON report path (default report-<case>.json).
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// CSV report path (default report-<case>.csv).
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Also run a dilation stability sweep over these factors.
    #[arg(long)]
    dilate: Option<String>,
    /// Also run a refinement study over these comma-separated grid sizes
    /// and embed the deltas in the report.
    #[arg(long)]
    refine: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    /// thm1 | thm2 | weak | two-weight | thm3 | thm4 | hedberg
    case: String,
    /// Comma-separated axis values; single values fix the parameter.
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    s1: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    weight: Option<String>,
    #[arg(long)]
    v: Option<String>,
    #[arg(long)]
    w: Option<String>,
    #[arg(long)]
    field: Option<String>,
    #[arg(long, default_value = "gaussian:24")]
    corpus: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    grid: GridArgs,
    /// Output CSV path (default sweep-<case>.csv).
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.jobs.or_else(|| {
        std::env::var("SOBOLAB_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(jobs) = jobs {
        // a failure here means the pool already exists, which is fine
        let _ = sobolab::configure_jobs(jobs.max(1));
    }
    let outcome = match cli.command {
        Command::Norm(args) => cmd_norm(args),
        Command::Weight(args) => cmd_weight(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Parse(_) | Error::Io(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn load_function(args: &NormArgs) -> Result<GridFunction, Error> {
    if let Some(path) = &args.input {
        let is_binary = path.extension().map(|e| e == "sblb").unwrap_or(false);
        return if is_binary {
            GridFunction::read_binary_file(path)
        } else {
            GridFunction::from_json(&std::fs::read_to_string(path)?)
        };
    }
    let desc = args
        .analytic
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("need --analytic or --input".into()))?;
    descriptor::parse_function(desc, args.grid.build()?)
}

fn require<T: Copy>(value: Option<T>, name: &str) -> Result<T, Error> {
    value.ok_or_else(|| Error::InvalidParameter(format!("missing --{name}")))
}

/// 17-significant-digit float for bit-faithful report lines.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn grid_json(grid: Grid) -> String {
    format!(
        r#"{{"n":{},"G":{},"L":{}}}"#,
        grid.dimension(),
        grid.points_per_axis(),
        grid.period()
    )
}

fn cmd_norm(args: NormArgs) -> Result<ExitCode, Error> {
    let f = load_function(&args)?;
    let grid = f.grid();
    let (value, params) = match args.kind.as_str() {
        "lp" => {
            let p = require(args.p, "p")?;
            (norms::lp_norm(&f, p)?, format!(r#"{{"p":{p}}}"#))
        }
        "weak-lp" => {
            let p = require(args.p, "p")?;
            (norms::weak_lp_norm(&f, p)?, format!(r#"{{"p":{p}}}"#))
        }
        "sobolev" => {
            let p = require(args.p, "p")?;
            let s = require(args.s, "s")?;
            (
                norms::sobolev_norm(&f, s, p)?,
                format!(r#"{{"s":{s},"p":{p}}}"#),
            )
        }
        "w11" => (norms::w11_seminorm(&f)?, "{}".into()),
        "besov" => {
            let beta = require(args.beta, "beta")?;
            (
                norms::besov_norm(&f, beta, &BesovParams::default())?,
                format!(r#"{{"beta":{beta}}}"#),
            )
        }
        "lorentz" | "weak-lorentz" => {
            let p = require(args.p, "p")?;
            let w = descriptor::parse_weight(args.weight.as_deref().unwrap_or("power:1,0"))?;
            let value = if args.kind == "lorentz" {
                match args.s {
                    Some(s) => rearrange::lorentz_sobolev_norm(&f, s, p, &w)?,
                    None => rearrange::lambda_norm(&f, p, &w)?,
                }
            } else {
                match args.s {
                    Some(s) => rearrange::weak_lorentz_sobolev_norm(&f, s, p, &w)?,
                    None => rearrange::weak_lambda_norm(&f, p, &w)?,
                }
            };
            (
                value,
                format!(
                    r#"{{"p":{p},"weight":{}}}"#,
                    serde_json::to_string(&w).unwrap()
                ),
            )
        }
        "morrey" => {
            let p = require(args.p, "p")?;
            let a = require(args.a, "a")?;
            let radii = RadiusSet::default_for(grid);
            (
                norms::morrey_norm(&f, p, a, &radii)?.value,
                format!(r#"{{"p":{p},"a":{a}}}"#),
            )
        }
        "weighted-lp" => {
            let p = require(args.p, "p")?;
            let field = descriptor::parse_field(args.field.as_deref().unwrap_or("ones"))?;
            (
                norms::weighted_lp_norm(&f, &field.realize(grid), p)?,
                format!(
                    r#"{{"p":{p},"field":"{}"}}"#,
                    args.field.as_deref().unwrap_or("ones")
                ),
            )
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown norm kind {other:?}"
            )));
        }
    };
    println!(
        r#"{{"kind":"{}","params":{params},"value":{},"grid":{}}}"#,
        args.kind,
        fmt(value),
        grid_json(grid)
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_weight(args: WeightArgs) -> Result<ExitCode, Error> {
    match args.class.as_str() {
        "bp" => {
            let p = require(args.p, "p")?;
            let w = descriptor::parse_weight(
                args.weight
                    .as_deref()
                    .ok_or_else(|| Error::InvalidParameter("missing --weight".into()))?,
            )?;
            match rearrange::bp_constant(&w, p)? {
                BpOutcome::Constant(c) => {
                    println!(r#"{{"class":"bp","p":{p},"constant":{}}}"#, fmt(c))
                }
                BpOutcome::Divergent { reason } => println!(
                    r#"{{"class":"bp","p":{p},"rejected":true,"reason":{}}}"#,
                    serde_json::to_string(&reason).unwrap()
                ),
            }
        }
        "ap" | "a1" => {
            let grid = args.grid.build()?;
            let field = descriptor::parse_field(args.field.as_deref().unwrap_or("ones"))?;
            let radii = RadiusSet::default_for(grid);
            let realized = field.realize(grid);
            let constant = if args.class == "ap" {
                norms::ap_constant(&realized, require(args.p, "p")?, &radii)?
            } else {
                norms::a1_constant(&realized, &radii)
            };
            println!(
                r#"{{"class":"{}","constant":{},"grid":{}}}"#,
                args.class,
                fmt(constant),
                grid_json(grid)
            );
        }
        "two-weight" => {
            let p = require(args.p, "p")?;
            let q0 = require(args.q0, "q0")?;
            let v = descriptor::parse_weight(
                args.v
                    .as_deref()
                    .ok_or_else(|| Error::InvalidParameter("missing --v".into()))?,
            )?;
            let w = descriptor::parse_weight(
                args.w
                    .as_deref()
                    .ok_or_else(|| Error::InvalidParameter("missing --w".into()))?,
            )?;
            let variant = match args.variant.as_deref().unwrap_or("strong-1") {
                "strong-1" => TwoWeightVariant::Strong1,
                "strong-2-r" => TwoWeightVariant::Strong2R,
                "small-q0" => TwoWeightVariant::SmallQ0,
                "weak" => TwoWeightVariant::Weak,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown two-weight variant {other:?}"
                    )))
                }
            };
            let out = rearrange::two_weight_conditions(&v, &w, p, q0, variant)?;
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown weight class {other:?}"
            )));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn build_case(id: CaseId, args: &CaseArgs) -> Result<InequalityCase, Error> {
    match id {
        CaseId::Thm1 => InequalityCase::thm1(require(args.q, "q")?, args.s.unwrap_or(0.0)),
        CaseId::Thm2Lorentz | CaseId::CorWeakLorentz => {
            let (s, beta) = (require(args.s, "s")?, require(args.beta, "beta")?);
            let (p, q) = (require(args.p, "p")?, require(args.q, "q")?);
            let w = match &args.weight {
                Some(text) => descriptor::parse_weight(text)?,
                None => WeightProfile::lorentz_pq(p, q)?,
            };
            if id == CaseId::Thm2Lorentz {
                InequalityCase::thm2(s, beta, p, q, w)
            } else {
                InequalityCase::weak_lorentz(s, beta, p, q, w)
            }
        }
        CaseId::CorTwoWeight => {
            let (s, beta) = (require(args.s, "s")?, require(args.beta, "beta")?);
            let (p, q) = (require(args.p, "p")?, require(args.q, "q")?);
            let v = descriptor::parse_weight(
                args.v
                    .as_deref()
                    .ok_or_else(|| Error::InvalidParameter("missing --v".into()))?,
            )?;
            let w = descriptor::parse_weight(
                args.w
                    .as_deref()
                    .ok_or_else(|| Error::InvalidParameter("missing --w".into()))?,
            )?;
            InequalityCase::two_weight(s, beta, p, q, v, w)
        }
        CaseId::Thm3Morrey => InequalityCase::thm3(
            require(args.s, "s")?,
            require(args.beta, "beta")?,
            require(args.p, "p")?,
            require(args.q, "q")?,
            require(args.a, "a")?,
        ),
        CaseId::Thm4Weighted => {
            let field = match &args.field {
                Some(text) => descriptor::parse_field(text)?,
                None => SpatialWeightSpec::InverseSqrtDistance,
            };
            InequalityCase::thm4(require(args.q, "q")?, args.s.unwrap_or(0.0), field)
        }
        CaseId::HedbergPointwise => InequalityCase::hedberg(
            require(args.s, "s")?,
            require(args.s1, "s1")?,
            require(args.beta, "beta")?,
        ),
    }
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let id = CaseId::parse(&args.case)?;
    let case = build_case(id, &args.params)?;
    let grid = args.grid.build()?;
    let spec = descriptor::parse_corpus(&args.corpus, args.seed)?;
    let settings = EvalSettings::default();
    let mut report = harness::run_corpus(&case, &spec, grid, &settings)?;
    report.provenance.command = Some(command_line());

    if let Some(dilate) = &args.dilate {
        let factors = descriptor::parse_axis(dilate)?;
        let record = harness::scaling_check(
            &case,
            &spec,
            0,
            &factors,
            grid,
            &settings,
            ScalingMode::Dilation,
        )?;
        println!(
            "dilation spread={} flagged={}",
            fmt(record.spread),
            record.flagged
        );
    }
    if let Some(refine) = &args.refine {
        let g_list: Vec<usize> = descriptor::parse_axis(refine)?
            .into_iter()
            .map(|v| v as usize)
            .collect();
        let record =
            harness::refinement_study(&case, &spec, &g_list, args.grid.l, args.grid.n, &settings)?;
        println!(
            "refinement growth={} flagged={}",
            fmt(record.growth_factor),
            record.flagged
        );
        report.refinement = Some(record);
    }

    let json_path = args
        .out_json
        .unwrap_or_else(|| PathBuf::from(format!("report-{}.json", id.as_str())));
    let csv_path = args
        .out_csv
        .unwrap_or_else(|| PathBuf::from(format!("report-{}.csv", id.as_str())));
    std::fs::write(&json_path, report.to_json())?;
    std::fs::write(&csv_path, report.to_csv())?;
    println!("{}", report.summary_line());
    if report.aggregate.flagged > 0 {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn axis_or(single: &Option<String>, default: Option<f64>) -> Result<Vec<Option<f64>>, Error> {
    match single {
        Some(text) => Ok(descriptor::parse_axis(text)?
            .into_iter()
            .map(Some)
            .collect()),
        None => Ok(vec![default]),
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    let id = CaseId::parse(&args.case)?;
    let grid = args.grid.build()?;
    let spec = descriptor::parse_corpus(&args.corpus, args.seed)?;
    let settings = EvalSettings::default();

    let qs = axis_or(&args.q, None)?;
    let ss = axis_or(&args.s, None)?;
    let s1s = axis_or(&args.s1, None)?;
    let betas = axis_or(&args.beta, None)?;
    let ps = axis_or(&args.p, None)?;
    let aa = axis_or(&args.a, None)?;

    let mut rows = String::from("q,s,s1,beta,p,a,c_emp,mean_ratio,corpus\n");
    let mut rejected = Vec::new();
    let mut any_ok = false;
    for &q in &qs {
        for &s in &ss {
            for &s1 in &s1s {
                for &beta in &betas {
                    for &p in &ps {
                        for &a in &aa {
                            let point = CaseArgs {
                                q,
                                s,
                                s1,
                                beta,
                                p,
                                a,
                                weight: args.weight.clone(),
                                v: args.v.clone(),
                                w: args.w.clone(),
                                field: args.field.clone(),
                            };
                            let label = format!(
                                "q={:?} s={:?} s1={:?} beta={:?} p={:?} a={:?}",
                                q, s, s1, beta, p, a
                            );
                            match build_case(id, &point)
                                .and_then(|case| harness::run_corpus(&case, &spec, grid, &settings))
                            {
                                Ok(report) => {
                                    any_ok = true;
                                    rows.push_str(&format!(
                                        "{},{},{},{},{},{},{},{},{}\n",
                                        opt(q),
                                        opt(s),
                                        opt(s1),
                                        opt(beta),
                                        opt(p),
                                        opt(a),
                                        fmt(report.aggregate.max_ratio),
                                        fmt(report.aggregate.mean_ratio),
                                        report.aggregate.corpus_size
                                    ));
                                }
                                Err(err) => rejected.push(format!("# rejected: {label}: {err}")),
                            }
                        }
                    }
                }
            }
        }
    }
    if !rejected.is_empty() {
        rows.push_str("# rejected points\n");
        for line in &rejected {
            rows.push_str(line);
            rows.push('\n');
        }
    }
    let path = args
        .out_csv
        .unwrap_or_else(|| PathBuf::from(format!("sweep-{}.csv", id.as_str())));
    std::fs::write(&path, &rows)?;
    println!(
        "sweep case={} points_ok={} points_rejected={}",
        id.as_str(),
        any_ok,
        rejected.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
