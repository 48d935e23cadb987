//! Mini-grammar for reproducible analytic functions, corpora and weights.
//!
//! Functions: `const:c`, `gauss:A,x0,a`, `bumps:k,seed`, `mode:k,A`,
//! `bandrand:seed,kmin,kmax`; append `,mz` to subtract the mean.
//! Corpora: `family:count[:params]`, e.g. `gaussian:24`, `bumps:24:3`,
//! `modbump:24:2`, `bandrand:24:1:16`.
//! Weights on `(0,inf)`: `power:c,alpha` or
//! `tabulated:t1;...|w1;...|tail_alpha`.

use sobolab::error::{Error, Result};
use sobolab::grid::{Grid, GridFunction};
use sobolab::harness::corpus::{self, CorpusFamily, CorpusSpec};
use sobolab::harness::SpatialWeightSpec;
use sobolab::rearrange::WeightProfile;

fn parse_err(what: &str, text: &str) -> Error {
    Error::Parse(format!("bad {what} descriptor {text:?}"))
}

fn parse_f64(part: &str, what: &str, text: &str) -> Result<f64> {
    part.trim()
        .parse::<f64>()
        .map_err(|_| parse_err(what, text))
}

fn parse_u64(part: &str, what: &str, text: &str) -> Result<u64> {
    part.trim()
        .parse::<u64>()
        .map_err(|_| parse_err(what, text))
}

/// Realize an analytic function descriptor on a grid.
pub fn parse_function(text: &str, grid: Grid) -> Result<GridFunction> {
    let (body, mean_zero) = match text.strip_suffix(",mz") {
        Some(rest) => (rest, true),
        None => (text, false),
    };
    let (kind, args) = body
        .split_once(':')
        .ok_or_else(|| parse_err("function", text))?;
    let parts: Vec<&str> = args.split(',').collect();
    let mut f = match kind {
        "const" => {
            if parts.len() != 1 {
                return Err(parse_err("function", text));
            }
            GridFunction::constant(grid, parse_f64(parts[0], "function", text)?)?
        }
        "gauss" => {
            if parts.len() != 3 {
                return Err(parse_err("function", text));
            }
            let amp = parse_f64(parts[0], "function", text)?;
            let x0 = parse_f64(parts[1], "function", text)?;
            let a = parse_f64(parts[2], "function", text)?;
            if a <= 0.0 || !a.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "gauss width a = {a} must be > 0"
                )));
            }
            let center = [x0; 3];
            GridFunction::from_fn(grid, |x| {
                let d = grid.periodic_point_distance(x, &center[..x.len()]);
                amp * (-d * d / (4.0 * a)).exp()
            })?
        }
        "bumps" => {
            if parts.len() != 2 {
                return Err(parse_err("function", text));
            }
            let k = parse_u64(parts[0], "function", text)? as usize;
            let seed = parse_u64(parts[1], "function", text)?;
            let spec = CorpusSpec {
                family: CorpusFamily::MultiBump { bumps: k.max(1) },
                count: 1,
                seed,
                mean_zero: false,
            };
            corpus::generate(&spec, grid)?.remove(0).function
        }
        "mode" => {
            if parts.len() != 2 {
                return Err(parse_err("function", text));
            }
            let k = parse_f64(parts[0], "function", text)?;
            let amp = parse_f64(parts[1], "function", text)?;
            let l = grid.period();
            GridFunction::from_fn(grid, |x| {
                amp * (2.0 * std::f64::consts::PI * k * x[0] / l).cos()
            })?
        }
        "bandrand" => {
            if parts.len() != 3 {
                return Err(parse_err("function", text));
            }
            let seed = parse_u64(parts[0], "function", text)?;
            let k_min = parse_u64(parts[1], "function", text)? as u32;
            let k_max = parse_u64(parts[2], "function", text)? as u32;
            let spec = CorpusSpec {
                family: CorpusFamily::BandLimitedRandom { k_min, k_max },
                count: 1,
                seed,
                mean_zero: false,
            };
            corpus::generate(&spec, grid)?.remove(0).function
        }
        _ => return Err(parse_err("function", text)),
    };
    if mean_zero {
        f.remove_mean();
    }
    Ok(f)
}

/// Parse a corpus descriptor `family:count[:params]`.
pub fn parse_corpus(text: &str, seed: u64) -> Result<CorpusSpec> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() < 2 {
        return Err(parse_err("corpus", text));
    }
    let count = parse_u64(parts[1], "corpus", text)? as usize;
    let family = match (parts[0], parts.len()) {
        ("gaussian", 2) => CorpusFamily::Gaussian,
        ("bumps", 2) => CorpusFamily::MultiBump { bumps: 3 },
        ("bumps", 3) => CorpusFamily::MultiBump {
            bumps: parse_u64(parts[2], "corpus", text)? as usize,
        },
        ("modbump", 2) => CorpusFamily::ModulatedBump { frequency: 2.0 },
        ("modbump", 3) => CorpusFamily::ModulatedBump {
            frequency: parse_f64(parts[2], "corpus", text)?,
        },
        ("bandrand", 2) => CorpusFamily::BandLimitedRandom {
            k_min: 1,
            k_max: 16,
        },
        ("bandrand", 4) => CorpusFamily::BandLimitedRandom {
            k_min: parse_u64(parts[2], "corpus", text)? as u32,
            k_max: parse_u64(parts[3], "corpus", text)? as u32,
        },
        _ => return Err(parse_err("corpus", text)),
    };
    Ok(CorpusSpec::new(family, count, seed))
}

/// Parse a weight descriptor on the half line.
pub fn parse_weight(text: &str) -> Result<WeightProfile> {
    let (kind, args) = text
        .split_once(':')
        .ok_or_else(|| parse_err("weight", text))?;
    match kind {
        "power" => {
            let parts: Vec<&str> = args.split(',').collect();
            if parts.len() != 2 {
                return Err(parse_err("weight", text));
            }
            WeightProfile::power(
                parse_f64(parts[0], "weight", text)?,
                parse_f64(parts[1], "weight", text)?,
            )
        }
        "tabulated" => {
            let sections: Vec<&str> = args.split('|').collect();
            if sections.len() != 3 {
                return Err(parse_err("weight", text));
            }
            let t: Result<Vec<f64>> = sections[0]
                .split(';')
                .map(|p| parse_f64(p, "weight", text))
                .collect();
            let w: Result<Vec<f64>> = sections[1]
                .split(';')
                .map(|p| parse_f64(p, "weight", text))
                .collect();
            WeightProfile::tabulated(t?, w?, parse_f64(sections[2], "weight", text)?)
        }
        _ => Err(parse_err("weight", text)),
    }
}

/// Parse a spatial weight field descriptor.
pub fn parse_field(text: &str) -> Result<SpatialWeightSpec> {
    match text {
        "ones" => Ok(SpatialWeightSpec::Ones),
        "invsqrt" => Ok(SpatialWeightSpec::InverseSqrtDistance),
        _ => Err(parse_err("field", text)),
    }
}

/// Parse a comma-separated list of floats (sweep axes).
pub fn parse_axis(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|p| parse_f64(p, "axis", text))
        .collect()
}
