//! Verification reports: per-function records, aggregates, provenance,
//! and the JSON / CSV writers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// One evaluated corpus member.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionRecord {
    pub index: usize,
    pub label: String,
    pub lhs: f64,
    pub factor_a: f64,
    pub factor_b: f64,
    /// `lhs / (factor_a^theta * factor_b^(1-theta))`; absent when the
    /// denominator degenerates.
    pub ratio: Option<f64>,
    /// Set when a zero factor meets a nonzero left side (or both vanish):
    /// the ratio is undefined rather than silently infinite.
    pub flagged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridMeta {
    pub n: usize,
    #[serde(rename = "G")]
    pub g: usize,
    #[serde(rename = "L")]
    pub l: f64,
}

impl From<Grid> for GridMeta {
    fn from(grid: Grid) -> Self {
        Self {
            n: grid.dimension(),
            g: grid.points_per_axis(),
            l: grid.period(),
        }
    }
}

/// Aggregated ratios; the max is the empirical constant of the case.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Aggregate {
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub corpus_size: usize,
    pub flagged: usize,
}

/// Everything needed to reproduce a run bit for bit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    /// Command line when the run came from the CLI.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    pub seed: u64,
    pub besov_t_min: f64,
    pub besov_t_cap: f64,
    pub besov_t_points: usize,
    pub radii: Vec<f64>,
}

/// Measured quantities the underlying theory only bounds abstractly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Measured L1 norms of the cutoff kernels (reported, not asserted).
    pub theta0_kernel_l1: f64,
    pub theta1_kernel_l1: f64,
    /// Mean over the corpus of the Besov transport ratio
    /// `||J^(s/2) f||_{B^(-beta-s)} / ||f||_{B^(-beta)}`, when the case
    /// has a fractional left side.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub besov_transport_mean_ratio: Option<f64>,
    /// Measured A_1 constant of the spatial weight, for weighted cases.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1_constant: Option<f64>,
}

/// Empirical constant per grid refinement level.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefinementRecord {
    pub points_per_axis: Vec<usize>,
    pub constants: Vec<f64>,
    /// Last constant over the first.
    pub growth_factor: f64,
    /// Set on monotone growth beyond 2x: a discretization artifact or an
    /// invalid parameter set.
    pub flagged: bool,
}

/// Full per-case verification output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub case: serde_json::Value,
    pub grid: GridMeta,
    pub corpus: serde_json::Value,
    pub records: Vec<FunctionRecord>,
    pub aggregate: Aggregate,
    pub provenance: Provenance,
    pub diagnostics: Diagnostics,
    /// Present when the run included a refinement study.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinement: Option<RefinementRecord>,
}

impl VerificationReport {
    pub fn case_id(&self) -> &str {
        self.case.get("id").and_then(|v| v.as_str()).unwrap_or("?")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// One row per function: case id, seed, lhs, factor_A, factor_B,
    /// ratio (floats carry 17 significant digits).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("case,seed,lhs,factor_a,factor_b,ratio\n");
        let id = self.case_id().to_owned();
        for r in &self.records {
            let ratio = r
                .ratio
                .map(|v| format!("{v:.16e}"))
                .unwrap_or_else(|| "undefined".into());
            out.push_str(&format!(
                "{id},{}/{},{:.16e},{:.16e},{:.16e},{ratio}\n",
                self.provenance.seed, r.index, r.lhs, r.factor_a, r.factor_b
            ));
        }
        out
    }

    /// The one-line aggregate summary printed by the CLI.
    pub fn summary_line(&self) -> String {
        format!(
            "case={} C_emp={:.16e} n={}",
            self.case_id(),
            self.aggregate.max_ratio,
            self.aggregate.corpus_size
        )
    }
}

/// Collapse records into the aggregate; max/mean run in index order, so
/// the result does not depend on evaluation parallelism.
pub(crate) fn aggregate(records: &[FunctionRecord]) -> Aggregate {
    let mut max_ratio = 0.0f64;
    let mut sum = 0.0f64;
    let mut counted = 0usize;
    let mut flagged = 0usize;
    for r in records {
        if let Some(v) = r.ratio {
            max_ratio = max_ratio.max(v);
            sum += v;
            counted += 1;
        }
        if r.flagged {
            flagged += 1;
        }
    }
    Aggregate {
        max_ratio,
        mean_ratio: if counted > 0 {
            sum / counted as f64
        } else {
            0.0
        },
        corpus_size: records.len(),
        flagged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(index: usize, ratio: Option<f64>, flagged: bool) -> FunctionRecord {
        FunctionRecord {
            index,
            label: format!("t/{index}"),
            lhs: 1.0,
            factor_a: 1.0,
            factor_b: 1.0,
            ratio,
            flagged,
        }
    }

    #[test]
    fn aggregate_max_dominates_mean() {
        let records = vec![record(0, Some(1.0), false), record(1, Some(3.0), false)];
        let agg = aggregate(&records);
        assert_eq!(agg.max_ratio, 3.0);
        assert_eq!(agg.mean_ratio, 2.0);
        assert!(agg.max_ratio >= agg.mean_ratio);
        assert_eq!(agg.flagged, 0);
    }

    #[test]
    fn aggregate_counts_flags() {
        let records = vec![record(0, None, true), record(1, Some(2.0), false)];
        let agg = aggregate(&records);
        assert_eq!(agg.flagged, 1);
        assert_eq!(agg.mean_ratio, 2.0);
    }
}
