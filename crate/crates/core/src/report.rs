//! Cutoff profiles: exact, upper-bound, and lower-bound columns of the
//! distance to uniform across a range of times.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::chains::{Chain, ChainKind};
use crate::distribution::{exact_tv_curve, DEFAULT_DIMENSION_GUARD};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::par::Execution;
use crate::spectral::fourier_sum;
use crate::weight_stats::{chebyshev_lower_bound, weight_histograms, LowerBoundParams};

/// Version of the CSV columns and JSON keys emitted by reports.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRequest {
    pub chain: Chain,
    pub x0: BitVector,
    /// Strictly increasing times.
    pub times: Vec<usize>,
    /// Monte Carlo trajectories for the empirical lower bound; 0 disables it.
    pub samples: u64,
    pub seed: u64,
    pub alpha: f64,
    /// Defaults to `ln n`.
    pub c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub t: usize,
    pub tv_exact: Option<f64>,
    pub tv_upper: Option<f64>,
    pub tv_lower_emp: Option<f64>,
    pub tv_lower_emp_se: Option<f64>,
    pub chebyshev_lower: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMetadata {
    pub schema_version: u32,
    pub chain: ChainKind,
    pub n: usize,
    pub start: BitVector,
    pub seed: u64,
    pub samples: u64,
    pub alpha: f64,
    pub c: f64,
    pub version: String,
    /// Unix seconds; absent unless requested so that output stays reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub metadata: ProfileMetadata,
    pub rows: Vec<ProfileRow>,
}

pub fn build_profile(req: &ProfileRequest) -> Result<ProfileReport> {
    let chain = &req.chain;
    let n = chain.n();
    if req.x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: req.x0.len(),
        });
    }
    if req.times.is_empty() || req.times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "profile times must be non-empty and strictly increasing".to_string(),
        ));
    }
    let c = req.c.unwrap_or_else(|| (n as f64).ln());
    let t_max = *req.times.last().unwrap();

    let exact = if n <= DEFAULT_DIMENSION_GUARD {
        Some(exact_tv_curve(chain, &req.x0, t_max)?)
    } else {
        None
    };

    let upper = match chain.kind() {
        ChainKind::Q1 if n >= 3 => Some((n + 1, fourier_sum(n)?.tv_bound)),
        ChainKind::Q1 => None,
        ChainKind::Q2 => Some((n, 0.0)),
    };

    let empirical = if req.samples > 0 {
        Some(weight_histograms(
            chain,
            &req.x0,
            &req.times,
            req.samples,
            req.seed,
            Execution::default(),
        )?)
    } else {
        None
    };

    let chebyshev = match chain.kind() {
        ChainKind::Q1 => LowerBoundParams::new(n, req.alpha, c)
            .ok()
            .and_then(|p| chebyshev_lower_bound(&p).ok().map(|b| (p.t(), b))),
        ChainKind::Q2 => None,
    };

    let rows = req
        .times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let emp = empirical.as_ref().map(|h| h[i].tv_to_binomial());
            ProfileRow {
                t,
                tv_exact: exact.as_ref().map(|curve| curve[t].tv),
                tv_upper: upper.and_then(|(from, b)| (t >= from).then_some(b)),
                tv_lower_emp: emp.map(|e| e.0),
                tv_lower_emp_se: emp.map(|e| e.1),
                chebyshev_lower: chebyshev.and_then(|(tc, b)| (t == tc).then_some(b)),
            }
        })
        .collect();

    Ok(ProfileReport {
        metadata: ProfileMetadata {
            schema_version: SCHEMA_VERSION,
            chain: chain.kind(),
            n,
            start: req.x0.clone(),
            seed: req.seed,
            samples: req.samples,
            alpha: req.alpha,
            c,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: None,
        },
        rows,
    })
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ProfileReport {
    /// A `# schema_version=N` comment line, a header, then one row per time;
    /// absent values are empty cells.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# schema_version={}", self.metadata.schema_version)?;
        writeln!(
            w,
            "t,tv_exact,tv_upper,tv_lower_emp,tv_lower_emp_se,chebyshev_lower"
        )?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.t,
                cell(r.tv_exact),
                cell(r.tv_upper),
                cell(r.tv_lower_emp),
                cell(r.tv_lower_emp_se),
                cell(r.chebyshev_lower)
            )?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile report serializes")
    }
}
