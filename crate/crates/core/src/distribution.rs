//! Exact evolution of the full law on `2^n` states.
//!
//! A state is indexed by its integer encoding (bit `i` is coordinate `i`).
//! One step is computed by pulling: every target state `z` has the unique
//! shift-register preimage `g = f^{-1}(z)`, and its new mass is the lazy
//! kernel applied at `g`. Each output entry is a fixed-order sum, so the
//! result does not depend on the execution mode.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::chains::{Chain, ChainKind};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::par::{self, Execution};

pub const DEFAULT_DIMENSION_GUARD: usize = 24;

/// Slack used when checking normalization.
pub const MASS_TOLERANCE: f64 = 1e-12;

fn check_dimension(n: usize, guard: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDimension {
            n,
            reason: "dimension must be at least 1",
        });
    }
    if n > guard || n >= 63 {
        // current and next buffers of f64
        let bytes = (1u128 << n.min(127)) * 8 * 2;
        return Err(Error::DimensionTooLarge { n, guard, bytes });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionVector {
    n: usize,
    probs: Vec<f64>,
}

impl DistributionVector {
    pub fn point_mass(x: &BitVector) -> Result<Self> {
        Self::point_mass_with_guard(x, DEFAULT_DIMENSION_GUARD)
    }

    pub fn point_mass_with_guard(x: &BitVector, guard: usize) -> Result<Self> {
        let n = x.len();
        check_dimension(n, guard)?;
        let mut probs = vec![0.0; 1 << n];
        probs[x.to_u64().unwrap() as usize] = 1.0;
        Ok(Self { n, probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        check_dimension(n, DEFAULT_DIMENSION_GUARD)?;
        let size = 1usize << n;
        Ok(Self {
            n,
            probs: vec![1.0 / size as f64; size],
        })
    }

    /// Validates length, non-negativity, and normalization.
    pub fn from_probs(n: usize, probs: Vec<f64>) -> Result<Self> {
        check_dimension(n, DEFAULT_DIMENSION_GUARD)?;
        if probs.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: probs.len(),
            });
        }
        if probs.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(Error::InvalidParameter(
                "probabilities must be non-negative".to_string(),
            ));
        }
        let mass: f64 = probs.iter().sum();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {mass}, expected 1"
            )));
        }
        Ok(Self { n, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: &BitVector) -> f64 {
        assert_eq!(x.len(), self.n);
        self.probs[x.to_u64().unwrap() as usize]
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// `f^{-1}` on integer-encoded states: `(parity(z), z_1, ..., z_{n-1})`.
#[inline]
fn shift_register_preimage(z: usize, n: usize) -> usize {
    let mask = (1usize << n) - 1;
    ((z << 1) & mask) | (z.count_ones() as usize & 1)
}

pub fn evolve_exact(
    chain: &Chain,
    d: &DistributionVector,
    steps: usize,
) -> Result<DistributionVector> {
    evolve_exact_with(chain, d, steps, Execution::default())
}

pub fn evolve_exact_with(
    chain: &Chain,
    d: &DistributionVector,
    steps: usize,
    exec: Execution,
) -> Result<DistributionVector> {
    let n = d.n;
    if chain.n() != n {
        return Err(Error::DimensionMismatch {
            expected: chain.n(),
            found: n,
        });
    }
    let mut cur = d.probs.clone();
    let mut next = vec![0.0; cur.len()];
    for _ in 0..steps {
        {
            let src = &cur;
            match chain.kind() {
                ChainKind::Q1 => {
                    let flip_weight = 1.0 / (2 * n) as f64;
                    par::fill_indexed(&mut next, exec, |z| {
                        let g = shift_register_preimage(z, n);
                        let flipped: f64 = (0..n).map(|i| src[g ^ (1 << i)]).sum();
                        0.5 * src[g] + flip_weight * flipped
                    });
                }
                ChainKind::Q2 => {
                    let bit = 1usize << chain.middle().unwrap();
                    par::fill_indexed(&mut next, exec, |z| {
                        let g = shift_register_preimage(z, n);
                        0.5 * (src[g] + src[g ^ bit])
                    });
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(DistributionVector { n, probs: cur })
}

/// `(1/2) Σ_z |d(z) − 2^{−n}|`.
pub fn tv_to_uniform(d: &DistributionVector) -> f64 {
    let u = 1.0 / d.probs.len() as f64;
    0.5 * d.probs.iter().map(|&p| (p - u).abs()).sum::<f64>()
}

pub fn tv_distance(a: &DistributionVector, b: &DistributionVector) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: b.n,
        });
    }
    Ok(0.5
        * a.probs
            .iter()
            .zip(&b.probs)
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Law of the Hamming weight: entry `w` is `P(W = w)`.
pub fn weight_distribution(d: &DistributionVector) -> Vec<f64> {
    let mut out = vec![0.0; d.n + 1];
    for (z, &p) in d.probs.iter().enumerate() {
        out[z.count_ones() as usize] += p;
    }
    out
}

pub fn weight_moments(d: &DistributionVector) -> WeightMoments {
    let law = weight_distribution(d);
    let mean: f64 = law.iter().enumerate().map(|(w, p)| w as f64 * p).sum();
    let variance: f64 = law
        .iter()
        .enumerate()
        .map(|(w, p)| (w as f64 - mean).powi(2) * p)
        .sum();
    WeightMoments { mean, variance }
}

/// `P(x_coord = 1)`.
pub fn coordinate_marginal(d: &DistributionVector, coord: usize) -> Result<f64> {
    if coord >= d.n {
        return Err(Error::CoordinateOutOfRange {
            index: coord,
            n: d.n,
        });
    }
    Ok(d.probs
        .iter()
        .enumerate()
        .filter(|(z, _)| z >> coord & 1 == 1)
        .map(|(_, p)| p)
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvPoint {
    pub t: usize,
    pub tv: f64,
}

/// TV to uniform after each of `0..=t_max` steps from `x0`.
pub fn exact_tv_curve(chain: &Chain, x0: &BitVector, t_max: usize) -> Result<Vec<TvPoint>> {
    exact_tv_curve_with(chain, x0, t_max, Execution::default())
}

pub fn exact_tv_curve_with(
    chain: &Chain,
    x0: &BitVector,
    t_max: usize,
    exec: Execution,
) -> Result<Vec<TvPoint>> {
    let mut d = DistributionVector::point_mass(x0)?;
    let mut out = Vec::with_capacity(t_max + 1);
    out.push(TvPoint {
        t: 0,
        tv: tv_to_uniform(&d),
    });
    for t in 1..=t_max {
        d = evolve_exact_with(chain, &d, 1, exec)?;
        out.push(TvPoint {
            t,
            tv: tv_to_uniform(&d),
        });
    }
    Ok(out)
}

pub fn write_tv_curve_csv<W: Write>(points: &[TvPoint], mut w: W) -> io::Result<()> {
    writeln!(w, "t,tv")?;
    for p in points {
        writeln!(w, "{},{}", p.t, p.tv)?;
    }
    Ok(())
}
