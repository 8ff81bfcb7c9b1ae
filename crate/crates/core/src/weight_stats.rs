//! Lower-bound machinery built on the Hamming weight `W_t`.
//!
//! Started from zero, `E[W_t]` has a closed form for `t <= n` that stays
//! a multiple of `n^α` below `n/2` at `t = n − n^α`, while `Var(W_t) <= 4t`
//! because each of the `2t` driving inputs moves `W_t` by at most 2. The
//! Chebyshev argument turns this into a lower bound on the distance to
//! uniform; [`empirical_tv_lower_bound`] estimates the sharper projection
//! bound from Monte Carlo weight histograms.

use std::io::{self, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chains::{Chain, ChainKind, DrivingSequence};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::par::{self, Execution};
use crate::rng;
use crate::spectral::ln_choose;

fn check_time(n: usize, t: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDimension {
            n,
            reason: "dimension must be at least 1",
        });
    }
    if t > n {
        return Err(Error::TimeExceedsDimension { t, n });
    }
    Ok(())
}

/// `(1 − 1/n)^t`, without the error that rounding `1 − 1/n` picks up over `t` powers.
fn stay_probability(n: usize, t: usize) -> f64 {
    ln_stay_probability(n, t).exp()
}

fn ln_stay_probability(n: usize, t: usize) -> f64 {
    if t == 0 {
        0.0
    } else {
        t as f64 * (-1.0 / n as f64).ln_1p()
    }
}

/// `μ_t = ((t − n)/2)(1 − 1/n)^t + n/2`.
pub fn mu_closed_form(n: usize, t: usize) -> Result<f64> {
    check_time(n, t)?;
    let nf = n as f64;
    Ok((t as f64 - nf) / 2.0 * stay_probability(n, t) + nf / 2.0)
}

/// Iterates `μ_{s+1} = C1 μ_s − (C1/2)(1 − C1^s) + C2` from `μ_0 = 0`,
/// with `C1 = 1 − 1/n` and `C2 = (2n − 1)/(2n)`.
pub fn mu_recursion(n: usize, t: usize) -> Result<f64> {
    check_time(n, t)?;
    let nf = n as f64;
    let c1 = 1.0 - 1.0 / nf;
    let c2 = (2.0 * nf - 1.0) / (2.0 * nf);
    let mut mu = 0.0;
    let mut c1_pow = 1.0;
    for _ in 0..t {
        mu = c1 * mu - c1 / 2.0 * (1.0 - c1_pow) + c2;
        c1_pow *= c1;
    }
    Ok(mu)
}

/// `P(X_t^{(1)} = 1) = (1 − (1 − 1/n)^t)/2` from a zero start.
///
/// Exact for `t < n`. At `t = n` the first coordinate has been through the
/// parity slot, so the true marginal is exactly 1/2 and the formula is off by
/// `(1 − 1/n)^n / 2`; the formula value is still returned there.
pub fn prob_first_coord_one(n: usize, t: usize) -> Result<f64> {
    check_time(n, t)?;
    Ok(-ln_stay_probability(n, t).exp_m1() / 2.0)
}

/// `n/2 − n^α/(2e)`, the ceiling on `μ_t` at `t = n − n^α`.
pub fn mean_displacement_ceiling(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    nf / 2.0 - nf.powf(alpha) / (2.0 * std::f64::consts::E)
}

/// Outcome of replaying two driving sequences that differ in one input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayDiff {
    /// `|W_t − W_t'|`.
    pub weight_diff: usize,
    /// Largest Hamming distance between the two configurations at any step.
    pub max_hamming: usize,
}

fn paired_replay(
    chain: &Chain,
    x0: &BitVector,
    a: &DrivingSequence,
    b: &DrivingSequence,
) -> Result<ReplayDiff> {
    if x0.len() != chain.n() {
        return Err(Error::DimensionMismatch {
            expected: chain.n(),
            found: x0.len(),
        });
    }
    a.validate_for(chain)?;
    b.validate_for(chain)?;
    let mut x = x0.clone();
    let mut y = x0.clone();
    let mut max_hamming = 0;
    for s in 0..a.len() {
        Chain::advance(&mut x, a.coords()[s], a.bits()[s]);
        Chain::advance(&mut y, b.coords()[s], b.bits()[s]);
        max_hamming = max_hamming.max(x.hamming_distance(&y));
    }
    Ok(ReplayDiff {
        weight_diff: x.hamming_weight().abs_diff(y.hamming_weight()),
        max_hamming,
    })
}

fn check_replay_window(chain: &Chain, driving: &DrivingSequence, i: usize) -> Result<()> {
    if i >= driving.len() {
        return Err(Error::StepOutOfRange {
            index: i,
            len: driving.len(),
        });
    }
    check_time(chain.n(), driving.len())
}

/// Replays `driving` and a copy with the update bit of step `i` (0-based) flipped.
pub fn weight_diff_bit_flip(
    chain: &Chain,
    x0: &BitVector,
    driving: &DrivingSequence,
    i: usize,
) -> Result<ReplayDiff> {
    check_replay_window(chain, driving, i)?;
    paired_replay(chain, x0, driving, &driving.with_bit_flipped(i)?)
}

/// Replays `driving` and a copy whose step `i` (0-based) updates `new_coord`.
pub fn weight_diff_coord_change(
    chain: &Chain,
    x0: &BitVector,
    driving: &DrivingSequence,
    i: usize,
    new_coord: usize,
) -> Result<ReplayDiff> {
    if chain.kind() != ChainKind::Q1 {
        return Err(Error::InvalidParameter(
            "coordinate changes apply only to Q1".to_string(),
        ));
    }
    check_replay_window(chain, driving, i)?;
    if new_coord >= chain.n() {
        return Err(Error::CoordinateOutOfRange {
            index: new_coord,
            n: chain.n(),
        });
    }
    paired_replay(chain, x0, driving, &driving.with_coord(i, new_coord)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedDiffReport {
    pub trials: u64,
    pub max_weight_diff: usize,
    pub max_hamming: usize,
    pub passed: bool,
}

/// Randomized single-input changes: each trial draws `n` in `2..=n_max`,
/// `t` in `1..=n`, a start state (zero for even trials, uniform for odd), a
/// driving sequence, a step, and either a bit flip or a coordinate change.
pub fn bounded_difference_trials(
    trials: u64,
    n_max: usize,
    seed: u64,
) -> Result<BoundedDiffReport> {
    bounded_difference_trials_with(trials, n_max, seed, Execution::default())
}

pub fn bounded_difference_trials_with(
    trials: u64,
    n_max: usize,
    seed: u64,
    exec: Execution,
) -> Result<BoundedDiffReport> {
    if n_max < 2 {
        return Err(Error::InvalidParameter(
            "n_max must be at least 2".to_string(),
        ));
    }
    let blocks = par::map_blocks(
        trials as usize,
        1024,
        exec,
        |range| -> Result<(usize, usize)> {
            let mut worst = (0usize, 0usize);
            for trial in range {
                let mut rng = rng::stream(seed, trial as u64);
                let n = rng.random_range(2..=n_max);
                let t = rng.random_range(1..=n);
                let chain = Chain::q1(n)?;
                let mut x0 = BitVector::zeros(n);
                if trial % 2 == 1 {
                    for j in 0..n {
                        x0.set(j, rng.random());
                    }
                }
                let driving = DrivingSequence::random(&chain, t, &mut rng);
                let i = rng.random_range(0..t);
                let diff = if rng.random() {
                    weight_diff_bit_flip(&chain, &x0, &driving, i)?
                } else {
                    let u = rng.random_range(0..n);
                    weight_diff_coord_change(&chain, &x0, &driving, i, u)?
                };
                worst = (worst.0.max(diff.weight_diff), worst.1.max(diff.max_hamming));
            }
            Ok(worst)
        },
    );
    let mut report = BoundedDiffReport {
        trials,
        max_weight_diff: 0,
        max_hamming: 0,
        passed: true,
    };
    for block in blocks {
        let (w, h) = block?;
        report.max_weight_diff = report.max_weight_diff.max(w);
        report.max_hamming = report.max_hamming.max(h);
    }
    report.passed = report.max_weight_diff <= 2 && report.max_hamming <= 2;
    Ok(report)
}

/// Counts of the Hamming weight over Monte Carlo trajectories at one time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightHistogram {
    pub n: usize,
    pub t: usize,
    pub counts: Vec<u64>,
}

impl WeightHistogram {
    pub fn samples(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        let s = self.samples() as f64;
        self.counts
            .iter()
            .enumerate()
            .map(|(w, &c)| w as f64 * c as f64)
            .sum::<f64>()
            / s
    }

    /// `(m2, m4)` central moments.
    fn central_moments(&self) -> (f64, f64) {
        let s = self.samples() as f64;
        let mean = self.mean();
        self.counts
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(m2, m4), (w, &c)| {
                let d = w as f64 - mean;
                let p = c as f64 / s;
                (m2 + p * d * d, m4 + p * d.powi(4))
            })
    }

    /// Unbiased sample variance and its standard error.
    pub fn variance_with_error(&self) -> (f64, f64) {
        let s = self.samples() as f64;
        if s < 2.0 {
            return (0.0, 0.0);
        }
        let (m2, m4) = self.central_moments();
        let var = m2 * s / (s - 1.0);
        let se = ((m4 - m2 * m2).max(0.0) / s).sqrt();
        (var, se)
    }

    /// TV between the empirical weight law and `Binomial(n, 1/2)`, with
    /// `½ Σ_w sqrt(p̂_w (1 − p̂_w)/N)` as its standard error.
    pub fn tv_to_binomial(&self) -> (f64, f64) {
        let s = self.samples() as f64;
        let pmf = binomial_half_pmf(self.n);
        let (tv, se) = self
            .counts
            .iter()
            .zip(&pmf)
            .fold((0.0, 0.0), |(tv, se), (&c, &b)| {
                let p = c as f64 / s;
                (tv + (p - b).abs(), se + (p * (1.0 - p) / s).sqrt())
            });
        (tv / 2.0, se / 2.0)
    }

    /// CSV with header `weight,count`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "weight,count")?;
        for (weight, c) in self.counts.iter().enumerate() {
            writeln!(w, "{weight},{c}")?;
        }
        Ok(())
    }
}

/// `P(Bin(n, 1/2) = w)` for `w = 0..=n`, evaluated in log space.
pub fn binomial_half_pmf(n: usize) -> Vec<f64> {
    let ln_half_n = n as f64 * std::f64::consts::LN_2;
    (0..=n)
        .map(|w| {
            let l = ln_choose(n, w) - ln_half_n;
            if l < -745.0 {
                0.0
            } else {
                l.exp()
            }
        })
        .collect()
}

/// Runs `samples` trajectories (trajectory `i` on stream `(seed, i)`) and
/// histograms the weight at each requested time. `times` must be sorted.
pub fn weight_histograms(
    chain: &Chain,
    x0: &BitVector,
    times: &[usize],
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<Vec<WeightHistogram>> {
    if x0.len() != chain.n() {
        return Err(Error::DimensionMismatch {
            expected: chain.n(),
            found: x0.len(),
        });
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "histogram times must be strictly increasing".to_string(),
        ));
    }
    let n = chain.n();
    let Some(&t_max) = times.last() else {
        return Ok(Vec::new());
    };
    // weights per trajectory, row-major by trajectory
    let blocks = par::map_blocks(samples as usize, 512, exec, |range| {
        let mut weights = Vec::with_capacity(range.len() * times.len());
        for i in range {
            let mut rng = rng::stream(seed, i as u64);
            let mut x = x0.clone();
            let mut next = 0;
            if times[0] == 0 {
                weights.push(x.hamming_weight() as u32);
                next = 1;
            }
            chain.run_random(&mut x, t_max, &mut rng, |s, state| {
                if next < times.len() && times[next] == s {
                    weights.push(state.hamming_weight() as u32);
                    next += 1;
                }
            });
        }
        weights
    });
    let mut out: Vec<WeightHistogram> = times
        .iter()
        .map(|&t| WeightHistogram {
            n,
            t,
            counts: vec![0; n + 1],
        })
        .collect();
    for block in &blocks {
        for row in block.chunks(times.len()) {
            for (h, &w) in out.iter_mut().zip(row) {
                h.counts[w as usize] += 1;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub n: usize,
    pub t: usize,
    pub samples: u64,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    /// `4t`.
    pub bound: f64,
    pub passed: bool,
}

/// Monte Carlo `Var(W_t)` for `Q1` from zero; passes when the estimate is
/// at most `4t + 3·SE`.
pub fn variance_bound_check(n: usize, t: usize, samples: u64, seed: u64) -> Result<VarianceReport> {
    check_time(n, t)?;
    if samples == 0 {
        return Err(Error::InvalidParameter(
            "samples must be positive".to_string(),
        ));
    }
    let chain = Chain::q1(n)?;
    let hist = weight_histograms(
        &chain,
        &BitVector::zeros(n),
        &[t],
        samples,
        seed,
        Execution::default(),
    )?
    .pop()
    .unwrap();
    let (variance, std_error) = hist.variance_with_error();
    let bound = 4.0 * t as f64;
    Ok(VarianceReport {
        n,
        t,
        samples,
        mean: hist.mean(),
        variance,
        std_error,
        bound,
        passed: variance <= bound + 3.0 * std_error,
    })
}

/// Parameters of the Chebyshev lower bound at `t = round(n − n^α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundParams {
    pub n: usize,
    pub alpha: f64,
    pub c: f64,
}

impl LowerBoundParams {
    pub fn new(n: usize, alpha: f64, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension {
                n,
                reason: "dimension must be at least 1",
            });
        }
        if !(alpha > 0.5 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (1/2, 1), got {alpha}"
            )));
        }
        if c.is_nan() || c <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "c must be positive, got {c}"
            )));
        }
        Ok(Self { n, alpha, c })
    }

    /// `c = ln n`.
    pub fn with_log_c(n: usize, alpha: f64) -> Result<Self> {
        Self::new(n, alpha, (n as f64).ln())
    }

    /// `round(n − n^α)`.
    pub fn t(&self) -> usize {
        let nf = self.n as f64;
        (nf - nf.powf(self.alpha)).round().max(0.0) as usize
    }

    /// `δ = n^{α − 1/2}/(2e) − c`.
    pub fn delta(&self) -> f64 {
        (self.n as f64).powf(self.alpha - 0.5) / (2.0 * std::f64::consts::E) - self.c
    }
}

/// `max(0, 1 − 1/(4c²) − 4/δ²)`.
pub fn chebyshev_lower_bound(p: &LowerBoundParams) -> Result<f64> {
    let delta = p.delta();
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::DegenerateWindow { delta });
    }
    Ok((1.0 - 1.0 / (4.0 * p.c * p.c) - 4.0 / (delta * delta)).max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalTv {
    pub t: usize,
    pub samples: u64,
    pub tv: f64,
    pub std_error: f64,
}

/// TV between the Monte Carlo law of `W_t` and `Binomial(n, 1/2)`.
pub fn empirical_tv_lower_bound(
    chain: &Chain,
    x0: &BitVector,
    t: usize,
    samples: u64,
    seed: u64,
) -> Result<EmpiricalTv> {
    if samples == 0 {
        return Err(Error::InvalidParameter(
            "samples must be positive".to_string(),
        ));
    }
    let hist = weight_histograms(chain, x0, &[t], samples, seed, Execution::default())?
        .pop()
        .unwrap();
    let (tv, std_error) = hist.tv_to_binomial();
    Ok(EmpiricalTv {
        t,
        samples,
        tv,
        std_error,
    })
}
