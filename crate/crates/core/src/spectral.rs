//! Walsh-Fourier analysis of `Q1^{n+1}` and the resulting upper bound on
//! the distance to uniform.
//!
//! After `n + 1` steps the Fourier coefficient at a frequency `y` of weight
//! `k` has magnitude `(1 − k/n)^{n−k+1} ((k−1)/n)^k` and sign `(−1)^{x·y}`,
//! so the squared coefficients can be summed by weight class:
//!
//! ```text
//! S = Σ_{k=2}^{n−1} C(n,k) (1 − k/n)^{2n−2k+2} ((k−1)/n)^{2k}
//! ```
//!
//! and `‖Q1^{n+1}(x,·) − π‖_TV ≤ sqrt(S)/2`. Terms are evaluated in log
//! space so that `n` in the thousands does not overflow `C(n,k)`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::distribution::DistributionVector;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::par::{self, Execution};

/// `exp` underflows to zero below this.
const LN_UNDERFLOW: f64 = -745.0;

pub fn ln_choose(n: usize, k: usize) -> f64 {
    assert!(k <= n, "ln_choose({n}, {k})");
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// `a · ln(b)` with the convention `0 · ln 0 = 0`.
fn xlogy(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * b.ln()
    }
}

fn exp_or_zero(l: f64) -> f64 {
    if l < LN_UNDERFLOW {
        0.0
    } else {
        l.exp()
    }
}

/// `ln h(n, k)`.
pub fn ln_h(n: usize, k: usize) -> f64 {
    assert!(n >= 1 && k <= n, "h({n}, {k}) needs 0 <= k <= n, n >= 1");
    let nf = n as f64;
    let kf = k as f64;
    ln_choose(n, k) + xlogy(2.0 * (nf - kf), (nf - kf) / nf) + xlogy(2.0 * kf, kf / nf)
}

/// `h(n,k) = C(n,k) (1 − k/n)^{2n−2k} (k/n)^{2k}`.
pub fn h(n: usize, k: usize) -> f64 {
    exp_or_zero(ln_h(n, k))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HBoundReport {
    pub n: usize,
    /// `max h(n,k) · n²` over `2 <= k <= n−2`.
    pub max_interior_ratio: f64,
    pub argmax_k: usize,
    /// `n · h(n, n−1)`.
    pub last_ratio: f64,
    pub passed: bool,
}

/// Checks `h(n,k) <= 1/n²` for `2 <= k <= n−2` and `h(n,n−1) <= 1/n`,
/// comparing in log space.
pub fn check_h_bounds(n: usize) -> Result<HBoundReport> {
    if n <= 5 {
        return Err(Error::InvalidDimension {
            n,
            reason: "the h(n,k) bounds are stated for n > 5",
        });
    }
    let ln_n = (n as f64).ln();
    let (argmax_k, ln_max) = (2..=n - 2).map(|k| (k, ln_h(n, k) + 2.0 * ln_n)).fold(
        (0, f64::NEG_INFINITY),
        |best, cur| if cur.1 > best.1 { cur } else { best },
    );
    let ln_last = last_class_ln_ratio(n);
    Ok(HBoundReport {
        n,
        max_interior_ratio: ln_max.exp(),
        argmax_k,
        last_ratio: ln_last.exp(),
        passed: ln_max <= 0.0 && ln_last <= 0.0,
    })
}

/// `ln(n · h(n, n−1))`, defined for every `n >= 2`.
pub fn last_class_ln_ratio(n: usize) -> f64 {
    assert!(n >= 2);
    ln_h(n, n - 1) + (n as f64).ln()
}

/// Closed-form coefficient of `Q1^{n+1}(x,·)` at `y = 1^k 0^{n−k}`.
pub fn fourier_coeff_closed_form(n: usize, x: &BitVector, k: usize) -> f64 {
    assert!(k <= n && x.len() == n);
    let sign_flip = x.iter().take(k).fold(false, |acc, b| acc ^ b);
    let magnitude = closed_form_magnitude(n, k);
    if sign_flip {
        -magnitude
    } else {
        magnitude
    }
}

fn closed_form_magnitude(n: usize, k: usize) -> f64 {
    let nf = n as f64;
    let kf = k as f64;
    if k == 0 {
        return 1.0;
    }
    ((nf - kf) / nf).powi((n - k + 1) as i32) * ((kf - 1.0) / nf).powi(k as i32)
}

/// Closed-form coefficient at an arbitrary frequency: the weight-class
/// magnitude with sign `(−1)^{x·y}`.
pub fn fourier_coeff_at(x: &BitVector, y: &BitVector) -> f64 {
    assert_eq!(x.len(), y.len());
    let magnitude = closed_form_magnitude(x.len(), y.hamming_weight());
    if x.dot(y) {
        -magnitude
    } else {
        magnitude
    }
}

/// `Σ_z (−1)^{y·z} d(z)` by direct summation.
pub fn fourier_bruteforce(d: &DistributionVector, y: &BitVector) -> f64 {
    assert_eq!(y.len(), d.n());
    let y = y.to_u64().unwrap() as usize;
    d.probs()
        .iter()
        .enumerate()
        .map(|(z, &p)| if (y & z).count_ones() & 1 == 1 { -p } else { p })
        .sum()
}

/// All `2^n` coefficients at once by the fast Walsh-Hadamard transform.
pub fn walsh_spectrum(d: &DistributionVector) -> Vec<f64> {
    let mut a = d.probs().to_vec();
    let mut half = 1;
    while half < a.len() {
        for block in a.chunks_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (u, v) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, t) = (*u + *v, *u - *v);
                *u = s;
                *v = t;
            }
        }
        half *= 2;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightTerm {
    pub k: usize,
    pub term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSummary {
    pub n: usize,
    pub per_weight_terms: Vec<WeightTerm>,
    /// Sum of squared coefficients over `y ≠ 0`.
    pub total: f64,
    /// `sqrt(total) / 2`, an upper bound on the TV distance at `t = n+1`.
    pub tv_bound: f64,
    /// `Σ_{k=2}^{n−1} h(n,k)`, which dominates `total`.
    pub h_sum: f64,
    /// `(n−3)/n² + 1/n`, the termwise bound on `h_sum`.
    pub h_sum_bound: f64,
    /// `2/n`.
    pub coarse_bound: f64,
}

pub fn fourier_sum(n: usize) -> Result<FourierSummary> {
    fourier_sum_with(n, Execution::default())
}

pub fn fourier_sum_with(n: usize, exec: Execution) -> Result<FourierSummary> {
    if n < 3 {
        return Err(Error::InvalidDimension {
            n,
            reason: "the weight-class sum needs n >= 3",
        });
    }
    let nf = n as f64;
    let ks = n - 2; // k = 2..=n-1
    let blocks = par::map_blocks(ks, 256, exec, |range| {
        range
            .map(|i| {
                let k = i + 2;
                let kf = k as f64;
                let ln_term = ln_choose(n, k)
                    + (2.0 * (nf - kf) + 2.0) * ((nf - kf) / nf).ln()
                    + 2.0 * kf * ((kf - 1.0) / nf).ln();
                (
                    WeightTerm {
                        k,
                        term: exp_or_zero(ln_term),
                    },
                    h(n, k),
                )
            })
            .collect::<Vec<_>>()
    });
    let (per_weight_terms, hs): (Vec<WeightTerm>, Vec<f64>) = blocks.into_iter().flatten().unzip();
    let total: f64 = per_weight_terms.iter().map(|t| t.term).sum();
    Ok(FourierSummary {
        n,
        total,
        tv_bound: total.sqrt() / 2.0,
        h_sum: hs.iter().sum(),
        h_sum_bound: (nf - 3.0) / (nf * nf) + 1.0 / nf,
        coarse_bound: 2.0 / nf,
        per_weight_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::Chain;
    use crate::distribution::{evolve_exact, tv_to_uniform};

    fn evolved(n: usize, x: &BitVector) -> DistributionVector {
        let chain = Chain::q1(n).unwrap();
        evolve_exact(&chain, &DistributionVector::point_mass(x).unwrap(), n + 1).unwrap()
    }

    #[test]
    fn h_examples() {
        for n in [1, 5, 40, 3000] {
            assert!((h(n, 0) - 1.0).abs() < 1e-12);
        }
        assert!((h(6, 2) - 3840.0 / 531441.0).abs() < 1e-15);
        for k in 2..=5 {
            assert!(h(7, k) <= 1.0 / 49.0);
        }
    }

    #[test]
    fn h_bound_reports() {
        assert!(check_h_bounds(6).unwrap().passed);
        let big = check_h_bounds(1000).unwrap();
        assert!(big.passed);
        // h(n,k) is symmetric under k -> n-k, so the extremes tie
        assert!(big.argmax_k == 2 || big.argmax_k == 998, "{}", big.argmax_k);
        assert!(check_h_bounds(5).is_err());
        assert!(5.0 * h(5, 4) < 1.0);
    }

    #[test]
    fn closed_form_zero_classes() {
        let x = BitVector::zeros(6);
        assert_eq!(fourier_coeff_closed_form(6, &x, 1), 0.0);
        assert_eq!(fourier_coeff_closed_form(6, &x, 6), 0.0);
        assert!((fourier_coeff_closed_form(6, &x, 3) - 1.0 / 432.0).abs() < 1e-16);
        assert_eq!(fourier_coeff_closed_form(6, &x, 0), 1.0);
        let x: BitVector = "100000".parse().unwrap();
        assert!((fourier_coeff_closed_form(6, &x, 3) + 1.0 / 432.0).abs() < 1e-16);
    }

    #[test]
    fn bruteforce_basics() {
        let d = evolved(5, &BitVector::zeros(5));
        assert!((fourier_bruteforce(&d, &BitVector::zeros(5)) - 1.0).abs() < 1e-15);
        let u = DistributionVector::uniform(5).unwrap();
        for y in 1..32u64 {
            assert!(fourier_bruteforce(&u, &BitVector::from_u64(5, y)).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_form_matches_bruteforce_n6() {
        for x in ["000000", "101100", "111111"] {
            let x: BitVector = x.parse().unwrap();
            let d = evolved(6, &x);
            let spectrum = walsh_spectrum(&d);
            for y in 0..64u64 {
                let yv = BitVector::from_u64(6, y);
                let brute = fourier_bruteforce(&d, &yv);
                assert!(
                    (brute - fourier_coeff_at(&x, &yv)).abs() <= 1e-12,
                    "x={x} y={yv}"
                );
                assert!((brute - spectrum[y as usize]).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn weight_class_sum_matches_exhaustive_sum() {
        for n in 4..=10 {
            let d = evolved(n, &BitVector::zeros(n));
            let exhaustive: f64 = walsh_spectrum(&d).iter().skip(1).map(|c| c * c).sum();
            let s = fourier_sum(n).unwrap();
            assert!((exhaustive - s.total).abs() <= 1e-10, "n={n}");
            assert!(tv_to_uniform(&d) <= s.tv_bound + 1e-12);
        }
    }

    #[test]
    fn summary_invariants() {
        let s = fourier_sum(50).unwrap();
        assert_eq!(s.per_weight_terms.len(), 48);
        assert_eq!(s.per_weight_terms[0].k, 2);
        assert!(s.per_weight_terms.iter().all(|t| t.term >= 0.0));
        assert!((s.tv_bound * s.tv_bound - s.total / 4.0).abs() < 1e-15);
        assert!(s.total <= s.h_sum && s.h_sum <= s.h_sum_bound && s.h_sum_bound <= s.coarse_bound);
        assert!(fourier_sum(2).is_err());
    }

    #[test]
    fn sum_is_mode_independent() {
        assert_eq!(
            fourier_sum_with(1500, Execution::Sequential).unwrap(),
            fourier_sum_with(1500, Execution::Parallel).unwrap()
        );
    }

    #[test]
    fn log_space_survives_large_n() {
        let s = fourier_sum(5000).unwrap();
        assert!(s.total.is_finite() && s.total > 0.0);
        assert!(s.total <= 2.0 / 5000.0);
    }
}
