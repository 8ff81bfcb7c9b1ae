//! `Q2` as an exact uniform sampler on `{0,1}^{2m}`.
//!
//! After `n = 2m` steps the state is `Z = B·R ⊕ x⃗`, where `R` is the vector
//! of update bits, `x⃗ = (parity(x), x_1, ..., x_{n−1})`, and
//!
//! ```text
//! B = | I  C |      C = | 0  I_{m−1} |
//!     | I  I |          | 0  0       |
//! ```
//!
//! `B` is invertible, so uniform `R` gives uniform `Z`, and any target state
//! is reached by exactly one bit sequence.

use crate::chains::{Chain, DrivingSequence};
use crate::error::{Error, Result};
use crate::gf2::{det_gf2, solve_linear, BitVector, Gf2Matrix};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadrantMatrixB {
    pub m: usize,
    pub matrix: Gf2Matrix,
}

pub fn build_b(m: usize) -> Result<QuadrantMatrixB> {
    if m < 1 {
        return Err(Error::InvalidDimension {
            n: 2 * m,
            reason: "B needs m >= 1",
        });
    }
    let n = 2 * m;
    let mut b = Gf2Matrix::zeros(n, n);
    for i in 0..m {
        b.set(i, i, true); // top-left I
        b.set(m + i, i, true); // bottom-left I
        b.set(m + i, m + i, true); // bottom-right I
        if i + 1 < m {
            b.set(i, m + i + 1, true); // C: shifted identity
        }
    }
    Ok(QuadrantMatrixB { m, matrix: b })
}

/// `(x_1 ⊕ ... ⊕ x_n, x_1, ..., x_{n−1})`.
pub fn build_xvec(x: &BitVector) -> Result<BitVector> {
    let n = x.len();
    if n == 0 || n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    let mut out = BitVector::zeros(n);
    out.set(0, x.parity());
    for i in 0..n - 1 {
        out.set(i + 1, x.get(i));
    }
    Ok(out)
}

/// Runs `Q2` for `n` steps from `x0` with fresh bits from stream `(seed, 0)`.
pub fn exact_sample(x0: &BitVector, seed: u64) -> Result<BitVector> {
    exact_sample_indexed(x0, seed, 0)
}

/// The `index`-th sample under `seed`, drawn from stream `(seed, index)`.
pub fn exact_sample_indexed(x0: &BitVector, seed: u64, index: u64) -> Result<BitVector> {
    let chain = Chain::q2(x0.len())?;
    let mut rng = rng::stream(seed, index);
    let mut x = x0.clone();
    chain.run_random(&mut x, chain.n(), &mut rng, |_, _| {});
    Ok(x)
}

/// The unique `Q2` driving sequence of length `n` taking `x0` to `z`.
pub fn solve_driving(x0: &BitVector, z: &BitVector) -> Result<DrivingSequence> {
    let n = x0.len();
    if z.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: z.len(),
        });
    }
    let b = build_b(Chain::q2(n)?.n() / 2)?;
    let rhs = z ^ &build_xvec(x0)?;
    let r = solve_linear(&b.matrix, &rhs)?;
    DrivingSequence::for_q2(n, r.iter().collect())
}

pub fn det_b(m: usize) -> Result<u8> {
    det_gf2(&build_b(m)?.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{evolve_symbolic_q2, replay_final};
    use proptest::prelude::*;

    #[test]
    fn b_small_cases() {
        let b1 = build_b(1).unwrap();
        assert_eq!(b1.matrix.to_string(), "10\n11");
        assert_eq!(det_b(1).unwrap(), 1);
        assert!(build_b(0).is_err());
        let b3 = build_b(3).unwrap().matrix;
        assert_eq!(
            b3.to_string(),
            "100010\n010001\n001000\n100100\n010010\n001001"
        );
        for m in 1..=12 {
            assert_eq!(det_b(m).unwrap(), 1, "m={m}");
        }
    }

    #[test]
    fn b_equals_symbolic_map() {
        for m in 1..=10 {
            let n = 2 * m;
            let chain = Chain::q2(n).unwrap();
            let aff = evolve_symbolic_q2(&chain, &BitVector::zeros(n), n).unwrap();
            assert_eq!(aff.map, build_b(m).unwrap().matrix, "m={m}");
        }
    }

    #[test]
    fn xvec_cases() {
        assert!(build_xvec(&BitVector::zeros(6)).unwrap().is_zero());
        assert_eq!(
            build_xvec(&"1000".parse().unwrap()).unwrap().to_string(),
            "1100"
        );
        assert_eq!(
            build_xvec(&BitVector::zeros(5)),
            Err(Error::OddDimension(5))
        );
    }

    #[test]
    fn solve_examples() {
        let r = solve_driving(&BitVector::zeros(2), &BitVector::zeros(2)).unwrap();
        assert_eq!(r.bits(), &[false, false]);
        // R = (1,0,0,0,0,0) from zero lands on (1,0,0,1,0,0)
        let z: BitVector = "100100".parse().unwrap();
        let r = solve_driving(&BitVector::zeros(6), &z).unwrap();
        assert_eq!(r.bits(), &[true, false, false, false, false, false]);
        assert!(solve_driving(&BitVector::zeros(5), &BitVector::zeros(5)).is_err());
        assert!(solve_driving(&BitVector::zeros(6), &BitVector::zeros(4)).is_err());
    }

    #[test]
    fn bijective_for_small_n() {
        for n in [2, 4, 6, 8, 10, 12] {
            let chain = Chain::q2(n).unwrap();
            let x0 = BitVector::from_u64(n, 0b1011 & ((1 << n) - 1));
            let mut seen = vec![false; 1 << n];
            for mask in 0u64..(1 << n) {
                let bits: Vec<bool> = (0..n).map(|j| mask >> j & 1 == 1).collect();
                let z =
                    replay_final(&chain, &x0, &DrivingSequence::for_q2(n, bits).unwrap()).unwrap();
                let idx = z.to_u64().unwrap() as usize;
                assert!(!seen[idx], "n={n} collision");
                seen[idx] = true;
            }
        }
    }

    #[test]
    fn samples_are_reproducible() {
        let x0 = BitVector::zeros(8);
        assert_eq!(exact_sample(&x0, 7).unwrap(), exact_sample(&x0, 7).unwrap());
        assert!(exact_sample(&BitVector::zeros(7), 7).is_err());
    }

    #[test]
    fn samples_pass_chi_square() {
        // 16 cells, 15 degrees of freedom; the 1e-4 upper critical value is 44.26
        let x0 = BitVector::zeros(4);
        let draws = 1_000_000u64;
        let mut counts = [0u64; 16];
        for i in 0..draws {
            counts[exact_sample_indexed(&x0, 2024, i)
                .unwrap()
                .to_u64()
                .unwrap() as usize] += 1;
        }
        let e = draws as f64 / 16.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        assert!(chi2 < 44.26, "chi2={chi2}");
    }

    proptest! {
        #[test]
        fn solve_then_replay_round_trip(m in 1usize..=10, x in any::<u64>(), r in any::<u64>()) {
            let n = 2 * m;
            let chain = Chain::q2(n).unwrap();
            let x0 = BitVector::from_u64(n, x);
            let bits: Vec<bool> = (0..n).map(|j| r >> j & 1 == 1).collect();
            let drv = DrivingSequence::for_q2(n, bits).unwrap();
            let z = replay_final(&chain, &x0, &drv).unwrap();
            let solved = solve_driving(&x0, &z).unwrap();
            prop_assert_eq!(solved, drv);
            let aff = evolve_symbolic_q2(&chain, &x0, n).unwrap();
            prop_assert_eq!(aff.offset, build_xvec(&x0).unwrap());
        }
    }
}
