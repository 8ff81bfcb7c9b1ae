use shiftwalk::chains::{evolve_symbolic, replay_final, simulate_random, Chain, DrivingSequence};
use shiftwalk::distribution::{evolve_exact_with, exact_tv_curve, DistributionVector};
use shiftwalk::exact_sampler::{exact_sample_indexed, solve_driving};
use shiftwalk::gf2::BitVector;
use shiftwalk::report::{build_profile, ProfileRequest};
use shiftwalk::rng::stream;
use shiftwalk::spectral::{fourier_coeff_at, fourier_sum_with, walsh_spectrum};
use shiftwalk::weight_stats::{bounded_difference_trials_with, weight_histograms};
use shiftwalk::Execution;

#[test]
fn walsh_spectrum_of_evolved_law_matches_closed_form() {
    for n in [5, 7, 9] {
        let x = BitVector::from_u64(n, 0b10110);
        let chain = Chain::q1(n).unwrap();
        let d = evolve_exact_with(
            &chain,
            &DistributionVector::point_mass(&x).unwrap(),
            n + 1,
            Execution::Sequential,
        )
        .unwrap();
        for (y, &coeff) in walsh_spectrum(&d).iter().enumerate() {
            let expected = fourier_coeff_at(&x, &BitVector::from_u64(n, y as u64));
            assert!((coeff - expected).abs() < 1e-12, "n={n} y={y}");
        }
    }
}

#[test]
fn spectral_bound_holds_from_every_start_after_n_plus_one() {
    // the coefficient magnitudes at n+1 do not depend on the start
    let n = 8;
    let chain = Chain::q1(n).unwrap();
    let bound = fourier_sum_with(n, Execution::Sequential).unwrap().tv_bound;
    for x in [0u64, 1, 0b1010_1010, 0xff] {
        let curve = exact_tv_curve(&chain, &BitVector::from_u64(n, x), n + 4).unwrap();
        for p in &curve[n + 1..] {
            assert!(p.tv <= bound + 1e-12, "x={x} t={} tv={}", p.t, p.tv);
        }
    }
}

#[test]
fn symbolic_map_reproduces_random_trajectories() {
    let mut rng = stream(3, 0);
    for n in [10, 33, 64, 65, 130] {
        let chain = Chain::q1(n).unwrap();
        let x0 = BitVector::from_bits(&(0..n).map(|i| i % 3 == 1).collect::<Vec<_>>());
        let driving = DrivingSequence::random(&chain, n, &mut rng);
        let affine = evolve_symbolic(&chain, &x0, driving.coords()).unwrap();
        assert_eq!(
            affine.evaluate(driving.bits()).unwrap(),
            replay_final(&chain, &x0, &driving).unwrap()
        );
    }
}

#[test]
fn sampler_outputs_solve_back_to_their_bits() {
    let n = 16;
    let chain = Chain::q2(n).unwrap();
    let x0 = BitVector::from_u64(n, 0x1234);
    for i in 0..200 {
        let z = exact_sample_indexed(&x0, 77, i).unwrap();
        let driving = solve_driving(&x0, &z).unwrap();
        assert_eq!(replay_final(&chain, &x0, &driving).unwrap(), z);
    }
}

#[test]
fn trajectories_are_reproducible_from_the_seed() {
    let chain = Chain::q1(50).unwrap();
    let x0 = BitVector::zeros(50);
    let a = simulate_random(&chain, &x0, 60, 11).unwrap();
    let b = simulate_random(&chain, &x0, 60, 11).unwrap();
    let c = simulate_random(&chain, &x0, 60, 12).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.states.len(), 61);
}

#[test]
fn execution_modes_agree_bit_for_bit() {
    let chain = Chain::q1(200).unwrap();
    let x0 = BitVector::zeros(200);
    let times = [0, 50, 150, 200];
    assert_eq!(
        weight_histograms(&chain, &x0, &times, 5_000, 4, Execution::Sequential).unwrap(),
        weight_histograms(&chain, &x0, &times, 5_000, 4, Execution::Parallel).unwrap()
    );
    assert_eq!(
        fourier_sum_with(3000, Execution::Sequential).unwrap(),
        fourier_sum_with(3000, Execution::Parallel).unwrap()
    );
    assert_eq!(
        bounded_difference_trials_with(5_000, 32, 8, Execution::Sequential).unwrap(),
        bounded_difference_trials_with(5_000, 32, 8, Execution::Parallel).unwrap()
    );
    let small = Chain::q1(14).unwrap();
    let d = DistributionVector::point_mass(&BitVector::zeros(14)).unwrap();
    assert_eq!(
        evolve_exact_with(&small, &d, 15, Execution::Sequential).unwrap(),
        evolve_exact_with(&small, &d, 15, Execution::Parallel).unwrap()
    );
}

#[test]
fn profile_rows_respect_the_bracketing_invariant() {
    for (chain, samples) in [
        (Chain::q1(12).unwrap(), 20_000),
        (Chain::q2(12).unwrap(), 20_000),
    ] {
        let report = build_profile(&ProfileRequest {
            chain,
            x0: BitVector::zeros(12),
            times: (0..=16).collect(),
            samples,
            seed: 5,
            alpha: 0.75,
            c: None,
        })
        .unwrap();
        for row in &report.rows {
            let exact = row.tv_exact.unwrap();
            let lower = row.tv_lower_emp.unwrap() - 3.0 * row.tv_lower_emp_se.unwrap();
            assert!(lower <= exact + 1e-12, "{:?} t={}", chain.kind(), row.t);
            if let Some(upper) = row.tv_upper {
                assert!(exact <= upper + 1e-12, "{:?} t={}", chain.kind(), row.t);
            }
        }
    }
}
