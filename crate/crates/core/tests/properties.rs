mod common;

use proptest::prelude::*;
use swapscope::channels::{channel_from_choi, channel_tomography, ChoiState, KrausChannel};
use swapscope::interferometer::{fit_fringes, overlap, prob_zero_exact, sample_frequency, InterferometerRun, Mode};
use swapscope::observables::{expectation, Observable};
use swapscope::random::{random_channel, random_density, random_density_with_rank, random_hermitian, random_pure_state, random_unitary};
use swapscope::rng::stream;
use swapscope::spectral::{extremal_eigen, purity, visibility_at, Extremum, OptimizerConfig};
use swapscope::tomography::{project_to_physical, tomography};

#[test]
fn binomial_noise_within_two_over_root_n() {
    let mut rng = stream(2001, 0);
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        for p in [0.05, 0.5, 0.93] {
            let bound = 2.0 / (n as f64).sqrt();
            let hits = (0..200).filter(|_| (sample_frequency(p, n, &mut rng) - p).abs() <= bound).count();
            assert!(hits >= 198, "N={n} p={p}: {hits}/200");
        }
    }
}

#[test]
fn tomography_round_trip_all_ranks() {
    let mut rng = stream(2002, 0);
    for d in 2..=5 {
        for rank in 1..=d {
            let rho = random_density_with_rank(d, rank, &mut rng);
            let r = tomography(&rho, 0, 0).unwrap();
            assert!(common::trace_distance(r.state.matrix(), rho.matrix()) < 1e-10);
            assert!(r.raw_hermitian.max_abs_diff(rho.matrix()) < 1e-10);
        }
    }
}

#[test]
fn projection_is_idempotent() {
    let mut rng = stream(2003, 0);
    for d in 2..=5 {
        for _ in 0..10 {
            let mut h = random_hermitian(d, &mut rng);
            // shift so the trace is positive but some eigenvalues stay negative
            for i in 0..d {
                h[(i, i)] += 0.5;
            }
            let Ok(once) = project_to_physical(&h) else { continue };
            let twice = project_to_physical(once.matrix()).unwrap();
            assert!(once.matrix().max_abs_diff(twice.matrix()) < 1e-12);
            assert!(common::eigenvalues(once.matrix())[0] >= -1e-12);
        }
    }
}

#[test]
fn tomography_error_shrinks_with_shots() {
    let mut rng = stream(2004, 0);
    let rho = random_density(2, &mut rng);
    let medians: Vec<f64> = [1_000u64, 10_000, 100_000]
        .iter()
        .map(|&n| {
            common::median(
                (0..30)
                    .map(|s| common::trace_distance(tomography(&rho, n, s).unwrap().state.matrix(), rho.matrix()))
                    .collect(),
            )
        })
        .collect();
    assert!(medians.windows(2).all(|w| w[1] < w[0]), "{medians:?}");
}

#[test]
fn sampled_stderr_matches_spread() {
    let mut rng = stream(2005, 0);
    let a = random_density(2, &mut rng);
    let b = random_density(2, &mut rng);
    let n = 20_000;
    let est: Vec<_> = (0..200).map(|s| overlap(&a, &b, n, s).unwrap()).collect();
    let mean = est.iter().map(|e| e.v).sum::<f64>() / est.len() as f64;
    let spread = (est.iter().map(|e| (e.v - mean).powi(2)).sum::<f64>() / (est.len() - 1) as f64).sqrt();
    let reported = est.iter().map(|e| e.stderr_v()).sum::<f64>() / est.len() as f64;
    let ratio = reported / spread;
    assert!((1.0 / 1.5..=1.5).contains(&ratio), "reported {reported} vs spread {spread}");
}

#[test]
fn purity_bounds() {
    let mut rng = stream(2006, 0);
    for d in 1..=6 {
        for _ in 0..10 {
            let p = purity(&random_density(d, &mut rng), 0, 0).unwrap();
            assert!(p >= 1.0 / d as f64 - 1e-12 && p <= 1.0 + 1e-12);
        }
        let pure = random_pure_state(d, &mut rng).to_density();
        assert!((purity(&pure, 0, 0).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn probe_visibility_between_extremes() {
    let mut rng = stream(2007, 0);
    for d in 2..=5 {
        let rho = random_density(d, &mut rng);
        let ev = common::eigenvalues(rho.matrix());
        for _ in 0..20 {
            let v = visibility_at(&random_pure_state(d, &mut rng), &rho, 0, 0).unwrap();
            assert!(v >= ev[0] - 1e-12 && v <= ev[d - 1] + 1e-12);
        }
    }
}

#[test]
fn degenerate_spectrum_converges_at_start() {
    let rho = swapscope::DensityOperator::maximally_mixed(3);
    for which in [Extremum::Min, Extremum::Max] {
        let r = extremal_eigen(&rho, which, &OptimizerConfig::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations_used, 0);
        assert!((r.eigenvalue_estimate - 1.0 / 3.0).abs() < 1e-12);
    }
}

#[test]
fn sampled_extremal_eigenvalue_is_close() {
    let mut rng = stream(2008, 0);
    let rho = random_density(2, &mut rng);
    let ev = common::eigenvalues(rho.matrix());
    let cfg = OptimizerConfig {
        shots_per_eval: 100_000,
        max_iters: 100,
        restarts: 2,
        seed: 3,
        ..OptimizerConfig::default()
    };
    let r = extremal_eigen(&rho, Extremum::Max, &cfg).unwrap();
    assert!((r.eigenvalue_estimate - ev[1]).abs() < 0.02, "{} vs {}", r.eigenvalue_estimate, ev[1]);
    assert!(r.stderr > 0.0);
}

#[test]
fn choi_round_trip_and_channel_tomography() {
    let mut rng = stream(2009, 0);
    for d in 2..=3 {
        for rank in [1, d, d * d] {
            let ch = random_channel(d, rank, &mut rng);
            let report = channel_tomography(&ch, 0, 0).unwrap();
            let est = ChoiState::new(d, report.choi().state().clone()).unwrap();
            assert!(report.reference_marginal_deviation < 1e-9);
            let rho = random_density(d, &mut rng);
            let out = channel_from_choi(&est, &rho).unwrap();
            let oracle = common::kraus_action(ch.kraus_ops(), rho.matrix());
            assert!(common::max_abs_diff_na(&oracle, out.matrix()) < 1e-9);
        }
    }
}

#[test]
fn sampled_depolarizing_channel_tomography() {
    let ch = KrausChannel::depolarizing(2, 0.5).unwrap();
    let target = ch.choi_state();
    let dists: Vec<f64> = (0..20)
        .map(|s| {
            let r = channel_tomography(&ch, 100_000, s).unwrap();
            common::trace_distance(r.choi().state().matrix(), target.state().matrix())
        })
        .collect();
    let med = common::median(dists);
    assert!(med <= 0.05, "median {med}");
}

#[test]
fn fringe_fit_recovers_trace() {
    let mut rng = stream(2010, 0);
    for d in 2..=4 {
        let u = random_unitary(d, &mut rng);
        let rho = random_density(d, &mut rng);
        let t = common::trace_of_product(rho.matrix(), &u);
        let phases: Vec<f64> = (0..16).map(|k| k as f64 * std::f64::consts::TAU / 16.0).collect();
        let probs: Vec<f64> = phases.iter().map(|&p| prob_zero_exact(&u, &rho, p).unwrap()).collect();
        let (v, alpha) = fit_fringes(&phases, &probs).unwrap();
        assert!((v - t.norm()).abs() < 1e-10);
        if v > 1e-6 {
            let diff = (alpha - t.arg()).rem_euclid(std::f64::consts::TAU);
            assert!(diff.min(std::f64::consts::TAU - diff) < 1e-8);
        }
    }
}

#[test]
fn seeded_runs_are_reproducible() {
    let mut rng = stream(2011, 0);
    let rho = random_density(3, &mut rng);
    let u = random_unitary(3, &mut rng);
    let make = |seed| InterferometerRun::new(u.clone(), rho.clone(), 0.3, Mode::Sampled { shots: 5000 }, seed).unwrap();
    assert_eq!(swapscope::interferometer::run(&make(9)).p0, swapscope::interferometer::run(&make(9)).p0);
    assert_ne!(swapscope::interferometer::run(&make(9)).p0, swapscope::interferometer::run(&make(10)).p0);
    let a = tomography(&rho, 1000, 4).unwrap();
    let b = tomography(&rho, 1000, 4).unwrap();
    assert_eq!(a.per_probe_visibilities, b.per_probe_visibilities);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expectation_is_linear(seed in any::<u64>(), d in 2usize..5, alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let mut rng = stream(seed, 0);
        let a = Observable::new(random_hermitian(d, &mut rng)).unwrap();
        let b = Observable::new(random_hermitian(d, &mut rng)).unwrap();
        let rho = random_density(d, &mut rng);
        let combined = a.combine(alpha, &b, beta).unwrap();
        prop_assume!(combined.matrix().max_abs() > 1e-6);
        let lhs = expectation(&combined, &rho, 0, 0).unwrap();
        let rhs = alpha * expectation(&a, &rho, 0, 0).unwrap() + beta * expectation(&b, &rho, 0, 0).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn overlap_is_symmetric_and_bounded(seed in any::<u64>(), d in 1usize..6) {
        let mut rng = stream(seed, 0);
        let a = random_density(d, &mut rng);
        let b = random_density(d, &mut rng);
        let ab = overlap(&a, &b, 0, 0).unwrap().v;
        let ba = overlap(&b, &a, 0, 0).unwrap().v;
        prop_assert!((ab - ba).abs() < 1e-13);
        prop_assert!((-1e-13..=1.0 + 1e-13).contains(&ab));
    }
}
