//! End-to-end validation matrix: every guaranteed relation between the
//! closed forms, the truncated-Fock-space oracle, and the crossover solver,
//! each pinned at its contractual tolerance. One test per guarantee; each
//! prints a PASS line with the measured worst case (visible with
//! `cargo test --test acceptance -- --nocapture`).

use ecs_qfi::closed_forms::{
    ecs_lossless_qfi, ecs_lossy_qfi, ecs_lossy_qfi_approx, ecs_spectral_data, noon_optimal_n,
    noon_qfi,
};
use ecs_qfi::crossover::{critical_point, crossover_roots, CrossoverMode};
use ecs_qfi::fock::{
    build_ecs_rho_analytic, build_noon_rho, build_noon_superposition, choose_cutoff,
    ecs_rho_construction_deviation, ecs_superposition, pure_qfi, BranchBasis, DEFAULT_PHI,
};
use ecs_qfi::model::{ecs_from_alpha_sq, ecs_from_mean_photons, NoonSpec, NoonSuperposition};
use ecs_qfi::qfi::{
    diagonalize_nonorthogonal, ecs_analytic_eigensystem, ecs_sensor_overlap_matrices,
    qfi_spectral, qfi_three_term, EigenSystem, QfiDecomposition,
};
use ecs_qfi::{EcsSpec, GeneratorKind, LossChannel};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

const ALPHA_SQ_GRID: [f64; 7] = [0.5, 1.0, 2.0, 4.0, 9.0, 16.0, 25.0];
const TRANSMISSION_GRID: [f64; 5] = [0.5, 0.8, 0.9, 0.99, 1.0];
const TAIL_TOL: f64 = 1e-12;

fn channel(t: f64) -> LossChannel {
    LossChannel::from_transmission(t).unwrap()
}

fn ecs(alpha_sq: f64) -> EcsSpec {
    ecs_from_alpha_sq(alpha_sq).unwrap()
}

#[test]
fn closed_form_matches_spectral_oracle_on_the_ecs_grid() {
    let mut worst_qfi: f64 = 0.0;
    let mut worst_rho: f64 = 0.0;
    for alpha_sq in ALPHA_SQ_GRID {
        let spec = ecs(alpha_sq);
        let n_max = choose_cutoff(alpha_sq, TAIL_TOL);
        for t in TRANSMISSION_GRID {
            let (rho_dev, _) =
                ecs_rho_construction_deviation(&spec, channel(t), DEFAULT_PHI, TAIL_TOL).unwrap();
            assert!(
                rho_dev <= 1e-10,
                "construction deviation {rho_dev:e} at |α|² = {alpha_sq}, T = {t}"
            );
            worst_rho = worst_rho.max(rho_dev);

            let rho = build_ecs_rho_analytic(&spec, channel(t), DEFAULT_PHI, n_max).unwrap();
            let spectral = qfi_spectral(&rho).unwrap();
            let closed = ecs_lossy_qfi(&spec, channel(t)).total();
            let deviation = (closed - spectral).abs() / closed;
            assert!(
                deviation <= 1e-8,
                "QFI deviation {deviation:e} at |α|² = {alpha_sq}, T = {t}"
            );
            worst_qfi = worst_qfi.max(deviation);
        }
    }
    println!(
        "PASS closed form vs spectral oracle: worst relative {worst_qfi:.2e} (<= 1e-8), \
         worst construction deviation {worst_rho:.2e} (<= 1e-10)"
    );
}

#[test]
fn noon_qfi_power_law_is_exact() {
    let mut worst: f64 = 0.0;
    for n in [1u32, 2, 4, 8, 16] {
        let spec = NoonSpec::new(n).unwrap();
        for t in [0.5, 0.8, 0.9, 1.0] {
            let rho = build_noon_rho(&spec, channel(t), DEFAULT_PHI);
            let spectral = qfi_spectral(&rho).unwrap();
            let exact = noon_qfi(&spec, channel(t));
            let deviation = if exact == 0.0 {
                spectral.abs()
            } else {
                (spectral - exact).abs() / exact
            };
            assert!(deviation <= 1e-10, "N = {n}, T = {t}: deviation {deviation:e}");
            worst = worst.max(deviation);
        }
    }
    println!("PASS NOON power law N²Tᴺ: worst relative {worst:.2e} (<= 1e-10)");
}

#[test]
fn lossless_channel_recovers_the_pure_state_formulas() {
    let mut worst_closed: f64 = 0.0;
    let mut worst_pure: f64 = 0.0;
    for alpha_sq in [0.5, 2.0, 4.0, 9.0, 25.0] {
        let spec = ecs(alpha_sq);
        let lossy_total = ecs_lossy_qfi(&spec, channel(1.0)).total();
        let lossless = ecs_lossless_qfi(&spec);
        let closed_dev = (lossy_total - lossless).abs() / lossless;
        assert!(closed_dev <= 1e-12, "|α|² = {alpha_sq}: {closed_dev:e}");
        worst_closed = worst_closed.max(closed_dev);

        let n_max = choose_cutoff(alpha_sq, TAIL_TOL);
        let state = build_noon_superposition(
            &ecs_superposition(&spec, n_max),
            DEFAULT_PHI,
            GeneratorKind::ModeTwoNumber,
            BranchBasis::new(n_max),
        )
        .unwrap();
        let variance_form = pure_qfi(&state, GeneratorKind::ModeTwoNumber);
        let pure_dev = (lossy_total - variance_form).abs() / lossless;
        assert!(pure_dev <= 1e-10, "|α|² = {alpha_sq}: {pure_dev:e}");
        worst_pure = worst_pure.max(pure_dev);
    }
    println!(
        "PASS lossless reduction: closed-form gap {worst_closed:.2e} (<= 1e-12), \
         pure-variance gap {worst_pure:.2e} (<= 1e-10)"
    );
}

#[test]
fn crossover_roots_land_on_the_reference_values() {
    let moderate = crossover_roots(0.9, CrossoverMode::LargeNApproximation, 1e4).unwrap();
    assert_eq!(moderate.roots.len(), 2, "roots at T = 0.9: {:?}", moderate.roots);
    assert!((moderate.roots[0] - 6.4).abs() <= 0.2);
    assert!((moderate.roots[1] - 23.5).abs() <= 0.2);

    let weak = crossover_roots(0.99, CrossoverMode::LargeNApproximation, 1e4).unwrap();
    assert_eq!(weak.roots.len(), 2, "roots at T = 0.99: {:?}", weak.roots);
    assert!((weak.roots[0] - 14.8).abs() <= 0.3);
    assert!((weak.roots[1] - 561.0).abs() <= 15.0);

    println!(
        "PASS crossover roots: T=0.9 -> ({:.3}, {:.3}) vs (6.4, 23.5) ± 0.2; \
         T=0.99 -> ({:.3}, {:.1}) vs (14.8 ± 0.3, 561 ± 15)",
        moderate.roots[0], moderate.roots[1], weak.roots[0], weak.roots[1]
    );
}

#[test]
fn critical_point_sits_at_the_root_pair_merge() {
    let (t_c, n_c) = critical_point(1e-4).unwrap();
    assert!((t_c - 0.854).abs() <= 0.005, "T_c = {t_c}");
    assert!((n_c - 8.58).abs() <= 0.15, "n̄_c = {n_c}");
    println!("PASS critical point: ({t_c:.4}, {n_c:.3}) vs (0.854 ± 0.005, 8.58 ± 0.15)");
}

#[test]
fn integer_noon_optimum_brackets_the_stationary_point() {
    for t in [0.8, 0.9] {
        let stationary = noon_optimal_n(channel(t)).unwrap();
        let reference = -2.0 / t.ln();
        assert!((stationary - reference).abs() <= 1e-12 * reference);

        let delta_phi = |n: u32| {
            let spec = NoonSpec::new(n).unwrap();
            1.0 / noon_qfi(&spec, channel(t)).sqrt()
        };
        let argmin = (1..=200)
            .min_by(|&a, &b| delta_phi(a).total_cmp(&delta_phi(b)))
            .unwrap();
        let floor = stationary.floor() as u32;
        let ceil = stationary.ceil() as u32;
        assert!(
            argmin == floor || argmin == ceil,
            "T = {t}: argmin {argmin} vs stationary {stationary}"
        );
        println!("PASS NOON optimum at T = {t}: argmin {argmin}, stationary {stationary:.3}");
    }
}

#[test]
fn random_superpositions_stay_sub_heisenberg() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20240917);
    let n_max = 30usize;
    let basis = BranchBasis::new(n_max);
    let mut worst_margin = f64::INFINITY;
    for _ in 0..200 {
        let raw: Vec<Complex64> = (0..=n_max)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let superposition = NoonSuperposition::normalized(raw).unwrap();
        for generator in [GeneratorKind::ModeTwoNumber, GeneratorKind::HalfDifference] {
            let state =
                build_noon_superposition(&superposition, DEFAULT_PHI, generator, basis).unwrap();
            let n_bar = state.mean_photon_number();
            let qfi = pure_qfi(&state, generator);
            let margin = qfi - n_bar * n_bar;
            assert!(margin >= -1e-8, "sub-Heisenberg bound violated: margin {margin:e}");
            worst_margin = worst_margin.min(margin);
        }
    }
    // equality holds exactly on single Fock components
    for n in [0usize, 1, 7, 30] {
        for generator in [GeneratorKind::ModeTwoNumber, GeneratorKind::HalfDifference] {
            let state =
                build_noon_superposition(&NoonSuperposition::single(n), DEFAULT_PHI, generator, basis)
                    .unwrap();
            let gap = (pure_qfi(&state, generator) - (n * n) as f64).abs();
            assert!(gap <= 1e-10, "single component N = {n}: gap {gap:e}");
        }
    }
    println!("PASS sub-Heisenberg bound on 200 draws: smallest F_Q - n̄² = {worst_margin:.3e} (>= -1e-8)");
}

#[test]
fn three_term_decomposition_reproduces_the_exact_closed_form() {
    let mut worst: f64 = 0.0;
    for alpha_sq in ALPHA_SQ_GRID {
        let spec = ecs(alpha_sq);
        let n_max = choose_cutoff(alpha_sq, TAIL_TOL);
        for t in TRANSMISSION_GRID {
            if t == 1.0 {
                continue; // rank drops to one; the subset loses λ₋
            }
            let trajectory =
                ecs_analytic_eigensystem(&spec, channel(t), DEFAULT_PHI, n_max).unwrap();
            let breakdown = qfi_three_term(&trajectory).unwrap();
            let QfiDecomposition::ThreeTerm {
                classical_fisher,
                weighted_pure,
                coupling,
            } = breakdown.decomposition()
            else {
                panic!("three-term output expected")
            };
            assert_eq!(*classical_fisher, 0.0, "weights are φ-independent");
            let closed = ecs_lossy_qfi(&spec, channel(t)).total();
            let deviation = ((weighted_pure - coupling) - closed).abs() / closed;
            assert!(
                deviation <= 1e-8,
                "|α|² = {alpha_sq}, T = {t}: deviation {deviation:e}"
            );
            worst = worst.max(deviation);
        }
    }
    println!("PASS three-term identity: worst relative {worst:.2e} (<= 1e-8)");
}

#[test]
fn deep_loss_regime_reaches_the_classical_scaling() {
    // R·n̄ >= 20 with |α|² <= 60: the spectral QFI collapses onto 2n̄T.
    let mut worst: f64 = 0.0;
    for (alpha_sq, t) in [(60.0, 0.6), (50.0, 0.5), (60.0, 0.66)] {
        let spec = ecs(alpha_sq);
        let lost_photons = (1.0 - t) * spec.mean_photons();
        assert!(lost_photons >= 20.0, "case must sit in the deep-loss regime");
        let n_max = choose_cutoff(alpha_sq, TAIL_TOL);
        let rho = build_ecs_rho_analytic(&spec, channel(t), DEFAULT_PHI, n_max).unwrap();
        let spectral = qfi_spectral(&rho).unwrap();
        let classical = 2.0 * spec.mean_photons() * t;
        let deviation = (spectral - classical).abs() / classical;
        assert!(deviation <= 0.01, "|α|² = {alpha_sq}, T = {t}: deviation {deviation:e}");
        worst = worst.max(deviation);
    }
    println!("PASS deep-loss classical limit 2n̄T: worst relative {worst:.2e} (<= 1e-2)");
}

#[test]
fn generalized_eigenproblem_matches_factored_weights_and_dense_solver() {
    let mut worst: f64 = 0.0;
    for alpha_sq in ALPHA_SQ_GRID {
        let spec = ecs(alpha_sq);
        let n_max = choose_cutoff(alpha_sq, TAIL_TOL);
        for t in TRANSMISSION_GRID {
            let (gram, projected) = ecs_sensor_overlap_matrices(&spec, channel(t));
            let general = diagonalize_nonorthogonal(&gram, &projected).unwrap();
            let data = ecs_spectral_data(&spec, channel(t));

            let rho = build_ecs_rho_analytic(&spec, channel(t), DEFAULT_PHI, n_max).unwrap();
            let dense = EigenSystem::of_density_matrix(&rho).unwrap();

            for (index, expected) in [(0, data.lambda_plus), (1, data.lambda_minus)] {
                let general_dev = (general.eigenvalues[index] - expected).abs();
                let dense_dev = (dense.eigenvalues[index] - expected).abs();
                assert!(general_dev <= 1e-10, "|α|² = {alpha_sq}, T = {t}: {general_dev:e}");
                assert!(dense_dev <= 1e-10, "|α|² = {alpha_sq}, T = {t}: {dense_dev:e}");
                worst = worst.max(general_dev).max(dense_dev);
            }
            // everything below the top two weights is numerically zero
            for &tail in &dense.eigenvalues[2..] {
                assert!(tail.abs() <= 1e-10);
            }
        }
    }
    println!("PASS generalized eigenproblem: worst eigenvalue deviation {worst:.2e} (<= 1e-10)");
}

#[test]
fn large_photon_number_approximation_stays_within_a_percent() {
    let mut worst: f64 = 0.0;
    for t in [0.9, 0.95, 0.99] {
        for n_bar in [10.0, 20.0, 50.0, 100.0, 200.0] {
            let spec = ecs_from_mean_photons(n_bar).unwrap();
            let exact = ecs_lossy_qfi(&spec, channel(t)).total();
            let approx = ecs_lossy_qfi_approx(n_bar, channel(t)).total();
            let deviation = (approx - exact).abs() / exact;
            assert!(deviation <= 1e-2, "T = {t}, n̄ = {n_bar}: deviation {deviation:e}");
            worst = worst.max(deviation);
        }
    }
    println!("PASS large-n̄ approximation: worst relative {worst:.2e} (<= 1e-2)");
}
