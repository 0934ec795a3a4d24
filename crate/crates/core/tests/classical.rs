use std::f64::consts::{PI, TAU};

use buoyspec::classical::*;
use buoyspec::inference::{periodogram, SeaStateSample};
use buoyspec::wave_models::{jonswap_sdf, sdf_matrix, spreading_density, spreading_shape};
use buoyspec::{Parameters, PhysicalContext, SpectralMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

fn white_sample(n: usize, delta: f64, seed: u64) -> SeaStateSample {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|_| {
            [
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            ]
        })
        .collect();
    SeaStateSample::new(rows, delta, None).unwrap()
}

fn model_matrices(
    omegas: &[f64],
    theta: &Parameters,
    ctx: &PhysicalContext,
) -> Vec<SpectralMatrix> {
    omegas
        .iter()
        .map(|&w| sdf_matrix(w, theta, ctx).unwrap())
        .collect()
}

fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .collect()
}

#[test]
fn white_noise_estimates_are_flat_at_the_variance_level() {
    let delta = 0.78125;
    let level = delta / TAU;
    let reps = 100;
    for method in [
        SpectralMethod::Multitaper { tapers: 8 },
        SpectralMethod::Welch { segment_len: 128 },
    ] {
        let mut diag = [0.0; 3];
        let mut cross = num_complex::Complex64::new(0.0, 0.0);
        let mut count = 0.0;
        for rep in 0..reps {
            let est = cross_spectra(&white_sample(1024, delta, rep), method).unwrap();
            let len = est.values.len();
            for m in &est.values[len / 8..len - len / 8] {
                for c in 0..3 {
                    diag[c] += m[(c, c)].re;
                }
                cross += m[(1, 0)];
                count += 1.0;
            }
        }
        for d in diag {
            let avg = d / count;
            assert!(
                (avg / level - 1.0).abs() < 0.1,
                "{method:?}: {avg} vs {level}"
            );
        }
        // Independent channels: the cross-spectrum averages out.
        assert!(cross.norm() / count < 0.05 * level, "{method:?}");
    }
}

#[test]
fn rectangular_estimate_matches_the_periodogram() {
    let s = white_sample(300, 0.5, 3);
    let est = cross_spectra(&s, SpectralMethod::Rectangular).unwrap();
    let p = periodogram(&s);
    for (k, m) in est.values.iter().enumerate() {
        let diff = (*m - *p.at(k as isize)).max_abs();
        assert!(diff < 1e-12 * (1.0 + p.at(k as isize).max_abs()), "k={k}");
    }
}

#[test]
fn estimates_integrate_to_the_sample_covariance() {
    let s = white_sample(2048, 1.0, 11).demeaned();
    let mom = s.second_moments();
    for method in [
        SpectralMethod::Rectangular,
        SpectralMethod::Multitaper { tapers: 8 },
        SpectralMethod::Welch { segment_len: 256 },
    ] {
        let est = cross_spectra(&s, method).unwrap();
        let total = est.integrated();
        for c in 0..3 {
            let rel = (total[c][c] / mom[c][c] - 1.0).abs();
            assert!(rel < 0.02, "{method:?} channel {c}: {rel}");
        }
    }
}

#[test]
fn invalid_settings_are_rejected() {
    let s = white_sample(64, 1.0, 1);
    assert!(cross_spectra(&s, SpectralMethod::Multitaper { tapers: 40 }).is_err());
    assert!(cross_spectra(&s, SpectralMethod::Multitaper { tapers: 0 }).is_err());
    assert!(cross_spectra(&s, SpectralMethod::Welch { segment_len: 128 }).is_err());
}

#[test]
fn coefficients_reproduce_closed_forms_on_model_matrices() {
    let theta = Parameters::scenario1();
    for ctx in [
        PhysicalContext::deep_water(),
        PhysicalContext::finite_depth(40.0),
    ] {
        let omegas = grid(0.4, 3.0, 60);
        let c = coefficients_from_matrices(&omegas, &model_matrices(&omegas, &theta, &ctx), &ctx)
            .unwrap();
        for (k, &w) in omegas.iter().enumerate() {
            let sh = spreading_shape(w, &theta).unwrap();
            let m1 = (0.5 * sh.phi_s).cos() * (-0.5 * sh.sigma_w * sh.sigma_w).exp();
            let m2 = sh.phi_s.cos() * (-2.0 * sh.sigma_w * sh.sigma_w).exp();
            assert!((c.a1[k] - theta.phi_m.cos() * m1).abs() < 1e-10);
            assert!((c.b1[k] - theta.phi_m.sin() * m1).abs() < 1e-10);
            assert!((c.a2[k] - (2.0 * theta.phi_m).cos() * m2).abs() < 1e-10);
            assert!((c.b2[k] - (2.0 * theta.phi_m).sin() * m2).abs() < 1e-10);
            assert!(c.a1[k].hypot(c.b1[k]) <= 1.0);
        }
        assert!(c.unit_violations(1e-12).is_empty());
    }
}

#[test]
fn unidirectional_model_gives_unit_first_coefficient() {
    let theta = Parameters {
        phi_m: 0.0,
        beta: 0.0,
        sigma_l: 0.0,
        sigma_r: 0.0,
        ..Parameters::scenario1()
    };
    let ctx = PhysicalContext::deep_water();
    let omegas = [0.6, 0.8, 1.2];
    let c =
        coefficients_from_matrices(&omegas, &model_matrices(&omegas, &theta, &ctx), &ctx).unwrap();
    for k in 0..3 {
        assert!((c.a1[k] - 1.0).abs() < 1e-12);
        assert!(c.b1[k].abs() < 1e-12);
    }
}

#[test]
fn coefficients_below_the_heave_floor_are_undefined() {
    let ctx = PhysicalContext::deep_water();
    let theta = Parameters::scenario1();
    // The JONSWAP form vanishes at low frequency far below the floor.
    let omegas = [0.05, 0.8];
    let c =
        coefficients_from_matrices(&omegas, &model_matrices(&omegas, &theta, &ctx), &ctx).unwrap();
    assert!(!c.is_defined(0));
    assert!(c.is_defined(1));
}

#[test]
fn directional_estimates_are_normalised_and_nonnegative() {
    let theta = Parameters::scenario1();
    let ctx = PhysicalContext::deep_water();
    let omegas = grid(0.6, 2.5, 20);
    let mats = model_matrices(&omegas, &theta, &ctx);
    let mlm = mlm_from_matrices(&omegas, &mats, &ctx, 90).unwrap();
    let mem = mem_spreading(
        &coefficients_from_matrices(&omegas, &mats, &ctx).unwrap(),
        90,
    );
    for d in [&mlm, &mem] {
        for slice in d.density.iter() {
            let slice = slice.as_ref().unwrap();
            assert!(slice.iter().all(|&v| v >= 0.0));
            let total: f64 = slice.iter().sum::<f64>() * d.step();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn unidirectional_input_concentrates_at_the_mean_direction() {
    let phi_m = 1.3;
    let theta = Parameters {
        phi_m,
        beta: 0.0,
        sigma_l: 0.05,
        sigma_r: 0.0,
        ..Parameters::scenario1()
    };
    let ctx = PhysicalContext::deep_water();
    let omegas = [0.7, 1.0, 1.5];
    let mats = model_matrices(&omegas, &theta, &ctx);
    let count = 120;
    let cell = TAU / count as f64;
    let mlm = mlm_from_matrices(&omegas, &mats, &ctx, count).unwrap();
    let mem = mem_spreading(
        &coefficients_from_matrices(&omegas, &mats, &ctx).unwrap(),
        count,
    );
    for d in [&mlm, &mem] {
        for slice in &d.density {
            let slice = slice.as_ref().unwrap();
            let (arg, _) =
                slice
                    .iter()
                    .enumerate()
                    .fold((0, f64::MIN), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
            let err = ((d.directions[arg] - phi_m + PI).rem_euclid(TAU) - PI).abs();
            assert!(err <= cell, "mode at {} vs {phi_m}", d.directions[arg]);
        }
    }
}

#[test]
fn mem_modes_are_at_least_as_high_as_the_truth() {
    let theta = Parameters::scenario1();
    let ctx = PhysicalContext::deep_water();
    let omegas = grid(0.7, 1.6, 10);
    let mats = model_matrices(&omegas, &theta, &ctx);
    let mem = mem_spreading(
        &coefficients_from_matrices(&omegas, &mats, &ctx).unwrap(),
        180,
    );
    for (k, &w) in omegas.iter().enumerate() {
        let est_peak = mem.density[k]
            .as_ref()
            .unwrap()
            .iter()
            .cloned()
            .fold(0.0, f64::max);
        let true_peak = mem
            .directions
            .iter()
            .map(|&phi| spreading_density(w, phi, &theta).unwrap())
            .fold(0.0, f64::max);
        assert!(est_peak >= true_peak, "omega={w}: {est_peak} < {true_peak}");
    }
}

#[test]
fn ls_marginal_fit_recovers_noise_free_parameters() {
    let truth = Parameters::scenario1();
    let omegas = grid(0.3, 3.0, 200);
    let est: Vec<f64> = omegas
        .iter()
        .map(|&w| jonswap_sdf(w, &truth).unwrap())
        .collect();
    let init = Parameters {
        alpha: 0.5,
        omega_p: 0.9,
        gamma: 2.0,
        r: 4.0,
        ..truth
    };
    for scale in [ResidualScale::Linear, ResidualScale::Log] {
        let fit = ls_marginal_fit(&est, &omegas, &init, scale).unwrap();
        for (got, want) in [
            (fit.alpha, truth.alpha),
            (fit.omega_p, truth.omega_p),
            (fit.gamma, truth.gamma),
            (fit.r, truth.r),
        ] {
            assert!(
                (got / want - 1.0).abs() < 1e-4,
                "{scale:?}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn ls_marginal_fit_depends_on_the_band() {
    let truth = Parameters::scenario1();
    // A spectrum with extra low-frequency energy the model cannot follow.
    let omegas = grid(0.3, 3.0, 200);
    let top = jonswap_sdf(truth.omega_p, &truth).unwrap();
    let est: Vec<f64> = omegas
        .iter()
        .map(|&w| jonswap_sdf(w, &truth).unwrap() + top * (-((w - 0.45) / 0.08).powi(2)).exp())
        .collect();
    let wide = ls_marginal_fit(&est, &omegas, &truth, ResidualScale::Linear).unwrap();
    let keep: Vec<usize> = (0..omegas.len()).filter(|&k| omegas[k] >= 0.6).collect();
    let narrow_w: Vec<f64> = keep.iter().map(|&k| omegas[k]).collect();
    let narrow_e: Vec<f64> = keep.iter().map(|&k| est[k]).collect();
    let narrow = ls_marginal_fit(&narrow_e, &narrow_w, &truth, ResidualScale::Linear).unwrap();
    assert!((narrow.omega_p / truth.omega_p - 1.0).abs() < 0.01);
    assert!((narrow.alpha / truth.alpha - 1.0).abs() < 0.01);
    assert!((wide.alpha / narrow.alpha - 1.0).abs() > 0.1);
    assert!((wide.r / narrow.r - 1.0).abs() > 0.1);
}

fn true_distribution(theta: &Parameters, omegas: &[f64], count: usize) -> DirectionalDistribution {
    let directions = direction_grid(count);
    let density = omegas
        .iter()
        .map(|&w| {
            Some(
                directions
                    .iter()
                    .map(|&phi| spreading_density(w, phi, theta).unwrap())
                    .collect(),
            )
        })
        .collect();
    DirectionalDistribution {
        omegas: omegas.to_vec(),
        directions,
        density,
    }
}

#[test]
fn ls_spreading_fit_recovers_the_true_distribution() {
    let truth = Parameters::scenario1();
    let dhat = true_distribution(&truth, &grid(0.6, 2.5, 40), 72);
    let start = Parameters {
        beta: 3.0,
        nu: 2.0,
        sigma_l: 0.45,
        sigma_r: 0.15,
        ..truth
    };
    let fit = ls_spreading_fit(&dhat, &start).unwrap();
    let got = fit.apply(&truth);
    for (g, w) in [
        (got.phi_m, truth.phi_m),
        (got.beta, truth.beta),
        (got.nu, truth.nu),
        (got.sigma_l, truth.sigma_l),
        (got.sigma_r, truth.sigma_r),
    ] {
        assert!((g / w - 1.0).abs() < 1e-3, "{g} vs {w}");
    }
    assert!(fit.objective < 1e-10);
}

#[test]
fn moments_matching_recovers_shape_parameters_from_exact_coefficients() {
    let ctx = PhysicalContext::deep_water();
    for truth in [Parameters::scenario1(), Parameters::scenario2()] {
        let omegas = grid(0.6, 3.0, 120);
        let mats = model_matrices(&omegas, &truth, &ctx);
        let coeffs = coefficients_from_matrices(&omegas, &mats, &ctx).unwrap();
        let energy: Vec<f64> = mats.iter().map(|m| m[(0, 0)].re).collect();
        let keep: Vec<usize> = (0..omegas.len()).collect();
        let start = Parameters {
            beta: 3.0,
            nu: 2.0,
            sigma_l: 0.45,
            sigma_r: 0.15,
            ..truth
        };
        let fit = moments_matching_from_coefficients(&coeffs, &energy, &keep, &start).unwrap();
        let s = fit.spreading;
        assert!(((s.phi_m - truth.phi_m + PI).rem_euclid(TAU) - PI).abs() < 1e-3);
        assert!((s.beta / truth.beta - 1.0).abs() < 0.01);
        assert!((s.nu / truth.nu - 1.0).abs() < 0.01);
        assert!((s.sigma_l / truth.sigma_l - 1.0).abs() < 0.01);
        if truth.sigma_r > 0.0 {
            assert!((s.sigma_r / truth.sigma_r - 1.0).abs() < 0.01);
        } else {
            assert!(s.sigma_r < 1e-3, "sigma_r = {}", s.sigma_r);
        }
    }
}

#[test]
fn stage_one_inverts_the_coefficient_map() {
    let (centre, sep, sigma) = (0.7, 1.1, 0.4);
    let c = |n: f64| {
        num_complex::Complex64::from_polar(
            (0.5 * n * sep).cos() * (-0.5 * n * n * sigma * sigma).exp(),
            n * centre,
        )
    };
    let est = fit_stage_one(1.0, c(1.0), c(2.0)).unwrap();
    assert!((est.centre - centre).abs() < 1e-5);
    assert!((est.separation - sep).abs() < 1e-5);
    assert!((est.sigma - sigma).abs() < 1e-5);
}

#[test]
fn error_function_vanishes_on_model_matrices() {
    let theta = Parameters::scenario1();
    let omegas = grid(0.3, 3.0, 80);
    for ctx in [
        PhysicalContext::deep_water(),
        PhysicalContext::finite_depth(40.0),
    ] {
        let r = error_function(&omegas, &model_matrices(&omegas, &theta, &ctx), &ctx).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-12), "{r:?}");
    }
}

#[test]
fn error_function_is_negative_when_the_matrices_ignore_finite_depth() {
    let theta = Parameters::scenario1();
    let omegas = [0.3, 0.4, 0.5];
    let deep = model_matrices(&omegas, &theta, &PhysicalContext::deep_water());
    let r = error_function(&omegas, &deep, &PhysicalContext::finite_depth(40.0)).unwrap();
    for (w, v) in omegas.iter().zip(r) {
        assert!(v < -1e-3, "omega={w}: {v}");
    }
}

#[test]
fn mean_direction_follows_the_model_direction() {
    let theta = Parameters {
        phi_m: 5.5,
        ..Parameters::scenario1()
    };
    let ctx = PhysicalContext::deep_water();
    let omegas = grid(0.6, 1.5, 10);
    let dir = mean_direction(&omegas, &model_matrices(&omegas, &theta, &ctx), &ctx).unwrap();
    for d in dir {
        assert!((0.0..TAU).contains(&d));
        assert!((d - 5.5).abs() < 1e-10);
    }
}

#[test]
fn significant_wave_height_of_a_sinusoid() {
    let a = 1.7;
    let n = 4000;
    let z: Vec<f64> = (0..n).map(|t| a * (TAU * t as f64 / 40.0).sin()).collect();
    let x: Vec<f64> = (0..n).map(|t| (t as f64 * 0.37).cos()).collect();
    let y: Vec<f64> = (0..n).map(|t| (t as f64 * 0.11).sin()).collect();
    let s = SeaStateSample::from_columns(&z, &x, &y, 0.5).unwrap();
    let d = diagnostics(
        &s,
        SpectralMethod::default(),
        &PhysicalContext::deep_water(),
    )
    .unwrap();
    assert!((d.hs - 4.0 * a / 2f64.sqrt()).abs() < 1e-9);
    assert_eq!(d.omegas.len(), d.error_fn.len());
}

#[test]
fn estimators_are_deterministic() {
    let s = white_sample(512, 1.0, 5);
    let a = cross_spectra(&s, SpectralMethod::default()).unwrap();
    let b = cross_spectra(&s, SpectralMethod::default()).unwrap();
    assert_eq!(a, b);
    let ctx = PhysicalContext::deep_water();
    assert_eq!(
        mlm_spreading(&a, &ctx, 36).unwrap(),
        mlm_spreading(&b, &ctx, 36).unwrap()
    );
}
