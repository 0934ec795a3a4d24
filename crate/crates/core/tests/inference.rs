use buoyspec::discrete_sampling::{
    aliased_sdf_matrix, expected_periodogram, expected_periodogram_gradient,
};
use buoyspec::inference::*;
use buoyspec::simulation::{SimulationMethod, Simulator};
use buoyspec::wave_models::{sdf_matrix, sdf_matrix_gradient};
use buoyspec::{
    FrequencySelection, Param, Parameters, PhysicalContext, SamplingScheme, SpectralMatrix,
    N_PARAMS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Interior points near a scenario: every coordinate moved by up to 20%,
/// with γ, σ_r and β kept away from their bounds.
fn interior_near(base: &Parameters, rng: &mut impl Rng) -> Parameters {
    let mut v = base.to_array();
    for x in v.iter_mut() {
        *x *= 1.0 + rng.random_range(-0.2..0.2);
    }
    v[Param::Gamma as usize] = v[Param::Gamma as usize].max(1.2 + rng.random_range(0.0..0.5));
    v[Param::SigmaR as usize] = v[Param::SigmaR as usize].max(0.05 + rng.random_range(0.0..0.1));
    v[Param::Beta as usize] = v[Param::Beta as usize].clamp(0.5, 6.0);
    Parameters::from_array(v)
}

fn scenarios() -> [Parameters; 3] {
    [
        Parameters::scenario1(),
        Parameters::scenario2(),
        Parameters::scenario3(),
    ]
}

fn step(x: f64) -> f64 {
    1e-5 * x.abs().max(0.1)
}

fn central<T>(
    theta: &Parameters,
    p: usize,
    f: impl Fn(&Parameters) -> T,
    diff: impl Fn(&T, &T, f64) -> T,
) -> T {
    let v = theta.to_array();
    let h = step(v[p]);
    let mut up = v;
    let mut down = v;
    up[p] += h;
    down[p] -= h;
    diff(
        &f(&Parameters::from_array(up)),
        &f(&Parameters::from_array(down)),
        2.0 * h,
    )
}

fn sample_for(theta: &Parameters, n: usize, seed: u64) -> SeaStateSample {
    let scheme = SamplingScheme::new(0.78125, n);
    Simulator::new(
        theta,
        &PhysicalContext::deep_water(),
        &scheme,
        SimulationMethod::SpectralApproximation,
        4,
    )
    .unwrap()
    .sample(seed, 0)
    .unwrap()
}

#[test]
fn spectral_density_gradient_matches_finite_differences() {
    let ctx = PhysicalContext::finite_depth(40.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for base in scenarios() {
        for _ in 0..5 {
            let theta = interior_near(&base, &mut rng);
            // Far below the peak the spectrum is of order exp(-100) and the
            // difference quotient itself loses accuracy.
            for w in [0.7, 0.9, 1.2, 2.5].map(|u| u * theta.omega_p) {
                let g = sdf_matrix_gradient(w, &theta, &ctx).unwrap();
                let scale = g.iter().map(|m| m.max_abs()).fold(0.0, f64::max);
                for p in 0..N_PARAMS {
                    let fd = central(
                        &theta,
                        p,
                        |t| sdf_matrix(w, t, &ctx).unwrap(),
                        |a, b, h| (*a - *b).scale(1.0 / h),
                    );
                    let err = (fd - g[p]).max_abs();
                    assert!(
                        err <= 1e-5 * g[p].max_abs().max(1e-3 * scale),
                        "{} at {w}: {err}",
                        Param::ALL[p].name()
                    );
                }
            }
        }
    }
}

#[test]
fn expected_periodogram_gradient_matches_finite_differences() {
    let ctx = PhysicalContext::deep_water();
    let scheme = SamplingScheme::new(0.78125, 256);
    let sel = FrequencySelection::band(256, 0.78125, 0.3, 4.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for base in scenarios() {
        for _ in 0..3 {
            let theta = interior_near(&base, &mut rng);
            let grads = expected_periodogram_gradient(&theta, &ctx, &scheme, &sel).unwrap();
            let value =
                |t: &Parameters| expected_periodogram(t, &ctx, &scheme, &sel).unwrap().values;
            for p in 0..N_PARAMS {
                let fd = central(&theta, p, value, |a: &Vec<SpectralMatrix>, b, h| {
                    a.iter()
                        .zip(b)
                        .map(|(x, y)| (*x - *y).scale(1.0 / h))
                        .collect()
                });
                let scale = grads.iter().map(|g| g[p].max_abs()).fold(0.0, f64::max);
                let err = fd
                    .iter()
                    .zip(&grads)
                    .map(|(f, g)| (*f - g[p]).max_abs())
                    .fold(0.0, f64::max);
                assert!(
                    err <= 1e-5 * scale,
                    "{}: {err} vs {scale}",
                    Param::ALL[p].name()
                );
            }
        }
    }
}

#[test]
fn likelihood_gradients_match_finite_differences() {
    let ctx = PhysicalContext::deep_water();
    let n = 512;
    let scheme = SamplingScheme::new(0.78125, n);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (s, base) in scenarios().iter().enumerate() {
        // Below about 0.6 ω_p the model determinant underflows.
        let sel = FrequencySelection::band(n, 0.78125, 0.75 * base.omega_p, 4.0).unwrap();
        let pgram = periodogram(&sample_for(base, n, s as u64).demeaned());
        for _ in 0..3 {
            let theta = interior_near(base, &mut rng);
            for debiased in [false, true] {
                let (v, g) = if debiased {
                    debiased_whittle_loglik_with_gradient(&pgram, &theta, &ctx, &scheme, &sel)
                        .unwrap()
                } else {
                    whittle_loglik_with_gradient(&pgram, &theta, &ctx, &scheme, &sel).unwrap()
                };
                let f = |t: &Parameters| {
                    if debiased {
                        debiased_whittle_loglik(&pgram, t, &ctx, &scheme, &sel).unwrap()
                    } else {
                        whittle_loglik(&pgram, t, &ctx, &scheme, &sel).unwrap()
                    }
                };
                assert!(
                    (f(&theta) - v).abs() <= 1e-12 * v.abs(),
                    "{} vs {v}",
                    f(&theta)
                );
                let scale = g.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                for p in 0..N_PARAMS {
                    let fd = central(&theta, p, f, |a, b, h| (a - b) / h);
                    assert!(
                        (fd - g[p]).abs() <= 1e-5 * g[p].abs().max(1e-3 * scale),
                        "{} (debiased {debiased}): {fd} vs {}",
                        Param::ALL[p].name(),
                        g[p]
                    );
                }
            }
        }
    }
}

fn naive_loglik(pgram: &Periodogram, models: &[SpectralMatrix], sel: &FrequencySelection) -> f64 {
    sel.indices()
        .iter()
        .zip(models)
        .map(|(&j, m)| {
            let inv = m.inverse().unwrap();
            -sel.weight(j) * (m.determinant().re.ln() + inv.trace_of_product(pgram.at(j)).re)
        })
        .sum()
}

#[test]
fn likelihoods_match_a_direct_sum() {
    let ctx = PhysicalContext::deep_water();
    let n = 384;
    let scheme = SamplingScheme::new(0.78125, n);
    let sel = FrequencySelection::band(n, 0.78125, 0.45, 3.5).unwrap();
    let theta = Parameters::scenario1();
    let pgram = periodogram(&sample_for(&theta, n, 9).demeaned());
    let probe = theta.with(Param::Gamma, 2.5).with(Param::SigmaL, 0.6);

    let expected = expected_periodogram(&probe, &ctx, &scheme, &sel)
        .unwrap()
        .values;
    let dw = debiased_whittle_loglik(&pgram, &probe, &ctx, &scheme, &sel).unwrap();
    let oracle = naive_loglik(&pgram, &expected, &sel);
    assert!(
        (dw - oracle).abs() <= 1e-10 * oracle.abs(),
        "{dw} vs {oracle}"
    );

    let model: Vec<SpectralMatrix> = sel
        .indices()
        .iter()
        .map(|&j| aliased_sdf_matrix(sel.omega(j), &probe, &ctx, &scheme).unwrap())
        .collect();
    let w = whittle_loglik(&pgram, &probe, &ctx, &scheme, &sel).unwrap();
    let oracle = naive_loglik(&pgram, &model, &sel);
    assert!(
        (w - oracle).abs() <= 1e-10 * oracle.abs(),
        "{w} vs {oracle}"
    );
    for (j, m) in sel.indices().iter().zip(&model) {
        assert!((*m - sdf_matrix(sel.omega(*j), &probe, &ctx).unwrap()).max_abs() == 0.0);
    }
}

#[test]
fn negative_frequency_selection_gives_the_same_likelihood() {
    let ctx = PhysicalContext::deep_water();
    let n = 256;
    let scheme = SamplingScheme::new(0.78125, n);
    let sel = FrequencySelection::band(n, 0.78125, 0.3, 4.0).unwrap();
    let theta = Parameters::scenario2();
    let pgram = periodogram(&sample_for(&theta, n, 4).demeaned());
    let a = debiased_whittle_loglik(&pgram, &theta, &ctx, &scheme, &sel).unwrap();
    let b = debiased_whittle_loglik(&pgram, &theta, &ctx, &scheme, &sel.negated()).unwrap();
    assert!((a - b).abs() <= 1e-10 * a.abs(), "{a} vs {b}");
}

#[test]
fn periodogram_satisfies_parseval() {
    let sample = sample_for(&Parameters::scenario1(), 500, 2).demeaned();
    let pg = periodogram(&sample);
    let n = sample.len() as f64;
    let dw = 2.0 * std::f64::consts::PI / (n * sample.delta());
    let m = sample.second_moments();
    for c in 0..3 {
        let total: f64 = pg.indices().map(|j| pg.at(j)[(c, c)].re).sum::<f64>() * dw;
        assert!(
            (total - m[c][c]).abs() <= 1e-12 * m[c][c],
            "channel {c}: {total} vs {}",
            m[c][c]
        );
    }
}

#[test]
fn fisher_information_is_symmetric_positive_definite() {
    let ctx = PhysicalContext::deep_water();
    let scheme = SamplingScheme::new(0.78125, 512);
    let sel = FrequencySelection::band(512, 0.78125, 0.5, 4.0).unwrap();
    let info = expected_fisher(&Parameters::scenario1(), &ctx, &scheme, &sel).unwrap();
    let m = nalgebra::DMatrix::from_fn(N_PARAMS, N_PARAMS, |i, j| info.matrix[i][j]);
    assert!((&m - m.transpose()).amax() <= 1e-10 * m.amax());
    assert!(m.cholesky().is_some());
    assert!(info.condition_number.is_finite() && info.condition_number > 1.0);
}

#[test]
fn debiased_fit_recovers_scenario_one() {
    let theta = Parameters::scenario1();
    let sample = sample_for(&theta, 2304, 17);
    let cfg = FitConfig::default().with_band(0.5, std::f64::consts::PI / 0.78125);
    let fit = fit(&sample, &cfg).unwrap();
    assert!(fit.converged, "{}", fit.message);
    let est = fit.theta_hat.to_array();
    let truth = theta.to_array();
    for i in 0..N_PARAMS {
        let d = if i == Param::PhiM as usize {
            (est[i] - truth[i] + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU)
                - std::f64::consts::PI
        } else {
            est[i] - truth[i]
        };
        assert!(
            d.abs() < 4.0 * fit.std_errors[i],
            "{}: {} vs {} (se {})",
            Param::ALL[i].name(),
            est[i],
            truth[i],
            fit.std_errors[i]
        );
        assert!(fit.ci95[i][0] < est[i] && est[i] < fit.ci95[i][1]);
    }
    assert!(fit.boundary_flags.iter().all(|&b| !b));
    let again = buoyspec::inference::fit(&sample, &cfg).unwrap();
    assert_eq!(fit, again);
}

#[test]
fn starting_values_are_in_the_parameter_space() {
    for (s, theta) in scenarios().iter().enumerate() {
        let sample = sample_for(theta, 2304, 30 + s as u64).demeaned();
        let pg = periodogram(&sample);
        let sel = FrequencySelection::band(2304, 0.78125, 0.4, 4.0).unwrap();
        let init = initial_parameters(&pg, &sel).unwrap();
        init.validate().unwrap();
        assert!(
            (init.omega_p / theta.omega_p - 1.0).abs() < 0.15,
            "{} vs {}",
            init.omega_p,
            theta.omega_p
        );
    }
}

#[test]
fn invalid_configurations_are_rejected() {
    let sample = sample_for(&Parameters::scenario1(), 256, 1);
    assert!(fit(&sample, &FitConfig::default().with_band(3.0, 2.0)).is_err());
    assert!(fit(&sample, &FitConfig::default().with_band(5.0, 6.0)).is_err());
    assert!(SeaStateSample::new(vec![[0.0, 1.0, f64::NAN]; 10], 1.0, None).is_err());
    assert!(SeaStateSample::new(vec![[0.0, 1.0, 2.0]; 10], 1.0, None).is_err());
}
