use std::f64::consts::{PI, TAU};

use buoyspec::wave_models::{
    depth_attenuation, freq_dir_spectrum, jonswap_sdf, sdf_matrix, spreading_density,
    spreading_shape,
};
use buoyspec::{Param, Parameters, PhysicalContext, SpectralMatrix};
use nalgebra::Matrix3;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A valid θ whose angular width stays at or above 0.1 rad.
fn random_theta(rng: &mut impl Rng) -> Parameters {
    let sigma_l = rng.random_range(0.2..1.5);
    Parameters::new(
        rng.random_range(0.05..2.0),
        rng.random_range(0.3..2.0),
        rng.random_range(1.0..7.0),
        rng.random_range(1.5..6.0),
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..5.0),
        sigma_l,
        rng.random_range(0.0..0.5 * sigma_l),
    )
}

fn omega_grid() -> Vec<f64> {
    (1..=512).map(|i| 4.0 * i as f64 / 512.0).collect()
}

fn min_eigenvalue(m: &SpectralMatrix) -> (f64, f64) {
    let h = Matrix3::from_fn(|i, j| m[(i, j)]);
    let h = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(h).eigenvalues;
    (eig.min(), eig.amax())
}

/// ∫ G Gᴴ S dφ by the periodic trapezoid rule on `k` directions.
fn quadrature_matrix(
    omega: f64,
    theta: &Parameters,
    ctx: &PhysicalContext,
    k: usize,
) -> [[Complex64; 3]; 3] {
    let t = depth_attenuation(omega, ctx).unwrap();
    let mut acc = [[Complex64::new(0.0, 0.0); 3]; 3];
    let h = TAU / k as f64;
    for i in 0..k {
        let phi = i as f64 * h;
        let s = freq_dir_spectrum(omega, phi, theta).unwrap();
        let g = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, phi.cos() / t),
            Complex64::new(0.0, phi.sin() / t),
        ];
        for a in 0..3 {
            for b in 0..3 {
                acc[a][b] += g[a] * g[b].conj() * s * h;
            }
        }
    }
    acc
}

#[test]
fn model_identities_on_random_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let grid = omega_grid();
    let contexts = [
        PhysicalContext::deep_water(),
        PhysicalContext::finite_depth(40.0),
    ];
    for trial in 0..100 {
        let theta = random_theta(&mut rng);
        let ctx = contexts[trial % 2];
        for (i, &w) in grid.iter().enumerate() {
            let f = sdf_matrix(w, &theta, &ctx).unwrap();
            let scale = f[(0, 0)].re.max(f64::MIN_POSITIVE);
            assert!(f.hermitian_defect() <= 1e-14 * scale, "{theta:?} at {w}");
            let (low, top) = min_eigenvalue(&f);
            assert!(
                low >= -1e-12 * top,
                "negative eigenvalue {low} (top {top}) at {w}"
            );
            let t = depth_attenuation(w, &ctx).unwrap();
            let horiz = (f[(1, 1)].re + f[(2, 2)].re) * t * t;
            assert!(
                (f[(0, 0)].re - horiz).abs() <= 1e-13 * scale,
                "trace identity at {w}"
            );
            // The quadrature is the slow part; a subset of frequencies is enough.
            if i % 8 == 0 && scale > 1e-200 {
                let q = quadrature_matrix(w, &theta, &ctx, 1024);
                for a in 0..3 {
                    for b in 0..3 {
                        let err = (q[a][b] - f[(a, b)]).norm();
                        assert!(
                            err <= 1e-6 * scale,
                            "entry ({a},{b}) at {w}: {err} vs {scale}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn spreading_density_integrates_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let theta = random_theta(&mut rng);
        for &w in omega_grid().iter().step_by(4) {
            let k = 2048;
            let total: f64 = (0..k)
                .map(|i| spreading_density(w, i as f64 * TAU / k as f64, &theta).unwrap())
                .sum::<f64>()
                * TAU
                / k as f64;
            assert!((total - 1.0).abs() < 1e-8, "{total} at {w} for {theta:?}");
        }
    }
}

#[test]
fn unimodal_below_the_peak_when_separation_vanishes() {
    let theta = Parameters::scenario1().with(Param::Beta, 0.0);
    for &w in &[0.3, 0.8, 1.5, 3.0] {
        let s = spreading_shape(w, &theta).unwrap();
        assert_eq!(s.phi_s, 0.0);
        assert_eq!(s.phi_m1, s.phi_m2);
    }
}

#[test]
fn jonswap_peaks_at_the_peak_frequency() {
    let theta = Parameters::scenario1();
    let at = |w: f64| jonswap_sdf(w, &theta).unwrap();
    let peak = at(theta.omega_p);
    for d in [1e-3, 1e-2, 0.1] {
        assert!(at(theta.omega_p - d) < peak);
        assert!(at(theta.omega_p + d) < peak);
    }
}

#[test]
fn negative_frequencies_give_the_conjugate_matrix() {
    let theta = Parameters::scenario2();
    let ctx = PhysicalContext::finite_depth(25.0);
    for &w in &[0.2, 0.9, 2.5] {
        let p = sdf_matrix(w, &theta, &ctx).unwrap();
        let m = sdf_matrix(-w, &theta, &ctx).unwrap();
        assert!((m - p.conj()).max_abs() <= 1e-15 * p[(0, 0)].re);
    }
}

#[test]
fn single_precision_agrees_with_double() {
    let theta = Parameters::scenario1();
    let t32 = theta.cast::<f32>();
    let ctx32 = buoyspec::wave_models::PhysicalContext::<f32>::deep_water();
    for &w in &[0.5, 0.8, 1.2, 2.0] {
        let a = sdf_matrix(w, &theta, &PhysicalContext::deep_water()).unwrap();
        let b = sdf_matrix(w as f32, &t32, &ctx32).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let d =
                    (a[(i, j)] - Complex64::new(b[(i, j)].re as f64, b[(i, j)].im as f64)).norm();
                assert!(d <= 1e-4 * a[(0, 0)].re, "({i},{j}) at {w}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heave_spectrum_is_nonnegative_and_scales_with_alpha(
        w in 0.01f64..6.0, scale in 0.1f64..10.0, seed in any::<u64>()
    ) {
        let theta = random_theta(&mut ChaCha8Rng::seed_from_u64(seed));
        let f = jonswap_sdf(w, &theta).unwrap();
        prop_assert!(f >= 0.0);
        let g = jonswap_sdf(w, &theta.with(Param::Alpha, theta.alpha * scale)).unwrap();
        prop_assert!((g - scale * f).abs() <= 1e-12 * g.abs().max(1e-300));
    }

    #[test]
    fn spreading_is_periodic_and_nonnegative(w in 0.05f64..5.0, phi in -10.0f64..10.0, seed in any::<u64>()) {
        let theta = random_theta(&mut ChaCha8Rng::seed_from_u64(seed));
        let a = spreading_density(w, phi, &theta).unwrap();
        let b = spreading_density(w, phi + TAU, &theta).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-12));
    }

    #[test]
    fn rotating_the_mean_direction_rotates_the_spreading(w in 0.05f64..5.0, phi in 0.0f64..TAU, shift in 0.0f64..PI, seed in any::<u64>()) {
        let theta = random_theta(&mut ChaCha8Rng::seed_from_u64(seed));
        let rotated = theta.with(Param::PhiM, (theta.phi_m + shift) % TAU);
        let a = spreading_density(w, phi, &theta).unwrap();
        let b = spreading_density(w, phi + shift, &rotated).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
    }
}
