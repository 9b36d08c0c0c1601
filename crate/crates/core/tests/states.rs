use approx::assert_relative_eq;
use num_complex::Complex;
use proptest::prelude::*;
use quasibeam_core::state::{incoherent_pair_quasidist, superposition_wavefield};
use quasibeam_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn axis_grid_examples() {
    let g = AxisGrid64::new(8, 8.0, 0.0).unwrap();
    assert_eq!(g.spacing(), 1.0);
    assert_eq!(g.points(), vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    let g = AxisGrid64::new(16, 1.0, 0.5).unwrap();
    assert_eq!(g.spacing(), 0.0625);
    assert_eq!(g.point(0), 0.0);
    assert_eq!(AxisGrid64::new(12, 1.0, 0.0), Err(Error::InvalidPointCount { n: 12 }));
    assert!(matches!(
        AxisGrid64::new(16, 0.0, 0.0),
        Err(Error::NonPositiveLength { .. })
    ));
}

#[test]
fn gaussian_wavefield_normalized_with_expected_moments() {
    let g = AxisGrid64::new(256, 24.0, 0.0).unwrap();
    let psi = gaussian_wavefield(g, 1.0, 0.0, 0.0, 0.1).unwrap();
    assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);

    // independent oracle: fine Simpson quadrature of the closed-form density
    let density = |x: f64| (-(x * x) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let var = simpson(|x| x * x * density(x), -12.0, 12.0, 20_000);
    let m = moments_of(&psi).unwrap();
    assert!((m.sigma_x - var.sqrt()).abs() < 1e-9);
    assert!((m.sigma_p - 0.05).abs() < 1e-9);

    let psi = gaussian_wavefield(g, 1.0, 0.5, 0.2, 0.1).unwrap();
    let shifted = |x: f64| density(x - 0.5);
    let mean = simpson(|x| x * shifted(x), -12.0, 12.0, 20_000);
    let m = moments_of(&psi).unwrap();
    assert!((m.mean_x - mean).abs() < 1e-9);
    assert!((m.mean_p - 0.2).abs() < 1e-9);
}

#[test]
fn wavefield_rejects_leaky_grid() {
    let g = AxisGrid64::new(64, 6.0, 0.0).unwrap();
    assert!(matches!(
        gaussian_wavefield(g, 1.0, 0.0, 0.0, 0.1),
        Err(Error::GridTooNarrow { .. })
    ));
}

#[test]
fn wavefield_constructor_validates() {
    let g = AxisGrid64::new(8, 8.0, 0.0).unwrap();
    let zero = vec![Complex::new(0.0, 0.0); 8];
    assert!(WaveField::new(g, zero.clone(), 0.0, 0.0).is_err());
    assert!(WaveField::new(g, zero[..4].to_vec(), 0.1, 0.0).is_err());
}

#[test]
fn quasidist_emittance_examples() {
    let grid = PhaseGrid::new(
        AxisGrid64::new(256, 20.0, 0.0).unwrap(),
        AxisGrid64::new(128, 1.0, 0.0).unwrap(),
    );
    let rho = gaussian_quasidist(grid, 1.0, 0.05, 0.0, 0.0, 0.0).unwrap();
    let m = moments_of(&rho).unwrap();
    assert_relative_eq!(m.emittance_rms, 0.1, max_relative = 1e-9);

    let rho = gaussian_quasidist(grid, 1.0, 0.05, 0.03, 0.0, 0.0).unwrap();
    let m = moments_of(&rho).unwrap();
    let oracle = 2.0 * (1.0f64 * 0.0025 - 0.0009).sqrt();
    assert!((oracle - 0.08).abs() < 1e-15);
    assert!((m.emittance_rms - oracle).abs() < 1e-9);

    assert!(matches!(
        gaussian_quasidist(grid, 1.0, 0.05, 0.06, 0.0, 0.0),
        Err(Error::NotPositiveDefinite { .. })
    ));
}

#[test]
fn quasidist_moments_on_wide_fine_grid() {
    let (sx, sp, sxp) = (0.7, 0.11, 0.03);
    let grid = PhaseGrid::new(
        AxisGrid64::new(512, 16.0 * sx, 0.0).unwrap(),
        AxisGrid64::new(512, 16.0 * sp, 0.0).unwrap(),
    );
    let rho = gaussian_quasidist(grid, sx, sp, sxp, 0.0, 0.0).unwrap();
    let m = moments_of(&rho).unwrap();
    assert_relative_eq!(m.sigma_x, sx, max_relative = 1e-6);
    assert_relative_eq!(m.sigma_p, sp, max_relative = 1e-6);
    assert_relative_eq!(m.sigma_xp, sxp, max_relative = 1e-6);
}

fn sampling_grid() -> PhaseGrid<f64> {
    PhaseGrid::new(
        AxisGrid64::new(512, 20.0, 0.0).unwrap(),
        AxisGrid64::new(256, 1.0, 0.0).unwrap(),
    )
}

#[test]
fn sampled_rays_match_width() {
    let rho = gaussian_quasidist(sampling_grid(), 1.0, 0.05, 0.0, 0.0, 0.0).unwrap();
    let n = 100_000;
    let rays = sample_rays(&rho, n, 7).unwrap();
    let m = moments_of(&rays).unwrap();
    assert!((m.sigma_x - 1.0).abs() < 5.0 / (n as f64).sqrt());
    assert_eq!(rays.seed, 7);
    assert_eq!(rays.clipped_mass, 0.0);
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let rho = gaussian_quasidist(sampling_grid(), 1.0, 0.05, 0.0, 0.0, 0.0).unwrap();
    let n = 20_000;
    let a = sample_rays(&rho, n, 3).unwrap();
    let b = sample_rays(&rho, n, 3).unwrap();
    assert_eq!(a, b);
    let c = sample_rays(&rho, n, 4).unwrap();
    assert_ne!(a.x, c.x);
    let (ma, mc) = (moments_of(&a).unwrap(), moments_of(&c).unwrap());
    // standard error of a difference of two independent estimates
    let se = (2.0 / n as f64).sqrt();
    assert!((ma.mean_x - mc.mean_x).abs() < 5.0 * se * 1.0);
    assert!((ma.sigma_x - mc.sigma_x).abs() < 5.0 * se / 2f64.sqrt());
    assert!((ma.sigma_p - mc.sigma_p).abs() < 5.0 * se * 0.05 / 2f64.sqrt());
}

#[test]
fn sampling_rejects_bad_requests() {
    let rho = gaussian_quasidist(sampling_grid(), 1.0, 0.05, 0.0, 0.0, 0.0).unwrap();
    assert_eq!(sample_rays(&rho, 0, 1), Err(Error::InvalidCount { n: 0 }));

    // a cat-state Wigner function has percent-level negative mass
    let gx = AxisGrid64::new(256, 5.0, 0.0).unwrap();
    let psi = superposition_wavefield(gx, 0.18, 0.0, 0.0, 0.72, 0.1).unwrap();
    let w = wigner_transform(&psi, AxisGrid64::new(128, 5.0, 0.0).unwrap()).unwrap();
    let report = negativity(&w);
    assert!(report.negative_mass > 0.02);
    assert!(matches!(
        sample_rays(&w, 100, 1),
        Err(Error::NegativeMass { .. })
    ));
}

#[test]
fn incoherent_pair_is_a_non_negative_mixture() {
    let grid = PhaseGrid::new(
        AxisGrid64::new(256, 5.0, 0.0).unwrap(),
        AxisGrid64::new(128, 5.0, 0.0).unwrap(),
    );
    let rho = incoherent_pair_quasidist(grid, 0.18, 0.0, 0.0, 0.72, 0.1).unwrap();
    assert!(rho.min() >= 0.0);
    assert!((rho.mass() - 1.0).abs() < 1e-12);
    let m = moments_of(&rho).unwrap();
    assert!((m.sigma_x - (0.18f64.powi(2) + 0.36f64.powi(2)).sqrt()).abs() < 1e-9);
}

#[test]
fn scaling_examples() {
    let ctx = ScaleContext::new(1.0, 0.1).unwrap();
    assert_eq!(ctx.to_scaled(2.0), 1.0);
    assert_eq!(ctx.to_scaled(0.0), 0.0);
    assert_eq!(ctx.eta(), 0.1 / 2.0);
    let ctx = ScaleContext::new(0.8, 0.1).unwrap();
    assert_eq!(ctx.from_scaled(ctx.to_scaled(0.37)), 0.37);
    assert!(ScaleContext::new(0.0, 0.1).is_err());
    assert!(ScaleContext::new(1.0, -0.1).is_err());
}

#[test]
fn scaling_round_trip_million_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ctx = ScaleContext::new(0.73, 0.05).unwrap();
    for _ in 0..1_000_000 {
        let x: f64 = rng.random_range(-1e3..1e3);
        let back = ctx.from_scaled(ctx.to_scaled(x));
        assert!((back - x).abs() <= 4.0 * f64::EPSILON * x.abs());
    }
}

proptest! {
    #[test]
    fn scaling_round_trip(x in -1e6f64..1e6, sigma0 in 1e-3f64..1e3) {
        let ctx = ScaleContext::new(sigma0, 0.1).unwrap();
        let back = ctx.from_scaled(ctx.to_scaled(x));
        prop_assert!((back - x).abs() <= 4.0 * f64::EPSILON * x.abs());
    }

    #[test]
    fn gaussian_quasidist_is_valid(
        sx in 0.5f64..1.5,
        sp in 0.03f64..0.08,
        r in -0.9f64..0.9,
        x0 in -1.0f64..1.0,
    ) {
        let grid = PhaseGrid::new(
            AxisGrid64::new(256, 32.0, 0.0).unwrap(),
            AxisGrid64::new(64, 1.2, 0.0).unwrap(),
        );
        let rho = gaussian_quasidist(grid, sx, sp, r * sx * sp, x0, 0.0).unwrap();
        prop_assert!((rho.mass() - 1.0).abs() < 1e-12);
        prop_assert!(rho.min() >= 0.0);
    }
}
