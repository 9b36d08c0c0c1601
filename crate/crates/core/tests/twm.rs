use num_complex::Complex;
use quasibeam_core::diagnostics::energy;
use quasibeam_core::solvers::{free_gaussian_sigma, matched_width};
use quasibeam_core::*;

/// RK4 integration of the free-space envelope equations
/// `d(sx^2)/dz = 2 sxp`, `d(sxp)/dz = sp^2`, `sp` constant.
fn envelope_oracle(sx: f64, sp: f64, z: f64) -> f64 {
    let n = 20_000;
    let h = z / n as f64;
    let rhs = |s: [f64; 2]| [2.0 * s[1], sp * sp];
    let mut s = [sx * sx, 0.0];
    for _ in 0..n {
        let k1 = rhs(s);
        let k2 = rhs([s[0] + h / 2.0 * k1[0], s[1] + h / 2.0 * k1[1]]);
        let k3 = rhs([s[0] + h / 2.0 * k2[0], s[1] + h / 2.0 * k2[1]]);
        let k4 = rhs([s[0] + h * k3[0], s[1] + h * k3[1]]);
        for i in 0..2 {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    s[0].sqrt()
}

#[test]
fn free_spreading_follows_envelope() {
    let g = AxisGrid64::new(1024, 32.0, 0.0).unwrap();
    let psi = gaussian_wavefield(g, 1.0, 0.0, 0.0, 0.1).unwrap();
    let plan = StepPlan::moyal(0.05, 400).unwrap();
    let t = evolve_twm(&psi, &PotentialSpec::free_space(), &plan, 100).unwrap();
    let sx = moments_of(t.final_state()).unwrap().sigma_x;
    let oracle = envelope_oracle(1.0, 0.05, 20.0);
    assert!((oracle - 2f64.sqrt()).abs() < 1e-12);
    assert!(((sx - oracle) / oracle).abs() < 1e-6);
    for (step, state) in &t.snapshots {
        let z = *step as f64 * 0.05;
        let m = moments_of(state).unwrap();
        let expected = free_gaussian_sigma(1.0, 0.1, z).unwrap();
        assert!(((m.sigma_x - expected) / expected).abs() < 1e-6);
    }
}

#[test]
fn free_gaussian_sigma_examples() {
    assert_eq!(free_gaussian_sigma(1.3, 0.1, 0.0).unwrap(), 1.3);
    assert!((free_gaussian_sigma(1.0, 0.1, 20.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    assert_eq!(free_gaussian_sigma(1.0, 0.0, 1e6).unwrap(), 1.0);
    assert!(free_gaussian_sigma(0.0, 0.1, 1.0).is_err());
}

#[test]
fn constant_potential_is_a_global_phase() {
    let g = AxisGrid64::new(256, 24.0, 0.0).unwrap();
    let psi = gaussian_wavefield(g, 1.0, 0.5, 0.03, 0.1).unwrap();
    let c = 0.7;
    let spec = PotentialSpec::new(vec![PotentialTerm {
        power: 0,
        profile: CoefficientProfile::Constant(c),
    }])
    .unwrap();
    let dz = 0.05;
    let with = step_twm(&psi, &spec, &StepPlan::moyal(dz, 1).unwrap()).unwrap();
    let without = step_twm(&psi, &PotentialSpec::free_space(), &StepPlan::moyal(dz, 1).unwrap()).unwrap();
    let phase = Complex::from_polar(1.0, -c * dz / 0.1);
    for (a, b) in with.values.iter().zip(&without.values) {
        assert!((a - b * phase).norm() < 1e-13);
    }
    for (a, b) in with.density().iter().zip(&without.density()) {
        assert!((a - b).abs() < 1e-13);
    }
}

#[test]
fn matched_width_examples() {
    let w = matched_width(&PotentialSpec::linear_lens(1.0), 0.1).unwrap();
    assert!((w - 0.05f64.sqrt()).abs() < 1e-15);
    assert!((w - 0.2236).abs() < 1e-4);
    let w = matched_width(&PotentialSpec::linear_lens(4.0), 0.1).unwrap();
    assert!((w - 0.025f64.sqrt()).abs() < 1e-15);
    assert!(matches!(
        matched_width(&PotentialSpec::linear_lens(0.0), 0.1),
        Err(Error::NotFocusing { .. })
    ));
    assert!(matched_width(&PotentialSpec::quartic(1.0, 0.1), 0.1).is_err());
}

#[test]
fn matched_beam_keeps_its_width() {
    let spec = PotentialSpec::linear_lens(1.0);
    let w = matched_width(&spec, 0.1).unwrap();
    let g = AxisGrid64::new(128, 5.0, 0.0).unwrap();
    let psi = gaussian_wavefield(g, w, 0.0, 0.0, 0.1).unwrap();
    let n = 40_000;
    let plan = StepPlan::moyal(2.0 * std::f64::consts::PI / n as f64, n).unwrap();
    let t = evolve_twm(&psi, &spec, &plan, 0).unwrap();
    let worst = t
        .moments
        .iter()
        .map(|m| ((m.sigma_x - w) / w).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-8, "width variation {worst}");
    for m in &t.moments {
        let u = uncertainty_check(m, 0.1);
        assert!(u.satisfied);
        assert!(((u.product - u.bound) / u.bound).abs() < 1e-6);
    }
}

#[test]
fn norm_conserved_over_thousand_steps() {
    let g = AxisGrid64::new(256, 5.0, 0.0).unwrap();
    let psi = gaussian_wavefield(g, 0.2, 0.2, 0.1, 0.1).unwrap();
    let plan = StepPlan::moyal(0.01, 1000).unwrap();
    let t = evolve_twm(&psi, &PotentialSpec::quartic(1.0, 0.1), &plan, 0).unwrap();
    assert!((t.final_state().norm_sqr() - 1.0).abs() <= 1e-12);
}

fn energy_drift(dz: f64) -> f64 {
    let g = AxisGrid64::new(256, 5.0, 0.0).unwrap();
    let spec = PotentialSpec::quartic(1.0, 0.1);
    let psi = gaussian_wavefield(g, 0.2, 0.2, 0.1, 0.1).unwrap();
    let e0 = energy(&psi, &spec);
    let n = (2.0 / dz).round() as usize;
    let mut worst = 0.0f64;
    solvers::evolve_twm_with(&psi, &spec, &StepPlan::moyal(dz, n).unwrap(), 0, |_, s| {
        worst = worst.max((energy(s, &spec) - e0).abs());
    })
    .unwrap();
    worst
}

#[test]
fn energy_drift_is_second_order() {
    let ratio = energy_drift(0.02) / energy_drift(0.01);
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}

fn quartic_twm(dz: f64) -> WaveField<f64> {
    let g = AxisGrid64::new(256, 5.0, 0.0).unwrap();
    let psi = gaussian_wavefield(g, 0.2, 0.2, 0.1, 0.1).unwrap();
    let n = (2.0 / dz).round() as usize;
    evolve_twm(&psi, &PotentialSpec::quartic(1.0, 0.1), &StepPlan::moyal(dz, n).unwrap(), 0)
        .unwrap()
        .final_state()
        .clone()
}

fn linf(a: &WaveField<f64>, b: &WaveField<f64>) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(u, v)| (u - v).norm())
        .fold(0.0, f64::max)
}

#[test]
fn second_order_convergence() {
    let reference = quartic_twm(0.04 / 8.0);
    let e1 = linf(&quartic_twm(0.04), &reference);
    let e2 = linf(&quartic_twm(0.02), &reference);
    let ratio = e1 / e2;
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn wigner_emittance_invariant_in_linear_channels() {
    let eps = 0.1;
    let cases = [
        (AxisGrid64::new(256, 32.0, 0.0).unwrap(), AxisGrid64::new(64, 1.0, 0.0).unwrap(), 1.0, PotentialSpec::free_space()),
        (AxisGrid64::new(128, 6.0, 0.0).unwrap(), AxisGrid64::new(128, 6.0, 0.0).unwrap(), 0.25, PotentialSpec::linear_lens(1.0)),
    ];
    for (gx, gp, sigma, spec) in cases {
        let psi = gaussian_wavefield(gx, sigma, 0.0, 0.0, eps).unwrap();
        let t = evolve_twm(&psi, &spec, &StepPlan::moyal(0.01, 1000).unwrap(), 100).unwrap();
        let e0 = moments_of(&wigner_transform(&psi, gp).unwrap()).unwrap().emittance_rms;
        assert!((e0 - eps).abs() < 1e-9);
        for (_, s) in &t.snapshots {
            let w = wigner_transform(s, gp).unwrap();
            let m = moments_of(&w).unwrap();
            assert!(((m.emittance_rms - e0) / e0).abs() <= 1e-6);
            assert!(uncertainty_check(&m, eps).satisfied);
        }
        for m in &t.moments {
            assert!(((m.emittance_rms - e0) / e0).abs() <= 1e-6);
        }
    }
}

#[test]
fn kinetic_aliasing_is_guarded() {
    let g = AxisGrid64::new(1024, 6.0, 0.0).unwrap();
    let psi = gaussian_wavefield(g, 0.2, 0.0, 0.0, 0.1).unwrap();
    let err = step_twm(&psi, &PotentialSpec::free_space(), &StepPlan::moyal(5.0, 1).unwrap()).unwrap_err();
    assert!(matches!(err, Error::KineticPhaseAliasing { .. }));
}
