use quasibeam_core::state::incoherent_pair_quasidist;
use quasibeam_core::*;

fn grid() -> PhaseGrid<f64> {
    PhaseGrid::new(
        AxisGrid64::new(256, 20.0, 0.0).unwrap(),
        AxisGrid64::new(128, 1.0, 0.0).unwrap(),
    )
}

fn quartic_grid() -> PhaseGrid<f64> {
    PhaseGrid::new(
        AxisGrid64::new(256, 5.0, 0.0).unwrap(),
        AxisGrid64::new(128, 5.0, 0.0).unwrap(),
    )
}

#[test]
fn moments_round_trip() {
    let rho = gaussian_quasidist(grid(), 1.0, 0.05, 0.0, 0.0, 0.0).unwrap();
    let m = moments_of(&rho).unwrap();
    assert!((m.sigma_x - 1.0).abs() < 1e-10);
    assert!((m.sigma_p - 0.05).abs() < 1e-10);
    assert!(m.sigma_xp.abs() < 1e-12);
    assert!((m.emittance_rms - 0.1).abs() < 1e-10);
    assert_eq!(m.z, 0.0);
}

#[test]
fn unnormalized_input_is_rejected() {
    let mut rho = gaussian_quasidist(grid(), 1.0, 0.05, 0.0, 0.0, 0.0).unwrap();
    for v in &mut rho.values {
        *v *= 1.5;
    }
    assert!(matches!(moments_of(&rho), Err(Error::NotNormalized { .. })));
    let single = RayEnsemble64::new(vec![0.0], vec![0.0], 0.0, 0).unwrap();
    assert!(matches!(moments_of(&single), Err(Error::TooFewRays { .. })));
}

#[test]
fn free_space_keeps_emittance_while_width_grows() {
    let rho = gaussian_quasidist(
        PhaseGrid::new(
            AxisGrid64::new(256, 32.0, 0.0).unwrap(),
            AxisGrid64::new(64, 1.0, 0.0).unwrap(),
        ),
        1.0,
        0.05,
        0.0,
        0.0,
        0.0,
    )
    .unwrap();
    let t = evolve_phase_space(&rho, &PotentialSpec::free_space(), 0.1, &StepPlan::moyal(0.1, 100).unwrap(), 0).unwrap();
    let (first, last) = (t.moments[0], *t.moments.last().unwrap());
    assert!(last.sigma_x > 1.1 * first.sigma_x);
    assert!(((last.emittance_rms - first.emittance_rms) / first.emittance_rms).abs() < 1e-6);
}

#[test]
fn thermal_mapping() {
    let t = emittance_from_thermal(0.01f64, 1.0).unwrap();
    assert_eq!(t.epsilon, 0.02);
    assert_eq!(t.eta, 0.01);
    assert_eq!(t.epsilon / 2.0, 0.01 * 1.0);
    assert!(!t.paraxial_warning);
    let t = emittance_from_thermal(0.05f64, 2.0).unwrap();
    assert!((t.epsilon - 0.2).abs() < 1e-16);
    assert_eq!(t.eta, 0.05);
    assert!(emittance_from_thermal(0.5, 1.0).unwrap().paraxial_warning);
    assert!(emittance_from_thermal(0.0, 1.0).is_err());
    assert!(emittance_from_thermal(0.01, -1.0).is_err());
}

#[test]
fn uncertainty_examples() {
    let rho = gaussian_quasidist(grid(), 1.0, 0.05, 0.0, 0.0, 0.0).unwrap();
    let m = moments_of(&rho).unwrap();
    let u = uncertainty_check(&m, 0.1);
    assert!((u.product - 0.05).abs() < 1e-10);
    assert_eq!(u.bound, 0.05);
    assert!(u.satisfied);

    // a p window that clips the tails understates sigma_p
    let clipped = PhaseGrid::new(
        AxisGrid64::new(256, 20.0, 0.0).unwrap(),
        AxisGrid64::new(16, 0.12, 0.0).unwrap(),
    );
    let mut values = Vec::with_capacity(clipped.cells());
    for x in clipped.x.points() {
        for p in clipped.p.points() {
            values.push((-(x * x) / 2.0 - p * p / (2.0 * 0.0025)).exp());
        }
    }
    let norm: f64 = values.iter().sum::<f64>() * clipped.cell_area();
    let rho = QuasiDistribution::new(
        clipped,
        values.into_iter().map(|v| v / norm).collect(),
        0.0,
        DistKind::Wigner,
    )
    .unwrap();
    let u = uncertainty_check(&moments_of(&rho).unwrap(), 0.1);
    assert!(!u.satisfied);
}

#[test]
fn gaussian_wigner_has_no_negativity() {
    let gx = AxisGrid64::new(256, 24.0, 0.0).unwrap();
    let psi = gaussian_wavefield(gx, 1.0, 0.0, 0.0, 0.1).unwrap();
    let rho = wigner_transform(&psi, AxisGrid64::new(64, 1.0, 0.0).unwrap()).unwrap();
    let r = negativity(&rho);
    assert!(r.negativity_volume <= 1e-12);
    assert!(r.negative_mass >= 0.0);
}

#[test]
fn classical_quartic_flow_stays_non_negative() {
    let g = quartic_grid();
    let rho = incoherent_pair_quasidist(g, 0.18, 0.0, 0.0, 0.72, 0.1).unwrap();
    let spec = PotentialSpec::quartic(1.0, 0.1);
    let t = evolve_phase_space(&rho, &spec, 0.1, &StepPlan::classical(0.02, 150).unwrap(), 0).unwrap();
    let r = negativity(t.final_state());
    assert!(r.negativity_volume <= 1e-10);
}

#[test]
fn truncation_ratio_cases() {
    let g = quartic_grid();
    let rho = gaussian_quasidist(g, 0.25, 0.2, 0.0, 0.2, 0.0).unwrap();
    assert_eq!(
        truncation_ratio(&rho, &PotentialSpec::linear_lens(1.0), 0.1, 0.0),
        Some(0.0)
    );
    assert_eq!(truncation_ratio(&rho, &PotentialSpec::free_space(), 0.1, 0.0), None);

    let spec = PotentialSpec::quartic(1.0, 0.1);
    let mut eps = 0.2;
    let mut prev = truncation_ratio(&rho, &spec, eps, 0.0).unwrap();
    assert!(prev > 0.0);
    for _ in 0..3 {
        eps /= 2.0;
        let r3 = truncation_ratio(&rho, &spec, eps, 0.0).unwrap();
        let factor = prev / r3;
        assert!((factor - 4.0).abs() <= 0.4, "factor {factor}");
        prev = r3;
    }
}
