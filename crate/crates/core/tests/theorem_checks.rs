//! The d ≥ 3 no-go argument: per-step checks, phase arithmetic and witness search.

use std::f64::consts::{FRAC_PI_2, PI};

use cspace_core::theorem::{check_e3, check_e4, check_error1, find_nontp_witness, phase_condition, phi_grid, theta_grid, ProofStep};
use cspace_core::{Resource, Tolerance};

#[test]
fn simultaneous_phase_conditions_force_d_at_most_two() {
    let grid: Vec<f64> = (0..1680).map(|k| k as f64 * 2.0 * PI / 1680.0).collect();
    for d in 2..=8 {
        let mut any = false;
        for &phi in &grid {
            if let (Some(r00), Some(r10)) = (phase_condition(phi, 0, 0, d), phase_condition(phi, 1, 0, d)) {
                assert!(d <= 2, "d = {d}, phi = {phi}");
                // d = 2 / (r00 − r10)
                assert_eq!((r00 - r10) * d as i64, 2);
                any = true;
            }
        }
        assert_eq!(any, d == 2, "d = {d}");
    }
}

#[test]
fn e3_simultaneity_on_aklt() {
    let m = Resource::aklt();
    for theta in theta_grid(8) {
        assert!(check_e3(&m, theta, FRAC_PI_2, 0).unwrap().passes(Tolerance::verify()));
        let r1 = check_e3(&m, theta, FRAC_PI_2, 1).unwrap();
        assert!(!r1.passes(Tolerance::verify()));
        let coeff = r1.residual[(0, 1)].re;
        assert!((coeff.abs() - (2.0 / 3.0) * (FRAC_PI_2 - 2.0 * PI / 3.0).cos().abs()).abs() < 1e-12);
    }
}

#[test]
fn e4_shift_is_periodic() {
    let m = Resource::aklt();
    for t in 0..3 {
        let a = check_e4(&m, 0.8, 0.3, t).unwrap();
        let b = check_e4(&m, 0.8, 0.3, t + 3).unwrap();
        assert!(a.gram.max_diff(&b.gram) < 1e-12);
        assert!(a.residual.max_diff(&b.residual) < 1e-12);
    }
}

#[test]
fn error1_on_random_resources_is_honest() {
    for seed in 0..20 {
        let m = Resource::random_resource(3, 2, 1.0, FRAC_PI_2, seed).unwrap();
        let r = check_error1(&m, 1.0, FRAC_PI_2).unwrap();
        let unitary = m.tensor(1).unitary_up_to_scale(Tolerance::verify()).unwrap().is_some();
        assert_eq!(r.eta.is_some(), unitary);
        assert_eq!(r.passes(Tolerance::verify()), unitary);
    }
}

#[test]
fn witness_found_for_aklt_not_cluster() {
    let (t, p) = (theta_grid(8), phi_grid(16));
    let w = find_nontp_witness(&Resource::aklt(), &t, &p).unwrap().unwrap();
    assert!(w.violation > 1e-3);
    assert!(matches!(w.step, ProofStep::Error1 | ProofStep::E3 | ProofStep::E4));
    assert!(find_nontp_witness(&Resource::cluster_1d(), &t, &p).unwrap().is_none());
}

#[test]
fn witness_found_for_random_qutrit_resources() {
    let (t, p) = (theta_grid(8), phi_grid(16));
    // (4π/9, π/4) lies on the default grid
    for seed in 0..20 {
        let m = Resource::random_resource(3, 2, t[3], p[2], seed).unwrap();
        let w = find_nontp_witness(&m, &t, &p).unwrap();
        assert!(w.is_some_and(|w| w.violation > 1e-6), "seed {seed}");
    }
}

#[test]
fn witness_search_is_deterministic() {
    let (t, p) = (theta_grid(8), phi_grid(16));
    let a = find_nontp_witness(&Resource::aklt(), &t, &p).unwrap();
    let b = find_nontp_witness(&Resource::aklt(), &t, &p).unwrap();
    assert_eq!(a, b);
}
