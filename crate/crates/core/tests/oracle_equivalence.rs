//! Dense-state reconstruction against the analytic induced maps.

use std::f64::consts::FRAC_PI_2;

use cspace_core::linalg::{pauli, Vector};
use cspace_core::oracle::{
    apply_channel_at, compare_with_analytic, measure_at, oracle_sweep, random_triple, reconstruct_induced_map,
    swap_outcome_two_operator, DenseDensity,
};
use cspace_core::{Basis, Channel, Resource};
use num_complex::Complex;

#[test]
fn random_triples_agree_with_analytic_maps() {
    let trials = oracle_sweep(4, 0, 25).unwrap();
    for (i, t) in trials.iter().enumerate() {
        assert!(t.max_distance() <= 1e-8, "triple {i}: {t:?}");
    }
}

#[test]
fn agreement_does_not_depend_on_chain_length() {
    for seed in [3, 11] {
        let (mps, ch, basis) = random_triple(seed).unwrap();
        for n in [3, 5] {
            let c = compare_with_analytic(&mps, &ch, &basis, n).unwrap();
            assert!(c.max_distance() <= 1e-8, "seed {seed}, n {n}: {c:?}");
        }
    }
}

#[test]
fn aklt_with_physical_errors_matches() {
    let basis = Basis::from_angles(0.7, FRAC_PI_2, 3).unwrap();
    for ch in [
        Channel::identity(3),
        Channel::f1_error(0.7, FRAC_PI_2, 3).unwrap(),
        Channel::swap_error(0, 2, 3).unwrap(),
        Channel::random_cptp(3, 3, 5).unwrap(),
    ] {
        let c = compare_with_analytic(&Resource::aklt(), &ch, &basis, 4).unwrap();
        assert!(c.max_distance() <= 1e-8, "{c:?}");
    }
}

#[test]
fn swap_then_outcome_two_is_xz() {
    for (theta, phi) in [(FRAC_PI_2, FRAC_PI_2), (0.3, 2.0)] {
        let (k, overlap) = swap_outcome_two_operator(4, theta, phi).unwrap();
        assert!((overlap - 1.0).abs() < 1e-10);
        assert!((k.operator_norm().unwrap() - 1.0).abs() < 1e-12);
        let a1 = Resource::aklt().tensor(1).clone();
        let a1 = a1.scale_real(a1.operator_norm().unwrap().recip());
        let phase = (&a1.dagger() * &k).trace() / 2.0;
        assert!(k.max_diff(&a1.scale(phase)) < 1e-10);
        assert!(a1.max_diff(&pauli::xz()) < 1e-12);
    }
}

#[test]
fn conditional_w_is_boundary_map_sandwich() {
    let m = Resource::random_resource(3, 2, 1.1, 0.4, 9).unwrap().with_sites(4).unwrap();
    let psi = Vector::new(vec![Complex::new(0.6, 0.1), Complex::new(-0.2, 0.77)]).unwrap();
    for r in 1..=4 {
        let w = m.conditional_w(&psi, r).unwrap();
        let v = m.boundary_map(4 - r + 1).unwrap();
        let expect = &(&v * &psi.projector()) * &v.dagger();
        assert!(w.max_diff(&expect) < 1e-12, "r = {r}");
    }
    let full = m.clone().with_right(psi.clone()).unwrap().to_dense().unwrap();
    assert!(m.conditional_w(&psi, 1).unwrap().max_diff(&full.amplitudes.projector()) < 1e-12);
}

#[test]
fn aklt_branches_are_normalized() {
    let dense = Resource::aklt().with_sites(4).unwrap().to_dense().unwrap();
    let rho = DenseDensity::pure(4, 3, &dense.normalized().unwrap()).unwrap();
    let basis = Basis::from_angles(FRAC_PI_2, FRAC_PI_2, 3).unwrap();
    let branches = measure_at(&rho, 0, &basis).unwrap();
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    assert!((total - 1.0).abs() < 1e-12);
    for b in &branches {
        assert!(b.probability > 0.0 && !b.zero_probability());
    }
    let noisy = apply_channel_at(&rho, 0, &Channel::random_cptp(3, 2, 4).unwrap()).unwrap();
    assert!((noisy.trace() - 1.0).abs() < 1e-12);
    let rec = reconstruct_induced_map(&Resource::aklt(), &Channel::identity(3), &basis, 4).unwrap();
    assert!(rec.condition_number < 10.0);
}
