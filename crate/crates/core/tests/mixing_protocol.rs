//! AKLT rotation protocol with outcome mixing, and the cluster-state control.

use std::f64::consts::{FRAC_PI_2, PI};

use cspace_core::channels::basis_rotation;
use cspace_core::cptp::Verdict;
use cspace_core::linalg::pauli;
use cspace_core::mixing::{
    all_sectors, classify_sector, cluster_mixing_control, flagged_total_map, global_gram, s_z, sector_map, ByproductSector,
};
use cspace_core::oracle::proportionality;
use cspace_core::{Basis, CMatrix, Channel, Resource, Tolerance};

fn tol() -> Tolerance {
    Tolerance::verify()
}

#[test]
fn noiseless_sectors_implement_rotation_with_byproduct() {
    let theta = 0.9;
    for phi in [FRAC_PI_2, 1.5 * PI] {
        for r in 1..=5 {
            for sector in ByproductSector::all() {
                let sm = sector_map(&Resource::aklt(), &Channel::identity(3), theta, phi, r, sector).unwrap();
                let x = pauli::x::<f64>().pow(sector.p as u32).unwrap();
                let z = pauli::z::<f64>().pow(sector.q as u32).unwrap();
                let target = &(&x * &z) * &s_z(sm.rotation);
                let n_success = sm.kraus_like.len() - sm.n_failure;
                for k in &sm.kraus_like[..n_success] {
                    assert!((proportionality(k, &target) - 1.0).abs() < 1e-12, "r={r} {sector:?}");
                }
            }
        }
    }
}

/// `(α or β, deviation)` for the decomposition `gram = c·I + (2/3)|level⟩⟨level|`.
fn gram_shape(gram: &CMatrix, level: usize) -> (f64, f64) {
    let rest = gram - &CMatrix::unit(2, level, level).scale_real(2.0 / 3.0);
    let c = rest.trace().re / 2.0;
    (c, rest.max_diff(&CMatrix::identity(2).scale_real(c)))
}

#[test]
fn f1_sector_gram_has_gram_shape() {
    let sector = ByproductSector::new(1, 0).unwrap();
    for (theta, phi) in [(FRAC_PI_2, FRAC_PI_2), (0.4, FRAC_PI_2), (2.5, 1.5 * PI)] {
        let ch = Channel::f1_error(theta, phi, 3).unwrap();
        let mut scalars = Vec::new();
        for r in 1..=5 {
            let sm = sector_map(&Resource::aklt(), &ch, theta, phi, r, sector).unwrap();
            let level = if r % 2 == 1 { 1 } else { 0 };
            let (c, dev) = gram_shape(&sm.gram, level);
            assert!(dev <= 1e-9, "r={r}: deviation {dev}");
            assert_ne!(classify_sector(&sm, tol()).unwrap().verdict, Verdict::LinearCPTP);
            scalars.push(c);
        }
        // independent of (θ, φ): the Gram only counts outcome sequences
        println!("alpha/beta for r = 1..5 at theta={theta}: {scalars:?}");
        assert!(scalars[0].abs() < 1e-12);
        assert!(scalars[1..].iter().all(|&c| c > 0.0));
    }
}

#[test]
fn global_trace_preservation() {
    let theta = 1.2;
    let mut channels = vec![Channel::identity(3), Channel::f1_error(theta, FRAC_PI_2, 3).unwrap()];
    channels.extend((0..10).map(|s| Channel::random_cptp(3, 1 + s as usize % 3, s).unwrap()));
    for ch in &channels {
        for r in 1..=5 {
            let maps = all_sectors(&Resource::aklt(), ch, theta, FRAC_PI_2, r).unwrap();
            assert!(global_gram(&maps).max_diff(&CMatrix::identity(2)) <= 1e-9, "r={r}");
        }
    }
}

#[test]
fn flagged_total_map_is_cptp_even_with_f1() {
    let ch = Channel::f1_error(0.7, FRAC_PI_2, 3).unwrap();
    let maps = all_sectors(&Resource::aklt(), &ch, 0.7, FRAC_PI_2, 3).unwrap();
    let total = flagged_total_map(&maps).unwrap();
    let c = cspace_core::cptp::classify(&total, cspace_core::cptp::TraceConvention::Exact, tol()).unwrap();
    assert_eq!(c.verdict, Verdict::LinearCPTP);
}

#[test]
fn identity_channel_sectors_are_tp_up_to_scale() {
    for r in 1..=4 {
        for sector in ByproductSector::all() {
            let sm = sector_map(&Resource::aklt(), &Channel::identity(3), 0.5, FRAC_PI_2, r, sector).unwrap();
            if sm.kraus_like.is_empty() {
                continue;
            }
            assert_eq!(classify_sector(&sm, tol()).unwrap().verdict, Verdict::LinearCPTP);
        }
    }
}

#[test]
fn cluster_control_is_cptp() {
    let x_basis = Basis::from_angles(FRAC_PI_2, 0.0, 2).unwrap();
    for seed in 0..50 {
        let ch = Channel::random_cptp(2, 1 + seed as usize % 4, seed).unwrap();
        let c = cluster_mixing_control(&ch, &x_basis, tol()).unwrap();
        assert_eq!(c.verdict, Verdict::LinearCPTP, "seed {seed}");
    }
    let rot = Channel::unitary(basis_rotation(0.8, 0.3, 2).unwrap()).unwrap();
    assert_eq!(cluster_mixing_control(&rot, &x_basis, tol()).unwrap().verdict, Verdict::LinearCPTP);
    assert_eq!(
        cluster_mixing_control(&Channel::identity(2), &x_basis, tol()).unwrap().verdict,
        Verdict::LinearCPTP
    );
}

/// Independent count: with `F_1` every `Q̃†Q̃` reduces to `E†_{s_1}E_{s_1}`, and by hand
/// `E_0 = X(I − Z)/√6`, `E_1 = X(I + Z)/√6`, `E_2 = Z/√3`.
fn counted_gram(r: usize) -> CMatrix {
    let mut n = [0usize; 3];
    for code in 0..3usize.pow(r as u32) {
        let seq: Vec<usize> = (0..r).map(|i| code / 3usize.pow(i as u32) % 3).collect();
        if seq.iter().all(|&s| s == 2) {
            continue;
        }
        let f = seq.iter().filter(|&&s| s != 2).count() % 2;
        let g = seq.iter().filter(|&&s| s != 0).count() % 2;
        if (f, g) == (1, 0) {
            n[seq[0]] += 1;
        }
    }
    let two_thirds = 2.0 / 3.0;
    &(&CMatrix::unit(2, 1, 1).scale_real(two_thirds * n[0] as f64) + &CMatrix::unit(2, 0, 0).scale_real(two_thirds * n[1] as f64))
        + &CMatrix::identity(2).scale_real(n[2] as f64 / 3.0)
}

#[test]
fn f1_sector_gram_matches_sequence_count() {
    let sector = ByproductSector::new(1, 0).unwrap();
    let ch = Channel::f1_error(1.3, FRAC_PI_2, 3).unwrap();
    for r in 1..=6 {
        let sm = sector_map(&Resource::aklt(), &ch, 1.3, FRAC_PI_2, r, sector).unwrap();
        assert!(sm.gram.max_diff(&counted_gram(r)) < 1e-12, "r = {r}");
    }
    assert!(counted_gram(1).max_diff(&CMatrix::unit(2, 1, 1).scale_real(2.0 / 3.0)) < 1e-15);
}
