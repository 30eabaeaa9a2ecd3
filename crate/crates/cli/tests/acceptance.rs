//! Acceptance suite: one PASS/FAIL line per criterion.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::{Command, ExitCode};
use std::time::Instant;

use serde_json::Value;

use cspace_core::correlation::{induced_kraus, mixed_map, tp_certificate};
use cspace_core::linalg::pauli;
use cspace_core::mixing::{all_sectors, classify_sector, cluster_mixing_control, global_gram, sector_map, ByproductSector};
use cspace_core::oracle::{oracle_sweep, swap_outcome_two_operator};
use cspace_core::theorem::{check_e3, phase_condition, theta_grid};
use cspace_core::{Basis, CMatrix, Channel, Resource, Tolerance};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn aklt_construction() -> Outcome {
    let m = Resource::aklt();
    let s = 3f64.sqrt().recip();
    let expect = [pauli::x(), pauli::xz(), pauli::z()];
    for (k, p) in expect.iter().enumerate() {
        let diff = m.tensor(k).max_diff(&p.scale_real(s));
        ensure(diff == 0.0, || format!("A[{k}] differs by {diff:e}"))?;
    }
    let report = m.validate(FRAC_PI_2, FRAC_PI_2, Tolerance::verify()).map_err(err)?;
    for b in &report.branches {
        let c = b.scale.ok_or_else(|| format!("branch {} not unitary", b.label))?;
        ensure((c - s).abs() <= 1e-12, || format!("branch {} scale {c}", b.label))?;
    }
    let dc = (report.normalization_c - 1.0).abs();
    ensure(report.branches.len() == 3 && dc <= 1e-12, || format!("|C - 1| = {dc:e}"))?;
    Ok(format!("three branches at 1/sqrt(3), |C - 1| = {dc:.1e}"))
}

fn mixed_map_cptp() -> Outcome {
    let (mut worst_tp, mut worst_eig) = (0f64, f64::INFINITY);
    for (name, m) in [("aklt", Resource::aklt()), ("cluster", Resource::cluster_1d())] {
        let d = m.d();
        for seed in 0..100u64 {
            let ch = Channel::random_cptp(d, 1 + seed as usize % (d * d), seed).map_err(err)?;
            let basis = Basis::random(d, seed + 1000);
            let im = induced_kraus(&m, &ch, &basis).map_err(err)?;
            let tp = tp_certificate(&im);
            let eig = mixed_map(&im).choi().min_eigenvalue().map_err(err)?;
            ensure(tp <= 1e-9 && eig >= -1e-9, || format!("{name} seed {seed}: tp {tp:e}, min eig {eig:e}"))?;
            worst_tp = worst_tp.max(tp);
            worst_eig = worst_eig.min(eig);
        }
    }
    Ok(format!("200 channels, max tp deviation {worst_tp:.1e}, min Choi eigenvalue {worst_eig:.1e}"))
}

fn run_cli(args: &[&str]) -> Result<(i32, Value), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cspace"))
        .args(args)
        .env_remove("CSPACE_TOL")
        .output()
        .map_err(err)?;
    let code = out.status.code().ok_or("killed by signal")?;
    let json = serde_json::from_slice(&out.stdout).map_err(err)?;
    Ok((code, json))
}

fn theorem_witness() -> Outcome {
    let (code, v) = run_cli(&["witness", "--resource", "aklt"])?;
    ensure(code == 0, || format!("aklt witness exit code {code}"))?;
    let w = &v["witness"];
    let violation = w["violation"].as_f64().unwrap_or(0.0);
    ensure(violation > 1e-3, || format!("violation {violation}"))?;
    let step = w["proof_step"].as_str().unwrap_or("");
    ensure(["error1", "e3", "e4"].contains(&step), || format!("family {step}"))?;
    let (code, v) = run_cli(&["witness", "--resource", "cluster"])?;
    ensure(code == 3 && v["witness"].is_null(), || format!("cluster exit code {code}"))?;

    let m = Resource::aklt();
    let expect = (2.0 / 3.0) * (FRAC_PI_2 - 2.0 * PI / 3.0).cos().abs();
    for theta in theta_grid(8) {
        let r0 = check_e3(&m, theta, FRAC_PI_2, 0).map_err(err)?;
        ensure(r0.passes(Tolerance::verify()), || format!("e3 s=0 fails at theta {theta}"))?;
        let r1 = check_e3(&m, theta, FRAC_PI_2, 1).map_err(err)?;
        ensure(!r1.passes(Tolerance::verify()), || format!("e3 s=1 passes at theta {theta}"))?;
        let x_part = r1.residual[(0, 1)];
        let off_x = r1.residual.max_diff(&pauli::x().scale(x_part));
        let dc = (x_part.norm() - expect).abs();
        ensure(off_x <= 1e-12 && dc <= 1e-12, || format!("e3 s=1 residual at theta {theta}: |c| - expected = {dc:e}"))?;
    }
    Ok(format!(
        "aklt witness {} ({step}) at theta={:.6}, phi={:.6}, violation {violation:.6}; cluster none; e3 s=1 residual {expect:.6} X",
        w["error_family"].as_str().unwrap_or(""),
        w["theta"].as_f64().unwrap_or(f64::NAN),
        w["phi"].as_f64().unwrap_or(f64::NAN)
    ))
}

fn phase_arithmetic() -> Outcome {
    const STEPS: usize = 1680;
    let mut hits = 0;
    for d in 2..=8 {
        for k in 0..STEPS {
            let phi = k as f64 * 2.0 * PI / STEPS as f64;
            if let (Some(r00), Some(r10)) = (phase_condition(phi, 0, 0, d), phase_condition(phi, 1, 0, d)) {
                ensure(d <= 2, || format!("d = {d} satisfied at phi = {phi}"))?;
                ensure((r00 - r10) * d as i64 == 2, || format!("d (r00 - r10) != 2 at phi = {phi}"))?;
                hits += 1;
            }
        }
    }
    ensure(hits > 0, || "no solutions even for d = 2".into())?;
    Ok(format!("d in 2..=8 over {STEPS} phases: {hits} joint solutions, all with d = 2"))
}

fn mixing_counterexample() -> Outcome {
    let sector = ByproductSector::new(1, 0).map_err(err)?;
    let theta = FRAC_PI_2;
    let ch = Channel::f1_error(theta, FRAC_PI_2, 3).map_err(err)?;
    let mut scalars = Vec::new();
    for r in 1..=5 {
        let sm = sector_map(&Resource::aklt(), &ch, theta, FRAC_PI_2, r, sector).map_err(err)?;
        let level = if r % 2 == 1 { 1 } else { 0 };
        let rest = &sm.gram - &CMatrix::unit(2, level, level).scale_real(2.0 / 3.0);
        let c = rest.trace().re / 2.0;
        let dev = rest.max_diff(&CMatrix::identity(2).scale_real(c));
        ensure(dev <= 1e-9, || format!("r = {r}: deviation {dev:e}"))?;
        let verdict = classify_sector(&sm, Tolerance::verify()).map_err(err)?.verdict;
        ensure(!matches!(verdict, cspace_core::cptp::Verdict::LinearCPTP), || format!("r = {r} is LinearCPTP"))?;
        scalars.push(c);
    }
    let shown: Vec<String> = scalars.iter().map(|c| format!("{c:.6}")).collect();
    let shown = format!("alpha/beta for r = 1..5: [{}]", shown.join(", "));
    let non_positive: Vec<usize> = (1..=5).filter(|r| scalars[r - 1] <= 1e-12).collect();
    ensure(non_positive.is_empty(), || format!("{shown}; not positive at r = {non_positive:?}"))?;
    Ok(shown)
}

fn global_tp() -> Outcome {
    let theta = 1.1;
    let mut channels = vec![Channel::identity(3), Channel::f1_error(theta, FRAC_PI_2, 3).map_err(err)?];
    for seed in 0..20 {
        channels.push(Channel::random_cptp(3, 1 + seed as usize % 9, seed).map_err(err)?);
    }
    let mut worst = 0f64;
    for ch in &channels {
        for phi in [FRAC_PI_2, 1.5 * PI] {
            for r in 1..=5 {
                let maps = all_sectors(&Resource::aklt(), ch, theta, phi, r).map_err(err)?;
                let dev = global_gram(&maps).max_diff(&CMatrix::identity(2));
                ensure(dev <= 1e-9, || format!("r = {r}: deviation {dev:e}"))?;
                worst = worst.max(dev);
            }
        }
    }
    Ok(format!("{} channels, r <= 5, max deviation {worst:.1e}", channels.len()))
}

fn oracle_equivalence() -> Outcome {
    let trials = oracle_sweep(4, 0, 25).map_err(err)?;
    let worst = trials.iter().map(|t| t.max_distance()).fold(0.0, f64::max);
    ensure(worst <= 1e-8, || format!("max Choi distance {worst:e}"))?;
    let (_, overlap) = swap_outcome_two_operator(4, FRAC_PI_2, FRAC_PI_2).map_err(err)?;
    ensure((overlap - 1.0).abs() <= 1e-10, || format!("overlap with XZ {overlap}"))?;
    Ok(format!("25 triples, max Choi distance {worst:.1e}; outcome-2 operator overlap with XZ {overlap:.12}"))
}

fn cluster_control() -> Outcome {
    let basis = Basis::from_angles(FRAC_PI_2, 0.0, 2).map_err(err)?;
    for seed in 0..50 {
        let ch = Channel::random_cptp(2, 1 + seed as usize % 4, seed).map_err(err)?;
        let c = cluster_mixing_control(&ch, &basis, Tolerance::verify()).map_err(err)?;
        ensure(c.is_linear_cptp(), || format!("seed {seed}: {:?}", c.verdict))?;
    }
    Ok("50 random channels, all LinearCPTP".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("AKLT construction", aklt_construction),
        ("mixed-map CPTP", mixed_map_cptp),
        ("theorem witness", theorem_witness),
        ("phase-condition arithmetic", phase_arithmetic),
        ("AKLT mixing counterexample", mixing_counterexample),
        ("global TP", global_tp),
        ("oracle equivalence", oracle_equivalence),
        ("cluster positive control", cluster_control),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
