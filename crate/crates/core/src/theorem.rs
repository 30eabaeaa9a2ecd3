//! Checks of the no-go argument for `d ≥ 3` resources and a search for
//! concrete errors whose conditional correlation-space map is not trace
//! preserving.
//!
//! Three error families are used, with `ω = 2π/d` and `V = Σ_p e^{−iωp}|p⟩⟨p|`:
//! `U_{1↔2}`, `U_{0↔2}V^s` and `U_{0↔1}U_{0↔2}V^t`.

use serde::Serialize;

use crate::channels::{swap_matrix, phase_matrix, KrausChannel};
use crate::correlation::{gram, induced_kraus, MeasurementBasis};
use crate::error::{invalid, Result};
use crate::linalg::{Matrix, Tolerance};
use crate::resource::ResourceMps;
use crate::scalar::{cis, Real};

/// Violations at or below this are not reported as witnesses.
pub const WITNESS_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofStep {
    Error1,
    E3,
    E4,
}

/// How `γ` (or `δ`) was obtained from the Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaNorm {
    /// The operator is unitary up to a constant `c` and `γ = c²`.
    UnitaryScale,
    /// `γ = ‖E‖²`, the largest eigenvalue of `E†E`.
    OperatorNorm,
}

/// Bookkeeping for one step of the argument.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport<T: Real = f64> {
    pub step: ProofStep,
    /// `s` for the e3 family, `t` for e4, 0 otherwise.
    pub shift: usize,
    pub theta: T,
    pub phi: T,
    /// `A†[1]A[1] = ηI`, when it holds.
    pub eta: Option<T>,
    /// `A†[2]A[2] = ξI`, when it holds.
    pub xi: Option<T>,
    /// The unnormalized conditional operator `E`.
    pub operator: Matrix<T>,
    /// `E†E`.
    pub gram: Matrix<T>,
    /// `γ` (e3, error1) or `δ` (e4).
    pub gamma: T,
    pub gamma_norm: GammaNorm,
    /// `tr(cross)/D`: the value `γ′` (or `δ′`) would take if `cross ∝ I`.
    pub gamma_prime: T,
    /// The phase-weighted cross term, `e^{−i(φ−sω)}A†[2]A[1] + h.c.` for e3 and
    /// `e^{i(φ+tω)}A†[2]A[1] + h.c.` for e4; zero for error1.
    pub cross: Matrix<T>,
    /// Traceless part of `cross`; zero exactly when the step's identity holds.
    pub residual: Matrix<T>,
    /// `‖E†E/γ − I‖_max`.
    pub tp_deviation: T,
}

impl<T: Real> ResidualReport<T> {
    pub fn passes(&self, tol: Tolerance<T>) -> bool {
        self.tp_deviation <= tol.eps()
    }
}

/// A concrete error, measurement and outcome whose conditional map is not TP.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<T: Real = f64> {
    pub step: ProofStep,
    pub shift: usize,
    pub theta: T,
    pub phi: T,
    pub channel: KrausChannel<T>,
    pub basis: MeasurementBasis<T>,
    pub outcome: usize,
    pub outcome_label: String,
    /// `‖G/λ_max(G) − I‖_max` for the outcome's Gram sum `G`.
    pub violation: T,
}

fn require_qutrit_or_more<T: Real>(mps: &ResourceMps<T>) -> Result<usize> {
    let d = mps.d();
    if d < 3 {
        return Err(invalid("d", format!("the proof's error families need d >= 3, resource has d = {d}")));
    }
    Ok(d)
}

fn omega<T: Real>(d: usize) -> T {
    T::TAU() / T::from_usize(d).unwrap()
}

/// `U_{1↔2}`.
pub fn error1_channel<T: Real>(d: usize) -> Result<KrausChannel<T>> {
    KrausChannel::swap_error(1, 2, d)
}

/// `U_{0↔2}V^s`.
pub fn e3_channel<T: Real>(d: usize, s: usize) -> Result<KrausChannel<T>> {
    KrausChannel::unitary(&swap_matrix(0, 2, d)? * &phase_matrix(d, s)?)
}

/// `U_{0↔1}U_{0↔2}V^t`.
pub fn e4_channel<T: Real>(d: usize, t: usize) -> Result<KrausChannel<T>> {
    KrausChannel::unitary(&(&swap_matrix(0, 1, d)? * &swap_matrix(0, 2, d)?) * &phase_matrix(d, t)?)
}

fn scalar_multiple<T: Real>(m: &Matrix<T>) -> Result<Option<T>> {
    Ok(m.proportionality_to_identity(Tolerance::verify())?.map(|z| z.re))
}

fn gamma_of<T: Real>(e: &Matrix<T>, g: &Matrix<T>) -> Result<(T, GammaNorm)> {
    Ok(match e.unitary_up_to_scale(Tolerance::verify())? {
        Some(c) => (c * c, GammaNorm::UnitaryScale),
        None => (g.eigen()?.max(), GammaNorm::OperatorNorm),
    })
}

/// `‖G/λ_max(G) − I‖_max`, or 1 when `G = 0`.
pub fn scaled_identity_defect<T: Real>(g: &Matrix<T>) -> Result<T> {
    let top = g.eigen()?.max();
    if top <= T::epsilon() * T::lit(1e3) {
        return Ok(T::one());
    }
    Ok(g.scale_real(top.recip()).max_diff(&Matrix::identity(g.rows())))
}

fn report<T: Real>(
    mps: &ResourceMps<T>,
    step: ProofStep,
    shift: usize,
    theta: T,
    phi: T,
    e: Matrix<T>,
    cross: Matrix<T>,
) -> Result<ResidualReport<T>> {
    let bond = mps.bond_dim();
    let g = &e.dagger() * &e;
    let (gamma, gamma_norm) = gamma_of(&e, &g)?;
    let tp_deviation = if gamma > T::epsilon() * T::lit(1e3) {
        g.scale_real(gamma.recip()).max_diff(&Matrix::identity(bond))
    } else {
        T::one()
    };
    let a1 = mps.tensor(1);
    let a2 = mps.tensor(2);
    let gamma_prime = cross.trace().re / T::from_usize(bond).unwrap();
    let residual = &cross - &Matrix::identity(bond).scale_real(gamma_prime);
    Ok(ResidualReport {
        step,
        shift,
        theta,
        phi,
        eta: scalar_multiple(&(&a1.dagger() * a1))?,
        xi: scalar_multiple(&(&a2.dagger() * a2))?,
        operator: e,
        gram: g,
        gamma,
        gamma_norm,
        gamma_prime,
        cross,
        residual,
        tp_deviation,
    })
}

/// After `U_{1↔2}` on site 1, outcome `|2⟩` applies `A[1]`; the step holds when `A†[1]A[1] = ηI`.
pub fn check_error1<T: Real>(mps: &ResourceMps<T>, theta: T, phi: T) -> Result<ResidualReport<T>> {
    let d = require_qutrit_or_more(mps)?;
    let basis = MeasurementBasis::from_angles(theta, phi, d)?;
    let im = induced_kraus(mps, &error1_channel(d)?, &basis)?;
    let e = im.kraus(0, 2).clone();
    let bond = mps.bond_dim();
    report(mps, ProofStep::Error1, 0, theta, phi, e, Matrix::zeros(bond, bond))
}

/// After `U_{0↔2}V^s`, outcome `α` applies
/// `e^{−2isω}cos(θ/2)A[2] + e^{−i(φ+sω)}sin(θ/2)A[1]`.
pub fn check_e3<T: Real>(mps: &ResourceMps<T>, theta: T, phi: T, s: usize) -> Result<ResidualReport<T>> {
    let d = require_qutrit_or_more(mps)?;
    let basis = MeasurementBasis::from_angles(theta, phi, d)?;
    let im = induced_kraus(mps, &e3_channel(d, s)?, &basis)?;
    let w = omega::<T>(d) * T::from_usize(s % d).unwrap();
    let m = &mps.tensor(2).dagger() * mps.tensor(1);
    let cross = &m.scale(cis(-(phi - w))) + &m.dagger().scale(cis(phi - w));
    report(mps, ProofStep::E3, s, theta, phi, im.kraus(0, 0).clone(), cross)
}

/// After `U_{0↔1}U_{0↔2}V^t`, outcome `α` applies
/// `e^{−itω}cos(θ/2)A[1] + e^{−iφ−2itω}sin(θ/2)A[2]`.
pub fn check_e4<T: Real>(mps: &ResourceMps<T>, theta: T, phi: T, t: usize) -> Result<ResidualReport<T>> {
    let d = require_qutrit_or_more(mps)?;
    let basis = MeasurementBasis::from_angles(theta, phi, d)?;
    let im = induced_kraus(mps, &e4_channel(d, t)?, &basis)?;
    let w = omega::<T>(d) * T::from_usize(t % d).unwrap();
    let m = &mps.tensor(2).dagger() * mps.tensor(1);
    let cross = &m.scale(cis(phi + w)) + &m.dagger().scale(cis(-(phi + w)));
    report(mps, ProofStep::E4, t, theta, phi, im.kraus(0, 0).clone(), cross)
}

/// The integer `r` with `2φ + (t−s)·2π/d = rπ` (within 1e−9), if any.
pub fn phase_condition(phi: f64, s: usize, t: usize, d: usize) -> Option<i64> {
    let w = std::f64::consts::TAU / d as f64;
    let x = 2.0 * phi + (t as f64 - s as f64) * w;
    let r = (x / std::f64::consts::PI).round();
    ((x - r * std::f64::consts::PI).abs() <= 1e-9).then_some(r as i64)
}

/// `θ ∈ {kπ/(n+1) : k = 1..n}`.
pub fn theta_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|k| k as f64 * std::f64::consts::PI / (n + 1) as f64).collect()
}

/// `φ ∈ {2πk/n : k = 0..n−1}`.
pub fn phi_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64 * std::f64::consts::TAU / n as f64).collect()
}

/// Sweeps the three error families over the grid points where the resource
/// validates, every shift `s, t ∈ 0..d` and every outcome, returning the first
/// outcome with violation above [`WITNESS_THRESHOLD`]. `None` for `d < 3`.
pub fn find_nontp_witness<T: Real>(mps: &ResourceMps<T>, theta_grid: &[T], phi_grid: &[T]) -> Result<Option<Witness<T>>> {
    let d = mps.d();
    if d < 3 {
        return Ok(None);
    }
    let tol = Tolerance::verify();
    let threshold = T::lit(WITNESS_THRESHOLD);
    let mut families = vec![(ProofStep::Error1, 0, error1_channel::<T>(d)?)];
    families.extend((0..d).map(|s| Ok((ProofStep::E3, s, e3_channel(d, s)?))).collect::<Result<Vec<_>>>()?);
    families.extend((0..d).map(|t| Ok((ProofStep::E4, t, e4_channel(d, t)?))).collect::<Result<Vec<_>>>()?);

    for &theta in theta_grid {
        for &phi in phi_grid {
            if !mps.validate(theta, phi, tol)?.valid {
                continue;
            }
            let basis = MeasurementBasis::from_angles(theta, phi, d)?;
            for (step, shift, ch) in &families {
                let im = induced_kraus(mps, ch, &basis)?;
                for outcome in 0..d {
                    let g = gram(im.outcome(outcome), mps.bond_dim());
                    if g.max_abs() <= T::epsilon() * T::lit(1e3) {
                        continue;
                    }
                    let violation = scaled_identity_defect(&g)?;
                    if violation > threshold {
                        return Ok(Some(Witness {
                            step: *step,
                            shift: *shift,
                            theta,
                            phi,
                            channel: ch.clone(),
                            outcome_label: basis.label(outcome),
                            basis,
                            outcome,
                            violation,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}
