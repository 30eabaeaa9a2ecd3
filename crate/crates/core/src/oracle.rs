//! Brute-force cross-checks on the full `d^n`-dimensional density matrix.
//!
//! Sites are 0-based here and site 0 is the one next to `|R⟩` (the first to be
//! measured). Its digit is the least significant in the dense index.

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng as _;

use crate::channels::KrausChannel;
use crate::correlation::{induced_kraus, mixed_map, MeasurementBasis};
use crate::cptp::SuperOperator;
use crate::error::{invalid, Error, Result};
use crate::linalg::{seeded_rng, Matrix, Vector};
use crate::resource::ResourceMps;
use crate::scalar::Real;

/// Upper bound on `d^n` for a dense density matrix.
pub const DENSITY_LIMIT: u128 = 4096;

/// A density operator on `n` qudits of dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseDensity<T: Real = f64> {
    n_sites: usize,
    d: usize,
    matrix: Matrix<T>,
}

impl<T: Real> DenseDensity<T> {
    pub fn new(n_sites: usize, d: usize, matrix: Matrix<T>) -> Result<Self> {
        let dim = checked_dim(n_sites, d)?;
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: matrix.rows(),
            });
        }
        Ok(Self { n_sites, d, matrix })
    }

    /// `|ψ⟩⟨ψ|` without normalization.
    pub fn pure(n_sites: usize, d: usize, psi: &Vector<T>) -> Result<Self> {
        Self::new(n_sites, d, psi.projector())
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    /// Divides by the trace; `None` when the trace vanishes.
    pub fn normalized(&self) -> Option<Self> {
        let t = self.trace();
        (t > T::epsilon()).then(|| Self {
            matrix: self.matrix.scale_real(t.recip()),
            ..self.clone()
        })
    }

    fn stride(&self, site: usize) -> usize {
        self.d.pow(site as u32)
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_sites {
            return Err(invalid("site", format!("site must be below {}", self.n_sites)));
        }
        Ok(())
    }

    /// `(I ⊗ op ⊗ I)·M` with `op` acting on `site`.
    fn left_site(&self, op: &Matrix<T>, site: usize, m: &Matrix<T>) -> Matrix<T> {
        let (d, st) = (self.d, self.stride(site));
        Matrix::from_fn(m.rows(), m.cols(), |i, j| {
            let ki = (i / st) % d;
            let base = i - ki * st;
            (0..d).fold(Complex::zero(), |acc, k| acc + op[(ki, k)] * m[(base + k * st, j)])
        })
    }

    /// `(I ⊗ op ⊗ I)·M·(I ⊗ op ⊗ I)†`.
    fn conjugate_site(&self, op: &Matrix<T>, site: usize) -> Matrix<T> {
        let left = self.left_site(op, site, &self.matrix);
        self.left_site(op, site, &left.dagger()).dagger()
    }

    /// Traces out `site`, returning a state on the remaining sites in their original order.
    pub fn partial_trace(&self, site: usize) -> Result<Self> {
        self.check_site(site)?;
        if self.n_sites == 1 {
            return Err(invalid("site", "cannot trace out the only site"));
        }
        let (d, st) = (self.d, self.stride(site));
        let small = self.matrix.rows() / d;
        let lift = |i: usize, k: usize| (i / st) * st * d + k * st + i % st;
        let m = Matrix::from_fn(small, small, |i, j| {
            (0..d).fold(Complex::zero(), |acc, k| acc + self.matrix[(lift(i, k), lift(j, k))])
        });
        Ok(Self {
            n_sites: self.n_sites - 1,
            d,
            matrix: m,
        })
    }
}

fn checked_dim(n_sites: usize, d: usize) -> Result<usize> {
    let requested = (d as u128).checked_pow(n_sites as u32).unwrap_or(u128::MAX);
    if requested > DENSITY_LIMIT {
        return Err(Error::SizeGuard {
            what: "dense density matrix",
            requested,
            limit: DENSITY_LIMIT,
        });
    }
    Ok(requested as usize)
}

/// `ρ ↦ Σ_j (I ⊗ F_j ⊗ I) ρ (I ⊗ F_j ⊗ I)†`.
pub fn apply_channel_at<T: Real>(rho: &DenseDensity<T>, site: usize, ch: &KrausChannel<T>) -> Result<DenseDensity<T>> {
    rho.check_site(site)?;
    if ch.dim() != rho.d {
        return Err(Error::DimensionMismatch {
            expected: rho.d,
            actual: ch.dim(),
        });
    }
    let n = rho.matrix.rows();
    let matrix = ch
        .kraus()
        .iter()
        .fold(Matrix::zeros(n, n), |acc, f| &acc + &rho.conjugate_site(f, site));
    Ok(DenseDensity { matrix, ..rho.clone() })
}

/// One Born-rule branch of a projective measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch<T: Real = f64> {
    pub outcome: usize,
    pub probability: T,
    /// `P ρ P`, unnormalized.
    pub unnormalized: DenseDensity<T>,
    /// `P ρ P / p`; `None` on a zero-probability branch.
    pub state: Option<DenseDensity<T>>,
}

impl<T: Real> Branch<T> {
    pub fn zero_probability(&self) -> bool {
        self.state.is_none()
    }
}

/// Projects `site` onto each `|m_s⟩`. Probabilities are relative to `tr ρ`.
pub fn measure_at<T: Real>(rho: &DenseDensity<T>, site: usize, basis: &MeasurementBasis<T>) -> Result<Vec<Branch<T>>> {
    rho.check_site(site)?;
    if basis.d() != rho.d {
        return Err(Error::DimensionMismatch {
            expected: rho.d,
            actual: basis.d(),
        });
    }
    let total = rho.trace();
    let floor = T::epsilon() * T::lit(1e3) * total.abs().max(T::one());
    Ok(basis
        .vectors()
        .iter()
        .enumerate()
        .map(|(outcome, m)| {
            let proj = m.projector();
            let post = DenseDensity {
                matrix: rho.conjugate_site(&proj, site),
                ..rho.clone()
            };
            let weight = post.trace();
            let probability = if total > T::zero() { weight / total } else { T::zero() };
            let state = (weight > floor).then(|| post.normalized()).flatten();
            Branch {
                outcome,
                probability,
                unnormalized: post,
                state,
            }
        })
        .collect())
}

/// Correlation-space maps recovered from dense simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction<T: Real = f64> {
    /// One action table per outcome.
    pub per_outcome: Vec<SuperOperator<T>>,
    /// Sum over outcomes.
    pub mixed: SuperOperator<T>,
    /// Condition number of the boundary map used to invert `W`.
    pub condition_number: T,
}

/// Reconstructs `ρ ↦ Σ_j E_{j,s} ρ E†_{j,s}` for each outcome by dense simulation:
/// prepare `|R⟩` from a polarization set, apply `ch` on site 0, project onto
/// `|m_s⟩`, trace out site 0 and invert `W` on the remaining `n − 1` sites.
pub fn reconstruct_induced_map<T: Real>(
    mps: &ResourceMps<T>,
    ch: &KrausChannel<T>,
    basis: &MeasurementBasis<T>,
    n: usize,
) -> Result<Reconstruction<T>> {
    if n < 2 {
        return Err(invalid("n", "need at least two sites"));
    }
    let d = mps.d();
    let bond = mps.bond_dim();
    checked_dim(n, d)?;
    let chain = mps.clone().with_sites(n)?;
    let v = chain.boundary_map(n - 1)?;
    let condition_number = v.condition_number()?;
    if condition_number.is_nan() || condition_number >= T::lit(1e8) {
        return Err(Error::IllConditioned {
            condition: condition_number.as_f64(),
        });
    }
    let v_plus = v.left_inverse()?;

    // images[s] of Φ_s(ψψ†) for each preparation ψ
    let run = |psi: &Vector<T>| -> Result<Vec<Matrix<T>>> {
        let dense = chain.clone().with_right(psi.clone())?.to_dense()?;
        let rho = DenseDensity::pure(n, d, &dense.amplitudes)?;
        let noisy = apply_channel_at(&rho, 0, ch)?;
        measure_at(&noisy, 0, basis)?
            .into_iter()
            .map(|b| {
                let sigma = b.unnormalized.partial_trace(0)?;
                Ok(&(&v_plus * sigma.matrix()) * &v_plus.dagger())
            })
            .collect()
    };

    let e = |a: usize| Vector::<T>::basis(bond, a);
    let diag: Vec<Vec<Matrix<T>>> = (0..bond).map(|a| run(&e(a))).collect::<Result<_>>()?;
    let mut tables: Vec<Vec<Matrix<T>>> = vec![vec![Matrix::zeros(bond, bond); bond * bond]; d];
    for a in 0..bond {
        for (s, table) in tables.iter_mut().enumerate() {
            table[a * bond + a] = diag[a][s].clone();
        }
    }
    let i_unit = Complex::new(T::zero(), T::one());
    let half = T::lit(0.5);
    for a in 0..bond {
        for b in a + 1..bond {
            let plus = run(&e(a).axpy(Complex::new(T::one(), T::zero()), &e(b)))?;
            let iplus = run(&e(a).axpy(i_unit, &e(b)))?;
            for (s, table) in tables.iter_mut().enumerate() {
                let base = &diag[a][s] + &diag[b][s];
                let s1 = &plus[s] - &base;
                let s2 = &iplus[s] - &base;
                table[a * bond + b] = (&s1 + &s2.scale(i_unit)).scale_real(half);
                table[b * bond + a] = (&s1 - &s2.scale(i_unit)).scale_real(half);
            }
        }
    }

    let per_outcome = tables
        .into_iter()
        .map(|t| SuperOperator::action_table(bond, bond, t))
        .collect::<Result<Vec<_>>>()?;
    let mixed_images = (0..bond * bond)
        .map(|i| {
            per_outcome.iter().fold(Matrix::zeros(bond, bond), |acc, so| match so {
                SuperOperator::ActionTable { images, .. } => &acc + &images[i],
                SuperOperator::Kraus { .. } => unreachable!(),
            })
        })
        .collect();
    Ok(Reconstruction {
        mixed: SuperOperator::action_table(bond, bond, mixed_images)?,
        per_outcome,
        condition_number,
    })
}

/// Distances between the dense reconstruction and the analytic induced maps.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OracleComparison {
    /// Choi Frobenius distance for the outcome-mixed map.
    pub mixed_distance: f64,
    /// Largest Choi Frobenius distance over single outcomes.
    pub max_outcome_distance: f64,
    pub condition_number: f64,
}

impl OracleComparison {
    pub fn max_distance(&self) -> f64 {
        self.mixed_distance.max(self.max_outcome_distance)
    }
}

pub fn compare_with_analytic<T: Real>(
    mps: &ResourceMps<T>,
    ch: &KrausChannel<T>,
    basis: &MeasurementBasis<T>,
    n: usize,
) -> Result<OracleComparison> {
    let rec = reconstruct_induced_map(mps, ch, basis, n)?;
    let im = induced_kraus(mps, ch, basis)?;
    let mixed_distance = rec.mixed.choi().frobenius_distance(&mixed_map(&im).choi())?;
    let mut max_outcome_distance = T::zero();
    for (s, so) in rec.per_outcome.iter().enumerate() {
        let analytic = SuperOperator::kraus(im.bond_dim(), im.bond_dim(), im.outcome(s).to_vec())?;
        max_outcome_distance = max_outcome_distance.max(so.choi().frobenius_distance(&analytic.choi())?);
    }
    Ok(OracleComparison {
        mixed_distance: mixed_distance.as_f64(),
        max_outcome_distance: max_outcome_distance.as_f64(),
        condition_number: rec.condition_number.as_f64(),
    })
}

/// The Kraus operator belonging to the largest Choi eigenvalue, scaled by its
/// square root. For a rank-one map this is the map's single Kraus operator up to phase.
pub fn dominant_kraus<T: Real>(so: &SuperOperator<T>) -> Result<Matrix<T>> {
    let choi = so.choi();
    let eig = choi.matrix.eigen()?;
    let top = eig.max().max(T::zero()).sqrt();
    let k = eig.vectors.column(eig.values.len() - 1);
    let din = so.din();
    Ok(Matrix::from_fn(so.dout(), din, |x, a| k[x * din + a] * top))
}

/// `|⟨A, B⟩| / (‖A‖_F ‖B‖_F)`: 1 exactly when `A ∝ B`.
pub fn proportionality<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> T {
    let inner = (&a.dagger() * b).trace().norm();
    let denom = a.frobenius() * b.frobenius();
    if denom.is_zero() {
        T::zero()
    } else {
        inner / denom
    }
}

/// A seeded random `(resource, channel, basis)` triple with `D = 2` and `d ∈ {2, 3}`.
pub fn random_triple(seed: u64) -> Result<(ResourceMps, KrausChannel, MeasurementBasis)> {
    let mut rng = seeded_rng(seed);
    let d = if rng.random_bool(0.5) { 2 } else { 3 };
    let theta = rng.random_range(0.2..std::f64::consts::PI - 0.2);
    let phi = rng.random_range(0.0..std::f64::consts::TAU);
    let rank = rng.random_range(1..=3usize);
    let mps = ResourceMps::random_resource(d, 2, theta, phi, seed)?;
    let ch = KrausChannel::random_cptp(d, rank, seed ^ 0x5eed)?;
    let basis = MeasurementBasis::random(d, seed.wrapping_add(1));
    Ok((mps, ch, basis))
}

/// Runs [`compare_with_analytic`] on `count` random triples starting at `seed`.
pub fn oracle_sweep(n: usize, seed: u64, count: usize) -> Result<Vec<OracleComparison>> {
    (0..count as u64)
        .map(|i| {
            let (mps, ch, basis) = random_triple(seed.wrapping_add(i))?;
            compare_with_analytic(&mps, &ch, &basis, n)
        })
        .collect()
}

/// Check used by the tests and the CLI: the reconstructed map after `U_{1↔2}`
/// and outcome `|2⟩` on AKLT, as a unit-norm operator compared with `XZ`.
pub fn swap_outcome_two_operator(n: usize, theta: f64, phi: f64) -> Result<(Matrix, f64)> {
    let mps = ResourceMps::<f64>::aklt();
    let ch = KrausChannel::swap_error(1, 2, 3)?;
    let basis = MeasurementBasis::from_angles(theta, phi, 3)?;
    let rec = reconstruct_induced_map(&mps, &ch, &basis, n)?;
    let k = dominant_kraus(&rec.per_outcome[2])?;
    let norm = k.operator_norm()?;
    let k = k.scale_real(norm.recip());
    let target = crate::linalg::pauli::xz::<f64>();
    let overlap = proportionality(&k, &target);
    Ok((k, overlap))
}
