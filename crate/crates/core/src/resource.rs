//! Matrix-product resource states.
//!
//! A chain of `N` qudits with amplitudes
//! `⟨k_N,…,k_1|Ψ⟩ = ⟨L|A[k_N]⋯A[k_1]|R⟩`. Site 1 is the one next to `|R⟩`
//! and is the first to be measured. Dense basis indices put `k_1` in the least
//! significant digit: `index = k_1 + d·k_2 + … + d^{N-1}·k_N`.

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::correlation::{branch_operator, MeasurementBasis};
use crate::error::{invalid, Error, Result};
use crate::linalg::{haar_unitary, pauli, seeded_rng, Matrix, Tolerance, Vector};
use crate::scalar::{cis, Real};

/// Upper bound on `d^N` for [`ResourceMps::to_dense`].
pub const DENSE_LIMIT: u128 = 1_000_000;
/// Upper bound on `d^(N-r+1)` for [`ResourceMps::conditional_w`].
pub const W_LIMIT: u128 = 1_000;

pub const DEFAULT_SITES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct ResourceMps<T: Real = f64> {
    tensors: Vec<Matrix<T>>,
    /// Coefficients of the bra `⟨L|`.
    left: Vector<T>,
    right: Vector<T>,
    n_sites: usize,
}

impl<T: Real> ResourceMps<T> {
    pub fn new(tensors: Vec<Matrix<T>>, left: Vector<T>, right: Vector<T>, n_sites: usize) -> Result<Self> {
        if tensors.len() < 2 {
            return Err(invalid("d", "physical dimension must be at least 2"));
        }
        let bond = tensors[0].rows();
        if bond == 0 {
            return Err(invalid("D", "bond dimension must be at least 1"));
        }
        for t in &tensors {
            if t.rows() != bond || t.cols() != bond {
                return Err(Error::DimensionMismatch {
                    expected: bond,
                    actual: if t.rows() != bond { t.rows() } else { t.cols() },
                });
            }
        }
        for v in [&left, &right] {
            if v.dim() != bond {
                return Err(Error::DimensionMismatch {
                    expected: bond,
                    actual: v.dim(),
                });
            }
        }
        if n_sites == 0 {
            return Err(invalid("n_sites", "chain needs at least one site"));
        }
        Ok(Self {
            tensors,
            left,
            right,
            n_sites,
        })
    }

    /// AKLT chain: `A[0] = X/√3`, `A[1] = XZ/√3`, `A[2] = Z/√3`.
    pub fn aklt() -> Self {
        let s = T::lit(3.0).sqrt().recip();
        let tensors = vec![pauli::x(), pauli::xz(), pauli::z()]
            .into_iter()
            .map(|m: Matrix<T>| m.scale_real(s))
            .collect();
        Self::new(tensors, Vector::basis(2, 0), Vector::basis(2, 0), DEFAULT_SITES)
            .expect("AKLT tensors are well formed")
    }

    /// One-dimensional cluster state: `A[0] = |0⟩⟨+|`, `A[1] = |1⟩⟨−|`.
    ///
    /// With `⟨L| = ⟨0| + ⟨1|` and `|R⟩ = |0⟩` the dense state is exactly the
    /// CZ chain applied to `|+⟩^{⊗N}`.
    pub fn cluster_1d() -> Self {
        let h = T::lit(0.5).sqrt();
        let a0 = Matrix::from_fn(2, 2, |i, _| if i == 0 { Complex::new(h, T::zero()) } else { Complex::zero() });
        let a1 = Matrix::from_fn(2, 2, |i, j| match (i, j) {
            (1, 0) => Complex::new(h, T::zero()),
            (1, 1) => Complex::new(-h, T::zero()),
            _ => Complex::zero(),
        });
        Self::new(vec![a0, a1], Vector::from_real(&[1.0, 1.0]), Vector::basis(2, 0), DEFAULT_SITES)
            .expect("cluster tensors are well formed")
    }

    /// Random resource whose `M_{θ,φ}` branch operators are exactly `c·U`.
    ///
    /// Draws Haar unitaries `U_α, U_β, U_2, …` and positive constants with
    /// `Σc² = 1`, then undoes the basis change to recover `A[0]` and `A[1]`.
    pub fn random_resource(d: usize, bond: usize, theta: T, phi: T, seed: u64) -> Result<Self> {
        use rand::Rng as _;
        if d < 2 {
            return Err(invalid("d", "physical dimension must be at least 2"));
        }
        if bond == 0 {
            return Err(invalid("D", "bond dimension must be at least 1"));
        }
        check_theta(theta)?;
        let mut rng = seeded_rng(seed);
        let weights: Vec<f64> = (0..d).map(|_| rng.random_range(0.2..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let branches: Vec<Matrix<T>> = weights
            .iter()
            .map(|w| haar_unitary::<T>(bond, &mut rng).scale_real(T::lit((w / total).sqrt())))
            .collect();

        let half = theta / T::lit(2.0);
        let (c, s) = (half.cos(), half.sin());
        let a0 = &branches[0].scale_real(c) + &branches[1].scale_real(s);
        let a1 = (&branches[0].scale_real(s) - &branches[1].scale_real(c)).scale(cis(phi));
        let mut tensors = vec![a0, a1];
        tensors.extend(branches.into_iter().skip(2));
        Self::new(tensors, Vector::basis(bond, 0), Vector::basis(bond, 0), DEFAULT_SITES)
    }

    pub fn with_sites(mut self, n_sites: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(invalid("n_sites", "chain needs at least one site"));
        }
        self.n_sites = n_sites;
        Ok(self)
    }

    pub fn with_boundaries(self, left: Vector<T>, right: Vector<T>) -> Result<Self> {
        Self::new(self.tensors, left, right, self.n_sites)
    }

    pub fn with_right(self, right: Vector<T>) -> Result<Self> {
        let left = self.left.clone();
        self.with_boundaries(left, right)
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.tensors.len()
    }

    #[inline]
    pub fn bond_dim(&self) -> usize {
        self.tensors[0].rows()
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn tensors(&self) -> &[Matrix<T>] {
        &self.tensors
    }

    pub fn tensor(&self, k: usize) -> &Matrix<T> {
        &self.tensors[k]
    }

    pub fn left(&self) -> &Vector<T> {
        &self.left
    }

    pub fn right(&self) -> &Vector<T> {
        &self.right
    }

    /// `Σ_k A†[k]A[k]`.
    pub fn completeness(&self) -> Matrix<T> {
        self.tensors
            .iter()
            .fold(Matrix::zeros(self.bond_dim(), self.bond_dim()), |acc, a| &acc + &(&a.dagger() * a))
    }

    /// Checks that every `M_{θ,φ}` branch operator is unitary up to a constant.
    pub fn validate(&self, theta: T, phi: T, tol: Tolerance<T>) -> Result<ValidationReport<T>> {
        let basis = MeasurementBasis::from_angles(theta, phi, self.d())?;
        let mut branches = Vec::with_capacity(self.d());
        for s in 0..self.d() {
            let op = branch_operator(self, basis.vector(s))?;
            let scale = op.unitary_up_to_scale(tol)?;
            branches.push(BranchReport {
                label: basis.label(s),
                scale,
                unitary: scale.is_some(),
            });
        }
        let normalization_c = branches.iter().filter_map(|b| b.scale).map(|c| c * c).sum::<T>();
        let valid = branches.iter().all(|b| b.unitary) && (normalization_c - T::one()).abs() <= tol.eps();
        Ok(ValidationReport {
            theta,
            phi,
            branches,
            normalization_c,
            valid,
        })
    }

    /// Expands to `|Ψ⟩` without renormalizing.
    pub fn to_dense(&self) -> Result<DenseState<T>> {
        let amps = self.chain_amplitudes(&self.right, self.n_sites, DENSE_LIMIT, "dense state")?;
        Ok(DenseState {
            n_sites: self.n_sites,
            d: self.d(),
            amplitudes: Vector::from_vec(amps),
        })
    }

    /// `W(|ψ⟩)_r`: the unnormalized operator on sites `r..=N` (1-based `r`).
    ///
    /// Its basis index puts `k_r` in the least significant digit.
    pub fn conditional_w(&self, psi: &Vector<T>, r: usize) -> Result<Matrix<T>> {
        if psi.dim() != self.bond_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.bond_dim(),
                actual: psi.dim(),
            });
        }
        if r == 0 || r > self.n_sites {
            return Err(invalid("r", format!("site must lie in 1..={}", self.n_sites)));
        }
        let w = Vector::from_vec(self.chain_amplitudes(psi, self.n_sites - r + 1, W_LIMIT, "W operator")?);
        Ok(w.projector())
    }

    /// The isometry-like map `V: |ψ⟩ ↦ (⟨L|A[k_m]⋯A[k_1]|ψ⟩)_k` over `sites` sites.
    ///
    /// `W(|ψ⟩)` over the same sites equals `V|ψ⟩⟨ψ|V†`.
    pub fn boundary_map(&self, sites: usize) -> Result<Matrix<T>> {
        let bond = self.bond_dim();
        let cols: Vec<Vector<T>> = (0..bond)
            .map(|b| {
                self.chain_amplitudes(&Vector::basis(bond, b), sites, DENSE_LIMIT, "boundary map")
                    .map(Vector::from_vec)
            })
            .collect::<Result<_>>()?;
        Ok(Matrix::from_columns(&cols))
    }

    fn chain_amplitudes(
        &self,
        start: &Vector<T>,
        sites: usize,
        limit: u128,
        what: &'static str,
    ) -> Result<Vec<Complex<T>>> {
        let requested = (self.d() as u128).checked_pow(sites as u32).unwrap_or(u128::MAX);
        if requested > limit {
            return Err(Error::SizeGuard { what, requested, limit });
        }
        let mut layer = vec![start.clone()];
        for _ in 0..sites {
            let stride = layer.len();
            let mut next = vec![Vector::zeros(0); stride * self.d()];
            for (k, a) in self.tensors.iter().enumerate() {
                for (idx, v) in layer.iter().enumerate() {
                    next[idx + stride * k] = a.apply(v)?;
                }
            }
            layer = next;
        }
        Ok(layer.iter().map(|v| bra_apply(&self.left, v)).collect())
    }
}

fn bra_apply<T: Real>(bra: &Vector<T>, ket: &Vector<T>) -> Complex<T> {
    bra.entries()
        .iter()
        .zip(ket.entries())
        .fold(Complex::zero(), |acc, (a, b)| acc + a * b)
}

pub(crate) fn check_theta<T: Real>(theta: T) -> Result<()> {
    if !(theta > T::zero() && theta < T::PI()) {
        return Err(invalid("theta", "polar angle must satisfy 0 < theta < pi"));
    }
    Ok(())
}

/// Dense amplitudes of a resource chain.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState<T: Real = f64> {
    pub n_sites: usize,
    pub d: usize,
    pub amplitudes: Vector<T>,
}

impl<T: Real> DenseState<T> {
    pub fn norm(&self) -> T {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Option<Vector<T>> {
        self.amplitudes.normalized()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchReport<T: Real = f64> {
    pub label: String,
    /// `c` with `A[m]†A[m] = c²·I`, when it exists.
    pub scale: Option<T>,
    pub unitary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport<T: Real = f64> {
    pub theta: T,
    pub phi: T,
    pub branches: Vec<BranchReport<T>>,
    /// `Σ c²` over the branches that passed.
    pub normalization_c: T,
    pub valid: bool,
}

impl<T: Real> ValidationReport<T> {
    pub fn failing_branch(&self) -> Option<&str> {
        self.branches.iter().find(|b| !b.unitary).map(|b| b.label.as_str())
    }

    pub fn require_valid(&self) -> Result<()> {
        match self.failing_branch() {
            Some(label) => Err(Error::BranchNotUnitary { branch: label.to_owned() }),
            None if !self.valid => Err(invalid(
                "normalization",
                format!("sum of squared branch constants is {}", self.normalization_c),
            )),
            None => Ok(()),
        }
    }
}
