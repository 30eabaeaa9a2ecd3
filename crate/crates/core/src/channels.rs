//! Single-qudit error channels `ρ ↦ Σ_j F_j ρ F_j†`.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::correlation::{alpha_vector, beta_vector};
use crate::error::{invalid, Error, Result};
use crate::linalg::{random_isometry, seeded_rng, Matrix, Tolerance, Vector};
use crate::resource::check_theta;
use crate::scalar::{cis, Real};

/// A complete set of Kraus operators on one physical qudit.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel<T: Real = f64> {
    dim: usize,
    kraus: Vec<Matrix<T>>,
}

impl<T: Real> KrausChannel<T> {
    /// Checks `Σ F†F = I` within the construction tolerance.
    pub fn new(kraus: Vec<Matrix<T>>) -> Result<Self> {
        Self::with_tolerance(kraus, Tolerance::construct())
    }

    pub fn with_tolerance(kraus: Vec<Matrix<T>>, tol: Tolerance<T>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| invalid("kraus", "at least one Kraus operator required"))?;
        let dim = first.ensure_square()?;
        for f in &kraus {
            if f.rows() != dim || f.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: f.rows().max(f.cols()),
                });
            }
        }
        let ch = Self { dim, kraus };
        let deviation = ch.completeness_defect();
        if deviation.is_nan() || deviation > tol.eps() {
            return Err(Error::IncompleteChannel {
                deviation: deviation.as_f64(),
            });
        }
        Ok(ch)
    }

    pub fn unitary(u: Matrix<T>) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dim: d,
            kraus: vec![Matrix::identity(d)],
        }
    }

    /// `U_{a↔b}`: exchanges the levels `|a⟩` and `|b⟩`.
    pub fn swap_error(a: usize, b: usize, d: usize) -> Result<Self> {
        Self::unitary(swap_matrix(a, b, d)?)
    }

    /// `V^s` with `V = Σ_p e^{-iωp}|p⟩⟨p|`, `ω = 2π/d`.
    pub fn phase_error(d: usize, s: usize) -> Result<Self> {
        Self::unitary(phase_matrix(d, s)?)
    }

    /// The unitary error used to show that outcome mixing does not rescue the AKLT protocol:
    /// `F₁ = U_M ( |+⟩⟨0| − |−⟩⟨1| + |2⟩⟨2| )`. Only defined for qutrits.
    pub fn f1_error(theta: T, phi: T, d: usize) -> Result<Self> {
        if d != 3 {
            return Err(invalid("d", "F1 is defined for qutrits only"));
        }
        let h = T::lit(0.5).sqrt();
        let inner = Matrix::from_real(&[[1.0, -1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let inner = Matrix::from_fn(3, 3, |i, j| if i < 2 && j < 2 { inner[(i, j)] * h } else { inner[(i, j)] });
        Self::unitary(&basis_rotation(theta, phi, d)? * &inner)
    }

    /// Kraus operators taken as the `d x d` blocks of a Haar-random isometry `C^d → C^{w·d}`.
    pub fn random_cptp(d: usize, rank: usize, seed: u64) -> Result<Self> {
        if d == 0 {
            return Err(invalid("d", "dimension must be positive"));
        }
        if rank == 0 {
            return Err(invalid("rank", "Kraus rank must be at least 1"));
        }
        let v = random_isometry::<T>(rank * d, d, &mut seeded_rng(seed));
        Ok(Self {
            dim: d,
            kraus: (0..rank).map(|j| v.row_block(j * d, d)).collect(),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.kraus.len()
    }

    pub fn kraus(&self) -> &[Matrix<T>] {
        &self.kraus
    }

    /// `‖Σ F†F − I‖_max`.
    pub fn completeness_defect(&self) -> T {
        let sum = self
            .kraus
            .iter()
            .fold(Matrix::zeros(self.dim, self.dim), |acc, f| &acc + &(&f.dagger() * f));
        sum.max_diff(&Matrix::identity(self.dim))
    }

    /// Apply `other` after `self`.
    pub fn then(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        let kraus = other
            .kraus
            .iter()
            .flat_map(|g| self.kraus.iter().map(move |f| g * f))
            .collect();
        Ok(Self { dim: self.dim, kraus })
    }

    pub fn apply(&self, rho: &Matrix<T>) -> Result<Matrix<T>> {
        if rho.rows() != self.dim || rho.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: rho.rows(),
            });
        }
        Ok(self
            .kraus
            .iter()
            .fold(Matrix::zeros(self.dim, self.dim), |acc, f| &acc + &(&(f * rho) * &f.dagger())))
    }
}

pub fn swap_matrix<T: Real>(a: usize, b: usize, d: usize) -> Result<Matrix<T>> {
    if a == b {
        return Err(invalid("b", "swap levels must differ"));
    }
    if a >= d || b >= d {
        return Err(invalid("a", format!("levels must be below d = {d}")));
    }
    let target = |k: usize| if k == a { b } else if k == b { a } else { k };
    Ok(Matrix::from_fn(d, d, |i, j| if i == target(j) { Complex::one() } else { Complex::zero() }))
}

pub fn phase_matrix<T: Real>(d: usize, s: usize) -> Result<Matrix<T>> {
    if d < 2 {
        return Err(invalid("d", "dimension must be at least 2"));
    }
    let omega = T::TAU() / T::from_usize(d).unwrap();
    // reduce p·s mod d so large powers stay exact
    let diag: Vec<Complex<T>> = (0..d)
        .map(|p| cis(-omega * T::from_usize((p * s) % d).unwrap()))
        .collect();
    Ok(Matrix::diag(&diag))
}

/// `U_M = |α_{θ,φ}⟩⟨0| + |β_{θ,φ}⟩⟨1| + Σ_{k≥2} |k⟩⟨k|`.
pub fn basis_rotation<T: Real>(theta: T, phi: T, d: usize) -> Result<Matrix<T>> {
    check_theta(theta)?;
    if d < 2 {
        return Err(invalid("d", "dimension must be at least 2"));
    }
    let cols: Vec<Vector<T>> = (0..d)
        .map(|k| match k {
            0 => alpha_vector(theta, phi, d),
            1 => beta_vector(theta, phi, d),
            _ => Vector::basis(d, k),
        })
        .collect();
    Ok(Matrix::from_columns(&cols))
}
