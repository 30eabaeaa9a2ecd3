//! Dense complex matrices and vectors.
//!
//! Everything here is small (dimension at most a few hundred), row-major and
//! immutable once built. Equality is always tolerance based on the max-norm.

mod eigen;
mod random;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

pub use eigen::HermitianEigen;
pub use random::{gaussian_matrix, haar_unitary, random_isometry, seeded_rng, Rng};

/// Absolute max-norm tolerance.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Tolerance<T: Real = f64>(T);

impl<T: Real> Tolerance<T> {
    pub fn new(abs_eps: T) -> Result<Self> {
        if !abs_eps.is_finite() || abs_eps < T::zero() {
            return Err(invalid("abs_eps", "tolerance must be finite and nonnegative"));
        }
        Ok(Self(abs_eps))
    }

    /// Default for verification checks (`1e-9`).
    pub fn verify() -> Self {
        Self(T::lit(1e-9))
    }

    /// Default for construction-time checks (`1e-12`).
    ///
    /// For `f32` this is clamped to a few ulps so that constructions still succeed.
    pub fn construct() -> Self {
        Self(T::lit(1e-12).max(T::epsilon() * T::lit(64.0)))
    }

    #[inline]
    pub fn eps(self) -> T {
        self.0
    }
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self::verify()
    }
}

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix<T: Real = f64> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

/// Dense complex column vector.
#[derive(Clone, PartialEq)]
pub struct Vector<T: Real = f64> {
    data: Vec<Complex<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Complex::one() } else { Complex::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from complex rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// Builds a matrix from real `f64` rows. Panics on ragged input.
    pub fn from_real<const C: usize>(rows: &[[f64; C]]) -> Self {
        Self::from_fn(rows.len(), C, |i, j| Complex::new(T::lit(rows[i][j]), T::zero()))
    }

    pub fn diag(entries: &[Complex<T>]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { Complex::zero() })
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &Vector<T>, v: &Vector<T>) -> Self {
        Self::from_fn(u.dim(), v.dim(), |i, j| u[i] * v[j].conj())
    }

    /// The matrix unit `|a⟩⟨b|` of an `n x n` space.
    pub fn unit(n: usize, a: usize, b: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(a, b)] = Complex::one();
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub(crate) fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    /// Entrywise conversion to double precision.
    pub fn map_to_f64(&self) -> Matrix<f64> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| Complex::new(z.re.as_f64(), z.im.as_f64())).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = (other.rows, other.cols);
        Self::from_fn(self.rows * p, self.cols * q, |i, j| {
            self[(i / p, j / q)] * other[(i % p, j % q)]
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: other.rows,
            });
        }
        Ok(self.matmul_unchecked(other))
    }

    fn matmul_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d = *d + a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &Vector<T>) -> Result<Vector<T>> {
        if self.cols != v.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: v.dim(),
            });
        }
        Ok(Vector::from_vec(
            (0..self.rows)
                .map(|i| {
                    self.data[i * self.cols..(i + 1) * self.cols]
                        .iter()
                        .zip(&v.data)
                        .fold(Complex::zero(), |acc, (&a, &b)| acc + a * b)
                })
                .collect(),
        ))
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).fold(Complex::zero(), |acc, i| acc + self[(i, i)])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `‖self − other‖_max`. Panics when the shapes differ.
    pub fn max_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    pub fn approx_eq(&self, other: &Self, tol: Tolerance<T>) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols) && self.max_diff(other) <= tol.eps()
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Result<Self> {
        self.ensure_square()?;
        Ok((self + &self.dagger()).scale_real(T::lit(0.5)))
    }

    pub fn column(&self, j: usize) -> Vector<T> {
        Vector::from_vec((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn from_columns(cols: &[Vector<T>]) -> Self {
        let rows = cols.first().map_or(0, Vector::dim);
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    /// Rows `start..start + len` as a new matrix.
    pub fn row_block(&self, start: usize, len: usize) -> Self {
        Self::from_fn(len, self.cols, |i, j| self[(start + i, j)])
    }

    pub fn hermiticity_defect(&self) -> Result<T> {
        self.ensure_square()?;
        Ok(self.max_diff(&self.dagger()))
    }

    /// Hermitian and positive semidefinite within `tol`.
    pub fn is_hermitian_psd(&self, tol: Tolerance<T>) -> Result<bool> {
        if self.hermiticity_defect()? > tol.eps() {
            return Ok(false);
        }
        Ok(self.hermitian_part()?.eigen()?.min() >= -tol.eps())
    }

    /// Returns `c = tr(M)/n` when `M ≈ c·I` within `tol`.
    pub fn proportionality_to_identity(&self, tol: Tolerance<T>) -> Result<Option<Complex<T>>> {
        let n = self.ensure_square()?;
        if n == 0 {
            return Ok(None);
        }
        let c = self.trace() / T::from_usize(n).unwrap();
        Ok((self.max_diff(&Self::identity(n).scale(c)) <= tol.eps()).then_some(c))
    }

    /// Distance of `M` from the nearest multiple of the identity, `‖M − tr(M)/n·I‖_max`.
    pub fn identity_defect(&self) -> Result<T> {
        let n = self.ensure_square()?;
        let c = self.trace() / T::from_usize(n.max(1)).unwrap();
        Ok(self.max_diff(&Self::identity(n).scale(c)))
    }

    /// Returns `c > 0` with `M†M = c²·I` within `tol`.
    pub fn unitary_up_to_scale(&self, tol: Tolerance<T>) -> Result<Option<T>> {
        self.ensure_square()?;
        let gram = self.dagger().matmul_unchecked(self);
        Ok(gram
            .proportionality_to_identity(tol)?
            .map(|c| c.re)
            .filter(|&c2| c2 > tol.eps())
            .map(|c2| c2.sqrt()))
    }

    /// Spectral norm `σ_max`.
    pub fn operator_norm(&self) -> Result<T> {
        let gram = self.dagger().matmul_unchecked(self);
        Ok(gram.eigen()?.max().max(T::zero()).sqrt())
    }

    /// 2-norm condition number `σ_max / σ_min` (infinite when rank deficient).
    pub fn condition_number(&self) -> Result<T> {
        let gram = self.dagger().matmul_unchecked(self);
        let eig = gram.eigen()?;
        let (lo, hi) = (eig.min().max(T::zero()), eig.max().max(T::zero()));
        Ok(if lo <= T::zero() { T::infinity() } else { (hi / lo).sqrt() })
    }

    /// Inverse via Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.ensure_square()?;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs().max(T::min_positive_value());
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[(x, col)].norm().partial_cmp(&a[(y, col)].norm()).unwrap())
                .unwrap();
            if a[(pivot, col)].norm() <= scale * T::epsilon() * T::lit(16.0) {
                return Err(Error::Singular);
            }
            a.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let p = a[(col, col)].inv();
            for j in 0..n {
                a[(col, j)] = a[(col, j)] * p;
                inv[(col, j)] = inv[(col, j)] * p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let (acj, icj) = (a[(col, j)], inv[(col, j)]);
                    a[(r, j)] = a[(r, j)] - f * acj;
                    inv[(r, j)] = inv[(r, j)] - f * icj;
                }
            }
        }
        Ok(inv)
    }

    /// Moore-Penrose left inverse `(M†M)⁻¹M†` for full column rank `M`.
    pub fn left_inverse(&self) -> Result<Self> {
        let md = self.dagger();
        Ok(md.matmul_unchecked(self).inverse()?.matmul_unchecked(&md))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Integer matrix power.
    pub fn pow(&self, k: u32) -> Result<Self> {
        let n = self.ensure_square()?;
        Ok((0..k).fold(Self::identity(n), |acc, _| acc.matmul_unchecked(self)))
    }

    pub fn eigen(&self) -> Result<HermitianEigen<T>> {
        HermitianEigen::new(self)
    }
}

impl<T: Real> Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a, T: Real> Mul<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;

    /// Panics on inner-dimension mismatch; use [`Matrix::matmul`] for a checked product.
    fn mul(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "inner dimension mismatch");
        self.matmul_unchecked(rhs)
    }
}

impl<'a, T: Real> Add<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a, T: Real> Sub<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: Real> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|z| -z)
    }
}

impl<T: Real> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T: Real> Vector<T> {
    pub fn new(data: Vec<Complex<T>>) -> Result<Self> {
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { data })
    }

    pub(crate) fn from_vec(data: Vec<Complex<T>>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![Complex::zero(); dim],
        }
    }

    /// Computational basis vector `|k⟩` of dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[k] = Complex::one();
        v
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self {
            data: entries.iter().map(|&x| Complex::new(T::lit(x), T::zero())).collect(),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.data
            .iter()
            .zip(&other.data)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > T::zero()).then(|| self.scale(Complex::new(n.recip(), T::zero())))
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn axpy(&self, s: Complex<T>, other: &Self) -> Self {
        Self {
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + s * b).collect(),
        }
    }

    pub fn max_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> Matrix<T> {
        Matrix::outer(self, self)
    }
}

impl<T: Real> Index<usize> for Vector<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, i: usize) -> &Complex<T> {
        &self.data[i]
    }
}

impl<T: Real> fmt::Debug for Vector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.data.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)))
            .finish()
    }
}

/// The Pauli `X`, `Z` and identity on a qubit.
pub mod pauli {
    use super::Matrix;
    use crate::scalar::Real;

    pub fn x<T: Real>() -> Matrix<T> {
        Matrix::from_real(&[[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn z<T: Real>() -> Matrix<T> {
        Matrix::from_real(&[[1.0, 0.0], [0.0, -1.0]])
    }

    /// `XZ = |1⟩⟨0| − |0⟩⟨1|`.
    pub fn xz<T: Real>() -> Matrix<T> {
        Matrix::from_real(&[[0.0, -1.0], [1.0, 0.0]])
    }

    pub fn i2<T: Real>() -> Matrix<T> {
        Matrix::identity(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c, cr};

    type M = Matrix<f64>;

    fn tol() -> Tolerance {
        Tolerance::construct()
    }

    #[test]
    fn dagger_examples() {
        assert_eq!(M::identity(2).dagger(), M::identity(2));
        let n = M::from_real(&[[0.0, 1.0], [0.0, 0.0]]);
        assert_eq!(n.dagger(), M::from_real(&[[0.0, 0.0], [1.0, 0.0]]));
        let mut rng = seeded_rng(11);
        let g = gaussian_matrix::<f64>(3, 3, &mut rng);
        assert_eq!(g.dagger().dagger(), g);
        assert_eq!(g.dagger()[(0, 1)], g[(1, 0)].conj());
    }

    #[test]
    fn kron_examples() {
        assert_eq!(M::identity(2).kron(&M::identity(2)), M::identity(4));
        let d12 = M::diag(&[cr(1.0), cr(2.0)]);
        assert_eq!(
            d12.kron(&M::identity(2)),
            M::diag(&[cr(1.0), cr(1.0), cr(2.0), cr(2.0)])
        );
        let (x, z) = (pauli::x::<f64>(), pauli::z::<f64>());
        let k = x.kron(&z);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(k[(i, j)], x[(i / 2, j / 2)] * z[(i % 2, j % 2)]);
            }
        }
    }

    #[test]
    fn psd_examples() {
        assert!(M::identity(4).is_hermitian_psd(tol()).unwrap());
        assert!(!M::diag(&[cr(1.0), cr(-1.0)]).is_hermitian_psd(tol()).unwrap());
        let mut rng = seeded_rng(3);
        let g = gaussian_matrix::<f64>(4, 4, &mut rng);
        assert!((&g.dagger() * &g).is_hermitian_psd(tol()).unwrap());
        assert!(matches!(
            M::zeros(2, 3).is_hermitian_psd(tol()),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn proportionality_examples() {
        let c3 = M::identity(2).scale(cr(3.0)).proportionality_to_identity(tol()).unwrap();
        assert_eq!(c3, Some(cr(3.0)));
        let d = M::diag(&[cr(1.0), cr(2.0)]);
        assert_eq!(d.proportionality_to_identity(tol()).unwrap(), None);
        // AKLT A[1] = XZ/√3 has A†A = I/3
        let a1 = pauli::xz::<f64>().scale_real(1.0 / 3f64.sqrt());
        let g = &a1.dagger() * &a1;
        let eta = g.proportionality_to_identity(tol()).unwrap().unwrap();
        assert!((eta - cr(1.0 / 3.0)).norm() < 1e-15);
        assert!(M::zeros(1, 2).proportionality_to_identity(tol()).is_err());
    }

    #[test]
    fn unitary_up_to_scale_examples() {
        let a0 = pauli::x::<f64>().scale_real(1.0 / 3f64.sqrt());
        let s = a0.unitary_up_to_scale(tol()).unwrap().unwrap();
        assert!((s - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        let proj = M::unit(2, 0, 0);
        assert_eq!(proj.unitary_up_to_scale(tol()).unwrap(), None);
        let mut rng = seeded_rng(5);
        let u = haar_unitary::<f64>(3, &mut rng);
        let s = u.scale_real(0.7).unitary_up_to_scale(tol()).unwrap().unwrap();
        assert!((s - 0.7).abs() < 1e-12);
        assert_eq!(M::zeros(2, 2).unitary_up_to_scale(tol()).unwrap(), None);
    }

    #[test]
    fn inverse_and_condition() {
        let m = M::from_rows(&[vec![c(1.0, 1.0), cr(2.0)], vec![cr(0.5), c(0.0, -3.0)]]);
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).approx_eq(&M::identity(2), tol()));
        assert_eq!(M::unit(2, 0, 0).inverse(), Err(Error::Singular));
        assert!((M::diag(&[cr(4.0), cr(1.0)]).condition_number().unwrap() - 4.0).abs() < 1e-12);
        assert!(M::unit(2, 0, 0).condition_number().unwrap().is_infinite());
    }

    #[test]
    fn operator_norm_matches_singular_value() {
        let k = M::unit(2, 0, 1).scale_real((2.0f64 / 3.0).sqrt());
        assert!((k.operator_norm().unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn f32_instantiation() {
        let a = pauli::xz::<f32>().scale_real(1.0 / 3f32.sqrt());
        let s = a.unitary_up_to_scale(Tolerance::new(1e-5).unwrap()).unwrap().unwrap();
        assert!((s - 1.0 / 3f32.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn tolerance_rejects_negative() {
        assert!(Tolerance::new(-1.0f64).is_err());
        assert!(Tolerance::new(f64::NAN).is_err());
        assert_eq!(Tolerance::<f64>::construct().eps(), 1e-12);
    }

    #[test]
    fn nonfinite_rejected() {
        assert_eq!(
            M::new(1, 1, vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        );
    }
}
