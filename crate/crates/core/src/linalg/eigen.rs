//! Cyclic complex Jacobi eigensolver for Hermitian matrices.

use num_complex::Complex;
use num_traits::Zero;

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `M = V·diag(λ)·V†` of a Hermitian matrix.
///
/// Eigenvalues are sorted ascending; column `k` of `vectors` belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real = f64> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// Decomposes the Hermitian part of `m`; the anti-Hermitian part is ignored.
    pub fn new(m: &Matrix<T>) -> Result<Self> {
        let n = m.ensure_square()?;
        let half = T::lit(0.5);
        let mut a = Matrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * half);
        let mut v = Matrix::identity(n);

        let scale = a.frobenius().max(T::min_positive_value());
        let thresh = scale * T::epsilon() * T::from_usize(n.max(1)).unwrap();

        let mut converged = n < 2;
        for _ in 0..MAX_SWEEPS {
            let off: T = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum::<T>()
                .sqrt();
            if off <= thresh {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
        if !converged {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| a[(x, x)].re.partial_cmp(&a[(y, y)].re).unwrap());
        let values = order.iter().map(|&k| a[(k, k)].re).collect();
        let vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
        Ok(Self { values, vectors })
    }

    pub fn min(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::zero)
    }
}

/// One Jacobi rotation zeroing `a[p,q]`; `J = diag(1, ē)·R(θ)` on the `(p,q)` plane.
fn rotate<T: Real>(a: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize) {
    let g = a[(p, q)];
    let b = g.norm();
    if b.is_zero() {
        return;
    }
    let e = g / b;
    let tau = (a[(q, q)].re - a[(p, p)].re) / (b + b);
    let sgn = if tau >= T::zero() { T::one() } else { -T::one() };
    let t = sgn / (tau.abs() + (T::one() + tau * tau).sqrt());
    let c = (T::one() + t * t).sqrt().recip();
    let s = t * c;
    let ec = e.conj();
    let n = a.rows();

    // A ← A·J
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * c - ec * akq * s;
        a[(k, q)] = akp * s + ec * akq * c;
    }
    // A ← J†·A
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = apk * c - e * aqk * s;
        a[(q, k)] = apk * s + e * aqk * c;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
    // V ← V·J
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * c - ec * vkq * s;
        v[(k, q)] = vkp * s + ec * vkq * c;
    }
}
