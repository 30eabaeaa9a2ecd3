//! Seeded random matrices: complex Gaussian, Haar unitaries and isometries.

use num_complex::Complex;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use super::{Matrix, Vector};
use crate::scalar::Real;

/// The crate's deterministic generator.
pub type Rng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

fn gaussian<T: Real>(rng: &mut Rng) -> Complex<T> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(T::lit(re), T::lit(im))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix<T: Real>(rows: usize, cols: usize, rng: &mut Rng) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// `rows x cols` matrix with orthonormal columns (`rows >= cols`), Haar distributed.
///
/// Modified Gram-Schmidt on a Gaussian matrix; the implicit `R` has a positive
/// diagonal, which is what makes the `Q` factor Haar.
pub fn random_isometry<T: Real>(rows: usize, cols: usize, rng: &mut Rng) -> Matrix<T> {
    assert!(rows >= cols, "isometry needs rows >= cols");
    loop {
        let g = gaussian_matrix::<T>(rows, cols, rng);
        let mut q: Vec<Vector<T>> = Vec::with_capacity(cols);
        let mut ok = true;
        for j in 0..cols {
            let mut v = g.column(j);
            // two passes keep orthogonality at machine precision
            for _ in 0..2 {
                for u in &q {
                    let proj = u.inner(&v);
                    v = v.axpy(-proj, u);
                }
            }
            match v.normalized() {
                Some(n) if v.norm() > T::lit(1e-8) => q.push(n),
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Matrix::from_columns(&q);
        }
    }
}

pub fn haar_unitary<T: Real>(n: usize, rng: &mut Rng) -> Matrix<T> {
    random_isometry(n, n, rng)
}
