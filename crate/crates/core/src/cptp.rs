//! Classification of correlation-space maps: complete positivity, trace
//! preservation and linearity.
//!
//! The Choi matrix uses the unnormalized convention
//! `J = Σ_{ab} Φ(|a⟩⟨b|) ⊗ |a⟩⟨b|`, so the identity map on `C^D` gives
//! `J = |Ω⟩⟨Ω|` with `|Ω⟩ = Σ_a |a⟩|a⟩` and `tr J = D`.

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::{gaussian_matrix, seeded_rng, Matrix, Tolerance, Vector};
use crate::scalar::Real;

/// A linear map from `din x din` to `dout x dout` matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum SuperOperator<T: Real = f64> {
    /// `ρ ↦ Σ K ρ K†` with each `K` of shape `dout x din`.
    Kraus {
        din: usize,
        dout: usize,
        ops: Vec<Matrix<T>>,
    },
    /// Images of the matrix units; `images[a·din + b] = Φ(|a⟩⟨b|)`.
    ActionTable {
        din: usize,
        dout: usize,
        images: Vec<Matrix<T>>,
    },
}

impl<T: Real> SuperOperator<T> {
    pub fn kraus(din: usize, dout: usize, ops: Vec<Matrix<T>>) -> Result<Self> {
        if din == 0 || dout == 0 {
            return Err(invalid("dim", "dimensions must be positive"));
        }
        for k in &ops {
            if k.rows() != dout || k.cols() != din {
                return Err(Error::DimensionMismatch {
                    expected: dout,
                    actual: k.rows(),
                });
            }
        }
        Ok(Self::Kraus { din, dout, ops })
    }

    pub fn action_table(din: usize, dout: usize, images: Vec<Matrix<T>>) -> Result<Self> {
        if din == 0 || dout == 0 {
            return Err(invalid("dim", "dimensions must be positive"));
        }
        if images.len() != din * din {
            return Err(Error::DimensionMismatch {
                expected: din * din,
                actual: images.len(),
            });
        }
        for m in &images {
            if m.rows() != dout || m.cols() != dout {
                return Err(Error::DimensionMismatch {
                    expected: dout,
                    actual: m.rows(),
                });
            }
        }
        Ok(Self::ActionTable { din, dout, images })
    }

    pub fn din(&self) -> usize {
        match self {
            Self::Kraus { din, .. } | Self::ActionTable { din, .. } => *din,
        }
    }

    pub fn dout(&self) -> usize {
        match self {
            Self::Kraus { dout, .. } | Self::ActionTable { dout, .. } => *dout,
        }
    }

    pub fn apply(&self, rho: &Matrix<T>) -> Result<Matrix<T>> {
        let (din, dout) = (self.din(), self.dout());
        if rho.rows() != din || rho.cols() != din {
            return Err(Error::DimensionMismatch {
                expected: din,
                actual: rho.rows(),
            });
        }
        Ok(match self {
            Self::Kraus { ops, .. } => ops
                .iter()
                .fold(Matrix::zeros(dout, dout), |acc, k| &acc + &(&(k * rho) * &k.dagger())),
            Self::ActionTable { images, .. } => {
                let mut out = Matrix::zeros(dout, dout);
                for a in 0..din {
                    for b in 0..din {
                        let w = rho[(a, b)];
                        if !w.is_zero() {
                            out = &out + &images[a * din + b].scale(w);
                        }
                    }
                }
                out
            }
        })
    }

    /// The same map in action-table form.
    pub fn to_action_table(&self) -> Self {
        let din = self.din();
        let images = (0..din * din)
            .map(|i| self.apply(&Matrix::unit(din, i / din, i % din)).expect("unit matches din"))
            .collect();
        Self::ActionTable {
            din,
            dout: self.dout(),
            images,
        }
    }

    /// `ρ ↦ U Φ(V ρ V†) U†`.
    pub fn sandwich(&self, u: &Matrix<T>, v: &Matrix<T>) -> Result<Self> {
        if u.rows() != self.dout() || u.cols() != self.dout() || v.rows() != self.din() || v.cols() != self.din() {
            return Err(invalid("sandwich", "unitaries must match the map dimensions"));
        }
        match self {
            Self::Kraus { din, dout, ops } => Ok(Self::Kraus {
                din: *din,
                dout: *dout,
                ops: ops.iter().map(|k| &(u * k) * v).collect(),
            }),
            Self::ActionTable { din, dout, .. } => {
                let images = (0..din * din)
                    .map(|i| {
                        let unit = Matrix::unit(*din, i / din, i % din);
                        let inner = self.apply(&(&(v * &unit) * &v.dagger()))?;
                        Ok(&(u * &inner) * &u.dagger())
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::action_table(*din, *dout, images)
            }
        }
    }

    /// `T = Σ_{ab} tr Φ(|a⟩⟨b|) |b⟩⟨a|`, which is `Σ K†K` for a Kraus map.
    pub fn trace_gram(&self) -> Matrix<T> {
        match self {
            Self::Kraus { din, ops, .. } => ops
                .iter()
                .fold(Matrix::zeros(*din, *din), |acc, k| &acc + &(&k.dagger() * k)),
            Self::ActionTable { din, images, .. } => {
                Matrix::from_fn(*din, *din, |b, a| images[a * din + b].trace())
            }
        }
    }

    pub fn choi(&self) -> ChoiMatrix<T> {
        let din = self.din();
        let dout = self.dout();
        let mut j = Matrix::zeros(dout * din, dout * din);
        for a in 0..din {
            for b in 0..din {
                let img = self.apply(&Matrix::unit(din, a, b)).expect("unit matches din");
                for x in 0..dout {
                    for y in 0..dout {
                        j[(x * din + a, y * din + b)] = img[(x, y)];
                    }
                }
            }
        }
        ChoiMatrix { din, dout, matrix: j }
    }

    /// `‖T − I‖_max`.
    pub fn tp_deviation(&self) -> T {
        self.trace_gram().max_diff(&Matrix::identity(self.din()))
    }

    pub fn is_tp(&self, tol: Tolerance<T>) -> bool {
        self.tp_deviation() <= tol.eps()
    }
}

/// `J = Σ_{ab} Φ(|a⟩⟨b|) ⊗ |a⟩⟨b|`, of size `dout·din`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix<T: Real = f64> {
    pub din: usize,
    pub dout: usize,
    pub matrix: Matrix<T>,
}

impl<T: Real> ChoiMatrix<T> {
    pub fn hermiticity_defect(&self) -> T {
        self.matrix.hermiticity_defect().expect("Choi matrix is square")
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(self.matrix.eigen()?.min())
    }

    pub fn is_cp(&self, tol: Tolerance<T>) -> Result<bool> {
        self.matrix.is_hermitian_psd(tol)
    }

    pub fn frobenius_distance(&self, other: &Self) -> Result<T> {
        if self.matrix.rows() != other.matrix.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.rows(),
                actual: other.matrix.rows(),
            });
        }
        Ok((&self.matrix - &other.matrix).frobenius())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    LinearCPTP,
    CPnotTP,
    NotCP,
    NonLinear,
}

/// Which trace condition counts as trace preserving.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceConvention {
    /// `Σ K†K = I`.
    Exact,
    /// `Σ K†K ∝ I`, the renormalized convention for single-outcome maps.
    UpToScale,
}

/// Convex pair on which an operational map failed to be affine.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearityWitness<T: Real = f64> {
    pub rho1: Matrix<T>,
    pub rho2: Matrix<T>,
    pub lambda: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearityReport<T: Real = f64> {
    pub deviation: T,
    pub witness: Option<LinearityWitness<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapClassification {
    pub verdict: Verdict,
    pub tp_deviation: Option<f64>,
    pub cp_min_eigenvalue: Option<f64>,
    pub linearity_deviation: Option<f64>,
    #[serde(skip)]
    pub linearity_witness: Option<LinearityWitness<f64>>,
}

impl MapClassification {
    pub fn is_linear_cptp(&self) -> bool {
        self.verdict == Verdict::LinearCPTP
    }
}

fn scaled_tp_deviation<T: Real>(gram: &Matrix<T>) -> Result<T> {
    let top = gram.eigen()?.max();
    if top <= T::epsilon() * T::lit(1e3) * T::one().max(gram.max_abs()) {
        return Ok(T::one());
    }
    Ok(gram.scale_real(top.recip()).max_diff(&Matrix::identity(gram.rows())))
}

/// CP and TP tests on a map known to be linear.
pub fn classify<T: Real>(so: &SuperOperator<T>, convention: TraceConvention, tol: Tolerance<T>) -> Result<MapClassification> {
    let choi = so.choi();
    let min_eig = choi.min_eigenvalue()?;
    let gram = so.trace_gram();
    let tp_dev = match convention {
        TraceConvention::Exact => gram.max_diff(&Matrix::identity(so.din())),
        TraceConvention::UpToScale => scaled_tp_deviation(&gram.hermitian_part()?)?,
    };
    let verdict = if !choi.is_cp(tol)? {
        Verdict::NotCP
    } else if tp_dev <= tol.eps() {
        Verdict::LinearCPTP
    } else {
        Verdict::CPnotTP
    };
    Ok(MapClassification {
        verdict,
        tp_deviation: Some(tp_dev.as_f64()),
        cp_min_eigenvalue: Some(min_eig.as_f64()),
        linearity_deviation: None,
        linearity_witness: None,
    })
}

/// Tomographically complete density matrices: `|a⟩⟨a|` and, for every pair
/// `a < b`, the projectors onto `(|a⟩ ± |b⟩)/√2` and `(|a⟩ ± i|b⟩)/√2`.
pub fn tomographic_states<T: Real>(dim: usize) -> Vec<Matrix<T>> {
    let mut out: Vec<Matrix<T>> = (0..dim).map(|a| Matrix::unit(dim, a, a)).collect();
    let h = T::lit(0.5).sqrt();
    for a in 0..dim {
        for b in a + 1..dim {
            for phase in [
                Complex::new(T::one(), T::zero()),
                Complex::new(-T::one(), T::zero()),
                Complex::new(T::zero(), T::one()),
                Complex::new(T::zero(), -T::one()),
            ] {
                let mut v = vec![Complex::zero(); dim];
                v[a] = Complex::new(h, T::zero());
                v[b] = phase * h;
                out.push(Vector::from_vec(v).projector());
            }
        }
    }
    out
}

/// A seeded random full-rank density matrix `GG†/tr(GG†)`.
pub fn random_density<T: Real>(dim: usize, seed: u64) -> Matrix<T> {
    let g = gaussian_matrix::<T>(dim, dim, &mut seeded_rng(seed));
    let rho = &g * &g.dagger();
    let tr = rho.trace().re;
    rho.scale_real(tr.recip())
}

/// Largest affine defect `‖f(λρ₁+(1−λ)ρ₂) − λf(ρ₁) − (1−λ)f(ρ₂)‖_max` over all
/// pairs from the tomographic states plus `trials` random densities.
///
/// `f` returns `None` on a zero-probability input; that image counts as the zero matrix.
pub fn linearity_probe<T: Real>(
    dim: usize,
    f: &dyn Fn(&Matrix<T>) -> Option<Matrix<T>>,
    trials: usize,
    seed: u64,
) -> LinearityReport<T> {
    let mut pool = tomographic_states::<T>(dim);
    pool.extend((0..trials as u64).map(|i| random_density(dim, seed.wrapping_add(i))));
    let images: Vec<Option<Matrix<T>>> = pool.iter().map(f).collect();
    let out_dim = images.iter().flatten().map(Matrix::rows).next().unwrap_or(dim);
    let zero = Matrix::zeros(out_dim, out_dim);
    let image = |i: usize| images[i].clone().unwrap_or_else(|| zero.clone());

    let mut best = LinearityReport {
        deviation: T::zero(),
        witness: None,
    };
    for lambda in [T::lit(0.5), T::lit(0.25)] {
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                let mix = &pool[i].scale_real(lambda) + &pool[j].scale_real(T::one() - lambda);
                let got = f(&mix).unwrap_or_else(|| zero.clone());
                let want = &image(i).scale_real(lambda) + &image(j).scale_real(T::one() - lambda);
                let dev = got.max_diff(&want);
                if dev > best.deviation {
                    best = LinearityReport {
                        deviation: dev,
                        witness: Some(LinearityWitness {
                            rho1: pool[i].clone(),
                            rho2: pool[j].clone(),
                            lambda,
                        }),
                    };
                }
            }
        }
    }
    best
}

/// Rebuilds the linear map from its action on [`tomographic_states`]:
/// `|a⟩⟨b| = ½[(P_{x+} − P_{x−}) + i(P_{y+} − P_{y−})]`.
pub fn tomography<T: Real>(dim: usize, f: &dyn Fn(&Matrix<T>) -> Option<Matrix<T>>) -> Result<SuperOperator<T>> {
    let states = tomographic_states::<T>(dim);
    let outs: Vec<Option<Matrix<T>>> = states.iter().map(f).collect();
    let out_dim = outs
        .iter()
        .flatten()
        .map(Matrix::rows)
        .next()
        .ok_or_else(|| invalid("f", "map vanishes on every probe state"))?;
    let zero = Matrix::zeros(out_dim, out_dim);
    let img = |i: usize| outs[i].clone().unwrap_or_else(|| zero.clone());
    let half = T::lit(0.5);
    let i_unit = Complex::new(T::zero(), T::one());

    let mut images = vec![zero.clone(); dim * dim];
    for a in 0..dim {
        images[a * dim + a] = img(a);
    }
    let mut idx = dim;
    for a in 0..dim {
        for b in a + 1..dim {
            let (xp, xm, yp, ym) = (img(idx), img(idx + 1), img(idx + 2), img(idx + 3));
            idx += 4;
            let sx = &xp - &xm;
            let sy = &yp - &ym;
            let ab = (&sx + &sy.scale(i_unit)).scale_real(half);
            let ba = (&sx - &sy.scale(i_unit)).scale_real(half);
            images[a * dim + b] = ab;
            images[b * dim + a] = ba;
        }
    }
    SuperOperator::action_table(dim, out_dim, images)
}

/// Probe linearity first; if the map is affine, reconstruct it and run the CP and TP tests.
pub fn classify_operational<T: Real>(
    dim: usize,
    f: &dyn Fn(&Matrix<T>) -> Option<Matrix<T>>,
    convention: TraceConvention,
    tol: Tolerance<T>,
    seed: u64,
) -> Result<MapClassification> {
    let probe = linearity_probe(dim, f, 6, seed);
    if probe.deviation > tol.eps() {
        return Ok(MapClassification {
            verdict: Verdict::NonLinear,
            tp_deviation: None,
            cp_min_eigenvalue: None,
            linearity_deviation: Some(probe.deviation.as_f64()),
            linearity_witness: probe.witness.map(|w| LinearityWitness {
                rho1: w.rho1.map_to_f64(),
                rho2: w.rho2.map_to_f64(),
                lambda: w.lambda.as_f64(),
            }),
        });
    }
    let so = tomography(dim, f)?;
    let mut report = classify(&so, convention, tol)?;
    report.linearity_deviation = Some(probe.deviation.as_f64());
    Ok(report)
}
