//! Measurements on a physical qudit and the operations they induce on the
//! correlation space.
//!
//! Measuring site 1 with outcome `|m⟩` applies the branch operator
//! `A[m] = Σ_k A[k]⟨m|k⟩` to `|R⟩`. When an error channel `{F_j}` hits the
//! site first, outcome `s` applies the family `E_{j,s} = Σ_k A[k]⟨m_s|F_j|k⟩`.

use num_complex::Complex;
use num_traits::Zero;

use crate::channels::KrausChannel;
use crate::cptp::SuperOperator;
use crate::error::{invalid, Error, Result};
use crate::linalg::{haar_unitary, seeded_rng, Matrix, Tolerance, Vector};
use crate::resource::{check_theta, ResourceMps};
use crate::scalar::{cis, Real};

/// `|α_{θ,φ}⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
pub fn alpha_vector<T: Real>(theta: T, phi: T, d: usize) -> Vector<T> {
    let half = theta / T::lit(2.0);
    let mut v = vec![Complex::zero(); d];
    v[0] = Complex::new(half.cos(), T::zero());
    v[1] = cis(phi) * half.sin();
    Vector::from_vec(v)
}

/// `|β_{θ,φ}⟩ = sin(θ/2)|0⟩ − e^{iφ} cos(θ/2)|1⟩`.
pub fn beta_vector<T: Real>(theta: T, phi: T, d: usize) -> Vector<T> {
    let half = theta / T::lit(2.0);
    let mut v = vec![Complex::zero(); d];
    v[0] = Complex::new(half.sin(), T::zero());
    v[1] = -(cis(phi) * half.cos());
    Vector::from_vec(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum BasisKind<T: Real> {
    Angles { theta: T, phi: T },
    Computational,
    Custom,
}

/// An orthonormal measurement basis `{|m_s⟩}` of one qudit.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis<T: Real = f64> {
    vectors: Vec<Vector<T>>,
    kind: BasisKind<T>,
}

impl<T: Real> MeasurementBasis<T> {
    /// `M_{θ,φ} = {|α_{θ,φ}⟩, |β_{θ,φ}⟩, |2⟩, …, |d−1⟩}` with `0 < θ < π`.
    pub fn from_angles(theta: T, phi: T, d: usize) -> Result<Self> {
        check_theta(theta)?;
        if d < 2 {
            return Err(invalid("d", "dimension must be at least 2"));
        }
        let mut vectors = vec![alpha_vector(theta, phi, d), beta_vector(theta, phi, d)];
        vectors.extend((2..d).map(|k| Vector::basis(d, k)));
        Ok(Self {
            vectors,
            kind: BasisKind::Angles { theta, phi },
        })
    }

    /// `{|0⟩, …, |d−1⟩}`. This lies outside the `M_{θ,φ}` family (θ = 0 is excluded there).
    pub fn computational(d: usize) -> Self {
        Self {
            vectors: (0..d).map(|k| Vector::basis(d, k)).collect(),
            kind: BasisKind::Computational,
        }
    }

    pub fn from_vectors(vectors: Vec<Vector<T>>) -> Result<Self> {
        let d = vectors.len();
        if d == 0 {
            return Err(invalid("vectors", "basis must be non-empty"));
        }
        if let Some(v) = vectors.iter().find(|v| v.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: v.dim(),
            });
        }
        let gram = Matrix::from_fn(d, d, |i, j| vectors[i].inner(&vectors[j]));
        let deviation = gram.max_diff(&Matrix::identity(d));
        if deviation.is_nan() || deviation > Tolerance::<T>::construct().eps() {
            return Err(Error::NonOrthonormalBasis {
                deviation: deviation.as_f64(),
            });
        }
        Ok(Self {
            vectors,
            kind: BasisKind::Custom,
        })
    }

    /// Columns of a Haar-random unitary.
    pub fn random(d: usize, seed: u64) -> Self {
        let u = haar_unitary::<T>(d, &mut seeded_rng(seed));
        Self {
            vectors: (0..d).map(|k| u.column(k)).collect(),
            kind: BasisKind::Custom,
        }
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.vectors.len()
    }

    pub fn vector(&self, s: usize) -> &Vector<T> {
        &self.vectors[s]
    }

    pub fn vectors(&self) -> &[Vector<T>] {
        &self.vectors
    }

    /// `(θ, φ)` when the basis is an `M_{θ,φ}`.
    pub fn angles(&self) -> Option<(T, T)> {
        match self.kind {
            BasisKind::Angles { theta, phi } => Some((theta, phi)),
            _ => None,
        }
    }

    pub fn label(&self, s: usize) -> String {
        match (self.kind, s) {
            (BasisKind::Angles { .. }, 0) => "alpha".into(),
            (BasisKind::Angles { .. }, 1) => "beta".into(),
            (BasisKind::Custom, _) => format!("m{s}"),
            _ => s.to_string(),
        }
    }
}

/// `Σ_k A[k]·⟨m|k⟩`, i.e. the amplitudes of `|m⟩` enter conjugated.
pub fn branch_operator<T: Real>(mps: &ResourceMps<T>, m: &Vector<T>) -> Result<Matrix<T>> {
    if m.dim() != mps.d() {
        return Err(Error::DimensionMismatch {
            expected: mps.d(),
            actual: m.dim(),
        });
    }
    let bond = mps.bond_dim();
    Ok(mps
        .tensors()
        .iter()
        .zip(m.entries())
        .fold(Matrix::zeros(bond, bond), |acc, (a, mk)| &acc + &a.scale(mk.conj())))
}

/// Correlation-space Kraus family `E_{j,s}`, grouped by outcome `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedMap<T: Real = f64> {
    bond_dim: usize,
    outcomes: Vec<Vec<Matrix<T>>>,
}

impl<T: Real> InducedMap<T> {
    pub fn from_outcomes(bond_dim: usize, outcomes: Vec<Vec<Matrix<T>>>) -> Result<Self> {
        for e in outcomes.iter().flatten() {
            if e.rows() != bond_dim || e.cols() != bond_dim {
                return Err(Error::DimensionMismatch {
                    expected: bond_dim,
                    actual: e.rows(),
                });
            }
        }
        Ok(Self { bond_dim, outcomes })
    }

    #[inline]
    pub fn bond_dim(&self) -> usize {
        self.bond_dim
    }

    pub fn n_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    /// `E_{j,s}` for all `j`.
    pub fn outcome(&self, s: usize) -> &[Matrix<T>] {
        &self.outcomes[s]
    }

    pub fn kraus(&self, j: usize, s: usize) -> &Matrix<T> {
        &self.outcomes[s][j]
    }

    /// `Σ_j E†_{j,s}E_{j,s}`.
    pub fn outcome_gram(&self, s: usize) -> Matrix<T> {
        gram(&self.outcomes[s], self.bond_dim)
    }

    /// `Σ_{j,s} E†_{j,s}E_{j,s}`.
    pub fn total_gram(&self) -> Matrix<T> {
        (0..self.outcomes.len()).fold(Matrix::zeros(self.bond_dim, self.bond_dim), |acc, s| {
            &acc + &self.outcome_gram(s)
        })
    }
}

pub(crate) fn gram<T: Real>(ops: &[Matrix<T>], dim: usize) -> Matrix<T> {
    ops.iter()
        .fold(Matrix::zeros(dim, dim), |acc, k| &acc + &(&k.dagger() * k))
}

/// `E_{j,s} = Σ_k A[k]⟨m_s|F_j|k⟩`.
pub fn induced_kraus<T: Real>(
    mps: &ResourceMps<T>,
    ch: &KrausChannel<T>,
    basis: &MeasurementBasis<T>,
) -> Result<InducedMap<T>> {
    if ch.dim() != mps.d() {
        return Err(Error::DimensionMismatch {
            expected: mps.d(),
            actual: ch.dim(),
        });
    }
    if basis.d() != mps.d() {
        return Err(Error::DimensionMismatch {
            expected: mps.d(),
            actual: basis.d(),
        });
    }
    let outcomes = basis
        .vectors()
        .iter()
        .map(|m| {
            // ⟨m|F_j|k⟩ = conj((F_j†|m⟩)_k), so E_{j,s} is the branch operator of F_j†|m_s⟩
            ch.kraus()
                .iter()
                .map(|f| branch_operator(mps, &f.dagger().apply(m)?))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InducedMap {
        bond_dim: mps.bond_dim(),
        outcomes,
    })
}

/// `‖Σ_{j,s} E†E − I‖_max`; zero exactly when the outcome-mixed map is trace preserving.
pub fn tp_certificate<T: Real>(im: &InducedMap<T>) -> T {
    im.total_gram().max_diff(&Matrix::identity(im.bond_dim))
}

/// The outcome-mixed map `ρ ↦ Σ_{s,j} E_{j,s} ρ E†_{j,s}`.
pub fn mixed_map<T: Real>(im: &InducedMap<T>) -> SuperOperator<T> {
    SuperOperator::kraus(
        im.bond_dim,
        im.bond_dim,
        im.outcomes.iter().flatten().cloned().collect(),
    )
    .expect("induced Kraus operators share the bond dimension")
}

/// How a conditional (single-outcome) map is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalForm {
    /// Each Kraus element divided by its operator norm, `K/‖K‖`.
    OperatorNormalized,
    /// `ρ ↦ Σ_j EρE† / tr(Σ_j EρE†)`, nonlinear unless the Gram sum is `∝ I`.
    StateRenormalized,
}

/// The map implemented in correlation space when outcome `s` is observed.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalMap<T: Real = f64> {
    pub outcome: usize,
    pub form: NormalForm,
    bond_dim: usize,
    raw: Vec<Matrix<T>>,
    normalized: Vec<Matrix<T>>,
}

impl<T: Real> ConditionalMap<T> {
    pub fn with_form(mut self, form: NormalForm) -> Self {
        self.form = form;
        self
    }

    #[inline]
    pub fn bond_dim(&self) -> usize {
        self.bond_dim
    }

    /// The unnormalized `E_{j,s}`.
    pub fn raw_kraus(&self) -> &[Matrix<T>] {
        &self.raw
    }

    /// `K/‖K‖` for every nonzero element.
    pub fn normalized_kraus(&self) -> &[Matrix<T>] {
        &self.normalized
    }

    /// `Σ_j E†_{j,s}E_{j,s}`.
    pub fn gram(&self) -> Matrix<T> {
        gram(&self.raw, self.bond_dim)
    }

    /// TP in the renormalized sense: the Gram sum is proportional to the identity.
    pub fn is_tp(&self, tol: Tolerance<T>) -> Result<bool> {
        Ok(self.gram().proportionality_to_identity(tol)?.is_some())
    }

    pub fn operator_normalized_map(&self) -> SuperOperator<T> {
        SuperOperator::kraus(self.bond_dim, self.bond_dim, self.normalized.clone())
            .expect("normalized Kraus operators share the bond dimension")
    }

    /// `ρ ↦ Σ_j EρE† / tr(Σ_j EρE†)`; `None` for a zero-probability input.
    pub fn renormalized(&self, rho: &Matrix<T>) -> Option<Matrix<T>> {
        renormalized_image(&self.raw, rho)
    }
}

pub(crate) fn renormalized_image<T: Real>(ops: &[Matrix<T>], rho: &Matrix<T>) -> Option<Matrix<T>> {
    let dim = ops.first()?.rows();
    let out = ops
        .iter()
        .fold(Matrix::zeros(dim, dim), |acc, k| &acc + &(&(k * rho) * &k.dagger()));
    let p = out.trace().re;
    let floor = T::epsilon() * T::lit(1e3) * rho.trace().norm().max(T::one());
    (p > floor).then(|| out.scale_real(p.recip()))
}

/// Conditional map for outcome `s`.
pub fn per_outcome_map<T: Real>(im: &InducedMap<T>, s: usize) -> Result<ConditionalMap<T>> {
    if s >= im.n_outcomes() {
        return Err(invalid("s", format!("outcome must be below {}", im.n_outcomes())));
    }
    let raw = im.outcomes[s].clone();
    let mut normalized = Vec::with_capacity(raw.len());
    for k in &raw {
        let n = k.operator_norm()?;
        if n > T::epsilon() * T::lit(1e3) {
            normalized.push(k.scale_real(n.recip()));
        }
    }
    if normalized.is_empty() {
        return Err(Error::ZeroProbabilityOutcome { outcome: s });
    }
    Ok(ConditionalMap {
        outcome: s,
        form: NormalForm::OperatorNormalized,
        bond_dim: im.bond_dim,
        raw,
        normalized,
    })
}
