//! Outcome mixing for the AKLT rotation protocol and the cluster-state control.
//!
//! The protocol implements `S_Z(θ) = e^{iZθ/2}` by measuring site 1 in
//! `M_{θ,φ}` and repeating on the next site while every outcome so far was
//! `|2⟩`. Once a non-2 outcome appears the rest of the sites are measured in
//! the computational basis. Outcome sequences are grouped by their byproduct
//! `X^p Z^q`, and within a group `(p, q)` the outcomes are mixed.

use std::fmt;

use serde::Serialize;

use crate::channels::KrausChannel;
use crate::correlation::{branch_operator, gram, induced_kraus, MeasurementBasis};
use crate::cptp::{classify, MapClassification, SuperOperator, TraceConvention};
use crate::error::{invalid, Error, Result};
use crate::linalg::{pauli, Matrix, Tolerance};
use crate::resource::ResourceMps;
use crate::scalar::{cis, Real};

/// Largest `r` accepted by [`sector_enumerate`]; `3^r` sequences are built.
pub const MAX_STEPS: usize = 12;

/// Measurement outcomes `(s_1, …, s_r)`, each in `{0, 1, 2}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct OutcomeSeq(Vec<u8>);

impl OutcomeSeq {
    pub fn new(entries: Vec<u8>) -> Result<Self> {
        if entries.iter().any(|&s| s > 2) {
            return Err(invalid("seq", "outcomes must be 0, 1 or 2"));
        }
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn all_two(&self) -> bool {
        self.0.iter().all(|&s| s == 2)
    }
}

impl fmt::Display for OutcomeSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u8::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Byproduct label `X^p Z^q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ByproductSector {
    pub p: u8,
    pub q: u8,
}

impl ByproductSector {
    pub fn new(p: u8, q: u8) -> Result<Self> {
        if p > 1 || q > 1 {
            return Err(invalid("sector", "p and q must be bits"));
        }
        Ok(Self { p, q })
    }

    pub fn all() -> [Self; 4] {
        [(0, 0), (0, 1), (1, 0), (1, 1)].map(|(p, q)| Self { p, q })
    }

    /// Position of the classical flag, `2p + q`.
    pub fn flag(self) -> usize {
        2 * self.p as usize + self.q as usize
    }
}

/// `f = ⊕_i (δ_{s_i,0} ⊕ δ_{s_i,1})`.
pub fn f_parity(seq: &OutcomeSeq) -> u8 {
    seq.0.iter().fold(0, |acc, &s| acc ^ u8::from(s == 0) ^ u8::from(s == 1))
}

/// `g = ⊕_i (δ_{s_i,1} ⊕ δ_{s_i,2})`.
pub fn g_parity(seq: &OutcomeSeq) -> u8 {
    seq.0.iter().fold(0, |acc, &s| acc ^ u8::from(s == 1) ^ u8::from(s == 2))
}

/// Failure flag: 1 for the sector that receives the all-2 sequence.
pub fn h_flag(p: u8, q: u8, r: usize) -> u8 {
    let target_q = if r.is_multiple_of(2) { 0 } else { 1 };
    u8::from(p == 0 && q == target_q)
}

/// `e^{iZθ/2} = diag(e^{iθ/2}, e^{−iθ/2})`.
pub fn s_z<T: Real>(theta: T) -> Matrix<T> {
    let half = theta / T::lit(2.0);
    Matrix::diag(&[cis(half), cis(-half)])
}

/// `Q_k(s_1, …, s_{k−1}, s_k)`. `history` holds `s_1 … s_{k−1}`; while it is all 2
/// (including empty) the rotation is still pending.
pub fn q_operator<T: Real>(history: &[u8], s_k: u8, theta: T) -> Result<Matrix<T>> {
    let pending = history.iter().all(|&s| s == 2);
    let (x, z, xz) = (pauli::x::<T>(), pauli::z::<T>(), pauli::xz::<T>());
    Ok(match (s_k, pending) {
        (0, true) => &x * &s_z(theta),
        (1, true) => &xz * &s_z(theta),
        (0, false) => x,
        (1, false) => xz,
        (2, _) => z,
        _ => return Err(invalid("s_k", "outcome must be 0, 1 or 2")),
    })
}

/// All sequences in `{0,1,2}^r` except `(2,…,2)` with `f = p` and `g = q`,
/// in lexicographic order (`s_1` most significant).
pub fn sector_enumerate(r: usize, sector: ByproductSector) -> Result<Vec<OutcomeSeq>> {
    if r == 0 {
        return Err(invalid("r", "at least one measurement is needed"));
    }
    if r > MAX_STEPS {
        return Err(Error::SizeGuard {
            what: "outcome sequences 3^r",
            requested: 3u128.pow(r as u32),
            limit: 3u128.pow(MAX_STEPS as u32),
        });
    }
    let total = 3usize.pow(r as u32);
    Ok((0..total)
        .map(|mut idx| {
            let mut v = vec![0u8; r];
            for slot in v.iter_mut().rev() {
                *slot = (idx % 3) as u8;
                idx /= 3;
            }
            OutcomeSeq(v)
        })
        .filter(|seq| !seq.all_two() && f_parity(seq) == sector.p && g_parity(seq) == sector.q)
        .collect())
}

/// Rotation angle implemented by the first-step basis `M_{θ,φ}` on AKLT.
///
/// At `φ = π/2` the α branch is `X e^{−iθZ/2}/√3`, at `φ = 3π/2` it is
/// `X e^{iθZ/2}/√3`; other `φ` do not give unitary branches.
pub fn rotation_angle<T: Real>(theta: T, phi: T) -> Result<T> {
    let tau = T::TAU();
    let reduced = ((phi % tau) + tau) % tau;
    let slack = T::lit(1e-9).max(T::epsilon() * T::lit(64.0));
    let close = |target: T| (reduced - target).abs() <= slack;
    if close(T::FRAC_PI_2()) {
        Ok(-theta)
    } else if close(T::lit(1.5) * T::PI()) {
        Ok(theta)
    } else {
        Err(invalid("phi", "the AKLT rotation protocol needs phi = pi/2 or 3*pi/2"))
    }
}

fn require_aklt<T: Real>(mps: &ResourceMps<T>) -> Result<()> {
    let reference = ResourceMps::<T>::aklt();
    let same = mps.d() == 3
        && mps.bond_dim() == 2
        && mps
            .tensors()
            .iter()
            .zip(reference.tensors())
            .all(|(a, b)| a.approx_eq(b, Tolerance::verify()));
    if same {
        Ok(())
    } else {
        Err(invalid("resource", "the rotation protocol is defined for the AKLT tensors"))
    }
}

/// The correlation-space map for one byproduct sector after `r` measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorMap<T: Real = f64> {
    pub sector: ByproductSector,
    pub r: usize,
    pub theta: T,
    pub phi: T,
    /// Angle of the implemented `S_Z`.
    pub rotation: T,
    pub sequences: Vec<OutcomeSeq>,
    /// `Q̃(seq, j) = Q_r ⋯ Q_2 E_{j,s_1}` for every sequence and Kraus index,
    /// followed by `Z^{r−1}E_{j,2}` when `h(p,q,r) = 1`.
    pub kraus_like: Vec<Matrix<T>>,
    /// Number of trailing failure terms in `kraus_like`.
    pub n_failure: usize,
    /// `Σ K†K` over `kraus_like`.
    pub gram: Matrix<T>,
}

impl<T: Real> SectorMap<T> {
    pub fn h(&self) -> u8 {
        h_flag(self.sector.p, self.sector.q, self.r)
    }

    /// Factor turning `kraus_like` into physical Kraus operators: each later
    /// step contributes a branch amplitude `1/√3`, so the weight is `3^{−(r−1)}`.
    pub fn physical_weight(&self) -> T {
        T::lit(3.0).powi(-(self.r as i32 - 1))
    }

    /// `kraus_like` scaled by `√physical_weight`.
    pub fn physical_kraus(&self) -> Vec<Matrix<T>> {
        let s = self.physical_weight().sqrt();
        self.kraus_like.iter().map(|k| k.scale_real(s)).collect()
    }

    pub fn super_operator(&self) -> SuperOperator<T> {
        SuperOperator::kraus(2, 2, self.kraus_like.clone()).expect("sector operators are 2 x 2")
    }
}

fn products<T: Real>(seq: &OutcomeSeq, first: &[Matrix<T>], rotation: T) -> Result<Vec<Matrix<T>>> {
    let s = seq.entries();
    let mut tail = Matrix::identity(2);
    for k in 1..s.len() {
        tail = &q_operator(&s[..k], s[k], rotation)? * &tail;
    }
    Ok(first.iter().map(|e| &tail * e).collect())
}

/// Builds the sector map for the AKLT protocol with error `ch` on site 1.
pub fn sector_map<T: Real>(
    mps: &ResourceMps<T>,
    ch: &KrausChannel<T>,
    theta: T,
    phi: T,
    r: usize,
    sector: ByproductSector,
) -> Result<SectorMap<T>> {
    require_aklt(mps)?;
    let rotation = rotation_angle(theta, phi)?;
    let basis = MeasurementBasis::from_angles(theta, phi, 3)?;
    let im = induced_kraus(mps, ch, &basis)?;
    let sequences = sector_enumerate(r, sector)?;

    let mut kraus_like = Vec::new();
    for seq in &sequences {
        kraus_like.extend(products(seq, im.outcome(seq.entries()[0] as usize), rotation)?);
    }
    let mut n_failure = 0;
    if h_flag(sector.p, sector.q, r) == 1 {
        let zr = pauli::z::<T>().pow((r - 1) as u32)?;
        for e in im.outcome(2) {
            kraus_like.push(&zr * e);
            n_failure += 1;
        }
    }
    let gram = gram(&kraus_like, 2);
    Ok(SectorMap {
        sector,
        r,
        theta,
        phi,
        rotation,
        sequences,
        kraus_like,
        n_failure,
        gram,
    })
}

/// All four sectors.
pub fn all_sectors<T: Real>(mps: &ResourceMps<T>, ch: &KrausChannel<T>, theta: T, phi: T, r: usize) -> Result<Vec<SectorMap<T>>> {
    ByproductSector::all()
        .into_iter()
        .map(|sector| sector_map(mps, ch, theta, phi, r, sector))
        .collect()
}

/// `Σ K†K` over the physical Kraus operators of every sector and failure term.
pub fn global_gram<T: Real>(maps: &[SectorMap<T>]) -> Matrix<T> {
    maps.iter().fold(Matrix::zeros(2, 2), |acc, m| &acc + &m.gram.scale_real(m.physical_weight()))
}

/// The flagged map `ρ ↦ Σ_{p,q} |pq⟩⟨pq| ⊗ Φ_{p,q}(ρ)` built from physical Kraus operators,
/// from `C^2` into `C^4 ⊗ C^2`.
pub fn flagged_total_map<T: Real>(maps: &[SectorMap<T>]) -> Result<SuperOperator<T>> {
    let ops = maps
        .iter()
        .flat_map(|m| m.physical_kraus().into_iter().map(move |k| (m.sector.flag(), k)))
        .map(|(flag, k)| embed_flag(&k, flag, 4))
        .collect();
    SuperOperator::kraus(2, 8, ops)
}

/// `|flag⟩ ⊗ k` as a `(n_flags·rows) x cols` operator.
fn embed_flag<T: Real>(k: &Matrix<T>, flag: usize, n_flags: usize) -> Matrix<T> {
    let rows = k.rows();
    Matrix::from_fn(n_flags * rows, k.cols(), |i, j| {
        if i / rows == flag {
            k[(i % rows, j)]
        } else {
            num_traits::Zero::zero()
        }
    })
}

/// Classifies the renormalized sector map: trace preservation means `gram ∝ I`.
pub fn classify_sector<T: Real>(sm: &SectorMap<T>, tol: Tolerance<T>) -> Result<MapClassification> {
    classify(&sm.super_operator(), TraceConvention::UpToScale, tol)
}

/// Cluster-state control: applies `ch` to site 1, measures in `basis`, keeps the
/// outcome as a classical flag and undoes the outcome-dependent unitary
/// (`C_s = U_0 U_s†` with `U_s` the normalized noiseless branch operator).
pub fn cluster_mixing_control<T: Real>(ch: &KrausChannel<T>, basis: &MeasurementBasis<T>, tol: Tolerance<T>) -> Result<MapClassification> {
    let mps = ResourceMps::<T>::cluster_1d();
    let d = mps.d();
    let bond = mps.bond_dim();
    let mut unitaries = Vec::with_capacity(d);
    for s in 0..d {
        let a = branch_operator(&mps, basis.vector(s))?;
        let c = a
            .unitary_up_to_scale(Tolerance::verify())?
            .ok_or_else(|| Error::BranchNotUnitary { branch: basis.label(s) })?;
        unitaries.push(a.scale_real(c.recip()));
    }
    let im = induced_kraus(&mps, ch, basis)?;
    let mut ops = Vec::new();
    for s in 0..d {
        let correction = &unitaries[0] * &unitaries[s].dagger();
        for e in im.outcome(s) {
            ops.push(embed_flag(&(&correction * e), s, d));
        }
    }
    classify(&SuperOperator::kraus(bond, bond * d, ops)?, TraceConvention::Exact, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cptp::Verdict;
    use std::f64::consts::FRAC_PI_2;

    type R = ResourceMps<f64>;
    type K = KrausChannel<f64>;

    fn seq(v: &[u8]) -> OutcomeSeq {
        OutcomeSeq::new(v.to_vec()).unwrap()
    }

    fn sec(p: u8, q: u8) -> ByproductSector {
        ByproductSector::new(p, q).unwrap()
    }

    #[test]
    fn parities() {
        assert_eq!((f_parity(&seq(&[2, 2, 2])), g_parity(&seq(&[2, 2, 2]))), (0, 1));
        assert_eq!((f_parity(&seq(&[0])), g_parity(&seq(&[0]))), (1, 0));
        assert_eq!((f_parity(&seq(&[1, 1])), g_parity(&seq(&[1, 1]))), (0, 0));
    }

    #[test]
    fn h_flags() {
        assert_eq!(h_flag(0, 0, 4), 1);
        assert_eq!(h_flag(0, 1, 3), 1);
        for r in 1..6 {
            assert_eq!(h_flag(1, 0, r), 0);
            let total: u8 = ByproductSector::all().iter().map(|s| h_flag(s.p, s.q, r)).sum();
            assert_eq!(total, 1);
            // the all-2 sequence lands in the flagged sector
            let all2 = OutcomeSeq(vec![2; r]);
            assert_eq!(h_flag(f_parity(&all2), g_parity(&all2), r), 1);
        }
    }

    #[test]
    fn q_table() {
        let th = 0.8;
        let x = pauli::x::<f64>();
        let tol = Tolerance::verify();
        assert!(q_operator(&[], 0, th).unwrap().approx_eq(&(&x * &s_z(th)), tol));
        assert!(q_operator(&[2, 2], 2, th).unwrap().approx_eq(&pauli::z(), tol));
        assert!(q_operator(&[0, 2], 1, th).unwrap().approx_eq(&pauli::xz(), tol));
        assert!(q_operator(&[2], 1, th).unwrap().approx_eq(&(&pauli::xz() * &s_z(th)), tol));
        assert!(q_operator(&[], 3, th).is_err());
    }

    #[test]
    fn enumeration() {
        assert_eq!(sector_enumerate(1, sec(1, 0)).unwrap(), vec![seq(&[0])]);
        // (1) carries the byproduct XZ
        assert_eq!(sector_enumerate(1, sec(1, 1)).unwrap(), vec![seq(&[1])]);
        assert!(sector_enumerate(1, sec(0, 0)).unwrap().is_empty());
        for r in 1..=8 {
            let n: usize = ByproductSector::all().iter().map(|&s| sector_enumerate(r, s).unwrap().len()).sum();
            assert_eq!(n, 3usize.pow(r as u32) - 1);
        }
        assert!(matches!(sector_enumerate(13, sec(0, 0)), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn rotation_matches_branch_operators() {
        let m = R::aklt();
        for (theta, phi) in [(0.7, FRAC_PI_2), (2.2, 1.5 * std::f64::consts::PI)] {
            let rot = rotation_angle(theta, phi).unwrap();
            let basis = MeasurementBasis::from_angles(theta, phi, 3).unwrap();
            for s in 0..3u8 {
                let a = branch_operator(&m, basis.vector(s as usize)).unwrap().scale_real(3f64.sqrt());
                let q = q_operator(&[], s, rot).unwrap();
                // a = e^{iχ} q for some phase
                let ph = (&q.dagger() * &a).trace() / 2.0;
                assert!((ph.norm() - 1.0).abs() < 1e-12);
                assert!(a.approx_eq(&q.scale(ph), Tolerance::verify()));
            }
        }
        assert!(rotation_angle(1.0, 0.0).is_err());
    }

    #[test]
    fn identity_channel_sector_one_sequence() {
        let sm = sector_map(&R::aklt(), &K::identity(3), 1.0, FRAC_PI_2, 1, sec(1, 0)).unwrap();
        assert_eq!(sm.kraus_like.len(), 1);
        let basis = MeasurementBasis::from_angles(1.0, FRAC_PI_2, 3).unwrap();
        let a = branch_operator(&R::aklt(), basis.vector(0)).unwrap();
        assert!(sm.kraus_like[0].approx_eq(&a, Tolerance::verify()));
    }

    #[test]
    fn f1_sector_shape() {
        let th = 1.0;
        let ch = K::f1_error(th, FRAC_PI_2, 3).unwrap();
        for r in 1..=5 {
            let sm = sector_map(&R::aklt(), &ch, th, FRAC_PI_2, r, sec(1, 0)).unwrap();
            let level = if r % 2 == 1 { 1 } else { 0 };
            let rest = &sm.gram - &Matrix::unit(2, level, level).scale_real(2.0 / 3.0);
            assert!(rest.proportionality_to_identity(Tolerance::verify()).unwrap().is_some(), "r = {r}");
            assert_ne!(classify_sector(&sm, Tolerance::verify()).unwrap().verdict, Verdict::LinearCPTP);
        }
    }

    #[test]
    fn global_tp() {
        for ch in [K::identity(3), K::f1_error(0.6, FRAC_PI_2, 3).unwrap(), K::random_cptp(3, 2, 3).unwrap()] {
            for r in 1..=4 {
                let maps = all_sectors(&R::aklt(), &ch, 0.6, FRAC_PI_2, r).unwrap();
                assert!(global_gram(&maps).max_diff(&Matrix::identity(2)) < 1e-12);
                let total = flagged_total_map(&maps).unwrap();
                let c = classify(&total, TraceConvention::Exact, Tolerance::verify()).unwrap();
                assert_eq!(c.verdict, Verdict::LinearCPTP);
            }
        }
    }

    #[test]
    fn not_aklt_rejected() {
        let m = R::random_resource(3, 2, 1.0, FRAC_PI_2, 1).unwrap();
        assert!(sector_map(&m, &K::identity(3), 1.0, FRAC_PI_2, 1, sec(0, 0)).is_err());
    }

    #[test]
    fn cluster_control_identity() {
        let basis = MeasurementBasis::from_angles(FRAC_PI_2, 0.0, 2).unwrap();
        let c = cluster_mixing_control(&K::identity(2), &basis, Tolerance::verify()).unwrap();
        assert_eq!(c.verdict, Verdict::LinearCPTP);
    }
}
