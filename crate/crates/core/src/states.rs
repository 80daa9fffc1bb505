//! State representations on a `dim_a x dim_b` product basis.
//!
//! Joint vectors and matrices use the row-major ordering `(i, j) ↦ i·dim_b + j`
//! where `i` indexes subsystem A and `j` indexes subsystem B.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C64};

/// Numerical tolerances for state validation. All are configurable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub norm: f64,
    pub hermitian: f64,
    pub trace: f64,
    pub psd: f64,
    pub rank_cutoff: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            norm: 1e-10,
            hermitian: 1e-10,
            trace: 1e-10,
            psd: 1e-9,
            rank_cutoff: 1e-12,
        }
    }
}

pub const ZERO_STATE_NORM: f64 = 1e-14;
pub const DEFAULT_RANK_CUTOFF: f64 = 1e-12;

/// A normalized pure state stored as its amplitude matrix `a_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: CMat,
    renormalized: bool,
}

/// Validate raw amplitudes and normalize them.
///
/// With `strict` set, a norm farther than `tol` from 1 is rejected; otherwise
/// the amplitudes are always rescaled. The returned state records whether a
/// rescaling beyond rounding happened.
pub fn validate_pure(raw_amps: CMat, tol: f64, strict: bool) -> Result<PureState> {
    if raw_amps.nrows() == 0 || raw_amps.ncols() == 0 {
        return Err(Error::DimensionMismatch(
            "amplitude matrix must have dim_a >= 1 and dim_b >= 1".into(),
        ));
    }
    if raw_amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Param("amplitudes must be finite".into()));
    }
    let norm = linalg::hs_norm(&raw_amps);
    if norm < ZERO_STATE_NORM {
        return Err(Error::ZeroState { norm });
    }
    if strict && (norm - 1.0).abs() > tol {
        return Err(Error::NormViolation { norm, tol });
    }
    let renormalized = norm != 1.0;
    Ok(PureState {
        amps: raw_amps.unscale(norm),
        renormalized,
    })
}

impl PureState {
    /// Normalizing constructor (non-strict).
    pub fn new(raw_amps: CMat) -> Result<Self> {
        validate_pure(raw_amps, Tolerances::default().norm, false)
    }

    /// Build from a row-major joint vector.
    pub fn from_vector(v: &CVec, dim_a: usize, dim_b: usize) -> Result<Self> {
        if v.len() != dim_a * dim_b {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} does not factor as {dim_a} x {dim_b}",
                v.len()
            )));
        }
        Self::new(linalg::unflatten_row_major(v, dim_a, dim_b))
    }

    pub fn product(a: &CVec, b: &CVec) -> Result<Self> {
        Self::new(a * b.transpose())
    }

    /// Computational basis state `|i⟩|j'⟩`.
    pub fn basis(dim_a: usize, dim_b: usize, i: usize, j: usize) -> Self {
        let mut amps = CMat::zeros(dim_a, dim_b);
        amps[(i, j)] = linalg::ONE;
        PureState {
            amps,
            renormalized: false,
        }
    }

    /// `(Σ_k |kk⟩)/√d` on `d x d`.
    pub fn max_entangled(d: usize) -> Self {
        let amps = CMat::identity(d, d).unscale((d as f64).sqrt());
        PureState {
            amps,
            renormalized: false,
        }
    }

    pub fn dim_a(&self) -> usize {
        self.amps.nrows()
    }

    pub fn dim_b(&self) -> usize {
        self.amps.ncols()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.amps.shape()
    }

    pub fn amps(&self) -> &CMat {
        &self.amps
    }

    pub fn was_renormalized(&self) -> bool {
        self.renormalized
    }

    pub fn vector(&self) -> CVec {
        linalg::flatten_row_major(&self.amps)
    }

    pub fn projector(&self) -> CMat {
        let v = self.vector();
        &v * v.adjoint()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_parts(
            linalg::hermitian_part(&self.projector()),
            Some(self.dims()),
        )
    }

    /// `(U ⊗ V)|ψ⟩`, i.e. amplitudes `U A Vᵀ`.
    pub fn apply_local(&self, u: &CMat, v: &CMat) -> Result<Self> {
        if u.ncols() != self.dim_a() || v.ncols() != self.dim_b() {
            return Err(Error::DimensionMismatch(format!(
                "local operators {}x{} and {}x{} do not act on {}x{}",
                u.nrows(),
                u.ncols(),
                v.nrows(),
                v.ncols(),
                self.dim_a(),
                self.dim_b()
            )));
        }
        Self::new(u * &self.amps * v.transpose())
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(x, y)| x.conj() * y)
            .sum()
    }
}

/// A validated density matrix. Joint states carry their `(dim_a, dim_b)`
/// factorization as metadata.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    entries: CMat,
    factors: Option<(usize, usize)>,
    witness: Option<Arc<Ensemble>>,
}

impl PartialEq for DensityMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries && self.factors == other.factors
    }
}

impl DensityMatrix {
    pub fn new(entries: CMat, factors: Option<(usize, usize)>) -> Result<Self> {
        Self::with_tolerances(entries, factors, &Tolerances::default())
    }

    pub fn with_tolerances(
        entries: CMat,
        factors: Option<(usize, usize)>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || entries.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if let Some((a, b)) = factors {
            if a == 0 || b == 0 || a * b != n {
                return Err(Error::DimensionMismatch(format!(
                    "joint dimension {n} does not factor as {a} x {b}"
                )));
            }
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Param("density matrix entries must be finite".into()));
        }
        let deviation = linalg::hermiticity_gap(&entries);
        if deviation > tol.hermitian {
            return Err(Error::NotHermitian { deviation });
        }
        let entries = linalg::hermitian_part(&entries);
        let trace = linalg::trace(&entries).re;
        if (trace - 1.0).abs() > tol.trace {
            return Err(Error::TraceViolation { trace });
        }
        let min_eigenvalue = *linalg::eigvalsh(&entries).last().expect("nonempty");
        if min_eigenvalue < -tol.psd {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(DensityMatrix {
            entries,
            factors,
            witness: None,
        })
    }

    /// Construct without validation. Callers guarantee the invariants.
    pub(crate) fn from_parts(entries: CMat, factors: Option<(usize, usize)>) -> Self {
        DensityMatrix {
            entries,
            factors,
            witness: None,
        }
    }

    /// Normalize a PSD Hermitian operator by its trace.
    pub(crate) fn from_unnormalized(m: CMat, factors: Option<(usize, usize)>) -> Self {
        let t = linalg::trace(&m).re;
        Self::from_parts(linalg::hermitian_part(&m).unscale(t), factors)
    }

    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Self {
        let n = dim_a * dim_b;
        Self::from_parts(linalg::identity(n).unscale(n as f64), Some((dim_a, dim_b)))
    }

    pub(crate) fn with_witness(mut self, witness: Ensemble) -> Self {
        self.witness = Some(Arc::new(witness));
        self
    }

    /// The product-pure ensemble recorded when this state was built as an
    /// explicit separable mixture.
    pub fn witness(&self) -> Option<&Ensemble> {
        self.witness.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn factors(&self) -> Option<(usize, usize)> {
        self.factors
    }

    pub fn require_factors(&self) -> Result<(usize, usize)> {
        self.factors.ok_or_else(|| {
            Error::DimensionMismatch("joint state carries no (dim_a, dim_b) factorization".into())
        })
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ |ρ_mn|² for Hermitian ρ.
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.entries)
    }

    /// Number of eigenvalues above `cutoff`.
    pub fn rank(&self, cutoff: f64) -> usize {
        self.eigenvalues().iter().filter(|&&x| x > cutoff).count()
    }

    /// Mixture `λ ρ₁ + (1 − λ) ρ₂`.
    pub fn mix(&self, other: &DensityMatrix, lambda: f64) -> Result<Self> {
        if self.dim() != other.dim() || self.factors != other.factors {
            return Err(Error::DimensionMismatch("mixing states of different shape".into()));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Param(format!("mixing weight {lambda} outside [0,1]")));
        }
        Ok(Self::from_parts(
            self.entries.scale(lambda) + other.entries.scale(1.0 - lambda),
            self.factors,
        ))
    }

    /// `(U ⊗ V) ρ (U ⊗ V)^dag`.
    pub fn apply_local(&self, u: &CMat, v: &CMat) -> Result<Self> {
        let (a, b) = self.require_factors()?;
        if u.shape() != (a, a) || v.shape() != (b, b) {
            return Err(Error::DimensionMismatch("local unitaries must be square on A and B".into()));
        }
        let k = linalg::kron(u, v);
        Ok(Self::from_parts(
            linalg::hermitian_part(&(&k * &self.entries * k.adjoint())),
            self.factors,
        ))
    }

    /// Hermitian-part-preserving trace distance `Tr|ρ − σ|`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch("trace distance across dimensions".into()));
        }
        Ok(linalg::trace_norm_hermitian(&(&self.entries - &other.entries)))
    }
}

/// Reduction of a bipartite state to one subsystem.
pub trait PartialTrace {
    /// `ρ_A = Tr_B ρ`.
    fn partial_trace_b(&self) -> Result<DensityMatrix>;
    /// `ρ_B = Tr_A ρ`.
    fn partial_trace_a(&self) -> Result<DensityMatrix>;
}

impl PartialTrace for PureState {
    fn partial_trace_b(&self) -> Result<DensityMatrix> {
        // ρ_A = D D^dag
        let d = &self.amps;
        Ok(DensityMatrix::from_parts(
            linalg::hermitian_part(&(d * d.adjoint())),
            None,
        ))
    }

    fn partial_trace_a(&self) -> Result<DensityMatrix> {
        // ρ_B = Dᵀ conj(D)
        let d = &self.amps;
        Ok(DensityMatrix::from_parts(
            linalg::hermitian_part(&(d.transpose() * d.conjugate())),
            None,
        ))
    }
}

impl PartialTrace for DensityMatrix {
    fn partial_trace_b(&self) -> Result<DensityMatrix> {
        let (a, b) = self.require_factors()?;
        let rho = &self.entries;
        let out = CMat::from_fn(a, a, |i, i2| {
            (0..b).map(|j| rho[(i * b + j, i2 * b + j)]).sum()
        });
        Ok(DensityMatrix::from_parts(out, None))
    }

    fn partial_trace_a(&self) -> Result<DensityMatrix> {
        let (a, b) = self.require_factors()?;
        let rho = &self.entries;
        let out = CMat::from_fn(b, b, |j, j2| {
            (0..a).map(|i| rho[(i * b + j, i * b + j2)]).sum()
        });
        Ok(DensityMatrix::from_parts(out, None))
    }
}

/// Schmidt decomposition `|ψ⟩ = Σ_k λ_k |k⟩|k'⟩`.
///
/// `coeffs` holds all `min(dim_a, dim_b)` singular values in nonincreasing
/// order; `rank` counts those above the cutoff. Column `k` of `left_vecs`
/// (resp. `right_vecs`) is `|k⟩` (resp. `|k'⟩`). Each pair is gauge-fixed so
/// the first non-negligible entry of `|k⟩` is real positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtForm {
    pub coeffs: Vec<f64>,
    pub left_vecs: CMat,
    pub right_vecs: CMat,
    pub rank: usize,
}

pub fn schmidt(state: &PureState, rank_cutoff: f64) -> SchmidtForm {
    let svd = state.amps.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let n = svd.singular_values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));

    let (dim_a, dim_b) = state.dims();
    let mut left = CMat::zeros(dim_a, n);
    let mut right = CMat::zeros(dim_b, n);
    let mut coeffs = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let mut l = u.column(src).into_owned();
        // a_ij = Σ_k U_ik σ_k Vt_kj, so |k'⟩ has components Vt_kj.
        let mut r = v_t.row(src).transpose();
        if let Some(z) = l.iter().copied().find(|z| z.norm() > 1e-8) {
            let phase = z / z.norm();
            l *= phase.conj();
            r *= phase;
        }
        left.set_column(dst, &l);
        right.set_column(dst, &r);
        coeffs.push(svd.singular_values[src].max(0.0));
    }
    let rank = coeffs.iter().filter(|&&x| x > rank_cutoff).count();
    SchmidtForm {
        coeffs,
        left_vecs: left,
        right_vecs: right,
        rank,
    }
}

impl SchmidtForm {
    /// `Σ_k λ_k |k⟩ ⊗ |k'⟩` as an amplitude matrix.
    pub fn reconstruct(&self) -> CMat {
        let mut out = CMat::zeros(self.left_vecs.nrows(), self.right_vecs.nrows());
        for (k, &lam) in self.coeffs.iter().enumerate() {
            out += (self.left_vecs.column(k) * self.right_vecs.column(k).transpose()).scale(lam);
        }
        out
    }

    pub fn squared(&self) -> Vec<f64> {
        self.coeffs.iter().map(|x| x * x).collect()
    }
}

/// Weighted pure-state decomposition `Σ p_i |ψ_i⟩⟨ψ_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    weights: Vec<f64>,
    members: Vec<PureState>,
}

impl Ensemble {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(weights: Vec<f64>, members: Vec<PureState>) -> Result<Self> {
        if weights.is_empty() || weights.len() != members.len() {
            return Err(Error::Param(format!(
                "ensemble needs matching nonempty weights ({}) and members ({})",
                weights.len(),
                members.len()
            )));
        }
        if weights.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err(Error::Param("ensemble weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Param(format!("ensemble weights sum to {total}")));
        }
        let dims = members[0].dims();
        if members.iter().any(|m| m.dims() != dims) {
            return Err(Error::DimensionMismatch("ensemble members differ in shape".into()));
        }
        Ok(Ensemble { weights, members })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn members(&self) -> &[PureState] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.members[0].dims()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &PureState)> {
        self.weights.iter().copied().zip(self.members.iter())
    }

    /// `Σ p_i |ψ_i⟩⟨ψ_i|`.
    pub fn mixture(&self) -> CMat {
        let (a, b) = self.dims();
        let mut out = CMat::zeros(a * b, a * b);
        for (p, m) in self.iter() {
            out += m.projector().scale(p);
        }
        out
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_parts(linalg::hermitian_part(&self.mixture()), Some(self.dims()))
    }

    /// Max-entry deviation of the mixture from `rho`.
    pub fn mixture_gap(&self, rho: &DensityMatrix) -> f64 {
        if rho.dim() != self.dims().0 * self.dims().1 {
            return f64::INFINITY;
        }
        linalg::max_abs(&(self.mixture() - rho.entries()))
    }

    /// Ensemble average `Σ p_i F(ψ_i)`.
    pub fn average(&self, f: impl Fn(&PureState) -> f64) -> f64 {
        self.iter().map(|(p, m)| p * f(m)).sum()
    }
}
