//! Local Kraus channels, one-sided instruments, LOCC monotonicity audits and
//! truncation-convergence scans.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};
use crate::measures::concurrence_purity;
use crate::oracles::{self, FamilyName, FamilyState, StateFamily};
use crate::roof::{self, Functional, RoofConfig};
use crate::states::{DensityMatrix, PureState};

/// Eigenvalue slack for `Σ A†A ⊗ B†B ≤ I`.
pub const TRACE_NONINCREASE_TOL: f64 = 1e-9;
/// Probability below which a branch is treated as not occurring.
pub const NULL_BRANCH_PROB: f64 = 1e-12;
/// Allowed deviation of `Σ_k p_k` from 1 over an instrument.
pub const INSTRUMENT_TOL: f64 = 1e-6;
/// Margins above `-MARGIN_TOL` count as monotone.
pub const MARGIN_TOL: f64 = 1e-9;
/// Slack on the truncation certificate `|ΔC| ≤ √2 Tr|Δρ|`.
pub const CERTIFICATE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
    #[serde(rename = "both")]
    Both,
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Side::A),
            "B" | "b" => Ok(Side::B),
            "both" => Ok(Side::Both),
            other => Err(Error::Param(format!("unknown channel side '{other}'"))),
        }
    }
}

/// `Λ(ρ) = Σ_i (A_i ⊗ B_i) ρ (A_i ⊗ B_i)^dag` with
/// `Σ_i A_i†A_i ⊗ B_i†B_i ≤ I`. One-sided channels carry identities on the
/// untouched factor. Kraus operators may be rectangular, mapping
/// `(d_A, d_B)` to `output_dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    side: Side,
    pairs: Vec<(CMat, CMat)>,
    input_dims: (usize, usize),
    output_dims: (usize, usize),
}

impl KrausChannel {
    pub fn new(side: Side, pairs: Vec<(CMat, CMat)>, input_dims: (usize, usize)) -> Result<Self> {
        let Some((a0, b0)) = pairs.first() else {
            return Err(Error::Param("a channel needs at least one Kraus pair".into()));
        };
        let output_dims = (a0.nrows(), b0.nrows());
        for (a, b) in &pairs {
            if a.ncols() != input_dims.0 || b.ncols() != input_dims.1 {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus pair {}x{} ⊗ {}x{} does not act on {} x {}",
                    a.nrows(),
                    a.ncols(),
                    b.nrows(),
                    b.ncols(),
                    input_dims.0,
                    input_dims.1
                )));
            }
            if (a.nrows(), b.nrows()) != output_dims {
                return Err(Error::DimensionMismatch("Kraus pairs disagree on output dimensions".into()));
            }
        }
        let ch = KrausChannel {
            side,
            pairs,
            input_dims,
            output_dims,
        };
        let excess = ch.trace_nonincrease_excess();
        if excess > TRACE_NONINCREASE_TOL {
            return Err(Error::Param(format!(
                "Kraus family increases trace: largest eigenvalue of Σ K†K exceeds 1 by {excess:e}"
            )));
        }
        Ok(ch)
    }

    /// Channel acting on A only.
    pub fn local_a(ops: Vec<CMat>, input_dims: (usize, usize)) -> Result<Self> {
        let id = linalg::identity(input_dims.1);
        Self::new(Side::A, ops.into_iter().map(|a| (a, id.clone())).collect(), input_dims)
    }

    /// Channel acting on B only.
    pub fn local_b(ops: Vec<CMat>, input_dims: (usize, usize)) -> Result<Self> {
        let id = linalg::identity(input_dims.0);
        Self::new(Side::B, ops.into_iter().map(|b| (id.clone(), b)).collect(), input_dims)
    }

    pub fn local(side: Side, ops: Vec<CMat>, input_dims: (usize, usize)) -> Result<Self> {
        match side {
            Side::A => Self::local_a(ops, input_dims),
            Side::B => Self::local_b(ops, input_dims),
            Side::Both => Err(Error::Param("local() needs side A or B".into())),
        }
    }

    pub fn identity(dims: (usize, usize)) -> Self {
        Self::local_unitary(linalg::identity(dims.0), linalg::identity(dims.1))
            .expect("identity is unitary")
    }

    pub fn local_unitary(u: CMat, v: CMat) -> Result<Self> {
        let dims = (u.ncols(), v.ncols());
        Self::new(Side::Both, vec![(u, v)], dims)
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn pairs(&self) -> &[(CMat, CMat)] {
        &self.pairs
    }

    pub fn input_dims(&self) -> (usize, usize) {
        self.input_dims
    }

    pub fn output_dims(&self) -> (usize, usize) {
        self.output_dims
    }

    /// Joint Kraus operators `A_i ⊗ B_i`.
    pub fn operators(&self) -> Vec<CMat> {
        self.pairs.iter().map(|(a, b)| linalg::kron(a, b)).collect()
    }

    /// `Σ_i K_i† K_i`.
    pub fn effect(&self) -> CMat {
        let n = self.input_dims.0 * self.input_dims.1;
        self.pairs.iter().fold(CMat::zeros(n, n), |acc, (a, b)| {
            acc + linalg::kron(&(a.adjoint() * a), &(b.adjoint() * b))
        })
    }

    /// Largest eigenvalue of `Σ K†K` minus 1 (negative when strictly
    /// trace-decreasing).
    pub fn trace_nonincrease_excess(&self) -> f64 {
        linalg::eigvalsh(&self.effect())[0] - 1.0
    }

    /// Unnormalized `Λ(ρ)`.
    pub fn apply_raw(&self, rho: &DensityMatrix) -> Result<CMat> {
        let dims = rho.require_factors()?;
        if dims != self.input_dims {
            return Err(Error::DimensionMismatch(format!(
                "channel acts on {:?}, state is {:?}",
                self.input_dims, dims
            )));
        }
        let (oa, ob) = self.output_dims;
        let mut out = CMat::zeros(oa * ob, oa * ob);
        for k in self.operators() {
            out += &k * rho.entries() * k.adjoint();
        }
        Ok(out)
    }
}

/// Max deviation of `Σ_k Σ_i K_{k,i}† K_{k,i}` from the identity.
pub fn instrument_completeness_gap(branches: &[KrausChannel]) -> f64 {
    let Some(first) = branches.first() else {
        return f64::INFINITY;
    };
    let n = first.input_dims.0 * first.input_dims.1;
    let total = branches
        .iter()
        .fold(CMat::zeros(n, n), |acc, ch| acc + ch.effect());
    linalg::max_abs(&(total - linalg::identity(n)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutput {
    /// `Λ(ρ) / Tr Λ(ρ)`.
    pub state: DensityMatrix,
    /// `Tr Λ(ρ)` before normalization.
    pub trace: f64,
}

pub fn apply_channel(rho: &DensityMatrix, ch: &KrausChannel) -> Result<ChannelOutput> {
    let raw = ch.apply_raw(rho)?;
    let trace = linalg::trace(&raw).re;
    if trace < 1e-14 {
        return Err(Error::NullOutcome { trace });
    }
    Ok(ChannelOutput {
        state: DensityMatrix::from_unnormalized(raw, Some(ch.output_dims)),
        trace,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchOutcome {
    pub probability: f64,
    /// `Λ_k(ρ)/p_k`; `None` when `p_k ≤ 1e-12`.
    pub post_state: Option<DensityMatrix>,
}

impl BranchOutcome {
    pub fn is_null(&self) -> bool {
        self.post_state.is_none()
    }
}

pub fn apply_instrument(rho: &DensityMatrix, branches: &[KrausChannel]) -> Result<Vec<BranchOutcome>> {
    if branches.is_empty() {
        return Err(Error::IncompleteInstrument { total: 0.0 });
    }
    let mut outcomes = Vec::with_capacity(branches.len());
    for ch in branches {
        let raw = ch.apply_raw(rho)?;
        let probability = linalg::trace(&raw).re.max(0.0);
        let post_state = (probability > NULL_BRANCH_PROB)
            .then(|| DensityMatrix::from_unnormalized(raw, Some(ch.output_dims)));
        outcomes.push(BranchOutcome {
            probability,
            post_state,
        });
    }
    let total: f64 = outcomes.iter().map(|o| o.probability).sum();
    if (total - 1.0).abs() > INSTRUMENT_TOL {
        return Err(Error::IncompleteInstrument { total });
    }
    Ok(outcomes)
}

/// Computational-basis measurement on one side: one branch per outcome.
pub fn projective_measurement(side: Side, dims: (usize, usize)) -> Result<Vec<KrausChannel>> {
    let d = match side {
        Side::A => dims.0,
        Side::B => dims.1,
        Side::Both => return Err(Error::Param("projective measurement needs side A or B".into())),
    };
    (0..d)
        .map(|k| {
            let mut proj = CMat::zeros(d, d);
            proj[(k, k)] = linalg::ONE;
            KrausChannel::local(side, vec![proj], dims)
        })
        .collect()
}

/// Two-branch damping instrument on one side: branch 0 is
/// `diag(1, √(1−γ), …)`, branch 1 collects `√γ |0⟩⟨j|` for `j ≥ 1`.
pub fn damping_instrument(side: Side, dims: (usize, usize), gamma: f64) -> Result<Vec<KrausChannel>> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Param(format!("damping gamma={gamma} outside [0,1]")));
    }
    let d = match side {
        Side::A => dims.0,
        Side::B => dims.1,
        Side::Both => return Err(Error::Param("damping instrument needs side A or B".into())),
    };
    let keep = CMat::from_fn(d, d, |i, j| match (i, j) {
        (0, 0) => linalg::ONE,
        (i, j) if i == j => c((1.0 - gamma).sqrt(), 0.0),
        _ => linalg::ZERO,
    });
    let jumps: Vec<CMat> = (1..d)
        .map(|j| {
            let mut m = CMat::zeros(d, d);
            m[(0, j)] = c(gamma.sqrt(), 0.0);
            m
        })
        .collect();
    Ok(vec![
        KrausChannel::local(side, vec![keep], dims)?,
        KrausChannel::local(side, jumps, dims)?,
    ])
}

/// Random complete one-sided instrument: a Haar isometry
/// `d → (branches · kraus_per_branch · d)` cut into square Kraus blocks.
pub fn random_instrument<R: Rng + ?Sized>(
    rng: &mut R,
    side: Side,
    dims: (usize, usize),
    branches: usize,
    kraus_per_branch: usize,
) -> Result<Vec<KrausChannel>> {
    let d = match side {
        Side::A => dims.0,
        Side::B => dims.1,
        Side::Both => return Err(Error::Param("random instrument needs side A or B".into())),
    };
    if branches == 0 || kraus_per_branch == 0 {
        return Err(Error::Param("instrument needs at least one branch and Kraus operator".into()));
    }
    let iso = linalg::random_isometry(rng, branches * kraus_per_branch * d, d);
    (0..branches)
        .map(|k| {
            let ops = (0..kraus_per_branch)
                .map(|i| {
                    let start = (k * kraus_per_branch + i) * d;
                    iso.rows(start, d).into_owned()
                })
                .collect();
            KrausChannel::local(side, ops, dims)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureMode {
    /// Exact pure-state concurrence; requires a rank-1 input.
    PureExact,
    /// Wootters formula; requires two-qubit inputs and outputs.
    Wootters,
    /// Convex-roof upper bounds on both sides.
    Roof,
}

impl std::str::FromStr for MeasureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure_exact" => Ok(MeasureMode::PureExact),
            "wootters" => Ok(MeasureMode::Wootters),
            "roof" => Ok(MeasureMode::Roof),
            other => Err(Error::ModeUnsupported(format!("unknown measure mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violation,
    /// Negative margin within the optimizer gap of roof estimates.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditResult {
    pub before: f64,
    pub after_avg: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub branch_probabilities: Vec<f64>,
    /// Some value came from a roof estimate (an upper bound).
    pub uses_estimates: bool,
}

const PURE_RANK_TOL: f64 = 1e-9;

fn top_eigenvector_state(rho: &DensityMatrix) -> Result<PureState> {
    let (a, b) = rho.require_factors()?;
    let (_, vecs) = linalg::eigh(rho.entries());
    PureState::from_vector(&vecs.column(0).into_owned(), a, b)
}

fn is_rank_one(rho: &DensityMatrix) -> bool {
    rho.purity() >= 1.0 - PURE_RANK_TOL
}

/// Measure one state under `mode`; returns the value and whether it is an estimate.
fn measure_state(rho: &DensityMatrix, mode: MeasureMode, cfg: &RoofConfig) -> Result<(f64, bool)> {
    match mode {
        MeasureMode::Wootters => {
            if rho.factors() != Some((2, 2)) {
                return Err(Error::ModeUnsupported(format!(
                    "wootters mode needs 2 x 2 states, got {:?}",
                    rho.factors()
                )));
            }
            Ok((oracles::wootters_concurrence(rho)?, false))
        }
        MeasureMode::PureExact | MeasureMode::Roof => {
            if is_rank_one(rho) {
                Ok((concurrence_purity(&top_eigenvector_state(rho)?), false))
            } else {
                let est = roof::roof_minimize(rho, &cfg.clone().with_functional(Functional::Concurrence))?;
                Ok((est.value, true))
            }
        }
    }
}

/// Compare `E(ρ)` with the branch average `Σ_k p_k E(ρ_k')`.
pub fn monotonicity_audit(
    rho: &DensityMatrix,
    branches: &[KrausChannel],
    mode: MeasureMode,
    cfg: &RoofConfig,
) -> Result<AuditResult> {
    if mode == MeasureMode::PureExact && !is_rank_one(rho) {
        return Err(Error::ModeUnsupported(
            "pure_exact mode needs a rank-1 input state".into(),
        ));
    }
    let outcomes = apply_instrument(rho, branches)?;
    let (before, mut uses_estimates) = measure_state(rho, mode, cfg)?;
    let mut after_avg = 0.0;
    for o in &outcomes {
        if let Some(post) = &o.post_state {
            let (value, est) = measure_state(post, mode, cfg)?;
            after_avg += o.probability * value;
            uses_estimates |= est;
        }
    }
    let margin = before - after_avg;
    let verdict = if margin >= -MARGIN_TOL {
        Verdict::Holds
    } else if uses_estimates && margin >= -2.0 * cfg.value_tol {
        Verdict::Inconclusive
    } else {
        Verdict::Violation
    };
    Ok(AuditResult {
        before,
        after_avg,
        margin,
        verdict,
        branch_probabilities: outcomes.iter().map(|o| o.probability).collect(),
        uses_estimates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationScan {
    pub family: String,
    pub dims: Vec<usize>,
    /// Concurrence of the renormalized truncation at each size.
    pub values: Vec<f64>,
    /// `Tr|ρ_{d'} − ρ_d|` between consecutive truncations.
    pub trace_gaps: Vec<f64>,
    /// `√2 · trace_gaps`.
    pub certified_bounds: Vec<f64>,
    /// Weight discarded by each truncation before renormalization.
    pub trace_deficits: Vec<f64>,
    pub analytic_limit: Option<f64>,
    pub certificate_holds: bool,
}

impl TruncationScan {
    /// Index of the first consecutive pair violating the certificate.
    pub fn first_violation(&self) -> Option<usize> {
        (0..self.trace_gaps.len()).find(|&t| {
            (self.values[t + 1] - self.values[t]).abs() > self.certified_bounds[t] + CERTIFICATE_TOL
        })
    }
}

/// Truncate amplitudes to the leading `d x d` block (unnormalized).
fn leading_block(amps: &CMat, d: usize) -> CMat {
    amps.view((0, 0), (d.min(amps.nrows()), d.min(amps.ncols()))).into_owned()
}

/// `Tr|ψψ† − φφ†| = 2√(1 − |⟨φ|ψ⟩|²)` for normalized pure states, with the
/// smaller state zero-padded. Evaluated through the residual
/// `‖ψ − ⟨φ|ψ⟩φ‖` to avoid cancellation.
pub fn pure_trace_distance_embedded(small: &PureState, big: &PureState) -> f64 {
    let (sa, sb) = small.dims();
    let bigv = big.amps();
    let mut overlap = linalg::ZERO;
    for i in 0..sa {
        for j in 0..sb {
            overlap += small.amps()[(i, j)].conj() * bigv[(i, j)];
        }
    }
    let mut residual = 0.0;
    for i in 0..bigv.nrows() {
        for j in 0..bigv.ncols() {
            let s = if i < sa && j < sb { small.amps()[(i, j)] } else { linalg::ZERO };
            residual += (bigv[(i, j)] - overlap * s).norm_sqr();
        }
    }
    2.0 * residual.sqrt()
}

/// Concurrence across increasing truncations of a pure family, with the
/// continuity certificate `|C_{d'} − C_d| ≤ √2 Tr|ρ_{d'} − ρ_d|`.
pub fn truncation_scan(family: &StateFamily, dims: &[usize]) -> Result<TruncationScan> {
    if dims.is_empty() || dims.windows(2).any(|w| w[0] >= w[1]) || dims[0] == 0 {
        return Err(Error::Param("scan dims must be a nonempty strictly increasing list of positive sizes".into()));
    }
    let dmax = *dims.last().expect("nonempty");
    let (reference, analytic_limit) = match family.name {
        FamilyName::TwoModeSqueezed => {
            let r = family.params.get("r").copied().ok_or_else(|| {
                Error::Param("two_mode_squeezed scan needs parameter r".into())
            })?;
            let FamilyState::Pure(p) = oracles::make_family(&family.at_truncation(dmax.max(2)))? else {
                unreachable!("two_mode_squeezed is pure")
            };
            (p, Some(oracles::two_mode_squeezed_limit(r)))
        }
        FamilyName::Product => {
            let FamilyState::Pure(p) = oracles::make_family(&family.at_truncation(dmax))? else {
                unreachable!("product is pure")
            };
            (p, Some(0.0))
        }
        other => {
            return Err(Error::Param(format!(
                "family '{other}' has no truncation sequence; use two_mode_squeezed or product"
            )))
        }
    };

    let mut states = Vec::with_capacity(dims.len());
    let mut trace_deficits = Vec::with_capacity(dims.len());
    for &d in dims {
        let block = leading_block(reference.amps(), d);
        let kept: f64 = block.iter().map(|z| z.norm_sqr()).sum();
        let deficit = match family.name {
            FamilyName::TwoModeSqueezed => {
                let r = family.params["r"];
                1.0 - oracles::two_mode_squeezed_captured_weight(r, d)
            }
            _ => 1.0 - kept,
        };
        trace_deficits.push(deficit.max(0.0));
        states.push(PureState::new(block).map_err(|_| {
            Error::Param(format!("truncation at d={d} discards the entire state"))
        })?);
    }
    let values: Vec<f64> = states.iter().map(concurrence_purity).collect();
    let trace_gaps: Vec<f64> = states
        .windows(2)
        .map(|w| pure_trace_distance_embedded(&w[0], &w[1]))
        .collect();
    let certified_bounds: Vec<f64> = trace_gaps.iter().map(|g| std::f64::consts::SQRT_2 * g).collect();
    let mut scan = TruncationScan {
        family: family.to_string(),
        dims: dims.to_vec(),
        values,
        trace_gaps,
        certified_bounds,
        trace_deficits,
        analytic_limit,
        certificate_holds: true,
    };
    scan.certificate_holds = scan.first_violation().is_none();
    Ok(scan)
}
