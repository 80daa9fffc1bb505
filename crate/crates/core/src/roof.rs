//! Convex-roof estimation for mixed states.
//!
//! Every ensemble of `ρ = Σ_j μ_j |e_j⟩⟨e_j|` with `m` members is
//! `|φ_i⟩ = Σ_j V_ij √μ_j |e_j⟩` for an `m x r` isometry `V`. The roof is
//! estimated by minimizing `g(V) = Σ_i p_i F(ψ_i)` over the isometry
//! manifold with multi-restart projected descent: central-difference
//! gradients, tangent-space projection, QR retraction and Armijo
//! backtracking. Every reported value is achieved by an explicit ensemble,
//! hence an upper bound on the true roof.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};
use crate::measures;
use crate::phc;
use crate::states::{schmidt, DensityMatrix, Ensemble, PartialTrace, PureState, DEFAULT_RANK_CUTOFF};

/// Members whose weight falls below this are dropped from an ensemble.
pub const MEMBER_DROP_WEIGHT: f64 = 1e-14;

/// Slack for the per-ensemble chain `(Σp C)² ≤ Σp C² ≤ 2(1 − Tr ρ_A²)`.
pub const BOUND_CHAIN_TOL: f64 = 1e-9;

const ISOMETRY_TOL: f64 = 1e-8;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
const POLISH_ITERS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Functional {
    Concurrence,
    Tangle,
    Phc,
}

impl std::str::FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "concurrence" => Ok(Functional::Concurrence),
            "tangle" => Ok(Functional::Tangle),
            "phc" => Ok(Functional::Phc),
            other => Err(Error::Config(format!("unknown functional '{other}'"))),
        }
    }
}

impl std::fmt::Display for Functional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Functional::Concurrence => "concurrence",
            Functional::Tangle => "tangle",
            Functional::Phc => "phc",
        })
    }
}

impl Functional {
    /// The pure-state functional evaluated with the public measure routines.
    pub fn evaluate(&self, psi: &PureState) -> f64 {
        match self {
            Functional::Concurrence => measures::concurrence_purity(psi),
            Functional::Tangle => measures::tangle_pure(psi),
            Functional::Phc => {
                phc::phc_closed_form(&schmidt(psi, DEFAULT_RANK_CUTOFF))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RoofConfig {
    /// Ensemble cardinality `m`; `None` selects `min(r², r + 4)`.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    pub step_tol: f64,
    pub value_tol: f64,
    pub rng_seed: u64,
    pub functional: Functional,
    /// Eigenvalues of ρ at or below this are treated as zero.
    pub rank_cutoff: f64,
    /// Central-difference step for the gradient.
    pub fd_step: f64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        RoofConfig {
            ensemble_size: None,
            restarts: 32,
            max_iters: 500,
            step_tol: 1e-8,
            value_tol: 1e-7,
            rng_seed: 0,
            functional: Functional::Concurrence,
            rank_cutoff: DEFAULT_RANK_CUTOFF,
            fd_step: 1e-6,
        }
    }
}

impl RoofConfig {
    pub fn with_functional(mut self, functional: Functional) -> Self {
        self.functional = functional;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    /// Resolve the ensemble size for a state of rank `r`.
    pub fn resolve_size(&self, r: usize) -> Result<usize> {
        let m = self.ensemble_size.unwrap_or_else(|| (r * r).min(r + 4));
        if m < r {
            return Err(Error::Config(format!(
                "ensemble size {m} is below the rank {r} of the state"
            )));
        }
        if m > r * r {
            return Err(Error::Config(format!(
                "ensemble size {m} exceeds rank² = {}",
                r * r
            )));
        }
        Ok(m)
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        // Negated comparisons also reject NaN.
        if !(self.fd_step > 0.0) || !(self.step_tol >= 0.0) || !(self.value_tol >= 0.0) {
            return Err(Error::Config("tolerances must be non-negative, fd_step positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoofEstimate {
    /// Best ensemble average found: an upper bound on the roof.
    pub value: f64,
    pub best_ensemble: Ensemble,
    pub per_restart_values: Vec<f64>,
    pub converged: bool,
    pub functional: Functional,
    pub rank: usize,
    pub ensemble_size: usize,
    /// Valid ensembles visited by the optimizer (iterates and line-search trials).
    pub ensembles_checked: usize,
    /// Visited ensembles violating the per-ensemble bound chain.
    pub bound_chain_violations: usize,
}

/// Spectral data `ρ = Σ_j μ_j |e_j⟩⟨e_j|` restricted to `μ_j > cutoff`.
#[derive(Debug, Clone)]
pub struct SpectralFrame {
    dims: (usize, usize),
    /// Columns `√μ_j |e_j⟩`.
    scaled: CMat,
}

impl SpectralFrame {
    pub fn new(rho: &DensityMatrix, cutoff: f64) -> Result<Self> {
        let dims = rho.require_factors()?;
        let (vals, vecs) = linalg::eigh(rho.entries());
        let r = vals.iter().filter(|&&x| x > cutoff).count();
        if r == 0 {
            return Err(Error::RankDeficient);
        }
        let mut scaled = CMat::zeros(rho.dim(), r);
        for (j, &lam) in vals.iter().take(r).enumerate() {
            scaled.set_column(j, &vecs.column(j).scale(lam.sqrt()));
        }
        Ok(SpectralFrame { dims, scaled })
    }

    pub fn rank(&self) -> usize {
        self.scaled.ncols()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    /// Ensemble realized by an `m x r` isometry.
    pub fn ensemble(&self, v: &CMat) -> Result<Ensemble> {
        if v.ncols() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "isometry has {} columns, state rank is {}",
                v.ncols(),
                self.rank()
            )));
        }
        let deviation = linalg::isometry_gap(v);
        if deviation > ISOMETRY_TOL {
            return Err(Error::InvalidIsometry { deviation });
        }
        let phi = &self.scaled * v.transpose();
        let (a, b) = self.dims;
        let mut weights = Vec::new();
        let mut members = Vec::new();
        for col in phi.column_iter() {
            let p = col.norm_squared();
            if p < MEMBER_DROP_WEIGHT {
                continue;
            }
            weights.push(p);
            members.push(PureState::from_vector(&col.into_owned(), a, b)?);
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|p| *p /= total);
        Ensemble::new(weights, members)
    }
}

/// Ensemble of `ρ` generated by the isometry `v` (`m x r`, `V^dag V = I`).
pub fn ensemble_from_isometry(rho: &DensityMatrix, v: &CMat) -> Result<Ensemble> {
    SpectralFrame::new(rho, DEFAULT_RANK_CUTOFF)?.ensemble(v)
}

/// Per-member contributions from an unnormalized vector `φ`.
#[derive(Debug, Clone, Copy, Default)]
struct MemberTerms {
    /// `p · C(ψ)` where `p = ‖φ‖²`.
    weighted_c: f64,
    /// `p · C²(ψ)`.
    weighted_tau: f64,
    /// `p · F(ψ)` for the active functional.
    weighted_f: f64,
}

struct Objective {
    frame: SpectralFrame,
    functional: Functional,
    purity_bound: f64,
}

#[derive(Debug, Clone, Copy)]
struct Evaluation {
    value: f64,
    c_avg: f64,
    tau_avg: f64,
}

impl Objective {
    fn member(&self, phi: &[C64], functional: Functional) -> MemberTerms {
        let (a, b) = self.frame.dims;
        let p: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
        if p < MEMBER_DROP_WEIGHT {
            return MemberTerms::default();
        }
        // Σ_{i<j,k<l} |φ_ik φ_jl − φ_il φ_jk|² scales as p², so
        // p·C(ψ) = 2√s and p·C²(ψ) = 4s/p.
        let mut s = 0.0;
        for i in 0..a {
            for j in (i + 1)..a {
                for k in 0..b {
                    let (x, y) = (phi[i * b + k], phi[j * b + k]);
                    for l in (k + 1)..b {
                        s += (x * phi[j * b + l] - phi[i * b + l] * y).norm_sqr();
                    }
                }
            }
        }
        let weighted_c = 2.0 * s.sqrt();
        let weighted_tau = 4.0 * s / p;
        let weighted_f = match functional {
            Functional::Concurrence => weighted_c,
            Functional::Tangle => weighted_tau,
            Functional::Phc => {
                // p·E_PHC(ψ) = √(2 Σ_{k≠l} σ_k² σ_l²) with σ the singular values of φ.
                let m = CMat::from_fn(a, b, |i, j| phi[i * b + j]);
                let sq: Vec<f64> = m.singular_values().iter().map(|x| x * x).collect();
                (2.0 * linalg::distinct_pair_product_sum(&sq)).max(0.0).sqrt()
            }
        };
        MemberTerms {
            weighted_c,
            weighted_tau,
            weighted_f,
        }
    }

    fn phi_row(&self, v_row: &[C64], out: &mut [C64]) {
        let w = &self.frame.scaled;
        for (n, slot) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (j, vij) in v_row.iter().enumerate() {
                acc += w[(n, j)] * vij;
            }
            *slot = acc;
        }
    }

    fn evaluate(&self, v: &CMat, functional: Functional) -> Evaluation {
        let n = self.frame.scaled.nrows();
        let mut phi = vec![C64::new(0.0, 0.0); n];
        let mut row = vec![C64::new(0.0, 0.0); v.ncols()];
        let mut ev = Evaluation {
            value: 0.0,
            c_avg: 0.0,
            tau_avg: 0.0,
        };
        for i in 0..v.nrows() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = v[(i, j)];
            }
            self.phi_row(&row, &mut phi);
            let t = self.member(&phi, functional);
            ev.value += t.weighted_f;
            ev.c_avg += t.weighted_c;
            ev.tau_avg += t.weighted_tau;
        }
        ev
    }

    /// Real and imaginary parts of every 2x2 minor of every member `φ_i`.
    /// The squared norm of this vector is `Σ_i s_i`, which vanishes exactly
    /// when every member is a product vector.
    fn minor_residuals(&self, v: &CMat, out: &mut Vec<f64>) {
        let (a, b) = self.frame.dims;
        let n = self.frame.scaled.nrows();
        let mut phi = vec![C64::new(0.0, 0.0); n];
        let mut row = vec![C64::new(0.0, 0.0); v.ncols()];
        out.clear();
        for i in 0..v.nrows() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = v[(i, j)];
            }
            self.phi_row(&row, &mut phi);
            for i1 in 0..a {
                for i2 in (i1 + 1)..a {
                    for k in 0..b {
                        for l in (k + 1)..b {
                            let z = phi[i1 * b + k] * phi[i2 * b + l] - phi[i1 * b + l] * phi[i2 * b + k];
                            out.push(z.re);
                            out.push(z.im);
                        }
                    }
                }
            }
        }
    }

    fn chain_holds(&self, ev: &Evaluation) -> bool {
        ev.c_avg * ev.c_avg <= ev.tau_avg + BOUND_CHAIN_TOL
            && ev.tau_avg <= self.purity_bound + BOUND_CHAIN_TOL
    }

    /// Euclidean central-difference gradient. The objective is a sum over
    /// rows of `V`, so perturbing `V_ij` only changes member `i`.
    fn gradient(&self, v: &CMat, functional: Functional, h: f64) -> CMat {
        let n = self.frame.scaled.nrows();
        let (m, r) = v.shape();
        let mut grad = CMat::zeros(m, r);
        let mut phi = vec![C64::new(0.0, 0.0); n];
        let mut row = vec![C64::new(0.0, 0.0); r];
        for i in 0..m {
            for j in 0..r {
                row[j] = v[(i, j)];
            }
            for j in 0..r {
                let base = row[j];
                let mut partial = [0.0; 2];
                for (slot, dir) in partial.iter_mut().zip([C64::new(h, 0.0), C64::new(0.0, h)]) {
                    row[j] = base + dir;
                    self.phi_row(&row, &mut phi);
                    let up = self.member(&phi, functional).weighted_f;
                    row[j] = base - dir;
                    self.phi_row(&row, &mut phi);
                    let down = self.member(&phi, functional).weighted_f;
                    *slot = (up - down) / (2.0 * h);
                }
                row[j] = base;
                grad[(i, j)] = C64::new(partial[0], partial[1]);
            }
        }
        grad
    }
}

/// Project onto the tangent space of the complex Stiefel manifold under the
/// real metric `Re Tr(A^dag B)`.
fn tangent_projection(v: &CMat, g: &CMat) -> CMat {
    g - v * linalg::hermitian_part(&(v.adjoint() * g))
}

fn real_inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

#[derive(Debug, Clone)]
struct RestartOutcome {
    value: f64,
    v: CMat,
    converged: bool,
    checked: usize,
    violations: usize,
}

struct Descent<'a> {
    obj: &'a Objective,
    cfg: &'a RoofConfig,
    checked: usize,
    violations: usize,
}

impl Descent<'_> {
    fn record(&mut self, ev: &Evaluation) {
        self.checked += 1;
        if !self.obj.chain_holds(ev) {
            self.violations += 1;
        }
    }

    /// Monotone projected descent on one functional from `v`. Returns the
    /// final point, its value and whether a tolerance stopped the run.
    fn run(&mut self, mut v: CMat, functional: Functional, iters: usize, relative: bool) -> (CMat, f64, bool) {
        let mut ev = self.obj.evaluate(&v, functional);
        self.record(&ev);
        let mut value = ev.value;
        let mut grad = tangent_projection(&v, &self.obj.gradient(&v, functional, self.cfg.fd_step));
        let mut step = 1.0;
        let mut stall = 0usize;
        for _ in 0..iters {
            let gnorm2 = real_inner(&grad, &grad);
            if gnorm2.sqrt() < 1e-14 {
                return (v, value, true);
            }
            let mut t = step;
            let mut accepted = None;
            for _ in 0..MAX_BACKTRACKS {
                let trial = linalg::orthonormalize(&(&v - grad.scale(t)));
                let trial_ev = self.obj.evaluate(&trial, functional);
                self.record(&trial_ev);
                if trial_ev.value <= value - ARMIJO * t * gnorm2 {
                    accepted = Some((trial, trial_ev));
                    break;
                }
                t *= 0.5;
            }
            let Some((next, next_ev)) = accepted else {
                // No descent at numerical resolution.
                return (v, value, true);
            };
            let next_grad =
                tangent_projection(&next, &self.obj.gradient(&next, functional, self.cfg.fd_step));
            // Barzilai-Borwein trial step for the next iteration.
            let s = &next - &v;
            let y = &next_grad - &grad;
            let sy = real_inner(&s, &y).abs();
            step = if sy > 0.0 {
                (real_inner(&s, &s) / sy).clamp(1e-8, 1e3)
            } else {
                (2.0 * t).min(1e3)
            };
            let decrease = value - next_ev.value;
            let moved = t * gnorm2.sqrt();
            v = next;
            ev = next_ev;
            value = ev.value;
            grad = next_grad;
            if moved < self.cfg.step_tol {
                return (v, value, true);
            }
            let scale = if relative { value } else { 1.0 };
            stall = if decrease < self.cfg.value_tol * 1e-3 * scale { stall + 1 } else { 0 };
            if stall >= 20 {
                return (v, value, true);
            }
        }
        (v, value, false)
    }

    /// Levenberg-Marquardt on the minor residuals, parameterized through the
    /// QR retraction. Zero residual means a product ensemble, where first
    /// order descent converges only linearly; here convergence is quadratic.
    fn polish(&mut self, mut v: CMat) -> CMat {
        let (m, r) = v.shape();
        let h = self.cfg.fd_step;
        let np = 2 * m * r;
        let mut res = Vec::new();
        self.obj.minor_residuals(&v, &mut res);
        if res.is_empty() {
            return v;
        }
        let mut g: f64 = res.iter().map(|x| x * x).sum();
        let mut lambda = 1e-3;
        let (mut up, mut down) = (Vec::new(), Vec::new());
        for _ in 0..POLISH_ITERS {
            if g < 1e-30 {
                break;
            }
            let mut jac = DMatrix::<f64>::zeros(res.len(), np);
            for p in 0..np {
                let (i, q) = ((p / 2) / r, (p / 2) % r);
                let dir = if p % 2 == 0 { C64::new(h, 0.0) } else { C64::new(0.0, h) };
                let mut shifted = v.clone();
                shifted[(i, q)] += dir;
                self.obj.minor_residuals(&linalg::orthonormalize(&shifted), &mut up);
                shifted[(i, q)] -= dir * 2.0;
                self.obj.minor_residuals(&linalg::orthonormalize(&shifted), &mut down);
                for (row, (u, d)) in up.iter().zip(&down).enumerate() {
                    jac[(row, p)] = (u - d) / (2.0 * h);
                }
            }
            let jtj = jac.transpose() * &jac;
            let jtr = jac.transpose() * DVector::from_column_slice(&res);
            let before = g;
            loop {
                let mut lhs = jtj.clone();
                for k in 0..np {
                    lhs[(k, k)] += lambda;
                }
                let Some(chol) = lhs.cholesky() else {
                    lambda *= 4.0;
                    continue;
                };
                let x = chol.solve(&jtr);
                let delta = CMat::from_fn(m, r, |i, q| {
                    let p = 2 * (i * r + q);
                    -C64::new(x[p], x[p + 1])
                });
                let trial = linalg::orthonormalize(&(&v + delta));
                self.record(&self.obj.evaluate(&trial, Functional::Tangle));
                self.obj.minor_residuals(&trial, &mut up);
                let g_trial: f64 = up.iter().map(|x| x * x).sum();
                if g_trial < g {
                    v = trial;
                    std::mem::swap(&mut res, &mut up);
                    g = g_trial;
                    lambda = (lambda / 3.0).max(1e-15);
                    break;
                }
                lambda *= 4.0;
                if lambda > 1e8 {
                    return v;
                }
            }
            if before - g < 1e-12 * before {
                break;
            }
        }
        v
    }
}

fn run_restart(obj: &Objective, cfg: &RoofConfig, m: usize, index: usize) -> RestartOutcome {
    let r = obj.frame.rank();
    let start = if index == 0 {
        // Spectral ensemble, padded with zero rows.
        let mut v = CMat::zeros(m, r);
        for j in 0..r {
            v[(j, j)] = linalg::ONE;
        }
        v
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed.wrapping_add(index as u64));
        linalg::random_isometry(&mut rng, m, r)
    };
    let mut descent = Descent {
        obj,
        cfg,
        checked: 0,
        violations: 0,
    };
    // The tangle is smooth where the concurrence has a kink (product
    // members), so it serves as the warm-up phase. Its stall test is
    // relative so that near-separable states are driven well below the
    // absolute tolerance; the polish step then finishes product ensembles.
    let target = cfg.functional;
    let warm = cfg.max_iters / 2;
    let (warmed, _, _) = descent.run(start, Functional::Tangle, warm, true);
    let polished = descent.polish(warmed.clone());
    let start = if obj.evaluate(&polished, target).value < obj.evaluate(&warmed, target).value {
        polished
    } else {
        warmed
    };
    let (v, value, converged) = descent.run(start, target, cfg.max_iters - warm, false);
    RestartOutcome {
        value,
        v,
        converged,
        checked: descent.checked,
        violations: descent.violations,
    }
}

/// Multi-restart estimate of the convex roof of `cfg.functional`.
pub fn roof_minimize(rho: &DensityMatrix, cfg: &RoofConfig) -> Result<RoofEstimate> {
    cfg.validate()?;
    let frame = SpectralFrame::new(rho, cfg.rank_cutoff)?;
    let r = frame.rank();
    let m = cfg.resolve_size(r)?;
    let purity_bound = 2.0 * (1.0 - rho.partial_trace_b()?.purity());
    let obj = Objective {
        frame,
        functional: cfg.functional,
        purity_bound,
    };

    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| run_restart(&obj, cfg, m, k))
        .collect();

    // Ties go to the lowest restart index.
    let best = outcomes
        .iter()
        .enumerate()
        .fold(0, |best, (k, o)| if o.value < outcomes[best].value { k } else { best });
    let winner = &outcomes[best];
    let best_ensemble = obj.frame.ensemble(&winner.v)?;
    Ok(RoofEstimate {
        value: winner.value.max(0.0),
        best_ensemble,
        per_restart_values: outcomes.iter().map(|o| o.value).collect(),
        converged: winner.converged,
        functional: obj.functional,
        rank: r,
        ensemble_size: m,
        ensembles_checked: outcomes.iter().map(|o| o.checked).sum(),
        bound_chain_violations: outcomes.iter().map(|o| o.violations).sum(),
    })
}

/// Roof of `C²`.
pub fn tangle_roof(rho: &DensityMatrix, cfg: &RoofConfig) -> Result<RoofEstimate> {
    roof_minimize(rho, &cfg.clone().with_functional(Functional::Tangle))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceClassEstimate {
    /// `Tr|A| · C(|A| / Tr|A|)`, an upper bound.
    pub value: f64,
    pub trace_norm: f64,
    pub normalized: RoofEstimate,
}

/// Concurrence of a self-adjoint operator, `C(A) = Tr|A| · C(|A|/Tr|A|)`.
pub fn trace_class_concurrence(
    a: &CMat,
    factors: (usize, usize),
    cfg: &RoofConfig,
) -> Result<TraceClassEstimate> {
    if a.nrows() != a.ncols() || a.nrows() != factors.0 * factors.1 {
        return Err(Error::DimensionMismatch(format!(
            "operator {}x{} does not act on {} x {}",
            a.nrows(),
            a.ncols(),
            factors.0,
            factors.1
        )));
    }
    if linalg::hs_norm(a) < 1e-14 {
        return Err(Error::ZeroOperator);
    }
    let deviation = linalg::hermiticity_gap(a);
    if deviation > 1e-10 {
        return Err(Error::NotHermitian { deviation });
    }
    let abs = linalg::spectral_map(a, f64::abs);
    let trace_norm = linalg::trace(&abs).re;
    let rho = DensityMatrix::new(abs.unscale(trace_norm), Some(factors))?;
    let normalized = roof_minimize(&rho, &cfg.clone().with_functional(Functional::Concurrence))?;
    Ok(TraceClassEstimate {
        value: trace_norm * normalized.value,
        trace_norm,
        normalized,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    /// `(Σ p_i C(ψ_i))²` on the best tangle ensemble.
    pub c_sq: f64,
    /// `Σ p_i C²(ψ_i)` on the same ensemble.
    pub tangle: f64,
    /// `2(1 − Tr ρ_A²)`.
    pub purity_bound: f64,
}

/// Evaluate `C² ≤ τ ≤ 2(1 − Tr ρ_A²)` on the best tangle ensemble.
pub fn bound_report(rho: &DensityMatrix, cfg: &RoofConfig) -> Result<BoundReport> {
    let est = tangle_roof(rho, cfg)?;
    let ens = &est.best_ensemble;
    let e_c = ens.average(measures::concurrence_purity);
    let e_tau = ens.average(measures::tangle_pure);
    let purity_bound = 2.0 * (1.0 - rho.partial_trace_b()?.purity());
    let report = BoundReport {
        c_sq: e_c * e_c,
        tangle: e_tau,
        purity_bound,
    };
    if report.c_sq > report.tangle + BOUND_CHAIN_TOL || report.tangle > purity_bound + BOUND_CHAIN_TOL {
        return Err(Error::breach(
            "bound_chain",
            format!(
                "C² = {}, τ = {}, 2(1 − Tr ρ_A²) = {}",
                report.c_sq, report.tangle, purity_bound
            ),
        ));
    }
    Ok(report)
}
