//! Pure-state concurrence and tangle.
//!
//! Three independent routes compute the same number: subsystem purity,
//! squared 2x2 minors of the amplitude matrix, and Schmidt coefficients.
//! Agreement between them is the primary correctness check.

use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::linalg;
use crate::states::{schmidt, DensityMatrix, PureState, SchmidtForm, DEFAULT_RANK_CUTOFF};

/// Joint dimension above which the O(d_A² d_B²) minors route is refused.
pub const MINORS_DIM_LIMIT: usize = 4096;

/// `√(2(1 − Tr ρ²))` with the radicand clamped to `[0, 2]`.
fn purity_root(purity: f64) -> f64 {
    (2.0 * (1.0 - purity)).clamp(0.0, 2.0).sqrt()
}

/// The subsystem-purity function `f(ρ) = √(2(1 − Tr ρ²))`.
pub fn f_purity(rho_a: &DensityMatrix) -> f64 {
    purity_root(rho_a.purity())
}

/// `1 − Tr ρ_A²` for a pure state.
///
/// The reduced matrix (of the smaller factor; both have the same purity) is
/// accumulated in double-double arithmetic from the amplitudes, so the
/// deficit keeps absolute accuracy near 1e-30 instead of the ~1e-16 left by
/// subtracting from 1 in plain doubles. Without this, product states would
/// report a concurrence of order 1e-8.
pub fn purity_deficit(psi: &PureState) -> f64 {
    let amps = psi.amps();
    let d = if amps.nrows() <= amps.ncols() { amps.clone() } else { amps.transpose() };
    let (n, k) = d.shape();
    let zero = TwoFloat::from(0.0);
    let mut trace = zero;
    let mut square = zero;
    for m in 0..n {
        for l in m..n {
            let (mut re, mut im) = (zero, zero);
            for j in 0..k {
                let (x, y) = (d[(m, j)], d[(l, j)]);
                re += TwoFloat::new_mul(x.re, y.re) + TwoFloat::new_mul(x.im, y.im);
                im += TwoFloat::new_mul(x.im, y.re) - TwoFloat::new_mul(x.re, y.im);
            }
            let abs2 = re * re + im * im;
            if m == l {
                trace += re;
                square += abs2;
            } else {
                square += abs2 * 2.0;
            }
        }
    }
    f64::from((trace * trace - square) / (trace * trace))
}

pub fn concurrence_purity(psi: &PureState) -> f64 {
    (2.0 * purity_deficit(psi)).clamp(0.0, 2.0).sqrt()
}

/// `√(Σ_{i,j,k,l} |a_ik a_jl − a_il a_jk|²)`.
///
/// The four-index sum is four times the sum over unordered pairs `i<j`,
/// `k<l`; diagonal pairs vanish.
pub fn concurrence_minors(psi: &PureState) -> Result<f64> {
    let (a, b) = psi.dims();
    if a * b > MINORS_DIM_LIMIT {
        return Err(Error::TooLarge {
            dim: a * b,
            limit: MINORS_DIM_LIMIT,
        });
    }
    Ok((4.0 * linalg::pair_minor_sum(psi.amps())).sqrt())
}

/// `√(2 Σ_{k≠l} λ_k² λ_l²)` evaluated as `√(2((Σλ²)² − Σλ⁴))` after
/// renormalizing `Σλ² = 1`.
pub fn concurrence_schmidt(form: &SchmidtForm) -> f64 {
    let sq = form.squared();
    let total: f64 = sq.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let quartic: f64 = sq.iter().map(|s| (s / total).powi(2)).sum();
    (2.0 * (1.0 - quartic)).clamp(0.0, 2.0).sqrt()
}

/// Literal double sum `√(2 Σ_{k≠l} λ_k² λ_l²)`, kept for comparison with
/// [`concurrence_schmidt`].
pub fn concurrence_schmidt_double_sum(form: &SchmidtForm) -> f64 {
    let sq = form.squared();
    let mut acc = 0.0;
    for (k, x) in sq.iter().enumerate() {
        for (l, y) in sq.iter().enumerate() {
            if k != l {
                acc += x * y;
            }
        }
    }
    (2.0 * acc).max(0.0).sqrt()
}

/// `τ(ψ) = C²(ψ) = 2(1 − Tr ρ_A²)`.
pub fn tangle_pure(psi: &PureState) -> f64 {
    (2.0 * purity_deficit(psi)).clamp(0.0, 2.0)
}

/// Upper bound `√(2(m−1)/m)`, `m = min(d_A, d_B)`, attained by the
/// maximally entangled state.
pub fn concurrence_upper_bound(dim_a: usize, dim_b: usize) -> f64 {
    let m = dim_a.min(dim_b) as f64;
    (2.0 * (m - 1.0) / m).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureMeasureReport {
    pub c_purity: f64,
    pub c_minors: f64,
    pub c_schmidt: f64,
    pub tangle: f64,
    pub max_pairwise_gap: f64,
}

pub const FORMULA_AGREEMENT_TOL: f64 = 1e-9;

impl PureMeasureReport {
    /// Evaluate all three formulas and check the report invariants.
    pub fn compute(psi: &PureState) -> Result<Self> {
        let c_purity = concurrence_purity(psi);
        let c_minors = concurrence_minors(psi)?;
        let c_schmidt = concurrence_schmidt(&schmidt(psi, DEFAULT_RANK_CUTOFF));
        let tangle = tangle_pure(psi);
        let max_pairwise_gap = (c_purity - c_minors)
            .abs()
            .max((c_purity - c_schmidt).abs())
            .max((c_minors - c_schmidt).abs());
        let report = PureMeasureReport {
            c_purity,
            c_minors,
            c_schmidt,
            tangle,
            max_pairwise_gap,
        };
        report.check(psi.dims())?;
        Ok(report)
    }

    fn check(&self, (a, b): (usize, usize)) -> Result<()> {
        if self.max_pairwise_gap > FORMULA_AGREEMENT_TOL {
            return Err(Error::breach(
                "three_formula_agreement",
                format!("max pairwise gap {:e}", self.max_pairwise_gap),
            ));
        }
        if (self.tangle - self.c_purity * self.c_purity).abs() > 1e-12 {
            return Err(Error::breach(
                "tangle_is_c_squared",
                format!("tangle {} vs C² {}", self.tangle, self.c_purity.powi(2)),
            ));
        }
        if self.c_purity < 0.0 || self.c_purity > concurrence_upper_bound(a, b) + 1e-9 {
            return Err(Error::breach(
                "concurrence_range",
                format!("C = {} outside [0, {}]", self.c_purity, concurrence_upper_bound(a, b)),
            ));
        }
        Ok(())
    }
}
