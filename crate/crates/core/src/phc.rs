//! Partial Hermitian conjugate (PHC) of a pure state and the PHC measure.
//!
//! For `|ψ⟩ = Σ_k λ_k |k⟩|k'⟩` the transform swaps the primed factors:
//! `ρ^PHC = Σ_{k,l} λ_k λ_l |k⟩|l'⟩⟨l|⟨k'|`. A pure state is separable iff it
//! is PHC invariant, and `‖ρ − ρ^PHC‖₂` equals the concurrence.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::roof::{self, Functional, RoofConfig, RoofEstimate};
use crate::states::{schmidt, DensityMatrix, PureState, SchmidtForm, DEFAULT_RANK_CUTOFF};

pub const DEFAULT_PHC_TOL: f64 = 1e-9;

/// Agreement required between the explicit and closed-form PHC measure.
pub const PHC_ROUTE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PhcResult {
    /// `ρ^PHC` in the product basis. Gauge dependent.
    pub phc_matrix: CMat,
    /// `‖ρ_ψ − ρ_ψ^PHC‖₂` from the explicit matrix difference.
    pub hs_distance: f64,
    /// `√(2 Σ_{k≠l} λ_k² λ_l²)`.
    pub closed_form: f64,
    pub is_phc_invariant: bool,
}

/// Build `ρ^PHC` from a Schmidt form.
///
/// With `P = Σ_k λ_k |k⟩⟨k'*|` (an A x B matrix), the entry
/// `((i,j),(i',j'))` of `ρ^PHC` factors as `P[i,j'] · conj(P[i',j])`.
pub fn phc_transform_from_schmidt(form: &SchmidtForm) -> CMat {
    let (a, b) = (form.left_vecs.nrows(), form.right_vecs.nrows());
    let mut p = CMat::zeros(a, b);
    for (k, &lam) in form.coeffs.iter().enumerate() {
        p += (form.left_vecs.column(k) * form.right_vecs.column(k).adjoint()).scale(lam);
    }
    let n = a * b;
    CMat::from_fn(n, n, |row, col| {
        let (i, j) = (row / b, row % b);
        let (i2, j2) = (col / b, col % b);
        p[(i, j2)] * p[(i2, j)].conj()
    })
}

pub fn phc_transform(psi: &PureState) -> CMat {
    phc_transform_from_schmidt(&schmidt(psi, DEFAULT_RANK_CUTOFF))
}

/// `‖ρ_ψ − M‖₂`.
pub fn hs_distance(psi: &PureState, m: &CMat) -> f64 {
    linalg::hs_norm(&(psi.projector() - m))
}

/// Closed form `√(2 Σ_{k≠l} λ_k² λ_l²)` from Schmidt coefficients.
pub fn phc_closed_form(form: &SchmidtForm) -> f64 {
    (2.0 * linalg::distinct_pair_product_sum(&form.squared())).max(0.0).sqrt()
}

pub fn phc_result(psi: &PureState, phc_tol: f64) -> Result<PhcResult> {
    let form = schmidt(psi, DEFAULT_RANK_CUTOFF);
    let phc_matrix = phc_transform_from_schmidt(&form);
    let hs_distance = hs_distance(psi, &phc_matrix);
    let closed_form = phc_closed_form(&form);
    if (hs_distance - closed_form).abs() > PHC_ROUTE_TOL {
        return Err(Error::breach(
            "phc_route_agreement",
            format!("explicit {hs_distance} vs closed form {closed_form}"),
        ));
    }
    Ok(PhcResult {
        phc_matrix,
        hs_distance,
        closed_form,
        is_phc_invariant: hs_distance <= phc_tol,
    })
}

/// The PHC measure `E_PHC(ψ) = ‖ρ_ψ − ρ_ψ^PHC‖₂`.
pub fn phc_measure(psi: &PureState) -> Result<f64> {
    Ok(phc_result(psi, DEFAULT_PHC_TOL)?.hs_distance)
}

/// Trace-norm variant `‖ρ_ψ − ρ_ψ^PHC‖₁`. Experimental: carries no
/// coincidence guarantee with the concurrence.
pub fn phc_measure_trace_norm(psi: &PureState) -> f64 {
    // ρ^PHC is Hermitian (swapping k and l maps the sum onto itself).
    let diff = psi.projector() - phc_transform(psi);
    linalg::trace_norm_hermitian(&diff)
}

/// PHC criterion: separable iff `E_PHC(ψ) ≤ tol`.
pub fn phc_separability_check(psi: &PureState, tol: f64) -> Result<bool> {
    Ok(phc_measure(psi)? <= tol)
}

/// Convex-roof PHC measure of a mixed state.
pub fn phc_measure_mixed(rho: &DensityMatrix, cfg: &RoofConfig) -> Result<RoofEstimate> {
    let cfg = RoofConfig {
        functional: Functional::Phc,
        ..cfg.clone()
    };
    roof::roof_minimize(rho, &cfg)
}
