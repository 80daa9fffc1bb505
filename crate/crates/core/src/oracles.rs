//! Independent references: the Wootters two-qubit formula, closed-form
//! state families and construction-time separability witnesses.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec};
use crate::states::{DensityMatrix, Ensemble, PureState};

/// Two-qubit concurrence `max(0, σ₁ − σ₂ − σ₃ − σ₄)`.
///
/// `σ_i` are the square roots of the eigenvalues of `ρ ρ̃`, with
/// `ρ̃ = (Y⊗Y) ρ* (Y⊗Y)`. Writing `ρ = W W†`, they are the singular values of
/// the symmetric matrix `Wᵀ (Y⊗Y) W`, which avoids square roots of
/// noise-level eigenvalues.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.factors() != Some((2, 2)) {
        return Err(Error::DimensionMismatch(format!(
            "Wootters formula needs a 2 x 2 state, got factors {:?}",
            rho.factors()
        )));
    }
    let sigma = wootters_sigmas(rho.entries());
    Ok((sigma[0] - sigma[1] - sigma[2] - sigma[3]).max(0.0))
}

fn yy() -> CMat {
    let y = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
    linalg::kron(&y, &y)
}

#[cfg(test)]
fn spin_flip(rho: &CMat) -> CMat {
    let yy = yy();
    &yy * rho.conjugate() * &yy
}

/// Nonincreasing σ's, padded to four.
fn wootters_sigmas(rho: &CMat) -> Vec<f64> {
    let (vals, vecs) = linalg::eigh(rho);
    let mut w = vecs;
    for (k, v) in vals.iter().enumerate() {
        let mut col = w.column_mut(k);
        col *= c(v.max(0.0).sqrt(), 0.0);
    }
    let tau = w.transpose() * yy() * &w;
    let mut sigma: Vec<f64> = tau.singular_values().iter().copied().collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    sigma.resize(4, 0.0);
    sigma
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyName {
    Bell,
    Werner,
    Isotropic,
    TwoModeSqueezed,
    Product,
    RankKRandom,
    /// Random mixture of product pure states with a recorded witness.
    SeparableMixture,
}

impl FamilyName {
    pub const ALL: [FamilyName; 7] = [
        FamilyName::Bell,
        FamilyName::Werner,
        FamilyName::Isotropic,
        FamilyName::TwoModeSqueezed,
        FamilyName::Product,
        FamilyName::RankKRandom,
        FamilyName::SeparableMixture,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyName::Bell => "bell",
            FamilyName::Werner => "werner",
            FamilyName::Isotropic => "isotropic",
            FamilyName::TwoModeSqueezed => "two_mode_squeezed",
            FamilyName::Product => "product",
            FamilyName::RankKRandom => "rank_k_random",
            FamilyName::SeparableMixture => "separable_mixture",
        }
    }

    fn allowed_params(&self) -> &'static [&'static str] {
        match self {
            FamilyName::Bell => &[],
            FamilyName::Werner => &["p"],
            FamilyName::Isotropic => &["p", "d"],
            FamilyName::TwoModeSqueezed => &["r", "d"],
            FamilyName::Product => &["da", "db", "seed"],
            FamilyName::RankKRandom => &["k", "da", "db", "seed"],
            FamilyName::SeparableMixture => &["k", "da", "db", "seed"],
        }
    }
}

impl FromStr for FamilyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyName::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Param(format!("unknown state family '{s}'")))
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A named state family with parameters, e.g. `two_mode_squeezed:r=0.5,d=8`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFamily {
    pub name: FamilyName,
    pub params: BTreeMap<String, f64>,
    pub seed: Option<u64>,
}

impl StateFamily {
    pub fn new(name: FamilyName) -> Self {
        StateFamily {
            name,
            params: BTreeMap::new(),
            seed: None,
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn real(&self, key: &str, default: Option<f64>) -> Result<f64> {
        match (self.params.get(key), default) {
            (Some(&v), _) if v.is_finite() => Ok(v),
            (Some(&v), _) => Err(Error::Param(format!("{}: {key}={v} is not finite", self.name))),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(Error::Param(format!("{}: missing parameter '{key}'", self.name))),
        }
    }

    fn int(&self, key: &str, default: usize, min: usize) -> Result<usize> {
        let v = self.real(key, Some(default as f64))?;
        if v.fract() != 0.0 || v < min as f64 || v > 1e6 {
            return Err(Error::Param(format!(
                "{}: {key}={v} must be an integer >= {min}",
                self.name
            )));
        }
        Ok(v as usize)
    }

    fn unit_interval(&self, key: &str) -> Result<f64> {
        let v = self.real(key, None)?;
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Param(format!("{}: {key}={v} outside [0, 1]", self.name)));
        }
        Ok(v)
    }

    pub fn effective_seed(&self) -> u64 {
        self.seed
            .or_else(|| self.params.get("seed").map(|&s| s as u64))
            .unwrap_or(0)
    }

    /// Same family with the truncation parameter `d` replaced.
    pub fn at_truncation(&self, d: usize) -> Self {
        let mut f = self.clone();
        match self.name {
            FamilyName::Product => {
                f.params.insert("da".into(), d as f64);
                f.params.insert("db".into(), d as f64);
            }
            _ => {
                f.params.insert("d".into(), d as f64);
            }
        }
        f
    }
}

impl FromStr for StateFamily {
    type Err = Error;

    /// Parse `name` or `name:key=val,key=val`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n.trim(), Some(r)),
            None => (s.trim(), None),
        };
        let name: FamilyName = name.parse()?;
        let mut fam = StateFamily::new(name);
        for pair in rest.into_iter().flat_map(|r| r.split(',')).filter(|p| !p.trim().is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Param(format!("expected key=value, got '{pair}'")))?;
            let k = k.trim();
            if !name.allowed_params().contains(&k) {
                return Err(Error::Param(format!("{name}: unknown parameter '{k}'")));
            }
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Param(format!("{name}: '{v}' is not a number")))?;
            if k == "seed" {
                if v < 0.0 || v.fract() != 0.0 {
                    return Err(Error::Param(format!("{name}: seed must be a non-negative integer")));
                }
                fam.seed = Some(v as u64);
            } else {
                fam.params.insert(k.to_string(), v);
            }
        }
        Ok(fam)
    }
}

impl fmt::Display for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        let mut parts: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        if let Some(s) = self.seed {
            parts.push(format!("seed={s}"));
        }
        if !parts.is_empty() {
            write!(f, ":{}", parts.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl FamilyState {
    pub fn density(&self) -> DensityMatrix {
        match self {
            FamilyState::Pure(p) => p.density(),
            FamilyState::Mixed(m) => m.clone(),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            FamilyState::Pure(p) => p.dims(),
            FamilyState::Mixed(m) => m.factors().expect("family states are bipartite"),
        }
    }
}

pub fn make_family(family: &StateFamily) -> Result<FamilyState> {
    let mut rng = ChaCha8Rng::seed_from_u64(family.effective_seed());
    Ok(match family.name {
        FamilyName::Bell => FamilyState::Pure(PureState::max_entangled(2)),
        FamilyName::Werner => FamilyState::Mixed(werner(family.unit_interval("p")?)),
        FamilyName::Isotropic => {
            let d = family.int("d", 2, 2)?;
            FamilyState::Mixed(isotropic(family.unit_interval("p")?, d))
        }
        FamilyName::TwoModeSqueezed => {
            let r = family.real("r", None)?;
            if r < 0.0 {
                return Err(Error::Param(format!("two_mode_squeezed: r={r} must be >= 0")));
            }
            let d = family.int("d", 8, 2)?;
            FamilyState::Pure(two_mode_squeezed(r, d))
        }
        FamilyName::Product => {
            let da = family.int("da", 2, 1)?;
            let db = family.int("db", 2, 1)?;
            FamilyState::Pure(random_product(&mut rng, da, db))
        }
        FamilyName::RankKRandom => {
            let da = family.int("da", 2, 1)?;
            let db = family.int("db", 2, 1)?;
            let k = family.int("k", 2, 1)?;
            if k > da * db {
                return Err(Error::Param(format!("rank_k_random: k={k} exceeds {}", da * db)));
            }
            FamilyState::Mixed(random_density(&mut rng, da, db, k))
        }
        FamilyName::SeparableMixture => {
            let da = family.int("da", 2, 1)?;
            let db = family.int("db", 2, 1)?;
            let k = family.int("k", 4, 1)?;
            FamilyState::Mixed(random_separable_mixture(&mut rng, da, db, k))
        }
    })
}

/// `p |Φ⁺⟩⟨Φ⁺| + (1 − p) I/4`.
pub fn werner(p: f64) -> DensityMatrix {
    isotropic(p, 2)
}

/// `p |Φ_d⁺⟩⟨Φ_d⁺| + (1 − p) I/d²`.
pub fn isotropic(p: f64, d: usize) -> DensityMatrix {
    let n = d * d;
    let phi = PureState::max_entangled(d).projector();
    let m = phi.scale(p) + linalg::identity(n).scale((1.0 - p) / n as f64);
    DensityMatrix::from_parts(linalg::hermitian_part(&m), Some((d, d)))
}

/// Renormalized `d`-level truncation of `Σ_k tanh^k(r)/cosh(r) |kk⟩`.
pub fn two_mode_squeezed(r: f64, d: usize) -> PureState {
    let t = r.tanh();
    let amps = CMat::from_fn(d, d, |i, j| {
        if i == j {
            c(t.powi(i as i32) / r.cosh(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    PureState::new(amps).expect("k = 0 amplitude is nonzero")
}

/// Captured weight `Σ_{k<d} |amplitude_k|²` before renormalization.
pub fn two_mode_squeezed_captured_weight(r: f64, d: usize) -> f64 {
    1.0 - r.tanh().powi(2 * d as i32)
}

/// Concurrence of the untruncated two-mode squeezed vacuum,
/// `√(2(1 − (1−t²)²/(1−t⁴)))` with `t = tanh r`.
pub fn two_mode_squeezed_limit(r: f64) -> f64 {
    let t2 = r.tanh().powi(2);
    if t2 == 0.0 {
        return 0.0;
    }
    (2.0 * (1.0 - (1.0 - t2).powi(2) / (1.0 - t2 * t2))).max(0.0).sqrt()
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, da: usize, db: usize) -> PureState {
    PureState::new(linalg::random_amplitudes(rng, da, db)).expect("Gaussian sample is nonzero")
}

pub fn random_product<R: Rng + ?Sized>(rng: &mut R, da: usize, db: usize) -> PureState {
    let a = linalg::complex_gaussian(rng, da, 1).column(0).into_owned();
    let b = linalg::complex_gaussian(rng, db, 1).column(0).into_owned();
    PureState::product(&a, &b).expect("Gaussian sample is nonzero")
}

/// Rank-`k` state from a Gaussian purification traced over a `k`-level ancilla.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, da: usize, db: usize, k: usize) -> DensityMatrix {
    let g = linalg::complex_gaussian(rng, da * db, k);
    DensityMatrix::from_unnormalized(&g * g.adjoint(), Some((da, db)))
}

/// `Σ_i p_i |a_i b_i⟩⟨a_i b_i|` with the ensemble recorded as witness.
pub fn product_mixture(weights: Vec<f64>, factors: Vec<(CVec, CVec)>) -> Result<DensityMatrix> {
    let members = factors
        .iter()
        .map(|(a, b)| PureState::product(a, b))
        .collect::<Result<Vec<_>>>()?;
    let ensemble = Ensemble::new(weights, members)?;
    Ok(ensemble.density().with_witness(ensemble))
}

pub fn random_separable_mixture<R: Rng + ?Sized>(
    rng: &mut R,
    da: usize,
    db: usize,
    k: usize,
) -> DensityMatrix {
    let mut weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let factors = (0..k)
        .map(|_| {
            (
                linalg::complex_gaussian(rng, da, 1).column(0).into_owned(),
                linalg::complex_gaussian(rng, db, 1).column(0).into_owned(),
            )
        })
        .collect();
    product_mixture(weights, factors).expect("valid by construction")
}

/// The product-pure ensemble recorded at construction, if any.
pub fn separable_witness_ensemble(rho: &DensityMatrix) -> Option<Ensemble> {
    rho.witness().cloned()
}
