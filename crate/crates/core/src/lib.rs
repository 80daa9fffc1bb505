//! Bipartite entanglement measures on finite truncations of (possibly
//! infinite-dimensional) Hilbert spaces.
//!
//! The crate computes the concurrence and tangle of pure states by three
//! independent formulas, the partial-Hermitian-conjugate (PHC) measure,
//! convex-roof upper bounds for mixed states, LOCC monotonicity audits and
//! truncation-convergence certificates.
//!
//! Modules:
//! - [`states`]: pure states, density matrices, partial traces, Schmidt forms.
//! - [`measures`]: pure-state concurrence, tangle and the purity function.
//! - [`phc`]: partial Hermitian conjugate transform and PHC measure.
//! - [`roof`]: convex-roof estimation over Stiefel-parameterized ensembles.
//! - [`oracles`]: Wootters formula, state families, separability witnesses.
//! - [`channels`]: local Kraus channels, instruments, audits, truncation scans.
//! - [`io`]: JSON state/channel files and scan CSV.

pub mod channels;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod oracles;
pub mod phc;
pub mod roof;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{CMat, CVec, C64};
pub use states::{DensityMatrix, Ensemble, PureState, SchmidtForm};
