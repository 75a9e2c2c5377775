//! Numerical laboratory for the two-valued cut-volume function of tube bodies
//! around even-dimensional spheres in odd-dimensional space.
//!
//! The body under study is the ε-neighbourhood `W` of the unit sphere
//! `S^{n-1} ⊂ R^n` inside `R^{n+m}` (n odd, m even). Every affine hyperplane
//! cuts `W` into two parts; this crate computes those volumes by deterministic
//! quadrature and by Monte Carlo, classifies hyperplanes into the five generic
//! regions of the reduced `(a, c)` plane, reconstructs the single-valued
//! surfaces `S(a, c)` and `P(a, c)` behind the quadratic factor
//! `Φ(V, a, c) = V² − S·V + P` of the volume function, and implements the
//! Klein four-group monodromy action on the four thimble labels together with
//! the leaf algebra tying label subsets to measurable volumes.
//!
//! Module map:
//! * [`body`] — the tube body, implicit function, hyperplane normal form,
//!   closed-form total volume.
//! * [`classify`] — the five regions of the `(a, c)` plane and the tangency
//!   offsets `±1 ± ε√(1+a²)`.
//! * [`quadrature`] — deterministic cut volumes via symmetry reduction to an
//!   iterated low-dimensional integral.
//! * [`oracle`] — reproducible Monte Carlo estimators used to validate both
//!   the closed form and the quadrature.
//! * [`algebra`] — weighted polynomial reconstruction of `S` and `P`, the
//!   quadratic factor and cross-domain volume prediction.
//! * [`monodromy`] — permutation action on thimble labels and leaf transport.
//! * [`certify`] — the orchestrated verification suite, CSV sample files and
//!   JSON reports.

pub mod algebra;
pub mod body;
pub mod certify;
pub mod classify;
mod error;
mod lstsq;
pub mod monodromy;
pub mod oracle;
mod quad1d;
pub mod quadrature;
pub mod rng;
pub mod special;

pub use algebra::{PhiModel, PolynomialModel};
pub use body::{BodySpec, CutVolumeResult, Hyperplane, Method, NormalForm, Side};
pub use classify::{CriticalOffsets, DomainLabel, ThimbleLabel};
pub use error::{Error, Result};
pub use monodromy::{LeafSet, LoopSpec, Perm4};
