//! Weyl complexity, Weyl polynomials and polynomial recurrence in Weyl systems.
//!
//! - [`polynomial`]: integer-valued polynomials in the binomial basis and their parser.
//! - [`linalg`]: exact rational RREF, rank, nullspace and subspace algebra.
//! - [`weyl`]: `Λ_k(P)`, Weyl complexity `W(P)`, the spaces `WP_k(P)` and scheme comparison.
//! - [`dynamics`]: standard Weyl systems, character correlations, expansions and averages.
//! - [`recurrence`]: candidate recurrence sets and witness probes.

pub mod dynamics;
pub mod linalg;
pub mod polynomial;
pub mod recurrence;
pub mod weyl;

pub use dynamics::{
    CharSum, Character, CorrelationClosedForm, CorrelationExpansion, GaussianRational, Rotation,
    StandardWeylSystem,
};
pub use linalg::{RationalMatrix, Subspace};
pub use polynomial::{IntegralPolynomial, RationalPolynomial};
pub use recurrence::{ProbeReport, RecurrenceSetSpec};
pub use weyl::{PolyFamily, SchemeRelation, WeylError, WeylSpace};
