//! # qmetric
//!
//! Three metrics on the density space `D_τ(𝒜) = { a ∈ 𝒜_+ : τ(a) = 1 }` of a
//! finite-dimensional C*-algebra `𝒜 = ⊕_k M_{n_k}(ℂ)` with a faithful trace:
//!
//! | Metric | Definition |
//! |--------|------------|
//! | C*-norm | `d_𝒜(x, y) = ‖x − y‖_𝒜` |
//! | Bures | `d_B(x, y) = √(1 − τ(|√x √y|))` |
//! | quantum (Monge-Kantorovich) | `d_L(x, y) = sup { |τ(xa) − τ(ya)| : L(a) ≤ 1 }` |
//!
//! The Monge-Kantorovich metric is computed on commutative algebras ℂⁿ, where
//! the unit ball of a polyhedral seminorm is a polytope and the supremum is a
//! linear program.
//!
//! [`function_algebra`] holds an exact piecewise-polynomial model of
//! `C([0,1])` with the Lebesgue trace, used for a sequence that converges in
//! the Bures metric but not uniformly.

// `!(a <= b)` is used on purpose so that NaN fails a check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod error;
pub mod function_algebra;
pub mod linalg;
pub mod metrics;

pub use algebra::{
    check_positive, commutative_density, cstar_distance, normalize_to_density, sample_density,
    AlgebraShape, DensityElement, Element, PositivityCertificate, Trace,
};
pub use error::{Error, Result};
pub use linalg::{hermitian_eig, matrix_abs, matrix_function, matrix_sqrt, Domain, EigenDecomposition};
pub use metrics::bures::{bures_commutative_closed_form, bures_distance, fidelity_2x2_oracle};
pub use metrics::quantum::{mk_distance_bruteforce, mk_distance_lp, state_map, StateFunctional};
pub use metrics::seminorm::Seminorm;
