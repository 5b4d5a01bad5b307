//! Exact interpolation by forms with prescribed double points in `P^n`.
//!
//! The crate builds the linear conditions that double points (and the
//! related schemes appearing in Horace-style degenerations) impose on
//! degree-`d` forms, eliminates them exactly over a prime field or the
//! rationals, and compares the outcome with the expected dimension
//! `max(0, C(n+d, d) - r(n+1))`.

pub mod arith;
pub mod combinatorics;
pub mod conditions;
pub mod rank;
pub mod scheme;
pub mod verify;

pub use arith::{Field, Fp, PrimeField, Rationals, DEFAULT_PRIME};
pub use combinatorics::MonomialBasis;
pub use conditions::{build_matrix, ConditionMatrix};
pub use rank::{rank_kernel, solve_interpolant, Matrix};
pub use scheme::{Component, Hyperplane, Point, SchemeConfig};

/// The prime field used by default.
pub type Gf = PrimeField;
pub type GfMatrix = Matrix<PrimeField>;
pub type QMatrix = Matrix<Rationals>;
pub type GfScheme = SchemeConfig<Fp>;
pub type QScheme = SchemeConfig<num_rational::BigRational>;
pub use verify::{Status, VerificationReport};
