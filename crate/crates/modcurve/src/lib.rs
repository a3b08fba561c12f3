//! Exact-arithmetic models of the modular curves X_0(N).
//!
//! Everything here is exact: q-expansions are truncated Laurent series over
//! arbitrary-precision rationals, linear algebra is fraction-free or
//! CRT-certified over the integers, and every closed-form degree / dimension /
//! divisor formula is implemented as an executable identity that the test
//! suite checks against independently computed data.
//!
//! Module map:
//!
//! - [`arith`] — number-theoretic invariants of Γ0(N): ψ, ν2, ν3, ν∞, genus,
//!   dimension formulas, and the degree formulas for the modular polynomial.
//! - [`qseries`] — the truncated Laurent series ring over exact rationals.
//! - [`forms`] — E4, E6, Δ, j and friends as concrete q-expansions; cusp
//!   enumeration and cuspidal divisors on X_0(N).
//! - [`linalg`] — exact integer kernels (Bareiss + certified multi-modular).
//! - [`implicit`] — implicitization: minimal-degree plane models of X_0(N)
//!   from triples of modular forms, and the (α,β) search.
//! - [`modpoly`] — the classical modular polynomial Φ_N and its degree checks.
//! - [`par`] — tiny data-parallelism shim (rayon behind the `parallel`
//!   feature, sequential fallback otherwise).

pub mod arith;
pub mod forms;
pub mod implicit;
pub mod linalg;
pub mod modpoly;
pub mod par;
pub mod qseries;

pub use arith::LevelInvariants;
pub use forms::{CuspRep, DivisorQ, ModularForm};
pub use implicit::{HomogPoly3, ModelReport};
pub use linalg::IntMatrix;
pub use modpoly::BivarPoly;
pub use qseries::LaurentSeries;

/// Schema version stamped into every JSON artifact this crate emits.
pub const SCHEMA_VERSION: u32 = 1;

/// Errors surfaced by the library.
///
/// Precondition violations that can only arise from caller bugs (e.g. asking
/// for a coefficient beyond a series' stated precision) panic instead; the
/// variants here are the ones a CLI user can legitimately trigger or that a
/// search can legitimately report.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The level is in the genus-0 exclusion list, so no weight-4 plane model
    /// of X_0(N) exists.
    #[error("X_0({0}) has genus 0; the weight-4 minimal-degree formula does not apply")]
    GenusZeroLevel(u64),

    /// N = 11 is the special case where weight 4 fails and the minimal degree
    /// (namely 4) is achieved at weight 6 instead.
    #[error("level 11 is the weight-6 special case: minimal degree 4 is achieved at m = 6")]
    LevelElevenWeightSix,

    /// A series was supplied with less precision than the policy minimum for
    /// the requested linear-algebra window.
    #[error("precision {given} is below the policy minimum {required} for (N={n}, m={m}, d={d})")]
    PrecisionBelowPolicy {
        given: i64,
        required: i64,
        n: u64,
        m: u64,
        d: u64,
    },

    /// The input forms to an implicitization are linearly dependent.
    #[error("input forms are linearly dependent; they do not define a plane curve")]
    LinearlyDependent,

    /// Mixed weights in a triple that must be homogeneous.
    #[error("input forms must share one weight (got {0}, {1}, {2})")]
    WeightMismatch(u64, u64, u64),

    /// The degree scan exhausted its budget without finding a relation.
    #[error("no vanishing relation found up to degree {d_max}; the dimension bound says one must exist below it, so either d_max is too small or the inputs are degenerate")]
    NoRelationFound { d_max: u64 },

    /// First nontrivial vanishing space had dimension > 1 (degenerate triple).
    #[error("vanishing space at first nontrivial degree {degree} has dimension {dim} > 1; triple rejected as degenerate")]
    AnomalousKernel { degree: u64, dim: usize },

    /// Level outside the desk-scale policy range of an operation.
    #[error("level {n} is outside the supported range (max {max})")]
    LevelOutOfRange { n: u64, max: u64 },

    /// Invalid search bound.
    #[error("search bound must be >= 1 (got {0})")]
    InvalidBound(i64),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
