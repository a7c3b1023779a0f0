//! Arbitrary-precision evaluation of the secondary zeta function
//! `Z(s) = Σ γₙ^{-s}` over the ordinates of the nontrivial zeros of ζ,
//! continued to the whole plane through the decomposition
//! `Z = A − P + E − S`.

pub mod analysis;
pub mod arith;
pub mod complex;
pub mod engine;
pub mod error;
pub mod format;
pub mod mpcontext;
pub mod quad;
pub mod specials;
pub mod terms;
pub mod zeta_zeros;

pub use complex::ApComplex;
pub use engine::{secondzeta, verify_two_a, EvalOptions, EvalResult, TermBreakdown};
pub use error::{CacheError, Error, PoleInfo, Result};
pub use mpcontext::PrecisionContext;
pub use zeta_zeros::ZeroTable;
