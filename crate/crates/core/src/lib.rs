//! Decides whether the toric ideal of an affine monomial curve, or of its
//! projective closure, is a complete intersection.
//!
//! The general path is [`reduction::affine_ci`] and
//! [`reduction::projective_ci`]: gcd-driven scaling and removal moves that
//! either empty the configuration (a complete intersection, with explicit
//! generators) or leave a residual that is classified by critical-binomial
//! tests. [`families`] has closed forms for generalized arithmetic
//! sequences and `(p,q)`-Fibonacci and Lucas terms, and [`oracle`] counts
//! minimal generators by fiber enumeration as an independent check.
//!
//! ```
//! use toric_ci::reduction::affine_ci;
//! use toric_ci::semigroup::CurveSpec;
//!
//! let a = CurveSpec::from_u64(&[11, 18, 29]).unwrap();
//! assert!(affine_ci(&a, None).is_ci());
//! ```

pub mod arith;
pub mod binomial;
pub mod cli;
pub mod error;
pub mod families;
pub mod oracle;
pub mod reduction;
pub mod semigroup;
pub mod verdict;

pub use error::{Error, Result};
