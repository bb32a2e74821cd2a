//! Exact arithmetic for the semigroup `P x| N^x` with `P = {0,2,3,...}`, its
//! Nica-covariant Toeplitz algebra, truncated regular representations and
//! KMS states for the natural dynamics.

pub mod error;
pub mod kms;
pub mod monomial;
pub mod regular_rep;
pub mod relations;
pub mod semigroup;
pub mod word;

pub use error::{Error, Result};
pub use kms::{BetaValue, BoundaryMeasure, InverseTemperature};
pub use monomial::{AlgebraElement, ComplexRational, WMonomial};
pub use semigroup::{cup, CupResult, PNElement, QQElement, Rational};
pub use word::{Factor, GenWord, Generator};
