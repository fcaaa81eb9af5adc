//! Calculus of multiaffine real stable polynomials.
//!
//! The library provides the polynomial representations (multiaffine by subset
//! bitmask, dense multivariate, univariate), the convolution / flip /
//! differential-operator calculus on them, barrier potentials with
//! above-the-roots certification, root-shift bound certificates, expected
//! characteristic polynomials under measures on subsets, and matrix paving
//! search and bounds. Every analytic bound has a brute-force oracle at small
//! sizes so results can be cross-checked end to end.

pub mod error;
pub mod scalar;
pub mod subset;
pub mod par;
pub mod multiaffine;
pub mod dense;
pub mod uni;
pub mod polarize;
pub mod calculus;
pub mod matrices;
pub mod bounds;
pub mod measures;
pub mod paving;
pub mod random;
pub mod io;
pub mod sweep;
pub mod verify;
pub mod cli;

pub use error::Error;
pub use multiaffine::MultiAffinePoly;
pub use dense::DensePoly;
pub use uni::UniPoly;
