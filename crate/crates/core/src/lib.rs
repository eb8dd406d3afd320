//! Symbolic-numeric toolkit for noncommutative generating series and
//! Chen–Fliess input-output operators.
//!
//! The crate is organised bottom-up:
//!
//! - [`words`]: alphabets, words, reversal and enumeration.
//! - [`series`]: truncated formal power series with symmetry predicates,
//!   maximal-series constructors, shuffle and concatenation products and
//!   proper algebraic fixed points.
//! - [`hankel`]: Hankel blocks, exact rank, adjoint polynomials
//!   `ad_{x0}^i(x1)` and the finite rank probes for palindromic series.
//! - [`specfun`]: Bessel, Pochhammer, beta and generalized hypergeometric
//!   series plus residual checks of the series identities used downstream.
//! - [`simulate`]: iterated integrals, Chen–Fliess evaluation, impulse
//!   response kernels and the time-varying realization.
//! - [`nulling`]: relative degree, output-nulling inputs and zero dynamics.

pub mod hankel;
pub mod nulling;
pub mod scalar;
pub mod series;
pub mod simulate;
pub mod specfun;
pub mod words;

mod error;

pub use error::Error;
pub use scalar::{Rational, Scalar};
pub use series::{MaximalKind, Series};
pub use simulate::{Kernel, KernelKind, SampledSignal};
pub use words::{Alphabet, Word};
