//! Value-distribution theory of holomorphic curves `f: C -> P^n`, computed.
//!
//! * [`entire`]: polynomials, exponential polynomials and ODE solutions with
//!   certified multiprecision evaluation, Wronskians and curves.
//! * [`projgeo`]: hyperplane systems, admissibility, flats and chordal distances.
//! * [`nevanlinna`]: characteristic, proximity, counting functions and the
//!   per-radius report with theorem residuals.
//! * [`indicator`]: exact piecewise-sinusoid indicators and the asymptotic
//!   certificates built from them.
//! * [`scenario`]: the builtin curves with their hyperplanes and grids.
//! * [`checks`]: seeded randomised property suites.

pub mod checks;
pub mod entire;
pub mod error;
pub mod exact;
pub mod indicator;
pub mod nevanlinna;
pub mod precision;
pub mod projgeo;
pub mod quadrature;
pub mod scenario;

pub use error::{Error, Result};
