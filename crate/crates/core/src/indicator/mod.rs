//! Exact Phragmén–Lindelöf indicator calculus.
//!
//! Indicators are continuous, `2 pi`-periodic, piecewise sinusoids
//! `a cos(rho t) + b sin(rho t)` with breakpoints at rational multiples of
//! `pi`. Coefficients and integrals are exact in `Q(sqrt2, sqrt3)` whenever
//! every occurring angle `rho t` is a multiple of `pi/12`; other crossing
//! angles fall back to 256-bit values with an error bound.
//!
//! Asymptotic coefficients are reported as multiples of `1/pi` (so `T(r)`
//! of an Airy curve grows like `(2/pi) r^{3/2}`).

mod catalogue;
mod certificate;
mod family;
pub mod field;
mod file;
mod piecewise;
mod sectors;

pub use catalogue::{airy_catalogue, airy_constraint, airy_model, builtin_model, exp123_model, wronskian_indicator};
pub use certificate::{
    admissible_sum_bound, certify, m_coefficient, max_admissible_sum, mk_coefficients, t_coefficient, theorem2_certificate,
    AdmissibilityConstraint, AsymptoticCertificate, IndicatorModel,
};
pub use family::IndicatorFamily;
pub use field::{Angle, Real};
pub use file::parse_indicator_file;
pub use piecewise::{arc_shift, pointwise_max, sorted_envelopes, PiCoefficient, PiecewiseIndicator, TrigArc};
pub use sectors::{
    lemma2_certificate, profile_levels, sector_decomposition, special_basis_profile, Lemma2Certificate, Sector, SectorDecomposition,
    SpecialBasisProfile,
};

/// The `k`-th smallest value functions of a family, members repeated by
/// multiplicity.
pub fn pointwise_sorted_envelopes(f: &IndicatorFamily) -> crate::error::Result<Vec<PiecewiseIndicator>> {
    f.sorted_envelopes()
}
