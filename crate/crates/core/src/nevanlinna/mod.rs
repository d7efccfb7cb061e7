//! Finite-radius value-distribution functions of a holomorphic curve.
//!
//! All circle means come from [`crate::quadrature::circle_means`] applied to
//! one vector integrand per radius, so `T`, every `m(r,a)`, every `m_k` and
//! the Jensen counts share nodes. Zero counts come from argument tracking
//! (or exact roots for polynomial intersection functions).

use serde::{Deserialize, Serialize};

use crate::entire::HoloCurve;
use crate::error::{Error, Result};
use crate::precision::{default_digits, digits_to_bits, DEFAULT_CEILING_DIGITS};
use crate::projgeo::{FlatLattice, Hyperplane, HyperplaneSystem};
use crate::quadrature::{circle_means, QuadratureSpec};

mod counting;
mod report;
mod sampler;

pub use counting::{
    bracket_counting, count_zeros, counting_n, eval_scaled, polynomial_zero_moduli, step_counting, track_winding, winding_base,
    CountingN,
    Winding, ZeroCount,
};
pub use report::{
    analyze, cartan_report, defect_estimates, proposition_gap, theorem1_report, InvariantCheck, RadiusRow, ValueDistReport,
    REPORT_SCHEMA_VERSION,
};
pub use sampler::{CurveSampler, Sample};

/// Radii `r_1 < ... < r_M`, each with its working precision in digits
/// (`0` picks the default for the curve's order).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    radii: Vec<f64>,
    digits: Vec<u32>,
}

impl RadialGrid {
    pub fn from_radii(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::Invalid("empty radial grid".into()));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Invalid("radii must be positive and finite".into()));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("radii must be strictly increasing".into()));
        }
        let digits = vec![0; radii.len()];
        Ok(Self { radii, digits })
    }

    pub fn log_spaced(rmin: f64, rmax: f64, m: usize) -> Result<Self> {
        if m == 0 || !(rmin > 0.0) || rmax < rmin || (m > 1 && rmax == rmin) {
            return Err(Error::Invalid(format!("bad grid: rmin {rmin}, rmax {rmax}, {m} radii")));
        }
        if m == 1 {
            return Self::from_radii(vec![rmin]);
        }
        let l = (rmax / rmin).ln();
        let radii = (0..m).map(|i| if i + 1 == m { rmax } else { rmin * (l * i as f64 / (m - 1) as f64).exp() }).collect();
        Self::from_radii(radii)
    }

    /// Uses at least `digits` everywhere.
    pub fn with_min_digits(mut self, digits: u32) -> Self {
        for d in &mut self.digits {
            *d = (*d).max(digits);
        }
        self
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Working digits at radius index `i` for a curve of order `rho`.
    pub fn digits_at(&self, i: usize, rho: f64) -> u32 {
        default_digits(self.radii[i], rho).max(self.digits[i])
    }
}

/// Controls for [`analyze`] and the single-quantity functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub quad: QuadratureSpec,
    pub ceiling_digits: u32,
    /// Extra log-spaced radii below the grid used by the bracketed counting
    /// route for non-polynomial functions.
    pub count_grid: usize,
    /// Threshold on `(sum m_k + N_1 - (n+1) T) / T` at the top radius.
    pub theorem1_eps: f64,
    /// Move radii (by at most 1%) away from zeros near the circle.
    pub nudge: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self { quad: QuadratureSpec::default(), ceiling_digits: DEFAULT_CEILING_DIGITS, count_grid: 8, theorem1_eps: 0.05, nudge: true }
    }
}

/// Circle mean with its quadrature error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

fn one_mean<F>(q: &QuadratureSpec, f: F) -> Result<Estimate>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let m = circle_means(q, |t| Ok(vec![f(t)?]))?;
    if m.exhausted {
        return Err(Error::Uncertified(format!("quadrature depth exhausted (error {:e})", m.errors[0])));
    }
    Ok(Estimate { value: m.values[0], err: m.errors[0] })
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Invalid(format!("radius {r} must be positive")))
    }
}

/// `T(r) = mean ln ||f(re^{it})|| - ln ||f(0)||`.
pub fn characteristic_t(f: &HoloCurve, r: f64, q: &QuadratureSpec, digits: u32) -> Result<Estimate> {
    check_radius(r)?;
    let s = CurveSampler::new(f, None, false, digits, DEFAULT_CEILING_DIGITS)?;
    let e = one_mean(q, |t| Ok(s.polar(r, t)?.ln_norm))?;
    Ok(Estimate { value: e.value - f.ln_norm_at_origin()?, err: e.err })
}

/// `m(r, a) = mean ln(||alpha|| ||f|| / |g_a|)`.
pub fn proximity_m(f: &HoloCurve, a: &Hyperplane, r: f64, q: &QuadratureSpec, digits: u32) -> Result<Estimate> {
    check_radius(r)?;
    let sys = HyperplaneSystem::new(f.n(), vec![a.clone()])?;
    let s = CurveSampler::new(f, Some(&sys), false, digits, DEFAULT_CEILING_DIGITS)?;
    one_mean(q, |t| {
        let x = s.polar(r, t)?;
        Ok(x.ln_norm - x.g[0].ln_abs())
    })
}

/// `m_k(r) = mean ln(1/d_k)`; zero for `k = n+1`.
pub fn proximity_mk(
    f: &HoloCurve,
    sys: &HyperplaneSystem,
    lattice: &FlatLattice,
    k: usize,
    r: f64,
    q: &QuadratureSpec,
    digits: u32,
) -> Result<Estimate> {
    check_radius(r)?;
    if !lattice.is_complete() {
        return Err(Error::MissingCodimension(f.n() + 1));
    }
    if k == 0 || k > f.n() + 1 {
        return Err(Error::Invalid(format!("k = {k} outside 1..={}", f.n() + 1)));
    }
    if k == f.n() + 1 {
        return Ok(Estimate { value: 0.0, err: 0.0 });
    }
    let s = CurveSampler::new(f, Some(sys), false, digits, DEFAULT_CEILING_DIGITS)?;
    one_mean(q, |t| {
        let x = s.polar(r, t)?;
        Ok(-lattice.ln_d_k_from_values(k, &x.g, x.ln_norm)?)
    })
}

/// Counting function of the Wronskian.
pub fn n1(f: &HoloCurve, r: f64, q: &QuadratureSpec, digits: u32) -> Result<CountingN> {
    check_radius(r)?;
    counting_n(f.wronskian().as_ref(), r, q, digits, 8)
}

/// Largest relative deviation of the directly evaluated Wronskian from
/// `W(0)` at `samples` points of `|z| = r`, each computed to `digits`.
pub fn wronskian_constancy(f: &HoloCurve, r: f64, digits: u32, samples: usize) -> Result<f64> {
    let w0 = crate::entire::escalate(digits, DEFAULT_CEILING_DIGITS, |bits| f.direct_wronskian(&rug::Complex::new(bits), bits))?;
    let mut worst = 0.0f64;
    for i in 0..samples {
        let t = std::f64::consts::TAU * (i as f64 + 0.5) / samples as f64;
        let z = num_complex::Complex64::from_polar(r, t);
        let w = crate::entire::escalate(digits, DEFAULT_CEILING_DIGITS, |bits| {
            f.direct_wronskian(&rug::Complex::with_val(bits, (z.re, z.im)), bits)
        })?;
        let bits = digits_to_bits(digits) + 64;
        let d = rug::Complex::with_val(bits, &w - &w0);
        let rel = crate::precision::ln_abs(&d) - crate::precision::ln_abs(&w0);
        worst = worst.max(rel.exp());
    }
    Ok(worst)
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entire::{EntireFn, PolynomialFn};
    use crate::exact::GaussRational;
    use std::sync::Arc;

    fn line() -> HoloCurve {
        HoloCurve::new(vec![Arc::new(PolynomialFn::from_ints(&[1])) as EntireFn, Arc::new(PolynomialFn::from_ints(&[0, 1]))], None)
            .unwrap()
    }

    #[test]
    fn characteristic_of_a_line() {
        let q = QuadratureSpec::default();
        let t = characteristic_t(&line(), 1.0, &q, 20).unwrap();
        assert!((t.value - 0.5 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn proximity_of_a_line() {
        let q = QuadratureSpec::default();
        let a = Hyperplane::from_exact("w1", vec![GaussRational::zero(), GaussRational::one()], true).unwrap();
        let m = proximity_m(&line(), &a, 2.0, &q, 20).unwrap();
        let expected = 0.5 * 5f64.ln() - 2f64.ln();
        assert!((m.value - expected).abs() < 1e-10);
        assert!((expected - 0.111572).abs() < 1e-6);
    }

    #[test]
    fn n1_examples() {
        let q = QuadratureSpec::default();
        let c = HoloCurve::new(
            vec![
                Arc::new(PolynomialFn::from_ints(&[1])) as EntireFn,
                Arc::new(PolynomialFn::from_ints(&[0, 1])),
                Arc::new(PolynomialFn::from_ints(&[0, 0, 0, 1])),
            ],
            None,
        )
        .unwrap();
        let n = n1(&c, 5.0, &q, 20).unwrap();
        assert!((n.step.0 - 5f64.ln()).abs() < 1e-12);
        assert!(n.agree);
        let c2 = HoloCurve::new(
            vec![
                Arc::new(PolynomialFn::from_ints(&[1])) as EntireFn,
                Arc::new(PolynomialFn::from_ints(&[0, 1])),
                Arc::new(PolynomialFn::from_ints(&[0, 0, 1])),
            ],
            None,
        )
        .unwrap();
        assert_eq!(n1(&c2, 5.0, &q, 20).unwrap().step, (0.0, 0.0));
    }

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::from_radii(vec![1.0, 1.0]).is_err());
        assert!(RadialGrid::from_radii(vec![-1.0]).is_err());
        let g = RadialGrid::log_spaced(1.0, 100.0, 3).unwrap();
        assert!((g.radii()[1] - 10.0).abs() < 1e-12);
        assert_eq!(g.radii()[2], 100.0);
    }

    #[test]
    fn slope_fit() {
        assert!((fit_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]) - 2.0).abs() < 1e-15);
    }
}
