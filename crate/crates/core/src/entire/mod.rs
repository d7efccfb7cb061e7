//! Entire functions of the class closed under differentiation: polynomials,
//! exponential polynomials and solutions of linear ODEs with polynomial
//! coefficients.
//!
//! Every variant implements [`EntireFunction`]. Evaluation is done with
//! MPFR-backed complex numbers at an explicit working precision, and each
//! raw evaluation reports an absolute error bound so that callers can
//! escalate precision until a requested relative accuracy is certified.

use std::fmt;
use std::sync::Arc;

use rug::Complex;

use crate::error::{Error, Result};
use crate::exact::GaussRational;
use crate::precision::{digits_to_bits, Bounded, DEFAULT_CEILING_DIGITS, GUARD_DIGITS, MIN_DIGITS};

mod combination;
mod curve;
mod exppoly;
mod ode;
mod poly;
pub mod registry;
mod series;
pub mod wronskian;

pub use combination::LinearCombination;
pub use curve::{HoloCurve, Reducedness};
pub use exppoly::ExpPolynomialFn;
pub use ode::{OdeEquation, OdeSolutionFn};
pub use poly::PolynomialFn;
pub use registry::{ComponentKind, ComponentRegistry};

/// Common interface of the supported entire-function classes.
pub trait EntireFunction: Send + Sync + fmt::Debug {
    /// Registry tag of the variant (`poly`, `exppoly`, `ode`, ...).
    fn kind(&self) -> &'static str;

    /// `f^{(k)}(z)` at `bits` of working precision, with an absolute error bound.
    fn eval_bounded(&self, k: usize, z: &Complex, bits: u32) -> Result<Bounded>;

    /// First `m` Taylor coefficients at the origin, when they are exact.
    fn taylor_exact(&self, m: usize) -> Option<Vec<GaussRational>>;

    /// First `m` Taylor coefficients rounded to `bits`.
    fn taylor_approx(&self, m: usize, bits: u32) -> Vec<Complex> {
        self.taylor_exact(m)
            .expect("variant without exact Taylor data must override taylor_approx")
            .iter()
            .map(|c| c.to_complex(bits))
            .collect()
    }

    /// Order of growth (0 for polynomials).
    fn growth_order(&self) -> f64;

    fn is_identically_zero(&self) -> bool;

    /// True when the function provably has no zeros in `C`.
    fn is_zero_free(&self) -> bool {
        false
    }

    fn as_polynomial(&self) -> Option<&PolynomialFn> {
        None
    }

    fn as_ode(&self) -> Option<&OdeSolutionFn> {
        None
    }
}

pub type EntireFn = Arc<dyn EntireFunction>;

/// Precision-escalating evaluation of `f^{(k)}(z)`.
///
/// The result has relative error at most `10^-(prec - GUARD_DIGITS)`;
/// working precision starts at `prec` digits and grows by the observed
/// deficit until the bound passes or `ceiling_digits` is reached.
pub fn derivative_eval_with(
    f: &dyn EntireFunction,
    k: usize,
    z: &Complex,
    prec: u32,
    ceiling_digits: u32,
) -> Result<Complex> {
    escalate(prec, ceiling_digits, |bits| f.eval_bounded(k, z, bits))
}

/// Runs `attempt` at growing precision until its bound certifies a relative
/// error of `10^-(prec - GUARD_DIGITS)`. An exactly-zero value with a
/// nonzero bound keeps escalating, since zero cannot be certified relatively.
pub fn escalate<F>(prec: u32, ceiling_digits: u32, mut attempt: F) -> Result<Complex>
where
    F: FnMut(u32) -> Result<Bounded>,
{
    if prec < MIN_DIGITS {
        return Err(Error::Invalid(format!("precision {prec} below minimum {MIN_DIGITS}")));
    }
    let target = -((prec - GUARD_DIGITS) as f64) * std::f64::consts::LN_10;
    let ceiling = digits_to_bits(ceiling_digits);
    let mut bits = digits_to_bits(prec);
    loop {
        let b = attempt(bits)?;
        let rel = b.ln_rel_err();
        if rel <= target {
            return Ok(b.value);
        }
        let deficit = if rel.is_finite() { (rel - target) / std::f64::consts::LN_2 } else { bits as f64 };
        let next = bits + deficit.ceil() as u32 + 32;
        if next > ceiling {
            return Err(Error::PrecisionExhausted { needed: next, ceiling });
        }
        bits = next;
    }
}

pub fn eval(f: &dyn EntireFunction, z: &Complex, prec: u32) -> Result<Complex> {
    derivative_eval_with(f, 0, z, prec, DEFAULT_CEILING_DIGITS)
}

pub fn derivative_eval(f: &dyn EntireFunction, k: usize, z: &Complex, prec: u32) -> Result<Complex> {
    derivative_eval_with(f, k, z, prec, DEFAULT_CEILING_DIGITS)
}

/// Order of the zero at the origin and the leading Taylor coefficient.
#[derive(Clone, Debug)]
pub struct VanishingOrder {
    pub order: usize,
    pub leading: Complex,
    pub exact: Option<GaussRational>,
}

impl VanishingOrder {
    pub fn ln_abs_leading(&self) -> f64 {
        crate::precision::ln_abs(&self.leading)
    }
}

/// Coefficients examined before giving up on locating the first nonzero one.
pub const TAYLOR_BUDGET: usize = 512;

pub fn vanishing_order_at_origin(f: &dyn EntireFunction) -> Result<VanishingOrder> {
    if let Some(c) = f.taylor_exact(TAYLOR_BUDGET) {
        return leading_exact(&c);
    }
    leading_approx(&f.taylor_approx(TAYLOR_BUDGET, 512), 512)
}

pub(crate) fn leading_exact(c: &[GaussRational]) -> Result<VanishingOrder> {
    match c.iter().position(|a| !a.is_zero()) {
        Some(m) => Ok(VanishingOrder { order: m, leading: c[m].to_complex(256), exact: Some(c[m].clone()) }),
        None => Err(Error::Uncertified(format!(
            "no nonzero Taylor coefficient among the first {}",
            c.len()
        ))),
    }
}

/// Numeric variant: a coefficient counts as nonzero when it is above the
/// rounding floor of the largest coefficient seen so far.
pub(crate) fn leading_approx(c: &[Complex], bits: u32) -> Result<VanishingOrder> {
    let scale = c.iter().map(crate::precision::ln_abs).fold(f64::NEG_INFINITY, f64::max);
    let floor = scale - (bits as f64 / 2.0) * std::f64::consts::LN_2;
    match c.iter().position(|a| crate::precision::ln_abs(a) > floor) {
        Some(m) => Ok(VanishingOrder { order: m, leading: c[m].clone(), exact: None }),
        None => Err(Error::Uncertified("no coefficient above the rounding floor".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::{Float, Rational};

    fn z(re: f64, im: f64) -> Complex {
        Complex::with_val(256, (re, im))
    }

    fn exp_ode() -> OdeSolutionFn {
        // y' - y = 0
        let eq = OdeEquation::new(vec![PolynomialFn::from_ints(&[-1])]).unwrap();
        OdeSolutionFn::new(Arc::new(eq), vec![GaussRational::one()]).unwrap()
    }

    fn de3(init: [i64; 3]) -> OdeSolutionFn {
        OdeSolutionFn::new(
            Arc::new(OdeEquation::de3()),
            init.iter().map(|&v| GaussRational::from_int(v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn exp_at_one() {
        let v = eval(&exp_ode(), &z(1.0, 0.0), 30).unwrap();
        assert!((v.real().to_f64() - std::f64::consts::E).abs() < 1e-15);
        assert!(v.imag().to_f64().abs() < 1e-30);
    }

    #[test]
    fn exp_at_ten_matches_exact_rational_series() {
        // oracle: sum of 10^n/n! in exact rationals, 120 terms (tail < 1e-80)
        let mut term = Rational::from(1);
        let mut sum = Rational::from(0);
        for n in 0..120u32 {
            sum += &term;
            term *= Rational::from((10, n + 1));
        }
        let oracle = Float::with_val(300, &sum);
        let v = eval(&exp_ode(), &z(10.0, 0.0), 60).unwrap();
        let rel = Float::with_val(300, v.real() - &oracle) / &oracle;
        assert!(rel.to_f64().abs() < 1e-55, "rel {}", rel.to_f64());
        assert!((oracle.to_f64() - 22026.465794806718).abs() < 1e-9);
    }

    #[test]
    fn de3_initial_condition() {
        let v = eval(&de3([1, 0, 0]), &z(0.0, 0.0), 20).unwrap();
        assert_eq!(v.real().to_f64(), 1.0);
    }

    #[test]
    fn polynomial_second_derivative() {
        let f = PolynomialFn::from_ints(&[0, 0, 0, 1]);
        let v = derivative_eval(&f, 2, &z(2.0, 0.0), 20).unwrap();
        assert_eq!(v.real().to_f64(), 12.0);
    }

    #[test]
    fn ode_exp_fifth_derivative_at_origin() {
        let v = derivative_eval(&exp_ode(), 5, &z(0.0, 0.0), 20).unwrap();
        assert!((v.real().to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn de3_third_derivative_satisfies_equation() {
        let f = de3([1, 2, -3]);
        for &(x, y) in &[(0.7, -0.3), (2.5, 1.5), (-4.0, 3.0)] {
            let p = z(x, y);
            let d3 = derivative_eval(&f, 3, &p, 40).unwrap();
            let d1 = derivative_eval(&f, 1, &p, 40).unwrap();
            let d0 = eval(&f, &p, 40).unwrap();
            let rhs = Complex::with_val(256, &p * &d1) + &d0;
            let diff = Complex::with_val(256, &d3 - &rhs);
            let scale = crate::precision::ln_abs(&d3).max(0.0);
            assert!(crate::precision::ln_abs(&diff) < scale - 30.0 * std::f64::consts::LN_10);
        }
    }

    #[test]
    fn vanishing_orders() {
        let f = PolynomialFn::from_ints(&[0, 0, 1, 1]);
        let v = vanishing_order_at_origin(&f).unwrap();
        assert_eq!(v.order, 2);
        assert_eq!(v.exact.unwrap(), GaussRational::one());

        let v = vanishing_order_at_origin(&exp_ode()).unwrap();
        assert_eq!((v.order, v.exact.unwrap()), (0, GaussRational::one()));

        let v = vanishing_order_at_origin(&de3([0, 1, 0])).unwrap();
        assert_eq!((v.order, v.exact.unwrap()), (1, GaussRational::one()));
    }

    #[test]
    fn low_precision_is_rejected() {
        assert!(matches!(eval(&exp_ode(), &z(1.0, 0.0), 8), Err(Error::Invalid(_))));
    }

    #[test]
    fn ceiling_is_enforced() {
        // e^z at z = -400 needs ~350 digits of cancellation in the series
        let r = derivative_eval_with(&exp_ode(), 0, &z(-400.0, 0.0), 20, 100);
        assert!(matches!(r, Err(Error::PrecisionExhausted { .. })));
        let v = derivative_eval_with(&exp_ode(), 0, &z(-400.0, 0.0), 20, 2000).unwrap();
        assert!((crate::precision::ln_abs(&v) + 400.0).abs() < 1e-12);
    }
}
