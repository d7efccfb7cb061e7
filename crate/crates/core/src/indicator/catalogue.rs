use rug::Rational;

use super::certificate::{AdmissibilityConstraint, IndicatorModel};
use super::family::IndicatorFamily;
use super::field::Real;
use super::piecewise::{arc_shift, PiecewiseIndicator};
use crate::entire::OdeEquation;
use crate::error::{Error, Result};

/// Indicator of `W = c exp(-int P_(N-1))` at order `rho`.
pub fn wronskian_indicator(eq: &OdeEquation, rho: &Rational) -> Result<PiecewiseIndicator> {
    let n = eq.order();
    let p = &eq.coeffs()[n - 1];
    let q = p.integral();
    if q.is_zero() || q.degree() == 0 {
        return Ok(PiecewiseIndicator::zero(rho.clone()));
    }
    let d = Rational::from(q.degree());
    match d.cmp(rho) {
        std::cmp::Ordering::Less => Ok(PiecewiseIndicator::zero(rho.clone())),
        std::cmp::Ordering::Greater => Err(Error::Invalid(format!("Wronskian has order {d}, above {rho}"))),
        std::cmp::Ordering::Equal => {
            // Re(-c e^{i d t}) with -c the leading coefficient of -int P
            let c = q.leading();
            let a = Real::from_rational(Rational::from(-&c.re));
            let b = Real::from_rational(c.im.clone());
            PiecewiseIndicator::sinusoid(rho.clone(), a, b)
        }
    }
}

fn third(k: i64) -> Rational {
    Rational::from((k, 3))
}

/// `H_0 = -cos(3t/2)`, `H_j = H_0(t -+ 2pi/3)` and `G_j = H_j^+`.
pub fn airy_catalogue() -> IndicatorFamily {
    let rho = Rational::from((3, 2));
    let h0 = PiecewiseIndicator::sinusoid(rho.clone(), Real::from_int(-1), Real::zero()).expect("valid");
    let g0 = h0.positive_part();
    let mut f = IndicatorFamily::new(rho).expect("positive order");
    for (name, h) in [
        ("H0", h0.clone()),
        ("H1", arc_shift(&h0, &third(2))),
        ("H2", arc_shift(&h0, &third(-2))),
        ("G0", g0.clone()),
        ("G1", arc_shift(&g0, &third(2))),
        ("G2", arc_shift(&g0, &third(-2))),
    ] {
        f.push(name, h).expect("distinct names");
    }
    f
}

/// At most one negative and two non-positive indicators where `h > 0`;
/// `H_0, H_1, H_2` belong to solutions summing to zero.
pub fn airy_constraint() -> AdmissibilityConstraint {
    AdmissibilityConstraint {
        max_negative: 1,
        max_nonpositive: 2,
        forbidden_together: vec![vec!["H0".into(), "H1".into(), "H2".into()]],
    }
}

pub fn airy_model() -> IndicatorModel {
    let family = airy_catalogue();
    let wronskian = wronskian_indicator(&OdeEquation::de3(), family.rho()).expect("de3 has a constant Wronskian");
    IndicatorModel { name: "airy".into(), family, dim: 3, wronskian, dims: None, constraint: Some(airy_constraint()) }
}

/// `(1 : e^z : e^{2z})`: indicators `0, cos t, 2 cos t` of the coordinate
/// functions, solutions of `w''' - 3 w'' + 2 w' = 0`.
pub fn exp123_model() -> IndicatorModel {
    let rho = Rational::from(1);
    let mut family = IndicatorFamily::new(rho.clone()).expect("positive order");
    for k in 0..3 {
        let h = PiecewiseIndicator::sinusoid(rho.clone(), Real::from_int(k), Real::zero()).expect("valid");
        family.push(format!("x{k}"), h).expect("distinct names");
    }
    let eq = OdeEquation::new(vec![
        crate::entire::PolynomialFn::zero(),
        crate::entire::PolynomialFn::from_ints(&[2]),
        crate::entire::PolynomialFn::from_ints(&[-3]),
    ])
    .expect("order 3");
    let wronskian = wronskian_indicator(&eq, &rho).expect("order 1");
    IndicatorModel { name: "exp123".into(), family, dim: 3, wronskian, dims: None, constraint: None }
}

/// Built-in models by name.
pub fn builtin_model(name: &str) -> Option<IndicatorModel> {
    match name {
        "airy" => Some(airy_model()),
        "exp123" => Some(exp123_model()),
        _ => None,
    }
}
