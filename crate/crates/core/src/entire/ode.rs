use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use rug::{Complex, Rational};

use super::series::{horner, truncation, FloatCoeffs};
use super::{EntireFunction, PolynomialFn};
use crate::error::{Error, Result};
use crate::exact::GaussRational;
use crate::precision::{ln_add, Bounded};

/// `y^(N) + sum_{j<N} P_j(z) y^(j) = 0`, coefficients listed from `P_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeEquation {
    coeffs: Vec<PolynomialFn>,
}

impl OdeEquation {
    pub fn new(coeffs: Vec<PolynomialFn>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("equation of order 0".into()));
        }
        Ok(Self { coeffs })
    }

    /// `w''' - z w' - w = 0`.
    pub fn de3() -> Self {
        Self {
            coeffs: vec![PolynomialFn::from_ints(&[-1]), PolynomialFn::from_ints(&[0, -1]), PolynomialFn::zero()],
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[PolynomialFn] {
        &self.coeffs
    }

    /// Growth order of generic solutions, `1 + max deg P_j / (N - j)`; 0 when
    /// every coefficient vanishes (polynomial solutions).
    pub fn growth_order_exact(&self) -> Rational {
        let n = self.order();
        let mut best: Option<Rational> = None;
        for (j, p) in self.coeffs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let r = Rational::from((p.degree() as u64, (n - j) as u64));
            if best.as_ref().is_none_or(|b| r > *b) {
                best = Some(r);
            }
        }
        best.map(|b| b + 1u32).unwrap_or_default()
    }

    /// Extends `a` (which holds at least `N` entries) to `len` Taylor coefficients:
    /// `a_{m+N} = -m!/(m+N)! sum_j sum_l p_{j,l} a_{m+j-l} (m+j-l)!/(m-l)!`.
    fn extend(&self, a: &mut Vec<GaussRational>, len: usize) {
        let n = self.order();
        while a.len() < len {
            let m = a.len() - n;
            let mut s = GaussRational::zero();
            for (j, p) in self.coeffs.iter().enumerate() {
                for (l, c) in p.coeffs().iter().enumerate().take(m + 1) {
                    if c.is_zero() {
                        continue;
                    }
                    let idx = m + j - l;
                    if a[idx].is_zero() {
                        continue;
                    }
                    let mut fall = rug::Integer::from(1);
                    for i in 1..=j {
                        fall *= (m - l + i) as u64;
                    }
                    let t = (c * &a[idx]).scale(&Rational::from(fall));
                    s += &t;
                }
            }
            let mut den = rug::Integer::from(1);
            for i in 1..=n {
                den *= (m + i) as u64;
            }
            a.push((-s).scale(&Rational::from((rug::Integer::from(1), den))));
        }
    }
}

#[derive(Default)]
struct TaylorCache {
    exact: Vec<GaussRational>,
    ln: Vec<f64>,
}

/// Solution of an [`OdeEquation`] fixed by `(y(0), ..., y^(N-1)(0))`.
pub struct OdeSolutionFn {
    eq: Arc<OdeEquation>,
    initial: Vec<GaussRational>,
    digits: u32,
    taylor: RwLock<TaylorCache>,
    floats: RwLock<HashMap<usize, Arc<FloatCoeffs>>>,
}

impl fmt::Debug for OdeSolutionFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let init: Vec<String> = self.initial.iter().map(|c| c.to_string()).collect();
        f.debug_struct("OdeSolutionFn")
            .field("order", &self.eq.order())
            .field("initial", &init)
            .field("digits", &self.digits)
            .finish()
    }
}

impl Clone for OdeSolutionFn {
    fn clone(&self) -> Self {
        Self::with_digits(self.eq.clone(), self.initial.clone(), self.digits).expect("validated on construction")
    }
}

/// Hard cap on the number of Taylor terms a single evaluation may use.
pub const MAX_TERMS: usize = 1 << 16;

impl OdeSolutionFn {
    pub fn new(eq: Arc<OdeEquation>, initial: Vec<GaussRational>) -> Result<Self> {
        Self::with_digits(eq, initial, 32)
    }

    pub fn with_digits(eq: Arc<OdeEquation>, initial: Vec<GaussRational>, digits: u32) -> Result<Self> {
        if initial.len() != eq.order() {
            return Err(Error::Invalid(format!(
                "equation of order {} needs {} initial values, got {}",
                eq.order(),
                eq.order(),
                initial.len()
            )));
        }
        let mut exact = Vec::with_capacity(initial.len());
        let mut fact = rug::Integer::from(1);
        for (k, v) in initial.iter().enumerate() {
            if k > 0 {
                fact *= k as u64;
            }
            exact.push(v.scale(&Rational::from((rug::Integer::from(1), fact.clone()))));
        }
        let ln = exact.iter().map(GaussRational::ln_abs).collect();
        Ok(Self {
            eq,
            initial,
            digits,
            taylor: RwLock::new(TaylorCache { exact, ln }),
            floats: RwLock::new(HashMap::new()),
        })
    }

    pub fn equation(&self) -> &Arc<OdeEquation> {
        &self.eq
    }

    pub fn initial(&self) -> &[GaussRational] {
        &self.initial
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    fn ensure(&self, len: usize) {
        if self.taylor.read().unwrap().exact.len() >= len {
            return;
        }
        let mut t = self.taylor.write().unwrap();
        let start = t.exact.len();
        if start >= len {
            return;
        }
        self.eq.extend(&mut t.exact, len);
        let new: Vec<f64> = t.exact[start..].iter().map(GaussRational::ln_abs).collect();
        t.ln.extend(new);
    }

    /// First `m` Taylor coefficients (exact).
    pub fn taylor_coeffs(&self, m: usize) -> Vec<GaussRational> {
        self.ensure(m);
        self.taylor.read().unwrap().exact[..m].to_vec()
    }

    /// `ln |b_n|` for the `k`-th derivative series `b_n = a_{n+k} (n+1)...(n+k)`.
    fn ln_derivative(&self, k: usize, len: usize) -> Vec<f64> {
        self.ensure(len + k);
        let t = self.taylor.read().unwrap();
        (0..len)
            .map(|n| {
                let l = t.ln[n + k];
                if l.is_finite() {
                    l + (1..=k).map(|i| ((n + i) as f64).ln()).sum::<f64>()
                } else {
                    l
                }
            })
            .collect()
    }

    fn float_coeffs(&self, k: usize, len: usize, bits: u32) -> Arc<FloatCoeffs> {
        if let Some(fc) = self.floats.read().unwrap().get(&k) {
            if fc.bits >= bits && fc.len() >= len {
                return fc.clone();
            }
        }
        self.ensure(len + k);
        let t = self.taylor.read().unwrap();
        let mut fc = FloatCoeffs { bits, ..Default::default() };
        for n in 0..len {
            let a = &t.exact[n + k];
            if a.is_zero() {
                fc.push(Complex::new(bits), true);
                continue;
            }
            let mut fall = rug::Integer::from(1);
            for i in 1..=k {
                fall *= (n + i) as u64;
            }
            fc.push(a.scale(&Rational::from(fall)).to_complex(bits), false);
        }
        drop(t);
        let fc = Arc::new(fc);
        self.floats.write().unwrap().insert(k, fc.clone());
        fc
    }
}

impl EntireFunction for OdeSolutionFn {
    fn kind(&self) -> &'static str {
        "ode"
    }

    fn eval_bounded(&self, k: usize, z: &Complex, bits: u32) -> Result<Bounded> {
        let ln_z = crate::precision::ln_abs(z);
        let n = self.eq.order();
        let window = 8 * n.max(2);
        let drop = bits as f64 * std::f64::consts::LN_2 + 10.0;
        let mut len = 64usize;
        let (cut, tail) = loop {
            let ln = self.ln_derivative(k, len);
            if let Some(t) = truncation(&ln, ln_z, window, drop, n) {
                break t;
            }
            if len >= MAX_TERMS {
                return Err(Error::Uncertified(format!(
                    "Taylor series at |z| = {:.3e} not truncated within {MAX_TERMS} terms",
                    ln_z.exp()
                )));
            }
            len *= 2;
        };
        let fc = self.float_coeffs(k, cut, bits);
        let b = horner(&fc, cut, z, bits);
        Ok(Bounded { value: b.value, ln_err: ln_add(b.ln_err, tail) })
    }

    fn taylor_exact(&self, m: usize) -> Option<Vec<GaussRational>> {
        Some(self.taylor_coeffs(m))
    }

    fn growth_order(&self) -> f64 {
        if self.initial.iter().all(GaussRational::is_zero) {
            return 0.0;
        }
        self.eq.growth_order_exact().to_f64()
    }

    fn is_identically_zero(&self) -> bool {
        self.initial.iter().all(GaussRational::is_zero)
    }

    fn as_ode(&self) -> Option<&OdeSolutionFn> {
        Some(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(v: i64) -> GaussRational {
        GaussRational::from_int(v)
    }

    #[test]
    fn airy_taylor_coefficients() {
        // y'' - z y = 0: P_0 = -z, P_1 = 0
        let eq = OdeEquation::new(vec![PolynomialFn::from_ints(&[0, -1]), PolynomialFn::zero()]).unwrap();
        let f = OdeSolutionFn::new(Arc::new(eq), vec![g(1), g(0)]).unwrap();
        let c = f.taylor_coeffs(7);
        let expect = [(1, 1), (0, 1), (0, 1), (1, 6), (0, 1), (0, 1), (1, 180)];
        for (a, (p, q)) in c.iter().zip(expect) {
            assert_eq!(*a, GaussRational::from_ratio(p, q));
        }
    }

    #[test]
    fn exp_taylor_coefficients() {
        let eq = OdeEquation::new(vec![PolynomialFn::from_ints(&[-1])]).unwrap();
        let f = OdeSolutionFn::new(Arc::new(eq), vec![g(1)]).unwrap();
        let c = f.taylor_coeffs(4);
        assert_eq!(c, vec![g(1), g(1), GaussRational::from_ratio(1, 2), GaussRational::from_ratio(1, 6)]);
    }

    #[test]
    fn de3_third_initial_vector() {
        let f = OdeSolutionFn::new(Arc::new(OdeEquation::de3()), vec![g(0), g(0), g(1)]).unwrap();
        let c = f.taylor_coeffs(6);
        assert!(c[0].is_zero() && c[1].is_zero());
        assert_eq!(c[2], GaussRational::from_ratio(1, 2));
        // a_{m+3} = a_m / ((m+2)(m+3))
        assert_eq!(c[5], GaussRational::from_ratio(1, 2 * 4 * 5));
    }

    #[test]
    fn growth_orders() {
        assert_eq!(OdeEquation::de3().growth_order_exact(), Rational::from((3, 2)));
        let eq = OdeEquation::new(vec![PolynomialFn::zero(), PolynomialFn::zero()]).unwrap();
        assert_eq!(eq.growth_order_exact(), 0);
        let eq = OdeEquation::new(vec![PolynomialFn::from_ints(&[2])]).unwrap();
        assert_eq!(eq.growth_order_exact(), 1);
    }

    #[test]
    fn wrong_initial_length() {
        assert!(OdeSolutionFn::new(Arc::new(OdeEquation::de3()), vec![g(1)]).is_err());
    }
}
