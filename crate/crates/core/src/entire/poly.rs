use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rug::{Complex, Rational};

use super::series::{horner, FloatCoeffs};
use super::EntireFunction;
use crate::error::{Error, Result};
use crate::exact::GaussRational;
use crate::precision::Bounded;

/// Polynomial with exact Gaussian-rational coefficients, lowest degree first.
/// Trailing zeros are trimmed, so the zero polynomial has no coefficients.
pub struct PolynomialFn {
    coeffs: Vec<GaussRational>,
    cache: RwLock<HashMap<usize, Arc<FloatCoeffs>>>,
}

impl Clone for PolynomialFn {
    fn clone(&self) -> Self {
        Self::new(self.coeffs.clone())
    }
}

impl PartialEq for PolynomialFn {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl fmt::Debug for PolynomialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "PolynomialFn[{}]", parts.join(", "))
    }
}

impl PolynomialFn {
    pub fn new(mut coeffs: Vec<GaussRational>) -> Self {
        while coeffs.last().is_some_and(GaussRational::is_zero) {
            coeffs.pop();
        }
        Self { coeffs, cache: RwLock::new(HashMap::new()) }
    }

    pub fn zero() -> Self {
        Self::new(Vec::new())
    }

    pub fn constant(c: GaussRational) -> Self {
        Self::new(vec![c])
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| GaussRational::from_int(v)).collect())
    }

    pub fn parse(c: &[&str]) -> Result<Self> {
        Ok(Self::new(c.iter().map(|s| s.parse()).collect::<Result<_>>()?))
    }

    /// `z^m`.
    pub fn monomial(m: usize) -> Self {
        let mut c = vec![GaussRational::zero(); m + 1];
        c[m] = GaussRational::one();
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[GaussRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> GaussRational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn coeff(&self, i: usize) -> GaussRational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.scale(&Rational::from(i as u64)))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Self {
        let mut c = vec![GaussRational::zero()];
        for (i, a) in self.coeffs.iter().enumerate() {
            c.push(a.scale(&Rational::from((1, i as u64 + 1))));
        }
        Self::new(c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| &self.coeff(i) - &other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut c = vec![GaussRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let t = a * b;
                c[i + j] += &t;
            }
        }
        Self::new(c)
    }

    pub fn scale(&self, s: &GaussRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn eval_exact(&self, z: &GaussRational) -> GaussRational {
        let mut acc = GaussRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    /// Euclidean division; `None` when dividing by zero.
    pub fn div_rem(&self, d: &Self) -> Option<(Self, Self)> {
        if d.is_zero() {
            return None;
        }
        let inv = d.leading().recip()?;
        let dd = d.degree();
        let mut r = self.coeffs.clone();
        if r.len() < d.coeffs.len() {
            return Some((Self::zero(), self.clone()));
        }
        let mut q = vec![GaussRational::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let f = &r[i + dd] * &inv;
            if f.is_zero() {
                continue;
            }
            for (j, c) in d.coeffs.iter().enumerate() {
                let t = &f * c;
                r[i + j] -= &t;
            }
            q[i] = f;
        }
        Some((Self::new(q), Self::new(r)))
    }

    pub fn monic(&self) -> Self {
        match self.leading().recip() {
            Some(inv) => self.scale(&inv),
            None => Self::zero(),
        }
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Lowest index with a nonzero coefficient.
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    /// Square-free factorisation `p = c * prod f_i^i` (Yun), as `(f_i, i)`
    /// with each `f_i` monic and nonconstant.
    pub fn squarefree_factors(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let d = self.derivative();
        let a0 = self.gcd(&d);
        let mut b = self.div_rem(&a0).unwrap().0;
        let c = d.div_rem(&a0).unwrap().0;
        let mut dd = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree() > 0 {
            let a = b.gcd(&dd);
            let nb = b.div_rem(&a).unwrap().0;
            let nc = dd.div_rem(&a).unwrap().0;
            dd = nc.sub(&nb.derivative());
            if a.degree() > 0 {
                out.push((a.monic(), i));
            }
            b = nb;
            i += 1;
        }
        out
    }

    /// All roots with multiplicities, polished at `bits` of precision.
    pub fn roots(&self, bits: u32) -> Result<Vec<(Complex, usize)>> {
        if self.is_zero() {
            return Err(Error::Invalid("roots of the zero polynomial".into()));
        }
        let mut out = Vec::new();
        for (f, mult) in self.squarefree_factors() {
            for z in aberth(&f)? {
                out.push((newton_polish(&f, z, bits), mult));
            }
        }
        Ok(out)
    }

    fn float_coeffs(&self, k: usize, bits: u32) -> Arc<FloatCoeffs> {
        if let Some(fc) = self.cache.read().unwrap().get(&k) {
            if fc.bits >= bits {
                return fc.clone();
            }
        }
        let d = self.nth_derivative(k);
        let mut fc = FloatCoeffs { bits, ..Default::default() };
        for c in d.coeffs() {
            fc.push(c.to_complex(bits), c.is_zero());
        }
        let fc = Arc::new(fc);
        self.cache.write().unwrap().insert(k, fc.clone());
        fc
    }
}

impl EntireFunction for PolynomialFn {
    fn kind(&self) -> &'static str {
        "poly"
    }

    fn eval_bounded(&self, k: usize, z: &Complex, bits: u32) -> Result<Bounded> {
        let fc = self.float_coeffs(k, bits);
        Ok(horner(&fc, fc.len(), z, bits))
    }

    fn taylor_exact(&self, m: usize) -> Option<Vec<GaussRational>> {
        Some((0..m).map(|i| self.coeff(i)).collect())
    }

    fn growth_order(&self) -> f64 {
        0.0
    }

    fn is_identically_zero(&self) -> bool {
        self.is_zero()
    }

    fn is_zero_free(&self) -> bool {
        self.coeffs.len() == 1
    }

    fn as_polynomial(&self) -> Option<&PolynomialFn> {
        Some(self)
    }
}

/// Simultaneous root iteration (Aberth–Ehrlich) in double precision for a
/// square-free polynomial.
fn aberth(p: &PolynomialFn) -> Result<Vec<Complex64>> {
    let n = p.degree();
    let c: Vec<Complex64> = p
        .coeffs()
        .iter()
        .map(|a| {
            let (re, im) = a.to_f64_pair();
            Complex64::new(re, im)
        })
        .collect();
    if n == 1 {
        return Ok(vec![-c[0] / c[1]]);
    }
    let lead = c[n];
    // Fujiwara bound
    let bound = (0..n)
        .map(|i| {
            let q = (c[i] / lead).norm();
            if i == 0 {
                (q / 2.0).powf(1.0 / n as f64)
            } else {
                q.powf(1.0 / (n - i) as f64)
            }
        })
        .fold(0.0f64, f64::max)
        * 2.0;
    let radius = bound.max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(radius * 0.8, 2.0 * std::f64::consts::PI * j as f64 / n as f64 + 0.4))
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for a in c.iter().rev() {
            d = d * x + v;
            v = v * x + a;
        }
        (v, d)
    };
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (v, d) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm() / z[i].norm().max(1e-300));
        }
        if moved < 1e-15 {
            return Ok(z);
        }
    }
    Ok(z)
}

fn newton_polish(p: &PolynomialFn, z0: Complex64, bits: u32) -> Complex {
    let d = p.derivative();
    let mut z = Complex::with_val(bits, (z0.re, z0.im));
    let pc: Vec<Complex> = p.coeffs().iter().map(|c| c.to_complex(bits)).collect();
    let dc: Vec<Complex> = d.coeffs().iter().map(|c| c.to_complex(bits)).collect();
    let ev = |c: &[Complex], x: &Complex| -> Complex {
        let mut acc = Complex::new(bits);
        for a in c.iter().rev() {
            acc *= x;
            acc += a;
        }
        acc
    };
    for _ in 0..(bits / 8 + 20) {
        let v = ev(&pc, &z);
        let dv = ev(&dc, &z);
        if dv.real().is_zero() && dv.imag().is_zero() {
            break;
        }
        let step = Complex::with_val(bits, &v / &dv);
        z -= &step;
        let ls = crate::precision::ln_abs(&step);
        let lz = crate::precision::ln_abs(&z).max(-700.0);
        if ls < lz - (bits as f64 - 4.0) * std::f64::consts::LN_2 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GaussRational {
        s.parse().unwrap()
    }

    #[test]
    fn trims_and_degree() {
        let p = PolynomialFn::from_ints(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), 1);
        assert!(PolynomialFn::from_ints(&[0, 0]).is_zero());
        assert_eq!(PolynomialFn::zero().degree(), 0);
    }

    #[test]
    fn division_and_gcd() {
        // (z-1)(z+2) and (z-1)(z-3)
        let a = PolynomialFn::from_ints(&[-2, 1, 1]);
        let b = PolynomialFn::from_ints(&[3, -4, 1]);
        assert_eq!(a.gcd(&b), PolynomialFn::from_ints(&[-1, 1]));
        let (q, r) = a.mul(&b).div_rem(&b).unwrap();
        assert_eq!(q, a);
        assert!(r.is_zero());
        assert_eq!(a.gcd(&PolynomialFn::from_ints(&[5])), PolynomialFn::from_ints(&[1]));
    }

    #[test]
    fn squarefree_decomposition() {
        // z^2 (z-1)^3 (z+i)
        let z2 = PolynomialFn::monomial(2);
        let zm1 = PolynomialFn::from_ints(&[-1, 1]);
        let zi = PolynomialFn::new(vec![g("i"), g("1")]);
        let p = z2.mul(&zm1).mul(&zm1).mul(&zm1).mul(&zi).scale(&g("3"));
        let f = p.squarefree_factors();
        assert_eq!(f.len(), 3);
        assert_eq!(f[0], (zi.clone(), 1));
        assert_eq!(f[1], (PolynomialFn::monomial(1), 2));
        assert_eq!(f[2], (zm1.clone(), 3));
    }

    #[test]
    fn roots_with_multiplicity() {
        let p = PolynomialFn::from_ints(&[-1, 0, 1]).mul(&PolynomialFn::from_ints(&[-4, 1]));
        let p = p.mul(&PolynomialFn::from_ints(&[-4, 1]));
        let mut r: Vec<(f64, usize)> = p.roots(128).unwrap().iter().map(|(z, m)| (z.real().to_f64(), *m)).collect();
        r.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        assert_eq!(r.len(), 3);
        assert!((r[0].0 + 1.0).abs() < 1e-30 && r[0].1 == 1);
        assert!((r[1].0 - 1.0).abs() < 1e-30);
        assert!((r[2].0 - 4.0).abs() < 1e-30 && r[2].1 == 2);
    }

    #[test]
    fn integral_inverts_derivative() {
        let p = PolynomialFn::parse(&["0", "1/2", "-3i", "7"]).unwrap();
        assert_eq!(p.derivative().integral(), p);
    }
}
