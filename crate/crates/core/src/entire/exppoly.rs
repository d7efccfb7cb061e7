use rug::{Complex, Rational};

use super::series::add_bounded;
use super::{EntireFunction, PolynomialFn};
use crate::error::{Error, Result};
use crate::exact::GaussRational;
use crate::precision::{ln_abs, ln_add, Bounded};

/// `sum_j p_j(z) exp(lambda_j z)` with pairwise distinct frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPolynomialFn {
    terms: Vec<(PolynomialFn, GaussRational)>,
}

impl ExpPolynomialFn {
    pub fn new(terms: Vec<(PolynomialFn, GaussRational)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Invalid("exponential polynomial without terms".into()));
        }
        for (i, (p, l)) in terms.iter().enumerate() {
            if p.is_zero() {
                return Err(Error::Invalid(format!("term {i} has a zero polynomial factor")));
            }
            if terms[..i].iter().any(|(_, m)| m == l) {
                return Err(Error::Invalid(format!("frequency {l} repeated")));
            }
        }
        Ok(Self { terms })
    }

    /// `exp(lambda z)`.
    pub fn exp(lambda: GaussRational) -> Self {
        Self { terms: vec![(PolynomialFn::constant(GaussRational::one()), lambda)] }
    }

    pub fn terms(&self) -> &[(PolynomialFn, GaussRational)] {
        &self.terms
    }

    /// Symbolic derivative: `(p e^{lz})' = (p' + l p) e^{lz}`. Terms whose
    /// factor vanishes (constant term with zero frequency) are dropped.
    pub fn derivative(&self) -> Option<Self> {
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|(p, l)| (p.derivative().add(&p.scale(l)), l.clone()))
            .filter(|(p, _)| !p.is_zero())
            .collect();
        if terms.is_empty() {
            None
        } else {
            Some(Self { terms })
        }
    }

    fn nth_terms(&self, k: usize) -> Vec<(PolynomialFn, GaussRational)> {
        let mut f = Some(self.clone());
        for _ in 0..k {
            f = f.and_then(|g| g.derivative());
        }
        f.map(|g| g.terms).unwrap_or_default()
    }
}

impl EntireFunction for ExpPolynomialFn {
    fn kind(&self) -> &'static str {
        "exppoly"
    }

    fn eval_bounded(&self, k: usize, z: &Complex, bits: u32) -> Result<Bounded> {
        let terms = if k == 0 { self.terms.clone() } else { self.nth_terms(k) };
        let mut acc = Bounded::exact(Complex::new(bits));
        let lz = ln_abs(z);
        let eps = -(bits as f64) * std::f64::consts::LN_2;
        for (p, l) in &terms {
            let pv = p.eval_bounded(0, z, bits)?;
            let lam = l.to_complex(bits);
            let arg = Complex::with_val(bits, &lam * z);
            let e = arg.exp();
            let v = Complex::with_val(bits, &pv.value * &e);
            let le = ln_abs(&e);
            // rounding of lambda*z shifts the exponent by |lambda z| ulps
            let lrel = ln_add(eps + 3f64.ln(), eps + l.ln_abs() + lz);
            let err = ln_add(pv.ln_err + le, ln_abs(&v) + lrel);
            acc = add_bounded(&acc, &Bounded { value: v, ln_err: err }, bits);
        }
        Ok(acc)
    }

    fn taylor_exact(&self, m: usize) -> Option<Vec<GaussRational>> {
        // coefficient of z^n: sum over terms and l <= n of p_l lambda^{n-l}/(n-l)!
        let mut out = vec![GaussRational::zero(); m];
        for (p, lam) in &self.terms {
            let mut pw = Vec::with_capacity(m);
            let mut cur = GaussRational::one();
            for j in 0..m {
                pw.push(cur.clone());
                cur = (&cur * lam).scale(&Rational::from((1, j as u64 + 1)));
            }
            for (n, slot) in out.iter_mut().enumerate() {
                for (l, c) in p.coeffs().iter().enumerate().take(n + 1) {
                    if !c.is_zero() {
                        let t = c * &pw[n - l];
                        *slot += &t;
                    }
                }
            }
        }
        Some(out)
    }

    fn growth_order(&self) -> f64 {
        if self.terms.iter().any(|(_, l)| !l.is_zero()) {
            1.0
        } else {
            0.0
        }
    }

    fn is_identically_zero(&self) -> bool {
        false
    }

    fn is_zero_free(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.degree() == 0
    }
}
