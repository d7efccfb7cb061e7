use num_complex::Complex64;
use rug::Complex;

use crate::entire::HoloCurve;
use crate::error::{Error, Result};
use crate::precision::{digits_to_bits, ln_abs, ln_add, Scaled, GUARD_DIGITS};
use crate::projgeo::HyperplaneSystem;

/// Everything a circle integrand needs at one point `z`.
#[derive(Clone, Debug)]
pub struct Sample {
    /// `ln ||f(z)||`.
    pub ln_norm: f64,
    /// `g_a(z) = <alpha_a, f(z)>` with normalised `alpha_a`.
    pub g: Vec<Scaled>,
    /// Wronskian value, when requested.
    pub w: Option<Scaled>,
}

/// Evaluates a curve, its intersection functions and its Wronskian at a
/// point, raising the working precision until every returned quantity has
/// relative error at most `10^-(digits - GUARD_DIGITS)`.
#[derive(Debug)]
pub struct CurveSampler<'a> {
    curve: &'a HoloCurve,
    alphas: Vec<Vec<Complex>>,
    want_w: bool,
    digits: u32,
    ceiling_digits: u32,
}

impl<'a> CurveSampler<'a> {
    pub fn new(curve: &'a HoloCurve, planes: Option<&HyperplaneSystem>, want_w: bool, digits: u32, ceiling_digits: u32) -> Result<Self> {
        let alphas = match planes {
            Some(p) => {
                if p.n() != curve.n() {
                    return Err(Error::Invalid(format!("hyperplanes live in P^{}, curve in P^{}", p.n(), curve.n())));
                }
                p.planes().iter().map(|h| h.coeffs().to_vec()).collect()
            }
            None => Vec::new(),
        };
        if digits <= GUARD_DIGITS {
            return Err(Error::Invalid(format!("working precision {digits} too small")));
        }
        Ok(Self { curve, alphas, want_w, digits, ceiling_digits })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn at(&self, z: Complex64) -> Result<Sample> {
        let target = -((self.digits - GUARD_DIGITS) as f64) * std::f64::consts::LN_10;
        let ceiling = digits_to_bits(self.ceiling_digits);
        let mut bits = digits_to_bits(self.digits);
        loop {
            let zz = Complex::with_val(bits, (z.re, z.im));
            let vals = self.curve.eval_components(&zz, bits)?;
            let ln_norm = 0.5 * vals.iter().fold(f64::NEG_INFINITY, |s, v| ln_add(s, 2.0 * ln_abs(&v.value)));
            let mut worst = vals.iter().fold(f64::NEG_INFINITY, |s, v| ln_add(s, v.ln_err)) - ln_norm;
            let mut g = Vec::with_capacity(self.alphas.len());
            for alpha in &self.alphas {
                let mut acc = Complex::new(bits);
                let mut err = f64::NEG_INFINITY;
                for (a, v) in alpha.iter().zip(&vals) {
                    let t = Complex::with_val(bits, a * &v.value);
                    let la = ln_abs(a);
                    let repr = (2.0 - bits.min(a.prec().0) as f64) * std::f64::consts::LN_2;
                    err = ln_add(err, ln_add(la + v.ln_err, ln_abs(&t) + repr));
                    acc += t;
                }
                worst = worst.max(err - ln_abs(&acc));
                g.push(Scaled::from_complex(&acc));
            }
            let w = if self.want_w {
                let wb = self.curve.wronskian().eval_bounded(0, &zz, bits)?;
                worst = worst.max(wb.ln_rel_err());
                Some(Scaled::from_complex(&wb.value))
            } else {
                None
            };
            if worst <= target {
                return Ok(Sample { ln_norm, g, w });
            }
            let deficit = if worst.is_finite() { (worst - target) / std::f64::consts::LN_2 } else { bits as f64 };
            let next = bits + deficit.ceil() as u32 + 32;
            if next > ceiling {
                return Err(Error::PrecisionExhausted { needed: next, ceiling });
            }
            bits = next;
        }
    }

    /// Sample at `r e^{i theta}`.
    pub fn polar(&self, r: f64, theta: f64) -> Result<Sample> {
        self.at(Complex64::from_polar(r, theta))
    }
}
