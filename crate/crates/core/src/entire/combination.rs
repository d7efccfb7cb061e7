use rug::Complex;

use super::series::add_bounded;
use super::{EntireFn, EntireFunction};
use crate::error::Result;
use crate::exact::GaussRational;
use crate::precision::{ln_abs, ln_add, Bounded};

/// `g = sum_j alpha_j f_j` (bilinear, no conjugation): the intersection
/// function of a curve with the hyperplane `alpha`.
#[derive(Clone, Debug)]
pub struct LinearCombination {
    comps: Vec<EntireFn>,
    alpha: Vec<Complex>,
    exact: Option<Vec<GaussRational>>,
}

impl LinearCombination {
    /// `alpha` should carry at least as many bits as any evaluation will request;
    /// its own rounding is charged to the error bound otherwise.
    pub fn new(comps: Vec<EntireFn>, alpha: Vec<Complex>, exact: Option<Vec<GaussRational>>) -> Self {
        assert_eq!(comps.len(), alpha.len(), "one coefficient per component");
        Self { comps, alpha, exact }
    }

    pub fn from_exact(comps: Vec<EntireFn>, alpha: Vec<GaussRational>, bits: u32) -> Self {
        let a = alpha.iter().map(|c| c.to_complex(bits)).collect();
        Self::new(comps, a, Some(alpha))
    }

    pub fn components(&self) -> &[EntireFn] {
        &self.comps
    }

    pub fn alpha(&self) -> &[Complex] {
        &self.alpha
    }
}

impl EntireFunction for LinearCombination {
    fn kind(&self) -> &'static str {
        "combination"
    }

    fn eval_bounded(&self, k: usize, z: &Complex, bits: u32) -> Result<Bounded> {
        let mut acc = Bounded::exact(Complex::new(bits));
        for (f, a) in self.comps.iter().zip(&self.alpha) {
            if a.real().is_zero() && a.imag().is_zero() {
                continue;
            }
            let v = f.eval_bounded(k, z, bits)?;
            let prod = Complex::with_val(bits, &v.value * a);
            let la = ln_abs(a);
            let repr = if self.exact.is_some() { bits } else { a.prec().0.min(bits) };
            let rel = (4.0f64).ln() - repr as f64 * std::f64::consts::LN_2;
            let err = ln_add(v.ln_err + la, ln_abs(&prod) + rel);
            acc = add_bounded(&acc, &Bounded { value: prod, ln_err: err }, bits);
        }
        Ok(acc)
    }

    fn taylor_exact(&self, m: usize) -> Option<Vec<GaussRational>> {
        let alpha = self.exact.as_ref()?;
        let mut out = vec![GaussRational::zero(); m];
        for (f, a) in self.comps.iter().zip(alpha) {
            if a.is_zero() {
                continue;
            }
            for (o, c) in out.iter_mut().zip(f.taylor_exact(m)?) {
                let t = &c * a;
                *o += &t;
            }
        }
        Some(out)
    }

    fn taylor_approx(&self, m: usize, bits: u32) -> Vec<Complex> {
        if let Some(c) = self.taylor_exact(m) {
            return c.iter().map(|x| x.to_complex(bits)).collect();
        }
        let mut out = vec![Complex::new(bits); m];
        for (f, a) in self.comps.iter().zip(&self.alpha) {
            for (o, c) in out.iter_mut().zip(f.taylor_approx(m, bits)) {
                *o += Complex::with_val(bits, &c * a);
            }
        }
        out
    }

    fn growth_order(&self) -> f64 {
        self.comps.iter().map(|f| f.growth_order()).fold(0.0, f64::max)
    }

    fn is_zero_free(&self) -> bool {
        let live: Vec<_> = self.comps.iter().zip(&self.alpha).filter(|(_, a)| !(a.real().is_zero() && a.imag().is_zero())).collect();
        live.len() == 1 && live[0].0.is_zero_free()
    }

    fn is_identically_zero(&self) -> bool {
        match self.taylor_exact(super::TAYLOR_BUDGET) {
            Some(c) => c.iter().all(GaussRational::is_zero),
            None => false,
        }
    }
}
