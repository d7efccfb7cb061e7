use std::fmt;
use std::sync::Arc;

use rug::{Complex, Rational};
use serde::Serialize;

use super::wronskian::{is_degenerate, select_strategy, wronskian_bounded};
use super::{EntireFn, LinearCombination, PolynomialFn};
use crate::error::{Error, Result};
use crate::exact::GaussRational;
use crate::precision::ln_abs;

/// How the absence of common zeros was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Reducedness {
    /// Exact gcd of polynomial components is 1.
    Exact,
    /// Some component or the Wronskian is provably zero-free.
    Certified,
    /// No common zero found among sampled zeros of one component.
    Heuristic,
}

impl fmt::Display for Reducedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reducedness::Exact => "exact",
            Reducedness::Certified => "certified",
            Reducedness::Heuristic => "heuristic",
        })
    }
}

/// Reduced homogeneous representation `(f_0 : ... : f_n)` of a curve in `P^n`.
#[derive(Clone, Debug)]
pub struct HoloCurve {
    comps: Vec<EntireFn>,
    declared_order: Option<Rational>,
    wronskian: EntireFn,
    strategy: String,
    reduced: Reducedness,
}

impl HoloCurve {
    pub fn new(comps: Vec<EntireFn>, declared_order: Option<Rational>) -> Result<Self> {
        Self::with_strategy(comps, declared_order, None)
    }

    /// Builds the curve, choosing the Wronskian strategy by name (or the
    /// first applicable one of `symbolic`, `abel`, `direct`).
    pub fn with_strategy(comps: Vec<EntireFn>, declared_order: Option<Rational>, strategy: Option<&str>) -> Result<Self> {
        if comps.len() < 2 {
            return Err(Error::Invalid(format!("a curve needs at least 2 components, got {}", comps.len())));
        }
        if let Some(i) = comps.iter().position(|f| f.is_identically_zero()) {
            return Err(Error::Invalid(format!("component {i} is identically zero")));
        }
        check_independent(&comps)?;
        let (strategy, wronskian) = select_strategy(&comps, strategy)?;
        let reduced = reducedness(&comps, &wronskian)?;
        Ok(Self { comps, declared_order, wronskian, strategy, reduced })
    }

    /// Dimension `n` of the target projective space.
    pub fn n(&self) -> usize {
        self.comps.len() - 1
    }

    pub fn components(&self) -> &[EntireFn] {
        &self.comps
    }

    pub fn declared_order(&self) -> Option<&Rational> {
        self.declared_order.as_ref()
    }

    /// Declared order, else the maximal growth order of the components.
    pub fn order(&self) -> f64 {
        match &self.declared_order {
            Some(r) => r.to_f64(),
            None => self.comps.iter().map(|f| f.growth_order()).fold(0.0, f64::max),
        }
    }

    pub fn wronskian(&self) -> &EntireFn {
        &self.wronskian
    }

    pub fn wronskian_strategy(&self) -> &str {
        &self.strategy
    }

    pub fn reducedness(&self) -> Reducedness {
        self.reduced
    }

    /// Components evaluated at `z` with `bits` of working precision.
    pub fn eval_components(&self, z: &Complex, bits: u32) -> Result<Vec<crate::precision::Bounded>> {
        self.comps.iter().map(|f| f.eval_bounded(0, z, bits)).collect()
    }

    /// `ln ||f(0)||`.
    pub fn ln_norm_at_origin(&self) -> Result<f64> {
        let z = Complex::new(256);
        let vals = self.eval_components(&z, 256)?;
        let s = vals.iter().fold(f64::NEG_INFINITY, |a, v| crate::precision::ln_add(a, 2.0 * ln_abs(&v.value)));
        Ok(0.5 * s)
    }

    /// The same curve with every component multiplied by `c != 0`.
    pub fn scaled(&self, c: &GaussRational) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::Invalid("scaling by zero".into()));
        }
        let comps = self
            .comps
            .iter()
            .map(|f| match f.as_polynomial() {
                Some(p) => Arc::new(p.scale(c)) as EntireFn,
                None => Arc::new(LinearCombination::from_exact(vec![f.clone()], vec![c.clone()], 512)) as EntireFn,
            })
            .collect();
        Self::new(comps, self.declared_order.clone())
    }

    /// Wronskian evaluated through the `direct` strategy, for cross-checks.
    pub fn direct_wronskian(&self, z: &Complex, bits: u32) -> Result<crate::precision::Bounded> {
        wronskian_bounded(&self.comps, z, bits)
    }
}

fn check_independent(comps: &[EntireFn]) -> Result<()> {
    match is_degenerate(comps) {
        Some(true) => Err(Error::Degenerate("Wronskian vanishes identically".into())),
        Some(false) => Ok(()),
        None => {
            // no exact data: a nonzero value anywhere proves independence
            for &(x, y) in &[(0.3, 0.1), (-0.7, 0.9), (1.3, -0.4)] {
                let z = Complex::with_val(256, (x, y));
                let w = wronskian_bounded(comps, &z, 512)?;
                if w.ln_rel_err() < -20.0 {
                    return Ok(());
                }
            }
            Err(Error::Degenerate("Wronskian numerically zero at probe points".into()))
        }
    }
}

fn reducedness(comps: &[EntireFn], wronskian: &EntireFn) -> Result<Reducedness> {
    if let Some(ps) = comps.iter().map(|f| f.as_polynomial().cloned()).collect::<Option<Vec<PolynomialFn>>>() {
        let g = ps.iter().skip(1).fold(ps[0].clone(), |g, p| g.gcd(p));
        if g.degree() > 0 {
            return Err(Error::Invalid(format!("polynomial components share the factor {g:?}")));
        }
        return Ok(Reducedness::Exact);
    }
    // a common zero is a zero of the Wronskian (its first row vanishes)
    if wronskian.is_zero_free() || comps.iter().any(|f| f.is_zero_free()) {
        return Ok(Reducedness::Certified);
    }
    heuristic_common_zero_search(comps)?;
    Ok(Reducedness::Heuristic)
}

/// Newton iteration from a grid of starting points locates zeros of `f_0`
/// in `|z| <= 8`; at each, some other component must stay away from zero.
fn heuristic_common_zero_search(comps: &[EntireFn]) -> Result<()> {
    let bits = 256;
    let f0 = &comps[0];
    let mut found: Vec<Complex> = Vec::new();
    let grid = 32;
    for a in 0..grid {
        for b in 0..grid {
            if found.len() >= 1000 {
                break;
            }
            let x = -8.0 + 16.0 * (a as f64 + 0.5) / grid as f64;
            let y = -8.0 + 16.0 * (b as f64 + 0.5) / grid as f64;
            let mut z = Complex::with_val(bits, (x, y));
            let mut ok = false;
            for _ in 0..40 {
                let v = f0.eval_bounded(0, &z, bits)?.value;
                let d = f0.eval_bounded(1, &z, bits)?.value;
                if ln_abs(&d) == f64::NEG_INFINITY {
                    break;
                }
                let step = Complex::with_val(bits, &v / &d);
                z -= &step;
                if ln_abs(&step) < -150.0 {
                    ok = true;
                    break;
                }
                if ln_abs(&z) > 4.0 {
                    break;
                }
            }
            if ok && ln_abs(&z) < 9f64.ln() && !found.iter().any(|w| ln_abs(&Complex::with_val(bits, w - &z)) < -20.0) {
                found.push(z);
            }
        }
    }
    for z in &found {
        let vals: Vec<f64> = comps.iter().skip(1).map(|f| f.eval_bounded(0, z, bits).map(|b| ln_abs(&b.value))).collect::<Result<_>>()?;
        if vals.iter().all(|&l| l < -60.0) {
            return Err(Error::Invalid(format!("components appear to share the zero {:.12}", z)));
        }
    }
    Ok(())
}
