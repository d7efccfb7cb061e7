//! Working-precision policy and helpers for moving between multiprecision
//! values and `f64` log-space quantities.

use num_complex::Complex64;
use rug::{Complex, Float};

/// Digits held back from the requested precision when certifying an
/// evaluation: `eval(.., prec)` guarantees relative error `<= 10^-(prec - GUARD_DIGITS)`.
pub const GUARD_DIGITS: u32 = 4;

/// Default ceiling on working precision (decimal digits).
pub const DEFAULT_CEILING_DIGITS: u32 = 4000;

pub const MIN_DIGITS: u32 = 16;

pub fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 8
}

pub fn bits_to_digits(bits: u32) -> u32 {
    (bits as f64 / std::f64::consts::LOG2_10).floor() as u32
}

/// Starting working precision for evaluation radius `r` of a curve of order `rho`:
/// `max(32, ceil(1.5 r^rho / ln 10) + 20)` digits. Cancellation depth in
/// `<alpha, f>` tracks the growth scale `r^rho`.
pub fn default_digits(r: f64, rho: f64) -> u32 {
    let scale = 1.5 * r.max(1.0).powf(rho) / std::f64::consts::LN_10;
    (scale.ceil() as u32 + 20).max(32)
}

/// A multiprecision value with an absolute error bound, kept as the natural
/// log of the bound (`-inf` means exact).
#[derive(Clone, Debug)]
pub struct Bounded {
    pub value: Complex,
    pub ln_err: f64,
}

impl Bounded {
    pub fn exact(value: Complex) -> Self {
        Self { value, ln_err: f64::NEG_INFINITY }
    }

    /// `ln(err / |value|)`; `+inf` when the value is zero but the bound is not.
    pub fn ln_rel_err(&self) -> f64 {
        let lv = ln_abs(&self.value);
        if self.ln_err == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else if lv == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            self.ln_err - lv
        }
    }
}

/// Natural log of `|x|`, robust to exponents far outside the `f64` range.
pub fn ln_abs_float(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    m.abs().ln() + e as f64 * std::f64::consts::LN_2
}

pub fn ln_abs(z: &Complex) -> f64 {
    let (re, im) = (z.real(), z.imag());
    if re.is_zero() && im.is_zero() {
        return f64::NEG_INFINITY;
    }
    let e = exp2_of(z);
    let s = scale_down(z, e);
    0.5 * (s.norm_sqr()).ln() + e as f64 * std::f64::consts::LN_2
}

/// `log(exp(a) + exp(b))` without overflow.
pub fn ln_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn exp2_of(z: &Complex) -> i64 {
    let er = z.real().get_exp().map(i64::from).unwrap_or(i64::MIN);
    let ei = z.imag().get_exp().map(i64::from).unwrap_or(i64::MIN);
    er.max(ei)
}

fn scale_down(z: &Complex, e: i64) -> Complex64 {
    let shift = |x: &Float| -> f64 {
        if x.is_zero() {
            return 0.0;
        }
        let (m, ex) = x.to_f64_exp();
        let d = ex as i64 - e;
        if d < -1060 {
            0.0
        } else {
            m * 2f64.powi(d as i32)
        }
    };
    Complex64::new(shift(z.real()), shift(z.imag()))
}

/// `mant * 2^exp2` with `f64` mantissa; lets quadratic forms of values with
/// huge magnitudes be evaluated in double precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    pub mant: Complex64,
    pub exp2: i64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled { mant: Complex64::new(0.0, 0.0), exp2: 0 };

    pub fn from_complex(z: &Complex) -> Self {
        if z.real().is_zero() && z.imag().is_zero() {
            return Self::ZERO;
        }
        let e = exp2_of(z);
        Self { mant: scale_down(z, e), exp2: e }
    }

    pub fn from_c64(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            return Self::ZERO;
        }
        let m = z.re.abs().max(z.im.abs());
        let e = m.log2().floor() as i64 + 1;
        Self { mant: z * 2f64.powi(-e as i32), exp2: e }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.re == 0.0 && self.mant.im == 0.0
    }

    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mant.norm().ln() + self.exp2 as f64 * std::f64::consts::LN_2
    }

    /// Mantissa re-expressed relative to `2^exp2`; underflows to zero.
    pub fn mant_at(&self, exp2: i64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let d = self.exp2 - exp2;
        if d < -1060 {
            Complex64::new(0.0, 0.0)
        } else {
            self.mant * 2f64.powi(d as i32)
        }
    }

    pub fn arg(&self) -> f64 {
        self.mant.arg()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    #[test]
    fn default_digits_formula() {
        assert_eq!(default_digits(1.0, 0.0), 32);
        // 1.5 * 30^1.5 / ln 10 = 107.03 -> 108 + 20
        assert_eq!(default_digits(30.0, 1.5), 128);
    }

    #[test]
    fn ln_abs_handles_huge_values() {
        let z = Complex::with_val(128, (Float::with_val(128, 10).pow(400), 0));
        let expect = 400.0 * 10f64.ln();
        assert!((ln_abs(&z) - expect).abs() < 1e-10);
        let s = Scaled::from_complex(&z);
        assert!((s.ln_abs() - expect).abs() < 1e-10);
    }

    #[test]
    fn ln_add_is_stable() {
        assert!((ln_add(1000.0, 1000.0) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(ln_add(f64::NEG_INFINITY, 3.0), 3.0);
    }
}
