//! Power-series evaluation with rounding and truncation bounds.

use rug::ops::Pow;
use rug::Complex;

use crate::precision::{ln_abs, ln_add, Bounded};

/// Rounded coefficients of a power series together with `ln|c_n|`
/// (`-inf` for exact zeros), used to size bounds without touching MPFR.
#[derive(Clone, Debug, Default)]
pub(crate) struct FloatCoeffs {
    pub bits: u32,
    pub coeffs: Vec<Complex>,
    pub ln_abs: Vec<f64>,
}

impl FloatCoeffs {
    pub fn push(&mut self, c: Complex, exact_zero: bool) {
        let l = if exact_zero { f64::NEG_INFINITY } else { ln_abs(&c) };
        self.coeffs.push(c);
        self.ln_abs.push(l);
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }
}

/// Offset and stride of the nonzero coefficients among the first `len`:
/// every nonzero index is `offset + j * stride`.
fn stride_of(ln_abs: &[f64]) -> Option<(usize, usize)> {
    let mut nz = ln_abs.iter().enumerate().filter(|(_, l)| l.is_finite()).map(|(i, _)| i);
    let first = nz.next()?;
    let mut g = 0usize;
    for i in nz {
        g = gcd(g, i - first);
    }
    Some((first, g.max(1)))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `ln sum_n |c_n| |z|^n` over the first `len` coefficients.
pub(crate) fn ln_abs_sum(ln_c: &[f64], ln_z: f64) -> f64 {
    let mut acc = f64::NEG_INFINITY;
    for (n, &l) in ln_c.iter().enumerate() {
        if l.is_finite() {
            let t = if n == 0 { l } else { l + n as f64 * ln_z };
            acc = ln_add(acc, t);
        }
    }
    acc
}

/// Horner evaluation of the first `len` coefficients at `z`, exploiting a
/// common stride (`z^c P(z^s)`), with a bound on the rounding error.
///
/// The bound charges `8 (L + s + c + 2)` units of roundoff against the sum of
/// absolute terms, which dominates the standard Horner error constant for
/// complex arithmetic including coefficient conversion.
pub(crate) fn horner(fc: &FloatCoeffs, len: usize, z: &Complex, bits: u32) -> Bounded {
    let len = len.min(fc.len());
    let Some((offset, stride)) = stride_of(&fc.ln_abs[..len]) else {
        return Bounded::exact(Complex::new(bits));
    };
    let zero_z = z.real().is_zero() && z.imag().is_zero();
    if zero_z {
        let v = if offset == 0 { Complex::with_val(bits, &fc.coeffs[0]) } else { Complex::new(bits) };
        return Bounded::exact(v);
    }
    let w = Complex::with_val(bits, Pow::pow(z, stride as u32));
    let last = (len - 1 - offset) / stride * stride + offset;
    let mut acc = Complex::with_val(bits, &fc.coeffs[last]);
    let mut idx = last;
    let mut steps = 0usize;
    while idx > offset {
        idx -= stride;
        acc *= &w;
        acc += &fc.coeffs[idx];
        steps += 1;
    }
    if offset > 0 {
        let zc = Complex::with_val(bits, Pow::pow(z, offset as u32));
        acc *= &zc;
    }
    let ln_z = ln_abs(z);
    let s = ln_abs_sum(&fc.ln_abs[..len], ln_z);
    let units = 8.0 * (steps + stride + offset + 2) as f64;
    let ln_err = s + units.ln() - bits as f64 * std::f64::consts::LN_2 + fc_repr_penalty(fc.bits, bits);
    Bounded { value: acc, ln_err }
}

/// Extra slack when coefficients were rounded at lower precision than the
/// evaluation precision.
fn fc_repr_penalty(coeff_bits: u32, bits: u32) -> f64 {
    if coeff_bits >= bits {
        0.0
    } else {
        (bits - coeff_bits) as f64 * std::f64::consts::LN_2
    }
}

/// Truncation point for a series whose terms eventually decay: the smallest
/// `L` such that the last `window` term magnitudes are below the running
/// maximum by `drop` nats and decrease geometrically across two windows.
/// Returns `(L, ln tail bound)`; `None` when `ln_c` runs out first.
pub(crate) fn truncation(ln_c: &[f64], ln_z: f64, window: usize, drop: f64, min_len: usize) -> Option<(usize, f64)> {
    let term = |n: usize| -> f64 {
        let l = ln_c[n];
        if !l.is_finite() {
            f64::NEG_INFINITY
        } else if n == 0 {
            l
        } else {
            l + n as f64 * ln_z
        }
    };
    let mut peak = f64::NEG_INFINITY;
    let mut n = 0usize;
    while n < ln_c.len() {
        peak = peak.max(term(n));
        n += 1;
        if n < min_len.max(2 * window) || !n.is_multiple_of(window) {
            continue;
        }
        let last = (n - window..n).map(term).fold(f64::NEG_INFINITY, f64::max);
        let prev = (n - 2 * window..n - window).map(term).fold(f64::NEG_INFINITY, f64::max);
        let decaying = last == f64::NEG_INFINITY || last < prev - std::f64::consts::LN_2;
        if decaying && (last < peak - drop || last == f64::NEG_INFINITY) {
            // geometric decay by at least 1/2 per window: tail <= 2 * window * last
            let tail = if last == f64::NEG_INFINITY && peak == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                last.max(peak - drop) + (2.0 * window as f64).ln()
            };
            return Some((n, tail));
        }
    }
    None
}

/// Adds two bounded values.
pub(crate) fn add_bounded(a: &Bounded, b: &Bounded, bits: u32) -> Bounded {
    let v = Complex::with_val(bits, &a.value + &b.value);
    let round = ln_abs(&v) - bits as f64 * std::f64::consts::LN_2;
    Bounded { value: v, ln_err: ln_add(ln_add(a.ln_err, b.ln_err), round) }
}
