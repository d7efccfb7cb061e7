//! Exact reals in `Q(sqrt2, sqrt3)` with a 256-bit numeric shadow, and
//! angles measured in units of `pi`.

use std::cmp::Ordering;
use std::fmt;

use rug::{Float, Rational};

pub const REAL_BITS: u32 = 256;
const REL_ROUND: f64 = 1e-74;

/// `c0 + c1 sqrt2 + c2 sqrt3 + c3 sqrt6`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Q23 {
    c: [Rational; 4],
}

impl Q23 {
    pub fn new(c0: Rational, c1: Rational, c2: Rational, c3: Rational) -> Self {
        Self { c: [c0, c1, c2, c3] }
    }

    pub fn rational(r: Rational) -> Self {
        Self::new(r, Rational::new(), Rational::new(), Rational::new())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn coeffs(&self) -> &[Rational; 4] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| *x == 0)
    }

    /// The rational value, when the irrational parts vanish.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.c[1..].iter().all(|x| *x == 0).then_some(&self.c[0])
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { c: std::array::from_fn(|i| Rational::from(&self.c[i] + &o.c[i])) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { c: std::array::from_fn(|i| Rational::from(&self.c[i] - &o.c[i])) }
    }

    pub fn neg(&self) -> Self {
        Self { c: std::array::from_fn(|i| Rational::from(-&self.c[i])) }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self { c: std::array::from_fn(|i| Rational::from(&self.c[i] * s)) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        // basis 1, s2, s3, s6: s2 s2 = 2, s2 s3 = s6, s2 s6 = 2 s3, s3 s3 = 3,
        // s3 s6 = 3 s2, s6 s6 = 6
        const TABLE: [[(usize, i32); 4]; 4] = [
            [(0, 1), (1, 1), (2, 1), (3, 1)],
            [(1, 1), (0, 2), (3, 1), (2, 2)],
            [(2, 1), (3, 1), (0, 3), (1, 3)],
            [(3, 1), (2, 2), (1, 3), (0, 6)],
        ];
        let mut out: [Rational; 4] = Default::default();
        for i in 0..4 {
            if self.c[i] == 0 {
                continue;
            }
            for j in 0..4 {
                if o.c[j] == 0 {
                    continue;
                }
                let (k, f) = TABLE[i][j];
                out[k] += Rational::from(&self.c[i] * &o.c[j]) * f;
            }
        }
        Self { c: out }
    }

    pub fn to_float(&self, bits: u32) -> Float {
        let roots = [Float::with_val(bits, 1), Float::with_val(bits, 2).sqrt(), Float::with_val(bits, 3).sqrt(), Float::with_val(bits, 6).sqrt()];
        let mut acc = Float::new(bits);
        for (c, r) in self.c.iter().zip(roots) {
            if *c != 0 {
                acc += Float::with_val(bits, c) * r;
            }
        }
        acc
    }
}

impl fmt::Display for Q23 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = ["", "sqrt(2)", "sqrt(3)", "sqrt(6)"];
        let mut first = true;
        for (c, name) in self.c.iter().zip(names) {
            if *c == 0 {
                continue;
            }
            let neg = *c < 0;
            let a = Rational::from(c.abs_ref());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            match (name.is_empty(), a == 1) {
                (true, _) => write!(f, "{a}")?,
                (false, true) => write!(f, "{name}")?,
                (false, false) => write!(f, "{a}*{name}")?,
            }
        }
        Ok(())
    }
}

/// A real number: exact when it lies in `Q(sqrt2, sqrt3)` and was produced
/// by exact operations, otherwise a 256-bit value with an absolute error
/// bound.
#[derive(Clone, Debug)]
pub struct Real {
    exact: Option<Q23>,
    approx: Float,
    err: f64,
}

fn round_err(x: &Float) -> f64 {
    x.to_f64().abs() * REL_ROUND + f64::MIN_POSITIVE
}

impl Real {
    pub fn exact(q: Q23) -> Self {
        let approx = q.to_float(REAL_BITS);
        let err = round_err(&approx);
        Self { exact: Some(q), approx, err }
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::exact(Q23::rational(r))
    }

    pub fn from_int(i: i64) -> Self {
        Self::from_rational(Rational::from(i))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn numeric(approx: Float, err: f64) -> Self {
        let approx = Float::with_val(REAL_BITS, approx);
        let err = err + round_err(&approx);
        Self { exact: None, approx, err }
    }

    pub fn exact_value(&self) -> Option<&Q23> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn approx(&self) -> &Float {
        &self.approx
    }

    pub fn err(&self) -> f64 {
        self.err
    }

    pub fn to_f64(&self) -> f64 {
        self.approx.to_f64()
    }

    fn combine(exact: Option<Q23>, approx: Float, err: f64) -> Self {
        match exact {
            Some(q) => Self::exact(q),
            None => {
                let e = err + round_err(&approx);
                Self { exact: None, approx, err: e }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let ex = self.exact.as_ref().zip(o.exact.as_ref()).map(|(a, b)| a.add(b));
        Self::combine(ex, Float::with_val(REAL_BITS, &self.approx + &o.approx), self.err + o.err)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self { exact: self.exact.as_ref().map(Q23::neg), approx: Float::with_val(REAL_BITS, -&self.approx), err: self.err }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let ex = self.exact.as_ref().zip(o.exact.as_ref()).map(|(a, b)| a.mul(b));
        let err = self.to_f64().abs() * o.err + o.to_f64().abs() * self.err + self.err * o.err;
        Self::combine(ex, Float::with_val(REAL_BITS, &self.approx * &o.approx), err)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let ex = self.exact.as_ref().map(|q| q.scale(s));
        let sf = s.to_f64().abs();
        Self::combine(ex, Float::with_val(REAL_BITS, &self.approx * s), self.err * sf)
    }

    /// Exact zero test for exact values; `|x| <= err` otherwise.
    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(q) => q.is_zero(),
            None => self.approx.to_f64().abs() <= self.err,
        }
    }

    /// `-1`, `0` or `1`; numeric values within their error count as zero.
    pub fn sign(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.approx.is_sign_negative() {
            -1
        } else {
            1
        }
    }

    pub fn cmp(&self, o: &Self) -> Ordering {
        match self.sub(o).sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl PartialEq for Real {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(q) => write!(f, "{q}"),
            None => write!(f, "~{}", format!("{:.50}", self.approx)),
        }
    }
}

/// An angle `x pi`, exact when `x` is rational.
#[derive(Clone, Debug)]
pub struct Angle {
    exact: Option<Rational>,
    approx: Float,
}

const ANGLE_TOL: f64 = 1e-60;

impl Angle {
    pub fn pi_mult(q: Rational) -> Self {
        let approx = Float::with_val(REAL_BITS, &q);
        Self { exact: Some(q), approx }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::pi_mult(Rational::from((num, den)))
    }

    /// `x pi` from a numeric multiple `x`.
    pub fn numeric(x: Float) -> Self {
        Self { exact: None, approx: Float::with_val(REAL_BITS, x) }
    }

    pub fn exact(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }

    /// Multiple of `pi`.
    pub fn units(&self) -> &Float {
        &self.approx
    }

    pub fn radians(&self) -> f64 {
        self.approx.to_f64() * std::f64::consts::PI
    }

    pub fn add(&self, o: &Self) -> Self {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => Self::pi_mult(Rational::from(a + b)),
            _ => Self::numeric(Float::with_val(REAL_BITS, &self.approx + &o.approx)),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => Self::pi_mult(Rational::from(a - b)),
            _ => Self::numeric(Float::with_val(REAL_BITS, &self.approx - &o.approx)),
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        match &self.exact {
            Some(a) => Self::pi_mult(Rational::from(a * s)),
            None => Self::numeric(Float::with_val(REAL_BITS, &self.approx * s)),
        }
    }

    pub fn mid(&self, o: &Self) -> Self {
        self.add(o).scale(&Rational::from((1, 2)))
    }

    pub fn cmp(&self, o: &Self) -> Ordering {
        if let (Some(a), Some(b)) = (&self.exact, &o.exact) {
            return a.cmp(b);
        }
        let d = Float::with_val(REAL_BITS, &self.approx - &o.approx).to_f64();
        if d.abs() <= ANGLE_TOL {
            Ordering::Equal
        } else if d < 0.0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    pub fn cos(&self) -> Real {
        match self.exact.as_ref().and_then(twelfths) {
            Some(k) => Real::exact(cos12(k)),
            None => {
                let x = Float::with_val(REAL_BITS, rug::float::Constant::Pi) * &self.approx;
                Real::numeric(x.cos(), REL_ROUND)
            }
        }
    }

    pub fn sin(&self) -> Real {
        match self.exact.as_ref().and_then(twelfths) {
            Some(k) => Real::exact(cos12(6 - k)),
            None => {
                let x = Float::with_val(REAL_BITS, rug::float::Constant::Pi) * &self.approx;
                Real::numeric(x.sin(), REL_ROUND)
            }
        }
    }
}

impl PartialEq for Angle {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(q) if *q == 0 => write!(f, "0"),
            Some(q) => write!(f, "{q}*pi"),
            None => write!(f, "~{}*pi", format!("{:.30}", self.approx)),
        }
    }
}

/// `12 q` when it is an integer.
fn twelfths(q: &Rational) -> Option<i64> {
    let t = Rational::from(q * 12u32);
    if *t.denom() == 1 {
        t.numer().to_i64().map(|k| k.rem_euclid(24))
    } else {
        None
    }
}

/// `cos(k pi / 12)`.
fn cos12(k: i64) -> Q23 {
    let k = k.rem_euclid(24);
    let k = if k > 12 { 24 - k } else { k };
    let (k, sign) = if k > 6 { (12 - k, -1) } else { (k, 1) };
    let r = |n: i64, d: i64| Rational::from((n * sign, d));
    let z = Rational::new;
    match k {
        0 => Q23::new(r(1, 1), z(), z(), z()),
        1 => Q23::new(z(), r(1, 4), z(), r(1, 4)),
        2 => Q23::new(z(), z(), r(1, 2), z()),
        3 => Q23::new(z(), r(1, 2), z(), z()),
        4 => Q23::new(r(1, 2), z(), z(), z()),
        5 => Q23::new(z(), r(-1, 4), z(), r(1, 4)),
        _ => Q23::zero(),
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_trig_table_matches_floats() {
        for k in -30..30 {
            let a = Angle::from_ratio(k, 12);
            let c = a.cos();
            let s = a.sin();
            assert!(c.is_exact() && s.is_exact());
            let t = a.radians();
            assert!((c.to_f64() - t.cos()).abs() < 1e-14, "cos {k}");
            assert!((s.to_f64() - t.sin()).abs() < 1e-14, "sin {k}");
            // sin^2 + cos^2 = 1 exactly
            let one = c.mul(&c).add(&s.mul(&s));
            assert_eq!(one.exact_value().unwrap().as_rational().unwrap(), &Rational::from(1));
        }
    }

    #[test]
    fn non_standard_angles_fall_back() {
        let a = Angle::from_ratio(1, 9);
        let c = a.cos();
        assert!(!c.is_exact());
        assert!((c.to_f64() - (std::f64::consts::PI / 9.0).cos()).abs() < 1e-15);
        assert!(c.err() < 1e-60);
    }

    #[test]
    fn field_arithmetic() {
        let s2 = Q23::new(Rational::new(), Rational::from(1), Rational::new(), Rational::new());
        let s3 = Q23::new(Rational::new(), Rational::new(), Rational::from(1), Rational::new());
        let s6 = s2.mul(&s3);
        assert_eq!(s6.coeffs()[3], 1);
        assert_eq!(s6.mul(&s6).as_rational().unwrap(), &Rational::from(6));
        assert_eq!(s2.mul(&s6).coeffs()[2], 2);
        assert_eq!(format!("{}", s2.add(&Q23::rational(Rational::from((-1, 2))))), "-1/2 + sqrt(2)");
    }
}
