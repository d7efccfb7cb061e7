//! Exact Gaussian rationals `p + q i` with `p, q` rational.
//!
//! Every coefficient that enters the library from a file is parsed into this
//! type, so polynomial algebra (Wronskians, gcds, Taylor recurrences) stays
//! exact and only evaluation at a point goes through floating arithmetic.
//!
//! String grammar accepted by [`GaussRational::from_str`]:
//!
//! ```text
//! complex  := real | imag | real sign imag
//! imag     := [unsigned] "i"          (a bare "i" means 1i)
//! real     := [sign] unsigned
//! unsigned := digits ["." digits] ["/" digits]
//! ```
//!
//! Examples: `3`, `-2/7`, `0.125`, `1+i`, `3/2-1/4i`, `-i`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use rug::{Complex, Integer, Rational};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GaussRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        Self::new(Rational::new(), Rational::from(1))
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(Rational::from(v), Rational::new())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(Rational::from((num, den)), Rational::new())
    }

    pub fn real(re: Rational) -> Self {
        Self::new(re, Rational::new())
    }

    pub fn is_zero(&self) -> bool {
        self.re.cmp0().is_eq() && self.im.cmp0().is_eq()
    }

    pub fn is_real(&self) -> bool {
        self.im.cmp0().is_eq()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), Rational::from(-&self.im))
    }

    pub fn norm_sqr(&self) -> Rational {
        Rational::from(&self.re * &self.re) + Rational::from(&self.im * &self.im)
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self::new(
            Rational::from(&self.re / &n),
            -Rational::from(&self.im / &n),
        ))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(Rational::from(&self.re * s), Rational::from(&self.im * s))
    }

    pub fn to_complex(&self, bits: u32) -> Complex {
        Complex::with_val(bits, (&self.re, &self.im))
    }

    /// Natural log of the modulus, or `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let n = rug::Float::with_val(64, &self.norm_sqr());
        let (m, e) = n.to_f64_exp();
        0.5 * (m.ln() + e as f64 * std::f64::consts::LN_2)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl From<i64> for GaussRational {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl From<Rational> for GaussRational {
    fn from(v: Rational) -> Self {
        Self::real(v)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&GaussRational> for &GaussRational {
            type Output = GaussRational;
            fn $m(self, rhs: &GaussRational) -> GaussRational {
                let f: fn(&GaussRational, &GaussRational) -> GaussRational = $body;
                f(self, rhs)
            }
        }
        impl $tr<GaussRational> for GaussRational {
            type Output = GaussRational;
            fn $m(self, rhs: GaussRational) -> GaussRational {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&GaussRational> for GaussRational {
            type Output = GaussRational;
            fn $m(self, rhs: &GaussRational) -> GaussRational {
                (&self).$m(rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| GaussRational::new(
    Rational::from(&a.re + &b.re),
    Rational::from(&a.im + &b.im)
));
binop!(Sub, sub, |a, b| GaussRational::new(
    Rational::from(&a.re - &b.re),
    Rational::from(&a.im - &b.im)
));
binop!(Mul, mul, |a, b| {
    let re = Rational::from(&a.re * &b.re) - Rational::from(&a.im * &b.im);
    let im = Rational::from(&a.re * &b.im) + Rational::from(&a.im * &b.re);
    GaussRational::new(re, im)
});
binop!(Div, div, |a, b| {
    let inv = b.recip().expect("division by zero Gaussian rational");
    a * &inv
});

impl Neg for GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational::new(-self.re, -self.im)
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational::new(Rational::from(-&self.re), Rational::from(-&self.im))
    }
}

impl AddAssign<&GaussRational> for GaussRational {
    fn add_assign(&mut self, rhs: &GaussRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussRational> for GaussRational {
    fn sub_assign(&mut self, rhs: &GaussRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussRational> for GaussRational {
    fn mul_assign(&mut self, rhs: &GaussRational) {
        *self = &*self * rhs;
    }
}

/// Parses `digits[.digits][/digits]` without sign.
fn parse_unsigned(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("malformed number `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let mut value = match num.split_once('.') {
        Some((int, frac)) => {
            if int.is_empty() && frac.is_empty() {
                return Err(bad());
            }
            if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit())
            {
                return Err(bad());
            }
            let digits = format!("{int}{frac}");
            let n = Integer::from_str_radix(&digits, 10).map_err(|_| bad())?;
            let scale = Integer::from(Integer::u_pow_u(10, frac.len() as u32));
            Rational::from((n, scale))
        }
        None => {
            if num.is_empty() || !num.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            Rational::from(Integer::from_str_radix(num, 10).map_err(|_| bad())?)
        }
    };
    if let Some(d) = den {
        if d.is_empty() || !d.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let d = Integer::from_str_radix(d, 10).map_err(|_| bad())?;
        if d.cmp0().is_eq() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        value /= Rational::from(d);
    }
    Ok(value)
}

fn parse_signed(s: &str) -> Result<Rational> {
    match s.strip_prefix('-') {
        Some(rest) => Ok(-parse_unsigned(rest)?),
        None => parse_unsigned(s.strip_prefix('+').unwrap_or(s)),
    }
}

fn parse_imag(s: &str) -> Result<Rational> {
    match s {
        "" | "+" => Ok(Rational::from(1)),
        "-" => Ok(Rational::from(-1)),
        _ => parse_signed(s),
    }
}

impl FromStr for GaussRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty number".into()));
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(Self::real(parse_signed(&t)?));
        };
        // split at the last sign that is not the leading one
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(k, _)| k)
            .last();
        match split {
            Some(k) => Ok(Self::new(parse_signed(&body[..k])?, parse_imag(&body[k..])?)),
            None => Ok(Self::new(Rational::new(), parse_imag(body)?)),
        }
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re0 = self.re.cmp0().is_eq();
        let im0 = self.im.cmp0().is_eq();
        if im0 {
            return write!(f, "{}", self.re);
        }
        let im = if self.im == 1 {
            String::new()
        } else if self.im == -1 {
            "-".to_string()
        } else {
            self.im.to_string()
        };
        if re0 {
            write!(f, "{im}i")
        } else if self.im.cmp0().is_lt() {
            write!(f, "{}{im}i", self.re)
        } else {
            write!(f, "{}+{im}i", self.re)
        }
    }
}

impl serde::Serialize for GaussRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    parse_signed(&t)
}

/// Exact rank of a list of row vectors over the Gaussian rationals.
pub fn exact_rank(rows: &[Vec<GaussRational>]) -> usize {
    let mut m: Vec<Vec<GaussRational>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = m[rank][col].recip().expect("nonzero pivot");
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let factor = &m[r][col] * &inv;
                for c in col..ncols {
                    let delta = &factor * &m[rank][c];
                    m[r][c] -= &delta;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Exact determinant by fraction-free elimination over the field.
pub fn exact_det(mat: &[Vec<GaussRational>]) -> GaussRational {
    let n = mat.len();
    let mut m = mat.to_vec();
    let mut det = GaussRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return GaussRational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det = &det * &m[col][col];
        let inv = m[col][col].recip().expect("nonzero pivot");
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let factor = &m[r][col] * &inv;
                for c in col..n {
                    let delta = &factor * &m[col][c];
                    m[r][c] -= &delta;
                }
            }
        }
    }
    det
}
