//! Wronskian determinants: exact (polynomial and truncated-series) and
//! numeric, plus three interchangeable evaluation strategies for the
//! Wronskian of a curve.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rug::{Complex, Float, Rational};

use super::series::horner;
use super::series::FloatCoeffs;
use super::{escalate, EntireFn, EntireFunction, PolynomialFn};
use crate::error::{Error, Result};
use crate::exact::{exact_det, GaussRational};
use crate::precision::{ln_abs, ln_add, Bounded, DEFAULT_CEILING_DIGITS};

trait Ring: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
}

impl Ring for PolynomialFn {
    fn zero_like(&self) -> Self {
        PolynomialFn::zero()
    }
    fn one_like(&self) -> Self {
        PolynomialFn::from_ints(&[1])
    }
    fn add(&self, o: &Self) -> Self {
        PolynomialFn::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        PolynomialFn::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        PolynomialFn::mul(self, o)
    }
}

/// Power series truncated to a fixed length.
#[derive(Clone)]
struct Trunc(Vec<GaussRational>);

impl Ring for Trunc {
    fn zero_like(&self) -> Self {
        Trunc(vec![GaussRational::zero(); self.0.len()])
    }
    fn one_like(&self) -> Self {
        let mut v = vec![GaussRational::zero(); self.0.len()];
        if let Some(x) = v.first_mut() {
            *x = GaussRational::one();
        }
        Trunc(v)
    }
    fn add(&self, o: &Self) -> Self {
        Trunc(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
    fn sub(&self, o: &Self) -> Self {
        Trunc(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
    fn mul(&self, o: &Self) -> Self {
        let m = self.0.len();
        let mut v = vec![GaussRational::zero(); m];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate().take(m - i) {
                if !b.is_zero() {
                    let t = a * b;
                    v[i + j] += &t;
                }
            }
        }
        Trunc(v)
    }
}

/// Determinant by Laplace expansion along rows, memoised on the set of
/// remaining columns (`O(2^n n)` ring multiplications).
fn laplace<T: Ring>(m: &[Vec<T>]) -> T {
    fn rec<T: Ring>(m: &[Vec<T>], row: usize, mask: u32, memo: &mut HashMap<u32, T>) -> T {
        if row == m.len() {
            return m[0][0].one_like();
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let mut acc = m[0][0].zero_like();
        let mut pos = 0;
        for c in 0..m.len() {
            if mask & (1 << c) == 0 {
                continue;
            }
            let e = &m[row][c];
            let minor = rec(m, row + 1, mask & !(1 << c), memo);
            let t = e.mul(&minor);
            acc = if pos % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            pos += 1;
        }
        memo.insert(mask, acc.clone());
        acc
    }
    if m.is_empty() {
        unreachable!("empty matrices are handled by callers");
    }
    let mut memo = HashMap::new();
    rec(m, 0, (1u32 << m.len()) - 1, &mut memo)
}

/// Exact Wronskian of polynomials. The empty list has Wronskian 1.
pub fn wronskian_symbolic(fs: &[PolynomialFn]) -> PolynomialFn {
    if fs.is_empty() {
        return PolynomialFn::from_ints(&[1]);
    }
    let rows: Vec<Vec<PolynomialFn>> =
        (0..fs.len()).map(|k| fs.iter().map(|f| f.nth_derivative(k)).collect()).collect();
    laplace(&rows)
}

/// First `m` Taylor coefficients of the Wronskian, when every component
/// has exact Taylor data.
pub fn wronskian_taylor(fs: &[EntireFn], m: usize) -> Option<Vec<GaussRational>> {
    if fs.is_empty() {
        return Some(Trunc(vec![GaussRational::zero(); m]).one_like().0);
    }
    let n = fs.len();
    let series: Vec<Vec<GaussRational>> = fs.iter().map(|f| f.taylor_exact(m + n)).collect::<Option<_>>()?;
    let rows: Vec<Vec<Trunc>> = (0..n)
        .map(|k| {
            series
                .iter()
                .map(|a| {
                    Trunc(
                        (0..m)
                            .map(|i| {
                                let mut fall = rug::Integer::from(1);
                                for t in 1..=k {
                                    fall *= (i + t) as u64;
                                }
                                a[i + k].scale(&Rational::from(fall))
                            })
                            .collect(),
                    )
                })
                .collect()
        })
        .collect();
    Some(laplace(&rows).0)
}

/// Determinant of a bounded complex matrix by Gaussian elimination with
/// partial pivoting. The error bound is multilinear in the rows (Hadamard):
/// input errors contribute `sum_k e_k prod_{i != k} (|m_i| + e_i)`, and
/// elimination roundoff is charged as `4 n^3 u prod |m_i|`.
fn det_bounded(mat: Vec<Vec<Bounded>>, bits: u32) -> Bounded {
    let n = mat.len();
    let row_ln: Vec<f64> = mat
        .iter()
        .map(|r| 0.5 * r.iter().fold(f64::NEG_INFINITY, |a, b| ln_add(a, 2.0 * ln_abs(&b.value))))
        .collect();
    let row_err: Vec<f64> = mat.iter().map(|r| r.iter().fold(f64::NEG_INFINITY, |a, b| ln_add(a, b.ln_err))).collect();
    let mut err = f64::NEG_INFINITY;
    for k in 0..n {
        let mut t = row_err[k];
        for i in 0..n {
            if i != k {
                t += ln_add(row_ln[i], row_err[i]);
            }
        }
        err = ln_add(err, t);
    }
    let prod: f64 = row_ln.iter().sum();
    let u = -(bits as f64) * std::f64::consts::LN_2;
    err = ln_add(err, prod + (4.0 * (n * n * n) as f64 + 4.0).ln() + u);

    let mut m: Vec<Vec<Complex>> = mat.into_iter().map(|r| r.into_iter().map(|b| b.value).collect()).collect();
    let mut det = Complex::with_val(bits, 1);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| ln_abs(&m[a][col]).partial_cmp(&ln_abs(&m[b][col])).unwrap())
            .unwrap();
        if m[pivot][col].real().is_zero() && m[pivot][col].imag().is_zero() {
            return Bounded { value: Complex::new(bits), ln_err: err };
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= &m[col][col];
        for r in col + 1..n {
            let f = Complex::with_val(bits, &m[r][col] / &m[col][col]);
            for c in col + 1..n {
                let t = Complex::with_val(bits, &f * &m[col][c]);
                m[r][c] -= t;
            }
        }
    }
    Bounded { value: det, ln_err: err }
}

/// Numeric Wronskian with error bound; row `k` holds `f_j^{(k)}`, except
/// that the last row is raised by `last_extra` more derivatives.
fn wronskian_rows(fs: &[EntireFn], z: &Complex, bits: u32, last_extra: usize) -> Result<Bounded> {
    let n = fs.len();
    let mut mat = Vec::with_capacity(n);
    for k in 0..n {
        let order = if k + 1 == n { k + last_extra } else { k };
        mat.push(fs.iter().map(|f| f.eval_bounded(order, z, bits)).collect::<Result<Vec<_>>>()?);
    }
    Ok(det_bounded(mat, bits))
}

pub fn wronskian_bounded(fs: &[EntireFn], z: &Complex, bits: u32) -> Result<Bounded> {
    if fs.is_empty() {
        return Err(Error::Invalid("Wronskian of an empty list".into()));
    }
    wronskian_rows(fs, z, bits, 0)
}

/// `W(f_0, ..., f_n)(z)` with relative error `<= 10^-(prec - GUARD_DIGITS)`.
pub fn wronskian_eval(fs: &[EntireFn], z: &Complex, prec: u32) -> Result<Complex> {
    escalate(prec, DEFAULT_CEILING_DIGITS, |bits| wronskian_bounded(fs, z, bits))
}

/// True when the Wronskian vanishes identically (components dependent).
/// Exact for polynomials and for components with exact Taylor data, where
/// vanishing of the first [`super::TAYLOR_BUDGET`] coefficients is taken as the test.
pub fn is_degenerate(fs: &[EntireFn]) -> Option<bool> {
    if let Some(ps) = fs.iter().map(|f| f.as_polynomial().cloned()).collect::<Option<Vec<_>>>() {
        return Some(wronskian_symbolic(&ps).is_zero());
    }
    let c = wronskian_taylor(fs, 64)?;
    Some(c.iter().all(GaussRational::is_zero))
}

fn drop_indices(fs: &[EntireFn], skip: &[usize]) -> Vec<EntireFn> {
    fs.iter().enumerate().filter(|(i, _)| !skip.contains(i)).map(|(_, f)| f.clone()).collect()
}

/// `|d/dz log(W_j/W_n) - W_{j,n} W / (W_j W_n)|` at `z`, where `W_j` omits
/// `f_j`, `W_n` omits the last component and `W_{j,n}` omits both.
///
/// For polynomial components everything is exact (the rug value of `z` is
/// converted to an exact rational point). Otherwise the derivative of the
/// quotient comes from a Cauchy-integral difference formula on a shrinking
/// circle, independent of the Wronskian identity itself.
pub fn quotient_wronskian_identity_check(fs: &[EntireFn], j: usize, z: &Complex, prec: u32) -> Result<f64> {
    let n = fs.len().checked_sub(1).ok_or_else(|| Error::Invalid("empty component list".into()))?;
    if n == 0 || j >= n {
        return Err(Error::Invalid(format!("need j < n, got j = {j}, n = {n}")));
    }
    if is_degenerate(fs) == Some(true) {
        return Err(Error::Degenerate("components are linearly dependent".into()));
    }
    if let Some(ps) = fs.iter().map(|f| f.as_polynomial().cloned()).collect::<Option<Vec<_>>>() {
        return identity_exact(&ps, j, z);
    }
    identity_numeric(fs, j, z, prec)
}

fn exact_point(z: &Complex) -> GaussRational {
    let re = z.real().to_rational().unwrap_or_default();
    let im = z.imag().to_rational().unwrap_or_default();
    GaussRational::new(re, im)
}

fn identity_exact(ps: &[PolynomialFn], j: usize, z: &Complex) -> Result<f64> {
    let n = ps.len() - 1;
    let pick = |skip: &[usize]| -> Vec<PolynomialFn> {
        ps.iter().enumerate().filter(|(i, _)| !skip.contains(i)).map(|(_, p)| p.clone()).collect()
    };
    let w = wronskian_symbolic(ps);
    let wj = wronskian_symbolic(&pick(&[j]));
    let wn = wronskian_symbolic(&pick(&[n]));
    let wjn = wronskian_symbolic(&pick(&[j, n]));
    let x = exact_point(z);
    let (vj, vn) = (wj.eval_exact(&x), wn.eval_exact(&x));
    if vj.is_zero() || vn.is_zero() {
        return Err(Error::ZeroDenominator("a Wronskian in the denominator vanishes at z".into()));
    }
    let lhs = &(&wj.derivative().eval_exact(&x) / &vj) - &(&wn.derivative().eval_exact(&x) / &vn);
    let rhs = &(&wjn.eval_exact(&x) * &w.eval_exact(&x)) / &(&vj * &vn);
    let d = &lhs - &rhs;
    Ok(d.norm_sqr().to_f64().sqrt())
}

fn identity_numeric(fs: &[EntireFn], j: usize, z: &Complex, prec: u32) -> Result<f64> {
    let n = fs.len() - 1;
    let fj = drop_indices(fs, &[j]);
    let fnn = drop_indices(fs, &[n]);
    let fjn = drop_indices(fs, &[j, n]);
    let wprec = prec + 10;
    let bits = crate::precision::digits_to_bits(wprec);
    let w_at = |g: &[EntireFn], p: &Complex| -> Result<Complex> {
        if g.is_empty() {
            Ok(Complex::with_val(bits, 1))
        } else {
            wronskian_eval(g, p, wprec)
        }
    };
    let vj = w_at(&fj, z)?;
    let vn = w_at(&fnn, z)?;
    if ln_abs(&vj) == f64::NEG_INFINITY || ln_abs(&vn) == f64::NEG_INFINITY {
        return Err(Error::ZeroDenominator("a Wronskian in the denominator vanishes at z".into()));
    }
    let quotient = |p: &Complex| -> Result<Complex> { Ok(Complex::with_val(bits, w_at(&fj, p)? / w_at(&fnn, p)?)) };
    let q0 = Complex::with_val(bits, &vj / &vn);
    let dq = cauchy_derivative(&quotient, z, bits, prec)?;
    let lhs = Complex::with_val(bits, &dq / &q0);
    let rhs = Complex::with_val(bits, w_at(&fjn, z)? * w_at(fs, z)?) / Complex::with_val(bits, &vj * &vn);
    let d = Complex::with_val(bits, &lhs - &rhs);
    Ok(Float::with_val(64, d.abs_ref()).to_f64())
}

/// `F'(z)` from the trapezoid rule on `(1/2 pi i) oint F(w)/(w-z)^2 dw`, with
/// the radius halved until two successive estimates agree to `prec/2` digits.
fn cauchy_derivative<F>(f: &F, z: &Complex, bits: u32, prec: u32) -> Result<Complex>
where
    F: Fn(&Complex) -> Result<Complex>,
{
    const M: u32 = 48;
    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    let est = |h: f64| -> Result<Complex> {
        let mut acc = Complex::new(bits);
        for k in 0..M {
            let t = Float::with_val(bits, &pi * (2 * k)) / M;
            let e = Complex::with_val(bits, (t.clone().cos(), t.sin()));
            let w = Complex::with_val(bits, &e * h) + z;
            let v = f(&w)?;
            acc += v / e;
        }
        Ok(acc / (h * M as f64))
    };
    let tol = -(prec as f64 / 2.0) * std::f64::consts::LN_10;
    let mut h = 0.25;
    let mut prev = est(h)?;
    for _ in 0..30 {
        h /= 2.0;
        let cur = est(h)?;
        let diff = Complex::with_val(bits, &cur - &prev);
        if ln_abs(&diff) - ln_abs(&cur).max(0.0) < tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Uncertified("Cauchy difference did not settle".into()))
}

/// Abel-identity Wronskian of a fundamental system of one equation:
/// `W(z) = W(0) exp(q(z))` with `q = -int_0^z P_{N-1}`.
#[derive(Debug)]
pub struct AbelWronskian {
    w0: GaussRational,
    q: PolynomialFn,
    q_float: std::sync::RwLock<Option<Arc<FloatCoeffs>>>,
}

impl AbelWronskian {
    pub fn new(w0: GaussRational, q: PolynomialFn) -> Self {
        Self { w0, q, q_float: std::sync::RwLock::new(None) }
    }

    pub fn w0(&self) -> &GaussRational {
        &self.w0
    }

    pub fn exponent(&self) -> &PolynomialFn {
        &self.q
    }

    fn q_coeffs(&self, bits: u32) -> Arc<FloatCoeffs> {
        if let Some(fc) = self.q_float.read().unwrap().as_ref() {
            if fc.bits >= bits {
                return fc.clone();
            }
        }
        let mut fc = FloatCoeffs { bits, ..Default::default() };
        for c in self.q.coeffs() {
            fc.push(c.to_complex(bits), c.is_zero());
        }
        let fc = Arc::new(fc);
        *self.q_float.write().unwrap() = Some(fc.clone());
        fc
    }
}

impl EntireFunction for AbelWronskian {
    fn kind(&self) -> &'static str {
        "abel-wronskian"
    }

    fn eval_bounded(&self, k: usize, z: &Complex, bits: u32) -> Result<Bounded> {
        let fc = self.q_coeffs(bits);
        let qv = horner(&fc, fc.len(), z, bits);
        let e = Complex::with_val(bits, qv.value.exp_ref());
        let mut v = Complex::with_val(bits, &e * &self.w0.to_complex(bits));
        // absolute error in the exponent becomes relative error of the value
        let mut rel = ln_add(qv.ln_err + 2f64.ln(), 3f64.ln() - bits as f64 * std::f64::consts::LN_2);
        match k {
            0 => {}
            1 => {
                let d = self.q.derivative();
                let dv = d.eval_bounded(0, z, bits)?;
                v *= &dv.value;
                rel = ln_add(rel, dv.ln_rel_err());
            }
            _ => return Err(Error::Invalid("Abel Wronskian supports derivatives up to order 1".into())),
        }
        let ln_err = ln_abs(&v) + rel;
        Ok(Bounded { value: v, ln_err })
    }

    fn taylor_exact(&self, m: usize) -> Option<Vec<GaussRational>> {
        // W' = q' W, so (n+1) b_{n+1} = sum_i q'_i b_{n-i}
        let dq = self.q.derivative();
        let mut b = vec![self.w0.clone()];
        while b.len() < m {
            let n = b.len() - 1;
            let mut s = GaussRational::zero();
            for (i, c) in dq.coeffs().iter().enumerate().take(n + 1) {
                let t = c * &b[n - i];
                s += &t;
            }
            b.push(s.scale(&Rational::from((1, n as u64 + 1))));
        }
        b.truncate(m);
        Some(b)
    }

    fn growth_order(&self) -> f64 {
        self.q.degree() as f64
    }

    fn is_identically_zero(&self) -> bool {
        self.w0.is_zero()
    }

    fn is_zero_free(&self) -> bool {
        !self.w0.is_zero()
    }
}

/// Determinant of the derivative matrix evaluated at each point.
#[derive(Debug)]
pub struct DirectWronskian {
    comps: Vec<EntireFn>,
}

impl DirectWronskian {
    pub fn new(comps: Vec<EntireFn>) -> Self {
        Self { comps }
    }
}

impl EntireFunction for DirectWronskian {
    fn kind(&self) -> &'static str {
        "direct-wronskian"
    }

    fn eval_bounded(&self, k: usize, z: &Complex, bits: u32) -> Result<Bounded> {
        match k {
            // differentiating a Wronskian only raises its last row
            0 | 1 => wronskian_rows(&self.comps, z, bits, k),
            _ => Err(Error::Invalid("direct Wronskian supports derivatives up to order 1".into())),
        }
    }

    fn taylor_exact(&self, m: usize) -> Option<Vec<GaussRational>> {
        wronskian_taylor(&self.comps, m)
    }

    fn taylor_approx(&self, m: usize, bits: u32) -> Vec<Complex> {
        match self.taylor_exact(m) {
            Some(c) => c.iter().map(|x| x.to_complex(bits)).collect(),
            None => vec![Complex::new(bits); m],
        }
    }

    fn growth_order(&self) -> f64 {
        self.comps.iter().map(|f| f.growth_order()).fold(0.0, f64::max)
    }

    fn is_identically_zero(&self) -> bool {
        is_degenerate(&self.comps) == Some(true)
    }
}

/// A way of producing the Wronskian of a curve as an entire function.
pub trait WronskianStrategy: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    fn applies(&self, comps: &[EntireFn]) -> bool;
    fn build(&self, comps: &[EntireFn]) -> Result<EntireFn>;
}

/// Exact polynomial Wronskian.
#[derive(Debug)]
pub struct Symbolic;

/// `W(0) exp(-int P_{N-1})` for fundamental systems of one equation of order `n+1`.
#[derive(Debug)]
pub struct Abel;

/// Numeric determinant of the derivative matrix.
#[derive(Debug)]
pub struct Direct;

impl WronskianStrategy for Symbolic {
    fn name(&self) -> &'static str {
        "symbolic"
    }
    fn applies(&self, comps: &[EntireFn]) -> bool {
        comps.iter().all(|f| f.as_polynomial().is_some())
    }
    fn build(&self, comps: &[EntireFn]) -> Result<EntireFn> {
        let ps: Vec<PolynomialFn> = comps
            .iter()
            .map(|f| f.as_polynomial().cloned().ok_or_else(|| Error::Invalid("non-polynomial component".into())))
            .collect::<Result<_>>()?;
        Ok(Arc::new(wronskian_symbolic(&ps)))
    }
}

impl WronskianStrategy for Abel {
    fn name(&self) -> &'static str {
        "abel"
    }
    fn applies(&self, comps: &[EntireFn]) -> bool {
        let Some(first) = comps.first().and_then(|f| f.as_ode()) else {
            return false;
        };
        first.equation().order() == comps.len()
            && comps.iter().all(|f| f.as_ode().is_some_and(|g| g.equation() == first.equation()))
    }
    fn build(&self, comps: &[EntireFn]) -> Result<EntireFn> {
        if !self.applies(comps) {
            return Err(Error::Invalid("Abel strategy needs a full system of one equation".into()));
        }
        let odes: Vec<_> = comps.iter().map(|f| f.as_ode().unwrap()).collect();
        let n = comps.len();
        let m: Vec<Vec<GaussRational>> = (0..n).map(|k| odes.iter().map(|g| g.initial()[k].clone()).collect()).collect();
        let w0 = exact_det(&m);
        let q = odes[0].equation().coeffs()[n - 1].integral().scale(&GaussRational::from_int(-1));
        Ok(Arc::new(AbelWronskian::new(w0, q)))
    }
}

impl WronskianStrategy for Direct {
    fn name(&self) -> &'static str {
        "direct"
    }
    fn applies(&self, comps: &[EntireFn]) -> bool {
        !comps.is_empty()
    }
    fn build(&self, comps: &[EntireFn]) -> Result<EntireFn> {
        Ok(Arc::new(DirectWronskian::new(comps.to_vec())))
    }
}

/// Registered strategies in order of preference.
pub fn strategies() -> Vec<Box<dyn WronskianStrategy>> {
    vec![Box::new(Symbolic), Box::new(Abel), Box::new(Direct)]
}

/// Builds the Wronskian with the named strategy, or the first applicable one.
pub fn select_strategy(comps: &[EntireFn], name: Option<&str>) -> Result<(String, EntireFn)> {
    for s in strategies() {
        let wanted = name.is_none_or(|n| n == s.name());
        if wanted && s.applies(comps) {
            return Ok((s.name().to_string(), s.build(comps)?));
        }
    }
    Err(Error::Invalid(format!("no Wronskian strategy {:?} applies", name.unwrap_or("auto"))))
}
