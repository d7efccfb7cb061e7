use std::cmp::Ordering;
use std::fmt;

use rug::{Float, Rational};

use super::field::{Angle, Real, REAL_BITS};
use crate::error::{Error, Result};

/// Numeric slack for continuity and formula comparisons involving
/// non-exact data.
const NUMERIC_TOL: f64 = 1e-40;

pub(crate) fn approx_eq(a: &Real, b: &Real) -> bool {
    if a.is_exact() && b.is_exact() {
        return a == b;
    }
    let d = a.sub(b);
    d.to_f64().abs() <= NUMERIC_TOL + d.err()
}

/// `a cos(rho t) + b sin(rho t)` on `[from, to]` (angles in units of `pi`).
#[derive(Clone, Debug)]
pub struct TrigArc {
    pub from: Angle,
    pub to: Angle,
    pub a: Real,
    pub b: Real,
}

impl TrigArc {
    pub fn new(from: Angle, to: Angle, a: Real, b: Real) -> Self {
        Self { from, to, a, b }
    }

    pub fn value(&self, rho: &Rational, theta: &Angle) -> Real {
        formula(&self.a, &self.b, rho, theta)
    }

    /// `int_from^to` in radians.
    pub fn integral(&self, rho: &Rational) -> Real {
        let inv = Rational::from(rho.recip_ref());
        let (xa, xb) = (self.from.scale(rho), self.to.scale(rho));
        let ds = xb.sin().sub(&xa.sin());
        let dc = xb.cos().sub(&xa.cos());
        self.a.mul(&ds).sub(&self.b.mul(&dc)).scale(&inv)
    }

    fn same_formula(&self, o: &Self) -> bool {
        approx_eq(&self.a, &o.a) && approx_eq(&self.b, &o.b)
    }
}

impl PartialEq for TrigArc {
    fn eq(&self, o: &Self) -> bool {
        self.from == o.from && self.to == o.to && self.same_formula(o)
    }
}

fn formula(a: &Real, b: &Real, rho: &Rational, theta: &Angle) -> Real {
    let x = theta.scale(rho);
    a.mul(&x.cos()).add(&b.mul(&x.sin()))
}

/// Coefficients of `t -> F(t - phi)` for `F = a cos(rho t) + b sin(rho t)`.
fn rotate(a: &Real, b: &Real, rho: &Rational, phi: &Angle) -> (Real, Real) {
    let x = phi.scale(rho);
    let (c, s) = (x.cos(), x.sin());
    (a.mul(&c).sub(&b.mul(&s)), a.mul(&s).add(&b.mul(&c)))
}

/// Continuous `2 pi`-periodic piecewise sinusoid of order `rho` on `[-pi, pi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseIndicator {
    rho: Rational,
    arcs: Vec<TrigArc>,
}

impl PiecewiseIndicator {
    /// Validates coverage of `[-pi, pi]`, continuity and periodicity; merges
    /// neighbouring arcs carrying the same formula.
    pub fn new(rho: Rational, arcs: Vec<TrigArc>) -> Result<Self> {
        if rho <= 0 {
            return Err(Error::Invalid(format!("indicator order {rho} must be positive")));
        }
        let (first, last) = match (arcs.first(), arcs.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(Error::Invalid("indicator without arcs".into())),
        };
        let (m1, p1) = (Angle::from_ratio(-1, 1), Angle::from_ratio(1, 1));
        if first.from != m1 || last.to != p1 {
            return Err(Error::Invalid("arcs must cover [-pi, pi]".into()));
        }
        for arc in &arcs {
            if arc.from.cmp(&arc.to) != Ordering::Less {
                return Err(Error::Invalid(format!("empty arc [{}, {}]", arc.from, arc.to)));
            }
        }
        let mut merged: Vec<TrigArc> = Vec::with_capacity(arcs.len());
        for arc in arcs {
            match merged.last_mut() {
                Some(prev) => {
                    if prev.to != arc.from {
                        return Err(Error::Invalid(format!("arcs leave a gap or overlap at {}", prev.to)));
                    }
                    let l = prev.value(&rho, &prev.to);
                    let r = arc.value(&rho, &arc.from);
                    if !approx_eq(&l, &r) {
                        return Err(Error::Invalid(format!("indicator discontinuous at {}: {l} vs {r}", arc.from)));
                    }
                    if prev.same_formula(&arc) {
                        prev.to = arc.to;
                    } else {
                        merged.push(arc);
                    }
                }
                None => merged.push(arc),
            }
        }
        let h = Self { rho, arcs: merged };
        let (a, b) = (h.arcs[0].value(&h.rho, &m1), h.arcs[h.arcs.len() - 1].value(&h.rho, &p1));
        if !approx_eq(&a, &b) {
            return Err(Error::Invalid(format!("indicator not periodic: h(-pi) = {a}, h(pi) = {b}")));
        }
        Ok(h)
    }

    /// `a cos(rho t) + b sin(rho t)` on the whole circle.
    pub fn sinusoid(rho: Rational, a: Real, b: Real) -> Result<Self> {
        Self::new(rho, vec![TrigArc::new(Angle::from_ratio(-1, 1), Angle::from_ratio(1, 1), a, b)])
    }

    pub fn zero(rho: Rational) -> Self {
        Self::sinusoid(rho, Real::zero(), Real::zero()).expect("zero indicator is valid")
    }

    pub fn rho(&self) -> &Rational {
        &self.rho
    }

    pub fn arcs(&self) -> &[TrigArc] {
        &self.arcs
    }

    /// Internal breakpoints (in units of `pi`).
    pub fn breakpoints(&self) -> Vec<Angle> {
        self.arcs[1..].iter().map(|a| a.from.clone()).collect()
    }

    fn arc_at(&self, theta: &Angle) -> &TrigArc {
        self.arcs.iter().find(|a| theta.cmp(&a.to) != Ordering::Greater).unwrap_or(&self.arcs[self.arcs.len() - 1])
    }

    /// Value at `theta` (units of `pi`, in `[-1, 1]`).
    pub fn value_at(&self, theta: &Angle) -> Real {
        self.arc_at(theta).value(&self.rho, theta)
    }

    /// Value at `t` radians, any real `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let tau = std::f64::consts::TAU;
        let pi = std::f64::consts::PI;
        let u = (t + pi).rem_euclid(tau) - pi;
        let x = u / pi;
        let arc = self.arcs.iter().find(|a| x <= a.to.units().to_f64()).unwrap_or(&self.arcs[self.arcs.len() - 1]);
        let r = self.rho.to_f64() * u;
        arc.a.to_f64() * r.cos() + arc.b.to_f64() * r.sin()
    }

    /// `int_{-pi}^{pi} h`.
    pub fn integrate(&self) -> Real {
        self.arcs.iter().fold(Real::zero(), |acc, a| acc.add(&a.integral(&self.rho)))
    }

    /// `(1/2pi) int h`, as a multiple of `1/pi`.
    pub fn mean(&self) -> PiCoefficient {
        PiCoefficient(self.integrate().scale(&Rational::from((1, 2))))
    }

    pub fn is_zero(&self) -> bool {
        self.arcs.iter().all(|a| a.a.is_zero() && a.b.is_zero())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let arcs = self.arcs.iter().map(|a| TrigArc::new(a.from.clone(), a.to.clone(), a.a.scale(s), a.b.scale(s))).collect();
        Self::new(self.rho.clone(), arcs).expect("scaling keeps validity")
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let pieces = refine(&[self, o], false)?;
        let arcs = pieces
            .into_iter()
            .map(|p| TrigArc::new(p.from, p.to, p.coeffs[0].0.add(&p.coeffs[1].0), p.coeffs[0].1.add(&p.coeffs[1].1)))
            .collect();
        Self::new(self.rho.clone(), arcs)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&Rational::from(-1)))
    }

    /// `h^+ = max(h, 0)`.
    pub fn positive_part(&self) -> Self {
        pointwise_max(&[self, &Self::zero(self.rho.clone())]).expect("same order")
    }

    /// `self <= o` everywhere.
    pub fn le(&self, o: &Self) -> Result<bool> {
        let pieces = refine(&[self, o], true)?;
        Ok(pieces.iter().all(|p| {
            let m = p.from.mid(&p.to);
            let d = formula(&p.coeffs[1].0, &p.coeffs[1].1, &self.rho, &m).sub(&formula(&p.coeffs[0].0, &p.coeffs[0].1, &self.rho, &m));
            d.sign() >= 0
        }))
    }

    /// The periodic extension has a corner at `pi`.
    pub fn has_corner_at_pi(&self) -> bool {
        let first = &self.arcs[0];
        let last = &self.arcs[self.arcs.len() - 1];
        let (a, b) = rotate(&first.a, &first.b, &self.rho, &Angle::from_ratio(2, 1));
        !(approx_eq(&a, &last.a) && approx_eq(&b, &last.b))
    }
}

impl fmt::Display for PiecewiseIndicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.arcs.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "[{}, {}]: ({}) cos({} t) + ({}) sin({} t)", a.from, a.to, a.a, self.rho, a.b, self.rho)?;
        }
        Ok(())
    }
}

/// `value / pi`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiCoefficient(pub Real);

impl PiCoefficient {
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64() / std::f64::consts::PI
    }

    pub fn is_exact(&self) -> bool {
        self.0.is_exact()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for PiCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_exact() && self.0.is_zero() {
            return write!(f, "0");
        }
        match self.0.exact_value() {
            Some(q) => match q.as_rational() {
                Some(r) if *r.denom() == 1 => write!(f, "{}/pi", r.numer()),
                Some(r) => write!(f, "{}/({}*pi)", r.numer(), r.denom()),
                None => write!(f, "({q})/pi"),
            },
            None => write!(f, "~{:.30e}", self.to_f64()),
        }
    }
}

/// `h(t - phi)`, re-wrapped into `[-pi, pi]`.
pub fn arc_shift(h: &PiecewiseIndicator, phi: &Rational) -> PiecewiseIndicator {
    let rho = h.rho();
    let p = Angle::pi_mult(phi.clone());
    let (m1, p1) = (Angle::from_ratio(-1, 1), Angle::from_ratio(1, 1));
    let mut pieces: Vec<TrigArc> = Vec::new();
    let mut push = |from: Angle, to: Angle, a: &Real, b: &Real| {
        // bring [from, to] into [-1, 1] by whole turns
        let mut shift = Rational::new();
        let mut f = from;
        let mut t = to;
        while f.cmp(&p1) != Ordering::Less {
            f = f.sub(&Angle::from_ratio(2, 1));
            t = t.sub(&Angle::from_ratio(2, 1));
            shift -= 2;
        }
        while t.cmp(&m1) != Ordering::Greater {
            f = f.add(&Angle::from_ratio(2, 1));
            t = t.add(&Angle::from_ratio(2, 1));
            shift += 2;
        }
        let (a, b) = rotate(a, b, rho, &Angle::pi_mult(shift));
        pieces.push(TrigArc::new(f, t, a, b));
    };
    for arc in h.arcs() {
        let (a, b) = rotate(&arc.a, &arc.b, rho, &p);
        let from = arc.from.add(&p);
        let to = arc.to.add(&p);
        // split at odd multiples of pi
        let mut cuts = vec![from.clone()];
        let lo = from.units().to_f64().floor() as i64 - 1;
        let hi = to.units().to_f64().ceil() as i64 + 1;
        for k in lo..=hi {
            if k.rem_euclid(2) == 1 {
                let c = Angle::from_ratio(k, 1);
                if c.cmp(&from) == Ordering::Greater && c.cmp(&to) == Ordering::Less {
                    cuts.push(c);
                }
            }
        }
        cuts.push(to);
        for w in cuts.windows(2) {
            push(w[0].clone(), w[1].clone(), &a, &b);
        }
    }
    pieces.sort_by(|x, y| x.from.cmp(&y.from));
    PiecewiseIndicator::new(rho.clone(), pieces).expect("a shift of a valid indicator is valid")
}

/// An interval on which every member is a single sinusoid (and, when
/// crossings were requested, no two members cross inside).
#[derive(Clone, Debug)]
pub(crate) struct Piece {
    pub from: Angle,
    pub to: Angle,
    pub coeffs: Vec<(Real, Real)>,
}

impl Piece {
    pub fn mid(&self) -> Angle {
        self.from.mid(&self.to)
    }

    pub fn value(&self, i: usize, rho: &Rational, theta: &Angle) -> Real {
        formula(&self.coeffs[i].0, &self.coeffs[i].1, rho, theta)
    }

    pub fn same(&self, i: usize, j: usize) -> bool {
        approx_eq(&self.coeffs[i].0, &self.coeffs[j].0) && approx_eq(&self.coeffs[i].1, &self.coeffs[j].1)
    }
}

fn common_rho<'a>(members: &[&'a PiecewiseIndicator]) -> Result<&'a Rational> {
    let rho = members.first().ok_or_else(|| Error::Invalid("empty indicator family".into()))?.rho();
    if members.iter().any(|m| m.rho() != rho) {
        return Err(Error::Invalid("indicators of different orders".into()));
    }
    Ok(rho)
}

fn sort_dedup(v: &mut Vec<Angle>) {
    v.sort_by(|a, b| a.cmp(b));
    v.dedup_by(|a, b| a == b);
}

/// Angles strictly inside `(u, v)` where `da cos(rho t) + db sin(rho t) = 0`.
fn crossings(da: &Real, db: &Real, rho: &Rational, u: &Angle, v: &Angle) -> Vec<Angle> {
    let tiny = |x: &Real| x.is_zero() || (!x.is_exact() && x.to_f64().abs() <= NUMERIC_TOL);
    if tiny(da) && tiny(db) {
        return Vec::new();
    }
    // rho t = y0 pi + m pi
    let y = Float::with_val(REAL_BITS, -da.approx());
    let y0 = Float::with_val(REAL_BITS, y.atan2(db.approx())) / Float::with_val(REAL_BITS, rug::float::Constant::Pi);
    let y0 = Float::with_val(REAL_BITS, y0);
    let mut exact: Option<Rational> = None;
    if da.is_exact() && db.is_exact() {
        let k = Float::with_val(REAL_BITS, &y0 * 12u32).round();
        let diff = Float::with_val(REAL_BITS, &y0 * 12u32) - &k;
        if diff.to_f64().abs() < 1e-50 {
            let k = k.to_integer().expect("finite").to_i64().expect("small");
            let a = Angle::from_ratio(k, 12);
            if da.mul(&a.cos()).add(&db.mul(&a.sin())).is_zero() {
                exact = Some(Rational::from((k, 12)));
            }
        }
    }
    let rf = rho.to_f64();
    let lo = (rf * u.units().to_f64() - y0.to_f64()).floor() as i64 - 1;
    let hi = (rf * v.units().to_f64() - y0.to_f64()).ceil() as i64 + 1;
    let inv = Rational::from(rho.recip_ref());
    let mut out = Vec::new();
    for m in lo..=hi {
        let t = match &exact {
            Some(q) => Angle::pi_mult(Rational::from(q + m) * &inv),
            None => Angle::numeric(Float::with_val(REAL_BITS, &y0 + m) * &inv),
        };
        if t.cmp(u) == Ordering::Greater && t.cmp(v) == Ordering::Less {
            out.push(t);
        }
    }
    out
}

pub(crate) fn refine(members: &[&PiecewiseIndicator], with_crossings: bool) -> Result<Vec<Piece>> {
    let rho = common_rho(members)?;
    let mut breaks = vec![Angle::from_ratio(-1, 1), Angle::from_ratio(1, 1)];
    for m in members {
        breaks.extend(m.breakpoints());
    }
    sort_dedup(&mut breaks);
    let mut out = Vec::new();
    for w in breaks.windows(2) {
        let (u, v) = (&w[0], &w[1]);
        let mid = u.mid(v);
        let coeffs: Vec<(Real, Real)> = members
            .iter()
            .map(|m| {
                let arc = m.arc_at(&mid);
                (arc.a.clone(), arc.b.clone())
            })
            .collect();
        let mut cuts = vec![u.clone(), v.clone()];
        if with_crossings {
            for i in 0..coeffs.len() {
                for j in i + 1..coeffs.len() {
                    let da = coeffs[i].0.sub(&coeffs[j].0);
                    let db = coeffs[i].1.sub(&coeffs[j].1);
                    cuts.extend(crossings(&da, &db, rho, u, v));
                }
            }
            sort_dedup(&mut cuts);
        }
        for c in cuts.windows(2) {
            out.push(Piece { from: c[0].clone(), to: c[1].clone(), coeffs: coeffs.clone() });
        }
    }
    Ok(out)
}

/// Members sorted ascending at the piece midpoint (ties keep index order).
pub(crate) fn order_on(piece: &Piece, rho: &Rational) -> Vec<usize> {
    let m = piece.mid();
    let vals: Vec<Real> = (0..piece.coeffs.len()).map(|i| piece.value(i, rho, &m)).collect();
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[a].cmp(&vals[b]).then(a.cmp(&b)));
    idx
}

/// Exact upper envelope.
pub fn pointwise_max(members: &[&PiecewiseIndicator]) -> Result<PiecewiseIndicator> {
    let rho = common_rho(members)?.clone();
    let pieces = refine(members, true)?;
    let arcs = pieces
        .into_iter()
        .map(|p| {
            let top = *order_on(&p, &rho).last().expect("nonempty");
            let (a, b) = p.coeffs[top].clone();
            TrigArc::new(p.from, p.to, a, b)
        })
        .collect();
    PiecewiseIndicator::new(rho, arcs)
}

/// The `k`-th smallest value functions, `k = 0..sum(multiplicity)`.
pub fn sorted_envelopes(members: &[&PiecewiseIndicator], multiplicity: &[usize]) -> Result<Vec<PiecewiseIndicator>> {
    let rho = common_rho(members)?.clone();
    if multiplicity.len() != members.len() {
        return Err(Error::Invalid("multiplicity list does not match the family".into()));
    }
    let total: usize = multiplicity.iter().sum();
    let pieces = refine(members, true)?;
    let mut arcs: Vec<Vec<TrigArc>> = vec![Vec::new(); total];
    for p in &pieces {
        let expanded: Vec<usize> = order_on(p, &rho).into_iter().flat_map(|i| std::iter::repeat_n(i, multiplicity[i])).collect();
        for (k, &i) in expanded.iter().enumerate() {
            let (a, b) = p.coeffs[i].clone();
            arcs[k].push(TrigArc::new(p.from.clone(), p.to.clone(), a, b));
        }
    }
    arcs.into_iter().map(|a| PiecewiseIndicator::new(rho.clone(), a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn h0() -> PiecewiseIndicator {
        PiecewiseIndicator::sinusoid(Rational::from((3, 2)), Real::from_int(-1), Real::zero()).unwrap()
    }

    fn cosk(k: i64) -> PiecewiseIndicator {
        PiecewiseIndicator::sinusoid(Rational::from(1), Real::from_int(k), Real::zero()).unwrap()
    }

    #[test]
    fn shift_examples() {
        let h = h0();
        assert_eq!(arc_shift(&h, &Rational::new()), h);
        let s = arc_shift(&h, &Rational::from((2, 3)));
        let v = s.value_at(&Angle::from_ratio(0, 1));
        assert_eq!(v.exact_value().unwrap().as_rational().unwrap(), &Rational::from(1));
        // the corner at pi moved to -pi/3
        assert_eq!(s.breakpoints(), vec![Angle::from_ratio(-1, 3)]);
        let back = arc_shift(&s, &Rational::from((-2, 3)));
        assert_eq!(back, h);
        for i in 0..200 {
            let t = -3.2 + 0.032 * i as f64;
            assert!((s.eval(t) - h.eval(t - 2.0 * std::f64::consts::PI / 3.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn max_of_airy_h_is_abs_cos() {
        let h = h0();
        let h1 = arc_shift(&h, &Rational::from((2, 3)));
        let h2 = arc_shift(&h, &Rational::from((-2, 3)));
        let m = pointwise_max(&[&h, &h1, &h2]).unwrap();
        for i in 0..1000 {
            let t = -std::f64::consts::PI + std::f64::consts::TAU * i as f64 / 999.0;
            assert!((m.eval(t) - (1.5 * t).cos().abs()).abs() < 1e-12);
        }
        let i = m.integrate();
        assert_eq!(i.exact_value().unwrap().as_rational().unwrap(), &Rational::from(4));
        assert_eq!(m.mean().to_string(), "2/pi");
        assert_eq!(pointwise_max(&[&h]).unwrap(), h);
    }

    #[test]
    fn inner_hump_integral() {
        // int_{-pi/3}^{pi/3} cos(3t/2) = 4/3
        let arc = TrigArc::new(Angle::from_ratio(-1, 3), Angle::from_ratio(1, 3), Real::from_int(1), Real::zero());
        let v = arc.integral(&Rational::from((3, 2)));
        assert_eq!(v.exact_value().unwrap().as_rational().unwrap(), &Rational::from((4, 3)));
        assert!(PiecewiseIndicator::zero(Rational::from(1)).integrate().is_zero());
    }

    #[test]
    fn exponential_envelopes() {
        let (a, b, c) = (cosk(0), cosk(1), cosk(2));
        let env = sorted_envelopes(&[&a, &b, &c], &[1, 1, 1]).unwrap();
        for i in 0..500 {
            let t = -3.14 + 6.28 * i as f64 / 499.0;
            let mut v = [0.0, t.cos(), 2.0 * t.cos()];
            v.sort_by(f64::total_cmp);
            for k in 0..3 {
                assert!((env[k].eval(t) - v[k]).abs() < 1e-12);
            }
        }
        assert_eq!(pointwise_max(&[&a, &b, &c]).unwrap().mean().to_string(), "2/pi");
    }

    #[test]
    fn discontinuity_rejected() {
        let arcs = vec![
            TrigArc::new(Angle::from_ratio(-1, 1), Angle::from_ratio(0, 1), Real::from_int(1), Real::zero()),
            TrigArc::new(Angle::from_ratio(0, 1), Angle::from_ratio(1, 1), Real::from_int(2), Real::zero()),
        ];
        assert!(PiecewiseIndicator::new(Rational::from(1), arcs).is_err());
        // sin(t/2) is not periodic on [-pi, pi]
        assert!(PiecewiseIndicator::sinusoid(Rational::from((1, 2)), Real::zero(), Real::from_int(1)).is_err());
    }

    #[test]
    fn non_standard_crossing_is_numeric() {
        // cos t vs 2 sin t cross at atan(1/2)
        let a = cosk(1);
        let b = PiecewiseIndicator::sinusoid(Rational::from(1), Real::zero(), Real::from_int(2)).unwrap();
        let m = pointwise_max(&[&a, &b]).unwrap();
        let x = 0.5f64.atan();
        let bp: Vec<f64> = m.breakpoints().iter().map(|a| a.radians()).collect();
        assert!(bp.iter().any(|b| (b - x).abs() < 1e-14), "{bp:?}");
        assert!(!m.integrate().is_exact());
        // oracle: dense midpoint rule
        let n = 200_000;
        let h = std::f64::consts::TAU / n as f64;
        let num: f64 = (0..n).map(|i| m.eval(-std::f64::consts::PI + (i as f64 + 0.5) * h)).sum::<f64>() * h;
        assert!((m.integrate().to_f64() - num).abs() < 1e-8);
        assert!((m.integrate().to_f64() - 2.0 * 5f64.sqrt()).abs() < 1e-12);
    }
}
