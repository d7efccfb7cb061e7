use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use rug::Complex;
use serde::Serialize;

use crate::entire::{escalate, vanishing_order_at_origin, EntireFunction, PolynomialFn};
use crate::error::{Error, Result};
use crate::precision::{Scaled, DEFAULT_CEILING_DIGITS};
use crate::quadrature::{circle_means, QuadratureSpec};

/// Winding numbers of several functions along one circle.
#[derive(Clone, Debug)]
pub struct Winding {
    pub counts: Vec<i64>,
    /// Every final argument increment stayed below `pi/2`.
    pub certified: bool,
    /// Per function, the narrowest angular step it forced.
    pub min_step: Vec<f64>,
    pub samples: usize,
}

fn wrap(x: f64) -> f64 {
    let mut y = x % TAU;
    if y > PI {
        y -= TAU;
    } else if y <= -PI {
        y += TAU;
    }
    y
}

/// Argument tracking along `theta in [0, 2pi)`: intervals whose increment
/// exceeds `pi/4` for any function are bisected up to `max_depth` times.
pub fn track_winding<F>(base: usize, max_depth: u32, f: F) -> Result<Winding>
where
    F: Fn(f64) -> Result<Vec<Scaled>> + Sync,
{
    let base = base.max(8);
    let thetas: Vec<f64> = (0..base).map(|i| TAU * i as f64 / base as f64).collect();
    let vals: Vec<Vec<Scaled>> = thetas.par_iter().map(|&t| f(t)).collect::<Result<_>>()?;
    let dim = vals[0].len();
    let arg = |v: &[Scaled]| -> Result<Vec<f64>> {
        v.iter()
            .map(|s| if s.is_zero() { Err(Error::Uncertified("zero on the contour".into())) } else { Ok(s.arg()) })
            .collect()
    };
    let args: Vec<Vec<f64>> = vals.iter().map(|v| arg(v)).collect::<Result<_>>()?;
    let mut total = vec![0.0; dim];
    let mut min_step = vec![f64::INFINITY; dim];
    let mut certified = true;
    let mut samples = base;
    for i in 0..base {
        let (ta, tb) = (thetas[i], if i + 1 < base { thetas[i + 1] } else { TAU });
        let mut stack = vec![(ta, args[i].clone(), tb, args[(i + 1) % base].clone(), 0u32)];
        while let Some((a, va, b, vb, depth)) = stack.pop() {
            let d: Vec<f64> = va.iter().zip(&vb).map(|(x, y)| wrap(y - x)).collect();
            let bad: Vec<usize> = (0..dim).filter(|&k| d[k].abs() > FRAC_PI_4).collect();
            if !bad.is_empty() && depth < max_depth {
                for &k in &bad {
                    min_step[k] = min_step[k].min(b - a);
                }
                let m = 0.5 * (a + b);
                let vm = arg(&f(m)?)?;
                samples += 1;
                // right half first so the left half is popped next
                stack.push((m, vm.clone(), b, vb, depth + 1));
                stack.push((a, va, m, vm, depth + 1));
                continue;
            }
            if d.iter().any(|x| x.abs() >= FRAC_PI_2) {
                certified = false;
            }
            for k in 0..dim {
                total[k] += d[k];
            }
        }
    }
    let mut counts = Vec::with_capacity(dim);
    for t in total {
        let w = t / TAU;
        if (w - w.round()).abs() > 0.05 {
            certified = false;
        }
        counts.push(w.round() as i64);
    }
    Ok(Winding { counts, certified, min_step, samples })
}

/// Base sample count for argument tracking on `|z| = r` for a function
/// whose argument turns at a rate of about `r^rho` (or `degree`) per radian:
/// eight samples per radian of that rate, so no base step can skip a turn.
pub fn winding_base(r: f64, rho: f64, degree: usize) -> usize {
    let rate = r.max(1.0).powf(rho).max(degree as f64);
    ((8.0 * rate).ceil() as usize).max(64)
}

/// Certified-or-flagged zero count of `g` in `|z| <= r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZeroCount {
    pub count: i64,
    pub certified: bool,
}

pub fn eval_scaled(g: &dyn EntireFunction, z: Complex64, prec: u32) -> Result<Scaled> {
    let v = escalate(prec, DEFAULT_CEILING_DIGITS, |bits| {
        let zz = Complex::with_val(bits, (z.re, z.im));
        g.eval_bounded(0, &zz, bits)
    })?;
    Ok(Scaled::from_complex(&v))
}

/// Winding number of `g` along `|z| = r` (zeros in the open disc; the
/// circle must avoid zeros).
pub fn count_zeros(g: &dyn EntireFunction, r: f64, prec: u32) -> Result<ZeroCount> {
    if !(r > 0.0) {
        return Err(Error::Invalid(format!("radius {r} must be positive")));
    }
    let degree = g.as_polynomial().map_or(0, PolynomialFn::degree);
    let base = winding_base(r, g.growth_order(), degree);
    let w = track_winding(base, 30, |t| Ok(vec![eval_scaled(g, Complex64::from_polar(r, t), prec)?]))?;
    Ok(ZeroCount { count: w.counts[0], certified: w.certified })
}

/// Moduli of the nonzero roots (with multiplicity) and the order at 0.
pub fn polynomial_zero_moduli(p: &PolynomialFn) -> Result<(usize, Vec<f64>)> {
    let v = p.valuation();
    let q = PolynomialFn::new(p.coeffs()[v..].to_vec());
    if q.degree() == 0 {
        return Ok((v, Vec::new()));
    }
    let mut out = Vec::new();
    for (z, mult) in q.roots(192)? {
        let m = Complex64::new(z.real().to_f64(), z.imag().to_f64()).norm();
        out.extend(std::iter::repeat_n(m, mult));
    }
    out.sort_by(f64::total_cmp);
    Ok((v, out))
}

/// `N(r)` from zero moduli: `sum ln(r/|z_j|) + n(0) ln r` over `|z_j| <= r`.
pub fn step_counting(order0: usize, moduli: &[f64], r: f64) -> f64 {
    order0 as f64 * r.ln() + moduli.iter().filter(|&&m| m <= r).map(|m| (r / m).ln()).sum::<f64>()
}

/// Bracket for `N(r)` from nondecreasing counts `n(t_i)` on an increasing
/// grid `t_0 < ... < t_M = r` with `n(t) = n(0)` on `[0, t_0]`.
pub fn bracket_counting(order0: i64, grid: &[(f64, i64)]) -> (f64, f64) {
    let r = grid.last().map_or(1.0, |g| g.0);
    let base = order0 as f64 * r.ln();
    let (mut lo, mut hi) = (base, base);
    for w in grid.windows(2) {
        let l = (w[1].0 / w[0].0).ln();
        lo += (w[0].1 - order0) as f64 * l;
        hi += (w[1].1 - order0) as f64 * l;
    }
    (lo, hi)
}

/// Both routes to the counting function of one entire function.
#[derive(Clone, Debug, Serialize)]
pub struct CountingN {
    /// Circle mean of `ln|g|` minus `ln|c|` (Jensen).
    pub jensen: f64,
    pub jensen_err: f64,
    /// Step-structure route as an interval (a point for polynomials).
    pub step: (f64, f64),
    pub n_r: ZeroCount,
    /// Jensen value within the step interval widened by `10 tol`.
    pub agree: bool,
}

/// Counting function of `g` at `r` through Jensen's formula and through the
/// step structure of `n(t)`: exact root moduli for polynomials, otherwise a
/// monotone bracket on `grid` log-spaced radii.
pub fn counting_n(g: &dyn EntireFunction, r: f64, spec: &QuadratureSpec, prec: u32, grid: usize) -> Result<CountingN> {
    if g.is_identically_zero() {
        return Err(Error::Degenerate("counting function of the zero function".into()));
    }
    let vo = vanishing_order_at_origin(g)?;
    let means = circle_means(spec, |t| Ok(vec![eval_scaled(g, Complex64::from_polar(r, t), prec)?.ln_abs()]))?;
    let jensen = means.values[0] - vo.ln_abs_leading();
    let (step, n_r) = match g.as_polynomial() {
        Some(p) => {
            let (v, moduli) = polynomial_zero_moduli(p)?;
            let n = v as i64 + moduli.iter().filter(|&&m| m <= r).count() as i64;
            let s = step_counting(v, &moduli, r);
            ((s, s), ZeroCount { count: n, certified: true })
        }
        None => {
            let pts = log_grid_counts(g, vo.order as i64, r, grid, prec)?;
            let last = *pts.last().unwrap();
            let certified = pts.iter().all(|p| p.2);
            let grid: Vec<(f64, i64)> = pts.iter().map(|p| (p.0, p.1)).collect();
            (bracket_counting(vo.order as i64, &grid), ZeroCount { count: last.1, certified })
        }
    };
    let slack = 10.0 * spec.tol;
    let agree = jensen >= step.0 - slack && jensen <= step.1 + slack;
    Ok(CountingN { jensen, jensen_err: means.errors[0], step, n_r, agree })
}

/// Counts on a log grid ending at `r`, starting below the smallest nonzero zero.
fn log_grid_counts(g: &dyn EntireFunction, order0: i64, r: f64, m: usize, prec: u32) -> Result<Vec<(f64, i64, bool)>> {
    let mut t0 = r / 64.0;
    let mut first = count_zeros(g, t0, prec)?;
    let mut tries = 0;
    while first.count > order0 {
        t0 /= 8.0;
        first = count_zeros(g, t0, prec)?;
        tries += 1;
        if tries > 20 {
            return Err(Error::Uncertified("no zero-free disc found around the origin".into()));
        }
    }
    let m = m.max(2);
    let ratio = (r / t0).ln();
    let mut pts = vec![(t0, first.count, first.certified)];
    for i in 1..=m {
        let t = if i == m { r } else { t0 * (ratio * i as f64 / m as f64).exp() };
        let c = count_zeros(g, t, prec)?;
        pts.push((t, c.count, c.certified));
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entire::ExpPolynomialFn;
    use crate::exact::GaussRational;

    #[test]
    fn counts_simple_polynomial() {
        let p = PolynomialFn::from_ints(&[-1, 0, 1]);
        assert_eq!(count_zeros(&p, 2.0, 20).unwrap(), ZeroCount { count: 2, certified: true });
        assert_eq!(count_zeros(&p, 0.5, 20).unwrap().count, 0);
    }

    #[test]
    fn counting_function_examples() {
        let spec = QuadratureSpec::default();
        let z = PolynomialFn::from_ints(&[0, 1]);
        let c = counting_n(&z, std::f64::consts::E, &spec, 20, 8).unwrap();
        assert!((c.step.0 - 1.0).abs() < 1e-15);
        assert!((c.jensen - 1.0).abs() < 1e-9);
        assert!(c.agree);

        let p = PolynomialFn::from_ints(&[-1, 0, 1]);
        let c = counting_n(&p, 2.0, &spec, 20, 8).unwrap();
        assert!((c.step.0 - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert!(c.agree);

        let e = ExpPolynomialFn::exp(GaussRational::one());
        let c = counting_n(&e, 3.0, &spec, 20, 4).unwrap();
        assert_eq!(c.step, (0.0, 0.0));
        assert!(c.jensen.abs() < 1e-9);
    }

    #[test]
    fn bracket_for_exponential_polynomial() {
        // e^z - 1 has zeros 2 pi i k; N(r) = sum over |2 pi k| <= r of ln(r / 2 pi |k|) + ln r
        let g = ExpPolynomialFn::new(vec![
            (PolynomialFn::from_ints(&[1]), GaussRational::one()),
            (PolynomialFn::from_ints(&[-1]), GaussRational::zero()),
        ])
        .unwrap();
        let r: f64 = 20.0;
        let exact = r.ln() + 2.0 * (1..=3).map(|k| (r / (TAU * k as f64)).ln()).sum::<f64>();
        let c = counting_n(&g, r, &QuadratureSpec::default(), 20, 24).unwrap();
        assert_eq!(c.n_r.count, 7);
        assert!((c.jensen - exact).abs() < 1e-8, "{} vs {exact}", c.jensen);
        assert!(c.step.0 <= exact && exact <= c.step.1);
        assert!(c.agree);
    }

    #[test]
    fn winding_detects_near_zero() {
        let z0 = Complex64::new(1.0 + 1e-5, 0.0);
        let w = track_winding(64, 40, |t| Ok(vec![Scaled::from_c64(Complex64::from_polar(1.0, t) - z0)])).unwrap();
        assert_eq!(w.counts[0], 0);
        assert!(w.certified);
        assert!(w.min_step[0] < 1e-3);
    }
}
