//! Builtin curves with their hyperplane systems and radial grids.
//!
//! * `poly-staircase`: three random polynomials of degrees `k0 < k1 < k2 <= 6`
//!   against the coordinate hyperplanes of `P^2`.
//! * `airy`: the identity frame of `w''' - z w' - w = 0` against the six
//!   dual hyperplanes whose intersection functions are the rotated Airy
//!   functions `H_j` and Scorer-type solutions `G_j`.
//! * `exp123`: `(1 : e^z : e^{2z})` against the coordinate hyperplanes.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::float::Constant;
use rug::{Complex, Float, Rational};

use crate::entire::{EntireFn, ExpPolynomialFn, HoloCurve, OdeEquation, OdeSolutionFn, PolynomialFn, Reducedness};
use crate::error::{Error, Result};
use crate::exact::GaussRational;
use crate::indicator::{airy_model, exp123_model, IndicatorModel};
use crate::nevanlinna::RadialGrid;
use crate::projgeo::{Hyperplane, HyperplaneSystem, HYPERPLANE_BITS};

pub const SCENARIOS: [&str; 3] = ["poly-staircase", "airy", "exp123"];

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub curve: HoloCurve,
    pub planes: HyperplaneSystem,
    pub grid: RadialGrid,
    /// Exact indicator data for the curve's family, when known.
    pub model: Option<IndicatorModel>,
    /// Component degrees of a polynomial curve.
    pub degrees: Option<Vec<usize>>,
}

pub fn builtin_scenario(name: &str, seed: u64) -> Result<Scenario> {
    match name {
        "poly-staircase" => staircase_scenario(&mut ChaCha8Rng::seed_from_u64(seed)),
        "airy" => airy_scenario(),
        "exp123" => exp123_scenario(),
        other => Err(Error::Invalid(format!("unknown scenario {other}; expected one of {}", SCENARIOS.join(", ")))),
    }
}

/// Coordinate hyperplanes `x_0, ..., x_n` of `P^n`.
pub fn coordinate_planes(n: usize) -> Result<HyperplaneSystem> {
    let planes = (0..=n)
        .map(|i| {
            let alpha = (0..=n).map(|j| GaussRational::from_int((i == j) as i64)).collect();
            Hyperplane::from_exact(format!("x{i}"), alpha, false)
        })
        .collect::<Result<Vec<_>>>()?;
    HyperplaneSystem::new(n, planes)
}

/// Random integer polynomial of exact degree `k` with coefficients in
/// `[-5, 5]` and nonzero leading and constant terms.
pub fn random_polynomial<R: Rng>(rng: &mut R, k: usize) -> PolynomialFn {
    let mut c: Vec<i64> = (0..=k).map(|_| rng.gen_range(-5..=5)).collect();
    for i in [0, k] {
        while c[i] == 0 {
            c[i] = rng.gen_range(-5..=5);
        }
    }
    PolynomialFn::from_ints(&c)
}

/// Polynomial curve in `P^2` with strictly increasing degrees; redrawn
/// until the components have no common zero.
pub fn staircase_curve<R: Rng>(rng: &mut R) -> Result<(HoloCurve, Vec<usize>)> {
    for _ in 0..100 {
        let mut ks: Vec<usize> = Vec::new();
        while ks.len() < 3 {
            let k = rng.gen_range(0..=6);
            if !ks.contains(&k) {
                ks.push(k);
            }
        }
        ks.sort_unstable();
        let comps: Vec<EntireFn> = ks.iter().map(|&k| Arc::new(random_polynomial(rng, k)) as EntireFn).collect();
        match HoloCurve::new(comps, Some(Rational::from(0))) {
            Ok(c) if c.reducedness() == Reducedness::Exact => return Ok((c, ks)),
            _ => continue,
        }
    }
    Err(Error::Invalid("no reduced staircase curve in 100 draws".into()))
}

fn staircase_scenario<R: Rng>(rng: &mut R) -> Result<Scenario> {
    let (curve, ks) = staircase_curve(rng)?;
    Ok(Scenario {
        name: "poly-staircase".into(),
        curve,
        planes: coordinate_planes(2)?,
        grid: RadialGrid::log_spaced(1e2, 1e4, 8)?,
        model: None,
        degrees: Some(ks),
    })
}

/// Solutions of `w''' - z w' - w = 0` with initial vectors `e_0, e_1, e_2`.
pub fn airy_curve() -> Result<HoloCurve> {
    let eq = Arc::new(OdeEquation::de3());
    let comps = (0..3)
        .map(|j| {
            let init = (0..3).map(|k| GaussRational::from_int((j == k) as i64)).collect();
            Ok(Arc::new(OdeSolutionFn::new(eq.clone(), init)?) as EntireFn)
        })
        .collect::<Result<Vec<_>>>()?;
    HoloCurve::new(comps, Some(Rational::from((3, 2))))
}

/// `(Ai(0), Ai'(0), pi Gi(0), pi Gi'(0))` at `bits`.
pub fn airy_initial_values(bits: u32) -> [Float; 4] {
    let third = Float::with_val(bits, 1) / 3u32;
    let g13 = third.clone().gamma();
    let g23 = Float::with_val(bits, 2u32 * &third).gamma();
    let ln3 = Float::with_val(bits, 3u32).ln();
    let pow = |e: i32, d: u32| (Float::with_val(bits, &ln3 * e) / d).exp();
    let pi = Float::with_val(bits, Constant::Pi);
    let ai = Float::with_val(bits, pow(-2, 3) / &g23);
    let aip = Float::with_val(bits, -pow(-1, 3) / &g13);
    let gi = Float::with_val(bits, pow(-1, 6) / &g23) / 3u32 * &pi;
    let gip = Float::with_val(bits, pow(1, 6) / &g13) / 3u32 * &pi;
    [ai, aip, gi, gip]
}

/// The six dual hyperplanes `H0, H1, H2, G0, G1, G2`. On the identity frame
/// `g_a` is the solution with initial data `alpha`; `H_j(z)` and `G_j(z)`
/// are `H_0(lambda z)` and `G_0(lambda z)` with `lambda = e^{-2 pi i j/3}`,
/// `H_j` scaled by `lambda` so that `H0 + H1 + H2 = 0`. Their indicators
/// are the catalogue entries of the same names.
pub fn airy_duals() -> Result<Vec<Hyperplane>> {
    let bits = HYPERPLANE_BITS;
    let [ai, aip, gi, gip] = airy_initial_values(bits);
    let pi = Float::with_val(bits, Constant::Pi);
    let lambda = |j: u32| {
        let t = Float::with_val(bits, -2 * j as i32) * &pi / 3u32;
        Complex::with_val(bits, (t.clone().cos(), t.sin()))
    };
    let mut out = Vec::with_capacity(6);
    for j in 0..3u32 {
        let l = lambda(j);
        let l2 = Complex::with_val(bits, &l * &l);
        // lambda Ai(lambda z): data (lambda Ai(0), lambda^2 Ai'(0), 0)
        let alpha = vec![Complex::with_val(bits, &l * &ai), Complex::with_val(bits, &l2 * &aip), Complex::new(bits)];
        out.push(Hyperplane::from_complex(format!("H{j}"), alpha, true)?);
    }
    for j in 0..3u32 {
        let l = lambda(j);
        let l2 = Complex::with_val(bits, &l * &l);
        let alpha = vec![Complex::with_val(bits, (&gi, 0)), Complex::with_val(bits, &l * &gip), -l2];
        out.push(Hyperplane::from_complex(format!("G{j}"), alpha, true)?);
    }
    Ok(out)
}

pub fn airy_scenario() -> Result<Scenario> {
    Ok(Scenario {
        name: "airy".into(),
        curve: airy_curve()?,
        planes: HyperplaneSystem::new(2, airy_duals()?)?,
        grid: RadialGrid::from_radii(vec![10.0, 15.0, 20.0, 25.0, 30.0, 40.0, 50.0])?.with_min_digits(60),
        model: Some(airy_model()),
        degrees: None,
    })
}

pub fn exp123_curve() -> Result<HoloCurve> {
    let comps: Vec<EntireFn> = (0..3).map(|k| Arc::new(ExpPolynomialFn::exp(GaussRational::from_int(k))) as EntireFn).collect();
    HoloCurve::new(comps, Some(Rational::from(1)))
}

pub fn exp123_scenario() -> Result<Scenario> {
    Ok(Scenario {
        name: "exp123".into(),
        curve: exp123_curve()?,
        planes: coordinate_planes(2)?,
        grid: RadialGrid::from_radii(vec![5.0, 10.0, 20.0, 30.0, 40.0, 50.0, 65.0, 80.0])?,
        model: Some(exp123_model()),
        degrees: None,
    })
}
