//! Invariants of the finite-radius functions on random polynomial curves,
//! with roots from nalgebra as the independent reference.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use valdist::entire::{EntireFn, HoloCurve, PolynomialFn};
use valdist::exact::GaussRational;
use valdist::nevanlinna::{characteristic_t, counting_n, proximity_m};
use valdist::projgeo::Hyperplane;
use valdist::quadrature::QuadratureSpec;

fn roots(c: &[i64]) -> Vec<Complex64> {
    let d = c.iter().rposition(|x| *x != 0).unwrap();
    let lead = c[d] as f64;
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        m[(i, d - 1)] = -(c[i] as f64) / lead;
    }
    m.complex_eigenvalues().iter().copied().collect()
}

/// `N(r)` of a polynomial with `c_0 != 0`, summed over its roots.
fn n_from_roots(c: &[i64], r: f64) -> f64 {
    roots(c).iter().map(|z| z.norm()).filter(|m| *m < r).map(|m| (r / m).ln()).sum()
}

fn curve(cs: &[Vec<i64>]) -> HoloCurve {
    let comps: Vec<EntireFn> = cs.iter().map(|c| Arc::new(PolynomialFn::from_ints(c)) as EntireFn).collect();
    HoloCurve::new(comps, None).unwrap()
}

fn combination(cs: &[Vec<i64>], alpha: &[i64]) -> Vec<i64> {
    let len = cs.iter().map(Vec::len).max().unwrap();
    (0..len).map(|i| cs.iter().zip(alpha).map(|(c, a)| a * c.get(i).copied().unwrap_or(0)).sum()).collect()
}

fn components() -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-6i64..=6, 1..=5), 3)
        .prop_filter("nonzero at 0", |cs| cs.iter().all(|c| c[0] != 0))
        .prop_filter("independent", |cs| {
            let comps: Vec<EntireFn> = cs.iter().map(|c| Arc::new(PolynomialFn::from_ints(c)) as EntireFn).collect();
            HoloCurve::new(comps, None).is_ok()
        })
}

fn spec() -> QuadratureSpec {
    QuadratureSpec { tol: 1e-10, ..QuadratureSpec::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // m(r,a) + N(r,a) - T(r) = ln||alpha|| + ln||f(0)|| - ln|g_a(0)|
    #[test]
    fn first_main_theorem(cs in components(), alpha in prop::collection::vec(-3i64..=3, 3), r in 0.3f64..12.0) {
        let g = combination(&cs, &alpha);
        prop_assume!(g[0] != 0);
        prop_assume!(roots(&g).iter().all(|z| (z.norm() - r).abs() > 0.02 * r));
        let f = curve(&cs);
        let a = Hyperplane::from_exact("a", alpha.iter().map(|&x| GaussRational::from_int(x)).collect(), true).unwrap();
        let m = proximity_m(&f, &a, r, &spec(), 30).unwrap().value;
        let t = characteristic_t(&f, r, &spec(), 30).unwrap().value;
        let norm_a = alpha.iter().map(|x| (x * x) as f64).sum::<f64>().sqrt();
        let norm_f0 = cs.iter().map(|c| (c[0] * c[0]) as f64).sum::<f64>().sqrt();
        let want = norm_a.ln() + norm_f0.ln() - (g[0] as f64).abs().ln();
        let got = m + n_from_roots(&g, r) - t;
        prop_assert!((got - want).abs() < 1e-7, "got {got}, want {want}");
    }

    #[test]
    fn jensen_matches_roots(c in prop::collection::vec(-9i64..=9, 2..=9), r in 0.3f64..8.0) {
        prop_assume!(c[0] != 0 && *c.last().unwrap() != 0);
        prop_assume!(roots(&c).iter().all(|z| (z.norm() - r).abs() > 0.02 * r));
        let n = counting_n(&PolynomialFn::from_ints(&c), r, &spec(), 30, 8).unwrap();
        let want = n_from_roots(&c, r);
        prop_assert!((n.jensen - want).abs() < 1e-7, "jensen {} vs {want}", n.jensen);
        prop_assert!(n.step.0 <= want + 1e-9 && want - 1e-9 <= n.step.1);
        prop_assert!(n.agree);
    }

    #[test]
    fn characteristic_nondecreasing(cs in components(), r in 0.2f64..20.0, factor in 1.05f64..4.0) {
        let f = curve(&cs);
        let t1 = characteristic_t(&f, r, &spec(), 30).unwrap().value;
        let t2 = characteristic_t(&f, r * factor, &spec(), 30).unwrap().value;
        prop_assert!(t1 >= -1e-9);
        prop_assert!(t2 >= t1 - 1e-9, "T({r}) = {t1}, T({}) = {t2}", r * factor);
    }

    #[test]
    fn proximity_nonnegative(cs in components(), alpha in prop::collection::vec(-3i64..=3, 3), r in 0.3f64..12.0) {
        let g = combination(&cs, &alpha);
        prop_assume!(g.iter().any(|x| *x != 0));
        prop_assume!(g.iter().rposition(|x| *x != 0).unwrap() == 0 || roots(&g).iter().all(|z| (z.norm() - r).abs() > 0.02 * r));
        let f = curve(&cs);
        let a = Hyperplane::from_exact("a", alpha.iter().map(|&x| GaussRational::from_int(x)).collect(), true).unwrap();
        let m = proximity_m(&f, &a, r, &spec(), 30).unwrap().value;
        prop_assert!(m >= -1e-9);
    }
}
