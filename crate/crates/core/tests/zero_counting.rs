//! Winding-number zero counts against companion-matrix eigenvalues and
//! closed-form zero sets.

use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use valdist::entire::{EntireFunction, ExpPolynomialFn, PolynomialFn};
use valdist::exact::GaussRational;
use valdist::nevanlinna::count_zeros;

/// Root moduli of `c_0 + c_1 z + ... + c_d z^d` from the companion matrix.
fn root_moduli(c: &[i64]) -> Vec<f64> {
    let d = c.len() - 1;
    let lead = c[d] as f64;
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        m[(i, d - 1)] = -(c[i] as f64) / lead;
    }
    m.complex_eigenvalues().iter().map(|z| z.norm()).collect()
}

fn random_coeffs(rng: &mut impl Rng, d: usize) -> Vec<i64> {
    let mut c: Vec<i64> = (0..=d).map(|_| rng.gen_range(-9..=9)).collect();
    while c[d] == 0 {
        c[d] = rng.gen_range(-9..=9);
    }
    c
}

#[test]
fn degree_eight_at_radius_three() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    while checked < 10 {
        let c = random_coeffs(&mut rng, 8);
        let moduli = root_moduli(&c);
        if moduli.iter().any(|m| (m - 3.0).abs() < 0.03) {
            continue;
        }
        let want = moduli.iter().filter(|m| **m < 3.0).count() as i64;
        let got = count_zeros(&PolynomialFn::from_ints(&c), 3.0, 30).unwrap();
        assert!(got.certified);
        assert_eq!(got.count, want, "{c:?}");
        checked += 1;
    }
}

#[test]
fn exp_minus_one() {
    // zeros 2 pi i k
    let f = ExpPolynomialFn::new(vec![
        (PolynomialFn::from_ints(&[1]), GaussRational::from_int(1)),
        (PolynomialFn::from_ints(&[-1]), GaussRational::from_int(0)),
    ])
    .unwrap();
    let f: Arc<dyn EntireFunction> = Arc::new(f);
    for r in [1.0, 7.0, 20.0, 40.0] {
        let want = 2 * (r / std::f64::consts::TAU).floor() as i64 + 1;
        let got = count_zeros(f.as_ref(), r, 30).unwrap();
        assert_eq!(got.count, want, "r = {r}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn counts_match_eigenvalues(c in prop::collection::vec(-20i64..=20, 2..=12), r in 0.2f64..6.0) {
        prop_assume!(*c.last().unwrap() != 0);
        let moduli = root_moduli(&c);
        prop_assume!(moduli.iter().all(|m| (m - r).abs() > 0.01 * r));
        let want = moduli.iter().filter(|m| **m < r).count() as i64;
        let got = count_zeros(&PolynomialFn::from_ints(&c), r, 30).unwrap();
        prop_assert_eq!(got.count, want);
    }
}
