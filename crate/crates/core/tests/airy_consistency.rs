//! Finite-radius Airy values against the exact certificate, with the 2/3
//! amplitude of |Ai| restored (|Ai(z)| ~ exp(-(2/3) Re z^{3/2})).

use rug::Rational;

use valdist::indicator::{airy_model, certify};
use valdist::nevanlinna::{characteristic_t, proximity_m};
use valdist::quadrature::QuadratureSpec;
use valdist::scenario::{airy_curve, airy_duals};

#[test]
fn characteristic_and_proximities_approach_scaled_certificate() {
    let c = certify(&airy_model()).unwrap();
    let amp = Rational::from((2, 3));
    let t_lim = valdist::indicator::PiCoefficient(c.t.0.scale(&amp)).to_f64();
    let m_lim = |name: &str| c.m.iter().find(|(n, _)| n == name).unwrap().1.to_f64() / c.t.to_f64();

    let f = airy_curve().unwrap();
    let duals = airy_duals().unwrap();
    let q = QuadratureSpec::default();
    let mut dev = Vec::new();
    for r in [10.0, 20.0, 30.0] {
        let t = characteristic_t(&f, r, &q, 60).unwrap().value;
        let h = proximity_m(&f, &duals[0], r, &q, 60).unwrap().value;
        let g = proximity_m(&f, &duals[3], r, &q, 60).unwrap().value;
        dev.push(((t / r.powf(1.5) - t_lim).abs() / t_lim, (h / t - m_lim("H0")).abs(), (g / t - m_lim("G0")).abs()));
    }
    for w in dev.windows(2) {
        assert!(w[1].0 < w[0].0 && w[1].1 < w[0].1 && w[1].2 < w[0].2, "{dev:?}");
    }
    let top = dev[2];
    assert!(top.0 < 0.02 && top.1 < 0.03 && top.2 < 0.03, "{dev:?}");
}
