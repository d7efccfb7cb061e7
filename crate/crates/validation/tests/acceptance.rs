//! End-to-end acceptance run. Prints one `PASS`/`FAIL` line per criterion
//! and exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Rational;

use valdist::checks::{first_main_theorem_spread, run_all, CheckConfig};
use valdist::indicator::{airy_model, certify, exp123_model};
use valdist::nevanlinna::{analyze, fit_slope, wronskian_constancy, AnalysisConfig, RadialGrid, ValueDistReport};
use valdist::scenario::{builtin_scenario, coordinate_planes, staircase_curve, Scenario, DEFAULT_SEED};

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

fn run_scenario(name: &str) -> (Scenario, ValueDistReport) {
    let t0 = Instant::now();
    let sc = builtin_scenario(name, DEFAULT_SEED).unwrap();
    let rep = analyze(&sc.curve, &sc.planes, &sc.grid, &AnalysisConfig::default()).unwrap();
    eprintln!("  [{name}: {} radii in {:.1}s]", rep.rows.len(), t0.elapsed().as_secs_f64());
    (sc, rep)
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn criterion1() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let planes = coordinate_planes(2).unwrap();
    let grid = RadialGrid::log_spaced(1e2, 1e4, 8).unwrap();
    let cfg = AnalysisConfig::default();
    let mut bad = Vec::new();
    let mut worst = [0f64; 4];
    for i in 0..20 {
        let (curve, ks) = staircase_curve(&mut rng).unwrap();
        let rep = analyze(&curve, &planes, &grid, &cfg).unwrap();
        let rows: Vec<_> = rep.certified_rows().collect();
        if rows.len() < 3 {
            bad.push(format!("curve {i} {ks:?}: {} certified rows", rows.len()));
            continue;
        }
        let x: Vec<f64> = rows.iter().map(|r| r.r.ln()).collect();
        let col = |f: &dyn Fn(&valdist::nevanlinna::RadiusRow) -> f64| fit_slope(&x, &rows.iter().map(|r| f(r)).collect::<Vec<_>>());
        let k = ks[2] as f64;
        let t = col(&|r| r.t);
        let m1 = col(&|r| r.mk[0]);
        let m2 = col(&|r| r.mk[1]);
        let n1 = col(&|r| r.n1);
        let s = col(&|r| r.mk.iter().sum::<f64>() + r.n1 - 3.0 * r.t);
        let want_n1 = (ks.iter().sum::<usize>() as f64 - 3.0).max(0.0);
        let errs = [
            (t - k).abs() / k,
            (m1 - (k - ks[0] as f64)).abs().max((m2 - (k - ks[1] as f64)).abs()) / k,
            (n1 - want_n1).abs() / k,
            (s + 3.0).abs() / 3.0,
        ];
        for (w, e) in worst.iter_mut().zip(errs) {
            *w = w.max(e);
        }
        if errs[0] > 0.01 || errs[1] > 0.02 || errs[2] > 0.02 || errs[3] > 0.05 {
            bad.push(format!("curve {i} {ks:?}: T {t:.4}, m {m1:.4}/{m2:.4}, N1 {n1:.4}, S {s:.4}"));
        }
    }
    let detail = format!(
        "20 curves; worst relative errors T {:.2e}, m_j {:.2e}, N1 {:.2e}, sum {:.2e}{}",
        worst[0],
        worst[1],
        worst[2],
        worst[3],
        if bad.is_empty() { String::new() } else { format!("; {}", bad.join("; ")) }
    );
    Verdict::new(bad.is_empty(), detail)
}

fn criterion2() -> Verdict {
    let c = certify(&airy_model()).unwrap();
    let mk: Vec<String> = c.mk.iter().map(|m| m.to_string()).collect();
    let adm = c.admissible_max.as_ref().map(|(s, _)| s.to_string()).unwrap_or_default();
    let ok = c.t.to_string() == "2/pi"
        && mk == ["4/pi", "2/pi"]
        && c.n1.is_zero()
        && c.lemma2_passed()
        && c.theorem2_residual.is_zero()
        && adm == "32/3";
    Verdict::new(
        ok,
        format!(
            "T {}, m_k {mk:?}, N1 {}, lemma2 {}, theorem2 residual {}, admissible max {adm}",
            c.t,
            c.n1,
            c.lemma2_passed(),
            c.theorem2_residual
        ),
    )
}

fn criterion3(sc: &Scenario, rep: &ValueDistReport) -> Verdict {
    let target = 2.0 / PI;
    let rows: Vec<_> = rep.certified_rows().filter(|r| r.r <= 30.0 + 1e-9).collect();
    let radii: Vec<f64> = rows.iter().map(|r| r.r_requested).collect();
    if radii != [10.0, 15.0, 20.0, 25.0, 30.0] {
        return Verdict::new(false, format!("certified radii up to 30: {radii:?}"));
    }
    let digits_ok = rows.iter().all(|r| r.digits >= 60);
    let ratio: Vec<f64> = rows.iter().map(|r| r.t / r.r.powf(1.5)).collect();
    let dev: Vec<f64> = ratio.iter().map(|q| (q - target).abs() / target).collect();
    let band = dev[4] <= 0.10;
    let trend = dev.windows(2).all(|w| w[1] < w[0]);
    let n1_zero = rows.iter().all(|r| r.n1_count == 0 && r.n1.abs() < 1e-9);
    let w = wronskian_constancy(&sc.curve, 30.0, 60, 16).unwrap();
    let w_ok = w <= 1e-30;
    Verdict::new(
        digits_ok && band && trend && n1_zero && w_ok,
        format!(
            "T/r^1.5 = {:?}; deviation from 2/pi at r=30 {:.1}% (band {band}), decreasing {trend}; N1 = 0 {n1_zero}; \
             Wronskian relative deviation {w:.1e}; digits >= 60 {digits_ok}",
            ratio.iter().map(|q| (q * 1e4).round() / 1e4).collect::<Vec<_>>(),
            dev[4] * 100.0
        ),
    )
}

fn theorem1_ratios(rep: &ValueDistReport) -> Vec<f64> {
    rep.certified_rows().filter_map(|r| r.s_thm1.map(|s| -s / r.t)).collect()
}

fn criterion4(reps: &[(&str, &ValueDistReport)]) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, rep) in reps {
        let q = theorem1_ratios(rep);
        let k = q.len();
        let good = k >= 3 && q[k - 1] <= 0.05 && !(q[k - 3] < q[k - 2] && q[k - 2] < q[k - 1] && q[k - 1] > 0.0);
        ok &= rep.complete && good;
        parts.push(format!("{name}: top three {:?}", q.iter().skip(k.saturating_sub(3)).map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>()));
    }
    Verdict::new(ok, parts.join("; "))
}

fn criterion5(sc: &Scenario, rep: &ValueDistReport) -> Verdict {
    let q = sc.planes.len();
    let mut worst = (0.0f64, String::new(), 0.0);
    let mut systems = 0;
    for mask in 1u32..(1 << q) {
        let idx: Vec<usize> = (0..q).filter(|i| mask >> i & 1 == 1).collect();
        let Ok(sub) = sc.planes.subsystem(&idx) else { continue };
        if !sub.is_admissible() {
            continue;
        }
        systems += 1;
        for row in rep.certified_rows() {
            let s = idx.iter().map(|&i| row.m[i]).sum::<f64>() / row.t;
            if s > worst.0 {
                let names: Vec<&str> = idx.iter().map(|&i| rep.planes[i].as_str()).collect();
                worst = (s, names.join("+"), row.r);
            }
        }
    }
    let c = certify(&airy_model()).unwrap();
    let exact = c.cartan_ratio();
    let exact_ok = exact.as_ref() == Some(&Rational::from((8, 3)));
    let bound = 8.0 / 3.0 + 0.1;
    Verdict::new(
        worst.0 <= bound && exact_ok && systems > 0,
        format!(
            "{systems} admissible systems; max sum m/T = {:.4} ({} at r = {}); exact sharp constant {}",
            worst.0,
            worst.1,
            worst.2,
            exact.map(|r| r.to_string()).unwrap_or_else(|| "none".into())
        ),
    )
}

fn criterion6(reps: &[(&str, &ValueDistReport)]) -> Verdict {
    let cfg = CheckConfig::default();
    let suites = run_all(&cfg).unwrap();
    let mut ok = suites.iter().all(|s| s.passed);
    let mut parts: Vec<String> = suites.iter().map(|s| format!("{} {}", s.name, if s.passed { "pass" } else { "FAIL" })).collect();
    for (name, rep) in reps {
        let spreads: Vec<f64> = first_main_theorem_spread(rep).into_iter().map(|(_, s)| s).collect();
        let spread = spreads.iter().copied().fold(0.0, f64::max);
        ok &= spreads.iter().all(|s| *s <= 10.0 * rep.tol);
        let width = rep
            .certified_rows()
            .flat_map(|r| r.n_step.iter().map(|b| b.1 - b.0))
            .fold(0.0, f64::max);
        parts.push(format!("{name} first-main-theorem spread {spread:.1e} (widest N bracket {width:.1e})"));
    }
    Verdict::new(ok, format!("{} points, {} instances: {}", cfg.points, cfg.instances, parts.join(", ")))
}

fn criterion7(rep: &ValueDistReport) -> Verdict {
    let Some(row) = rep.certified_rows().find(|r| r.r_requested == 50.0) else {
        return Verdict::new(false, "r = 50 is not certified");
    };
    let d1 = row.mk[0] / row.t;
    let d2 = row.mk[1] / row.t;
    let c = certify(&exp123_model()).unwrap();
    let defects = c.defects().unwrap_or_default();
    let exact_ok = defects == [Rational::from(2), Rational::from(1)];
    Verdict::new(
        within(d1, 2.0, 0.1) && within(d2, 1.0, 0.05) && exact_ok,
        format!(
            "r = 50: m1/T = {d1:.4}, m2/T = {d2:.4}; exact defects {:?}",
            defects.iter().map(|d| d.to_string()).collect::<Vec<_>>()
        ),
    )
}

fn main() {
    let mut verdicts: Vec<(usize, &str, Verdict)> = Vec::new();
    verdicts.push((1, "polynomial ledger", criterion1()));
    verdicts.push((2, "Airy exact asymptotics", criterion2()));

    let (airy, airy_rep) = run_scenario("airy");
    let (_, exp_rep) = run_scenario("exp123");
    let (_, poly_rep) = run_scenario("poly-staircase");
    let reps = [("poly-staircase", &poly_rep), ("airy", &airy_rep), ("exp123", &exp_rep)];

    verdicts.push((3, "Airy finite-radius consistency", criterion3(&airy, &airy_rep)));
    verdicts.push((4, "Theorem 1 inequality", criterion4(&reps)));
    verdicts.push((5, "Cartan bound non-reversibility", criterion5(&airy, &airy_rep)));
    verdicts.push((6, "property suites", criterion6(&reps)));
    verdicts.push((7, "exponential curve defects", criterion7(&exp_rep)));

    verdicts.sort_by_key(|v| v.0);
    let mut failed = 0;
    for (i, name, v) in &verdicts {
        println!("criterion {i} {:<34} {}  {}", name, if v.passed { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.passed);
    }
    println!("acceptance: {} passed, {failed} failed", verdicts.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
