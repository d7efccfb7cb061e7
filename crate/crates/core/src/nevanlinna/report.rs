use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::counting::{bracket_counting, polynomial_zero_moduli, step_counting, track_winding, winding_base};
use super::{fit_slope, AnalysisConfig, CurveSampler, RadialGrid};
use crate::entire::{vanishing_order_at_origin, EntireFn, EntireFunction, HoloCurve, LinearCombination, PolynomialFn, Reducedness};
use crate::error::{Error, Result};
use crate::projgeo::{FlatLattice, HyperplaneSystem};
use crate::quadrature::circle_means;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// One radius of a [`ValueDistReport`]. All values are in nats.
#[derive(Clone, Debug, Serialize)]
pub struct RadiusRow {
    pub r: f64,
    pub r_requested: f64,
    pub digits: u32,
    pub t: f64,
    /// `m(r, a)` per hyperplane.
    pub m: Vec<f64>,
    /// `m_k(r)` for `k = 1..n` (empty for incomplete systems).
    pub mk: Vec<f64>,
    /// `n(r, a)` per hyperplane.
    pub n_count: Vec<i64>,
    /// `N(r, a)` by Jensen's formula.
    pub n_jensen: Vec<f64>,
    /// `N(r, a)` from the step structure of `n(t)`: a point for polynomials,
    /// otherwise a bracket.
    pub n_step: Vec<(f64, f64)>,
    pub n1: f64,
    pub n1_step: (f64, f64),
    pub n1_count: i64,
    pub s_thm1: Option<f64>,
    pub s_cartan: Option<f64>,
    pub prop_gap: Option<f64>,
    pub quad_err: f64,
    pub evals: usize,
    pub certified: bool,
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValueDistReport {
    pub schema_version: u32,
    pub n: usize,
    pub planes: Vec<String>,
    pub admissible: bool,
    pub complete: bool,
    pub census: Vec<usize>,
    pub order: f64,
    pub reducedness: Reducedness,
    pub wronskian_strategy: String,
    pub tol: f64,
    pub ln_norm_origin: f64,
    pub rows: Vec<RadiusRow>,
    pub invariants: Vec<InvariantCheck>,
}

/// What is known about one intersection function (or the Wronskian).
#[derive(Debug)]
struct FnInfo {
    order0: usize,
    ln_c: f64,
    /// Zero moduli when the function is an exact polynomial.
    poly: Option<Vec<f64>>,
    zero_free: bool,
}

impl FnInfo {
    fn tracked(&self) -> bool {
        self.poly.is_none() && !self.zero_free
    }
}

fn plane_info(curve: &HoloCurve, sys: &HyperplaneSystem, i: usize) -> Result<FnInfo> {
    let h = sys.get(i);
    let comps = curve.components().to_vec();
    let exact_taylor = comps.iter().all(|f| f.taylor_exact(1).is_some());
    let (vo, poly) = match h.exact() {
        Some(alpha) if exact_taylor => {
            let lc = LinearCombination::from_exact(comps.clone(), alpha.to_vec(), 256);
            let mut vo = vanishing_order_at_origin(&lc)?;
            let norm: f64 = alpha.iter().map(|a| a.norm_sqr().to_f64()).sum::<f64>().sqrt();
            vo.leading = rug::Complex::with_val(256, &vo.leading / norm);
            let poly = match comps.iter().map(|f| f.as_polynomial().cloned()).collect::<Option<Vec<PolynomialFn>>>() {
                Some(ps) => {
                    let p = ps.iter().zip(alpha).fold(PolynomialFn::zero(), |acc, (p, a)| acc.add(&p.scale(a)));
                    Some(p)
                }
                None => None,
            };
            (vo, poly)
        }
        _ => {
            let lc = LinearCombination::new(comps.clone(), h.coeffs().to_vec(), None);
            (vanishing_order_at_origin(&lc)?, None)
        }
    };
    let lc = LinearCombination::new(comps, h.coeffs().to_vec(), None);
    let poly = match poly {
        Some(p) => {
            let (v, mut m) = polynomial_zero_moduli(&p)?;
            debug_assert_eq!(v, vo.order);
            m.sort_by(f64::total_cmp);
            Some(m)
        }
        None => None,
    };
    Ok(FnInfo { order0: vo.order, ln_c: vo.ln_abs_leading(), poly, zero_free: lc.is_zero_free() })
}

fn wronskian_info(w: &EntireFn) -> Result<FnInfo> {
    let vo = vanishing_order_at_origin(w.as_ref())?;
    let poly = match w.as_polynomial() {
        Some(p) => Some(polynomial_zero_moduli(p)?.1),
        None => None,
    };
    Ok(FnInfo { order0: vo.order, ln_c: vo.ln_abs_leading(), poly, zero_free: w.is_zero_free() })
}

struct Ctx<'a> {
    curve: &'a HoloCurve,
    sys: &'a HyperplaneSystem,
    lattice: &'a FlatLattice,
    complete: bool,
    admissible: bool,
    planes: Vec<FnInfo>,
    w: FnInfo,
    ln_f0: f64,
    cfg: &'a AnalysisConfig,
}

impl Ctx<'_> {
    /// Indices into the tracking vector: planes first, then the Wronskian.
    fn tracked(&self) -> (Vec<usize>, bool) {
        let p = (0..self.planes.len()).filter(|&i| self.planes[i].tracked()).collect();
        (p, self.w.tracked())
    }
}

struct Placement {
    r: f64,
    counts: Vec<Option<i64>>,
    w_count: Option<i64>,
    flags: Vec<String>,
    certified: bool,
}

fn exact_count(info: &FnInfo, r: f64) -> Option<i64> {
    if info.zero_free {
        return Some(0);
    }
    info.poly.as_ref().map(|m| (info.order0 + m.iter().filter(|&&x| x <= r).count()) as i64)
}

/// Chooses the radius (moving it by at most 1% when a zero lies within
/// `delta r` of the circle) and counts zeros there.
fn place(ctx: &Ctx, sampler: &CurveSampler, r0: f64) -> Result<Placement> {
    let delta = ctx.cfg.quad.delta;
    let h = (2.0 * delta).max(1e-3);
    let mut offsets = vec![0.0];
    if ctx.cfg.nudge {
        let mut j = 1.0;
        while j * h <= 0.01 + 1e-12 {
            offsets.push(j * h);
            offsets.push(-j * h);
            j += 1.0;
        }
    }
    let (tp, tw) = ctx.tracked();
    let mut best: Option<(f64, Placement)> = None;
    for s in offsets {
        let r = r0 * (1.0 + s);
        // relative clearance of exactly known zeros
        let mut clear = f64::INFINITY;
        for info in ctx.planes.iter().chain(std::iter::once(&ctx.w)) {
            if let Some(m) = &info.poly {
                for &x in m {
                    clear = clear.min((x - r).abs() / r);
                }
            }
        }
        let mut counts: Vec<Option<i64>> = ctx.planes.iter().map(|p| exact_count(p, r)).collect();
        let mut w_count = exact_count(&ctx.w, r);
        let mut certified = true;
        let mut flags = Vec::new();
        if !tp.is_empty() || tw {
            let win = track_winding(winding_base(r, ctx.curve.order(), 0), 40, |t| {
                let x = sampler.polar(r, t)?;
                let mut v: Vec<_> = tp.iter().map(|&i| x.g[i]).collect();
                if tw {
                    v.push(x.w.expect("sampler built with the Wronskian"));
                }
                Ok(v)
            })?;
            for (j, &i) in tp.iter().enumerate() {
                counts[i] = Some(win.counts[j]);
            }
            if tw {
                w_count = win.counts.last().copied();
            }
            let step = win.min_step.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            // a zero at relative distance e forces angular steps of about 1.7 e
            clear = clear.min(step / 2.0);
            if !win.certified {
                certified = false;
                flags.push(format!("winding uncertified at r={r}"));
            }
        }
        let ok = clear > delta && certified;
        let p = Placement { r, counts, w_count, flags, certified };
        if ok {
            return Ok(p);
        }
        if best.as_ref().is_none_or(|(c, _)| clear > *c) {
            best = Some((clear, p));
        }
    }
    let (clear, mut p) = best.expect("at least one candidate");
    p.flags.push(format!("zero within {clear:.1e} r of the circle after nudging"));
    p.certified = false;
    Ok(p)
}

fn failed_row(r: f64, digits: u32, q: usize, k: usize, err: Error) -> RadiusRow {
    RadiusRow {
        r,
        r_requested: r,
        digits,
        t: f64::NAN,
        m: vec![f64::NAN; q],
        mk: vec![f64::NAN; k],
        n_count: vec![0; q],
        n_jensen: vec![f64::NAN; q],
        n_step: vec![(f64::NAN, f64::NAN); q],
        n1: f64::NAN,
        n1_step: (f64::NAN, f64::NAN),
        n1_count: 0,
        s_thm1: None,
        s_cartan: None,
        prop_gap: None,
        quad_err: f64::NAN,
        evals: 0,
        certified: false,
        flags: vec![err.to_string()],
    }
}

fn radius_row(ctx: &Ctx, r0: f64, digits: u32) -> Result<RadiusRow> {
    let n = ctx.curve.n();
    let q = ctx.sys.len();
    let sampler = CurveSampler::new(ctx.curve, Some(ctx.sys), true, digits, ctx.cfg.ceiling_digits)?;
    let place = place(ctx, &sampler, r0)?;
    let r = place.r;
    let nk = if ctx.complete { n } else { 0 };
    let lattice = ctx.lattice;
    let means = circle_means(&ctx.cfg.quad, |t| {
        let x = sampler.polar(r, t)?;
        let mut v = Vec::with_capacity(2 + q + nk);
        v.push(x.ln_norm);
        for g in &x.g {
            v.push(x.ln_norm - g.ln_abs());
        }
        for k in 1..=nk {
            v.push(-lattice.ln_d_k_from_values(k, &x.g, x.ln_norm)?);
        }
        v.push(x.w.expect("sampler built with the Wronskian").ln_abs());
        Ok(v)
    })?;
    let v = &means.values;
    let mut flags = place.flags;
    let mut certified = place.certified;
    if !means.converged(ctx.cfg.quad.tol) {
        certified = false;
        let e = means.errors.iter().fold(0.0f64, |a, &b| a.max(b));
        flags.push(format!("quadrature error {e:.2e} above tolerance"));
    }
    let t = v[0] - ctx.ln_f0;
    let m: Vec<f64> = (0..q).map(|i| v[1 + i]).collect();
    let mk: Vec<f64> = (0..nk).map(|k| v[1 + q + k]).collect();
    let n_jensen: Vec<f64> = (0..q).map(|i| v[0] - m[i] - ctx.planes[i].ln_c).collect();
    let n1 = v[1 + q + nk] - ctx.w.ln_c;
    let n_step: Vec<(f64, f64)> = ctx
        .planes
        .iter()
        .map(|p| match (&p.poly, p.zero_free) {
            (_, true) => (0.0, 0.0),
            (Some(mods), _) => {
                let s = step_counting(p.order0, mods, r);
                (s, s)
            }
            _ => (f64::NAN, f64::NAN),
        })
        .collect();
    let n1_step = match (&ctx.w.poly, ctx.w.zero_free) {
        (_, true) => (0.0, 0.0),
        (Some(mods), _) => {
            let s = step_counting(ctx.w.order0, mods, r);
            (s, s)
        }
        _ => (f64::NAN, f64::NAN),
    };
    let sum_mk: f64 = mk.iter().sum();
    let sum_m: f64 = m.iter().sum();
    let n1f = (n + 1) as f64;
    let s_thm1 = ctx.complete.then_some(n1f * t - sum_mk - n1);
    let s_cartan = ctx.admissible.then_some(n1f * t - sum_m - n1);
    let prop_gap = (ctx.admissible && ctx.complete && q > n).then_some(sum_mk - sum_m);
    Ok(RadiusRow {
        r,
        r_requested: r0,
        digits,
        t,
        m,
        mk,
        n_count: place.counts.iter().map(|c| c.unwrap_or(0)).collect(),
        n_jensen,
        n_step,
        n1,
        n1_step,
        n1_count: place.w_count.unwrap_or(0),
        s_thm1,
        s_cartan,
        prop_gap,
        quad_err: means.errors.iter().fold(0.0f64, |a, &b| a.max(b)),
        evals: means.evals,
        certified,
        flags,
    })
}

/// Counts at small radii, starting inside the zero-free punctured disc
/// around the origin, for the bracketed counting route.
fn low_grid(ctx: &Ctx, rmin: f64, digits: u32) -> Result<Vec<(f64, Vec<i64>)>> {
    let (tp, tw) = ctx.tracked();
    if tp.is_empty() && !tw {
        return Ok(Vec::new());
    }
    let sampler = CurveSampler::new(ctx.curve, Some(ctx.sys), tw, digits, ctx.cfg.ceiling_digits)?;
    let orders: Vec<i64> = tp.iter().map(|&i| ctx.planes[i].order0 as i64).chain(tw.then_some(ctx.w.order0 as i64)).collect();
    let count = |t: f64| -> Result<Vec<i64>> {
        let w = track_winding(winding_base(t, ctx.curve.order(), 0), 40, |th| {
            let x = sampler.polar(t, th)?;
            let mut v: Vec<_> = tp.iter().map(|&i| x.g[i]).collect();
            if tw {
                v.push(x.w.expect("requested"));
            }
            Ok(v)
        })?;
        if !w.certified {
            return Err(Error::Uncertified(format!("winding at r={t}")));
        }
        Ok(w.counts)
    };
    let mut t0 = rmin / 64.0;
    let mut c0 = count(t0)?;
    let mut tries = 0;
    while c0.iter().zip(&orders).any(|(c, o)| c > o) {
        t0 /= 8.0;
        c0 = count(t0)?;
        tries += 1;
        if tries > 20 {
            return Err(Error::Uncertified("no zero-free disc around the origin".into()));
        }
    }
    let m = ctx.cfg.count_grid;
    let mut out = vec![(t0, c0)];
    for i in 1..m {
        let t = t0 * ((rmin / t0).ln() * i as f64 / m as f64).exp();
        out.push((t, count(t)?));
    }
    Ok(out)
}

/// Full per-radius analysis of `curve` against `sys`.
pub fn analyze(curve: &HoloCurve, sys: &HyperplaneSystem, grid: &RadialGrid, cfg: &AnalysisConfig) -> Result<ValueDistReport> {
    cfg.quad.validate()?;
    if sys.n() != curve.n() {
        return Err(Error::Invalid(format!("hyperplanes live in P^{}, curve in P^{}", sys.n(), curve.n())));
    }
    if sys.is_empty() {
        return Err(Error::Invalid("empty hyperplane system".into()));
    }
    let lattice = FlatLattice::enumerate(sys)?;
    let planes = (0..sys.len()).map(|i| plane_info(curve, sys, i)).collect::<Result<Vec<_>>>()?;
    for (i, p) in planes.iter().enumerate() {
        let lc = LinearCombination::new(curve.components().to_vec(), sys.get(i).coeffs().to_vec(), sys.get(i).exact().map(<[_]>::to_vec));
        if p.poly.as_ref().is_some_and(|_| lc.is_identically_zero()) {
            return Err(Error::Invalid(format!("curve lies in hyperplane {}", sys.get(i).name())));
        }
    }
    let ctx = Ctx {
        curve,
        sys,
        lattice: &lattice,
        complete: lattice.is_complete(),
        admissible: sys.is_admissible(),
        planes,
        w: wronskian_info(curve.wronskian())?,
        ln_f0: curve.ln_norm_at_origin()?,
        cfg,
    };
    let rho = curve.order();
    let q = sys.len();
    let nk = if ctx.complete { curve.n() } else { 0 };
    let mut rows: Vec<RadiusRow> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let d = grid.digits_at(i, rho);
            radius_row(&ctx, grid.radii()[i], d).unwrap_or_else(|e| failed_row(grid.radii()[i], d, q, nk, e))
        })
        .collect();
    let low = match low_grid(&ctx, grid.radii()[0], grid.digits_at(0, rho)) {
        Ok(l) => Some(l),
        Err(e) => {
            for row in &mut rows {
                row.flags.push(format!("counting bracket unavailable: {e}"));
            }
            None
        }
    };
    fill_brackets(&ctx, &mut rows, low.as_deref());
    check_routes(&ctx, &mut rows);
    let mut report = ValueDistReport {
        schema_version: REPORT_SCHEMA_VERSION,
        n: curve.n(),
        planes: sys.planes().iter().map(|h| h.name().to_string()).collect(),
        admissible: ctx.admissible,
        complete: ctx.complete,
        census: lattice.census(),
        order: rho,
        reducedness: curve.reducedness(),
        wronskian_strategy: curve.wronskian_strategy().to_string(),
        tol: cfg.quad.tol,
        ln_norm_origin: ctx.ln_f0,
        rows,
        invariants: Vec::new(),
    };
    report.invariants = invariants(&report, cfg);
    Ok(report)
}

/// Bracketed counting route for tracked functions from the counts at all
/// radii up to the current one.
fn fill_brackets(ctx: &Ctx, rows: &mut [RadiusRow], low: Option<&[(f64, Vec<i64>)]>) {
    let (tp, tw) = ctx.tracked();
    let Some(low) = low else { return };
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[a].r.total_cmp(&rows[b].r));
    let nt = tp.len() + tw as usize;
    for slot in 0..nt {
        let order0 = if slot < tp.len() { ctx.planes[tp[slot]].order0 } else { ctx.w.order0 } as i64;
        let mut pts: Vec<(f64, i64)> = low.iter().map(|(t, c)| (*t, c[slot])).collect();
        for &i in &order {
            let row = &rows[i];
            if row.t.is_nan() {
                continue;
            }
            let c = if slot < tp.len() { row.n_count[tp[slot]] } else { row.n1_count };
            pts.push((row.r, c));
            let b = bracket_counting(order0, &pts);
            let monotone = pts.windows(2).all(|w| w[1].1 >= w[0].1);
            let row = &mut rows[i];
            let b = if monotone { b } else { (f64::NEG_INFINITY, f64::INFINITY) };
            if !monotone {
                row.flags.push("zero counts not monotone".into());
                row.certified = false;
            }
            if slot < tp.len() {
                row.n_step[tp[slot]] = b;
            } else {
                row.n1_step = b;
            }
        }
    }
}

fn agrees(j: f64, s: (f64, f64), slack: f64) -> bool {
    j >= s.0 - slack && j <= s.1 + slack
}

fn check_routes(ctx: &Ctx, rows: &mut [RadiusRow]) {
    let slack = 10.0 * ctx.cfg.quad.tol;
    for row in rows.iter_mut() {
        if row.t.is_nan() {
            continue;
        }
        for i in 0..row.m.len() {
            if row.n_step[i].0.is_nan() {
                continue;
            }
            if !agrees(row.n_jensen[i], row.n_step[i], slack) {
                row.certified = false;
                row.flags.push(format!("N routes disagree for {}: {} vs {:?}", ctx.sys.get(i).name(), row.n_jensen[i], row.n_step[i]));
            }
        }
        if !row.n1_step.0.is_nan() && !agrees(row.n1, row.n1_step, slack) {
            row.certified = false;
            row.flags.push(format!("N1 routes disagree: {} vs {:?}", row.n1, row.n1_step));
        }
    }
}

fn invariants(rep: &ValueDistReport, cfg: &AnalysisConfig) -> Vec<InvariantCheck> {
    let tol = 10.0 * cfg.quad.tol;
    let rows: Vec<&RadiusRow> = rep.rows.iter().filter(|r| r.certified).collect();
    let mut out = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| out.push(InvariantCheck { name: name.into(), passed, detail });

    let neg = rows.iter().flat_map(|r| r.m.iter().chain(&r.mk)).fold(f64::INFINITY, |a, &b| a.min(b));
    push("nonnegative proximity", rows.is_empty() || neg >= -tol, format!("min {neg:.3e}"));

    let mono = |f: &dyn Fn(&RadiusRow) -> f64| rows.windows(2).all(|w| f(w[1]) >= f(w[0]) - tol);
    push("T nondecreasing", mono(&|r| r.t), String::new());
    let q = rep.planes.len();
    let n_ok = (0..q).all(|i| mono(&|r: &RadiusRow| r.n_jensen[i])) && mono(&|r| r.n1);
    push("N nondecreasing", n_ok, String::new());
    let c_ok = (0..q).all(|i| rows.windows(2).all(|w| w[1].n_count[i] >= w[0].n_count[i]));
    push("n(r,a) nondecreasing", c_ok, String::new());

    if rep.complete {
        let mut worst = f64::NEG_INFINITY;
        for r in &rows {
            for w in r.mk.windows(2) {
                worst = worst.max(w[1] - w[0]);
            }
        }
        push("m_k ordering", worst <= tol, format!("max m_(k+1) - m_k = {worst:.3e}"));
    }

    let routes = rep.rows.iter().all(|r| !r.flags.iter().any(|f| f.contains("routes disagree")));
    push("Jensen route equality", routes, String::new());

    let mut fmt_ok = true;
    let mut detail = String::new();
    for i in 0..q {
        let vals: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.n_step[i].0.is_finite() && r.n_step[i].1.is_finite())
            .map(|r| (r.m[i] + r.n_step[i].0 - r.t, r.m[i] + r.n_step[i].1 - r.t))
            .collect();
        if vals.is_empty() {
            continue;
        }
        let hi_lo = vals.iter().fold(f64::NEG_INFINITY, |a, v| a.max(v.0));
        let lo_hi = vals.iter().fold(f64::INFINITY, |a, v| a.min(v.1));
        let spread = hi_lo - lo_hi;
        if spread > tol {
            fmt_ok = false;
            let _ = write!(detail, "{}: spread {spread:.3e}; ", rep.planes[i]);
        }
    }
    push("first main theorem", fmt_ok, detail);

    if rep.complete {
        let ratios: Vec<f64> = rows.iter().filter_map(|r| r.s_thm1.map(|s| -s / r.t)).collect();
        match ratios.last() {
            Some(&top) => {
                let k = ratios.len();
                let rising = k >= 3 && ratios[k - 3] < ratios[k - 2] && ratios[k - 2] < top && top > 0.0;
                push(
                    "theorem 1",
                    top <= cfg.theorem1_eps && !rising,
                    format!("(sum m_k + N1 - (n+1)T)/T = {top:.4} at the top radius"),
                );
            }
            None => push("theorem 1", false, "no certified radius".into()),
        }
    }

    let gaps: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.prop_gap.map(|g| (r.r.ln(), g))).collect();
    if gaps.len() >= 3 {
        let x: Vec<f64> = gaps.iter().map(|g| g.0).collect();
        let y: Vec<f64> = gaps.iter().map(|g| g.1).collect();
        let ts: Vec<f64> = rows.iter().filter(|r| r.prop_gap.is_some()).map(|r| r.t).collect();
        let s = fit_slope(&x, &y);
        let st = fit_slope(&x, &ts).abs();
        push("proposition gap drift", s >= -0.05 * st - tol, format!("slope {s:.4} against T slope {st:.4}"));
    }
    out
}

impl ValueDistReport {
    pub fn certified_rows(&self) -> impl Iterator<Item = &RadiusRow> {
        self.rows.iter().filter(|r| r.certified)
    }

    pub fn all_certified(&self) -> bool {
        self.rows.iter().all(|r| r.certified)
    }

    pub fn invariants_hold(&self) -> bool {
        self.invariants.iter().all(|i| i.passed)
    }

    /// 0 when everything is certified and every invariant holds, 1 on an
    /// invariant violation, 2 when only certification is missing.
    pub fn exit_code(&self) -> i32 {
        if !self.invariants_hold() {
            1
        } else if !self.all_certified() {
            2
        } else {
            0
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,T");
        for p in &self.planes {
            let _ = write!(s, ",m_{p}");
        }
        for k in 1..=self.rows.first().map_or(0, |r| r.mk.len()) {
            let _ = write!(s, ",m_k{k}");
        }
        for p in &self.planes {
            let _ = write!(s, ",N_{p}");
        }
        s.push_str(",N1,S_thm1,S_cartan,prop_gap,status\n");
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        for r in &self.rows {
            let _ = write!(s, "{},{}", r.r, r.t);
            for v in r.m.iter().chain(&r.mk).chain(&r.n_jensen) {
                let _ = write!(s, ",{v}");
            }
            let status = if r.certified { "certified" } else { "flagged" };
            let _ = writeln!(s, ",{},{},{},{},{status}", r.n1, opt(r.s_thm1), opt(r.s_cartan), opt(r.prop_gap));
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Invalid(format!("serialising report: {e}")))
    }
}

/// [`analyze`] for a complete system.
pub fn theorem1_report(curve: &HoloCurve, sys: &HyperplaneSystem, grid: &RadialGrid, cfg: &AnalysisConfig) -> Result<ValueDistReport> {
    if !sys.is_complete() {
        return Err(Error::MissingCodimension(sys.n() + 1));
    }
    analyze(curve, sys, grid, cfg)
}

/// [`analyze`] for an admissible system.
pub fn cartan_report(curve: &HoloCurve, sys: &HyperplaneSystem, grid: &RadialGrid, cfg: &AnalysisConfig) -> Result<ValueDistReport> {
    if !sys.is_admissible() {
        return Err(Error::Constraint("hyperplane system is not admissible".into()));
    }
    analyze(curve, sys, grid, cfg)
}

/// `sum_k m_k - sum_a m(a)` per radius (NaN on failed radii).
pub fn proposition_gap(curve: &HoloCurve, sys: &HyperplaneSystem, grid: &RadialGrid, cfg: &AnalysisConfig) -> Result<Vec<f64>> {
    if sys.len() < sys.n() + 1 {
        return Err(Error::Constraint(format!("need at least {} hyperplanes, got {}", sys.n() + 1, sys.len())));
    }
    let rep = cartan_report(curve, sys, grid, cfg)?;
    Ok(rep.rows.iter().map(|r| r.prop_gap.unwrap_or(f64::NAN)).collect())
}

/// Tail-minimum estimates of `liminf m_k / T` for `k = 1..n+1` over the
/// last third of the certified radii.
pub fn defect_estimates(rep: &ValueDistReport) -> Result<Vec<f64>> {
    let rows: Vec<&RadiusRow> = rep.certified_rows().collect();
    if rows.len() < 10 {
        return Err(Error::Invalid(format!("defects need at least 10 certified radii, got {}", rows.len())));
    }
    if !rep.complete {
        return Err(Error::MissingCodimension(rep.n + 1));
    }
    let tail = &rows[rows.len() - rows.len() / 3..];
    let mut out: Vec<f64> =
        (0..rep.n).map(|k| tail.iter().map(|r| r.mk[k] / r.t).fold(f64::INFINITY, f64::min)).collect();
    out.push(0.0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entire::PolynomialFn;
    use crate::exact::GaussRational;
    use crate::projgeo::Hyperplane;
    use std::sync::Arc;

    fn coords(n: usize) -> HyperplaneSystem {
        let planes = (0..=n)
            .map(|i| {
                let v = (0..=n).map(|j| GaussRational::from_int((i == j) as i64)).collect();
                Hyperplane::from_exact(format!("x{i}"), v, true).unwrap()
            })
            .collect();
        HyperplaneSystem::new(n, planes).unwrap()
    }

    fn poly_curve(c: &[&[i64]]) -> HoloCurve {
        HoloCurve::new(c.iter().map(|p| Arc::new(PolynomialFn::from_ints(p)) as EntireFn).collect(), None).unwrap()
    }

    #[test]
    fn line_with_two_points() {
        // f = (1 : z), A = {w0 = 0, w1 = 0}: sum m + N1 = 2T - ln r + O(1)
        let c = poly_curve(&[&[1], &[0, 1]]);
        let grid = RadialGrid::log_spaced(2.0, 200.0, 5).unwrap();
        let rep = cartan_report(&c, &coords(1), &grid, &AnalysisConfig::default()).unwrap();
        assert!(rep.all_certified(), "{:?}", rep.rows.iter().map(|r| &r.flags).collect::<Vec<_>>());
        assert!(rep.invariants_hold(), "{:?}", rep.invariants);
        for r in &rep.rows {
            let t = 0.5 * (1.0 + r.r * r.r).ln();
            assert!((r.t - t).abs() < 1e-8);
            // m(x1) = T - ln r; m(x0) = T
            assert!((r.m[1] - (t - r.r.ln())).abs() < 1e-8);
            assert!((r.m[0] - t).abs() < 1e-8);
            let s = r.s_cartan.unwrap();
            assert!((s - r.r.ln()).abs() < 1e-8);
        }
        let csv = rep.to_csv();
        assert!(csv.starts_with("r,T,m_x0,m_x1,m_k1,N_x0,N_x1,N1,S_thm1,S_cartan,prop_gap,status\n"));
        assert_eq!(rep.exit_code(), 0);
    }

    #[test]
    fn incomplete_system_rejected_by_theorem1() {
        let c = poly_curve(&[&[1], &[0, 1], &[0, 0, 1]]);
        let sys = HyperplaneSystem::new(2, coords(2).planes()[..2].to_vec()).unwrap();
        let grid = RadialGrid::from_radii(vec![2.0]).unwrap();
        assert!(matches!(theorem1_report(&c, &sys, &grid, &AnalysisConfig::default()), Err(Error::MissingCodimension(3))));
        let one = HyperplaneSystem::new(2, coords(2).planes()[..1].to_vec()).unwrap();
        assert!(proposition_gap(&c, &one, &grid, &AnalysisConfig::default()).is_err());
    }
}
