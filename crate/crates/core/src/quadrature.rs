//! Vector-valued adaptive quadrature of periodic integrands over `[0, 2pi)`.
//!
//! The circle is split into panels, each integrated with the 7/15-point
//! Gauss–Kronrod pair; panels whose Kronrod–Gauss difference exceeds their
//! share of the tolerance (for any component) are bisected. Reported values
//! are circle means `(1/2pi) int`. Panels are processed level by level and
//! summed in angular order, so results do not depend on thread scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Quadrature controls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Nodes of the initial uniform partition (15 per panel, rounded up).
    pub base_nodes: usize,
    /// Absolute tolerance on each circle mean.
    pub tol: f64,
    /// Relative half-width of the band around the circle that must be free
    /// of zeros of the intersection functions; radii are nudged otherwise.
    pub delta: f64,
    /// Maximal bisection depth of a panel.
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { base_nodes: 120, tol: 1e-8, delta: 1e-3, max_depth: 40 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.base_nodes < 64 {
            return Err(Error::Invalid(format!("base node count {} below 64", self.base_nodes)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Invalid("quadrature tolerance must be positive".into()));
        }
        if !(self.delta > 0.0 && self.delta < 0.01) {
            return Err(Error::Invalid("exclusion parameter must lie in (0, 0.01)".into()));
        }
        Ok(())
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Means with error estimates.
#[derive(Clone, Debug, Default)]
pub struct CircleMeans {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub evals: usize,
    /// Some panel hit the depth limit without meeting its tolerance.
    pub exhausted: bool,
    /// Per component, the narrowest panel that component asked to bisect.
    pub min_split: Vec<f64>,
}

impl CircleMeans {
    pub fn converged(&self, tol: f64) -> bool {
        !self.exhausted && self.errors.iter().all(|e| *e <= tol)
    }
}

struct Panel {
    a: f64,
    b: f64,
    depth: u32,
}

fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let dim = fc.len();
    let mut k: Vec<f64> = fc.iter().map(|v| v * WGK[7]).collect();
    let mut g: Vec<f64> = fc.iter().map(|v| v * WG[3]).collect();
    for j in 0..7 {
        let x = h * XGK[j];
        let lo = f(c - x)?;
        let hi = f(c + x)?;
        for d in 0..dim {
            let s = lo[d] + hi[d];
            k[d] += WGK[j] * s;
            if j % 2 == 1 {
                g[d] += WG[j / 2] * s;
            }
        }
    }
    Ok((k.iter().map(|v| v * h).collect(), g.iter().map(|v| v * h).collect()))
}

/// Adaptive means of a vector integrand of `theta` over the circle.
pub fn circle_means<F>(spec: &QuadratureSpec, f: F) -> Result<CircleMeans>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync,
{
    spec.validate()?;
    let tau = std::f64::consts::TAU;
    let p0 = spec.base_nodes.div_ceil(15);
    let mut active: Vec<Panel> = (0..p0)
        .map(|i| Panel { a: tau * i as f64 / p0 as f64, b: tau * (i + 1) as f64 / p0 as f64, depth: 0 })
        .collect();
    // accepted contributions keyed by left endpoint, summed in order at the end
    let mut done: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::new();
    let mut out = CircleMeans::default();
    while !active.is_empty() {
        let results: Vec<Result<(Vec<f64>, Vec<f64>)>> = active.par_iter().map(|p| gk15(&f, p.a, p.b)).collect();
        let mut next = Vec::new();
        for (p, r) in active.into_iter().zip(results) {
            let (k, g) = r?;
            out.evals += 15;
            if out.min_split.is_empty() {
                out.min_split = vec![f64::INFINITY; k.len()];
            }
            let err: Vec<f64> = k.iter().zip(&g).map(|(a, b)| (a - b).abs() / tau).collect();
            let share = spec.tol * (p.b - p.a) / tau;
            let bad: Vec<usize> = (0..err.len()).filter(|&d| !(err[d] <= share)).collect();
            if bad.is_empty() || p.depth >= spec.max_depth {
                if !bad.is_empty() {
                    out.exhausted = true;
                }
                done.push((p.a, k.iter().map(|v| v / tau).collect(), err));
            } else {
                for &d in &bad {
                    out.min_split[d] = out.min_split[d].min(p.b - p.a);
                }
                let m = 0.5 * (p.a + p.b);
                next.push(Panel { a: p.a, b: m, depth: p.depth + 1 });
                next.push(Panel { a: m, b: p.b, depth: p.depth + 1 });
            }
        }
        active = next;
    }
    done.sort_by(|x, y| x.0.total_cmp(&y.0));
    let dim = done.first().map_or(0, |d| d.1.len());
    out.values = vec![0.0; dim];
    out.errors = vec![0.0; dim];
    for (_, v, e) in &done {
        for d in 0..dim {
            out.values[d] += v[d];
            out.errors[d] += e[d];
        }
    }
    if out.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Uncertified("non-finite integrand on the circle".into()));
    }
    Ok(out)
}
