//! Chordal geometry of `P^n`: hyperplanes, admissible and complete systems,
//! the lattice of flats they generate, and distances to flats.
//!
//! A hyperplane `a` is the zero set of the bilinear form
//! `<alpha, w> = sum_j alpha_j w_j`; the chordal distance from `w` is
//! `|<alpha, w>| / (|alpha| |w|)`. The flat cut out by independent
//! `alpha_1..alpha_k` is the orthogonal complement of the span of the
//! conjugated vectors, so the distance from `w` to it is the norm of the
//! projection of `w / |w|` onto that span.

use std::fmt;

use num_complex::Complex64;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::exact::{exact_rank, GaussRational};
use crate::precision::bits_to_digits;

mod file;
mod lattice;

pub use file::parse_hyperplane_file;
pub use lattice::{Flat, FlatLattice, DEFAULT_ENUMERATION_CAP};

/// Precision at which normalised hyperplane coefficients are stored.
pub const HYPERPLANE_BITS: u32 = 2048;

/// Point of `P^n` in homogeneous coordinates (double precision).
#[derive(Clone, Debug, PartialEq)]
pub struct ProjPoint {
    w: Vec<Complex64>,
}

impl ProjPoint {
    pub fn new(w: Vec<Complex64>) -> Result<Self> {
        if w.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::Invalid("the zero vector is not a point of P^n".into()));
        }
        Ok(Self { w })
    }

    pub fn from_reals(w: &[f64]) -> Result<Self> {
        Self::new(w.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.w.len() - 1
    }

    pub fn norm(&self) -> f64 {
        self.w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> Result<Self> {
        Self::new(self.w.iter().map(|x| x * c).collect())
    }
}

/// Hyperplane with coefficient vector stored normalised (`|alpha| = 1`).
#[derive(Clone)]
pub struct Hyperplane {
    name: String,
    exact: Option<Vec<GaussRational>>,
    coeffs: Vec<Complex>,
    c64: Vec<Complex64>,
}

impl fmt::Debug for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Hyperplane").field("name", &self.name).field("alpha", &self.c64).finish()
    }
}

fn norm_of(v: &[Complex], bits: u32) -> Float {
    let mut s = Float::new(bits);
    for c in v {
        s += Float::with_val(bits, c.norm_ref());
    }
    s.sqrt()
}

impl Hyperplane {
    /// From exact coefficients, normalised at [`HYPERPLANE_BITS`]. Without
    /// `normalize` the squared norm must be exactly 1.
    pub fn from_exact(name: impl Into<String>, alpha: Vec<GaussRational>, normalize: bool) -> Result<Self> {
        if !normalize {
            let s = alpha.iter().fold(rug::Rational::new(), |s, a| s + a.norm_sqr());
            if s != 1 {
                return Err(Error::Invalid(format!("hyperplane has squared norm {s}; set normalize = true")));
            }
        }
        let c: Vec<Complex> = alpha.iter().map(|a| a.to_complex(HYPERPLANE_BITS)).collect();
        let mut h = Self::from_complex(name, c, true)?;
        h.exact = Some(alpha);
        Ok(h)
    }

    /// From multiprecision coefficients. Without `normalize`, the vector must
    /// already have unit norm to within its precision.
    pub fn from_complex(name: impl Into<String>, alpha: Vec<Complex>, normalize: bool) -> Result<Self> {
        let bits = alpha.iter().map(|c| c.prec().0).min().unwrap_or(HYPERPLANE_BITS);
        let nrm = norm_of(&alpha, bits);
        if nrm.is_zero() {
            return Err(Error::Invalid("hyperplane with zero coefficient vector".into()));
        }
        let coeffs: Vec<Complex> = if normalize {
            alpha.iter().map(|c| Complex::with_val(bits, c / &nrm)).collect()
        } else {
            let dev = Float::with_val(bits, &nrm - 1u32).abs().to_f64();
            let tol = 10f64.powi(2 - bits_to_digits(bits).min(300) as i32);
            if dev > tol {
                return Err(Error::Invalid(format!("hyperplane norm deviates from 1 by {dev:e}; set normalize = true")));
            }
            alpha
        };
        let c64 = coeffs.iter().map(|c| Complex64::new(c.real().to_f64(), c.imag().to_f64())).collect();
        Ok(Self { name: name.into(), exact: None, coeffs, c64 })
    }

    pub fn from_c64(name: impl Into<String>, alpha: &[Complex64]) -> Result<Self> {
        let c = alpha.iter().map(|z| Complex::with_val(53, (z.re, z.im))).collect();
        Self::from_complex(name, c, true)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Normalised coefficients.
    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn coeffs_c64(&self) -> &[Complex64] {
        &self.c64
    }

    /// Coefficients as given, when they were exact.
    pub fn exact(&self) -> Option<&[GaussRational]> {
        self.exact.as_deref()
    }

    pub fn precision_bits(&self) -> u32 {
        self.coeffs.iter().map(|c| c.prec().0).min().unwrap_or(53)
    }

    /// `<alpha, w>` in double precision.
    pub fn apply(&self, w: &[Complex64]) -> Complex64 {
        self.c64.iter().zip(w).map(|(a, x)| a * x).sum()
    }
}

/// `|<alpha, w>| / (|alpha| |w|)`.
pub fn dist_point_hyperplane(w: &ProjPoint, a: &Hyperplane) -> f64 {
    (a.apply(w.coords()).norm() / w.norm()).min(1.0)
}

/// Rank of coefficient vectors: exact when all are exact, else pivoted
/// Gram–Schmidt at the stored precision with tolerance `10^(-digits/2)`.
pub fn rank_of(planes: &[&Hyperplane]) -> usize {
    if planes.is_empty() {
        return 0;
    }
    if let Some(rows) = planes.iter().map(|h| h.exact.clone()).collect::<Option<Vec<_>>>() {
        return exact_rank(&rows);
    }
    let bits = planes.iter().map(|h| h.precision_bits()).min().unwrap();
    numeric_rank(&planes.iter().map(|h| h.coeffs.clone()).collect::<Vec<_>>(), bits)
}

pub fn rank_tolerance_digits(bits: u32) -> u32 {
    bits_to_digits(bits) / 2
}

fn numeric_rank(vecs: &[Vec<Complex>], bits: u32) -> usize {
    let tol = Float::with_val(bits, Float::u_exp(1, 0)) / Float::with_val(bits, 10u32).pow(rank_tolerance_digits(bits));
    let tol2 = Float::with_val(bits, &tol * &tol);
    let mut rest: Vec<Vec<Complex>> = vecs.iter().map(|v| v.iter().map(|c| Complex::with_val(bits, c)).collect()).collect();
    let mut rank = 0;
    while !rest.is_empty() {
        let norms: Vec<Float> = rest.iter().map(|v| sq_norm(v, bits)).collect();
        let (best, nb) = norms.iter().enumerate().max_by(|a, b| a.1.partial_cmp(b.1).unwrap()).unwrap();
        if *nb <= tol2 {
            break;
        }
        let q: Vec<Complex> = {
            let s = Float::with_val(bits, nb.sqrt_ref());
            rest[best].iter().map(|c| Complex::with_val(bits, c / &s)).collect()
        };
        rest.swap_remove(best);
        for v in rest.iter_mut() {
            // v -= <q, v> q with the Hermitian product
            let mut ip = Complex::new(bits);
            for (a, b) in q.iter().zip(v.iter()) {
                ip += Complex::with_val(bits, a.conj_ref()) * b;
            }
            for (a, b) in q.iter().zip(v.iter_mut()) {
                *b -= Complex::with_val(bits, a * &ip);
            }
        }
        rank += 1;
    }
    rank
}

fn sq_norm(v: &[Complex], bits: u32) -> Float {
    let mut s = Float::new(bits);
    for c in v {
        s += Float::with_val(bits, c.norm_ref());
    }
    s
}

/// Ordered list of pairwise distinct hyperplanes in a common `P^n`.
#[derive(Clone, Debug)]
pub struct HyperplaneSystem {
    n: usize,
    planes: Vec<Hyperplane>,
    rank: usize,
}

impl HyperplaneSystem {
    pub fn new(n: usize, planes: Vec<Hyperplane>) -> Result<Self> {
        for h in &planes {
            if h.dim() != n {
                return Err(Error::Invalid(format!("hyperplane {} lives in P^{}, expected P^{n}", h.name, h.dim())));
            }
        }
        for i in 0..planes.len() {
            for j in 0..i {
                if rank_of(&[&planes[i], &planes[j]]) < 2 {
                    return Err(Error::Invalid(format!(
                        "hyperplanes {} and {} coincide",
                        planes[j].name, planes[i].name
                    )));
                }
            }
        }
        let rank = rank_of(&planes.iter().collect::<Vec<_>>());
        Ok(Self { n, planes, rank })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    pub fn planes(&self) -> &[Hyperplane] {
        &self.planes
    }

    pub fn get(&self, i: usize) -> &Hyperplane {
        &self.planes[i]
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn subset_rank(&self, idx: &[usize]) -> usize {
        rank_of(&idx.iter().map(|&i| &self.planes[i]).collect::<Vec<_>>())
    }

    /// Every subset of size `min(|A|, n+1)` is linearly independent.
    pub fn is_admissible(&self) -> bool {
        let k = self.len().min(self.n + 1);
        combinations(self.len(), k).all(|s| self.subset_rank(&s) == k)
    }

    /// The coefficient vectors span `C^{n+1}`.
    pub fn is_complete(&self) -> bool {
        self.rank == self.n + 1
    }

    /// Subsystem on the given indices.
    pub fn subsystem(&self, idx: &[usize]) -> Result<Self> {
        Self::new(self.n, idx.iter().map(|&i| self.planes[i].clone()).collect())
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if next[i] < n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                cur = Some(next);
                break;
            }
        }
        Some(out)
    })
}
