use num_complex::Complex64;
use rug::{Complex, Float};

use super::{combinations, HyperplaneSystem, ProjPoint};
use crate::error::{Error, Result};
use crate::precision::Scaled;

/// Default cap on `|A|` for flat enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 16;

const FLAT_BITS: u32 = 256;

/// Linear subspace of `P^n` cut out by independent hyperplanes of a system.
#[derive(Clone, Debug)]
pub struct Flat {
    codim: usize,
    generators: Vec<usize>,
    members: Vec<usize>,
    basis: Vec<Vec<Complex64>>,
    linv: Vec<Vec<Complex64>>,
}

impl Flat {
    fn build(sys: &HyperplaneSystem, generators: Vec<usize>) -> Self {
        let k = generators.len();
        let alpha: Vec<&[Complex]> = generators.iter().map(|&i| sys.get(i).coeffs()).collect();
        // G_ik = sum_l alpha_il conj(alpha_kl) = Gram matrix of the conjugated vectors
        let mut g = vec![vec![Complex::new(FLAT_BITS); k]; k];
        for i in 0..k {
            for j in 0..k {
                let mut s = Complex::new(FLAT_BITS);
                for (a, b) in alpha[i].iter().zip(alpha[j]) {
                    s += Complex::with_val(FLAT_BITS, a * Complex::with_val(FLAT_BITS, b.conj_ref()));
                }
                g[i][j] = s;
            }
        }
        // Cholesky G = L L^H
        let mut l = vec![vec![Complex::new(FLAT_BITS); k]; k];
        for j in 0..k {
            let mut d = Complex::with_val(FLAT_BITS, &g[j][j]);
            for p in 0..j {
                d -= Complex::with_val(FLAT_BITS, l[j][p].norm_ref());
            }
            let djj = Float::with_val(FLAT_BITS, d.real()).sqrt();
            l[j][j] = Complex::with_val(FLAT_BITS, (&djj, 0));
            for i in j + 1..k {
                let mut s = Complex::with_val(FLAT_BITS, &g[i][j]);
                for p in 0..j {
                    s -= Complex::with_val(FLAT_BITS, &l[i][p] * Complex::with_val(FLAT_BITS, l[j][p].conj_ref()));
                }
                l[i][j] = s / &djj;
            }
        }
        // lower-triangular inverse
        let mut li = vec![vec![Complex::new(FLAT_BITS); k]; k];
        for c in 0..k {
            for i in c..k {
                let mut s = Complex::with_val(FLAT_BITS, if i == c { 1 } else { 0 });
                for p in c..i {
                    s -= Complex::with_val(FLAT_BITS, &l[i][p] * &li[p][c]);
                }
                li[i][c] = s / &l[i][i];
            }
        }
        // orthonormal basis q_j = sum_i conj(alpha_i) conj(Linv_ji)
        let n1 = alpha.first().map_or(0, |a| a.len());
        let basis = (0..k)
            .map(|j| {
                (0..n1)
                    .map(|c| {
                        let mut s = Complex::new(FLAT_BITS);
                        for i in 0..=j {
                            s += Complex::with_val(FLAT_BITS, &alpha[i][c] * &li[j][i]).conj();
                        }
                        to_c64(&s)
                    })
                    .collect()
            })
            .collect();
        let linv = li.iter().map(|r| r.iter().map(to_c64).collect()).collect();
        let members = (0..sys.len())
            .filter(|a| generators.contains(a) || {
                let mut s = generators.clone();
                s.push(*a);
                sys.subset_rank(&s) == k
            })
            .collect();
        Self { codim: k, generators, members, basis, linv }
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    /// Independent hyperplanes cutting out the flat.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Every hyperplane of the system that contains the flat.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Orthonormal basis of the span of the conjugated coefficient vectors.
    pub fn basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    /// Norm of the projection of `w/|w|` onto the span of the generators.
    pub fn dist(&self, w: &ProjPoint) -> f64 {
        let nw = w.norm();
        let s: f64 = self
            .basis
            .iter()
            .map(|q| q.iter().zip(w.coords()).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm_sqr())
            .sum();
        (s.sqrt() / nw).min(1.0)
    }

    /// `ln dist` from the values `g_a = <alpha_a, w>` of every hyperplane of
    /// the system and `ln |w|`.
    pub fn ln_dist_from_values(&self, g: &[Scaled], ln_norm: f64) -> f64 {
        let vals: Vec<Scaled> = self.generators.iter().map(|&i| g[i]).collect();
        let Some(e) = vals.iter().filter(|v| !v.is_zero()).map(|v| v.exp2).max() else {
            return f64::NEG_INFINITY;
        };
        let m: Vec<Complex64> = vals.iter().map(|v| v.mant_at(e)).collect();
        let s: f64 = self
            .linv
            .iter()
            .map(|row| row.iter().zip(&m).map(|(a, b)| a * b).sum::<Complex64>().norm_sqr())
            .sum();
        (0.5 * s.ln() + e as f64 * std::f64::consts::LN_2 - ln_norm).min(0.0)
    }
}

fn to_c64(z: &Complex) -> Complex64 {
    Complex64::new(z.real().to_f64(), z.imag().to_f64())
}

/// Flats generated by a hyperplane system, by codimension, together with the
/// independent `(n+1)`-subsets.
#[derive(Clone, Debug)]
pub struct FlatLattice {
    n: usize,
    by_codim: Vec<Vec<Flat>>,
    bases: Vec<Vec<usize>>,
}

impl FlatLattice {
    pub fn enumerate(sys: &HyperplaneSystem) -> Result<Self> {
        Self::enumerate_capped(sys, DEFAULT_ENUMERATION_CAP)
    }

    pub fn enumerate_capped(sys: &HyperplaneSystem, cap: usize) -> Result<Self> {
        if sys.len() > cap {
            return Err(Error::TooManyHyperplanes { len: sys.len(), cap });
        }
        let n = sys.n();
        let mut by_codim: Vec<Vec<Flat>> = vec![Vec::new(); n + 1];
        let mut bases = Vec::new();
        for k in 1..=(n + 1).min(sys.len()) {
            for s in combinations(sys.len(), k) {
                let known = by_codim[k - 1].iter().any(|x| s.iter().all(|a| x.members.contains(a)));
                if k == n + 1 {
                    if sys.subset_rank(&s) == k {
                        if !known {
                            by_codim[k - 1].push(Flat::build(sys, s.clone()));
                        }
                        bases.push(s);
                    }
                } else if !known && sys.subset_rank(&s) == k {
                    by_codim[k - 1].push(Flat::build(sys, s));
                }
            }
        }
        Ok(Self { n, by_codim, bases })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Flats of codimension `k` (1-based).
    pub fn flats(&self, k: usize) -> &[Flat] {
        if k == 0 || k > self.n + 1 {
            return &[];
        }
        &self.by_codim[k - 1]
    }

    /// Number of flats per codimension `1..=n+1`.
    pub fn census(&self) -> Vec<usize> {
        self.by_codim.iter().map(Vec::len).collect()
    }

    pub fn is_complete(&self) -> bool {
        !self.by_codim[self.n].is_empty()
    }

    /// Independent `(n+1)`-subsets of the system.
    pub fn bases(&self) -> &[Vec<usize>] {
        &self.bases
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n + 1 {
            return Err(Error::Invalid(format!("codimension {k} outside 1..={}", self.n + 1)));
        }
        if k <= self.n && self.by_codim[k - 1].is_empty() {
            return Err(Error::MissingCodimension(k));
        }
        Ok(())
    }

    /// Shortest distance from `w` to a flat of codimension `k`; `d_{n+1} = 1`.
    pub fn d_k(&self, w: &ProjPoint, k: usize) -> Result<f64> {
        self.check_k(k)?;
        if k == self.n + 1 {
            return Ok(1.0);
        }
        Ok(self.by_codim[k - 1].iter().map(|x| x.dist(w)).fold(f64::INFINITY, f64::min))
    }

    /// `ln d_k` from hyperplane values, see [`Flat::ln_dist_from_values`].
    pub fn ln_d_k_from_values(&self, k: usize, g: &[Scaled], ln_norm: f64) -> Result<f64> {
        self.check_k(k)?;
        if k == self.n + 1 {
            return Ok(0.0);
        }
        Ok(self.by_codim[k - 1].iter().map(|x| x.ln_dist_from_values(g, ln_norm)).fold(f64::INFINITY, f64::min))
    }

    /// Index of the codim-`k` flat closest to `w`.
    pub fn nearest(&self, w: &ProjPoint, k: usize) -> Result<usize> {
        self.check_k(k)?;
        let fl = self.flats(k);
        Ok((0..fl.len()).min_by(|&a, &b| fl[a].dist(w).total_cmp(&fl[b].dist(w))).unwrap_or(0))
    }

    /// An independent `(n+1)`-subset whose first `codim` entries generate the
    /// flat, if one exists.
    pub fn basis_completion(&self, x: &Flat) -> Option<Vec<usize>> {
        self.bases.iter().find_map(|b| {
            let (inside, outside): (Vec<usize>, Vec<usize>) = b.iter().partition(|a| x.members.contains(a));
            (inside.len() == x.codim).then(|| inside.into_iter().chain(outside).collect())
        })
    }

    /// `ln` of `prod_{k<=n} d_k(w) / min_B prod_{a in B} dist(w, a)` over
    /// independent `(n+1)`-subsets `B`.
    pub fn ln_lemma1_ratio(&self, sys: &HyperplaneSystem, w: &ProjPoint) -> Result<f64> {
        if self.bases.is_empty() {
            return Err(Error::MissingCodimension(self.n + 1));
        }
        let ld: Vec<f64> = sys.planes().iter().map(|a| super::dist_point_hyperplane(w, a).ln()).collect();
        if let Some(i) = ld.iter().position(|l| *l == f64::NEG_INFINITY) {
            return Err(Error::OnHyperplane(i));
        }
        let mut num = 0.0;
        for k in 1..=self.n {
            num += self.d_k(w, k)?.ln();
        }
        let den = self.bases.iter().map(|b| b.iter().map(|&a| ld[a]).sum::<f64>()).fold(f64::INFINITY, f64::min);
        Ok(num - den)
    }

    pub fn lemma1_ratio(&self, sys: &HyperplaneSystem, w: &ProjPoint) -> Result<f64> {
        self.ln_lemma1_ratio(sys, w).map(f64::exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projgeo::tests::plane;
    use crate::projgeo::{dist_point_hyperplane, Hyperplane};
    use proptest::prelude::*;

    fn coordinate_system(n: usize) -> HyperplaneSystem {
        let planes = (0..=n)
            .map(|i| {
                let v: Vec<String> = (0..=n).map(|j| if i == j { "1".into() } else { "0".into() }).collect();
                plane(&v.iter().map(String::as_str).collect::<Vec<_>>())
            })
            .collect();
        HyperplaneSystem::new(n, planes).unwrap()
    }

    /// Chordal distance between points: `|u ^ v| / (|u| |v|)`.
    fn chordal(u: &[Complex64], v: &[Complex64]) -> f64 {
        let nu: f64 = u.iter().map(|c| c.norm_sqr()).sum();
        let nv: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        let ip: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
        (1.0 - ip.norm_sqr() / (nu * nv)).max(0.0).sqrt()
    }

    #[test]
    fn hyperplane_distance_brute_force() {
        // infimum over points (0 : cos t : e^{is} sin t) of the plane w_0 = 0
        let w = [Complex64::new(1.0, 0.0); 3];
        let mut best = f64::INFINITY;
        for a in 0..=400 {
            for b in 0..64 {
                let t = std::f64::consts::FRAC_PI_2 * a as f64 / 400.0;
                let s = std::f64::consts::TAU * b as f64 / 64.0;
                let v = [Complex64::new(0.0, 0.0), Complex64::new(t.cos(), 0.0), Complex64::from_polar(t.sin(), s)];
                best = best.min(chordal(&w, &v));
            }
        }
        let p = ProjPoint::new(w.to_vec()).unwrap();
        let d = dist_point_hyperplane(&p, &plane(&["1", "0", "0"]));
        assert!((d - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((best - d).abs() < 1e-4);
    }

    #[test]
    fn coordinate_lattice_census_and_distances() {
        let sys = coordinate_system(2);
        let lat = FlatLattice::enumerate(&sys).unwrap();
        assert_eq!(lat.census(), vec![3, 3, 1]);
        assert!(lat.is_complete());
        let w = ProjPoint::from_reals(&[1.0, 1.0, 1.0]).unwrap();
        assert!((lat.d_k(&w, 1).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((lat.d_k(&w, 2).unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(lat.d_k(&w, 3).unwrap(), 1.0);

        // the point (0:0:1) is the flat cut by the first two planes; brute force is
        // the chordal distance to that single point
        let x = lat.flats(2).iter().find(|x| x.generators() == [0, 1]).unwrap();
        let oracle = chordal(w.coords(), &[Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert!((x.dist(&w) - oracle).abs() < 1e-15);
        assert!((oracle - 0.816496580927726).abs() < 1e-12);
    }

    #[test]
    fn lemma1_ratio_coordinate_system() {
        let sys = coordinate_system(2);
        let lat = FlatLattice::enumerate(&sys).unwrap();
        assert_eq!(lat.bases().len(), 1);
        let w = ProjPoint::from_reals(&[1.0, 1.0, 1.0]).unwrap();
        let r = lat.lemma1_ratio(&sys, &w).unwrap();
        let expected = (1.0 / 3f64.sqrt() * (2.0f64 / 3.0).sqrt()) / (1.0 / 3f64.sqrt()).powi(3);
        assert!((r - expected).abs() < 1e-12);
        assert!((r - 6f64.sqrt()).abs() < 1e-12);
        let on = ProjPoint::from_reals(&[0.0, 1.0, 1.0]).unwrap();
        assert!(matches!(lat.lemma1_ratio(&sys, &on), Err(Error::OnHyperplane(0))));
    }

    #[test]
    fn binomial_census_for_n_plus_one_planes() {
        for n in 1..=4 {
            let lat = FlatLattice::enumerate(&coordinate_system(n)).unwrap();
            let expected: Vec<usize> = (1..=n + 1).map(|k| binom(n + 1, k)).collect();
            assert_eq!(lat.census(), expected);
        }
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn non_complete_lattice() {
        let sys = HyperplaneSystem::new(2, vec![plane(&["1", "0", "0"]), plane(&["0", "1", "0"])]).unwrap();
        let lat = FlatLattice::enumerate(&sys).unwrap();
        assert_eq!(lat.census(), vec![2, 1, 0]);
        assert!(!lat.is_complete());
        let w = ProjPoint::from_reals(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(lat.d_k(&w, 3).unwrap(), 1.0);
        let one = HyperplaneSystem::new(2, vec![plane(&["1", "0", "0"])]).unwrap();
        let lat1 = FlatLattice::enumerate(&one).unwrap();
        assert!(matches!(lat1.d_k(&w, 2), Err(Error::MissingCodimension(2))));
        assert!(lat.lemma1_ratio(&sys, &w).is_err());
    }

    #[test]
    fn dependent_triple_dedupes_to_one_point() {
        // alpha_1 + alpha_2 + alpha_3 = 0 meet in a single point (1:1:1)
        let sys = HyperplaneSystem::new(
            2,
            vec![plane(&["1", "-1", "0"]), plane(&["0", "1", "-1"]), plane(&["-1", "0", "1"]), plane(&["1", "0", "0"])],
        )
        .unwrap();
        let lat = FlatLattice::enumerate(&sys).unwrap();
        // codim 2: {0,1,2} meet at (1:1:1); {0,3}, {1,3}, {2,3} give three more points
        assert_eq!(lat.census(), vec![4, 4, 1]);
        let x = &lat.flats(2)[0];
        assert_eq!(x.members(), &[0, 1, 2]);
        let w = ProjPoint::from_reals(&[1.0, 1.0, 1.0]).unwrap();
        assert!(x.dist(&w) < 1e-15);
    }

    #[test]
    fn basis_completion_search() {
        let sys = HyperplaneSystem::new(
            2,
            vec![plane(&["1", "-1", "0"]), plane(&["0", "1", "-1"]), plane(&["-1", "0", "1"]), plane(&["1", "0", "0"])],
        )
        .unwrap();
        let lat = FlatLattice::enumerate(&sys).unwrap();
        for k in 1..=3 {
            for x in lat.flats(k) {
                let b = lat.basis_completion(x).expect("completion exists");
                assert_eq!(sys.subset_rank(&b), 3);
                assert_eq!(sys.subset_rank(&b[..k]), k);
                assert!(b[..k].iter().all(|a| x.members().contains(a)));
            }
        }
    }

    #[test]
    fn enumeration_cap() {
        let planes: Vec<Hyperplane> = (0..17)
            .map(|i| Hyperplane::from_c64("p", &[Complex64::new(1.0, 0.0), Complex64::new(i as f64, 0.0)]).unwrap())
            .collect();
        let sys = HyperplaneSystem::new(1, planes).unwrap();
        assert!(matches!(FlatLattice::enumerate(&sys), Err(Error::TooManyHyperplanes { len: 17, cap: 16 })));
        assert!(FlatLattice::enumerate_capped(&sys, 20).is_ok());
    }

    fn generic_system() -> HyperplaneSystem {
        let planes = vec![
            plane(&["1", "0", "0"]),
            plane(&["0", "1", "0"]),
            plane(&["0", "0", "1"]),
            plane(&["1", "1", "1"]),
            plane(&["1", "2i", "-3"]),
        ];
        HyperplaneSystem::new(2, planes).unwrap()
    }

    fn point() -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3)
            .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
            .prop_filter("nonzero", |v: &Vec<Complex64>| v.iter().map(|c| c.norm()).sum::<f64>() > 1e-3)
    }

    proptest! {
        #[test]
        fn distances_scale_invariant(w in point(), re in 0.1f64..10.0, im in -10.0f64..10.0) {
            let sys = generic_system();
            let lat = FlatLattice::enumerate(&sys).unwrap();
            let p = ProjPoint::new(w).unwrap();
            let q = p.scaled(Complex64::new(re, im)).unwrap();
            for k in 1..=3 {
                let (a, b) = (lat.d_k(&p, k).unwrap(), lat.d_k(&q, k).unwrap());
                prop_assert!((a - b).abs() < 1e-12);
            }
            for h in sys.planes() {
                prop_assert!((dist_point_hyperplane(&p, h) - dist_point_hyperplane(&q, h)).abs() < 1e-12);
            }
        }

        #[test]
        fn value_route_matches_projection(w in point()) {
            let sys = generic_system();
            let lat = FlatLattice::enumerate(&sys).unwrap();
            let p = ProjPoint::new(w).unwrap();
            let g: Vec<Scaled> = sys.planes().iter().map(|h| Scaled::from_c64(h.apply(p.coords()))).collect();
            for k in 1..=2 {
                for x in lat.flats(k) {
                    let a = x.dist(&p);
                    let b = x.ln_dist_from_values(&g, p.norm().ln()).exp();
                    prop_assert!((a - b).abs() < 1e-10, "{} vs {}", a, b);
                }
            }
        }

        #[test]
        fn flat_distance_within_unit_interval(w in point()) {
            let sys = generic_system();
            let lat = FlatLattice::enumerate(&sys).unwrap();
            let p = ProjPoint::new(w).unwrap();
            for k in 1..=3 {
                let d = lat.d_k(&p, k).unwrap();
                prop_assert!((0.0..=1.0).contains(&d));
            }
            prop_assert!(lat.lemma1_ratio(&sys, &p).unwrap() > 0.0);
        }
    }
}
