use std::cmp::Ordering;

use rug::Rational;

use super::family::IndicatorFamily;
use super::field::Angle;
use super::piecewise::{approx_eq, order_on, refine, Piece, PiecewiseIndicator, TrigArc};
use crate::error::{Error, Result};

/// Open sector `(from, to)`; `to` exceeds `pi` for the sector across the
/// negative real axis. `levels` lists the distinct indicators in strictly
/// increasing order, each as the family members that coincide there.
#[derive(Clone, Debug, PartialEq)]
pub struct Sector {
    pub from: Angle,
    pub to: Angle,
    pub levels: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct SectorDecomposition {
    rays: Vec<Angle>,
    sectors: Vec<Sector>,
    family: IndicatorFamily,
    /// Refinement pieces with the sector each lies in.
    pieces: Vec<(Piece, usize)>,
}

fn level_classes(p: &Piece, rho: &Rational) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in order_on(p, rho) {
        match out.last_mut() {
            Some(last) if p.same(last[0], i) => last.push(i),
            _ => out.push(vec![i]),
        }
    }
    for c in &mut out {
        c.sort_unstable();
    }
    out
}

pub fn sector_decomposition(f: &IndicatorFamily) -> Result<SectorDecomposition> {
    if f.is_empty() {
        return Err(Error::Invalid("empty indicator family".into()));
    }
    let rho = f.rho().clone();
    let pieces = refine(&f.refs(), true)?;
    let classes: Vec<Vec<Vec<usize>>> = pieces.iter().map(|p| level_classes(p, &rho)).collect();
    // strict order at each midpoint
    for (p, c) in pieces.iter().zip(&classes) {
        let m = p.mid();
        for w in c.windows(2) {
            if p.value(w[0][0], &rho, &m).cmp(&p.value(w[1][0], &rho, &m)) != Ordering::Less {
                return Err(Error::Invalid(format!("ordering not strict at {m}")));
            }
        }
    }
    let last = pieces.len() - 1;
    let pi = Angle::from_ratio(1, 1);
    let seam_is_ray = f.members().iter().any(PiecewiseIndicator::has_corner_at_pi) || classes[0] != classes[last] || {
        let (p, q) = (&pieces[0], &pieces[last]);
        let m1 = Angle::from_ratio(-1, 1);
        (0..f.len()).any(|i| {
            (i + 1..f.len()).any(|j| !q.same(i, j) && approx_eq(&q.value(i, &rho, &pi), &q.value(j, &rho, &pi)))
                || (i + 1..f.len()).any(|j| !p.same(i, j) && approx_eq(&p.value(i, &rho, &m1), &p.value(j, &rho, &m1)))
        })
    };
    let mut rays: Vec<Angle> = pieces[..last].iter().map(|p| p.to.clone()).collect();
    let mut sectors = Vec::new();
    let mut index = vec![0; pieces.len()];
    if seam_is_ray || pieces.len() == 1 {
        if seam_is_ray {
            rays.push(pi);
        }
        for (i, p) in pieces.iter().enumerate() {
            index[i] = i;
            sectors.push(Sector { from: p.from.clone(), to: p.to.clone(), levels: classes[i].clone() });
        }
    } else {
        // the last piece continues into the first across pi
        for (i, p) in pieces.iter().enumerate().take(last) {
            index[i] = i;
            let s = if i == 0 {
                Sector { from: pieces[last].from.clone(), to: p.to.add(&Angle::from_ratio(2, 1)), levels: classes[0].clone() }
            } else {
                Sector { from: p.from.clone(), to: p.to.clone(), levels: classes[i].clone() }
            };
            sectors.push(s);
        }
        index[last] = 0;
    }
    let pieces = pieces.into_iter().zip(index).collect();
    Ok(SectorDecomposition { rays, sectors, family: f.clone(), pieces })
}

impl SectorDecomposition {
    pub fn rays(&self) -> &[Angle] {
        &self.rays
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn family(&self) -> &IndicatorFamily {
        &self.family
    }

    /// Index of the sector containing the (non-ray) angle `theta`.
    pub fn sector_of(&self, theta: &Angle) -> Option<usize> {
        self.pieces
            .iter()
            .find(|(p, _)| theta.cmp(&p.from) == Ordering::Greater && theta.cmp(&p.to) == Ordering::Less)
            .map(|(_, s)| *s)
    }
}

/// Per sector: the levels a special basis realises, with the dimension jump
/// of each.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecialBasisProfile {
    pub dim: usize,
    pub sectors: Vec<Vec<(Vec<usize>, usize)>>,
}

/// `dims[s][l]` is `dim V_l - dim V_(l-1)` in sector `s`; when omitted every
/// sector must show exactly `dim` distinct levels, each a jump of one.
pub fn special_basis_profile(s: &SectorDecomposition, dim: usize, dims: Option<&[Vec<usize>]>) -> Result<SpecialBasisProfile> {
    if let Some(d) = dims {
        if d.len() != s.sectors.len() {
            return Err(Error::Constraint(format!("dimension data for {} sectors, decomposition has {}", d.len(), s.sectors.len())));
        }
    }
    let mut out = Vec::with_capacity(s.sectors.len());
    for (k, sec) in s.sectors.iter().enumerate() {
        let jumps = match dims {
            Some(d) => d[k].clone(),
            None => vec![1; sec.levels.len()],
        };
        if jumps.len() != sec.levels.len() || jumps.contains(&0) || jumps.iter().sum::<usize>() != dim {
            return Err(Error::Constraint(format!(
                "sector {k} ({} to {}): {} levels with jumps {jumps:?} do not fill dimension {dim}",
                sec.from,
                sec.to,
                sec.levels.len()
            )));
        }
        out.push(sec.levels.iter().cloned().zip(jumps).collect());
    }
    Ok(SpecialBasisProfile { dim, sectors: out })
}

/// The indicators `h_(0) <= ... <= h_(dim-1)` of a special basis, stitched
/// across sectors.
pub fn profile_levels(s: &SectorDecomposition, profile: &SpecialBasisProfile) -> Result<Vec<PiecewiseIndicator>> {
    let rho = s.family.rho().clone();
    let mut arcs: Vec<Vec<TrigArc>> = vec![Vec::new(); profile.dim];
    for (p, sec) in &s.pieces {
        let expanded: Vec<usize> =
            profile.sectors[*sec].iter().flat_map(|(class, mult)| std::iter::repeat_n(class[0], *mult)).collect();
        for (k, &i) in expanded.iter().enumerate() {
            let (a, b) = p.coeffs[i].clone();
            arcs[k].push(TrigArc::new(p.from.clone(), p.to.clone(), a, b));
        }
    }
    arcs.into_iter().map(|a| PiecewiseIndicator::new(rho.clone(), a)).collect()
}

#[derive(Clone, Debug)]
pub struct Lemma2Certificate {
    /// `sum_j h_(j) - h_W`.
    pub residual: PiecewiseIndicator,
    pub per_sector: Vec<bool>,
}

impl Lemma2Certificate {
    pub fn passed(&self) -> bool {
        self.per_sector.iter().all(|b| *b)
    }
}

fn overlaps(arc: &TrigArc, from: &Angle, to: &Angle) -> bool {
    arc.from.cmp(to) == Ordering::Less && arc.to.cmp(from) == Ordering::Greater
}

/// Checks `sum_j h_(w_j) = h_W` sector by sector.
pub fn lemma2_certificate(s: &SectorDecomposition, profile: &SpecialBasisProfile, h_w: &PiecewiseIndicator) -> Result<Lemma2Certificate> {
    let levels = profile_levels(s, profile)?;
    let mut sum = PiecewiseIndicator::zero(s.family.rho().clone());
    for l in &levels {
        sum = sum.add(l)?;
    }
    let residual = sum.sub(h_w)?;
    let two = Angle::from_ratio(2, 1);
    let per_sector = s
        .sectors
        .iter()
        .map(|sec| {
            residual.arcs().iter().all(|arc| {
                let zero = arc.a.is_zero() && arc.b.is_zero();
                let hit = overlaps(arc, &sec.from, &sec.to) || overlaps(arc, &sec.from.sub(&two), &sec.to.sub(&two));
                zero || !hit
            })
        })
        .collect();
    Ok(Lemma2Certificate { residual, per_sector })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indicator::field::Real;

    fn cos_family(ks: &[i64]) -> IndicatorFamily {
        let mut f = IndicatorFamily::new(Rational::from(1)).unwrap();
        for (i, &k) in ks.iter().enumerate() {
            f.push(format!("c{i}"), PiecewiseIndicator::sinusoid(Rational::from(1), Real::from_int(k), Real::zero()).unwrap()).unwrap();
        }
        f
    }

    #[test]
    fn exponential_family_sectors() {
        let s = sector_decomposition(&cos_family(&[0, 1, 2])).unwrap();
        assert_eq!(s.rays(), &[Angle::from_ratio(-1, 2), Angle::from_ratio(1, 2)]);
        assert_eq!(s.sectors().len(), 2);
        let right = s.sector_of(&Angle::from_ratio(0, 1)).unwrap();
        assert_eq!(s.sectors()[right].levels, vec![vec![0], vec![1], vec![2]]);
        let left = s.sector_of(&Angle::from_ratio(9, 10)).unwrap();
        assert_eq!(s.sector_of(&Angle::from_ratio(-9, 10)), Some(left));
        assert_eq!(s.sectors()[left].levels, vec![vec![2], vec![1], vec![0]]);
        let p = special_basis_profile(&s, 3, None).unwrap();
        let hw = PiecewiseIndicator::sinusoid(Rational::from(1), Real::from_int(3), Real::zero()).unwrap();
        assert!(lemma2_certificate(&s, &p, &hw).unwrap().passed());
        let wrong = PiecewiseIndicator::sinusoid(Rational::from(1), Real::from_int(2), Real::zero()).unwrap();
        assert!(!lemma2_certificate(&s, &p, &wrong).unwrap().passed());
    }

    #[test]
    fn single_indicator() {
        let s = sector_decomposition(&cos_family(&[1])).unwrap();
        assert!(s.rays().is_empty());
        assert_eq!(s.sectors().len(), 1);
        let p = special_basis_profile(&s, 1, None).unwrap();
        let l = profile_levels(&s, &p).unwrap();
        assert_eq!(l[0], s.family().members()[0]);
        let hw = s.family().members()[0].clone();
        assert!(lemma2_certificate(&s, &p, &hw).unwrap().passed());
    }

    #[test]
    fn identical_members_merge() {
        let s = sector_decomposition(&cos_family(&[1, 1])).unwrap();
        assert_eq!(s.sectors()[0].levels, vec![vec![0, 1]]);
        assert!(special_basis_profile(&s, 2, None).is_err());
        assert!(special_basis_profile(&s, 2, Some(&[vec![2]])).is_ok());
    }
}
