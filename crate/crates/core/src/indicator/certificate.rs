use std::cmp::Ordering;

use rug::Rational;

use super::family::IndicatorFamily;
use super::field::Real;
use super::piecewise::{refine, PiCoefficient, PiecewiseIndicator};
use super::sectors::{lemma2_certificate, profile_levels, sector_decomposition, special_basis_profile, Lemma2Certificate};
use crate::error::{Error, Result};

/// `(1/2pi) int max(F)`.
pub fn t_coefficient(components: &IndicatorFamily) -> Result<PiCoefficient> {
    Ok(components.pointwise_max()?.mean())
}

/// `(1/2pi) int (h_max - h_a)`.
pub fn m_coefficient(h_max: &PiecewiseIndicator, h_a: &PiecewiseIndicator) -> Result<PiCoefficient> {
    if !h_a.le(h_max)? {
        return Err(Error::Constraint("indicator exceeds the curve's maximal indicator".into()));
    }
    Ok(h_max.sub(h_a)?.mean())
}

/// `m_k` coefficients for `k = 1..n` from the ascending levels
/// `h_(0) <= ... <= h_(n)`.
pub fn mk_coefficients(levels: &[PiecewiseIndicator], h_max: &PiecewiseIndicator) -> Result<Vec<PiCoefficient>> {
    let n = levels.len().saturating_sub(1);
    levels[..n].iter().map(|l| m_coefficient(h_max, l)).collect()
}

/// `sum_k m_k + (1/2pi) int h_W - (n+1) T`, as a multiple of `1/pi`.
pub fn theorem2_certificate(t: &PiCoefficient, mk: &[PiCoefficient], h_w: &PiecewiseIndicator) -> PiCoefficient {
    let dim = Rational::from(mk.len() + 1);
    let sum = mk.iter().fold(Real::zero(), |acc, m| acc.add(&m.0));
    PiCoefficient(sum.add(&h_w.mean().0).sub(&t.0.scale(&dim)))
}

/// Dimension bounds on the solutions non-positive (negative) at a point
/// where the maximal indicator is positive, plus sets of indicators that a
/// linear relation keeps out of any single admissible system.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityConstraint {
    pub max_negative: usize,
    pub max_nonpositive: usize,
    pub forbidden_together: Vec<Vec<String>>,
}

/// The indicator data of one curve family.
#[derive(Clone, Debug)]
pub struct IndicatorModel {
    pub name: String,
    /// Every indicator a non-trivial element of the solution space can have.
    pub family: IndicatorFamily,
    /// `n + 1`.
    pub dim: usize,
    pub wronskian: PiecewiseIndicator,
    /// Dimension jumps per sector; defaults to one per level.
    pub dims: Option<Vec<Vec<usize>>>,
    pub constraint: Option<AdmissibilityConstraint>,
}

#[derive(Clone, Debug)]
pub struct AsymptoticCertificate {
    pub model: String,
    pub t: PiCoefficient,
    /// Per family member, the `m(r, a)` coefficient of a hyperplane whose
    /// intersection function has that indicator.
    pub m: Vec<(String, PiCoefficient)>,
    pub mk: Vec<PiCoefficient>,
    pub n1: PiCoefficient,
    pub lemma2: Lemma2Certificate,
    pub theorem2_residual: PiCoefficient,
    /// Largest `sum_j int (h - h_j)` over admissible selections and one
    /// selection attaining it.
    pub admissible_max: Option<(Real, Vec<String>)>,
}

impl AsymptoticCertificate {
    pub fn lemma2_passed(&self) -> bool {
        self.lemma2.passed()
    }

    pub fn theorem2_passed(&self) -> bool {
        self.theorem2_residual.is_zero()
    }

    /// `lim sum m / T` for the maximising admissible selection, when exact
    /// and rational.
    pub fn cartan_ratio(&self) -> Option<Rational> {
        let (s, _) = self.admissible_max.as_ref()?;
        let s = s.exact_value()?.as_rational()?;
        let t = self.t.0.exact_value()?.as_rational()?;
        if *t == 0 {
            return None;
        }
        Some(Rational::from(s / t) / 2u32)
    }

    /// `m_k / T` limits, the asymptotic defects `delta_1..delta_n`.
    pub fn defects(&self) -> Option<Vec<Rational>> {
        let t = self.t.0.exact_value()?.as_rational()?.clone();
        if t == 0 {
            return None;
        }
        self.mk.iter().map(|m| m.0.exact_value()?.as_rational().map(|x| Rational::from(x / &t))).collect()
    }
}

pub fn certify(model: &IndicatorModel) -> Result<AsymptoticCertificate> {
    let f = &model.family;
    if f.is_empty() {
        return Err(Error::Invalid("empty indicator family".into()));
    }
    if *model.wronskian.rho() != *f.rho() {
        return Err(Error::Invalid("Wronskian indicator has a different order".into()));
    }
    let h = f.pointwise_max()?;
    let t = h.mean();
    let m = f.names().iter().zip(f.members()).map(|(n, a)| Ok((n.clone(), m_coefficient(&h, a)?))).collect::<Result<Vec<_>>>()?;
    let sectors = sector_decomposition(f)?;
    let profile = special_basis_profile(&sectors, model.dim, model.dims.as_deref())?;
    let levels = profile_levels(&sectors, &profile)?;
    let mk = mk_coefficients(&levels, &h)?;
    let lemma2 = lemma2_certificate(&sectors, &profile, &model.wronskian)?;
    let theorem2_residual = theorem2_certificate(&t, &mk, &model.wronskian);
    let admissible_max = match &model.constraint {
        Some(c) => {
            let (v, sel) = max_admissible_sum(f, c)?;
            Some((v, sel.iter().map(|&i| f.names()[i].clone()).collect()))
        }
        None => None,
    };
    Ok(AsymptoticCertificate { model: model.name.clone(), t, m, mk, n1: model.wronskian.mean(), lemma2, theorem2_residual, admissible_max })
}

/// Per member: `int (h - h_j)` and, for each piece where `h > 0`, whether
/// `h_j` is negative / non-positive there.
struct SignTable {
    gap: Vec<Real>,
    neg: Vec<Vec<bool>>,
    nonpos: Vec<Vec<bool>>,
}

fn sign_table(f: &IndicatorFamily) -> Result<SignTable> {
    let h = f.pointwise_max()?;
    let zero = PiecewiseIndicator::zero(f.rho().clone());
    let mut all = f.refs();
    all.push(&h);
    all.push(&zero);
    let q = f.len();
    let rho = f.rho();
    let pieces = refine(&all, true)?;
    let mut neg = vec![Vec::new(); q];
    let mut nonpos = vec![Vec::new(); q];
    for p in &pieces {
        let mid = p.mid();
        if p.value(q, rho, &mid).sign() <= 0 {
            continue;
        }
        for j in 0..q {
            let s = p.value(j, rho, &mid).sign();
            neg[j].push(s < 0);
            nonpos[j].push(s <= 0);
        }
    }
    let gap = f.members().iter().map(|a| m_coefficient(&h, a).map(|c| c.0.scale(&Rational::from(2)))).collect::<Result<Vec<_>>>()?;
    Ok(SignTable { gap, neg, nonpos })
}

fn check_selection(f: &IndicatorFamily, t: &SignTable, counts: &[usize], c: &AdmissibilityConstraint) -> Result<()> {
    let npieces = t.neg.first().map_or(0, Vec::len);
    for k in 0..npieces {
        let neg: usize = (0..counts.len()).map(|j| counts[j] * t.neg[j][k] as usize).sum();
        let np: usize = (0..counts.len()).map(|j| counts[j] * t.nonpos[j][k] as usize).sum();
        if neg > c.max_negative || np > c.max_nonpositive {
            return Err(Error::Constraint(format!(
                "selection has {neg} negative and {np} non-positive indicators where the maximal indicator is positive"
            )));
        }
    }
    for set in &c.forbidden_together {
        let idx = set
            .iter()
            .map(|n| f.index_of(n).ok_or_else(|| Error::Invalid(format!("unknown indicator {n} in constraint"))))
            .collect::<Result<Vec<_>>>()?;
        if idx.iter().all(|&i| counts[i] > 0) {
            return Err(Error::Constraint(format!("{} cannot all be present in an admissible system", set.join(", "))));
        }
    }
    Ok(())
}

/// `sum_j int (h - h_j)` over a selection (repetitions allowed) after
/// checking the constraint.
pub fn admissible_sum_bound(f: &IndicatorFamily, selection: &[usize], c: &AdmissibilityConstraint) -> Result<Real> {
    let t = sign_table(f)?;
    let mut counts = vec![0; f.len()];
    for &i in selection {
        if i >= f.len() {
            return Err(Error::Invalid(format!("selection index {i} outside the family")));
        }
        counts[i] += 1;
    }
    check_selection(f, &t, &counts, c)?;
    Ok(sum_for(&t, &counts))
}

fn sum_for(t: &SignTable, counts: &[usize]) -> Real {
    counts.iter().zip(&t.gap).fold(Real::zero(), |acc, (&c, g)| acc.add(&g.scale(&Rational::from(c))))
}

/// Exhaustive maximum of [`admissible_sum_bound`] over multisets.
pub fn max_admissible_sum(f: &IndicatorFamily, c: &AdmissibilityConstraint) -> Result<(Real, Vec<usize>)> {
    let t = sign_table(f)?;
    let q = f.len();
    let mut caps = vec![0usize; q];
    for j in 0..q {
        let below = t.nonpos[j].iter().any(|b| *b);
        if t.gap[j].is_zero() {
            caps[j] = 0;
        } else if below {
            caps[j] = c.max_nonpositive;
        } else {
            return Err(Error::Constraint(format!("{} can be repeated without bound", f.names()[j])));
        }
    }
    let total: f64 = caps.iter().map(|&k| (k + 1) as f64).product();
    if total > 1e6 {
        return Err(Error::Invalid(format!("{total} selections to enumerate")));
    }
    let mut counts = vec![0usize; q];
    let mut best = (Real::zero(), Vec::new());
    loop {
        if check_selection(f, &t, &counts, c).is_ok() {
            let s = sum_for(&t, &counts);
            if s.cmp(&best.0) == Ordering::Greater {
                let sel = counts.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k)).collect();
                best = (s, sel);
            }
        }
        // odometer
        let mut i = 0;
        loop {
            if i == q {
                return Ok(best);
            }
            if counts[i] < caps[i] {
                counts[i] += 1;
                break;
            }
            counts[i] = 0;
            i += 1;
        }
    }
}
