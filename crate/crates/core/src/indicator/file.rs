//! Indicator-family files (TOML). Angles are in units of `pi`, all numbers
//! are exact rationals written as strings.
//!
//! ```toml
//! name = "exp123"
//! rho = "1"
//! dim = 3
//!
//! [[indicator]]
//! name = "x1"
//! a = "1"                       # a cos(rho t) + b sin(rho t) on the circle
//! b = "0"
//!
//! [[indicator]]
//! name = "h"
//! arcs = [{ from = "-1", to = "0", a = "-1", b = "0" },
//!         { from = "0", to = "1", a = "1", b = "0" }]
//!
//! [[indicator]]
//! name = "G1"
//! base = "H0"                   # an earlier entry, shifted and/or clipped
//! shift = "2/3"
//! positive_part = true
//!
//! [wronskian]
//! a = "3"
//!
//! [constraint]                  # optional
//! max_negative = 1
//! max_nonpositive = 2
//! forbidden_together = [["H0", "H1", "H2"]]
//! ```
//!
//! An entry with `lower_order = true` stands for a function of smaller
//! growth order and gets the zero indicator. An optional top-level `dims`
//! lists the dimension jumps per sector.

use rug::Rational;
use serde::Deserialize;

use super::certificate::{AdmissibilityConstraint, IndicatorModel};
use super::family::IndicatorFamily;
use super::field::{Angle, Real};
use super::piecewise::{arc_shift, PiecewiseIndicator, TrigArc};
use crate::error::{Error, Result};
use crate::exact::parse_rational;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRepr {
    name: Option<String>,
    rho: String,
    dim: usize,
    #[serde(default)]
    indicator: Vec<EntryRepr>,
    wronskian: ShapeRepr,
    dims: Option<Vec<Vec<usize>>>,
    constraint: Option<ConstraintRepr>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ShapeRepr {
    a: Option<String>,
    b: Option<String>,
    arcs: Option<Vec<ArcRepr>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryRepr {
    name: String,
    a: Option<String>,
    b: Option<String>,
    arcs: Option<Vec<ArcRepr>>,
    base: Option<String>,
    shift: Option<String>,
    #[serde(default)]
    positive_part: bool,
    #[serde(default)]
    lower_order: bool,
    multiplicity: Option<usize>,
}

#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct ArcRepr {
    from: String,
    to: String,
    a: String,
    b: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintRepr {
    max_negative: usize,
    max_nonpositive: usize,
    #[serde(default)]
    forbidden_together: Vec<Vec<String>>,
}

fn real(s: &str) -> Result<Real> {
    Ok(Real::from_rational(parse_rational(s)?))
}

fn shape(rho: &Rational, s: &ShapeRepr, what: &str) -> Result<Option<PiecewiseIndicator>> {
    match (&s.arcs, &s.a, &s.b) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => Err(Error::Parse(format!("{what}: give either arcs or a/b"))),
        (Some(arcs), None, None) => {
            let arcs = arcs
                .iter()
                .map(|a| {
                    Ok(TrigArc::new(
                        Angle::pi_mult(parse_rational(&a.from)?),
                        Angle::pi_mult(parse_rational(&a.to)?),
                        real(&a.a)?,
                        real(&a.b)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Some(PiecewiseIndicator::new(rho.clone(), arcs)?))
        }
        (None, None, None) => Ok(None),
        (None, a, b) => {
            let a = a.as_deref().map(real).transpose()?.unwrap_or_else(Real::zero);
            let b = b.as_deref().map(real).transpose()?.unwrap_or_else(Real::zero);
            Ok(Some(PiecewiseIndicator::sinusoid(rho.clone(), a, b)?))
        }
    }
}

pub fn parse_indicator_file(text: &str) -> Result<IndicatorModel> {
    let f: FileRepr = toml::from_str(text)?;
    let rho = parse_rational(&f.rho)?;
    let mut family = IndicatorFamily::new(rho.clone())?;
    if f.indicator.is_empty() {
        return Err(Error::Parse("no [[indicator]] entries".into()));
    }
    for e in &f.indicator {
        let own = shape(&rho, &ShapeRepr { a: e.a.clone(), b: e.b.clone(), arcs: e.arcs.clone() }, &e.name)?;
        let h = match (own, &e.base, e.lower_order) {
            (None, None, true) => PiecewiseIndicator::zero(rho.clone()),
            (Some(h), None, false) => h,
            (None, Some(base), false) => {
                family.get(base).cloned().ok_or_else(|| Error::Parse(format!("{}: unknown base {base}", e.name)))?
            }
            _ => return Err(Error::Parse(format!("{}: give exactly one of a/b, arcs, base, lower_order", e.name))),
        };
        let h = match &e.shift {
            Some(s) => arc_shift(&h, &parse_rational(s)?),
            None => h,
        };
        let h = if e.positive_part { h.positive_part() } else { h };
        family.push_with_multiplicity(e.name.clone(), h, e.multiplicity.unwrap_or(1))?;
    }
    let wronskian = shape(&rho, &f.wronskian, "wronskian")?.unwrap_or_else(|| PiecewiseIndicator::zero(rho.clone()));
    if f.dim == 0 {
        return Err(Error::Parse("dim must be positive".into()));
    }
    Ok(IndicatorModel {
        name: f.name.unwrap_or_else(|| "family".into()),
        family,
        dim: f.dim,
        wronskian,
        dims: f.dims,
        constraint: f.constraint.map(|c| AdmissibilityConstraint {
            max_negative: c.max_negative,
            max_nonpositive: c.max_nonpositive,
            forbidden_together: c.forbidden_together,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indicator::certify;

    const AIRY: &str = r#"
name = "airy-file"
rho = "3/2"
dim = 3
[[indicator]]
name = "H0"
a = "-1"
[[indicator]]
name = "H1"
base = "H0"
shift = "2/3"
[[indicator]]
name = "H2"
base = "H0"
shift = "-2/3"
[[indicator]]
name = "G0"
base = "H0"
positive_part = true
[[indicator]]
name = "G1"
base = "G0"
shift = "2/3"
[[indicator]]
name = "G2"
base = "G0"
shift = "-2/3"
[wronskian]
[constraint]
max_negative = 1
max_nonpositive = 2
forbidden_together = [["H0", "H1", "H2"]]
"#;

    #[test]
    fn file_reproduces_builtin_airy() {
        let m = parse_indicator_file(AIRY).unwrap();
        let b = crate::indicator::airy_model();
        assert_eq!(m.family.members(), b.family.members());
        let c = certify(&m).unwrap();
        assert_eq!(c.t.to_string(), "2/pi");
        assert_eq!(c.admissible_max.unwrap().0.to_string(), "32/3");
    }

    #[test]
    fn arcs_and_errors() {
        let ok = r#"
rho = "1"
dim = 1
[[indicator]]
name = "abs"
arcs = [{ from = "-1", to = "0", a = "0", b = "-1" }, { from = "0", to = "1", a = "0", b = "1" }]
[wronskian]
arcs = [{ from = "-1", to = "0", a = "0", b = "-1" }, { from = "0", to = "1", a = "0", b = "1" }]
"#;
        let m = parse_indicator_file(ok).unwrap();
        assert_eq!(m.family.members()[0].mean().to_string(), "2/pi");
        assert!(parse_indicator_file("rho = \"1\"\ndim = 1\n[wronskian]\n").is_err());
        let gap = ok.replace("from = \"0\", to = \"1\", a = \"0\", b = \"1\" }]\n[wronskian]", "from = \"1/2\", to = \"1\", a = \"0\", b = \"1\" }]\n[wronskian]");
        assert!(parse_indicator_file(&gap).is_err());
        assert!(parse_indicator_file(&ok.replace("dim = 1", "dim = 1\nbogus = 2")).is_err());
    }
}
