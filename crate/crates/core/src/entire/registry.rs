//! Curve definition files and the registry of component kinds.
//!
//! A curve file is TOML:
//!
//! ```toml
//! order = "3/2"           # optional declared order
//! wronskian = "abel"      # optional: symbolic | abel | direct
//!
//! [equations.de3]         # named equations, P_0 first
//! coeffs = [["-1"], ["0", "-1"], []]
//!
//! [[component]]
//! kind = "ode"
//! equation = "de3"        # a name from [equations] or an inline coeffs array
//! initial = ["1", "0", "0"]
//!
//! [[component]]
//! kind = "poly"
//! coeffs = ["1", "0", "2/3"]   # lowest degree first
//!
//! [[component]]
//! kind = "exppoly"
//! terms = [{ freq = "1", poly = ["1"] }, { freq = "-2i", poly = ["0", "1"] }]
//! ```
//!
//! Numbers are strings in the [`GaussRational`] grammar; plain TOML integers
//! are accepted too.

use std::collections::HashMap;
use std::sync::Arc;

use toml::{Table, Value};

use super::{EntireFn, ExpPolynomialFn, HoloCurve, OdeEquation, OdeSolutionFn, PolynomialFn};
use crate::error::{Error, Result};
use crate::exact::{parse_rational, GaussRational};

/// Named equations shared by the components of one file.
#[derive(Default)]
pub struct ParseContext {
    pub equations: HashMap<String, Arc<OdeEquation>>,
}

/// A component variant that can be read from a curve file.
pub trait ComponentKind: Send + Sync {
    fn tag(&self) -> &'static str;
    fn parse(&self, entry: &Table, ctx: &ParseContext) -> Result<EntireFn>;
}

pub struct PolyKind;
pub struct ExpPolyKind;
pub struct OdeKind;

pub fn number(v: &Value) -> Result<GaussRational> {
    match v {
        Value::String(s) => s.parse(),
        Value::Integer(i) => Ok(GaussRational::from_int(*i)),
        other => Err(Error::Parse(format!("expected an exact number string, got {other}"))),
    }
}

pub fn number_list(v: Option<&Value>, what: &str) -> Result<Vec<GaussRational>> {
    match v {
        Some(Value::Array(a)) => a.iter().map(number).collect(),
        Some(_) => Err(Error::Parse(format!("`{what}` must be an array"))),
        None => Err(Error::Parse(format!("missing `{what}`"))),
    }
}

fn equation_from(v: &Value) -> Result<OdeEquation> {
    let Value::Array(rows) = v else {
        return Err(Error::Parse("equation coefficients must be an array of arrays".into()));
    };
    let polys = rows.iter().map(|r| number_list(Some(r), "coeffs").map(PolynomialFn::new)).collect::<Result<_>>()?;
    OdeEquation::new(polys)
}

impl ComponentKind for PolyKind {
    fn tag(&self) -> &'static str {
        "poly"
    }
    fn parse(&self, entry: &Table, _: &ParseContext) -> Result<EntireFn> {
        Ok(Arc::new(PolynomialFn::new(number_list(entry.get("coeffs"), "coeffs")?)))
    }
}

impl ComponentKind for ExpPolyKind {
    fn tag(&self) -> &'static str {
        "exppoly"
    }
    fn parse(&self, entry: &Table, _: &ParseContext) -> Result<EntireFn> {
        let Some(Value::Array(terms)) = entry.get("terms") else {
            return Err(Error::Parse("exppoly needs a `terms` array".into()));
        };
        let mut out = Vec::new();
        for t in terms {
            let Value::Table(t) = t else {
                return Err(Error::Parse("each term must be a table".into()));
            };
            let freq = number(t.get("freq").ok_or_else(|| Error::Parse("term without `freq`".into()))?)?;
            out.push((PolynomialFn::new(number_list(t.get("poly"), "poly")?), freq));
        }
        Ok(Arc::new(ExpPolynomialFn::new(out)?))
    }
}

impl ComponentKind for OdeKind {
    fn tag(&self) -> &'static str {
        "ode"
    }
    fn parse(&self, entry: &Table, ctx: &ParseContext) -> Result<EntireFn> {
        let eq = match entry.get("equation") {
            Some(Value::String(name)) => ctx
                .equations
                .get(name)
                .cloned()
                .ok_or_else(|| Error::Parse(format!("unknown equation `{name}`")))?,
            Some(v) => Arc::new(equation_from(v)?),
            None => return Err(Error::Parse("ode component without `equation`".into())),
        };
        let init = number_list(entry.get("initial"), "initial")?;
        Ok(Arc::new(OdeSolutionFn::new(eq, init)?))
    }
}

/// Component kinds selectable by their `kind` tag.
pub struct ComponentRegistry {
    kinds: Vec<Box<dyn ComponentKind>>,
}

impl Default for ComponentRegistry {
    fn default() -> Self {
        Self { kinds: vec![Box::new(PolyKind), Box::new(ExpPolyKind), Box::new(OdeKind)] }
    }
}

impl ComponentRegistry {
    pub fn register(&mut self, kind: Box<dyn ComponentKind>) {
        self.kinds.retain(|k| k.tag() != kind.tag());
        self.kinds.push(kind);
    }

    pub fn tags(&self) -> Vec<&'static str> {
        self.kinds.iter().map(|k| k.tag()).collect()
    }

    pub fn get(&self, tag: &str) -> Option<&dyn ComponentKind> {
        self.kinds.iter().find(|k| k.tag() == tag).map(|k| k.as_ref())
    }

    pub fn parse_curve(&self, text: &str) -> Result<HoloCurve> {
        let doc: Table = text.parse::<Table>().map_err(|e| Error::Parse(e.to_string()))?;
        let mut ctx = ParseContext::default();
        if let Some(v) = doc.get("equations") {
            let Value::Table(t) = v else {
                return Err(Error::Parse("`equations` must be a table".into()));
            };
            for (name, e) in t {
                let coeffs = match e {
                    Value::Table(et) => et.get("coeffs").ok_or_else(|| Error::Parse(format!("equation `{name}` without coeffs")))?,
                    other => other,
                };
                ctx.equations.insert(name.clone(), Arc::new(equation_from(coeffs)?));
            }
        }
        let order = match doc.get("order") {
            Some(Value::String(s)) => Some(parse_rational(s)?),
            Some(Value::Integer(i)) => Some(rug::Rational::from(*i)),
            Some(_) => return Err(Error::Parse("`order` must be a rational string".into())),
            None => None,
        };
        let strategy = match doc.get("wronskian") {
            Some(Value::String(s)) => Some(s.as_str()),
            Some(_) => return Err(Error::Parse("`wronskian` must be a string".into())),
            None => None,
        };
        let Some(Value::Array(items)) = doc.get("component") else {
            return Err(Error::Parse("no [[component]] entries".into()));
        };
        let mut comps = Vec::new();
        for (i, item) in items.iter().enumerate() {
            let Value::Table(t) = item else {
                return Err(Error::Parse(format!("component {i} is not a table")));
            };
            let tag = t
                .get("kind")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Parse(format!("component {i} has no `kind`")))?;
            let kind = self
                .get(tag)
                .ok_or_else(|| Error::Parse(format!("component {i}: unknown kind `{tag}` (known: {:?})", self.tags())))?;
            comps.push(kind.parse(t, &ctx)?);
        }
        HoloCurve::with_strategy(comps, order, strategy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_file() {
        let text = r#"
            [[component]]
            kind = "poly"
            coeffs = ["1"]

            [[component]]
            kind = "exppoly"
            terms = [{ freq = "1", poly = ["1"] }]
        "#;
        let c = ComponentRegistry::default().parse_curve(text).unwrap();
        assert_eq!(c.n(), 1);
        assert_eq!(c.components()[1].kind(), "exppoly");
    }

    #[test]
    fn parses_shared_equation() {
        let text = r#"
            order = "3/2"
            [equations.de3]
            coeffs = [["-1"], ["0", "-1"], []]
            [[component]]
            kind = "ode"
            equation = "de3"
            initial = ["1", "0", "0"]
            [[component]]
            kind = "ode"
            equation = "de3"
            initial = ["0", "1", "0"]
            [[component]]
            kind = "ode"
            equation = "de3"
            initial = ["0", "0", "1"]
        "#;
        let c = ComponentRegistry::default().parse_curve(text).unwrap();
        assert_eq!(c.wronskian_strategy(), "abel");
        assert_eq!(c.declared_order().unwrap(), &rug::Rational::from((3, 2)));
    }

    #[test]
    fn reports_errors() {
        let reg = ComponentRegistry::default();
        assert!(reg.parse_curve("[[component]]\nkind = \"spline\"").is_err());
        assert!(reg.parse_curve("[[component]]\nkind = \"poly\"\ncoeffs = [1.5]").is_err());
        assert!(reg.parse_curve("not toml [").is_err());
        assert!(reg.parse_curve("x = 1").is_err());
    }
}
