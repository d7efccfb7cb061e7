use rug::Rational;

use super::piecewise::{pointwise_max, sorted_envelopes, PiecewiseIndicator};
use crate::error::{Error, Result};

/// Named indicators of a common order, each with a multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorFamily {
    rho: Rational,
    names: Vec<String>,
    members: Vec<PiecewiseIndicator>,
    multiplicity: Vec<usize>,
}

impl IndicatorFamily {
    pub fn new(rho: Rational) -> Result<Self> {
        if rho <= 0 {
            return Err(Error::Invalid(format!("indicator order {rho} must be positive")));
        }
        Ok(Self { rho, names: Vec::new(), members: Vec::new(), multiplicity: Vec::new() })
    }

    pub fn push(&mut self, name: impl Into<String>, h: PiecewiseIndicator) -> Result<()> {
        self.push_with_multiplicity(name, h, 1)
    }

    pub fn push_with_multiplicity(&mut self, name: impl Into<String>, h: PiecewiseIndicator, mult: usize) -> Result<()> {
        let name = name.into();
        if *h.rho() != self.rho {
            return Err(Error::Invalid(format!("indicator {name} has order {}, family has {}", h.rho(), self.rho)));
        }
        if self.names.contains(&name) {
            return Err(Error::Invalid(format!("duplicate indicator name {name}")));
        }
        if mult == 0 {
            return Err(Error::Invalid(format!("indicator {name} with multiplicity 0")));
        }
        self.names.push(name);
        self.members.push(h);
        self.multiplicity.push(mult);
        Ok(())
    }

    /// A member of strictly smaller growth order; its indicator at the
    /// family's order is identically zero.
    pub fn push_lower_order(&mut self, name: impl Into<String>) -> Result<()> {
        let z = PiecewiseIndicator::zero(self.rho.clone());
        self.push(name, z)
    }

    pub fn rho(&self) -> &Rational {
        &self.rho
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn members(&self) -> &[PiecewiseIndicator] {
        &self.members
    }

    pub fn multiplicity(&self) -> &[usize] {
        &self.multiplicity
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn get(&self, name: &str) -> Option<&PiecewiseIndicator> {
        self.index_of(name).map(|i| &self.members[i])
    }

    pub fn refs(&self) -> Vec<&PiecewiseIndicator> {
        self.members.iter().collect()
    }

    pub fn pointwise_max(&self) -> Result<PiecewiseIndicator> {
        pointwise_max(&self.refs())
    }

    /// Ascending value functions with members repeated by multiplicity.
    pub fn sorted_envelopes(&self) -> Result<Vec<PiecewiseIndicator>> {
        sorted_envelopes(&self.refs(), &self.multiplicity)
    }
}
