//! Named families with their displayed formulas, the matching pipeline
//! constructions, and a crosscheck between the two.

mod crosscheck;
mod families;

pub use crosscheck::{crosscheck, crosscheck_family, CheckLine, CrosscheckReport};
pub use families::{pipeline, pipeline_with_identities, rem4_6_tower};

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exactmath::q;
use crate::twistforge::TwistFamily;

/// Catalog identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyId {
    Cor3_2,
    Cor3_3,
    Mestre3_4,
    Thm4_1,
    Thm4_2a,
    Thm4_2b,
    Thm4_3,
    Thm4_5,
    Rem4_6,
}

impl FamilyId {
    pub const ALL: [FamilyId; 9] = [
        FamilyId::Cor3_2,
        FamilyId::Cor3_3,
        FamilyId::Mestre3_4,
        FamilyId::Thm4_1,
        FamilyId::Thm4_2a,
        FamilyId::Thm4_2b,
        FamilyId::Thm4_3,
        FamilyId::Thm4_5,
        FamilyId::Rem4_6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyId::Cor3_2 => "cor3_2",
            FamilyId::Cor3_3 => "cor3_3",
            FamilyId::Mestre3_4 => "mestre3_4",
            FamilyId::Thm4_1 => "thm4_1",
            FamilyId::Thm4_2a => "thm4_2a",
            FamilyId::Thm4_2b => "thm4_2b",
            FamilyId::Thm4_3 => "thm4_3",
            FamilyId::Thm4_5 => "thm4_5",
            FamilyId::Rem4_6 => "rem4_6",
        }
    }

    /// Parameter names with their default values.
    pub fn default_params(self) -> Vec<(&'static str, BigRational)> {
        match self {
            FamilyId::Cor3_2 => alloc::vec![("a", q(1)), ("b", q(2))],
            FamilyId::Cor3_3 => alloc::vec![("b", q(3)), ("c", q(1))],
            FamilyId::Mestre3_4 => alloc::vec![("a", q(1)), ("b", q(1))],
            FamilyId::Thm4_1 => alloc::vec![("a", q(1))],
            FamilyId::Thm4_2a => alloc::vec![("a", q(2))],
            FamilyId::Thm4_2b => alloc::vec![("a", q(1))],
            FamilyId::Thm4_3 => alloc::vec![("a", q(2)), ("b", q(1))],
            FamilyId::Thm4_5 => Vec::new(),
            FamilyId::Rem4_6 => alloc::vec![("level", q(1))],
        }
    }

    /// Claimed rank over `Q(u)` at default parameters.
    pub fn claimed_rank(self) -> u32 {
        match self {
            FamilyId::Cor3_2 | FamilyId::Cor3_3 | FamilyId::Mestre3_4 => 2,
            FamilyId::Rem4_6 => 1,
            _ => 3,
        }
    }

    /// Degree of `g` at default parameters.
    pub fn expected_degree(self) -> usize {
        match self {
            FamilyId::Cor3_2 | FamilyId::Cor3_3 => 6,
            FamilyId::Mestre3_4 => 14,
            FamilyId::Thm4_3 => 11,
            FamilyId::Rem4_6 => 3,
            _ => 12,
        }
    }

    /// Hypotheses enforced by `build`.
    pub fn hypotheses(self) -> &'static str {
        match self {
            FamilyId::Cor3_2 => "y^2 = x^3 + a x^2 + b x; ab != 0; disc = b^2(a^2 - 4b) != 0",
            FamilyId::Cor3_3 => "y^2 = x^3 + (b^2/4c) x^2 + b x + c; bc != 0; b^3 != 54c^2",
            FamilyId::Mestre3_4 => "y^2 = x^3 + a x + b; ab != 0; 4a^3 + 27b^2 != 0",
            FamilyId::Thm4_1 => "y^2 = x(x-1)(x-l), l = -2a^2; a != 0",
            FamilyId::Thm4_2a => "y^2 = x(x-1)(x-l), l = (1-a^2)/(a^2+2); a not in {0, 1, -1}",
            FamilyId::Thm4_2b => "y^2 = x(x-1)(x-l), l = a(a-2)/(a^2+1); a not in {0, 2}; l != 1",
            FamilyId::Thm4_3 => "y^2 = x(x-b)(x-a^2 b); ab != 0; a != 1; a != -1",
            FamilyId::Thm4_5 => "6(u^12 - 33u^8 - 33u^4 + 1) y^2 = x^3 - x",
            FamilyId::Rem4_6 => "g(u) = 6(u^3 - 33u^2 - 33u + 1) at u, u^2, u^4 (level 1, 2, 3)",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown family id {s:?}")))
    }
}

/// A family id with concrete parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub id: FamilyId,
    pub params: Vec<(String, BigRational)>,
}

impl FamilySpec {
    /// Spec at default parameters.
    pub fn default_for(id: FamilyId) -> Self {
        FamilySpec {
            id,
            params: id
                .default_params()
                .into_iter()
                .map(|(n, v)| (n.to_string(), v))
                .collect(),
        }
    }

    /// Spec with overrides; unknown names are rejected.
    pub fn new(id: FamilyId, overrides: &[(String, BigRational)]) -> Result<Self> {
        let mut spec = Self::default_for(id);
        for (name, value) in overrides {
            let slot = spec
                .params
                .iter_mut()
                .find(|(n, _)| n == name)
                .ok_or_else(|| Error::Parse(format!("{id} has no parameter {name:?}")))?;
            slot.1 = value.clone();
        }
        Ok(spec)
    }

    pub fn get(&self, name: &str) -> BigRational {
        self.params
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.clone())
            .expect("parameter declared by the family id")
    }
}

/// Catalog family built from the displayed formulas (points derived by the
/// pipeline where none are displayed).
pub fn build(spec: &FamilySpec) -> Result<TwistFamily> {
    families::build(spec)
}

/// Rebuilds the spec recorded in a family's provenance.
pub fn spec_of(fam: &TwistFamily) -> Result<FamilySpec> {
    let id: FamilyId = fam.provenance.id.parse()?;
    FamilySpec::new(id, &fam.provenance.params)
}
