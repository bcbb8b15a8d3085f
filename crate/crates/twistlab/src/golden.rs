//! Checked-in JSON for every catalog family at its default parameters, plus
//! the upper levels of the `rem4_6` tower.

use twistcore::catalog::{build, FamilyId, FamilySpec};
use twistcore::twistforge::TwistFamily;

use crate::json::family_from_str;
use crate::LabError;

/// `(name, json)` for each golden file.
pub const GOLDENS: [(&str, &str); 11] = [
    ("cor3_2", include_str!("../data/v1/cor3_2.json")),
    ("cor3_3", include_str!("../data/v1/cor3_3.json")),
    ("mestre3_4", include_str!("../data/v1/mestre3_4.json")),
    ("thm4_1", include_str!("../data/v1/thm4_1.json")),
    ("thm4_2a", include_str!("../data/v1/thm4_2a.json")),
    ("thm4_2b", include_str!("../data/v1/thm4_2b.json")),
    ("thm4_3", include_str!("../data/v1/thm4_3.json")),
    ("thm4_5", include_str!("../data/v1/thm4_5.json")),
    ("rem4_6", include_str!("../data/v1/rem4_6.json")),
    (
        "rem4_6_level2",
        include_str!("../data/v1/rem4_6_level2.json"),
    ),
    (
        "rem4_6_level3",
        include_str!("../data/v1/rem4_6_level3.json"),
    ),
];

/// Raw golden JSON by name.
pub fn golden_json(name: &str) -> Option<&'static str> {
    GOLDENS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parsed golden family by name.
pub fn golden(name: &str) -> Result<TwistFamily, LabError> {
    let s = golden_json(name)
        .ok_or_else(|| LabError::Format(format!("no golden file named {name}")))?;
    family_from_str(s)
}

/// Golden name for a family: its id, with a level suffix for `rem4_6` above 1.
pub fn golden_name(fam: &TwistFamily) -> String {
    let id = &fam.provenance.id;
    match fam.provenance.param("level") {
        Some(l) if id == "rem4_6" && *l != num_rational::BigRational::from_integer(1.into()) => {
            format!("{id}_level{l}")
        }
        _ => id.clone(),
    }
}

/// Compares a family against the golden of the same name. Golden files store
/// default parameters only, so other parameter choices yield `None`.
pub fn compare_golden(fam: &TwistFamily) -> Option<Result<(), String>> {
    let name = golden_name(fam);
    let g = golden(&name).ok()?;
    if g.provenance.params != fam.provenance.params {
        return None;
    }
    let mut diffs = Vec::new();
    if g.curve != fam.curve {
        diffs.push("curve");
    }
    if g.g != fam.g {
        diffs.push("g");
    }
    if g.points != fam.points {
        diffs.push("points");
    }
    if g.claimed_rank != fam.claimed_rank {
        diffs.push("claimed_rank");
    }
    Some(if diffs.is_empty() {
        Ok(())
    } else {
        Err(format!("golden[{name}] differs in {}", diffs.join(", ")))
    })
}

/// Builds the default family for `id`.
pub fn build_default(id: FamilyId) -> Result<TwistFamily, LabError> {
    Ok(build(&FamilySpec::default_for(id))?)
}
