use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::Zero;

use crate::curves::CurvePoint;
use crate::exactmath::RatFunc;
use crate::twistforge::{same_square_class, TwistFamily};

use super::families::transport;
use super::{build, pipeline, spec_of, FamilySpec};

/// One named check in a crosscheck report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckLine {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

/// Itemized comparison between a catalog family and its pipeline construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrosscheckReport {
    pub id: String,
    pub params: Vec<(String, BigRational)>,
    pub lines: Vec<CheckLine>,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        !self.lines.is_empty() && self.lines.iter().all(|l| l.ok)
    }

    pub fn failures(&self) -> Vec<&CheckLine> {
        self.lines.iter().filter(|l| !l.ok).collect()
    }

    fn push(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.lines.push(CheckLine {
            name: name.into(),
            ok,
            detail: detail.into(),
        });
    }
}

/// Builds the catalog family and the pipeline family for `spec` and compares them.
pub fn crosscheck(spec: &FamilySpec) -> CrosscheckReport {
    let mut report = CrosscheckReport {
        id: spec.id.to_string(),
        params: spec.params.clone(),
        lines: Vec::new(),
    };
    match build(spec) {
        Ok(fam) => compare(&fam, spec, &mut report),
        Err(e) => report.push("catalog-build", false, e.to_string()),
    }
    report
}

/// Crosscheck of a possibly modified family against a fresh pipeline run
/// and a fresh catalog build for the spec recorded in its provenance.
pub fn crosscheck_family(fam: &TwistFamily) -> CrosscheckReport {
    let mut report = CrosscheckReport {
        id: fam.provenance.id.clone(),
        params: fam.provenance.params.clone(),
        lines: Vec::new(),
    };
    let spec = match spec_of(fam) {
        Ok(s) => s,
        Err(e) => {
            report.push("provenance", false, e.to_string());
            return report;
        }
    };
    compare(fam, &spec, &mut report);
    match build(&spec) {
        Ok(cat) => {
            report.push("catalog-g", cat.g == fam.g, "g equals the catalog g");
            let same = cat.points == fam.points;
            report.push("catalog-points", same, "points equal the catalog points");
        }
        Err(e) => report.push("catalog-build", false, e.to_string()),
    }
    report
}

fn compare(fam: &TwistFamily, spec: &FamilySpec, report: &mut CrosscheckReport) {
    match fam.check_structure() {
        Ok(()) => report.push(
            "structure",
            true,
            "squarefree g, points on curve and nonconstant",
        ),
        Err(e) => report.push("structure", false, e.to_string()),
    }
    let pipe = match pipeline(spec) {
        Ok(p) => p,
        Err(e) => {
            report.push("pipeline-build", false, e.to_string());
            return;
        }
    };
    report.push("curve", pipe.curve == fam.curve, "same cubic f");
    let odd = fam.curve.e2.is_zero() && fam.curve.e0.is_zero();
    let direct = same_square_class(&fam.g, &pipe.g);
    let flipped = odd && same_square_class(&fam.g, &-&pipe.g);
    let detail = if direct {
        "g agrees up to squares".to_string()
    } else if flipped {
        "g agrees with -g_pipeline up to squares (x -> -x)".to_string()
    } else {
        format!("catalog g = {} vs pipeline g = {}", fam.g, pipe.g)
    };
    report.push("g-square-class", direct || flipped, detail);
    let moved = match transport(&pipe, &fam.g) {
        Ok(m) => m,
        Err(e) => {
            report.push("points", false, e.to_string());
            return;
        }
    };
    let e = fam.twisted_curve();
    let mut torsion: Vec<CurvePoint<RatFunc>> = alloc::vec![CurvePoint::Infinity];
    for r in fam.curve.rational_two_torsion() {
        torsion.push(CurvePoint::affine(RatFunc::constant(r), RatFunc::zero()));
    }
    for (i, p) in fam.points.iter().enumerate() {
        let name = format!("P{}", i + 1);
        let hit = moved.iter().enumerate().find_map(|(j, qp)| {
            torsion.iter().find_map(|t| {
                let s = e.add(qp, t);
                if &s == p {
                    Some(format!("= Q{} + T", j + 1))
                } else if e.neg(&s) == *p {
                    Some(format!("= -(Q{} + T)", j + 1))
                } else {
                    None
                }
            })
        });
        match hit {
            Some(d) => report.push(name, true, d),
            None => report.push(
                name,
                false,
                "not plus or minus a pipeline point up to 2-torsion",
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::FamilyId;

    #[test]
    fn tampered_point_is_reported() {
        let mut fam = build(&FamilySpec::default_for(FamilyId::Thm4_5)).unwrap();
        if let CurvePoint::Affine { y, .. } = &mut fam.points[0] {
            *y = y.scale(&crate::exactmath::q(2));
        }
        let r = crosscheck_family(&fam);
        assert!(!r.passed());
        let names: Vec<&str> = r.failures().iter().map(|l| l.name.as_str()).collect();
        assert!(names.contains(&"structure"));
        assert!(names.contains(&"P1"));
    }
}
