//! JSON encodings. Rationals are `"n"` or `"n/d"` strings; polynomials are
//! coefficient arrays, lowest degree first.

use serde::{Deserialize, Serialize};
use twistcore::catalog::CrosscheckReport;
use twistcore::certify::{CertCheck, CheckStatus, RankCertificate, SieveWitness, SpecializedTwist};
use twistcore::curves::{CubicCurve, CurvePoint};
use twistcore::exactmath::{format_rational, parse_rational};
use twistcore::twistforge::{Provenance, TwistFamily};
use twistcore::{BigRational, RatFunc, UniPoly};

use crate::LabError;

pub const FAMILY_SCHEMA: &str = "twistlab.family/v1";
pub const CERTIFICATE_SCHEMA: &str = "twistlab.certificate/v1";

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct RatFuncJson {
    pub num: Vec<String>,
    pub den: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(untagged)]
pub enum PointJson {
    Affine { x: RatFuncJson, y: RatFuncJson },
    Infinity(String),
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct CurveJson {
    pub e2: String,
    pub e1: String,
    pub e0: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ParamJson {
    pub name: String,
    pub value: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ProvenanceJson {
    pub id: String,
    pub source: String,
    pub params: Vec<ParamJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_of_u: Option<RatFuncJson>,
    #[serde(default)]
    pub note: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct FamilyJson {
    pub schema: String,
    pub curve: CurveJson,
    pub g: Vec<String>,
    pub points: Vec<PointJson>,
    pub claimed_rank: u32,
    pub provenance: ProvenanceJson,
    #[serde(default)]
    pub g_factors: Vec<Vec<String>>,
}

pub fn q_str(c: &BigRational) -> String {
    format_rational(c)
}

pub fn q_parse(s: &str) -> Result<BigRational, LabError> {
    Ok(parse_rational(s)?)
}

pub fn poly_json(p: &UniPoly) -> Vec<String> {
    p.coeffs().iter().map(q_str).collect()
}

pub fn poly_parse(v: &[String]) -> Result<UniPoly, LabError> {
    Ok(UniPoly::new(
        v.iter()
            .map(|s| q_parse(s))
            .collect::<Result<Vec<_>, _>>()?,
    ))
}

pub fn ratfunc_json(r: &RatFunc) -> RatFuncJson {
    RatFuncJson {
        num: poly_json(r.num()),
        den: poly_json(r.den()),
    }
}

pub fn ratfunc_parse(r: &RatFuncJson) -> Result<RatFunc, LabError> {
    Ok(RatFunc::new(poly_parse(&r.num)?, poly_parse(&r.den)?)?)
}

pub fn params_json(params: &[(String, BigRational)]) -> Vec<ParamJson> {
    params
        .iter()
        .map(|(n, v)| ParamJson {
            name: n.clone(),
            value: q_str(v),
        })
        .collect()
}

pub fn params_parse(params: &[ParamJson]) -> Result<Vec<(String, BigRational)>, LabError> {
    params
        .iter()
        .map(|p| Ok((p.name.clone(), q_parse(&p.value)?)))
        .collect()
}

pub fn family_json(fam: &TwistFamily) -> FamilyJson {
    let c = &fam.curve;
    FamilyJson {
        schema: FAMILY_SCHEMA.into(),
        curve: CurveJson {
            e2: q_str(&c.e2),
            e1: q_str(&c.e1),
            e0: q_str(&c.e0),
        },
        g: poly_json(&fam.g),
        points: fam
            .points
            .iter()
            .map(|p| match p {
                CurvePoint::Infinity => PointJson::Infinity("infinity".into()),
                CurvePoint::Affine { x, y } => PointJson::Affine {
                    x: ratfunc_json(x),
                    y: ratfunc_json(y),
                },
            })
            .collect(),
        claimed_rank: fam.claimed_rank,
        provenance: ProvenanceJson {
            id: fam.provenance.id.clone(),
            source: fam.provenance.source.clone(),
            params: params_json(&fam.provenance.params),
            t_of_u: fam.provenance.t_of_u.as_ref().map(ratfunc_json),
            note: fam.provenance.note.clone(),
        },
        g_factors: fam.g_factors.iter().map(poly_json).collect(),
    }
}

/// Decodes a family without checking its mathematical invariants.
pub fn family_parse(j: &FamilyJson) -> Result<TwistFamily, LabError> {
    if j.schema != FAMILY_SCHEMA {
        return Err(LabError::Format(format!(
            "unsupported schema {:?}",
            j.schema
        )));
    }
    let curve = CubicCurve::new(
        q_parse(&j.curve.e2)?,
        q_parse(&j.curve.e1)?,
        q_parse(&j.curve.e0)?,
    )?;
    let points = j
        .points
        .iter()
        .map(|p| match p {
            PointJson::Infinity(s) if s == "infinity" => Ok(CurvePoint::Infinity),
            PointJson::Infinity(s) => Err(LabError::Format(format!("bad point {s:?}"))),
            PointJson::Affine { x, y } => {
                Ok(CurvePoint::affine(ratfunc_parse(x)?, ratfunc_parse(y)?))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let p = &j.provenance;
    Ok(TwistFamily {
        curve,
        g: poly_parse(&j.g)?,
        points,
        claimed_rank: j.claimed_rank,
        provenance: Provenance {
            id: p.id.clone(),
            source: p.source.clone(),
            params: params_parse(&p.params)?,
            t_of_u: p.t_of_u.as_ref().map(ratfunc_parse).transpose()?,
            note: p.note.clone(),
        },
        g_factors: j
            .g_factors
            .iter()
            .map(|f| poly_parse(f))
            .collect::<Result<Vec<_>, _>>()?,
    })
}

pub fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn family_to_string(fam: &TwistFamily) -> String {
    to_pretty(&family_json(fam))
}

pub fn family_from_str(s: &str) -> Result<TwistFamily, LabError> {
    let j: FamilyJson = serde_json::from_str(s).map_err(|e| LabError::Format(e.to_string()))?;
    family_parse(&j)
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct SieveWitnessJson {
    pub u0: String,
    pub subset: Vec<usize>,
    pub primes: Vec<u64>,
    pub relation_bound: u32,
    pub exponent: u64,
    pub excluded: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct CheckJson {
    pub name: String,
    pub status: String,
    pub witness: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sieve: Option<SieveWitnessJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct CertificateJson {
    pub schema: String,
    pub id: String,
    pub params: Vec<ParamJson>,
    pub claimed_rank: u32,
    pub certified_lower: u32,
    pub genus_upper: u32,
    pub checks: Vec<CheckJson>,
}

pub fn sieve_witness_json(w: &SieveWitness) -> SieveWitnessJson {
    SieveWitnessJson {
        u0: q_str(&w.u0),
        subset: w.subset.clone(),
        primes: w.primes.clone(),
        relation_bound: w.relation_bound,
        exponent: w.exponent,
        excluded: w.excluded,
    }
}

pub fn sieve_witness_parse(w: &SieveWitnessJson) -> Result<SieveWitness, LabError> {
    Ok(SieveWitness {
        u0: q_parse(&w.u0)?,
        subset: w.subset.clone(),
        primes: w.primes.clone(),
        relation_bound: w.relation_bound,
        exponent: w.exponent,
        excluded: w.excluded,
    })
}

fn check_json(c: &CertCheck) -> CheckJson {
    CheckJson {
        name: c.name.clone(),
        status: c.status.as_str().into(),
        witness: c.witness.clone(),
        sieve: c.sieve.as_ref().map(sieve_witness_json),
    }
}

pub fn certificate_json(c: &RankCertificate) -> CertificateJson {
    CertificateJson {
        schema: CERTIFICATE_SCHEMA.into(),
        id: c.id.clone(),
        params: params_json(&c.params),
        claimed_rank: c.claimed_rank,
        certified_lower: c.certified_lower,
        genus_upper: c.genus_upper,
        checks: c.checks.iter().map(check_json).collect(),
    }
}

pub fn status_parse(s: &str) -> Result<CheckStatus, LabError> {
    match s {
        "pass" => Ok(CheckStatus::Pass),
        "fail" => Ok(CheckStatus::Fail),
        "inconclusive" => Ok(CheckStatus::Inconclusive),
        _ => Err(LabError::Format(format!("bad status {s:?}"))),
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct QPointJson {
    pub x: String,
    pub y: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct SpecializedJson {
    pub u0: String,
    pub d: String,
    pub curve: CurveJson,
    pub points: Vec<Option<QPointJson>>,
}

pub fn specialized_json(s: &SpecializedTwist) -> SpecializedJson {
    let c = &s.curve.base;
    SpecializedJson {
        u0: q_str(&s.u0),
        d: s.d.to_string(),
        curve: CurveJson {
            e2: q_str(&c.e2),
            e1: q_str(&c.e1),
            e0: q_str(&c.e0),
        },
        points: s
            .points
            .iter()
            .map(|p| match p {
                CurvePoint::Infinity => None,
                CurvePoint::Affine { x, y } => Some(QPointJson {
                    x: q_str(x),
                    y: q_str(y),
                }),
            })
            .collect(),
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct CheckLineJson {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct CrosscheckJson {
    pub id: String,
    pub params: Vec<ParamJson>,
    pub passed: bool,
    pub lines: Vec<CheckLineJson>,
}

pub fn crosscheck_json(r: &CrosscheckReport) -> CrosscheckJson {
    CrosscheckJson {
        id: r.id.clone(),
        params: params_json(&r.params),
        passed: r.passed(),
        lines: r
            .lines
            .iter()
            .map(|l| CheckLineJson {
                name: l.name.clone(),
                ok: l.ok,
                detail: l.detail.clone(),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use twistcore::catalog::{build, FamilyId, FamilySpec};

    #[test]
    fn family_round_trip_is_exact() {
        for id in FamilyId::ALL {
            let fam = build(&FamilySpec::default_for(id)).unwrap();
            let s = family_to_string(&fam);
            let back = family_from_str(&s).unwrap();
            assert_eq!(back, fam, "{id}");
            assert_eq!(family_to_string(&back), s, "{id}");
        }
    }

    #[test]
    fn rationals_are_strings() {
        let fam = build(&FamilySpec::default_for(FamilyId::Cor3_2)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&family_to_string(&fam)).unwrap();
        assert_eq!(v["curve"]["e1"], "2");
        assert!(v["points"][0]["y"]["num"][0]
            .as_str()
            .unwrap()
            .contains('/'));
    }

    #[test]
    fn bad_schema_rejected() {
        let fam = build(&FamilySpec::default_for(FamilyId::Thm4_5)).unwrap();
        let s = family_to_string(&fam).replace(FAMILY_SCHEMA, "other/v9");
        assert!(family_from_str(&s).is_err());
    }

    proptest::proptest! {
        #[test]
        fn rational_strings_round_trip(n in proptest::prelude::any::<i128>(), d in 1u64..) {
            let c = BigRational::new(n.into(), d.into());
            proptest::prop_assert_eq!(q_parse(&q_str(&c)).unwrap(), c);
        }
    }
}
