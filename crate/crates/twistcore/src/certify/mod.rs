//! Rank certificates for twist families: symbolic checks, the `u -> -u`
//! eigenspace argument, a specialization plus mod-p relation sieve, and the
//! genus upper bound.

mod sieve;
mod specialize;

pub use sieve::{
    good_primes, is_good_prime, mod_p_relation_sieve, reduce_rational, relation_vectors, ModCurve,
    ModPoint, SieveVerdict, TORSION_EXPONENT,
};
pub use specialize::{sample_points, specialize, SpecializedTwist};

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_rational::BigRational;

use crate::curves::CurvePoint;
use crate::error::Result;
use crate::exactmath::RatFunc;
use crate::twistforge::TwistFamily;

/// Floor for sieve primes.
pub const PRIME_FLOOR: u64 = 50;

/// Budgets for `certify_family`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertifyConfig {
    pub samples: usize,
    pub prime_budget: usize,
    pub relation_bound: u32,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            samples: 3,
            prime_budget: 25,
            relation_bound: 10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Inconclusive => "inconclusive",
        }
    }
}

/// Data needed to rerun one sieve check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveWitness {
    pub u0: BigRational,
    pub subset: Vec<usize>,
    pub primes: Vec<u64>,
    pub relation_bound: u32,
    pub exponent: u64,
    pub excluded: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertCheck {
    pub name: String,
    pub status: CheckStatus,
    pub witness: String,
    pub sieve: Option<SieveWitness>,
}

impl CertCheck {
    fn new(name: impl Into<String>, status: CheckStatus, witness: impl Into<String>) -> Self {
        CertCheck {
            name: name.into(),
            status,
            witness: witness.into(),
            sieve: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankCertificate {
    pub id: String,
    pub params: Vec<(String, BigRational)>,
    pub claimed_rank: u32,
    pub checks: Vec<CertCheck>,
    pub certified_lower: u32,
    pub genus_upper: u32,
}

impl RankCertificate {
    /// Rank pinned exactly by the two bounds.
    pub fn exact_rank(&self) -> Option<u32> {
        (self.certified_lower == self.genus_upper).then_some(self.certified_lower)
    }
}

/// Action of `u -> -u` on a point of a family with even `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AutAction {
    Fixed,
    Negated,
    Moved,
}

fn sigma(p: &CurvePoint<RatFunc>) -> CurvePoint<RatFunc> {
    match p {
        CurvePoint::Infinity => CurvePoint::Infinity,
        CurvePoint::Affine { x, y } => CurvePoint::affine(x.negate_var(), y.negate_var()),
    }
}

/// Per-point action of `u -> -u`, or `None` when `g(-u) != g(u)`.
pub fn automorphism_actions(fam: &TwistFamily) -> Option<Vec<AutAction>> {
    if fam.g.negate_var() != fam.g {
        return None;
    }
    let e = fam.twisted_curve();
    Some(
        fam.points
            .iter()
            .map(|p| {
                let s = sigma(p);
                if &s == p {
                    AutAction::Fixed
                } else if s == e.neg(p) {
                    AutAction::Negated
                } else {
                    AutAction::Moved
                }
            })
            .collect(),
    )
}

fn subsets_desc(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..(1 << n))
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect::<Vec<usize>>())
        .filter(|s| s.len() >= 2)
        .collect();
    out.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    out
}

/// Runs one sieve check from a witness and reports whether it still excludes
/// every relation vector.
pub fn replay_sieve(fam: &TwistFamily, w: &SieveWitness) -> Result<bool> {
    let s = specialize(fam, &w.u0)?;
    let pts: Vec<CurvePoint<BigRational>> = w.subset.iter().map(|&i| s.points[i].clone()).collect();
    let v = mod_p_relation_sieve(&pts, &s.curve, &w.primes, w.relation_bound)?;
    Ok(
        matches!(v, SieveVerdict::IndependentUpToBound { excluded, exponent, .. }
        if excluded == w.excluded && exponent == w.exponent),
    )
}

/// Certifies `rank >= certified_lower` and `rank <= genus_upper` for a family.
pub fn certify_family(fam: &TwistFamily, cfg: &CertifyConfig) -> Result<RankCertificate> {
    fam.check_structure()?;
    let mut checks = Vec::new();
    checks.push(CertCheck::new(
        "g-squarefree",
        CheckStatus::Pass,
        format!("deg g = {}", fam.degree()),
    ));
    for i in 0..fam.points.len() {
        checks.push(CertCheck::new(
            format!("on-curve[P{}]", i + 1),
            CheckStatus::Pass,
            "symbolic substitution",
        ));
    }
    for (i, p) in fam.points.iter().enumerate() {
        let deg = p.x().map(|x| x.degree()).unwrap_or(0);
        checks.push(CertCheck::new(
            format!("infinite-order[P{}]", i + 1),
            CheckStatus::Pass,
            format!("x(P{}) nonconstant of degree {deg}", i + 1),
        ));
    }
    let n = fam.points.len();
    let mut lower = n.min(1) as u32;
    if n >= 2 {
        let aut_ok = match automorphism_actions(fam) {
            None => {
                checks.push(CertCheck::new(
                    "automorphism",
                    CheckStatus::Inconclusive,
                    "g(-u) != g(u)",
                ));
                false
            }
            Some(acts) => {
                let count = |a: AutAction| acts.iter().filter(|&&b| b == a).count();
                let (fx, ng, mv) = (
                    count(AutAction::Fixed),
                    count(AutAction::Negated),
                    count(AutAction::Moved),
                );
                let ok = mv == 0 && fx <= 1 && ng <= 1;
                let detail = format!("{acts:?}");
                let st = if ok {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Inconclusive
                };
                checks.push(CertCheck::new("automorphism", st, detail));
                ok
            }
        };
        if aut_ok {
            lower = n as u32;
        } else {
            lower = lower.max(sieve_lower(fam, cfg, &mut checks));
        }
    }
    let genus_upper = fam.genus_upper();
    checks.push(CertCheck::new(
        "genus",
        CheckStatus::Pass,
        format!("floor((deg g - 1)/2) = {genus_upper}"),
    ));
    Ok(RankCertificate {
        id: fam.provenance.id.clone(),
        params: fam.provenance.params.clone(),
        claimed_rank: fam.claimed_rank,
        checks,
        certified_lower: lower,
        genus_upper,
    })
}

fn sieve_lower(fam: &TwistFamily, cfg: &CertifyConfig, checks: &mut Vec<CertCheck>) -> u32 {
    let n = fam.points.len();
    let subsets = subsets_desc(n);
    let mut best = 0usize;
    let mut taken = 0usize;
    for (tried, u0) in sample_points().enumerate() {
        if taken >= cfg.samples || best == n || tried > 64 {
            break;
        }
        let Ok(s) = specialize(fam, &u0) else {
            continue;
        };
        taken += 1;
        let name = format!("sieve[u0={u0}]");
        let mut found = None;
        let mut last_relation = None;
        for sub in subsets.iter().filter(|s| s.len() > best) {
            let pts: Vec<CurvePoint<BigRational>> =
                sub.iter().map(|&i| s.points[i].clone()).collect();
            let primes = good_primes(&s.curve, &pts, PRIME_FLOOR, cfg.prime_budget);
            match mod_p_relation_sieve(&pts, &s.curve, &primes, cfg.relation_bound) {
                Ok(SieveVerdict::IndependentUpToBound {
                    primes,
                    exponent,
                    excluded,
                }) => {
                    found = Some(SieveWitness {
                        u0: u0.clone(),
                        subset: sub.clone(),
                        primes,
                        relation_bound: cfg.relation_bound,
                        exponent,
                        excluded,
                    });
                    break;
                }
                Ok(SieveVerdict::PossibleRelation { vector, .. }) => {
                    let shown: Vec<usize> = sub.iter().map(|i| i + 1).collect();
                    last_relation =
                        Some(format!("possible relation {vector:?} on points {shown:?}"));
                }
                Err(e) => last_relation = Some(e.to_string()),
            }
        }
        match found {
            Some(w) => {
                best = w.subset.len();
                let witness = format!(
                    "D = {}; points {:?} independent up to bound {} at {} primes, exponent {}, {} vectors excluded",
                    s.d,
                    w.subset.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    w.relation_bound,
                    w.primes.len(),
                    w.exponent,
                    w.excluded
                );
                let mut c = CertCheck::new(name, CheckStatus::Pass, witness);
                c.sieve = Some(w);
                checks.push(c);
            }
            None => {
                let witness = match last_relation {
                    Some(r) => format!("D = {}; {r}", s.d),
                    None => format!("D = {}; no larger subset independent", s.d),
                };
                checks.push(CertCheck::new(name, CheckStatus::Inconclusive, witness));
            }
        }
    }
    best as u32
}
