//! Squarefree parts of the homogenized form `F(a, b) = b^(2k) g(a/b)` over a
//! box of coprime pairs, the counting function `|S(x)|`, exponent fits, and
//! sieve certification of each counted twist.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twistcore::certify::{
    good_primes, mod_p_relation_sieve, specialize, CertifyConfig, SieveVerdict, PRIME_FLOOR,
};
use twistcore::curves::CurvePoint;
use twistcore::exactmath::{factor_biguint, factor_u64};
use twistcore::twistforge::TwistFamily;
use twistcore::{BigRational, UniPoly};

use crate::LabError;

/// `F(a, b) = C b^(2k - deg g) prod P_i(a, b)` with primitive integer forms
/// `P_i`. `C = n d` when `g = (n/d) prod P_i`, so `F` is an integer in the
/// square class of `b^(2k) g(a/b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogForm {
    pub g: UniPoly,
    pub k: usize,
    pub content: BigInt,
    pub factors: Vec<Vec<BigInt>>,
    pub b_power: usize,
    content_primes: Vec<(BigUint, u32)>,
}

impl HomogForm {
    pub fn new(g: &UniPoly, factors: &[UniPoly]) -> Result<Self, LabError> {
        let deg = g
            .degree()
            .ok_or_else(|| LabError::Format("g is zero".into()))?;
        let k = deg.div_ceil(2);
        let split = |fs: &[UniPoly]| -> Option<(BigRational, Vec<Vec<BigInt>>)> {
            let prims: Vec<(BigRational, Vec<BigInt>)> = fs
                .iter()
                .filter(|f| !f.is_constant())
                .map(|f| f.primitive_integer())
                .collect();
            let prod = prims.iter().fold(UniPoly::one(), |acc, (_, c)| {
                &acc * &UniPoly::from_bigints(c)
            });
            let c = g.lead() / prod.lead();
            (prod.scale(&c) == *g).then(|| (c, prims.into_iter().map(|(_, v)| v).collect()))
        };
        let (c, factors) = split(factors)
            .or_else(|| split(std::slice::from_ref(g)))
            .expect("g splits as itself");
        let content = c.numer() * c.denom();
        let content_primes = factor_biguint(content.magnitude());
        Ok(HomogForm {
            g: g.clone(),
            k,
            content,
            factors,
            b_power: 2 * k - deg,
            content_primes,
        })
    }

    pub fn from_family(fam: &TwistFamily) -> Result<Self, LabError> {
        Self::new(&fam.g, &fam.g_factors)
    }

    fn factor_value(p: &[BigInt], a: &BigInt, b: &BigInt) -> BigInt {
        let d = p.len() - 1;
        let mut apow = vec![BigInt::one(); d + 1];
        let mut bpow = vec![BigInt::one(); d + 1];
        for i in 1..=d {
            apow[i] = &apow[i - 1] * a;
            bpow[i] = &bpow[i - 1] * b;
        }
        p.iter()
            .enumerate()
            .map(|(i, c)| c * &apow[i] * &bpow[d - i])
            .sum()
    }

    fn pieces(&self, a: i64, b: i64) -> Vec<BigInt> {
        let (ab, bb) = (BigInt::from(a), BigInt::from(b));
        self.factors
            .iter()
            .map(|p| Self::factor_value(p, &ab, &bb))
            .collect()
    }

    /// Exact `F(a, b)`.
    pub fn eval(&self, a: i64, b: i64) -> BigInt {
        let bp = num_traits::pow(BigInt::from(b), self.b_power);
        self.pieces(a, b)
            .iter()
            .fold(&self.content * bp, |acc, v| acc * v)
    }

    /// Squarefree part of `F(a, b)`, computed factor by factor; `None` when
    /// `F(a, b) = 0`.
    pub fn squarefree_part(&self, a: i64, b: i64) -> Option<BigInt> {
        let pieces = self.pieces(a, b);
        if pieces.iter().any(|v| v.is_zero()) {
            return None;
        }
        let mut primes: Vec<(BigUint, u32)> = self.content_primes.clone();
        if self.b_power % 2 == 1 {
            primes.extend(
                factor_u64(b.unsigned_abs())
                    .into_iter()
                    .map(|(p, e)| (BigUint::from(p), e)),
            );
        }
        let mut negative = self.content.is_negative() ^ (self.b_power % 2 == 1 && b < 0);
        for v in &pieces {
            negative ^= v.is_negative();
            match v.magnitude().to_u64() {
                Some(m) => primes.extend(
                    factor_u64(m)
                        .into_iter()
                        .map(|(p, e)| (BigUint::from(p), e)),
                ),
                None => primes.extend(factor_biguint(v.magnitude())),
            }
        }
        primes.sort();
        let mut d = BigUint::one();
        let mut i = 0;
        while i < primes.len() {
            let mut j = i;
            let mut e = 0;
            while j < primes.len() && primes[j].0 == primes[i].0 {
                e += primes[j].1;
                j += 1;
            }
            if e % 2 == 1 {
                d *= &primes[i].0;
            }
            i = j;
        }
        Some(BigInt::from_biguint(
            if negative { Sign::Minus } else { Sign::Plus },
            d,
        ))
    }
}

/// Free function form of [`HomogForm::eval`].
pub fn eval_form(f: &HomogForm, a: i64, b: i64) -> BigInt {
    f.eval(a, b)
}

mod bigint_str {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

mod bigint_vec_str {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// A squarefree `D` in `S(x)` with its smallest witness pair by `(a + b, a)`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct DensityEntry {
    #[serde(with = "bigint_str")]
    pub d: BigInt,
    pub a: i64,
    pub b: i64,
}

/// Replayable record of one sieve-certified `D`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct DensityWitness {
    #[serde(with = "bigint_str")]
    pub d: BigInt,
    pub a: i64,
    pub b: i64,
    pub primes: Vec<u64>,
    pub relation_bound: u32,
    pub exponent: u64,
    pub excluded: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub slope_stderr: f64,
    pub band: [f64; 2],
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub family_id: String,
    pub grid: i64,
    pub modulus: i64,
    #[serde(with = "bigint_str")]
    pub x_max: BigInt,
    pub k: usize,
    pub predicted_exponent: f64,
    pub pairs_used: u64,
    #[serde(with = "bigint_str")]
    pub max_abs_f: BigInt,
    #[serde(with = "bigint_vec_str")]
    pub xs: Vec<BigInt>,
    pub counts: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified_counts: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<ExponentFit>,
    pub entries: Vec<DensityEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<DensityWitness>,
}

impl DensityReport {
    /// `(x, |S(x)|)` pairs.
    pub fn series(&self) -> Vec<(BigInt, u64)> {
        self.xs
            .iter()
            .cloned()
            .zip(self.counts.iter().copied())
            .collect()
    }

    /// Number of entries with `|D| < x`.
    pub fn count_below(&self, x: &BigInt) -> u64 {
        self.entries
            .iter()
            .filter(|e| e.d.magnitude() < x.magnitude())
            .count() as u64
    }
}

type Witnesses = BTreeMap<BigInt, (i64, i64)>;

fn better(new: (i64, i64), old: (i64, i64)) -> bool {
    (new.0 + new.1, new.0) < (old.0 + old.1, old.0)
}

fn insert(m: &mut Witnesses, d: BigInt, ab: (i64, i64)) {
    match m.get(&d) {
        Some(old) if !better(ab, *old) => {}
        _ => {
            m.insert(d, ab);
        }
    }
}

/// Geometric x-grid `10^3, 10^4, ...` below `cap`, followed by `cap`.
pub fn default_x_grid(cap: &BigInt) -> Vec<BigInt> {
    let mut xs = Vec::new();
    let mut x = BigInt::from(1000);
    while &x < cap {
        xs.push(x.clone());
        x *= 10;
    }
    xs.push(cap.clone());
    xs
}

/// Collects the distinct squarefree parts `D` of `F(a, b)` with `|D| < x_max`
/// over coprime `1 <= a, b <= grid` with `a = b = 1 mod M`.
pub fn enumerate_s(
    form: &HomogForm,
    family_id: &str,
    grid: i64,
    modulus: i64,
    x_max: &BigInt,
) -> DensityReport {
    assert!(
        grid >= 1 && modulus >= 1,
        "grid and modulus must be positive"
    );
    let m = modulus;
    let (map, used, max_f) = (1..=grid)
        .into_par_iter()
        .filter(|a| (a - 1) % m == 0)
        .fold(
            || (Witnesses::new(), 0u64, BigInt::zero()),
            |(mut w, mut used, mut max_f), a| {
                for b in (1..=grid).filter(|b| (b - 1) % m == 0 && a.gcd(b) == 1) {
                    let Some(d) = form.squarefree_part(a, b) else {
                        continue;
                    };
                    used += 1;
                    let f = form.eval(a, b).abs();
                    if f > max_f {
                        max_f = f;
                    }
                    if d.magnitude() < x_max.magnitude() {
                        insert(&mut w, d, (a, b));
                    }
                }
                (w, used, max_f)
            },
        )
        .reduce(
            || (Witnesses::new(), 0u64, BigInt::zero()),
            |(mut w1, u1, m1), (w2, u2, m2)| {
                for (d, ab) in w2 {
                    insert(&mut w1, d, ab);
                }
                (w1, u1 + u2, m1.max(m2))
            },
        );
    let entries: Vec<DensityEntry> = map
        .into_iter()
        .map(|(d, (a, b))| DensityEntry { d, a, b })
        .collect();
    let cap = (&max_f + 1u32).min(x_max.clone());
    let xs = default_x_grid(&cap);
    let mut report = DensityReport {
        family_id: family_id.into(),
        grid,
        modulus,
        x_max: x_max.clone(),
        k: form.k,
        predicted_exponent: 1.0 / form.k as f64,
        pairs_used: used,
        max_abs_f: max_f,
        xs: xs.clone(),
        counts: Vec::new(),
        certified_counts: None,
        fit: None,
        entries,
        witnesses: Vec::new(),
    };
    report.counts = xs.iter().map(|x| report.count_below(x)).collect();
    report
}

/// Least-squares fit of `log |S(x)|` against `log x` over grid points with
/// nonzero counts.
pub fn fit_exponent(report: &DensityReport) -> Result<ExponentFit, LabError> {
    let pts: Vec<(f64, f64)> = report
        .series()
        .into_iter()
        .filter(|(_, c)| *c > 0)
        .map(|(x, c)| (x.to_f64().unwrap_or(f64::MAX).ln(), (c as f64).ln()))
        .collect();
    fit_points(&pts)
}

/// Ordinary least squares on `(x, y)` pairs; needs at least five points.
pub fn fit_points(pts: &[(f64, f64)]) -> Result<ExponentFit, LabError> {
    if pts.len() < 5 {
        return Err(LabError::Math(twistcore::Error::InsufficientData(format!(
            "{} grid points with nonzero counts, need 5",
            pts.len()
        ))));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let residual = (sse / n).sqrt();
    let slope_stderr = (sse / (n - 2.0) / sxx).sqrt();
    Ok(ExponentFit {
        slope,
        intercept,
        residual,
        slope_stderr,
        band: [slope - 1.96 * slope_stderr, slope + 1.96 * slope_stderr],
    })
}

fn certify_entry(
    fam: &TwistFamily,
    e: &DensityEntry,
    cfg: &CertifyConfig,
) -> Option<DensityWitness> {
    let u0 = BigRational::new(e.a.into(), e.b.into());
    let s = specialize(fam, &u0).ok()?;
    if s.d != e.d {
        return None;
    }
    let primes = good_primes(&s.curve, &s.points, PRIME_FLOOR, cfg.prime_budget);
    match mod_p_relation_sieve(&s.points, &s.curve, &primes, cfg.relation_bound).ok()? {
        SieveVerdict::IndependentUpToBound {
            primes,
            exponent,
            excluded,
        } => Some(DensityWitness {
            d: e.d.clone(),
            a: e.a,
            b: e.b,
            primes,
            relation_bound: cfg.relation_bound,
            exponent,
            excluded,
        }),
        SieveVerdict::PossibleRelation { .. } => None,
    }
}

/// Attaches sieve verdicts: a `D` is certified when the family's points,
/// specialized at `u0 = a/b`, survive the relation sieve.
pub fn certified_density(
    fam: &TwistFamily,
    report: &DensityReport,
    cfg: &CertifyConfig,
) -> DensityReport {
    let witnesses: Vec<DensityWitness> = report
        .entries
        .par_iter()
        .filter_map(|e| certify_entry(fam, e, cfg))
        .collect();
    let mut out = report.clone();
    out.certified_counts = Some(
        report
            .xs
            .iter()
            .map(|x| {
                witnesses
                    .iter()
                    .filter(|w| w.d.magnitude() < x.magnitude())
                    .count() as u64
            })
            .collect(),
    );
    out.witnesses = witnesses;
    out
}

/// Reruns a certified-density witness from scratch.
pub fn replay(fam: &TwistFamily, w: &DensityWitness) -> bool {
    let u0 = BigRational::new(w.a.into(), w.b.into());
    let Ok(s) = specialize(fam, &u0) else {
        return false;
    };
    if s.d != w.d || s.points.iter().any(CurvePoint::is_infinity) {
        return false;
    }
    matches!(
        mod_p_relation_sieve(&s.points, &s.curve, &w.primes, w.relation_bound),
        Ok(SieveVerdict::IndependentUpToBound { exponent, excluded, .. })
            if exponent == w.exponent && excluded == w.excluded
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use twistcore::catalog::{build, FamilyId, FamilySpec};
    use twistcore::exactmath::squarefree_part_int;

    fn form(id: FamilyId) -> (TwistFamily, HomogForm) {
        let fam = build(&FamilySpec::default_for(id)).unwrap();
        let f = HomogForm::from_family(&fam).unwrap();
        (fam, f)
    }

    #[test]
    fn thm4_5_values() {
        let (_, f) = form(FamilyId::Thm4_5);
        assert_eq!(f.k, 6);
        assert_eq!(eval_form(&f, 2, 1), BigInt::from(-29274));
        assert_eq!(eval_form(&f, 0, 1), BigInt::from(6));
        let lhs = eval_form(&f, 6, 10);
        assert_eq!(lhs, eval_form(&f, 3, 5) * BigInt::from(2).pow(12));
    }

    #[test]
    fn odd_degree_form_is_homogeneous() {
        let (_, f) = form(FamilyId::Thm4_3);
        assert_eq!(f.b_power, 1);
        assert_eq!(
            eval_form(&f, 4, 6),
            eval_form(&f, 2, 3) * BigInt::from(2).pow(12)
        );
        let (_, f) = form(FamilyId::Rem4_6);
        assert_eq!(eval_form(&f, 3, 1), BigInt::from(6 * (27 - 297 - 99 + 1)));
    }

    #[test]
    fn factored_squarefree_part_matches_direct() {
        for id in FamilyId::ALL {
            let (_, f) = form(id);
            for (a, b) in [(1, 1), (2, 3), (7, 5), (13, 2), (1, 9)] {
                let v = eval_form(&f, a, b);
                if v.is_zero() {
                    assert!(f.squarefree_part(a, b).is_none());
                    continue;
                }
                assert_eq!(
                    f.squarefree_part(a, b).unwrap(),
                    squarefree_part_int(&v).unwrap(),
                    "{id} {a} {b}"
                );
            }
        }
    }

    #[test]
    fn rational_content_scaled_to_integer() {
        let g = UniPoly::new(vec![
            BigRational::new(1.into(), 2.into()),
            BigRational::zero(),
            BigRational::new(3.into(), 2.into()),
        ]);
        let f = HomogForm::new(&g, &[]).unwrap();
        assert_eq!(f.content, BigInt::from(2));
        assert_eq!(eval_form(&f, 1, 1), BigInt::from(8));
    }

    #[test]
    fn single_cell_grid() {
        let (_, f) = form(FamilyId::Thm4_5);
        let big = BigInt::from(10).pow(40);
        let r = enumerate_s(&f, "thm4_5", 1, 1, &big);
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.entries[0].d, f.squarefree_part(1, 1).unwrap());
        let r = enumerate_s(&f, "thm4_5", 1, 1, &BigInt::from(2));
        assert!(r.entries.is_empty());
    }

    #[test]
    fn matches_naive_enumeration() {
        let (_, f) = form(FamilyId::Thm4_5);
        let x_max = BigInt::from(10).pow(12);
        let r = enumerate_s(&f, "thm4_5", 30, 1, &x_max);
        assert!(r.counts.windows(2).all(|w| w[0] <= w[1]));
        let mut naive: BTreeMap<BigInt, (i64, i64)> = BTreeMap::new();
        let mut pairs: Vec<(i64, i64)> = (1..=30i64)
            .flat_map(|a| (1..=30i64).map(move |b| (a, b)))
            .filter(|(a, b)| a.gcd(b) == 1)
            .collect();
        pairs.sort_by_key(|&(a, b)| (a + b, a));
        for (a, b) in pairs {
            let v = f.eval(a, b);
            if v.is_zero() {
                continue;
            }
            let d = squarefree_part_int(&v).unwrap();
            if d.magnitude() < x_max.magnitude() {
                naive.entry(d).or_insert((a, b));
            }
        }
        let got: BTreeMap<BigInt, (i64, i64)> = r
            .entries
            .iter()
            .map(|e| (e.d.clone(), (e.a, e.b)))
            .collect();
        assert_eq!(got, naive);
    }

    #[test]
    fn modulus_filters_pairs() {
        let (_, f) = form(FamilyId::Cor3_2);
        let r = enumerate_s(&f, "cor3_2", 30, 4, &BigInt::from(10).pow(30));
        assert!(r.entries.iter().all(|e| e.a % 4 == 1 && e.b % 4 == 1));
    }

    #[test]
    fn synthetic_power_law_fit() {
        let pts: Vec<(f64, f64)> = (3..12)
            .map(|j| {
                let x = 10f64.powi(j);
                (x.ln(), (7.0 * x.powf(1.0 / 3.0)).ln())
            })
            .collect();
        let fit = fit_points(&pts).unwrap();
        assert!((fit.slope - 1.0 / 3.0).abs() < 1e-6);
        assert!(fit_points(&pts[..4]).is_err());
    }

    #[test]
    fn report_json_round_trip() {
        let (fam, f) = form(FamilyId::Thm4_5);
        let r = enumerate_s(&f, "thm4_5", 12, 1, &BigInt::from(10).pow(40));
        let r = certified_density(&fam, &r, &CertifyConfig::default());
        let s = serde_json::to_string(&r).unwrap();
        let back: DensityReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        for w in &r.witnesses {
            assert!(replay(&fam, w));
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::test_runner::Config::with_cases(64))]
        #[test]
        fn factorwise_part_matches_direct(a in -400i64..400, b in -400i64..400, pick in 0usize..3) {
            let id = [FamilyId::Cor3_2, FamilyId::Thm4_3, FamilyId::Thm4_5][pick];
            let (_, f) = form(id);
            let v = f.eval(a, b);
            match f.squarefree_part(a, b) {
                None => proptest::prop_assert!(v.is_zero()),
                Some(d) => proptest::prop_assert_eq!(d, squarefree_part_int(&v).unwrap()),
            }
        }
    }
}
