use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::curves::{CurvePoint, TwistedCurve};
use crate::error::{Error, Result};
use crate::exactmath::intfact::{mulmod, powmod};
use crate::exactmath::is_prime_u64;

/// Exponent of every torsion group over `Q`: `lcm(1..=10, 12)`.
pub const TORSION_EXPONENT: u64 = 2520;

/// Point over `F_p`; `None` is the point at infinity.
pub type ModPoint = Option<(u64, u64)>;

/// `D y^2 = x^3 + e2 x^2 + e1 x + e0` over `F_p`, `p` odd of good reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModCurve {
    pub p: u64,
    pub e2: u64,
    pub e1: u64,
    pub e0: u64,
    pub d: u64,
}

fn reduce_int(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue fits")
}

/// `c mod p`, or `None` when `p` divides the denominator.
pub fn reduce_rational(c: &BigRational, p: u64) -> Option<u64> {
    let d = reduce_int(c.denom(), p);
    if d == 0 {
        return None;
    }
    Some(mulmod(reduce_int(c.numer(), p), powmod(d, p - 2, p), p))
}

fn p_divides(c: &BigRational, p: u64) -> bool {
    let pb = BigInt::from(p);
    (c.numer() % &pb).is_zero() || (c.denom() % &pb).is_zero()
}

/// `p` is odd, prime, of good reduction for the curve and coprime to every
/// coordinate denominator of `points`.
pub fn is_good_prime(
    curve: &TwistedCurve<BigRational>,
    points: &[CurvePoint<BigRational>],
    p: u64,
) -> bool {
    if p < 3 || !is_prime_u64(p) {
        return false;
    }
    let b = &curve.base;
    if p_divides(&curve.d, p) || p_divides(&b.disc(), p) {
        return false;
    }
    let pb = BigInt::from(p);
    let coeff_ok = [&b.e2, &b.e1, &b.e0]
        .iter()
        .all(|c| !(c.denom() % &pb).is_zero());
    coeff_ok
        && points
            .iter()
            .all(|pt| !(TwistedCurve::denominator(pt) % &pb).is_zero())
}

/// The first `count` good primes above `floor`, in increasing order.
pub fn good_primes(
    curve: &TwistedCurve<BigRational>,
    points: &[CurvePoint<BigRational>],
    floor: u64,
    count: usize,
) -> Vec<u64> {
    (floor + 1..)
        .filter(|&p| is_good_prime(curve, points, p))
        .take(count)
        .collect()
}

impl ModCurve {
    pub fn reduce(curve: &TwistedCurve<BigRational>, p: u64) -> Result<Self> {
        if !is_good_prime(curve, &[], p) {
            return Err(Error::BadPrime(p));
        }
        let r = |c: &BigRational| reduce_rational(c, p).ok_or(Error::BadPrime(p));
        Ok(ModCurve {
            p,
            e2: r(&curve.base.e2)?,
            e1: r(&curve.base.e1)?,
            e0: r(&curve.base.e0)?,
            d: r(&curve.d)?,
        })
    }

    fn add_m(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    fn sub_m(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    fn mul_m(&self, a: u64, b: u64) -> u64 {
        mulmod(a, b, self.p)
    }

    fn inv_m(&self, a: u64) -> u64 {
        powmod(a, self.p - 2, self.p)
    }

    pub fn f(&self, x: u64) -> u64 {
        let x2 = self.mul_m(x, x);
        let x3 = self.mul_m(x2, x);
        self.add_m(
            self.add_m(x3, self.mul_m(self.e2, x2)),
            self.add_m(self.mul_m(self.e1, x), self.e0),
        )
    }

    pub fn reduce_point(&self, pt: &CurvePoint<BigRational>) -> Result<ModPoint> {
        match pt {
            CurvePoint::Infinity => Ok(None),
            CurvePoint::Affine { x, y } => {
                let x = reduce_rational(x, self.p).ok_or(Error::BadPrime(self.p))?;
                let y = reduce_rational(y, self.p).ok_or(Error::BadPrime(self.p))?;
                Ok(Some((x, y)))
            }
        }
    }

    pub fn on_curve(&self, pt: &ModPoint) -> bool {
        match pt {
            None => true,
            Some((x, y)) => self.mul_m(self.d, self.mul_m(*y, *y)) == self.f(*x),
        }
    }

    pub fn neg(&self, pt: &ModPoint) -> ModPoint {
        pt.map(|(x, y)| (x, self.sub_m(0, y)))
    }

    pub fn add(&self, a: &ModPoint, b: &ModPoint) -> ModPoint {
        let ((x1, y1), (x2, y2)) = match (a, b) {
            (None, _) => return *b,
            (_, None) => return *a,
            (Some(a), Some(b)) => (*a, *b),
        };
        let lam = if x1 == x2 {
            if self.add_m(y1, y2) == 0 {
                return None;
            }
            let fp = self.add_m(
                self.add_m(
                    self.mul_m(3, self.mul_m(x1, x1)),
                    self.mul_m(self.mul_m(2, self.e2), x1),
                ),
                self.e1,
            );
            self.mul_m(fp, self.inv_m(self.mul_m(self.mul_m(2, self.d), y1)))
        } else {
            self.mul_m(self.sub_m(y2, y1), self.inv_m(self.sub_m(x2, x1)))
        };
        let x3 = self.sub_m(
            self.sub_m(
                self.sub_m(self.mul_m(self.d, self.mul_m(lam, lam)), self.e2),
                x1,
            ),
            x2,
        );
        let y3 = self.sub_m(self.mul_m(lam, self.sub_m(x1, x3)), y1);
        Some((x3, y3))
    }

    pub fn mul(&self, n: i64, pt: &ModPoint) -> ModPoint {
        let mut acc = None;
        let mut base = if n < 0 { self.neg(pt) } else { *pt };
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }

    fn chi(&self, a: u64) -> i64 {
        if a == 0 {
            0
        } else if powmod(a, (self.p - 1) / 2, self.p) == 1 {
            1
        } else {
            -1
        }
    }

    /// `#E(F_p)` by summing Legendre symbols.
    pub fn order(&self) -> u64 {
        let s: i64 = (0..self.p)
            .map(|x| self.chi(self.mul_m(self.d, self.f(x))))
            .sum();
        (self.p as i64 + 1 + s) as u64
    }
}

/// Outcome of the relation sieve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SieveVerdict {
    /// Every relation vector within the bound was excluded by some prime.
    IndependentUpToBound {
        primes: Vec<u64>,
        exponent: u64,
        excluded: usize,
    },
    /// This vector maps into the torsion image at every sieve prime.
    PossibleRelation {
        vector: Vec<i64>,
        primes: Vec<u64>,
        exponent: u64,
    },
}

impl SieveVerdict {
    pub fn is_independent(&self) -> bool {
        matches!(self, SieveVerdict::IndependentUpToBound { .. })
    }
}

/// Nonzero vectors in `[-bound, bound]^k` with first nonzero entry positive,
/// ordered by max norm and then lexicographically.
pub fn relation_vectors(k: usize, bound: u32) -> Vec<Vec<i64>> {
    let b = bound as i64;
    let mut out: Vec<Vec<i64>> = Vec::new();
    if k == 0 {
        return out;
    }
    let mut cur = alloc::vec![-b; k];
    loop {
        if let Some(first) = cur.iter().find(|&&c| c != 0) {
            if *first > 0 {
                out.push(cur.clone());
            }
        }
        let mut i = k;
        loop {
            if i == 0 {
                out.sort_by_key(|v| (v.iter().map(|c| c.abs()).max().unwrap_or(0), v.clone()));
                return out;
            }
            i -= 1;
            if cur[i] < b {
                cur[i] += 1;
                break;
            }
            cur[i] = -b;
        }
    }
}

/// Searches for relations `sum n_i P_i` in the torsion subgroup with
/// `0 < max |n_i| <= bound`, killing a vector at `p` when
/// `e * sum n_i P_i != O` in `E(F_p)` with `e = gcd(2520, #E(F_p) over all p)`.
pub fn mod_p_relation_sieve(
    points: &[CurvePoint<BigRational>],
    curve: &TwistedCurve<BigRational>,
    primes: &[u64],
    bound: u32,
) -> Result<SieveVerdict> {
    for (i, pt) in points.iter().enumerate() {
        if !curve.on_curve(pt) {
            return Err(Error::NotOnCurve(format!("P{}", i + 1)));
        }
    }
    let mut curves = Vec::with_capacity(primes.len());
    let mut exponent = TORSION_EXPONENT;
    for &p in primes {
        if !is_good_prime(curve, points, p) {
            return Err(Error::BadPrime(p));
        }
        let mc = ModCurve::reduce(curve, p)?;
        exponent = exponent.gcd(&mc.order());
        curves.push(mc);
    }
    if points.is_empty() {
        return Ok(SieveVerdict::IndependentUpToBound {
            primes: primes.to_vec(),
            exponent,
            excluded: 0,
        });
    }
    let mut alive = relation_vectors(points.len(), bound);
    let total = alive.len();
    let b = bound as i64;
    for mc in &curves {
        if alive.is_empty() {
            break;
        }
        let multiples: Vec<Vec<ModPoint>> = points
            .iter()
            .map(|pt| {
                let r = mc.mul(exponent as i64, &mc.reduce_point(pt).expect("good prime"));
                (-b..=b).map(|n| mc.mul(n, &r)).collect()
            })
            .collect();
        alive.retain(|v| {
            let s = v
                .iter()
                .zip(&multiples)
                .fold(None, |acc, (n, m)| mc.add(&acc, &m[(n + b) as usize]));
            s.is_none()
        });
    }
    Ok(match alive.into_iter().next() {
        None => SieveVerdict::IndependentUpToBound {
            primes: primes.to_vec(),
            exponent,
            excluded: total,
        },
        Some(vector) => SieveVerdict::PossibleRelation {
            vector,
            primes: primes.to_vec(),
            exponent,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::CubicCurve;
    use crate::exactmath::{q, BigRational};
    use proptest::prelude::*;

    fn x3_minus_x(d: i64) -> TwistedCurve<BigRational> {
        TwistedCurve::new(CubicCurve::new(q(0), q(-1), q(0)).unwrap(), q(d)).unwrap()
    }

    fn brute_order(mc: &ModCurve) -> u64 {
        let mut n = 1;
        for x in 0..mc.p {
            for y in 0..mc.p {
                if mc.on_curve(&Some((x, y))) {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn order_matches_brute_force() {
        let e = TwistedCurve::new(CubicCurve::new(q(1), q(-2), q(3)).unwrap(), q(5)).unwrap();
        for p in [53u64, 59, 61, 67, 71, 73, 79, 83] {
            let mc = ModCurve::reduce(&e, p).unwrap();
            assert_eq!(mc.order(), brute_order(&mc), "p = {p}");
        }
    }

    #[test]
    fn group_order_kills_points() {
        let e = TwistedCurve::new(CubicCurve::new(q(1), q(-2), q(3)).unwrap(), q(5)).unwrap();
        let mc = ModCurve::reduce(&e, 101).unwrap();
        let n = mc.order() as i64;
        for x in 0..101u64 {
            for y in 0..101u64 {
                let pt = Some((x, y));
                if mc.on_curve(&pt) {
                    assert_eq!(mc.mul(n, &pt), None);
                }
            }
        }
    }

    #[test]
    fn bad_primes_rejected() {
        let e = x3_minus_x(6);
        let pt = CurvePoint::affine(q(3), q(2));
        assert!(e.on_curve(&pt));
        assert_eq!(
            mod_p_relation_sieve(std::slice::from_ref(&pt), &e, &[3], 2),
            Err(Error::BadPrime(3))
        );
        assert_eq!(
            mod_p_relation_sieve(&[pt], &e, &[2], 2),
            Err(Error::BadPrime(2))
        );
        assert!(!is_good_prime(&e, &[], 57));
    }

    #[test]
    fn empty_points_independent() {
        let e = x3_minus_x(6);
        let v = mod_p_relation_sieve(&[], &e, &good_primes(&e, &[], 50, 3), 5).unwrap();
        assert!(v.is_independent());
    }

    #[test]
    fn p_and_2p_detected() {
        let e = x3_minus_x(6);
        let p = CurvePoint::affine(q(3), q(2));
        let p2 = e.double(&p);
        let pts = [p, p2];
        let primes = good_primes(&e, &pts, 50, 20);
        match mod_p_relation_sieve(&pts, &e, &primes, 8).unwrap() {
            SieveVerdict::PossibleRelation { vector, .. } => assert_eq!(vector, alloc::vec![2, -1]),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn torsion_point_is_a_relation() {
        let e = x3_minus_x(6);
        let t = CurvePoint::affine(q(1), q(0));
        let primes = good_primes(&e, std::slice::from_ref(&t), 50, 10);
        match mod_p_relation_sieve(&[t], &e, &primes, 3).unwrap() {
            SieveVerdict::PossibleRelation { vector, .. } => assert_eq!(vector, alloc::vec![1]),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn vectors_normalized_and_counted() {
        let v = relation_vectors(3, 2);
        assert_eq!(v.len(), (125 - 1) / 2);
        assert_eq!(v[0], alloc::vec![0, 0, 1]);
        assert!(v
            .iter()
            .all(|x| x.iter().find(|&&c| c != 0).copied().unwrap() > 0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn planted_relations_survive(n1 in -4i64..5, n2 in -4i64..5, m in 1i64..4) {
            let e = x3_minus_x(6);
            let p = CurvePoint::affine(q(3), q(2));
            let r = e.add(&e.mul_i64(n1, &p), &e.mul_i64(n2, &e.mul_i64(m, &p)));
            prop_assume!(!r.is_infinity());
            let pts = [p, r];
            let primes = good_primes(&e, &pts, 50, 12);
            let v = mod_p_relation_sieve(&pts, &e, &primes, 16).unwrap();
            prop_assert!(!v.is_independent());
        }
    }
}
