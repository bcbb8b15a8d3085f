//! Integer factorization and squarefree parts.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const TRIAL_LIMIT: u64 = 4096;

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &MR_BASES[..12] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Brent's variant of Pollard rho; `n` must be odd and composite.
fn brent_u64(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut y, m) = (2u64, 128u64);
        let (mut g, mut r, mut qq) = (1u64, 1u64, 1u64);
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    qq = mulmod(qq, x.abs_diff(y), n);
                }
                g = gcd_u64(qq, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn factor_rec_u64(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let r = n.sqrt();
    if r * r == n {
        factor_rec_u64(r, out);
        factor_rec_u64(r, out);
        return;
    }
    let d = brent_u64(n);
    factor_rec_u64(d, out);
    factor_rec_u64(n / d, out);
}

fn collect(mut ps: Vec<u64>) -> Vec<(u64, u32)> {
    ps.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in ps {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Prime factorization of `n >= 1`, sorted by prime.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut ps = Vec::new();
    if n == 0 {
        return Vec::new();
    }
    while n.is_multiple_of(2) {
        ps.push(2);
        n /= 2;
    }
    let mut p = 3u64;
    while p < TRIAL_LIMIT && p * p <= n {
        while n.is_multiple_of(p) {
            ps.push(p);
            n /= p;
        }
        p += 2;
    }
    if n > 1 {
        if p * p > n {
            ps.push(n);
        } else {
            factor_rec_u64(n, &mut ps);
        }
    }
    collect(ps)
}

fn is_prime_big(n: &BigUint) -> bool {
    if let Some(m) = n.to_u64() {
        return is_prime_u64(m);
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    for &p in &MR_BASES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'outer: for &a in &MR_BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn brent_big(n: &BigUint) -> BigUint {
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let m = 128u64;
        let mut g = BigUint::one();
        let mut r = 1u64;
        let mut qq = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    qq = (qq * diff) % n;
                }
                g = qq.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

fn factor_rec_big(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if let Some(m) = n.to_u64() {
        out.extend(
            factor_u64(m)
                .into_iter()
                .flat_map(|(p, e)| vec![BigUint::from(p); e as usize]),
        );
        return;
    }
    if is_prime_big(&n) {
        out.push(n);
        return;
    }
    let r = n.sqrt();
    if &r * &r == n {
        factor_rec_big(r.clone(), out);
        factor_rec_big(r, out);
        return;
    }
    let d = brent_big(&n);
    let rest = &n / &d;
    factor_rec_big(d, out);
    factor_rec_big(rest, out);
}

/// Prime factorization of an arbitrary positive integer.
pub fn factor_biguint(n: &BigUint) -> Vec<(BigUint, u32)> {
    if n.is_zero() {
        return Vec::new();
    }
    if let Some(m) = n.to_u64() {
        return factor_u64(m)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect();
    }
    let mut m = n.clone();
    let mut ps: Vec<BigUint> = Vec::new();
    let mut p = 2u64;
    while p < TRIAL_LIMIT {
        while (&m % p).is_zero() {
            ps.push(BigUint::from(p));
            m /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    factor_rec_big(m, &mut ps);
    ps.sort();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for p in ps {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Squarefree part `D` and cofactor `v > 0` with `n = D v^2`; `sign(D) = sign(n)`.
pub fn squarefree_decomp_int(n: &BigInt) -> Result<(BigInt, BigInt)> {
    if n.is_zero() {
        return Err(Error::ZeroInput("squarefree_part_int"));
    }
    let mut d = BigInt::one();
    let mut v = BigInt::one();
    for (p, e) in factor_biguint(n.magnitude()) {
        let p = BigInt::from(p);
        if e % 2 == 1 {
            d *= &p;
        }
        v *= num_traits::pow(p, (e / 2) as usize);
    }
    if n.sign() == Sign::Minus {
        d = -d;
    }
    Ok((d, v))
}

/// Signed squarefree part of a nonzero integer.
pub fn squarefree_part_int(n: &BigInt) -> Result<BigInt> {
    Ok(squarefree_decomp_int(n)?.0)
}

/// Squarefree part for machine integers.
pub fn squarefree_part_i64(n: i64) -> Result<i64> {
    if n == 0 {
        return Err(Error::ZeroInput("squarefree_part_int"));
    }
    let mut d: i64 = 1;
    for (p, e) in factor_u64(n.unsigned_abs()) {
        if e % 2 == 1 {
            d *= p as i64;
        }
    }
    Ok(if n < 0 { -d } else { d })
}

/// Primes strictly below `n`.
pub fn primes_below(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 3 {
        return Vec::new();
    }
    let mut sieve = vec![true; n];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i < n {
        if sieve[i] {
            let mut j = i * i;
            while j < n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i as u64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn oracle(n: i64) -> i64 {
        let mut m = n.unsigned_abs();
        let mut d = 1i64;
        let mut p = 2u64;
        while p * p <= m {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            if e % 2 == 1 {
                d *= p as i64;
            }
            p += 1;
        }
        d *= m as i64;
        n.signum() * d
    }

    #[test]
    fn small_examples() {
        assert_eq!(squarefree_part_i64(12).unwrap(), 3);
        assert_eq!(squarefree_part_i64(-18).unwrap(), -2);
        assert_eq!(squarefree_part_i64(-29274).unwrap(), oracle(-29274));
        assert_eq!(
            squarefree_part_i64(0),
            Err(Error::ZeroInput("squarefree_part_int"))
        );
    }

    #[test]
    fn matches_oracle_on_window() {
        for n in -20_000i64..=20_000 {
            if n != 0 {
                assert_eq!(squarefree_part_i64(n).unwrap(), oracle(n), "n = {n}");
            }
        }
    }

    #[test]
    fn primality_against_sieve() {
        let ps = primes_below(100_000);
        let mut it = ps.iter().peekable();
        for n in 0..100_000u64 {
            let expect = it.peek().is_some_and(|&&p| p == n);
            if expect {
                it.next();
            }
            assert_eq!(is_prime_u64(n), expect, "n = {n}");
        }
    }

    #[test]
    fn hard_semiprimes() {
        let p = 4_294_967_291u64;
        let q = 4_294_967_279u64;
        assert_eq!(factor_u64(p * q), vec![(q, 1), (p, 1)]);
        let big = BigUint::from(p) * BigUint::from(q) * BigUint::from(1_000_000_007u64);
        let f = factor_biguint(&big);
        assert_eq!(f.len(), 3);
        let prod: BigUint = f.iter().map(|(p, e)| p.pow(*e)).product();
        assert_eq!(prod, big);
    }

    #[test]
    fn bigint_decomposition() {
        let n = BigInt::from(-29274i64) * BigInt::from(49u32) * BigInt::from(1_000_003u64).pow(2);
        let (d, v) = squarefree_decomp_int(&n).unwrap();
        assert_eq!(&d * &v * &v, n);
        assert_eq!(d, BigInt::from(oracle(-29274)));
    }

    proptest! {
        #[test]
        fn factorization_multiplies_back(n in 1u64..u64::MAX) {
            let f = factor_u64(n);
            let mut prod = 1u128;
            for (p, e) in &f {
                prop_assert!(is_prime_u64(*p));
                prod *= (*p as u128).pow(*e);
            }
            prop_assert_eq!(prod, n as u128);
        }
    }
}
