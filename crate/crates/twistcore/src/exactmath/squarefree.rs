use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::intfact::squarefree_decomp_int;
use super::poly::{q, UniPoly};
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

/// `p = unit * prod factors[i].0 ^ factors[i].1` with monic, squarefree,
/// pairwise coprime factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreeDecomposition {
    pub unit: BigRational,
    pub factors: Vec<(UniPoly, u32)>,
}

impl SquarefreeDecomposition {
    pub fn expand(&self) -> UniPoly {
        self.factors
            .iter()
            .fold(UniPoly::constant(self.unit.clone()), |acc, (f, m)| {
                &acc * &f.pow(*m)
            })
    }
}

/// Yun's algorithm.
pub fn squarefree_decompose(p: &UniPoly) -> Result<SquarefreeDecomposition> {
    if p.is_zero() {
        return Err(Error::ZeroInput("squarefree_decompose"));
    }
    let unit = p.lead();
    let a = p.monic();
    let mut factors = Vec::new();
    if a.is_constant() {
        return Ok(SquarefreeDecomposition { unit, factors });
    }
    let b = a.derivative();
    let c = a.gcd(&b);
    let mut w = a.div_exact(&c)?;
    let y = b.div_exact(&c)?;
    let mut z = &y - &w.derivative();
    let mut i = 1u32;
    while !w.is_constant() {
        let g = w.gcd(&z);
        w = w.div_exact(&g)?;
        let y = z.div_exact(&g)?;
        z = &y - &w.derivative();
        if !g.is_constant() {
            factors.push((g, i));
        }
        i += 1;
    }
    Ok(SquarefreeDecomposition { unit, factors })
}

/// Square root of a nonnegative rational square.
pub fn sqrt_rational(c: &BigRational) -> Option<BigRational> {
    if c.is_negative() {
        return None;
    }
    let n = c.numer().sqrt();
    let d = c.denom().sqrt();
    (&n * &n == *c.numer() && &d * &d == *c.denom()).then(|| BigRational::new(n, d))
}

/// Monic square root of a monic polynomial, if one exists.
pub fn sqrt_monic_poly(p: &UniPoly) -> Option<UniPoly> {
    let n = p.degree()?;
    if n % 2 == 1 || !p.lead().is_one() {
        return None;
    }
    let m = n / 2;
    let mut s = vec![BigRational::zero(); m + 1];
    s[m] = BigRational::one();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for k in (0..m).rev() {
        let idx = m + k;
        let mut acc = p.coeff(idx);
        for i in (k + 1)..=m {
            let j = idx - i;
            if j > k && j <= m {
                acc -= &s[i] * &s[j];
            }
        }
        s[k] = acc * &half;
    }
    let r = UniPoly::new(s);
    (&r * &r == *p).then_some(r)
}

/// Canonical representative of the square class of a nonzero rational function:
/// returns `(k, j)` with `r = k * j^2`, `k` a squarefree polynomial with
/// primitive integer coefficients times a squarefree integer.
pub fn square_class(r: &RatFunc) -> Result<(UniPoly, RatFunc)> {
    if r.is_zero() {
        return Err(Error::ZeroInput("square_class"));
    }
    let mut c = r.num().lead() / r.den().lead();
    let mut k = UniPoly::one();
    let mut j = RatFunc::one();
    for (poly, inverted) in [(r.num(), false), (r.den(), true)] {
        let dec = squarefree_decompose(poly)?;
        for (f, m) in dec.factors {
            let fr = RatFunc::from_poly(f.clone());
            if m % 2 == 1 {
                k = &k * &f;
            }
            let e = if inverted {
                -(m.div_ceil(2) as i32)
            } else {
                (m / 2) as i32
            };
            if e != 0 {
                j = &j * &fr.pow(e);
            }
        }
    }
    let (ck, prim) = k.primitive_integer();
    c *= ck;
    let prod = c.numer() * c.denom();
    let (s, v) = squarefree_decomp_int(&prod)?;
    let scale = BigRational::new(v, c.denom().clone());
    let k = UniPoly::from_bigints(&prim).scale(&BigRational::from_integer(s));
    let j = j.scale(&scale);
    Ok((k, j))
}

/// Splits `g` into coprime pieces using gcds against `candidates`. Returns
/// primitive integer factors whose product is `g` up to a constant.
pub fn refine_factorization(g: &UniPoly, candidates: &[UniPoly]) -> Vec<UniPoly> {
    let mut parts = vec![g.monic()];
    for c in candidates {
        if c.is_constant() {
            continue;
        }
        let mut next = Vec::new();
        for e in parts {
            let d = e.gcd(c);
            if d.is_constant() || d.deg() == e.deg() {
                next.push(e);
            } else {
                let rest = e.div_exact(&d).expect("gcd divides");
                next.push(d);
                next.push(rest);
            }
        }
        parts = next;
    }
    let mut out: Vec<UniPoly> = parts
        .into_iter()
        .filter(|p| !p.is_constant())
        .map(|p| p.primitive_part())
        .collect();
    out.sort_by_key(|p| p.deg());
    out
}

/// True when `r` is a nonzero square in `Q(u)`.
pub fn is_square(r: &RatFunc) -> bool {
    matches!(square_class(r), Ok((k, _)) if k.is_one_poly())
}

/// Discriminant of a monic cubic `x^3 + a x^2 + b x + c`.
pub fn discriminant_cubic(f: &UniPoly) -> Result<BigRational> {
    if f.degree() != Some(3) {
        return Err(Error::WrongDegree {
            expected: 3,
            got: f.deg(),
        });
    }
    if !f.lead().is_one() {
        return Err(Error::Hypothesis("cubic must be monic".into()));
    }
    let (a, b, c) = (f.coeff(2), f.coeff(1), f.coeff(0));
    Ok(
        &a * &a * &b * &b - q(4) * &b * &b * &b - q(4) * &a * &a * &a * &c - q(27) * &c * &c
            + q(18) * &a * &b * &c,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::poly::qr;
    use proptest::prelude::*;

    fn p(cs: &[i64]) -> UniPoly {
        UniPoly::from_i64s(cs)
    }

    fn det(mut m: Vec<Vec<BigRational>>) -> BigRational {
        let n = m.len();
        let mut d = BigRational::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return BigRational::zero();
            };
            if piv != col {
                m.swap(piv, col);
                d = -d;
            }
            d *= m[col][col].clone();
            for r in (col + 1)..n {
                let f = &m[r][col] / &m[col][col];
                for cc in col..n {
                    let v = &f * &m[col][cc];
                    m[r][cc] -= v;
                }
            }
        }
        d
    }

    fn sylvester_resultant(f: &UniPoly, g: &UniPoly) -> BigRational {
        let (m, n) = (f.deg(), g.deg());
        let size = m + n;
        let mut rows = Vec::new();
        for i in 0..n {
            let mut row = vec![BigRational::zero(); size];
            for k in 0..=m {
                row[i + k] = f.coeff(m - k);
            }
            rows.push(row);
        }
        for i in 0..m {
            let mut row = vec![BigRational::zero(); size];
            for k in 0..=n {
                row[i + k] = g.coeff(n - k);
            }
            rows.push(row);
        }
        det(rows)
    }

    #[test]
    fn decompose_constructed_input() {
        let f = &p(&[-1, 1]).pow(2) * &p(&[2, 1]);
        let d = squarefree_decompose(&f).unwrap();
        assert_eq!(d.factors, vec![(p(&[2, 1]), 1), (p(&[-1, 1]), 2)]);
        assert_eq!(d.expand(), f);
    }

    #[test]
    fn decompose_unit_and_zero() {
        let d = squarefree_decompose(&p(&[5])).unwrap();
        assert!(d.factors.is_empty());
        assert_eq!(d.unit, q(5));
        assert_eq!(
            squarefree_decompose(&UniPoly::zero()),
            Err(Error::ZeroInput("squarefree_decompose"))
        );
    }

    #[test]
    fn cor32_g_is_squarefree_at_1_2() {
        let (a, b) = (1i64, 2i64);
        let g = &p(&[b * b, 0, 1]) * &p(&[b.pow(4), 0, 2 * b * b - a * a * b, 0, 1]);
        let g = g.scale(&q(-a * b));
        assert!(g.gcd(&g.derivative()).is_constant());
        let d = squarefree_decompose(&g).unwrap();
        assert!(d.factors.iter().all(|(_, m)| *m == 1));
        assert_eq!(d.expand(), g);
    }

    #[test]
    fn square_class_examples() {
        let r = RatFunc::from_poly(&p(&[1, 1]).pow(2) * &p(&[2, 1]));
        let (k, j) = square_class(&r).unwrap();
        assert_eq!(k, p(&[2, 1]));
        assert_eq!(&RatFunc::from_poly(k) * &(&j * &j), r);
        let (k, j) = square_class(&RatFunc::constant(q(4))).unwrap();
        assert_eq!(k, p(&[1]));
        assert_eq!(j.as_constant().unwrap().abs(), q(2));
        let (k, _) = square_class(&RatFunc::constant(qr(-3, 8))).unwrap();
        assert_eq!(k, p(&[-6]));
    }

    #[test]
    fn square_class_of_inverse_factors() {
        let r = RatFunc::new(p(&[3]), &p(&[1, 3]).pow(3) * &p(&[0, 1])).unwrap();
        let (k, j) = square_class(&r).unwrap();
        assert_eq!(k, &p(&[1, 3]) * &p(&[0, 3]));
        assert_eq!(&RatFunc::from_poly(k) * &(&j * &j), r);
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant_cubic(&p(&[0, -1, 0, 1])).unwrap(), q(4));
        assert_eq!(discriminant_cubic(&p(&[0, 0, 0, 1])).unwrap(), q(0));
        assert!(matches!(
            discriminant_cubic(&p(&[1, 1])),
            Err(Error::WrongDegree { .. })
        ));
    }

    #[test]
    fn discriminant_matches_resultant_oracle() {
        let (b, c) = (q(3), q(1));
        let f = UniPoly::new(vec![c.clone(), b.clone(), &b * &b / (q(4) * &c), q(1)]);
        let disc = discriminant_cubic(&f).unwrap();
        assert_eq!(disc, -sylvester_resultant(&f, &f.derivative()));
        assert!(!disc.is_zero());
        assert_ne!(&b * &b * &b, q(54) * &c * &c);
    }

    fn arb_small_poly(maxdeg: usize) -> impl Strategy<Value = UniPoly> {
        prop::collection::vec((-6i64..6, 1i64..4), 1..=maxdeg + 1)
            .prop_map(|v| UniPoly::new(v.into_iter().map(|(n, d)| qr(n, d)).collect()))
    }

    proptest! {
        #[test]
        fn resultant_oracle_agrees(a in -9i64..9, b in -9i64..9, c in -9i64..9) {
            let f = p(&[c, b, a, 1]);
            prop_assert_eq!(discriminant_cubic(&f).unwrap(), -sylvester_resultant(&f, &f.derivative()));
        }

        #[test]
        fn square_class_reexpands(n in arb_small_poly(4), d in arb_small_poly(3), s in arb_small_poly(2)) {
            prop_assume!(!n.is_zero() && !d.is_zero() && !s.is_zero());
            let r = RatFunc::new(&n * &s.pow(2), d).unwrap();
            let (k, j) = square_class(&r).unwrap();
            prop_assert_eq!(&RatFunc::from_poly(k.clone()) * &(&j * &j), r);
            let dec = squarefree_decompose(&k).unwrap();
            prop_assert!(dec.factors.iter().all(|(_, m)| *m == 1));
        }

        #[test]
        fn yun_reexpands(f in arb_small_poly(3), g in arb_small_poly(2)) {
            prop_assume!(!f.is_zero() && !g.is_zero());
            let h = &f * &g.pow(3);
            let d = squarefree_decompose(&h).unwrap();
            prop_assert_eq!(d.expand(), h);
            for (i, (a, _)) in d.factors.iter().enumerate() {
                prop_assert!(a.is_squarefree());
                for (b, _) in &d.factors[i + 1..] {
                    prop_assert!(a.gcd(b).is_constant());
                }
            }
        }

        #[test]
        fn poly_sqrt_inverts_square(f in arb_small_poly(5)) {
            prop_assume!(!f.is_zero());
            let m = f.monic();
            prop_assert_eq!(sqrt_monic_poly(&(&m * &m)), Some(m));
        }
    }
}
