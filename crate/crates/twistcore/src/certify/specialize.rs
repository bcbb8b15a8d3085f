use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::curves::{CurvePoint, TwistedCurve};
use crate::error::{Error, Result};
use crate::exactmath::squarefree_decomp_int;
use crate::twistforge::TwistFamily;

/// A fiber `D y^2 = f(x)` of a family at `u = u0` with `D` a squarefree integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecializedTwist {
    pub u0: BigRational,
    pub d: BigInt,
    pub curve: TwistedCurve<BigRational>,
    pub points: Vec<CurvePoint<BigRational>>,
}

/// Evaluates the family at `u0`, moving `g(u0)` to its squarefree integer
/// representative and rescaling the `y`-coordinates to match.
pub fn specialize(fam: &TwistFamily, u0: &BigRational) -> Result<SpecializedTwist> {
    let gv = fam.g.eval(u0);
    if gv.is_zero() {
        return Err(Error::BadSpecialization(format!("g({u0}) = 0")));
    }
    let nd = gv.numer() * gv.denom();
    let (d, v) = squarefree_decomp_int(&nd)?;
    let w = BigRational::new(v, gv.denom().clone());
    let mut points = Vec::with_capacity(fam.points.len());
    for (i, p) in fam.points.iter().enumerate() {
        match p {
            CurvePoint::Infinity => points.push(CurvePoint::Infinity),
            CurvePoint::Affine { x, y } => {
                let pole =
                    || Error::BadSpecialization(format!("P{} has a pole at u = {u0}", i + 1));
                let xv = x.eval(u0).ok_or_else(pole)?;
                let yv = y.eval(u0).ok_or_else(pole)?;
                points.push(CurvePoint::affine(xv, yv * &w));
            }
        }
    }
    let curve = TwistedCurve::new(fam.curve.clone(), BigRational::from_integer(d.clone()))?;
    for (i, p) in points.iter().enumerate() {
        curve.check_point(p, &format!("on-curve[P{}] at u = {u0}", i + 1))?;
    }
    Ok(SpecializedTwist {
        u0: u0.clone(),
        d,
        curve,
        points,
    })
}

/// Deterministic sequence of small-height rationals other than `0, 1, -1`,
/// ordered by height, then denominator, then absolute value, positive first.
pub fn sample_points() -> impl Iterator<Item = BigRational> {
    (2i64..).flat_map(|h| {
        let mut v: Vec<(i64, i64)> = Vec::new();
        for d in 1..=h {
            let ns: Vec<i64> = if d == h {
                (1..h).collect()
            } else {
                alloc::vec![h]
            };
            for n in ns {
                if n.gcd(&d) == 1 {
                    v.push((n, d));
                    v.push((-n, d));
                }
            }
        }
        v.sort_by_key(|&(n, d)| (d, n.abs(), n.is_negative()));
        v.into_iter()
            .map(|(n, d)| BigRational::new(n.into(), d.into()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build, FamilyId, FamilySpec};
    use crate::exactmath::{q, squarefree_part_int};

    #[test]
    fn thm4_5_at_two() {
        let fam = build(&FamilySpec::default_for(FamilyId::Thm4_5)).unwrap();
        let s = specialize(&fam, &q(2)).unwrap();
        assert_eq!(fam.g.eval(&q(2)), q(-29274));
        assert_eq!(s.d, squarefree_part_int(&BigInt::from(-29274)).unwrap());
        assert_eq!(s.points.len(), 3);
        for p in &s.points {
            assert!(s.curve.on_curve(p));
        }
    }

    #[test]
    fn zeros_and_poles_rejected() {
        let fam = build(&FamilySpec::default_for(FamilyId::Thm4_5)).unwrap();
        assert!(matches!(
            specialize(&fam, &q(0)),
            Err(Error::BadSpecialization(_))
        ));
        let t = build(&FamilySpec::default_for(FamilyId::Rem4_6)).unwrap();
        assert!(matches!(
            specialize(&t, &q(-1)),
            Err(Error::BadSpecialization(_))
        ));
        let c = build(&FamilySpec::default_for(FamilyId::Thm4_3)).unwrap();
        assert!(matches!(
            specialize(&c, &q(0)),
            Err(Error::BadSpecialization(_))
        ));
    }

    #[test]
    fn rational_u0_clears_denominators() {
        let fam = build(&FamilySpec::default_for(FamilyId::Cor3_2)).unwrap();
        let u0 = BigRational::new(3.into(), 7.into());
        let s = specialize(&fam, &u0).unwrap();
        let gv = fam.g.eval(&u0);
        let ratio = gv / BigRational::from_integer(s.d.clone());
        assert!(crate::exactmath::sqrt_rational(&ratio).is_some());
        assert!(s.curve.d_is_squarefree_integer());
    }

    #[test]
    fn samples_prefix_stable_and_distinct() {
        let a: Vec<BigRational> = sample_points().take(20).collect();
        assert_eq!(a[0], q(2));
        assert_eq!(a[1], q(-2));
        assert_eq!(a[2], BigRational::new(1.into(), 2.into()));
        for i in 0..a.len() {
            for j in 0..i {
                assert_ne!(a[i], a[j]);
            }
        }
    }
}
