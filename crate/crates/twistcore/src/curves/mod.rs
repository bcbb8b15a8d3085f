//! Curves `D y^2 = f(x)` over `Q` or `Q(u)` with the chord-tangent law.

mod isogeny;

pub use isogeny::{three_isogeny, two_isogeny_quotient, Isogeny};

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::exactmath::{discriminant_cubic, Field, UniPoly};

/// Monic cubic `x^3 + e2 x^2 + e1 x + e0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CubicCurve<F> {
    pub e2: F,
    pub e1: F,
    pub e0: F,
}

impl<F: Field> CubicCurve<F> {
    /// Builds the curve, rejecting a vanishing discriminant.
    pub fn new(e2: F, e1: F, e0: F) -> Result<Self> {
        let c = CubicCurve { e2, e1, e0 };
        if c.discriminant().is_zero() {
            return Err(Error::Hypothesis(format!("singular cubic {c:?}")));
        }
        Ok(c)
    }

    pub fn f(&self, x: &F) -> F {
        x.add(&self.e2).mul(x).add(&self.e1).mul(x).add(&self.e0)
    }

    pub fn f_prime(&self, x: &F) -> F {
        let three = F::from_i64(3);
        let two = F::from_i64(2);
        three.mul(x).add(&two.mul(&self.e2)).mul(x).add(&self.e1)
    }

    pub fn discriminant(&self) -> F {
        let (a, b, c) = (&self.e2, &self.e1, &self.e0);
        let k = F::from_i64;
        let a2 = a.square();
        let b2 = b.square();
        a2.mul(&b2)
            .sub(&k(4).mul(&b2).mul(b))
            .sub(&k(4).mul(&a2).mul(a).mul(c))
            .sub(&k(27).mul(&c.square()))
            .add(&k(18).mul(a).mul(b).mul(c))
    }
}

impl CubicCurve<BigRational> {
    pub fn from_poly(f: &UniPoly) -> Result<Self> {
        if f.degree() != Some(3) {
            return Err(Error::WrongDegree {
                expected: 3,
                got: f.deg(),
            });
        }
        let l = f.lead();
        Self::new(f.coeff(2) / &l, f.coeff(1) / &l, f.coeff(0) / &l)
    }

    pub fn poly(&self) -> UniPoly {
        UniPoly::new(alloc::vec![
            self.e0.clone(),
            self.e1.clone(),
            self.e2.clone(),
            BigRational::from_integer(1.into())
        ])
    }

    pub fn disc(&self) -> BigRational {
        discriminant_cubic(&self.poly()).expect("monic cubic")
    }

    /// Coefficients lifted into another field.
    pub fn lift<G: Field>(&self) -> CubicCurve<G> {
        CubicCurve {
            e2: G::from_rational(&self.e2),
            e1: G::from_rational(&self.e1),
            e0: G::from_rational(&self.e0),
        }
    }

    /// Affine roots in `Q` of the cubic.
    pub fn rational_two_torsion(&self) -> Vec<BigRational> {
        let mut r = self.poly().rational_roots();
        r.sort();
        r
    }
}

/// `D y^2 = f(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwistedCurve<F> {
    pub base: CubicCurve<F>,
    pub d: F,
}

/// Point on a twisted curve.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CurvePoint<F> {
    Infinity,
    Affine { x: F, y: F },
}

impl<F> CurvePoint<F> {
    pub fn affine(x: F, y: F) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<&F> {
        match self {
            CurvePoint::Affine { x, .. } => Some(x),
            CurvePoint::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&F> {
        match self {
            CurvePoint::Affine { y, .. } => Some(y),
            CurvePoint::Infinity => None,
        }
    }
}

impl<F: Field> TwistedCurve<F> {
    pub fn new(base: CubicCurve<F>, d: F) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::Hypothesis(
                "twisting parameter must be nonzero".into(),
            ));
        }
        Ok(TwistedCurve { base, d })
    }

    pub fn on_curve(&self, p: &CurvePoint<F>) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => self.d.mul(&y.square()) == self.base.f(x),
        }
    }

    pub fn neg(&self, p: &CurvePoint<F>) -> CurvePoint<F> {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::affine(x.clone(), y.neg()),
        }
    }

    fn third_point(&self, x1: &F, y1: &F, x2: &F, lambda: F) -> CurvePoint<F> {
        let x3 = self
            .d
            .mul(&lambda.square())
            .sub(&self.base.e2)
            .sub(x1)
            .sub(x2);
        let y3 = y1.add(&lambda.mul(&x3.sub(x1))).neg();
        CurvePoint::affine(x3, y3)
    }

    pub fn double(&self, p: &CurvePoint<F>) -> CurvePoint<F> {
        debug_assert!(self.on_curve(p));
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                if y.is_zero() {
                    return CurvePoint::Infinity;
                }
                let den = F::from_i64(2).mul(&self.d).mul(y);
                let lambda = self.base.f_prime(x).mul(&den.inv().expect("nonzero"));
                self.third_point(x, y, x, lambda)
            }
        }
    }

    /// Chord-tangent addition.
    pub fn add(&self, p: &CurvePoint<F>, q: &CurvePoint<F>) -> CurvePoint<F> {
        debug_assert!(self.on_curve(p) && self.on_curve(q));
        match (p, q) {
            (CurvePoint::Infinity, _) => q.clone(),
            (_, CurvePoint::Infinity) => p.clone(),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
                if x1 == x2 {
                    if y1.add(y2).is_zero() {
                        return CurvePoint::Infinity;
                    }
                    return self.double(p);
                }
                let lambda = y2.sub(y1).mul(&x2.sub(x1).inv().expect("distinct x"));
                self.third_point(x1, y1, x2, lambda)
            }
        }
    }

    pub fn sub(&self, p: &CurvePoint<F>, q: &CurvePoint<F>) -> CurvePoint<F> {
        self.add(p, &self.neg(q))
    }

    /// `n P` by double-and-add.
    pub fn scalar_mul(&self, n: &BigInt, p: &CurvePoint<F>) -> CurvePoint<F> {
        let base = if n.is_negative() {
            self.neg(p)
        } else {
            p.clone()
        };
        let m = n.abs();
        let mut acc = CurvePoint::Infinity;
        for i in (0..m.bits()).rev() {
            acc = self.double(&acc);
            if m.bit(i) {
                acc = self.add(&acc, &base);
            }
        }
        acc
    }

    pub fn mul_i64(&self, n: i64, p: &CurvePoint<F>) -> CurvePoint<F> {
        self.scalar_mul(&BigInt::from(n), p)
    }

    /// Checks a point, naming it in the error.
    pub fn check_point(&self, p: &CurvePoint<F>, name: &str) -> Result<()> {
        if self.on_curve(p) {
            Ok(())
        } else {
            Err(Error::NotOnCurve(name.into()))
        }
    }
}

impl TwistedCurve<BigRational> {
    /// Naive height `log max(|num|, |den|)` of the x-coordinate, in bits.
    pub fn x_height_bits(p: &CurvePoint<BigRational>) -> u64 {
        match p {
            CurvePoint::Infinity => 0,
            CurvePoint::Affine { x, .. } => x.numer().bits().max(x.denom().bits()),
        }
    }

    /// True when the twist parameter is a squarefree integer.
    pub fn d_is_squarefree_integer(&self) -> bool {
        self.d.is_integer()
            && crate::exactmath::squarefree_part_int(&self.d.to_integer())
                .map(|s| s == self.d.to_integer())
                .unwrap_or(false)
    }

    /// `lcm` of all denominators in a point.
    pub fn denominator(p: &CurvePoint<BigRational>) -> BigInt {
        match p {
            CurvePoint::Infinity => BigInt::from(1),
            CurvePoint::Affine { x, y } => x.denom().lcm(y.denom()),
        }
    }
}
