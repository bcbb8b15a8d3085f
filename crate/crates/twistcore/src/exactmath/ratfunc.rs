use alloc::format;
use alloc::string::String;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::UniPoly;
use super::squarefree::{sqrt_monic_poly, sqrt_rational};
use crate::error::{Error, Result};

/// Reduced quotient of polynomials with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: UniPoly,
    den: UniPoly,
}

impl RatFunc {
    pub fn new(num: UniPoly, den: UniPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: UniPoly, den: UniPoly) -> Self {
        if num.is_zero() {
            return RatFunc {
                num,
                den: UniPoly::one(),
            };
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_constant() {
                (num, den)
            } else {
                (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
            }
        };
        let l = den.lead().recip();
        RatFunc {
            num: num.scale(&l),
            den: den.scale(&l),
        }
    }

    pub fn from_poly(p: UniPoly) -> Self {
        RatFunc {
            num: p,
            den: UniPoly::one(),
        }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(UniPoly::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_poly(UniPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(UniPoly::one())
    }

    pub fn x() -> Self {
        Self::from_poly(UniPoly::x())
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    pub fn as_poly(&self) -> Option<&UniPoly> {
        self.den.is_constant().then_some(&self.num)
    }

    /// `max(deg num, deg den)`, the degree of the induced map on `P^1`.
    pub fn degree(&self) -> usize {
        self.num.deg().max(self.den.deg())
    }

    pub fn inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| Self::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, n: i32) -> Self {
        let base = if n < 0 {
            self.inv().expect("nonzero base")
        } else {
            self.clone()
        };
        let e = n.unsigned_abs();
        RatFunc {
            num: base.num.pow(e),
            den: base.den.pow(e),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Value at a rational point; `None` at a pole.
    pub fn eval(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x) / d)
    }

    /// `self(inner(t))`.
    pub fn compose(&self, inner: &RatFunc) -> RatFunc {
        let n = self.num.deg().max(self.den.deg());
        let a = &inner.num;
        let b = &inner.den;
        let top = self.num.homog_eval(a, b, n);
        let bot = self.den.homog_eval(a, b, n);
        Self::new(top, bot).expect("composition with a nonconstant map has nonzero denominator")
    }

    /// `r(-u)`.
    pub fn negate_var(&self) -> Self {
        Self::reduce(self.num.negate_var(), self.den.negate_var())
    }

    /// `r(u^k)`.
    pub fn substitute_power(&self, k: usize) -> Self {
        Self::reduce(self.num.substitute_power(k), self.den.substitute_power(k))
    }

    /// If `r(u) = s(u^k)` returns `s`.
    pub fn deflate(&self, k: usize) -> Option<Self> {
        Some(Self::reduce(self.num.deflate(k)?, self.den.deflate(k)?))
    }

    /// Exact square root, if `self` is a square in `Q(u)`. The sign is fixed so
    /// that the numerator's leading coefficient is positive.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let c = sqrt_rational(&self.num.lead())?;
        let n = sqrt_monic_poly(&self.num.monic())?;
        let d = sqrt_monic_poly(&self.den)?;
        Some(RatFunc {
            num: n.scale(&c),
            den: d,
        })
    }

    pub fn to_string_in(&self, var: &str) -> String {
        if self.den.is_one_poly() {
            return self.num.to_string_in(var);
        }
        format!(
            "({})/({})",
            self.num.to_string_in(var),
            self.den.to_string_in(var)
        )
    }
}

impl UniPoly {
    pub(crate) fn is_one_poly(&self) -> bool {
        self.degree() == Some(0) && self.lead().is_one()
    }
}

/// `f(h(t))` for a polynomial `f`.
pub fn compose(f: &UniPoly, h: &RatFunc) -> RatFunc {
    RatFunc::from_poly(f.clone()).compose(h)
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({})", self.to_string_in("t"))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_in("t"))
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::reduce(&self.num + &o.num, self.den.clone());
        }
        let g = self.den.gcd(&o.den);
        let a = o.den.div_exact(&g).unwrap();
        let b = self.den.div_exact(&g).unwrap();
        RatFunc::reduce(&(&self.num * &a) + &(&o.num * &b), &self.den * &a)
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = o.den.div_exact(&g1).unwrap();
        let n2 = o.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        let num = &n1 * &n2;
        let den = &d1 * &d2;
        let l = den.lead().recip();
        RatFunc {
            num: num.scale(&l),
            den: den.scale(&l),
        }
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, o: &RatFunc) -> RatFunc {
        self * &o.inv().expect("division by zero rational function")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: RatFunc) -> RatFunc {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl From<UniPoly> for RatFunc {
    fn from(p: UniPoly) -> Self {
        Self::from_poly(p)
    }
}
