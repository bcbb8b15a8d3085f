use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactmath::{q, RatFunc, UniPoly};

/// Rational point `(t0, r0, s0)` with `r0^2 = k1(t0)` and `s0^2 = k2(t0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConicPoint {
    pub t0: BigRational,
    pub r0: BigRational,
    pub s0: BigRational,
}

impl ConicPoint {
    pub fn new(t0: BigRational, r0: BigRational, s0: BigRational) -> Self {
        ConicPoint { t0, r0, s0 }
    }

    pub fn lies_on(&self, k1: &UniPoly, k2: &UniPoly) -> bool {
        &self.r0 * &self.r0 == k1.eval(&self.t0) && &self.s0 * &self.s0 == k2.eval(&self.t0)
    }
}

fn lin_parts(k: &UniPoly) -> Result<(BigRational, BigRational)> {
    if k.degree() != Some(1) {
        return Err(Error::WrongDegree {
            expected: 1,
            got: k.deg(),
        });
    }
    Ok((k.coeff(1), k.coeff(0)))
}

fn u_poly(cs: alloc::vec::Vec<BigRational>) -> RatFunc {
    RatFunc::from_poly(UniPoly::new(cs))
}

/// `t(u)` with `k(t(u))` a square in `Q(u)`. Linear `k = m t + c` gives
/// `t = (u^2 - c)/m`; quadratic `k` needs a point `(t0, s0)` and uses the
/// pencil of lines of slope `u` through it.
pub fn conic_param_single(
    k: &UniPoly,
    point: Option<(BigRational, BigRational)>,
) -> Result<RatFunc> {
    if !k.is_squarefree() {
        return Err(Error::Hypothesis("k must be squarefree".into()));
    }
    match k.degree() {
        Some(1) => {
            let (m, c) = lin_parts(k)?;
            Ok(u_poly(alloc::vec![-c / &m, q(0), m.recip()]))
        }
        Some(2) => {
            let (t0, s0) = point
                .ok_or_else(|| Error::Hypothesis("quadratic k needs a rational point".into()))?;
            if &s0 * &s0 != k.eval(&t0) {
                return Err(Error::Hypothesis(
                    "supplied point is not on s^2 = k(t)".into(),
                ));
            }
            let lc = k.lead();
            let slope = k.derivative().eval(&t0);
            let num = u_poly(alloc::vec![slope, -(q(2) * &s0)]);
            let den = u_poly(alloc::vec![-lc, q(0), q(1)]);
            Ok(&RatFunc::constant(t0) + &(&num / &den))
        }
        _ => Err(Error::WrongDegree {
            expected: 2,
            got: k.deg(),
        }),
    }
}

/// `t(u)` making both linear `k1(t)` and `k2(t)` squares, from a rational
/// point on `r^2 = k1(t), s^2 = k2(t)`. With `t = (r^2 - c1)/m1` the second
/// equation becomes `s^2 = alpha r^2 + beta`, parametrized by the lines
/// `s - s0 = u (r - r0)`.
pub fn conic_param_double(k1: &UniPoly, k2: &UniPoly, pt: &ConicPoint) -> Result<RatFunc> {
    let (m1, c1) = lin_parts(k1)?;
    let (m2, c2) = lin_parts(k2)?;
    let alpha = &m2 / &m1;
    let beta = &c2 - &alpha * &c1;
    if beta.is_zero() {
        return Err(Error::Hypothesis("k1 and k2 are linearly dependent".into()));
    }
    if !pt.lies_on(k1, k2) {
        return Err(Error::Hypothesis(
            "point is not on the intersection of the conics".into(),
        ));
    }
    let r = &RatFunc::constant(pt.r0.clone())
        + &(&u_poly(alloc::vec![q(2) * &alpha * &pt.r0, -(q(2) * &pt.s0)])
            / &u_poly(alloc::vec![-alpha.clone(), q(0), q(1)]));
    let t = &(&(&r * &r) - &RatFunc::constant(c1)) / &RatFunc::constant(m1);
    Ok(t)
}
