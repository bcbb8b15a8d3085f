use num_rational::BigRational;
use num_traits::Zero;

use super::CubicCurve;
use crate::error::{Error, Result};
use crate::exactmath::{compose, q, RatFunc, UniPoly};

/// Isogeny `(X, Y) -> (phi_x(X), Y phi_y(X))` from `domain` to `codomain`,
/// satisfying `f_codomain(phi_x) = f_domain * phi_y^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isogeny {
    pub domain: CubicCurve<BigRational>,
    pub codomain: CubicCurve<BigRational>,
    pub phi_x: RatFunc,
    pub phi_y: RatFunc,
    pub degree: u32,
}

impl Isogeny {
    /// Checks the defining identity exactly.
    pub fn verify(&self) -> bool {
        let lhs = compose(&self.codomain.poly(), &self.phi_x);
        let rhs = &RatFunc::from_poly(self.domain.poly()) * &(&self.phi_y * &self.phi_y);
        lhs == rhs
    }

    fn checked(self) -> Result<Self> {
        if self.verify() {
            Ok(self)
        } else {
            Err(Error::Degenerate("isogeny identity fails".into()))
        }
    }
}

fn rf(num: UniPoly, den: UniPoly) -> RatFunc {
    RatFunc::new(num, den).expect("nonzero denominator")
}

/// Quotient by the 2-torsion point `(0, 0)` of `y^2 = x(x^2 + A x + B)`,
/// returned as the dual map from the quotient back to the curve.
pub fn two_isogeny_quotient(e: &CubicCurve<BigRational>) -> Result<Isogeny> {
    if !e.e0.is_zero() {
        return Err(Error::Hypothesis(
            "(0,0) is not a point of the curve".into(),
        ));
    }
    let (a, b) = (e.e2.clone(), e.e1.clone());
    let disc = &a * &a - q(4) * &b;
    let domain = CubicCurve::new(-q(2) * &a, disc.clone(), q(0))?;
    let quad = UniPoly::new(alloc::vec![disc.clone(), -q(2) * &a, q(1)]);
    let phi_x = rf(quad, UniPoly::new(alloc::vec![q(0), q(4)]));
    let phi_y = rf(
        UniPoly::new(alloc::vec![-disc, q(0), q(1)]),
        UniPoly::new(alloc::vec![q(0), q(0), q(8)]),
    );
    Isogeny {
        domain,
        codomain: e.clone(),
        phi_x,
        phi_y,
        degree: 2,
    }
    .checked()
}

/// Degree-3 isogeny onto `y^2 = x^3 + (b^2/4c) x^2 + b x + c` from its quotient
/// by the subgroup generated by `(0, sqrt c)`.
pub fn three_isogeny(b: &BigRational, c: &BigRational) -> Result<Isogeny> {
    if b.is_zero() || c.is_zero() {
        return Err(Error::Hypothesis("bc != 0".into()));
    }
    let b3 = b * b * b;
    let c2 = c * c;
    let c3 = &c2 * c;
    let delta = &b3 - q(54) * &c2;
    if delta.is_zero() {
        return Err(Error::Hypothesis("b^3 != 54c^2".into()));
    }
    let codomain = CubicCurve::new(b * b / (q(4) * c), b.clone(), c.clone())?;
    let domain = CubicCurve::new(
        -q(3) * b * b / (q(4) * c),
        b * &delta / (q(6) * &c2),
        -(&delta * &delta) / (q(108) * &c3),
    )?;
    let b2 = b * b;
    let b4 = &b2 * &b2;
    let b6 = &b4 * &b2;
    let c4 = &c2 * &c2;
    let lin = q(9) * &b4 * c - q(486) * b * &c3;
    let phi_x = rf(
        UniPoly::new(alloc::vec![
            -&b6 + q(108) * &b3 * &c2 - q(2916) * &c4,
            lin.clone(),
            -q(27) * &b2 * &c2,
            q(27) * &c3,
        ]),
        UniPoly::monomial(q(243) * &c3, 2),
    );
    let phi_y = rf(
        UniPoly::new(alloc::vec![
            q(2) * &b6 - q(216) * &b3 * &c2 + q(5832) * &c4,
            -lin,
            q(0),
            q(27) * &c3,
        ]),
        UniPoly::monomial(q(729) * &c3, 3),
    );
    Isogeny {
        domain,
        codomain,
        phi_x,
        phi_y,
        degree: 3,
    }
    .checked()
}
