use alloc::format;

use crate::curves::Isogeny;
use crate::error::{Error, Result};
use crate::exactmath::{compose, sqrt_rational, square_class, RatFunc, UniPoly};

use super::mobius::Mobius;

/// Certified `f o h = k f j^2` with `k` squarefree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistIdentity {
    pub f: UniPoly,
    pub h: RatFunc,
    pub k: UniPoly,
    pub j: RatFunc,
}

impl TwistIdentity {
    /// Exact re-expansion check.
    pub fn verify(&self) -> bool {
        let lhs = compose(&self.f, &self.h);
        let rhs = &RatFunc::from_poly(&self.k * &self.f) * &(&self.j * &self.j);
        lhs == rhs && self.k.is_squarefree()
    }

    /// Same identity with `k` replaced by `k2`, which must differ from `k` by a
    /// rational square.
    pub fn with_k(&self, k2: &UniPoly) -> Result<Self> {
        let ratio = RatFunc::new(k2.clone(), self.k.clone())?;
        let c = ratio.as_constant().ok_or_else(|| {
            Error::Degenerate(format!("{k2} is not a constant multiple of {}", self.k))
        })?;
        let s = sqrt_rational(&c).ok_or_else(|| {
            Error::Degenerate(format!(
                "{k2} / ({}) = {c} is not a rational square",
                self.k
            ))
        })?;
        Ok(TwistIdentity {
            f: self.f.clone(),
            h: self.h.clone(),
            k: k2.clone(),
            j: self.j.scale(&s.recip()),
        })
    }

    /// True when `k2` lies in the same square class as `k`.
    pub fn k_matches(&self, k2: &UniPoly) -> bool {
        self.with_k(k2).is_ok()
    }
}

fn check_cubic(f: &UniPoly) -> Result<()> {
    if f.degree() != Some(3) {
        return Err(Error::WrongDegree {
            expected: 3,
            got: f.deg(),
        });
    }
    Ok(())
}

/// Identity for an arbitrary substitution `h`.
pub fn twist_from_map(f: &UniPoly, h: &RatFunc) -> Result<TwistIdentity> {
    check_cubic(f)?;
    let r = &compose(f, h) / &RatFunc::from_poly(f.clone());
    let (k, j) = square_class(&r)?;
    let tid = TwistIdentity {
        f: f.clone(),
        h: h.clone(),
        k,
        j,
    };
    debug_assert!(tid.verify());
    Ok(tid)
}

fn homog_numerator(f: &UniPoly, m: &Mobius) -> UniPoly {
    let a = UniPoly::new(alloc::vec![m.b.clone(), m.a.clone()]);
    let b = UniPoly::new(alloc::vec![m.d.clone(), m.c.clone()]);
    f.homog_eval(&a, &b, 3)
}

/// Identity from a linear fractional map permuting the roots of `f`.
pub fn twist_from_permutation(f: &UniPoly, h: &Mobius) -> Result<TwistIdentity> {
    check_cubic(f)?;
    if h.is_linear() {
        return Err(Error::Degenerate(
            "h is a polynomial, so f(h)/f has no linear square class".into(),
        ));
    }
    let n = homog_numerator(f, h);
    if n.is_zero() || !f.divides(&n) {
        return Err(Error::Hypothesis(format!(
            "{h:?} does not permute the roots of {f}"
        )));
    }
    let tid = twist_from_map(f, &h.to_ratfunc())?;
    if tid.k.degree() != Some(1) {
        return Err(Error::Degenerate(format!(
            "square class {} is not linear",
            tid.k
        )));
    }
    Ok(tid)
}

/// Identity `f(phi_x(mu(t))) = k f j^2` from an isogeny onto `f` and a map
/// `mu` sending the roots of `f` to the roots of the isogeny's domain cubic.
pub fn twist_from_isogeny(f: &UniPoly, iso: &Isogeny, mu: &Mobius) -> Result<TwistIdentity> {
    check_cubic(f)?;
    if iso.codomain.poly() != f.monic() {
        return Err(Error::Hypothesis("isogeny codomain differs from f".into()));
    }
    if mu.is_linear() {
        return Err(Error::Degenerate("mu is a polynomial".into()));
    }
    let n = homog_numerator(&iso.domain.poly(), mu);
    if n.is_zero() || !f.divides(&n) {
        return Err(Error::Hypothesis(format!(
            "{mu:?} does not send the roots of f to those of the quotient"
        )));
    }
    let h = iso.phi_x.compose(&mu.to_ratfunc());
    let tid = twist_from_map(f, &h)?;
    if tid.k.degree() != Some(1) {
        return Err(Error::Degenerate(format!(
            "square class {} is not linear",
            tid.k
        )));
    }
    Ok(tid)
}
