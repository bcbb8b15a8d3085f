use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::Signed;

use crate::curves::{CubicCurve, CurvePoint, TwistedCurve};
use crate::error::{Error, Result};
use crate::exactmath::{compose, square_class, RatFunc, UniPoly};

use super::identity::TwistIdentity;

/// How a family was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Provenance {
    /// Catalog id, or `"forge"` for ad hoc pipeline runs.
    pub id: String,
    /// `"display"` for formulas transcribed from the source, `"derived"` for
    /// pipeline output, `"forge"` for user-driven constructions.
    pub source: String,
    pub params: Vec<(String, BigRational)>,
    pub t_of_u: Option<RatFunc>,
    pub note: String,
}

impl Provenance {
    pub fn param(&self, name: &str) -> Option<&BigRational> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

/// `g(u) y^2 = f(x)` over `Q(u)` with a list of points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistFamily {
    pub curve: CubicCurve<BigRational>,
    pub g: UniPoly,
    pub points: Vec<CurvePoint<RatFunc>>,
    pub claimed_rank: u32,
    pub provenance: Provenance,
    /// Optional factorization `g = lead * prod factors` into primitive
    /// integer polynomials; used to keep density values small.
    pub g_factors: Vec<UniPoly>,
}

impl TwistFamily {
    pub fn twisted_curve(&self) -> TwistedCurve<RatFunc> {
        TwistedCurve {
            base: self.curve.lift(),
            d: RatFunc::from_poly(self.g.clone()),
        }
    }

    /// Lemma-style genus bound `floor((deg g - 1)/2)` for `s^2 = g(u)`.
    pub fn genus_upper(&self) -> u32 {
        (self.g.deg().saturating_sub(1) / 2) as u32
    }

    /// Structural invariants: squarefree `g`, points on the curve and
    /// nonconstant. Returns the name of the first failing check.
    pub fn check_structure(&self) -> Result<()> {
        if !self.g.is_squarefree() {
            return Err(Error::Degenerate("g-squarefree".into()));
        }
        let e = self.twisted_curve();
        for (i, p) in self.points.iter().enumerate() {
            e.check_point(p, &format!("on-curve[P{}]", i + 1))?;
            match p.x() {
                Some(x) if !x.is_constant() => {}
                _ => return Err(Error::Degenerate(format!("nonconstant[P{}]", i + 1))),
            }
        }
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.g.deg()
    }
}

fn positive_lead(y: RatFunc) -> RatFunc {
    if y.num().lead().is_negative() {
        -y
    } else {
        y
    }
}

/// Generic assembly: the base twist is `f(base_h(t))`; each `h` in `hs`
/// contributes the point `(h(t), sqrt(f(h(t)) / f(base_h(t))))`, rewritten in
/// `u` via `t = t_of_u` and moved to the canonical square class of the twist.
pub fn assemble(
    f: &UniPoly,
    base_h: &RatFunc,
    hs: &[RatFunc],
    t_of_u: &RatFunc,
    claimed_rank: u32,
    provenance: Provenance,
) -> Result<TwistFamily> {
    let curve = CubicCurve::from_poly(f)?;
    let d = compose(f, &base_h.compose(t_of_u));
    if d.is_zero() {
        return Err(Error::Degenerate("base twist vanishes".into()));
    }
    let (g, qf) = square_class(&d)?;
    let mut points = Vec::with_capacity(hs.len());
    for (i, h) in hs.iter().enumerate() {
        let x = h.compose(t_of_u);
        let ratio = &compose(f, &x) / &d;
        let y0 = ratio.sqrt().ok_or_else(|| {
            Error::Degenerate(format!("f(h{}(t))/f(t) is not a square in Q(u)", i + 1))
        })?;
        points.push(CurvePoint::affine(x, positive_lead(&qf * &y0)));
    }
    let fam = TwistFamily {
        curve,
        g,
        points,
        claimed_rank,
        provenance,
        g_factors: Vec::new(),
    };
    fam.check_structure()?;
    Ok(fam)
}

/// Two-point family from one identity and a parametrization of `s^2 = k(t)`.
pub fn assemble_rank2(
    f: &UniPoly,
    tid: &TwistIdentity,
    t_of_u: &RatFunc,
    provenance: Provenance,
) -> Result<TwistFamily> {
    let mut prov = provenance;
    prov.t_of_u = Some(t_of_u.clone());
    assemble(
        f,
        &RatFunc::x(),
        &[RatFunc::x(), tid.h.clone()],
        t_of_u,
        2,
        prov,
    )
}

/// Three-point family from two identities and a parametrization of the
/// intersection `r^2 = k1(t), s^2 = k2(t)`.
pub fn assemble_rank3(
    f: &UniPoly,
    tid1: &TwistIdentity,
    tid2: &TwistIdentity,
    t_of_u: &RatFunc,
    provenance: Provenance,
) -> Result<TwistFamily> {
    let mut prov = provenance;
    prov.t_of_u = Some(t_of_u.clone());
    assemble(
        f,
        &RatFunc::x(),
        &[RatFunc::x(), tid1.h.clone(), tid2.h.clone()],
        t_of_u,
        3,
        prov,
    )
}

/// Compares two polynomials up to multiplication by a nonzero rational
/// square times the square of a rational function.
pub fn same_square_class(a: &UniPoly, b: &UniPoly) -> bool {
    if a.is_zero() || b.is_zero() {
        return false;
    }
    let r = RatFunc::new(a.clone(), b.clone()).expect("nonzero");
    crate::exactmath::is_square(&r)
}
