use core::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{q, RatFunc, UniPoly};

/// Linear fractional map `t -> (a t + b)/(c t + d)`, scaled so the first
/// nonzero entry of `(a, b, c, d)` is 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mobius {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

impl Mobius {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Result<Self> {
        if (&a * &d - &b * &c).is_zero() {
            return Err(Error::Degenerate("Mobius determinant is zero".into()));
        }
        let lead = [&a, &b, &c, &d]
            .into_iter()
            .find(|v| !v.is_zero())
            .cloned()
            .unwrap();
        let s = lead.recip();
        Ok(Mobius {
            a: a * &s,
            b: b * &s,
            c: c * &s,
            d: d * &s,
        })
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(q(a), q(b), q(c), q(d))
    }

    pub fn identity() -> Self {
        Mobius {
            a: q(1),
            b: q(0),
            c: q(0),
            d: q(1),
        }
    }

    /// True when the map is a polynomial (`c = 0`).
    pub fn is_linear(&self) -> bool {
        self.c.is_zero()
    }

    pub fn to_ratfunc(&self) -> RatFunc {
        RatFunc::new(
            UniPoly::new(alloc::vec![self.b.clone(), self.a.clone()]),
            UniPoly::new(alloc::vec![self.d.clone(), self.c.clone()]),
        )
        .expect("nonzero denominator")
    }

    /// Image of a finite point, `None` when it maps to infinity.
    pub fn eval(&self, t: &BigRational) -> Option<BigRational> {
        let den = &self.c * t + &self.d;
        (!den.is_zero()).then(|| (&self.a * t + &self.b) / den)
    }

    /// `self o other`.
    pub fn compose(&self, o: &Mobius) -> Mobius {
        Mobius::new(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
        .expect("product of invertible maps")
    }

    pub fn inverse(&self) -> Mobius {
        Mobius::new(self.d.clone(), -&self.b, -&self.c, self.a.clone()).expect("invertible")
    }

    /// Map sending `z[0], z[1], z[2]` to `0, 1, infinity`.
    fn to_standard(z: &[BigRational; 3]) -> Result<Mobius> {
        let (z1, z2, z3) = (&z[0], &z[1], &z[2]);
        if z1 == z2 || z2 == z3 || z1 == z3 {
            return Err(Error::Hypothesis("triple entries must be distinct".into()));
        }
        let p = z2 - z3;
        let r = z2 - z1;
        Mobius::new(p.clone(), -(z1 * &p), r.clone(), -(z3 * &r))
    }
}

/// The unique linear fractional map with `src[i] -> dst[i]`.
pub fn mobius_from_triples(src: &[BigRational; 3], dst: &[BigRational; 3]) -> Result<Mobius> {
    let s = Mobius::to_standard(src)?;
    let t = Mobius::to_standard(dst)?;
    let m = t.inverse().compose(&s);
    for (x, y) in src.iter().zip(dst) {
        debug_assert_eq!(m.eval(x).as_ref(), Some(y));
    }
    Ok(m)
}

/// Map acting on `roots` as `roots[i] -> roots[perm[i]]`.
pub fn permutation_map(roots: &[BigRational; 3], perm: [usize; 3]) -> Result<Mobius> {
    let dst = [
        roots[perm[0]].clone(),
        roots[perm[1]].clone(),
        roots[perm[2]].clone(),
    ];
    mobius_from_triples(roots, &dst)
}

impl fmt::Debug for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Mobius(({})t + ({}))/(({})t + ({}))",
            self.a, self.b, self.c, self.d
        )
    }
}

impl Default for Mobius {
    fn default() -> Self {
        Self::identity()
    }
}

impl Mobius {
    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_one()
    }
}
