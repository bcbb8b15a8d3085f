use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::curves::{three_isogeny, two_isogeny_quotient, CubicCurve, CurvePoint};
use crate::error::{Error, Result};
use crate::exactmath::{compose, q, refine_factorization, RatFunc, UniPoly};
use crate::twistforge::{
    assemble, assemble_rank2, assemble_rank3, conic_param_double, conic_param_single,
    permutation_map, twist_from_isogeny, twist_from_map, twist_from_permutation, ConicPoint,
    Mobius, Provenance, TwistFamily, TwistIdentity,
};

use super::{FamilyId, FamilySpec};

type Q = BigRational;

fn up(cs: Vec<Q>) -> UniPoly {
    UniPoly::new(cs)
}

fn uc(c: Q) -> UniPoly {
    UniPoly::constant(c)
}

fn um(n: usize) -> UniPoly {
    UniPoly::monomial(q(1), n)
}

fn rf(n: UniPoly, d: UniPoly) -> Result<RatFunc> {
    RatFunc::new(n, d)
}

fn rp(p: UniPoly) -> RatFunc {
    RatFunc::from_poly(p)
}

fn lin(m: Q, c: Q) -> UniPoly {
    up(alloc::vec![c, m])
}

fn require(id: FamilyId, ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis(format!(
            "{id}: hypothesis {what} violated"
        )))
    }
}

fn pt(x: RatFunc, y: RatFunc) -> CurvePoint<RatFunc> {
    CurvePoint::affine(x, y)
}

fn provenance(spec: &FamilySpec, source: &str, note: &str) -> Provenance {
    Provenance {
        id: spec.id.as_str().to_string(),
        source: source.to_string(),
        params: spec.params.clone(),
        t_of_u: None,
        note: note.to_string(),
    }
}

fn family(
    spec: &FamilySpec,
    f: UniPoly,
    g: UniPoly,
    points: Vec<CurvePoint<RatFunc>>,
    factors: &[UniPoly],
    source: &str,
) -> Result<TwistFamily> {
    let g_factors = refine_factorization(&g, factors);
    let fam = TwistFamily {
        curve: CubicCurve::from_poly(&f)?,
        g,
        points,
        claimed_rank: claimed_rank(spec),
        provenance: provenance(spec, source, ""),
        g_factors,
    };
    fam.check_structure()?;
    Ok(fam)
}

fn claimed_rank(spec: &FamilySpec) -> u32 {
    match spec.id {
        FamilyId::Rem4_6 => level(spec).unwrap_or(1),
        id => id.claimed_rank(),
    }
}

fn level(spec: &FamilySpec) -> Result<u32> {
    let l = spec.get("level");
    [1u32, 2, 3]
        .into_iter()
        .find(|n| l == q(*n as i64))
        .ok_or_else(|| {
            Error::Hypothesis(format!(
                "rem4_6: level in {{1, 2, 3}} violated (level = {l})"
            ))
        })
}

fn lambda_cubic(l: &Q) -> UniPoly {
    up(alloc::vec![q(0), l.clone(), -(l + q(1)), q(1)])
}

/// Identity for the permutation of `roots` whose square class contains `k`,
/// rescaled to `k` itself.
fn identity_for_k(f: &UniPoly, roots: &[Q; 3], k: &UniPoly) -> Result<TwistIdentity> {
    const PERMS: [[usize; 3]; 5] = [[1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
    for perm in PERMS {
        let Ok(m) = permutation_map(roots, perm) else {
            continue;
        };
        let Ok(tid) = twist_from_permutation(f, &m) else {
            continue;
        };
        if let Ok(t) = tid.with_k(k) {
            return Ok(t);
        }
    }
    Err(Error::Degenerate(format!(
        "no root permutation of {f} has square class {k}"
    )))
}

/// Moves the points of `src` onto `D y^2 = f(x)` for a `D` in the same square
/// class as `src.g`, or the class of `-src.g` combined with `x -> -x` when `f`
/// is odd.
pub(crate) fn transport(src: &TwistFamily, target_g: &UniPoly) -> Result<Vec<CurvePoint<RatFunc>>> {
    let ratio = rf(src.g.clone(), target_g.clone())?;
    let odd = src.curve.e2.is_zero() && src.curve.e0.is_zero();
    let (w, flip) = match ratio.sqrt() {
        Some(w) => (w, false),
        None if odd => ((-&ratio).sqrt().ok_or_else(|| no_transport(src))?, true),
        None => return Err(no_transport(src)),
    };
    Ok(src
        .points
        .iter()
        .map(|p| match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                let x = if flip { -x } else { x.clone() };
                let y = &w * y;
                let y = if y.num().lead().is_negative() { -y } else { y };
                pt(x, y)
            }
        })
        .collect())
}

fn no_transport(src: &TwistFamily) -> Error {
    Error::Degenerate(format!(
        "{}: pipeline and display g lie in different square classes",
        src.provenance.id
    ))
}

pub(crate) fn build(spec: &FamilySpec) -> Result<TwistFamily> {
    match spec.id {
        FamilyId::Cor3_2 => cor3_2_display(spec),
        FamilyId::Cor3_3 => cor3_3_display(spec),
        FamilyId::Mestre3_4 => mestre_display(spec),
        FamilyId::Thm4_1 => thm4_1_display(spec),
        FamilyId::Thm4_2a | FamilyId::Thm4_2b => {
            let mut fam = thm4_2_pipeline(spec, &mut Vec::new())?;
            fam.provenance.source = "derived".into();
            fam.provenance.note = "g and points from the pipeline".into();
            Ok(fam)
        }
        FamilyId::Thm4_3 => thm4_3_display(spec),
        FamilyId::Thm4_5 => thm4_5_display(spec),
        FamilyId::Rem4_6 => rem4_6_display(spec),
    }
}

/// The twistforge construction of a catalog family.
pub fn pipeline(spec: &FamilySpec) -> Result<TwistFamily> {
    pipeline_with_identities(spec).map(|(fam, _)| fam)
}

/// The pipeline family together with every twist identity it was built from.
pub fn pipeline_with_identities(spec: &FamilySpec) -> Result<(TwistFamily, Vec<TwistIdentity>)> {
    let mut ids = Vec::new();
    let mut fam = match spec.id {
        FamilyId::Cor3_2 => cor3_2_pipeline(spec, &mut ids),
        FamilyId::Cor3_3 => cor3_3_pipeline(spec, &mut ids),
        FamilyId::Mestre3_4 => mestre_pipeline(spec, &mut ids),
        FamilyId::Thm4_1 => thm4_1_pipeline(spec, &mut ids),
        FamilyId::Thm4_2a | FamilyId::Thm4_2b => thm4_2_pipeline(spec, &mut ids),
        FamilyId::Thm4_3 => thm4_3_pipeline(spec, &mut ids),
        FamilyId::Thm4_5 => thm4_5_pipeline(spec, &mut ids),
        FamilyId::Rem4_6 => rem4_6_pipeline(spec, &mut ids),
    }?;
    fam.provenance.id = spec.id.as_str().to_string();
    fam.provenance.source = "derived".into();
    fam.provenance.params = spec.params.clone();
    Ok((fam, ids))
}

/// The three families `g(u)`, `g(u^2)`, `g(u^4)` with `g = 6(u^3 - 33u^2 - 33u + 1)`.
pub fn rem4_6_tower() -> Vec<TwistFamily> {
    (1..=3)
        .map(|l| {
            let spec = FamilySpec::new(FamilyId::Rem4_6, &[("level".to_string(), q(l))])
                .expect("level param");
            build(&spec).expect("tower levels are valid")
        })
        .collect()
}

fn cor3_2_check(spec: &FamilySpec) -> Result<(Q, Q, UniPoly)> {
    let (a, b) = (spec.get("a"), spec.get("b"));
    let id = spec.id;
    require(id, !a.is_zero(), "a != 0")?;
    require(id, !b.is_zero(), "b != 0")?;
    require(id, &a * &a != q(4) * &b, "disc(f) = b^2(a^2 - 4b) != 0")?;
    let f = up(alloc::vec![q(0), b.clone(), a.clone(), q(1)]);
    Ok((a, b, f))
}

fn cor3_2_display(spec: &FamilySpec) -> Result<TwistFamily> {
    let (a, b, f) = cor3_2_check(spec)?;
    let b2 = &b * &b;
    let s = up(alloc::vec![b2.clone(), q(0), q(1)]);
    let quart = up(alloc::vec![
        &b2 * &b2,
        q(0),
        q(2) * &b2 - &a * &a * &b,
        q(0),
        q(1)
    ]);
    let ab = &a * &b;
    let g = (&s * &quart).scale(&-ab.clone());
    let p1 = pt(
        rp(s.scale(&-ab.recip())),
        RatFunc::constant((&ab * &ab).recip()),
    );
    let p2 = pt(
        rf(s.scale(&-(&b / &a)), um(2))?,
        rf(uc(&b / (&a * &a)), um(3))?,
    );
    family(spec, f, g, alloc::vec![p1, p2], &[s, quart], "display")
}

fn cor3_2_pipeline(spec: &FamilySpec, ids: &mut Vec<TwistIdentity>) -> Result<TwistFamily> {
    let (a, b, f) = cor3_2_check(spec)?;
    let h = Mobius::new(-b.clone(), q(0), a.clone(), b.clone())?;
    let k = lin(-(&a * &b), -(&b * &b));
    let tid = twist_from_permutation(&f, &h)?.with_k(&k)?;
    ids.push(tid.clone());
    let t = conic_param_single(&tid.k, None)?;
    assemble_rank2(&f, &tid, &t, provenance(spec, "derived", ""))
}

fn cor3_3_check(spec: &FamilySpec) -> Result<(Q, Q, UniPoly)> {
    let (b, c) = (spec.get("b"), spec.get("c"));
    let id = spec.id;
    require(id, !b.is_zero(), "b != 0")?;
    require(id, !c.is_zero(), "c != 0")?;
    require(id, &b * &b * &b != q(54) * &c * &c, "b^3 != 54c^2")?;
    let f = up(alloc::vec![
        c.clone(),
        b.clone(),
        &b * &b / (q(4) * &c),
        q(1)
    ]);
    require(id, CubicCurve::from_poly(&f).is_ok(), "disc(f) != 0")?;
    Ok((b, c, f))
}

fn cor3_3_display(spec: &FamilySpec) -> Result<TwistFamily> {
    let (b, c, f) = cor3_3_check(spec)?;
    let (b3, c2) = (&b * &b * &b, &c * &c);
    let c4 = &c2 * &c2;
    let sextic = up(alloc::vec![
        q(54) * &c4 * &c2 - &b3 * &c4,
        q(0),
        q(54) * &c4 + q(2) * &b3 * &c2,
        q(0),
        q(18) * &c2 - &b3,
        q(0),
        q(2),
    ]);
    let g = sextic.scale(&-(&b * &c));
    let s = up(alloc::vec![q(3) * &c2, q(0), q(1)]);
    let uc2 = up(alloc::vec![-c2.clone(), q(0), q(1)]);
    let w = (&um(2) * &uc2.pow(2)).scale(&(&b3 * &b));
    let cg = g.scale(&c);
    let p1 = pt(
        rp(s.scale(&-(q(2) * &b * &c).recip())),
        RatFunc::constant((q(4) * &b * &b * &c2).recip()),
    );
    let x2 = rf(&cg - &w, (&um(2) * &s.pow(2)).scale(&(q(4) * &b * &b * &c)))?;
    let y2 = rf(
        &cg + &w.scale(&q(3)),
        (&um(3) * &s.pow(3)).scale(&(q(8) * &b3 * &c)),
    )?;
    family(
        spec,
        f,
        g,
        alloc::vec![p1, pt(x2, y2)],
        &[sextic],
        "display",
    )
}

fn cor3_3_pipeline(spec: &FamilySpec, ids: &mut Vec<TwistIdentity>) -> Result<TwistFamily> {
    let (b, c, f) = cor3_3_check(spec)?;
    let iso = three_isogeny(&b, &c)?;
    let delta = &b * &b * &b - q(54) * &c * &c;
    let mu = Mobius::new(delta, q(0), q(12) * &b * &c, q(18) * &c * &c)?;
    let k = lin(-(q(2) * &b * &c), -(q(3) * &c * &c));
    let tid = twist_from_isogeny(&f, &iso, &mu)?.with_k(&k)?;
    ids.push(tid.clone());
    let t = conic_param_single(&tid.k, None)?;
    assemble_rank2(&f, &tid, &t, provenance(spec, "derived", ""))
}

fn mestre_check(spec: &FamilySpec) -> Result<(Q, Q, UniPoly)> {
    let (a, b) = (spec.get("a"), spec.get("b"));
    let id = spec.id;
    require(id, !a.is_zero(), "a != 0")?;
    require(id, !b.is_zero(), "b != 0")?;
    require(
        id,
        q(4) * &a * &a * &a + q(27) * &b * &b != q(0),
        "4a^3 + 27b^2 != 0",
    )?;
    Ok((a.clone(), b.clone(), up(alloc::vec![b, a, q(0), q(1)])))
}

fn mestre_display(spec: &FamilySpec) -> Result<TwistFamily> {
    let (a, b, f) = mestre_check(spec)?;
    let big_a = UniPoly::from_i64s(&[1, 0, 1, 0, 1]);
    let big_b = UniPoly::from_i64s(&[1, 0, 1]);
    let inner = &big_a.pow(3).scale(&(&b * &b)) + &(&um(4) * &big_b.pow(2)).scale(&(&a * &a * &a));
    let g = (&inner * &big_b).scale(&-(&a * &b));
    let points = transport(&mestre_pipeline(spec, &mut Vec::new())?, &g)?;
    family(spec, f, g, points, &[inner, big_b], "display+derived")
}

fn mestre_pipeline(spec: &FamilySpec, ids: &mut Vec<TwistIdentity>) -> Result<TwistFamily> {
    let (a, b, f) = mestre_check(spec)?;
    let num = up(alloc::vec![b.clone(), q(0), q(0), -b.clone()]);
    let h1 = rf(num.clone(), up(alloc::vec![-a.clone(), q(0), a.clone()]))?;
    let h2 = rf(num, up(alloc::vec![q(0), -a.clone(), q(0), a.clone()]))?;
    let t = rp(um(2));
    ids.push(twist_from_map(&f, &h1)?);
    ids.push(twist_from_map(&f, &h2)?);
    let mut prov = provenance(spec, "derived", "");
    prov.t_of_u = Some(t.clone());
    assemble(&f, &h1, &[h1.clone(), h2], &t, 2, prov)
}

fn thm4_1_check(spec: &FamilySpec) -> Result<(Q, Q, UniPoly)> {
    let a = spec.get("a");
    require(spec.id, !a.is_zero(), "a in Q^x")?;
    let l = q(-2) * &a * &a;
    let f = lambda_cubic(&l);
    Ok((a, l, f))
}

fn thm4_1_display(spec: &FamilySpec) -> Result<TwistFamily> {
    let (a, l, f) = thm4_1_check(spec)?;
    let l1 = &l * (q(2) * &l - q(1));
    let d = up(alloc::vec![q(2) - &l, q(0), l1.clone()]);
    let n = up(alloc::vec![
        (&l - q(2)) * (&l - q(2)) * (&l + q(1)),
        q(-4) * &l * (&l - q(1)) * (&l - q(2)),
        q(2) * &l * (&l + q(1)) * (q(2) * &l * &l - q(3) * &l + q(2)),
        q(-4) * &l * &l * (&l - q(1)) * (q(2) * &l - q(1)),
        &l * &l * (&l + q(1)) * (q(2) * &l - q(1)) * (q(2) * &l - q(1)),
    ]);
    let d2 = d.pow(2);
    let n1 = &n - &d2.scale(&q(2));
    let n2 = &n - &d2.scale(&(q(2) * &l));
    let g = (&(&n * &n1) * &n2).scale(&q(2));
    let p1 = pt(
        rf(n.clone(), d2.scale(&q(2)))?,
        rf(uc(q(1)), d.pow(3).scale(&q(4)))?,
    );
    let e = (&up(alloc::vec![q(0), q(-1), q(1)]) * &up(alloc::vec![q(2) - &l, l1.clone()]))
        .scale(&(q(4) * &l));
    let m2 = up(alloc::vec![&l - q(2), q(-2) * &l1, l1.clone()]);
    let m3 = up(alloc::vec![&l - q(2), -(q(2) * &l - q(4)), l1.clone()]);
    let p2 = pt(
        rf((&d2 - &e).scale(&(&l * &l)), m2.pow(2))?,
        rf(uc(&a * &l), m2.pow(3))?,
    );
    let p3 = pt(
        rf(&d2 + &e, m3.pow(2).scale(&l))?,
        rf(uc(-a.clone()), m3.pow(3).scale(&(&l * &l)))?,
    );
    family(spec, f, g, alloc::vec![p1, p2, p3], &[n, n1, n2], "display")
}

fn thm4_1_pipeline(spec: &FamilySpec, ids: &mut Vec<TwistIdentity>) -> Result<TwistFamily> {
    let (a, l, f) = thm4_1_check(spec)?;
    let roots = [q(0), q(1), l.clone()];
    let one_l = q(1) - &l;
    let k1 = lin(&one_l * (&l - q(2)), one_l.clone());
    let k2 = lin(&l * &one_l * (q(2) * &l - q(1)), -(&l * &one_l * &l * &l));
    let tid1 = identity_for_k(&f, &roots, &k1)?;
    let tid2 = identity_for_k(&f, &roots, &k2)?;
    ids.extend([tid1.clone(), tid2.clone()]);
    let r0 = &a * (&l - q(1));
    let cp = ConicPoint::new((&l + q(1)) / q(2), r0.clone(), r0);
    let t = conic_param_double(&k2, &k1, &cp)?;
    assemble_rank3(&f, &tid1, &tid2, &t, provenance(spec, "derived", ""))
}

fn thm4_2_pipeline(spec: &FamilySpec, ids: &mut Vec<TwistIdentity>) -> Result<TwistFamily> {
    let a = spec.get("a");
    let id = spec.id;
    let l = if id == FamilyId::Thm4_2a {
        require(id, !a.is_zero() && a.abs() != q(1), "a not in {0, 1, -1}")?;
        (q(1) - &a * &a) / (&a * &a + q(2))
    } else {
        require(id, !a.is_zero() && a != q(2), "a not in {0, 2}")?;
        let l = &a * (&a - q(2)) / (&a * &a + q(1));
        require(id, l != q(1), "lambda != 1 (a != -1/2)")?;
        l
    };
    let f = lambda_cubic(&l);
    require(id, CubicCurve::from_poly(&f).is_ok(), "disc(f) != 0")?;
    let roots = [q(0), q(1), l.clone()];
    let one_l = q(1) - &l;
    let k1 = lin(&one_l * (&l - q(2)), one_l.clone());
    let k2 = lin(&one_l * &l * (&l * &l - &l + q(1)), -(&one_l * &l * &l));
    let k3 = lin(&l * (&l + q(1)), -(&l * &l));
    let (ka, kb, cp) = if id == FamilyId::Thm4_2a {
        let cp = ConicPoint::new(
            q(2) * &l / (&l + q(1)),
            &a * (&l - q(1)),
            &a * &l * (&l - q(1)),
        );
        (k1, k2, cp)
    } else {
        let s0 = (&a * &a + &a - q(1)) / (&a * &a + q(1));
        (k2, k3, ConicPoint::new(l.recip(), &l - q(1), s0))
    };
    let tid1 = identity_for_k(&f, &roots, &ka)?;
    let tid2 = identity_for_k(&f, &roots, &kb)?;
    ids.extend([tid1.clone(), tid2.clone()]);
    let t = conic_param_double(&ka, &kb, &cp)?;
    let mut fam = assemble_rank3(&f, &tid1, &tid2, &t, provenance(spec, "derived", ""))?;
    fam.g_factors = thm4_2_factors(&fam.g, &f, &t, &[&ka, &kb]);
    Ok(fam)
}

/// Splits `g` using the cofactors of the squares `f(t(u))`, `k_i(t(u))`.
fn thm4_2_factors(g: &UniPoly, f: &UniPoly, t: &RatFunc, ks: &[&UniPoly]) -> Vec<UniPoly> {
    let mut cands: Vec<UniPoly> = Vec::new();
    for r in f.rational_roots() {
        let lin_r = lin(q(1), -r);
        cands.push(compose(&lin_r, t).num().clone());
    }
    for k in ks {
        cands.push(compose(k, t).num().clone());
    }
    refine_factorization(g, &cands)
}

fn thm4_3_check(spec: &FamilySpec) -> Result<(Q, Q, UniPoly)> {
    let (a, b) = (spec.get("a"), spec.get("b"));
    let id = spec.id;
    require(id, !a.is_zero(), "a in Q^x")?;
    require(id, !b.is_zero(), "b in Q^x")?;
    require(id, a != q(1), "a != 1")?;
    require(id, a != q(-1), "a != -1 (f singular)")?;
    let f = &(&um(1) * &lin(q(1), -b.clone())) * &lin(q(1), -(&a * &a * &b));
    Ok((a, b, f))
}

fn thm4_3_display(spec: &FamilySpec) -> Result<TwistFamily> {
    let (a, b, f) = thm4_3_check(spec)?;
    let s = &a * &a - q(3) * &a + q(4);
    let am1 = &a - q(1);
    let am1_2 = &am1 * &am1;
    let a2p1 = &a * &a + q(1);
    let l1 = lin(am1_2.clone(), -a.clone());
    let l2 = lin(&a * &a * &s, -(&a2p1 * &am1));
    let q1 = up(alloc::vec![&a + q(1), q(-2) * &a * &am1, &a * &s]);
    let q2 = up(alloc::vec![
        &a2p1 * &a2p1,
        q(-2) * &a * &am1_2 * &a2p1,
        &a * (&a + q(1)) * &am1_2 * &s
    ]);
    let quart = up(alloc::vec![
        &a2p1 * &a2p1,
        q(-4) * &a * &am1_2 * &a2p1,
        q(2) * &am1_2 * (q(3) * &a * &a * &a * &a - q(6) * &a * &a * &a + q(5) * &a * &a + q(2)),
        q(-4) * &a * &a * &am1_2 * &am1 * &s,
        &a * &a * &am1_2 * &s * &s,
    ]);
    let parts = [um(1), l1, l2, q1, q2, quart];
    let g = parts.iter().fold(uc(q(-4) * &b), |acc, p| &acc * p);
    let points = transport(&thm4_3_pipeline(spec, &mut Vec::new())?, &g)?;
    family(spec, f, g, points, &parts, "display+derived")
}

fn thm4_3_pipeline(spec: &FamilySpec, ids: &mut Vec<TwistIdentity>) -> Result<TwistFamily> {
    let (a, b, f) = thm4_3_check(spec)?;
    let e = CubicCurve::from_poly(&f)?;
    let iso = two_isogeny_quotient(&e)?;
    let s = &a * &a - q(3) * &a + q(4);
    let top = &a * (&a + q(1)) * (&a - q(1)) * (&a - q(1)) * &b;
    let mu = Mobius::new(top.clone(), -(&top * &b), -s.clone(), &a * (&a + q(1)) * &b)?;
    let k1 = lin(
        (&a - q(1)) * &a * &b * &s,
        -((&a - q(1)) * &a * &b * &a * (&a + q(1)) * &b),
    );
    let k2 = lin(&b * (&a * &a + q(1)), -(&b * &a * &a * &b));
    let tid1 = twist_from_isogeny(&f, &iso, &mu)?.with_k(&k1)?;
    let roots = [q(0), b.clone(), &a * &a * &b];
    let h2 = permutation_map(&roots, [0, 2, 1])?;
    let tid2 = twist_from_permutation(&f, &h2)?.with_k(&k2)?;
    ids.extend([tid1.clone(), tid2.clone()]);
    let t0 = &a * &a * &b;
    let cp = ConicPoint::new(t0.clone(), (&a - q(1)) * (&a - q(1)) * &a * &b, t0);
    let t = conic_param_double(&k1, &k2, &cp)?;
    assemble_rank3(&f, &tid1, &tid2, &t, provenance(spec, "derived", ""))
}

fn x3_minus_x() -> UniPoly {
    UniPoly::from_i64s(&[0, -1, 0, 1])
}

fn thm4_5_points(v: &UniPoly) -> Result<Vec<CurvePoint<RatFunc>>> {
    // v is u^2 at level 3 and u at level 2.
    let v2 = v.pow(2);
    let p = |sign: i64| &v2 + &(&v.scale(&q(sign * 6)) + &uc(q(1)));
    let vp1 = v + &uc(q(1));
    let vm1 = v - &uc(q(1));
    let p1 = pt(
        rf(p(-1).scale(&q(-1)), vp1.pow(2).scale(&q(3)))?,
        rf(uc(q(2)), vp1.pow(3).scale(&q(9)))?,
    );
    let p2 = pt(
        rf(p(1).scale(&q(-1)), vm1.pow(2).scale(&q(3)))?,
        rf(uc(q(2)), vm1.pow(3).scale(&q(9)))?,
    );
    Ok(alloc::vec![p1, p2])
}

fn thm4_5_display(spec: &FamilySpec) -> Result<TwistFamily> {
    let g = UniPoly::from_i64s(&[6, 0, 0, 0, -198, 0, 0, 0, -198, 0, 0, 0, 6]);
    let mut points = thm4_5_points(&um(2))?;
    points.push(pt(
        rf(UniPoly::from_i64s(&[1, 0, 0, 0, 1]), um(2).scale(&q(6)))?,
        rf(uc(q(1)), um(3).scale(&q(36)))?,
    ));
    let factors = [
        UniPoly::from_i64s(&[1, 0, 0, 0, 1]),
        UniPoly::from_i64s(&[1, 0, 6, 0, 1]),
        UniPoly::from_i64s(&[1, 0, -6, 0, 1]),
    ];
    family(spec, x3_minus_x(), g, points, &factors, "display")
}

fn thm4_5_identities() -> Result<(TwistIdentity, TwistIdentity)> {
    let f = x3_minus_x();
    let roots = [q(-1), q(0), q(1)];
    let k1 = UniPoly::from_i64s(&[2, 6]);
    let k2 = UniPoly::from_i64s(&[2, -6]);
    Ok((
        identity_for_k(&f, &roots, &k1)?,
        identity_for_k(&f, &roots, &k2)?,
    ))
}

fn thm4_5_pipeline(spec: &FamilySpec, ids: &mut Vec<TwistIdentity>) -> Result<TwistFamily> {
    let (tid1, tid2) = thm4_5_identities()?;
    ids.extend([tid1.clone(), tid2.clone()]);
    let cp = ConicPoint::new(q(1) / q(3), q(2), q(0));
    let t = conic_param_double(&tid1.k, &tid2.k, &cp)?;
    assemble_rank3(
        &x3_minus_x(),
        &tid1,
        &tid2,
        &t,
        provenance(spec, "derived", ""),
    )
}

fn rem4_6_base() -> UniPoly {
    UniPoly::from_i64s(&[6, -198, -198, 6])
}

fn rem4_6_display(spec: &FamilySpec) -> Result<TwistFamily> {
    match level(spec)? {
        1 => {
            let g = rem4_6_base();
            let up1 = UniPoly::from_i64s(&[1, 1]);
            let x = rf(UniPoly::from_i64s(&[-5, 1]).pow(2), up1.scale(&q(24)))?;
            let y = rf(
                (&UniPoly::from_i64s(&[-5, 1]) * &UniPoly::from_i64s(&[7, 1])).scale(&q(-1)),
                up1.pow(2).scale(&q(288)),
            )?;
            let factors = [up1, UniPoly::from_i64s(&[1, -34, 1])];
            family(
                spec,
                x3_minus_x(),
                g,
                alloc::vec![pt(x, y)],
                &factors,
                "derived",
            )
        }
        2 => {
            let g = rem4_6_base().substitute_power(2);
            let points = thm4_5_points(&um(1))?;
            let factors = [
                UniPoly::from_i64s(&[1, 0, 1]),
                UniPoly::from_i64s(&[1, 0, -34, 0, 1]),
            ];
            family(spec, x3_minus_x(), g, points, &factors, "display")
        }
        _ => {
            let mut fam = thm4_5_display(spec)?;
            fam.claimed_rank = 3;
            Ok(fam)
        }
    }
}

fn rem4_6_pipeline(spec: &FamilySpec, ids: &mut Vec<TwistIdentity>) -> Result<TwistFamily> {
    let f = x3_minus_x();
    match level(spec)? {
        1 => {
            let pt_fam = rem4_6_display(spec)?;
            let x = pt_fam.points[0].x().expect("affine").clone();
            ids.push(twist_from_map(&f, &x)?);
            let mut prov = provenance(spec, "derived", "");
            prov.t_of_u = Some(RatFunc::x());
            assemble(&f, &x, core::slice::from_ref(&x), &RatFunc::x(), 1, prov)
        }
        2 => {
            let (tid1, _) = thm4_5_identities()?;
            ids.push(tid1.clone());
            let cp = ConicPoint::new(q(1) / q(3), q(2), q(0));
            let full = conic_param_double(&tid1.k, &UniPoly::from_i64s(&[2, -6]), &cp)?;
            let t = full
                .deflate(2)
                .ok_or_else(|| Error::Degenerate("rem4_6: t(u) is not even".into()))?;
            let id = RatFunc::x();
            let mut prov = provenance(spec, "derived", "");
            prov.t_of_u = Some(t.clone());
            assemble(&f, &id, &[id.clone(), tid1.h.clone()], &t, 2, prov)
        }
        _ => thm4_5_pipeline(spec, ids),
    }
}
