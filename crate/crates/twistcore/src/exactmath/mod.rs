//! Exact arithmetic over `Q`, `Q[t]` and `Q(t)`.

mod field;
pub mod intfact;
mod poly;
mod ratfunc;
mod squarefree;

pub use field::Field;
pub use intfact::{
    factor_biguint, factor_u64, is_prime_u64, squarefree_decomp_int, squarefree_part_i64,
    squarefree_part_int,
};
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
pub use poly::UniPoly;
pub use ratfunc::{compose, RatFunc};
pub use squarefree::{
    discriminant_cubic, is_square, refine_factorization, sqrt_monic_poly, sqrt_rational,
    square_class, squarefree_decompose, SquarefreeDecomposition,
};

pub(crate) use poly::q;
#[cfg(test)]
pub(crate) use poly::qr;

/// Parses `"n"` or `"n/d"` into a rational.
pub fn parse_rational(s: &str) -> crate::Result<BigRational> {
    use num_traits::Zero;
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n
        .parse()
        .map_err(|_| crate::Error::Parse(alloc::format!("bad rational {s:?}")))?;
    let d: BigInt = d
        .parse()
        .map_err(|_| crate::Error::Parse(alloc::format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(crate::Error::DivisionByZero);
    }
    Ok(BigRational::new(n, d))
}

/// Formats a rational as `"n"` or `"n/d"`.
pub fn format_rational(c: &BigRational) -> alloc::string::String {
    alloc::format!("{c}")
}
