//! Twist identities `f o h = k f j^2`, conic parametrizations and the
//! assembly of rank-2 and rank-3 twist families over `Q(u)`.

mod conic;
mod family;
mod identity;
mod mobius;

pub use conic::{conic_param_double, conic_param_single, ConicPoint};
pub use family::{
    assemble, assemble_rank2, assemble_rank3, same_square_class, Provenance, TwistFamily,
};
pub use identity::{twist_from_isogeny, twist_from_map, twist_from_permutation, TwistIdentity};
pub use mobius::{mobius_from_triples, permutation_map, Mobius};
