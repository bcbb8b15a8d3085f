//! Exact construction and certification of quadratic twist families of
//! elliptic curves with large rank over `Q(u)`.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, the command
//! line front end and the parallel density engine live in `twistlab`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod catalog;
pub mod certify;
pub mod curves;
pub mod error;
pub mod exactmath;
pub mod twistforge;

pub use error::{Error, Result};
pub use exactmath::{BigRational, Field, RatFunc, UniPoly};
