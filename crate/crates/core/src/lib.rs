//! Cobordism calculus: exact genera and formal group laws, plus a numerical
//! Chern–Weil laboratory on product tori.
//!
//! The exact half ([`algebra`], [`genera`], [`fgl`]) works over arbitrary
//! precision rationals. The numerical half ([`formcalc`], [`chernweil`])
//! samples differential forms with graded coefficients on products of
//! circles and one optional interval.

pub mod algebra;
pub mod chernweil;
pub mod error;
pub mod fgl;
pub mod formcalc;
pub mod genera;

pub use error::{Error, Result};
