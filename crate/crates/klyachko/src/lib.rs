//! Equivariant reflexive sheaves on smooth complete toric varieties,
//! modeled as families of filtrations of a rational vector space.
//!
//! The crate decides slope stability and local freeness of such families,
//! computes singular-locus dimensions through the orbit-cone
//! correspondence, and constructs stable low-rank examples on any smooth
//! polarised toric variety. All arithmetic is exact (arbitrary-precision
//! rationals); there is no floating point anywhere.

#![forbid(unsafe_code)]

pub mod construction;
pub mod degree;
pub mod error;
pub mod fan;
pub mod filtration;
pub mod freeness;
pub mod json;
pub mod linalg;
pub mod stability;

pub use error::{Error, Result};
