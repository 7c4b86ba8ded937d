//! Extrinsic symmetric triples: exact construction and verification of
//! quadratic and central extensions, and numerical geometry of the embedded
//! orbits.
#![forbid(unsafe_code)]

pub mod error;
pub mod exactlin;
pub mod geom;
pub mod liecore;
pub mod par;
pub mod quadext;
pub mod report;
pub mod weakext;

pub use error::{Error, Result};
