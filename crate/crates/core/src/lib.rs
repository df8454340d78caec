//! Exact computations on smooth complete toric fans.

pub mod birational;
pub mod catalog;
pub mod enumerate;
pub mod error;
pub mod fan;
pub mod fvector;
pub mod io;
pub mod iso;
pub mod linalg;
pub mod lp;
pub mod mori;
pub mod primitive;
pub mod structure;
pub mod surgery;

pub use error::{Error, Result};
pub use fan::{Cone, Fan, LatticePoint, ValidationReport};
