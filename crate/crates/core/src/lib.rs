//! Exact algebra for the GGP pair (GL(n+1), GL(n)) over finite local rings.

pub mod error;
pub mod exponents;
pub mod ggp;
pub mod matrix;
pub mod microlocal;
pub mod poly;
pub mod ring;
pub mod transversality;
pub mod volume;

pub use error::{Error, Result};
