//! Ihara zeta functions of finite, periodic and Benjamini-Schramm limit
//! graphs.

pub mod error;
pub mod graph;
pub mod limits;
pub mod paths;
pub mod periodic;
pub mod selftest;
pub mod series;
pub mod sofic;
pub mod zeta;

pub use error::{Error, ErrorKind, Result};
