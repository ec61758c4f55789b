#![no_std]
#![cfg_attr(test, allow(unused_imports))]

extern crate alloc;

pub mod eigensolve;
pub mod error;
pub mod lattice;
pub mod potentials;
pub mod semiclassics;
pub mod spin;

pub use error::{Error, Result};
