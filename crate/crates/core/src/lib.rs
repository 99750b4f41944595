//! Orbits of transvection-type group actions on F2 vector spaces.
//!
//! The crate is `no_std` (it needs `alloc`). It covers F2 linear and quadratic
//! algebra, the two actions of the group generated by `g_ij` on upper
//! triangular F2 matrices together with their conjugates, transvection groups
//! built from a graph, an exhaustive orbit enumerator, and the closed-form
//! orbit censuses the enumerator is checked against.

#![no_std]

extern crate alloc;

pub mod actions;
pub mod classify;
pub mod error;
pub mod f2la;
pub mod lattice;
pub mod orbits;
pub mod tri;

pub use error::{Error, Result};
