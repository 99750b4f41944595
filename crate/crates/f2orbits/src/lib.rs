//! Parallel enumeration, census files and reports on top of `f2orbits-core`.

pub mod export;
pub mod graph_file;
pub mod parallel;
pub mod report;

pub use f2orbits_core as core;
pub use parallel::Runner;
