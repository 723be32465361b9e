//! Support library for the `cowit` binary: canonical JSON rendering and
//! the matrix interchange file format. Split out so integration tests
//! can exercise serialization directly.

#![forbid(unsafe_code)]

pub mod canonical;
pub mod matfile;
