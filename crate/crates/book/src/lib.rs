//! The guide in `book/` compiled as doc-tests: each chapter is the
//! documentation of an empty module, so `cargo test` runs every listing.
//! The README is included the same way.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/compact.md")]
pub mod compact {}
#[doc = include_str!("../../../book/src/principal.md")]
pub mod principal {}
#[doc = include_str!("../../../book/src/intertwiners.md")]
pub mod intertwiners {}
#[doc = include_str!("../../../book/src/structure.md")]
pub mod structure {}
#[doc = include_str!("../../../book/src/unitarity.md")]
pub mod unitarity {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
