//! The chapters of the guide in `book/`, included as documentation so that
//! `cargo test` compiles and runs every listing.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/hypervectors.md")]
pub mod hypervectors {}

#[doc = include_str!("../../../book/src/bundling.md")]
pub mod bundling {}

#[doc = include_str!("../../../book/src/scalar-encoding.md")]
pub mod scalar_encoding {}

#[doc = include_str!("../../../book/src/structures.md")]
pub mod structures {}

#[doc = include_str!("../../../book/src/memories.md")]
pub mod memories {}

#[doc = include_str!("../../../book/src/bloom.md")]
pub mod bloom {}

#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}

#[doc = include_str!("../../../README.md")]
pub mod readme {}
