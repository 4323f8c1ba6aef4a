//! Compiles the book's code listings as doctests.
//!
//! Each chapter of `book/src/` is included here as a module doc, so
//! `cargo test --doc` runs every ```rust fence in the book and keeps the
//! prose in sync with the library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/algebras.md")]
pub mod algebras {}

#[doc = include_str!("../../../book/src/pages.md")]
pub mod pages {}

#[doc = include_str!("../../../book/src/schedules.md")]
pub mod schedules {}

#[doc = include_str!("../../../book/src/decompositions.md")]
pub mod decompositions {}

#[doc = include_str!("../../../book/src/tc_tables.md")]
pub mod tc_tables {}
