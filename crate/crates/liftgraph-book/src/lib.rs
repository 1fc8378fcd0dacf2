//! The guide under `book/` as doc-tested modules.
//!
//! Each module's documentation *is* one chapter of the mdbook, pulled
//! in verbatim with `include_str!`. Running `cargo test -p
//! liftgraph-book --doc` therefore compiles and executes every example
//! in the book, so prose and code cannot drift apart. The rendered
//! book is just `mdbook build book` from the repository root.

// Re-exported so every doctest resolves `liftgraph::...` and
// `tempfile::...` no matter how the test harness links them.
pub use liftgraph;
pub use tempfile;

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/energy-model.md")]
pub mod energy_model {}

#[doc = include_str!("../../../book/src/reduction.md")]
pub mod reduction {}

#[doc = include_str!("../../../book/src/superpixels.md")]
pub mod superpixels {}

#[doc = include_str!("../../../book/src/solver.md")]
pub mod solver {}

#[doc = include_str!("../../../book/src/potentials.md")]
pub mod potentials {}

#[doc = include_str!("../../../book/src/evaluation.md")]
pub mod evaluation {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../book/src/formats.md")]
pub mod formats {}
