//! Multi-label minimal-partition problems on reduced graphs.
//!
//! The crate solves convex relaxations of Potts-type labeling problems
//! (segmentation, cartooning, stereo) without touching every pixel: the
//! image plane is first partitioned into superpixels, the labeling
//! energy is reduced exactly onto the superpixel adjacency graph, and a
//! preconditioned primal-dual solver runs on that much smaller graph.
//! As long as the partition boundaries cover the jump set of the true
//! solution, nothing is lost by the reduction; in practice the energy
//! stays within a few percent of the full-grid optimum at a fraction of
//! the cost.
//!
//! The pipeline, stage by stage:
//!
//! 1. [`potentials`] turns images into per-pixel, per-label costs
//!    (k-means palettes, scribble color models, stereo cost volumes).
//! 2. [`superpixel`] builds a [`core::Partition`] of the pixel grid by
//!    grid subsampling, SLIC, or L0 cut-pursuit (driven by [`maxflow`]).
//! 3. [`core::reduce`] aggregates costs and boundary lengths onto a
//!    [`core::ReducedGraph`].
//! 4. [`solver`] minimizes the relaxed energy over the graph and rounds
//!    the result to a discrete labeling.
//! 5. [`core::Partition::reassemble`] maps node values back to pixels,
//!    and [`eval`] scores the run against a full-grid baseline.
//!
//! The mdbook under `book/` walks through the same stages with runnable
//! examples; `cargo test -p liftgraph-book --doc` keeps them honest.

pub mod core;
pub mod error;
pub mod eval;
pub mod maxflow;
pub mod potentials;
pub mod solver;
pub mod superpixel;

pub use error::{Error, Result};
