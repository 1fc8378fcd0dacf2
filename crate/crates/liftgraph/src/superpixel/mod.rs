//! Candidate partition constructors.
//!
//! Three ways to produce the segments a reduced graph is built on:
//! axis-aligned [`grid_subsample`] blocks, color-and-space [`slic`]
//! clustering, and the guide-fitting [`l0_cut_pursuit`] that alternates
//! globally optimal binary cuts with piecewise-constant refinement.
//! All constructors emit canonical [`Partition`]s (4-connected
//! segments, dense ids in first-pixel raster order).

mod cut_pursuit;
mod grid;
mod slic;

pub use cut_pursuit::{
    binary_cut, l0_cut_pursuit, l0_cut_pursuit_traced, CutPursuitState, CutStep,
};
pub use grid::grid_subsample;
pub use slic::{slic, SlicParams};

use crate::core::Partition;
use crate::error::Result;

/// Labels the maximal 4-connected components of equal values, ids in
/// raster-scan order of each component's first pixel.
pub fn connected_components<T: PartialEq>(
    width: usize,
    height: usize,
    values: &[T],
) -> Result<Partition> {
    Partition::from_values(width, height, values)
}
