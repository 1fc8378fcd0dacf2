//! Domain types and the exact reduction of labeling energies onto graphs.
//!
//! The central objects are [`PotentialField`] (per-pixel, per-label
//! costs), [`Partition`] (a decomposition of the pixel grid into
//! 4-connected segments) and [`ReducedGraph`] (segment adjacency with
//! aggregated costs and shared-boundary lengths). [`reduce`] maps a
//! (partition, field) pair onto a graph such that the graph energy of
//! any per-segment assignment equals the full-grid energy of the same
//! assignment lifted back to pixels; [`build_grid_graph`] is the
//! special case of the per-pixel partition.

mod energy;
mod graph;
mod image;
mod partition;
mod potential;

pub use energy::{discrete_energy, energy, lift_assignment, Assignment, SIMPLEX_TOLERANCE};
pub use graph::{build_grid_graph, reduce, Edge, ReducedGraph};
pub use image::Image;
pub use partition::Partition;
pub use potential::PotentialField;
