//! Label-cost construction for the three applications.
//!
//! Everything downstream works on a [`PotentialField`](crate::core::PotentialField)
//! of per-pixel, per-label costs (lower is better). This module builds
//! them: [`cartoon_costs`] measures distance to a [`kmeans_palette`],
//! [`scribble_costs`] fits Gaussian color+position models to
//! user-marked regions, and [`stereo_cost_volume`] matches rectified
//! image pairs over integer disparities. [`convex_envelope`] is the
//! sublabel aggregation utility: summing per-pixel costs and taking the
//! envelope is at least as tight as summing per-pixel envelopes.

mod cartoon;
mod envelope;
mod kmeans;
mod scribble;
mod stereo;

pub use cartoon::cartoon_costs;
pub use envelope::convex_envelope;
pub use kmeans::{kmeans_palette, Palette};
pub use scribble::{scribble_costs, ScribbleSet};
pub use stereo::{argmin_map, stereo_cost_volume, CostVolume};
