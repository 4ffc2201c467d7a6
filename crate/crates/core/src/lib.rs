//! Density-based clustering of lines and line segments.
//!
//! Each line carries a neighbourhood — either a fixed-radius tube or a
//! region shaped by a density over the line's parameter — and two lines are
//! related when one reaches into the other's neighbourhood. Clusters are
//! then grown from lines with enough neighbours, much like DBSCAN on points.
//!
//! Points with a single missing coordinate can be lifted to axis-parallel
//! segments ([`missing_data`]) and clustered alongside complete points.

// `!(a < b)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod data_io;
pub mod engine;
pub mod geometry;
pub mod missing_data;
pub mod neighborhood;
pub mod oracle;
pub mod profile;

pub use engine::{cluster, ClusterId, ClusterLabels, Label, Mode, RunConfig};
pub use geometry::{closest_point, min_distance, GeometryError, Kind, Point, SegmentLike};
pub use neighborhood::{neighbor_set, relates, ConfigError, NeighbourhoodSpec, PerLine, Version};
pub use profile::{neighbourhood_volume, scaling_factor, AlphaMode, Profile, ProfileError};
