//! Classical comparison methods.

mod hierarchical;
mod kmedoids;
mod pam;

pub use hierarchical::{
    cut_dendrogram, hierarchical_average_linkage, hierarchical_run, Dendrogram, Merge,
};
pub use kmedoids::{class_medoid, kmedoids_binary};
pub use pam::pam_medians;

/// Safety cap on alternating iterations.
pub const MAX_ALTERNATIONS: usize = 10_000;
