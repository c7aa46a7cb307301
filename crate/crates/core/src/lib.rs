//! Forest Fire Clustering.
//!
//! Points become vertices of a complete weighted graph whose edge weights are
//! kernel affinities. Clusters grow by label propagation: a seed vertex
//! ignites a label and every unlabeled vertex whose average heat from the
//! burning cluster (fire temperature `c` times its mean affinity to the
//! cluster) reaches its threshold (the reciprocal of its weighted degree)
//! joins it. Rounds repeat from fresh seeds until every vertex is labeled.
//!
//! The crate also provides Monte Carlo internal validation (per-point
//! significance and label entropy), online extension to new points,
//! agreement metrics and synthetic data generators.
//!
//! ```
//! use forestfire::{cluster, datagen, FireParams, KernelSpec};
//!
//! let mix = datagen::gaussian_circle(&datagen::MixtureSpec::new(200, 4, 0.1, 7)).unwrap();
//! let graph = KernelSpec::Gaussian { sigma: 0.2 }.build(&mix.data).unwrap();
//! let result = cluster(&graph, FireParams::new(4.0, 1).unwrap()).unwrap();
//! assert!(result.labels.iter().all(|&l| l > 0));
//! ```

pub mod affinity;
pub mod cli;
pub mod data;
pub mod datagen;
mod error;
pub mod fire;
pub mod metrics;
pub mod montecarlo;
pub mod rng;

pub use affinity::{
    adaptive_affinity, gaussian_affinity, pairwise_distances, thresholds, AffinityGraph,
    DistanceMatrix, KernelSpec,
};
pub use data::DataMatrix;
pub use error::{Error, Result};
pub use fire::{
    average_heat, cluster, cluster_from_seeds, online_assign, propagate, ClusterResult, FireParams,
    HeatTrace, OnlineAssignment, TraceEntry, UNLABELED,
};
pub use metrics::{adjusted_rand_index, purity, purity_by_truth, silhouette, ContingencyTable};
pub use montecarlo::{
    posterior_significant_mask, significant_mask, validate, validate_labels, PointValidation,
    ValidationReport,
};
