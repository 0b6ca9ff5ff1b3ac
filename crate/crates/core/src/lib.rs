//! Distance-threshold clustering.
//!
//! The central idea is a single threshold `theta`: a sample joins the nearest
//! existing cluster whose centroid lies within `theta`, otherwise it founds a
//! new cluster. Three algorithms are built on that rule:
//!
//! - [`tsg`]: one sequential pass over the samples in row order. When no two
//!   samples from different clusters are within `theta` of each other, the
//!   result does not depend on the processing order.
//! - [`tdg`]: repeats [`tsg`] over seeded shuffles, clusters the pooled
//!   centroids with [`tsg`] again, and reassigns every sample to its nearest
//!   resulting centroid. This recovers clusters when ordering matters.
//! - [`tnc`]: runs [`tdg`] with a small `theta` and chains micro-clusters whose
//!   centroids are closer than `epsilon`, giving non-convex clusters.
//!
//! Supporting modules provide a K-Means baseline ([`baselines`]), quality
//! metrics ([`metrics`]), seeded synthetic data ([`datagen`]) and threshold
//! selection tools ([`analysis`]).
//!
//! ```
//! use theta_core::{tsg, DataMatrix, Metric};
//!
//! let x = DataMatrix::from_rows(&[vec![0.0], vec![0.5], vec![10.0], vec![10.4]]).unwrap();
//! let (clustering, stats) = tsg(&x, 2.0, Metric::Euclidean).unwrap();
//! assert_eq!(clustering.labels(), &[0, 0, 1, 1]);
//! assert_eq!(stats.distance_evaluations, 4);
//! ```

pub mod analysis;
pub mod baselines;
pub mod datagen;
mod error;
pub mod metrics;
pub mod primitives;
pub mod theta;

pub use error::{Error, Result};
pub use primitives::{distance, running_mean_update, seeded_permutation, DataMatrix, Metric, Seed};
pub use theta::{
    assign_to_centroids, chain_merge, tdg, tnc, tsg, CentroidUpdate, ChainingList, Clustering,
    RunStats, ThetaParams, TncClustering,
};
