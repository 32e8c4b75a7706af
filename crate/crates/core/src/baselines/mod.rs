//! Comparison and ablation clusterings: Lloyd k-means with random-token or
//! k-means++ seeding, capacity-balanced k-means, centroid-linkage
//! agglomeration, and k-means with a mean instance-distance assignment cost.

mod balanced;
mod centroid;
mod instance;
mod kmeans;

pub use balanced::kmeans_balanced;
pub use centroid::{agglomerative_centroid, agglomerative_centroid_with};
pub use instance::{kmeans_instance_distance, kmeans_instance_distance_with, SelfDistance};
pub use kmeans::{kmeans, kmeans_detailed, within_cluster_sse, Init, KMeansConfig, KMeansOutcome};
