//! Cluster quality metrics, embedding-space replacement distortion, and a
//! wall-clock benchmark harness.

mod bench;
mod distortion;
mod quality;

pub use bench::{median, run_bench, BenchResult};
pub use distortion::replacement_distortion;
pub use quality::{quality_report, ClusterQualityReport};
