//! Quantitative evaluation for two-view experiments: kernel dependency
//! (nHSIC), distribution distance (MMD), k-NN conditional mutual
//! information, angular misalignment of paired embeddings, image quality
//! (pixel accuracy, PSNR, SSIM, sharpness), k-means clustering, and linear
//! probing. All estimators are pure functions and deterministic.

mod align;
mod cluster;
mod error;
mod hsic;
mod image;
mod kernels;
mod ksg;
mod mmd;
mod probe;
mod report;

pub use align::misalignment_degree;
pub use cluster::{kmeans, KmeansResult};
pub use error::{MetricError, Result};
pub use hsic::{hsic_biased, nhsic};
pub use image::{pixel_accuracy, psnr, sharpness, ssim};
pub use kernels::{median_heuristic, Bandwidth, KernelSpec};
pub use ksg::cmi_ksg;
pub use mmd::{mmd2_biased, mmd2_unbiased};
pub use probe::{linear_probe, ProbeResult, ProbeSplits};
pub use report::MetricReport;
