//! Cross-modal visual place recognition: an RGB query is matched against a
//! LiDAR database through range-image descriptors, then re-ranked with
//! bird's-eye-view descriptors.
//!
//! The crate covers the non-neural parts of that pipeline: sensor geometry
//! and rasterization, pose-based similarity labels, metric-learning losses,
//! exact retrieval with rank fusion, KITTI ingestion, and recall evaluation.

// `!(a > b)` is the NaN-rejecting form of the comparisons it guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cloud;
pub mod descriptor;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod kitti;
pub mod metric;
pub mod pose;
pub mod preprocess;
pub mod raster;
pub mod retrieval;
pub mod simlabel;

mod binfmt;

pub use cloud::{Frame, PointCloud};
pub use descriptor::{load_descriptor_set, save_descriptor_set, Descriptor, DescriptorSet, Modality, DESCRIPTOR_DIM};
pub use error::{Error, Result};
pub use pose::Pose;
pub use raster::{RasterImage, RasterKind};
pub use retrieval::{rerank, retrieve_full, search, FusedRanking, RankedList, RerankParams, SearchIndex};
