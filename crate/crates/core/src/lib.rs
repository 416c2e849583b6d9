//! Core algorithms for approximating the relative topology of a
//! district-heating network from substation supply-temperature profiles and
//! for scoring substations against their approximate neighbours.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches
//! files, clocks or threads lives in the `shedad` companion crate.
//!
//! Pipeline, bottom-up:
//!
//! * [`dtw`]: banded dynamic time warping between daily profiles.
//! * [`knn`]: per-day adaptive k-nearest-neighbour graphs.
//! * [`merge`]: agreement-based merge of the per-day graphs.
//! * [`snn`]: weighted shared-nearest-neighbour similarity.
//! * [`hier`]: Ward agglomerative clustering and the flat cut.
//! * [`mst`] + [`robust`] + [`anomaly`]: per-cluster comparison groups and
//!   modified z-score voting on mean ΔT.
//! * [`metrics`]: cluster compactness and detection quality.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod anomaly;
pub mod dtw;
pub mod error;
pub mod graph;
pub mod hier;
pub mod knn;
pub mod matrix;
pub mod merge;
pub mod metrics;
pub mod mst;
pub mod rng;
pub mod robust;
pub mod series;
pub mod snn;

pub use error::{Error, Result};
pub use graph::{Edge, NeighborGraph};
pub use hier::{ClusterAssignment, Dendrogram};
pub use matrix::{DistanceMatrix, SimilarityMatrix, SymmetricMatrix};
pub use series::SubstationSeries;
