//! Node features for unattributed graphs from network control theory and
//! classical centralities.
//!
//! The numeric core is generic over the floating point type (see
//! [`Scalar`]); the `*64` aliases below are what the batch pipeline uses.

pub mod centrality;
pub mod controllability;
pub mod diagnostics;
pub mod encoding;
pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod metric;
pub mod pipeline;
pub mod scalar;
pub mod stats;

pub use controllability::{ControlInput, Gramian, GramianMethod, Horizon};
pub use diagnostics::Diagnostics;
pub use encoding::{FeatureMatrix, RankEncodingSpec, Scheme};
pub use error::{Error, Result};
pub use graph::{AdjacencyMatrix, Graph, GraphDataset};
pub use metric::{MetricKind, MetricVector};
pub use scalar::Scalar;
pub use stats::DatasetStats;

pub type Gramian64 = Gramian<f64>;
pub type Gramian32 = Gramian<f32>;
pub type MetricVector64 = MetricVector<f64>;
pub type MetricVector32 = MetricVector<f32>;
pub type FeatureMatrix64 = FeatureMatrix<f64>;
pub type FeatureMatrix32 = FeatureMatrix<f32>;
pub type AdjacencyMatrix64 = AdjacencyMatrix<f64>;
pub type ControlInput64 = ControlInput<f64>;
