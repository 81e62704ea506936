//! Behavior mining for model-building event logs.
//!
//! The crate turns a timestamped log of modeling actions into
//!
//! * per-model activity sequences over the alphabet `c` (construction),
//!   `p` (parameterization) and `s` (simulation) ([`ingest`]),
//! * length strata found at density minima of the sequence lengths
//!   ([`segment`]),
//! * behavior types obtained by edit-distance agglomerative clustering
//!   inside each stratum ([`seqclust`]),
//! * learner engagement groups from PCA + K-means++ on per-learner
//!   activity features ([`learners`]),
//! * model quality scores ([`quality`]) and the hypothesis tests relating
//!   all of the above ([`stats`]).
//!
//! [`synth`] generates logs with planted behavior archetypes so the whole
//! chain can be validated end to end, and [`pipeline`] wires the stages
//! together through plain files.

// Index loops mirror the matrix formulas; `!(x > 0.0)` also rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod fmt;
pub mod ingest;
pub mod learners;
pub mod linalg;
pub mod pipeline;
pub mod quality;
pub mod rng;
pub mod segment;
pub mod seqclust;
pub mod stats;
pub mod svg;
pub mod synth;

pub use ingest::{ActionKind, ActivityClass, ActivitySequence, RawEvent};
pub use seqclust::BehaviorType;
