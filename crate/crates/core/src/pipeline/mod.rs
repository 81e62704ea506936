//! File-level orchestration of the analysis stages.
//!
//! Every stage reads its inputs from and writes its outputs to one working
//! directory, so stages can be run one at a time or chained with
//! [`run_pipeline`]; the two produce identical files. Each stage also
//! writes `run_<stage>.json` with the configuration it ran with.

mod files;
mod stages;

pub use files::*;
pub use stages::*;

use std::fmt::Display;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{IngestError, LogFormat};
use crate::learners::{Aggregation, LearnerError};
use crate::quality::QualityError;
use crate::segment::SegmentError;
use crate::seqclust::{ClusterCountRule, ClusterError, LabelThresholds, Linkage};
use crate::stats::StatsError;
use crate::synth::SynthError;

#[derive(Debug, Error)]
pub enum PipelineError {
    /// Bad input data, bad configuration, unreadable or unwritable files.
    #[error("{context}: {message}")]
    Input { context: String, message: String },
    /// Numerical or internal failure on valid input.
    #[error("{context}: {message}")]
    Internal { context: String, message: String },
}

impl PipelineError {
    pub fn input(context: impl Into<String>, message: impl Display) -> Self {
        PipelineError::Input {
            context: context.into(),
            message: message.to_string(),
        }
    }

    pub fn internal(context: impl Into<String>, message: impl Display) -> Self {
        PipelineError::Internal {
            context: context.into(),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Input { .. } => 1,
            PipelineError::Internal { .. } => 2,
        }
    }
}

/// Whether a module error is the caller's fault (exit 1) or not (exit 2).
pub trait ErrorClass: Display {
    fn is_input_error(&self) -> bool;

    fn at(self, context: impl Into<String>) -> PipelineError
    where
        Self: Sized,
    {
        if self.is_input_error() {
            PipelineError::input(context, self)
        } else {
            PipelineError::internal(context, self)
        }
    }
}

impl ErrorClass for IngestError {
    fn is_input_error(&self) -> bool {
        true
    }
}

impl ErrorClass for QualityError {
    fn is_input_error(&self) -> bool {
        true
    }
}

impl ErrorClass for SegmentError {
    fn is_input_error(&self) -> bool {
        matches!(self, SegmentError::TooFewSequences(_) | SegmentError::BadThresholds(_))
    }
}

impl ErrorClass for ClusterError {
    fn is_input_error(&self) -> bool {
        !matches!(self, ClusterError::EmptyCluster)
    }
}

impl ErrorClass for LearnerError {
    fn is_input_error(&self) -> bool {
        matches!(
            self,
            LearnerError::BadK { .. } | LearnerError::TooFewLearners(_) | LearnerError::NoModels(_) | LearnerError::TooManyComponents { .. }
        )
    }
}

impl ErrorClass for StatsError {
    fn is_input_error(&self) -> bool {
        false
    }
}

impl ErrorClass for SynthError {
    fn is_input_error(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmentOptions {
    /// Outliers lie beyond `outlier_k` standard deviations of the mean.
    pub outlier_k: f64,
    pub trim_outliers: bool,
    pub sample_sd: bool,
    /// Kernel bandwidth; Silverman's rule when absent.
    pub bandwidth: Option<f64>,
    pub grid_points: usize,
    pub n_cuts: usize,
}

impl Default for SegmentOptions {
    fn default() -> Self {
        Self {
            outlier_k: 2.0,
            trim_outliers: true,
            sample_sd: false,
            bandwidth: None,
            grid_points: crate::segment::DEFAULT_GRID_POINTS,
            n_cuts: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BehaviorOptions {
    pub linkage: Linkage,
    /// Clusters per length stratum, shortest stratum first.
    pub cluster_counts: Vec<usize>,
    /// When set, each stratum is cut at its largest height gap instead
    /// (at most this many clusters).
    pub gap_max_k: Option<usize>,
    pub merge_target: usize,
    pub construction_min_c: f64,
    pub observation_min_ps: f64,
    pub observation_max_c: f64,
}

impl Default for BehaviorOptions {
    fn default() -> Self {
        let t = LabelThresholds::default();
        Self {
            linkage: Linkage::Average,
            cluster_counts: vec![2, 2, 3],
            gap_max_k: None,
            merge_target: 3,
            construction_min_c: t.construction_min_c,
            observation_min_ps: t.observation_min_ps,
            observation_max_c: t.observation_max_c,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerOptions {
    pub aggregation: Aggregation,
    pub components: usize,
    pub k: usize,
    pub elbow_min: usize,
    pub elbow_max: usize,
    pub restarts: usize,
    pub max_iterations: usize,
}

impl Default for LearnerOptions {
    fn default() -> Self {
        Self {
            aggregation: Aggregation::Sum,
            components: 2,
            k: 5,
            elbow_min: 1,
            elbow_max: 10,
            restarts: 10,
            max_iterations: 300,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsOptions {
    pub yates: bool,
    pub welch: bool,
    pub bonferroni: bool,
    pub split_variety: bool,
}

/// Everything a run needs. Loadable from TOML; every field has a default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub log: Option<PathBuf>,
    pub log_format: LogFormat,
    pub models: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    /// Working directory; never echoed into run metadata.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    /// Results do not depend on it, so it is not echoed either.
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
    pub record_timings: bool,
    pub segment: SegmentOptions,
    pub behaviors: BehaviorOptions,
    pub learners: LearnerOptions,
    pub stats: StatsOptions,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| PipelineError::input("config", e))
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::input(path.display().to_string(), e))?;
        Self::from_toml(&text).map_err(|e| match e {
            PipelineError::Input { message, .. } => PipelineError::input(path.display().to_string(), message),
            other => other,
        })
    }

    pub fn out_dir(&self) -> Result<&Path, PipelineError> {
        self.out
            .as_deref()
            .ok_or_else(|| PipelineError::input("config", "an output directory (--out) is required"))
    }

    pub fn require_seed(&self) -> Result<u64, PipelineError> {
        self.seed
            .ok_or_else(|| PipelineError::input("config", "--seed is required (all randomness is seeded)"))
    }

    pub fn thresholds(&self) -> LabelThresholds {
        LabelThresholds {
            construction_min_c: self.behaviors.construction_min_c,
            observation_min_ps: self.behaviors.observation_min_ps,
            observation_max_c: self.behaviors.observation_max_c,
        }
    }

    pub fn count_rule(&self) -> ClusterCountRule {
        match self.behaviors.gap_max_k {
            Some(max_k) => ClusterCountRule::LargestGap { max_k },
            None => ClusterCountRule::Fixed(self.behaviors.cluster_counts.clone()),
        }
    }

    /// Range checks on every numeric option.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |msg: String| Err(PipelineError::input("config", msg));
        let s = &self.segment;
        if !(s.outlier_k > 0.0) {
            return bad(format!("segment.outlier_k must be positive, got {}", s.outlier_k));
        }
        if let Some(h) = s.bandwidth {
            if !(h > 0.0 && h.is_finite()) {
                return bad(format!("segment.bandwidth must be positive, got {h}"));
            }
        }
        if s.grid_points < 16 {
            return bad(format!("segment.grid_points must be at least 16, got {}", s.grid_points));
        }
        if s.n_cuts == 0 {
            return bad("segment.n_cuts must be at least 1".into());
        }
        let b = &self.behaviors;
        if b.gap_max_k.is_none() {
            if b.cluster_counts.len() != s.n_cuts + 1 {
                return bad(format!(
                    "behaviors.cluster_counts has {} entries for {} strata",
                    b.cluster_counts.len(),
                    s.n_cuts + 1
                ));
            }
            if b.cluster_counts.contains(&0) {
                return bad("behaviors.cluster_counts entries must be positive".into());
            }
        }
        if b.gap_max_k == Some(0) || b.merge_target == 0 {
            return bad("behaviors.gap_max_k and behaviors.merge_target must be positive".into());
        }
        for (name, v) in [
            ("construction_min_c", b.construction_min_c),
            ("observation_min_ps", b.observation_min_ps),
            ("observation_max_c", b.observation_max_c),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("behaviors.{name} must lie in [0, 1], got {v}"));
            }
        }
        let l = &self.learners;
        if !(1..=5).contains(&l.components) {
            return bad(format!("learners.components must lie in 1..=5, got {}", l.components));
        }
        if l.k == 0 || l.restarts == 0 || l.max_iterations == 0 {
            return bad("learners.k, restarts and max_iterations must be positive".into());
        }
        if l.elbow_min == 0 || l.elbow_min > l.elbow_max {
            return bad(format!("learners elbow range {}..={} is empty", l.elbow_min, l.elbow_max));
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        Ok(())
    }
}

/// Sizes the worker pool used by parallel kernels. Results never depend
/// on the thread count. Only the first call has an effect.
pub fn configure_threads(threads: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

/// Runs every stage in order on one working directory. Quality scoring
/// is skipped without `models`; evaluation runs when `truth` is set.
pub fn run_pipeline(config: &PipelineConfig) -> Result<Vec<StageSummary>, PipelineError> {
    config.require_seed()?;
    config.validate()?;
    let mut done = vec![
        run_ingest(config)?,
        run_segment(config)?,
        run_cluster_behaviors(config)?,
        run_cluster_learners(config)?,
    ];
    if config.models.is_some() {
        done.push(run_quality(config)?);
    }
    done.push(run_stats(config)?);
    write_json(
        &config.out_dir()?.join("run_pipeline.json"),
        &serde_json::json!({
            "stage": "pipeline",
            "version": env!("CARGO_PKG_VERSION"),
            "seed": config.seed,
            "config": config,
            "stages": done.iter().map(|s| s.stage).collect::<Vec<_>>(),
        }),
    )?;
    Ok(done)
}
