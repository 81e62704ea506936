//! Learner engagement clustering.
//!
//! Every learner becomes a five-feature row: original model count, copied
//! model count and the aggregated construction, parameterization and
//! simulation counts of their models. Rows are z-scored, projected onto
//! the leading principal components and clustered with K-means++.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::ingest::ModelRecord;
use crate::linalg::{dot, symmetric_eigen, LinalgError};
use crate::rng::SeededRng;

#[derive(Debug, Error, PartialEq)]
pub enum LearnerError {
    #[error("learner `{0}` has no models")]
    NoModels(String),
    #[error("need at least 2 learners, got {0}")]
    TooFewLearners(usize),
    #[error("expected {expected} columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cannot request {components} components from {columns} columns and {rows} rows")]
    TooManyComponents {
        components: usize,
        columns: usize,
        rows: usize,
    },
    #[error("k = {k} is invalid for {n} points")]
    BadK { k: usize, n: usize },
    #[error("eigendecomposition failed: {0}")]
    NumericalFailure(#[from] LinalgError),
}

pub const FEATURE_NAMES: [&str; 5] = ["v1", "v2", "v3", "v4", "v5"];

/// Per-model activity counts of one learner, earliest model first
/// (first event timestamp, then model id).
pub fn per_model_frequencies(models: &[&ModelRecord]) -> Result<Vec<[u64; 3]>, LearnerError> {
    if models.is_empty() {
        return Err(LearnerError::NoModels(String::new()));
    }
    let mut ordered: Vec<&ModelRecord> = models.to_vec();
    ordered.sort_by(|a, b| {
        a.first_timestamp
            .cmp(&b.first_timestamp)
            .then_with(|| a.model_id.cmp(&b.model_id))
    });
    Ok(ordered.iter().map(|m| m.counts).collect())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    /// Column totals of the per-model matrix.
    #[default]
    Sum,
    /// Column means of the per-model matrix.
    Mean,
}

impl std::str::FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sum" => Ok(Aggregation::Sum),
            "mean" => Ok(Aggregation::Mean),
            other => Err(format!("unknown aggregation `{other}` (sum, mean)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub learner_ids: Vec<String>,
    pub rows: Vec<[f64; 5]>,
}

/// One feature row per learner, learners in id order.
pub fn learner_features(models: &[ModelRecord], aggregation: Aggregation) -> Result<FeatureMatrix, LearnerError> {
    let mut by_learner: BTreeMap<&str, Vec<&ModelRecord>> = BTreeMap::new();
    for m in models {
        by_learner.entry(m.learner_id.as_str()).or_default().push(m);
    }
    let mut out = FeatureMatrix {
        learner_ids: Vec::with_capacity(by_learner.len()),
        rows: Vec::with_capacity(by_learner.len()),
    };
    for (learner, ms) in by_learner {
        let freqs = per_model_frequencies(&ms).map_err(|_| LearnerError::NoModels(learner.to_string()))?;
        let copied = ms.iter().filter(|m| m.is_copied).count() as f64;
        let original = ms.len() as f64 - copied;
        let mut agg = [0.0f64; 3];
        for row in &freqs {
            for (a, &f) in agg.iter_mut().zip(row) {
                *a += f as f64;
            }
        }
        if aggregation == Aggregation::Mean {
            agg.iter_mut().for_each(|a| *a /= freqs.len() as f64);
        }
        out.learner_ids.push(learner.to_string());
        out.rows.push([original, copied, agg[0], agg[1], agg[2]]);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardized {
    pub data: Vec<Vec<f64>>,
    pub means: Vec<f64>,
    /// Population standard deviations.
    pub scales: Vec<f64>,
    /// Columns with zero variance, mapped to all zeros.
    pub constant: Vec<bool>,
}

/// Column-wise z-scores with population standard deviation.
pub fn standardize(rows: &[Vec<f64>]) -> Result<Standardized, LearnerError> {
    let n = rows.len();
    if n < 2 {
        return Err(LearnerError::TooFewLearners(n));
    }
    let d = rows[0].len();
    if let Some(r) = rows.iter().find(|r| r.len() != d) {
        return Err(LearnerError::DimensionMismatch { expected: d, got: r.len() });
    }
    let means: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let scales: Vec<f64> = (0..d)
        .map(|j| (rows.iter().map(|r| (r[j] - means[j]).powi(2)).sum::<f64>() / n as f64).sqrt())
        .collect();
    let constant: Vec<bool> = scales.iter().map(|&s| s == 0.0).collect();
    let data = rows
        .iter()
        .map(|r| {
            (0..d)
                .map(|j| if constant[j] { 0.0 } else { (r[j] - means[j]) / scales[j] })
                .collect()
        })
        .collect();
    Ok(Standardized {
        data,
        means,
        scales,
        constant,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    /// Column means of the fitted data (zero for standardized input).
    pub center: Vec<f64>,
    /// Retained unit components, strongest first.
    pub components: Vec<Vec<f64>>,
    /// All covariance eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Explained variance ratio of every eigenvalue.
    pub explained_ratio: Vec<f64>,
}

/// Population covariance matrix (divides by n).
pub fn covariance(data: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = data.len() as f64;
    let d = data.first().map_or(0, Vec::len);
    let mean: Vec<f64> = (0..d).map(|j| data.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let mut cov = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in i..d {
            let s: f64 = data.iter().map(|r| (r[i] - mean[i]) * (r[j] - mean[j])).sum::<f64>() / n;
            cov[i][j] = s;
            cov[j][i] = s;
        }
    }
    cov
}

/// Principal components of a covariance matrix.
pub fn pca_from_covariance(cov: &[Vec<f64>], n_components: usize) -> Result<PcaModel, LearnerError> {
    let d = cov.len();
    if n_components > d {
        return Err(LearnerError::TooManyComponents {
            components: n_components,
            columns: d,
            rows: d,
        });
    }
    let eig = symmetric_eigen(cov)?;
    let clamped: Vec<f64> = eig.values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    let explained_ratio = clamped
        .iter()
        .map(|&v| if total > 0.0 { v / total } else { 0.0 })
        .collect();
    Ok(PcaModel {
        center: vec![0.0; d],
        components: eig.vectors.into_iter().take(n_components).collect(),
        eigenvalues: eig.values,
        explained_ratio,
    })
}

/// PCA of row data via eigendecomposition of its covariance matrix.
pub fn pca(data: &[Vec<f64>], n_components: usize) -> Result<PcaModel, LearnerError> {
    let rows = data.len();
    let columns = data.first().map_or(0, Vec::len);
    if rows < 2 {
        return Err(LearnerError::TooFewLearners(rows));
    }
    if n_components > columns {
        return Err(LearnerError::TooManyComponents {
            components: n_components,
            columns,
            rows,
        });
    }
    let mut model = pca_from_covariance(&covariance(data), n_components)?;
    model.center = (0..columns)
        .map(|j| data.iter().map(|r| r[j]).sum::<f64>() / rows as f64)
        .collect();
    Ok(model)
}

/// Inner products of each row with the retained components. Rows are
/// used as given, so pass standardized (centered) data.
pub fn project(model: &PcaModel, data: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, LearnerError> {
    let d = model.center.len();
    data.iter()
        .map(|row| {
            if row.len() != d {
                return Err(LearnerError::DimensionMismatch { expected: d, got: row.len() });
            }
            Ok(model.components.iter().map(|a| dot(a, row)).collect())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentImportance {
    /// `|a_c[j]|` per feature.
    pub magnitudes: Vec<f64>,
    pub top_feature: usize,
}

pub fn feature_importance(model: &PcaModel) -> Vec<ComponentImportance> {
    model
        .components
        .iter()
        .map(|a| {
            let magnitudes: Vec<f64> = a.iter().map(|x| x.abs()).collect();
            let mut top = 0;
            for (j, m) in magnitudes.iter().enumerate() {
                if *m > magnitudes[top] {
                    top = j;
                }
            }
            ComponentImportance {
                magnitudes,
                top_feature: top,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    pub k: usize,
    pub centroids: Vec<Vec<f64>>,
    pub assignment: Vec<usize>,
    pub sse: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Index of the winning restart.
    pub restart: usize,
    /// SSE after every assignment step of the winning restart.
    pub sse_history: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub restarts: usize,
    pub max_iterations: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iterations: 300,
        }
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid, lowest index on ties.
fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = squared_distance(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// K-means++ seeding: first centroid uniform, later ones drawn with
/// probability proportional to the squared distance to the nearest
/// centroid chosen so far.
pub fn kmeans_pp_seed(points: &[Vec<f64>], k: usize, rng: &mut SeededRng) -> Vec<Vec<f64>> {
    let mut centroids = vec![points[rng.below(points.len())].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| squared_distance(p, &centroids[0])).collect();
    while centroids.len() < k {
        let next = rng.categorical(&d2);
        let c = points[next].clone();
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(squared_distance(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn lloyd(points: &[Vec<f64>], mut centroids: Vec<Vec<f64>>, max_iterations: usize) -> (Vec<Vec<f64>>, Vec<usize>, f64, usize, Vec<f64>) {
    let k = centroids.len();
    let dim = points[0].len();
    let mut assignment: Vec<usize> = Vec::new();
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        let (next, dists): (Vec<usize>, Vec<f64>) = points.iter().map(|p| nearest(p, &centroids)).unzip();
        let sse: f64 = dists.iter().sum();
        history.push(sse);
        let converged = next == assignment;
        assignment = next;
        if converged || iterations == max_iterations {
            return (centroids, assignment, sse, iterations, history);
        }
        iterations += 1;

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assignment) {
            counts[a] += 1;
            for (s, x) in sums[a].iter_mut().zip(p) {
                *s += x;
            }
        }
        let mut taken: Vec<usize> = Vec::new();
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                // reseed from the point farthest from its own centroid
                let far = (0..points.len())
                    .filter(|i| !taken.contains(i))
                    .max_by(|&i, &j| {
                        dists[i].total_cmp(&dists[j]).then(j.cmp(&i))
                    })
                    .expect("k <= n");
                taken.push(far);
                centroids[c] = points[far].clone();
            }
        }
    }
}

/// Best-of-`restarts` K-means++ with Lloyd iterations. Restart `r` draws
/// from sub-stream `r` of `seed`; ties in SSE go to the lower restart.
pub fn kmeans_pp(points: &[Vec<f64>], k: usize, seed: u64, config: &KMeansConfig) -> Result<KMeansResult, LearnerError> {
    let n = points.len();
    if k < 1 || k > n {
        return Err(LearnerError::BadK { k, n });
    }
    let run = |r: usize| {
        let mut rng = SeededRng::stream(seed, r as u64);
        let init = kmeans_pp_seed(points, k, &mut rng);
        lloyd(points, init, config.max_iterations)
    };
    let restarts = config.restarts.max(1);
    #[cfg(feature = "parallel")]
    let runs: Vec<_> = (0..restarts).into_par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let runs: Vec<_> = (0..restarts).map(run).collect();

    let (restart, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|best, cur| if cur.1 .2 < best.1 .2 { cur } else { best })
        .expect("at least one restart");
    let (centroids, assignment, sse, iterations, sse_history) = best;
    Ok(KMeansResult {
        k,
        centroids,
        assignment,
        sse,
        iterations,
        seed,
        restart,
        sse_history,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElbowReport {
    pub sse: Vec<(usize, f64)>,
    /// `k` with the largest relative SSE drop from `k - 1`.
    pub largest_drop_k: Option<usize>,
}

pub fn elbow(points: &[Vec<f64>], ks: impl IntoIterator<Item = usize>, seed: u64, config: &KMeansConfig) -> Result<ElbowReport, LearnerError> {
    let mut sse = Vec::new();
    for k in ks {
        sse.push((k, kmeans_pp(points, k, seed, config)?.sse));
    }
    let mut best: Option<(f64, usize)> = None;
    for w in sse.windows(2) {
        let ((k0, s0), (k1, s1)) = (w[0], w[1]);
        if k1 != k0 + 1 || s0 <= 0.0 {
            continue;
        }
        let drop = (s0 - s1) / s0;
        if best.is_none_or(|(d, _)| drop > d) {
            best = Some((drop, k1));
        }
    }
    Ok(ElbowReport {
        sse,
        largest_drop_k: best.map(|b| b.1),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngagementGroup {
    pub label: String,
    pub cluster: usize,
    pub members: Vec<usize>,
    pub centroid: Vec<f64>,
    pub excluded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngagementGrouping {
    /// Labeled groups, A first (highest mean PC1).
    pub groups: Vec<EngagementGroup>,
    /// Singleton clusters, not labeled.
    pub excluded: Vec<EngagementGroup>,
    /// Group label per point; `None` for excluded points.
    pub label_of: Vec<Option<String>>,
}

/// Spreadsheet-style labels: A..Z, AA, AB, ...
pub fn group_label(mut i: usize) -> String {
    let mut s = Vec::new();
    loop {
        s.push(b'A' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    s.reverse();
    String::from_utf8(s).expect("ascii")
}

/// Drops singleton clusters and labels the rest A, B, ... by descending
/// mean first coordinate.
pub fn exclude_singletons(result: &KMeansResult, points: &[Vec<f64>]) -> EngagementGrouping {
    let mut members = vec![Vec::new(); result.k];
    for (i, &a) in result.assignment.iter().enumerate() {
        members[a].push(i);
    }
    let mean_of = |ms: &[usize]| -> Vec<f64> {
        let dim = points.first().map_or(0, Vec::len);
        (0..dim)
            .map(|j| ms.iter().map(|&i| points[i][j]).sum::<f64>() / ms.len().max(1) as f64)
            .collect()
    };
    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for (c, ms) in members.into_iter().enumerate() {
        if ms.is_empty() {
            continue;
        }
        let g = EngagementGroup {
            label: String::new(),
            cluster: c,
            centroid: mean_of(&ms),
            excluded: ms.len() == 1,
            members: ms,
        };
        if g.excluded {
            excluded.push(g);
        } else {
            kept.push(g);
        }
    }
    kept.sort_by(|a, b| {
        let pa = a.centroid.first().copied().unwrap_or(0.0);
        let pb = b.centroid.first().copied().unwrap_or(0.0);
        pb.total_cmp(&pa).then(a.cluster.cmp(&b.cluster))
    });
    let mut label_of = vec![None; result.assignment.len()];
    for (i, g) in kept.iter_mut().enumerate() {
        g.label = group_label(i);
        for &m in &g.members {
            label_of[m] = Some(g.label.clone());
        }
    }
    EngagementGrouping {
        groups: kept,
        excluded,
        label_of,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(learner: &str, model: &str, ts: u64, copied: bool, counts: [u64; 3]) -> ModelRecord {
        ModelRecord {
            learner_id: learner.into(),
            model_id: model.into(),
            is_copied: copied,
            first_timestamp: ts,
            counts,
        }
    }

    #[test]
    fn per_model_rows() {
        let a = record("L", "m1", 1, false, [2, 0, 1]);
        assert_eq!(per_model_frequencies(&[&a]).unwrap(), vec![[2, 0, 1]]);
        let p = record("L", "mb", 5, false, [0, 1, 0]);
        let s = record("L", "ma", 9, false, [0, 0, 1]);
        assert_eq!(per_model_frequencies(&[&s, &p]).unwrap(), vec![[0, 1, 0], [0, 0, 1]]);
        let z = record("L", "mz", 2, true, [0, 0, 0]);
        assert_eq!(per_model_frequencies(&[&z]).unwrap(), vec![[0, 0, 0]]);
        assert!(matches!(per_model_frequencies(&[]), Err(LearnerError::NoModels(_))));
    }

    #[test]
    fn feature_rows() {
        let models = vec![
            record("A", "1", 1, false, [2, 0, 1]),
            record("A", "2", 2, false, [0, 1, 0]),
            record("B", "3", 1, true, [0, 0, 2]),
        ];
        let f = learner_features(&models, Aggregation::Sum).unwrap();
        assert_eq!(f.learner_ids, vec!["A", "B"]);
        assert_eq!(f.rows[0], [2.0, 0.0, 2.0, 1.0, 1.0]);
        assert_eq!(f.rows[1], [0.0, 1.0, 0.0, 0.0, 2.0]);
        let f = learner_features(&models, Aggregation::Mean).unwrap();
        assert_eq!(f.rows[0], [2.0, 0.0, 1.0, 0.5, 0.5]);
    }

    #[test]
    fn standardize_examples() {
        let s = standardize(&[vec![1.0, 7.0], vec![3.0, 7.0]]).unwrap();
        assert_eq!(s.data, vec![vec![-1.0, 0.0], vec![1.0, 0.0]]);
        assert_eq!(s.constant, vec![false, true]);
        assert!(matches!(standardize(&[vec![1.0]]), Err(LearnerError::TooFewLearners(1))));
    }

    #[test]
    fn rank_one_pca() {
        let data: Vec<Vec<f64>> = [-2.0, -1.0, 0.0, 1.0, 2.0]
            .iter()
            .map(|&x| vec![x, 0.0, 0.0, 0.0, 0.0])
            .collect();
        let m = pca(&data, 2).unwrap();
        assert_eq!(m.components[0], vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!((m.explained_ratio[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_covariance() {
        let s3 = 3f64.sqrt();
        let data = vec![vec![s3, s3], vec![-s3, -s3], vec![1.0, -1.0], vec![-1.0, 1.0]];
        let cov = covariance(&data);
        assert!((cov[0][0] - 2.0).abs() < 1e-12 && (cov[0][1] - 1.0).abs() < 1e-12);
        let m = pca(&data, 2).unwrap();
        assert!((m.explained_ratio[0] - 0.75).abs() < 1e-12);
        assert!((m.explained_ratio[1] - 0.25).abs() < 1e-12);
        let imp = feature_importance(&m);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((imp[0].magnitudes[0] - r).abs() < 1e-12 && (imp[0].magnitudes[1] - r).abs() < 1e-12);
    }

    #[test]
    fn projection_basics() {
        let m = PcaModel {
            center: vec![0.0; 3],
            components: vec![vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]],
            eigenvalues: vec![2.0, 1.0, 0.0],
            explained_ratio: vec![2.0 / 3.0, 1.0 / 3.0, 0.0],
        };
        let p = project(&m, &[vec![0.0; 3], vec![0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(p, vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        assert!(matches!(project(&m, &[vec![1.0]]), Err(LearnerError::DimensionMismatch { .. })));
        let imp = feature_importance(&m);
        assert_eq!(imp[0].magnitudes, vec![0.0, 0.0, 1.0]);
        assert_eq!(imp[0].top_feature, 2);
    }

    #[test]
    fn kmeans_closed_forms() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 3.0], vec![5.0, 5.0]];
        let all = kmeans_pp(&pts, 4, 1, &KMeansConfig::default()).unwrap();
        assert_eq!(all.sse, 0.0);
        let one = kmeans_pp(&pts, 1, 1, &KMeansConfig::default()).unwrap();
        assert_eq!(one.centroids[0], vec![1.5, 2.0]);
        let total: f64 = pts.iter().map(|p| squared_distance(p, &[1.5, 2.0])).sum();
        assert!((one.sse - total).abs() < 1e-12);
        assert!(matches!(kmeans_pp(&pts, 5, 1, &KMeansConfig::default()), Err(LearnerError::BadK { .. })));
        assert!(matches!(kmeans_pp(&pts, 0, 1, &KMeansConfig::default()), Err(LearnerError::BadK { .. })));
    }

    #[test]
    fn empty_cluster_is_reseeded() {
        // two coincident starting centroids force an empty cluster
        let pts = vec![vec![0.0], vec![0.1], vec![10.0], vec![10.1]];
        let (centroids, assignment, sse, _, history) = lloyd(&pts, vec![vec![0.0], vec![0.0]], 300);
        assert_eq!(centroids.len(), 2);
        assert_ne!(assignment[0], assignment[2]);
        assert!(sse < 0.011);
        assert!(history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn singletons_and_labels() {
        let pts = vec![vec![5.0], vec![5.1], vec![1.0], vec![1.1], vec![9.0]];
        let result = KMeansResult {
            k: 3,
            centroids: vec![vec![5.05], vec![1.05], vec![9.0]],
            assignment: vec![0, 0, 1, 1, 2],
            sse: 0.0,
            iterations: 1,
            seed: 0,
            restart: 0,
            sse_history: vec![],
        };
        let g = exclude_singletons(&result, &pts);
        assert_eq!(g.groups.len(), 2);
        assert_eq!(g.excluded.len(), 1);
        assert_eq!(g.groups[0].label, "A");
        assert_eq!(g.groups[0].members, vec![0, 1]);
        assert_eq!(g.label_of[4], None);
        assert_eq!(g.label_of[2].as_deref(), Some("B"));
    }

    #[test]
    fn all_singletons() {
        let pts = vec![vec![0.0], vec![1.0]];
        let r = kmeans_pp(&pts, 2, 3, &KMeansConfig::default()).unwrap();
        let g = exclude_singletons(&r, &pts);
        assert!(g.groups.is_empty());
        assert_eq!(g.excluded.len(), 2);
    }

    #[test]
    fn labels() {
        assert_eq!(group_label(0), "A");
        assert_eq!(group_label(25), "Z");
        assert_eq!(group_label(26), "AA");
    }
}
