//! Browser bindings: three interactive operations returning JSON with an
//! embedded SVG figure.
//!
//! The `*_json` functions hold the logic and are plain Rust so they can be
//! tested natively; the exported wrappers only turn errors into JS errors.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use learntrace::ingest::{build_sequences, symbols_from_str};
use learntrace::learners::{exclude_singletons, kmeans_pp, learner_features, pca, project, standardize, Aggregation, KMeansConfig};
use learntrace::segment::{segment_lengths, Bandwidth, SegmentationConfig};
use learntrace::seqclust::{agglomerate, cut, distance_matrix, label_behavior, profile, LabelThresholds, Linkage};
use learntrace::svg;
use learntrace::synth::{default_cohort, generate};

/// Whitespace or comma separated positive integers.
fn parse_lengths(text: &str) -> Result<Vec<usize>, String> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("`{t}` is not a positive length")),
        })
        .collect()
}

/// Length strata of `lengths_text`. A bandwidth of 0 or less selects
/// Silverman's rule.
pub fn density_cuts_json(lengths_text: &str, bandwidth: f64, n_cuts: usize, trim: bool) -> Result<Value, String> {
    let lengths = parse_lengths(lengths_text)?;
    let config = SegmentationConfig {
        outlier_k: if trim { 2.0 } else { f64::INFINITY },
        bandwidth: if bandwidth > 0.0 { Bandwidth::Fixed(bandwidth) } else { Bandwidth::Auto },
        n_cuts: n_cuts.clamp(1, 6),
        ..SegmentationConfig::default()
    };
    let report = segment_lengths(&lengths, &config).map_err(|e| e.to_string())?;
    let figure = report
        .density
        .as_ref()
        .map(|d| svg::density(d, &report.cuts, "Length density"))
        .unwrap_or_default();
    Ok(json!({
        "n": lengths.len(),
        "removed": report.removed.len(),
        "bandwidth": report.bandwidth,
        "cuts": report.cuts,
        "fallback": report.fallback,
        "counts": report.counts,
        "svg": figure,
    }))
}

/// Clusters `c`/`p`/`s` strings (one per line) by edit distance and
/// labels each cluster by its pooled activity mix.
pub fn cluster_sequences_json(text: &str, linkage: &str, k: usize) -> Result<Value, String> {
    let sequences = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| symbols_from_str(l).ok_or_else(|| format!("`{l}` has symbols other than c, p, s")))
        .collect::<Result<Vec<_>, _>>()?;
    if sequences.len() < 2 {
        return Err("enter at least two sequences".into());
    }
    let linkage: Linkage = linkage.parse()?;
    let k = k.clamp(1, sequences.len());
    let refs: Vec<&[_]> = sequences.iter().map(Vec::as_slice).collect();
    let tree = agglomerate(&distance_matrix(&refs), linkage).map_err(|e| e.to_string())?;
    let labels = cut(&tree, k).map_err(|e| e.to_string())?;
    let thresholds = LabelThresholds::default();
    let mut clusters = Vec::new();
    for c in 0..k {
        let members: Vec<usize> = (0..sequences.len()).filter(|&i| labels[i] == c).collect();
        let p = profile(&members.iter().map(|&i| &sequences[i]).collect::<Vec<_>>()).map_err(|e| e.to_string())?;
        clusters.push(json!({
            "cluster": c,
            "members": members,
            "frac": p.frac,
            "mean_length": p.mean_length,
            "behavior": label_behavior(&p, &thresholds).name(),
        }));
    }
    Ok(json!({
        "labels": labels,
        "clusters": clusters,
        "svg": svg::dendrogram(&tree, "Edit-distance dendrogram"),
    }))
}

/// Synthesizes a cohort and groups its learners by PCA + K-means++.
pub fn engagement_demo_json(seed: u64, k: usize) -> Result<Value, String> {
    let cohort = generate(&default_cohort(seed)).map_err(|e| e.to_string())?;
    let build = build_sequences(&cohort.events);
    let features = learner_features(&build.models, Aggregation::Sum).map_err(|e| e.to_string())?;
    let raw: Vec<Vec<f64>> = features.rows.iter().map(|r| r.to_vec()).collect();
    let z = standardize(&raw).map_err(|e| e.to_string())?;
    let model = pca(&z.data, 2).map_err(|e| e.to_string())?;
    let points = project(&model, &z.data).map_err(|e| e.to_string())?;
    let k = k.clamp(1, 10);
    let result = kmeans_pp(&points, k, seed, &KMeansConfig::default()).map_err(|e| e.to_string())?;
    let grouping = exclude_singletons(&result, &points);
    let xy: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
    let groups: Vec<Value> = grouping
        .groups
        .iter()
        .map(|g| json!({"label": g.label, "size": g.members.len(), "centroid": g.centroid}))
        .collect();
    Ok(json!({
        "learners": features.learner_ids.len(),
        "models": build.models.len(),
        "explained_ratio": &model.explained_ratio[..2],
        "sse": result.sse,
        "groups": groups,
        "excluded": grouping.excluded.len(),
        "svg": svg::scatter(&xy, &grouping.label_of, "Learners in PC1/PC2 space"),
    }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = densityCuts)]
pub fn density_cuts(lengths_text: &str, bandwidth: f64, n_cuts: usize, trim: bool) -> Result<String, JsError> {
    to_js(density_cuts_json(lengths_text, bandwidth, n_cuts, trim))
}

#[wasm_bindgen(js_name = clusterSequences)]
pub fn cluster_sequences(text: &str, linkage: &str, k: usize) -> Result<String, JsError> {
    to_js(cluster_sequences_json(text, linkage, k))
}

#[wasm_bindgen(js_name = engagementDemo)]
pub fn engagement_demo(seed: u32, k: usize) -> Result<String, JsError> {
    to_js(engagement_demo_json(u64::from(seed), k))
}
