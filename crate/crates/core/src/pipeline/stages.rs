use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::BufReader;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::files::*;
use super::{ErrorClass, PipelineConfig, PipelineError};
use crate::fmt::sig10;
use crate::ingest::{build_sequences, parse_event_log, sequence_stats, symbols_from_str, ActivityClass, ModelRecord};
use crate::learners::{
    elbow, exclude_singletons, feature_importance, kmeans_pp, learner_features, pca, project, standardize,
    KMeansConfig, FEATURE_NAMES,
};
use crate::quality::{read_models, score, split_variety};
use crate::segment::{group_name, segment_lengths, Bandwidth, SdKind, SegmentationConfig};
use crate::seqclust::{cluster_behaviors, ActivityProfile, BehaviorConfig, BehaviorType};
use crate::stats::{bonferroni, chi_square_independence, one_way_anova, t_test, ContingencyTable, TTestMode, TestResult};
use crate::svg;
use crate::synth::{adjusted_rand_index, GroundTruth};

/// What a stage wrote, relative to the working directory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageSummary {
    pub stage: &'static str,
    pub outputs: Vec<String>,
}

struct Stage<'a> {
    name: &'static str,
    config: &'a PipelineConfig,
    started: Instant,
    inputs: Vec<String>,
    outputs: Vec<String>,
}

impl<'a> Stage<'a> {
    fn start(name: &'static str, config: &'a PipelineConfig) -> Result<Self, PipelineError> {
        config.validate()?;
        let dir = config.out_dir()?;
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        Ok(Self {
            name,
            config,
            started: Instant::now(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        })
    }

    fn dir(&self) -> &Path {
        self.config.out.as_deref().expect("checked in start")
    }

    /// A working-directory file this stage reads.
    fn input(&mut self, name: &str) -> Result<std::path::PathBuf, PipelineError> {
        let path = self.dir().join(name);
        if !path.is_file() {
            return Err(PipelineError::input(
                self.name,
                format!("missing {name} in the working directory (run the earlier stages first)"),
            ));
        }
        self.inputs.push(name.to_string());
        Ok(path)
    }

    fn output(&mut self, name: &str) -> std::path::PathBuf {
        self.outputs.push(name.to_string());
        self.dir().join(name)
    }

    fn finish(self) -> Result<StageSummary, PipelineError> {
        let mut meta = json!({
            "stage": self.name,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.config.seed,
            "config": self.config,
            "inputs": self.inputs,
            "outputs": self.outputs,
        });
        if self.config.record_timings {
            meta["elapsed_ms"] = json!(self.started.elapsed().as_secs_f64() * 1e3);
        }
        write_json(&self.dir().join(format!("run_{}.json", self.name.replace('-', "_"))), &meta)?;
        Ok(StageSummary {
            stage: self.name,
            outputs: self.outputs,
        })
    }
}

fn load_sequences(path: &Path) -> Result<Vec<(SequenceRow, Vec<ActivityClass>)>, PipelineError> {
    read_csv::<SequenceRow>(path)?
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let symbols = symbols_from_str(&row.symbols).ok_or_else(|| {
                PipelineError::input(format!("{}:{}", path.display(), i + 2), "symbols must use only c, p, s")
            })?;
            if row.sequence_id != i || symbols.len() != row.length {
                return Err(PipelineError::input(
                    format!("{}:{}", path.display(), i + 2),
                    "sequence_id or length inconsistent with row",
                ));
            }
            Ok((row, symbols))
        })
        .collect()
}

/// Event log -> sequences.csv, models.csv, ingest_report.json.
pub fn run_ingest(config: &PipelineConfig) -> Result<StageSummary, PipelineError> {
    let mut stage = Stage::start("ingest", config)?;
    let log = config
        .log
        .as_deref()
        .ok_or_else(|| PipelineError::input("ingest", "an event log (--log) is required"))?;
    let file = fs::File::open(log).map_err(|e| io_error(log, e))?;
    let events = parse_event_log(BufReader::new(file), config.log_format).map_err(|e| e.at(log.display().to_string()))?;
    stage.inputs.push(log.display().to_string());
    let build = build_sequences(&events);

    let rows: Vec<SequenceRow> = build
        .sequences
        .iter()
        .enumerate()
        .map(|(i, s)| SequenceRow {
            sequence_id: i,
            learner_id: s.learner_id.clone(),
            model_id: s.model_id.clone(),
            is_copied: s.is_copied,
            length: s.len(),
            symbols: s.symbol_string(),
        })
        .collect();
    write_csv(&stage.output(SEQUENCES_CSV), &rows)?;
    let models: Vec<ModelRow> = build
        .models
        .iter()
        .map(|m| ModelRow {
            learner_id: m.learner_id.clone(),
            model_id: m.model_id.clone(),
            is_copied: m.is_copied,
            first_ts: m.first_timestamp,
            n_c: m.counts[0],
            n_p: m.counts[1],
            n_s: m.counts[2],
        })
        .collect();
    write_csv(&stage.output(MODELS_CSV), &models)?;

    let mut actions: BTreeMap<&str, usize> = BTreeMap::new();
    for e in &events {
        *actions.entry(e.action.token()).or_default() += 1;
    }
    let learners: BTreeSet<&str> = events.iter().map(|e| e.learner_id.as_str()).collect();
    let lengths: Vec<usize> = rows.iter().map(|r| r.length).collect();
    let report = json!({
        "events": events.len(),
        "learners": learners.len(),
        "models": build.models.len(),
        "sequences": rows.len(),
        "omitted_pairs": build.omitted_pairs,
        "action_counts": actions,
        "length_summary": sequence_stats(&lengths).ok(),
    });
    write_json(&stage.output(INGEST_REPORT), &report)?;
    stage.finish()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GroupCount {
    name: String,
    count: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SegmentationSummary {
    sequences: usize,
    outlier_mean: f64,
    outlier_sd: f64,
    outlier_k: Option<f64>,
    lower: Option<f64>,
    upper: Option<f64>,
    removed: usize,
    bandwidth: f64,
    cuts: Vec<f64>,
    fallback: bool,
    groups: Vec<GroupCount>,
}

/// sequences.csv -> segments.csv, segmentation.json, density.csv/svg.
pub fn run_segment(config: &PipelineConfig) -> Result<StageSummary, PipelineError> {
    let mut stage = Stage::start("segment", config)?;
    let seqs = read_csv::<SequenceRow>(&stage.input(SEQUENCES_CSV)?)?;
    let lengths: Vec<usize> = seqs.iter().map(|s| s.length).collect();
    let opts = &config.segment;
    let seg_config = SegmentationConfig {
        outlier_k: if opts.trim_outliers { opts.outlier_k } else { f64::INFINITY },
        sd_kind: if opts.sample_sd { SdKind::Sample } else { SdKind::Population },
        bandwidth: opts.bandwidth.map_or(Bandwidth::Auto, Bandwidth::Fixed),
        grid_points: opts.grid_points,
        n_cuts: opts.n_cuts,
    };
    let report = segment_lengths(&lengths, &seg_config).map_err(|e| e.at("segment"))?;
    let n_groups = report.cuts.len() + 1;

    let rows: Vec<SegmentRow> = seqs
        .iter()
        .zip(&report.group)
        .map(|(s, g)| SegmentRow {
            sequence_id: s.sequence_id,
            length: s.length,
            stratum: *g,
            group: g.map_or_else(|| "outlier".to_string(), |g| group_name(g, n_groups)),
        })
        .collect();
    write_csv(&stage.output(SEGMENTS_CSV), &rows)?;
    let finite = |x: f64| x.is_finite().then_some(x);
    let summary = SegmentationSummary {
        sequences: lengths.len(),
        outlier_mean: report.bounds.mean,
        outlier_sd: report.bounds.sd,
        outlier_k: finite(report.bounds.k),
        lower: finite(report.bounds.lower),
        upper: finite(report.bounds.upper),
        removed: report.removed.len(),
        bandwidth: report.bandwidth,
        cuts: report.cuts.clone(),
        fallback: report.fallback,
        groups: report
            .counts
            .iter()
            .enumerate()
            .map(|(g, &count)| GroupCount {
                name: group_name(g, n_groups),
                count,
            })
            .collect(),
    };
    write_json(&stage.output(SEGMENTATION_JSON), &summary)?;
    let density = report.density.as_ref().expect("segment_lengths fills the density");
    let records: Vec<Vec<String>> = density
        .grid
        .iter()
        .zip(&density.density)
        .map(|(&x, &y)| vec![sig10(x), sig10(y)])
        .collect();
    write_csv_records(&stage.output(DENSITY_CSV), &["grid", "density"], &records)?;
    write_text(
        &stage.output(DENSITY_SVG),
        &svg::density(density, &report.cuts, "Sequence length density"),
    )?;
    stage.finish()
}

fn profile_json(p: &ActivityProfile) -> serde_json::Value {
    json!({
        "frac_c": p.frac[0],
        "frac_p": p.frac[1],
        "frac_s": p.frac[2],
        "mean_length": p.mean_length,
        "count": p.count,
    })
}

/// sequences.csv + segments.csv -> behaviors.csv, behavior_clusters.json,
/// dendrogram_<group>.json/svg.
pub fn run_cluster_behaviors(config: &PipelineConfig) -> Result<StageSummary, PipelineError> {
    let mut stage = Stage::start("cluster-behaviors", config)?;
    let seqs = load_sequences(&stage.input(SEQUENCES_CSV)?)?;
    let segments = read_csv::<SegmentRow>(&stage.input(SEGMENTS_CSV)?)?;
    let summary: SegmentationSummary = read_json(&stage.input(SEGMENTATION_JSON)?)?;
    if segments.len() != seqs.len() {
        return Err(PipelineError::input(
            "cluster-behaviors",
            format!("{} segment rows for {} sequences", segments.len(), seqs.len()),
        ));
    }
    let n_groups = summary.groups.len();
    let group_of: Vec<Option<usize>> = segments.iter().map(|s| s.stratum).collect();
    let symbols: Vec<&[ActivityClass]> = seqs.iter().map(|s| s.1.as_slice()).collect();
    let behavior_config = BehaviorConfig {
        linkage: config.behaviors.linkage,
        counts: config.count_rule(),
        merge_target: config.behaviors.merge_target,
        thresholds: config.thresholds(),
    };
    let result = cluster_behaviors(&symbols, &group_of, n_groups, &behavior_config).map_err(|e| e.at("cluster-behaviors"))?;

    let rows: Vec<BehaviorRow> = result
        .assignment
        .iter()
        .enumerate()
        .filter_map(|(i, a)| {
            a.map(|a| BehaviorRow {
                sequence_id: i,
                group: group_name(a.group, n_groups),
                cluster: a.merged_cluster,
                behavior_type: a.behavior.to_string(),
            })
        })
        .collect();
    write_csv(&stage.output(BEHAVIORS_CSV), &rows)?;

    let mut strata = Vec::new();
    for gc in &result.groups {
        let name = group_name(gc.group, n_groups);
        let clusters: Vec<_> = gc
            .profiles
            .iter()
            .enumerate()
            .map(|(c, p)| {
                let idx = result
                    .stratum_clusters
                    .iter()
                    .position(|&x| x == (gc.group, c))
                    .expect("registered");
                json!({"cluster": c, "merged_cluster": result.merged_of[idx], "profile": profile_json(p)})
            })
            .collect();
        strata.push(json!({"group": name, "size": gc.members.len(), "k": gc.k, "clusters": clusters}));
        if let Some(d) = &gc.dendrogram {
            let doc = json!({
                "group": name,
                "linkage": d.linkage,
                "leaves": gc.members,
                "merges": d.merges,
            });
            write_json(&stage.output(&dendrogram_json(&name)), &doc)?;
            write_text(
                &stage.output(&dendrogram_svg(&name)),
                &svg::dendrogram(d, &format!("{name} sequences")),
            )?;
        }
    }
    let merged: Vec<_> = result
        .merged_profiles
        .iter()
        .zip(&result.merged_types)
        .enumerate()
        .map(|(c, (p, t))| json!({"cluster": c, "behavior_type": t, "profile": profile_json(p)}))
        .collect();
    let doc = json!({
        "linkage": config.behaviors.linkage,
        "merge_target": config.behaviors.merge_target,
        "strata": strata,
        "merged": merged,
    });
    write_json(&stage.output(BEHAVIOR_CLUSTERS_JSON), &doc)?;
    stage.finish()
}

fn pc_names(m: usize) -> Vec<String> {
    (1..=m).map(|c| format!("pc{c}")).collect()
}

/// models.csv -> features.csv, projection.csv, loadings.csv, elbow.csv,
/// learner_groups.json and the scatter and elbow figures.
pub fn run_cluster_learners(config: &PipelineConfig) -> Result<StageSummary, PipelineError> {
    let seed = config.require_seed()?;
    let mut stage = Stage::start("cluster-learners", config)?;
    let models: Vec<ModelRecord> = read_csv::<ModelRow>(&stage.input(MODELS_CSV)?)?
        .into_iter()
        .map(|m| ModelRecord {
            learner_id: m.learner_id,
            model_id: m.model_id,
            is_copied: m.is_copied,
            first_timestamp: m.first_ts,
            counts: [m.n_c, m.n_p, m.n_s],
        })
        .collect();
    let opts = &config.learners;
    let ctx = "cluster-learners";
    let features = learner_features(&models, opts.aggregation).map_err(|e| e.at(ctx))?;
    let raw: Vec<Vec<f64>> = features.rows.iter().map(|r| r.to_vec()).collect();
    let z = standardize(&raw).map_err(|e| e.at(ctx))?;
    let model = pca(&z.data, opts.components).map_err(|e| e.at(ctx))?;
    let points = project(&model, &z.data).map_err(|e| e.at(ctx))?;
    let n = points.len();
    let km_config = KMeansConfig {
        restarts: opts.restarts,
        max_iterations: opts.max_iterations,
    };
    let result = kmeans_pp(&points, opts.k, seed, &km_config).map_err(|e| e.at(ctx))?;
    let elbow_report = elbow(&points, opts.elbow_min..=opts.elbow_max.min(n), seed, &km_config).map_err(|e| e.at(ctx))?;
    let grouping = exclude_singletons(&result, &points);

    let mut header = vec!["learner_id"];
    header.extend(FEATURE_NAMES);
    let records: Vec<Vec<String>> = features
        .learner_ids
        .iter()
        .zip(&features.rows)
        .map(|(id, r)| std::iter::once(id.clone()).chain(r.iter().map(|&x| sig10(x))).collect())
        .collect();
    write_csv_records(&stage.output(FEATURES_CSV), &header, &records)?;

    let pcs = pc_names(opts.components);
    let mut header: Vec<&str> = vec!["learner_id"];
    header.extend(pcs.iter().map(String::as_str));
    header.push("group");
    let records: Vec<Vec<String>> = features
        .learner_ids
        .iter()
        .zip(&points)
        .zip(&grouping.label_of)
        .map(|((id, p), g)| {
            std::iter::once(id.clone())
                .chain(p.iter().map(|&x| sig10(x)))
                .chain(std::iter::once(g.clone().unwrap_or_default()))
                .collect()
        })
        .collect();
    write_csv_records(&stage.output(PROJECTION_CSV), &header, &records)?;

    let records: Vec<Vec<String>> = model
        .components
        .iter()
        .enumerate()
        .flat_map(|(c, a)| {
            a.iter()
                .enumerate()
                .map(move |(j, &v)| vec![format!("pc{}", c + 1), FEATURE_NAMES[j].to_string(), sig10(v)])
        })
        .collect();
    write_csv_records(&stage.output(LOADINGS_CSV), &["component", "feature", "value"], &records)?;
    let records: Vec<Vec<String>> = elbow_report.sse.iter().map(|&(k, s)| vec![k.to_string(), sig10(s)]).collect();
    write_csv_records(&stage.output(ELBOW_CSV), &["k", "sse"], &records)?;

    let group_doc = |g: &crate::learners::EngagementGroup| {
        json!({
            "label": g.label,
            "cluster": g.cluster,
            "size": g.members.len(),
            "centroid": g.centroid,
            "members": g.members.iter().map(|&i| &features.learner_ids[i]).collect::<Vec<_>>(),
        })
    };
    let importance: Vec<_> = feature_importance(&model)
        .iter()
        .enumerate()
        .map(|(c, imp)| {
            json!({
                "component": format!("pc{}", c + 1),
                "magnitudes": imp.magnitudes,
                "top_feature": FEATURE_NAMES[imp.top_feature],
            })
        })
        .collect();
    let doc = json!({
        "learners": n,
        "aggregation": opts.aggregation,
        "standardization": {"means": z.means, "scales": z.scales, "constant": z.constant},
        "eigenvalues": model.eigenvalues,
        "explained_ratio": model.explained_ratio,
        "importance": importance,
        "kmeans": {
            "k": result.k,
            "seed": result.seed,
            "sse": result.sse,
            "iterations": result.iterations,
            "restart": result.restart,
        },
        "elbow_largest_drop_k": elbow_report.largest_drop_k,
        "groups": grouping.groups.iter().map(group_doc).collect::<Vec<_>>(),
        "excluded": grouping.excluded.iter().map(group_doc).collect::<Vec<_>>(),
    });
    write_json(&stage.output(LEARNER_GROUPS_JSON), &doc)?;

    let xy: Vec<[f64; 2]> = points
        .iter()
        .map(|p| [p[0], p.get(1).copied().unwrap_or(0.0)])
        .collect();
    write_text(
        &stage.output(PROJECTION_SVG),
        &svg::scatter(&xy, &grouping.label_of, "Learners in PC1/PC2 space"),
    )?;
    write_text(
        &stage.output(ELBOW_SVG),
        &svg::elbow(&elbow_report.sse, Some(result.k), "K-means SSE by k"),
    )?;
    stage.finish()
}

/// Behavior type per model id from sequences.csv + behaviors.csv.
fn behavior_by_model(dir: &Path) -> Result<BTreeMap<String, String>, PipelineError> {
    let seqs = read_csv::<SequenceRow>(&dir.join(SEQUENCES_CSV))?;
    let behaviors = read_csv::<BehaviorRow>(&dir.join(BEHAVIORS_CSV))?;
    let mut out = BTreeMap::new();
    for b in behaviors {
        let s = seqs.get(b.sequence_id).ok_or_else(|| {
            PipelineError::input(BEHAVIORS_CSV, format!("unknown sequence_id {}", b.sequence_id))
        })?;
        out.entry(s.model_id.clone()).or_insert(b.behavior_type);
    }
    Ok(out)
}

/// Model documents (+ behaviors.csv when present) -> quality.csv and box plots.
pub fn run_quality(config: &PipelineConfig) -> Result<StageSummary, PipelineError> {
    let mut stage = Stage::start("quality", config)?;
    let path = config
        .models
        .as_deref()
        .ok_or_else(|| PipelineError::input("quality", "model documents (--models) are required"))?;
    let models = read_models(path).map_err(|e| e.at("quality"))?;
    stage.inputs.push(path.display().to_string());
    let joined = if stage.dir().join(BEHAVIORS_CSV).is_file() {
        stage.input(SEQUENCES_CSV)?;
        stage.input(BEHAVIORS_CSV)?;
        behavior_by_model(stage.dir())?
    } else {
        BTreeMap::new()
    };
    let split = config.stats.split_variety;
    let rows: Vec<QualityRow> = models
        .iter()
        .map(|m| {
            let q = score(m);
            let (cv, rv) = split_variety(m);
            QualityRow {
                model_id: m.id.clone(),
                behavior_type: joined.get(&m.id).cloned().unwrap_or_default(),
                complexity: q.complexity,
                variety: q.variety,
                component_variety: split.then_some(cv),
                relationship_variety: split.then_some(rv),
            }
        })
        .collect();
    write_csv(&stage.output(QUALITY_CSV), &rows)?;
    for (file, metric, pick) in [
        (COMPLEXITY_SVG, "complexity", (|r: &QualityRow| r.complexity) as fn(&QualityRow) -> usize),
        (VARIETY_SVG, "variety", |r: &QualityRow| r.variety),
    ] {
        let series: Vec<(String, Vec<f64>)> = BehaviorType::ALL
            .iter()
            .map(|t| {
                let v = rows
                    .iter()
                    .filter(|r| r.behavior_type == t.name())
                    .map(|r| pick(r) as f64)
                    .collect();
                (t.name().to_string(), v)
            })
            .collect();
        write_text(
            &stage.output(file),
            &svg::boxplot(&series, metric, &format!("Model {metric} by behavior type")),
        )?;
    }
    stage.finish()
}

fn test_json(r: &TestResult) -> serde_json::Value {
    json!({"kind": r.kind, "statistic": r.statistic, "df": r.df, "p_value": r.p_value})
}

fn describe(xs: &[f64]) -> serde_json::Value {
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n.max(1) as f64;
    let sd = if n > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    json!({"n": n, "mean": if n > 0 { Some(mean) } else { None }, "sd": sd})
}

fn quality_tests(rows: &[QualityRow], metric: &str, config: &PipelineConfig) -> serde_json::Value {
    let pick = |r: &QualityRow| if metric == "complexity" { r.complexity } else { r.variety } as f64;
    let samples: Vec<(BehaviorType, Vec<f64>)> = BehaviorType::ALL
        .iter()
        .map(|&t| (t, rows.iter().filter(|r| r.behavior_type == t.name()).map(pick).collect()))
        .collect();
    let present: Vec<&Vec<f64>> = samples.iter().map(|s| &s.1).filter(|v| !v.is_empty()).collect();
    let anova = if present.len() >= 2 {
        match one_way_anova(&present) {
            Ok(r) => test_json(&r),
            Err(e) => json!({"skipped": e.to_string()}),
        }
    } else {
        json!({"skipped": "fewer than two behavior types have models"})
    };
    let mode = if config.stats.welch { TTestMode::Welch } else { TTestMode::Pooled };
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let pairwise: Vec<_> = pairs
        .iter()
        .map(|&(i, j)| {
            let mut entry = json!({"a": samples[i].0, "b": samples[j].0});
            match t_test(&samples[i].1, &samples[j].1, mode) {
                Ok(r) => {
                    entry["test"] = test_json(&r);
                    if config.stats.bonferroni {
                        entry["p_bonferroni"] = json!(bonferroni(r.p_value, pairs.len()));
                    }
                }
                Err(e) => entry["skipped"] = json!(e.to_string()),
            }
            entry
        })
        .collect();
    let groups: BTreeMap<&str, serde_json::Value> = samples.iter().map(|(t, v)| (t.name(), describe(v))).collect();
    json!({"groups": groups, "anova": anova, "pairwise": pairwise})
}

/// Contingency of engagement group against behavior type, counted over
/// sequences of grouped learners.
fn contingency(dir: &Path) -> Result<(Vec<String>, Vec<Vec<u64>>), PipelineError> {
    let seqs = read_csv::<SequenceRow>(&dir.join(SEQUENCES_CSV))?;
    let behaviors = read_csv::<BehaviorRow>(&dir.join(BEHAVIORS_CSV))?;
    let (header, records) = read_csv_records(&dir.join(PROJECTION_CSV))?;
    let gcol = header
        .iter()
        .position(|h| h == "group")
        .ok_or_else(|| PipelineError::input(PROJECTION_CSV, "no group column"))?;
    let group_of: BTreeMap<&str, &str> = records
        .iter()
        .filter(|r| !r[gcol].is_empty())
        .map(|r| (r[0].as_str(), r[gcol].as_str()))
        .collect();
    let labels: Vec<String> = group_of
        .values()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(str::to_string)
        .collect();
    let mut table = vec![vec![0u64; 3]; labels.len()];
    for b in &behaviors {
        let s = seqs
            .get(b.sequence_id)
            .ok_or_else(|| PipelineError::input(BEHAVIORS_CSV, format!("unknown sequence_id {}", b.sequence_id)))?;
        let Some(g) = group_of.get(s.learner_id.as_str()) else { continue };
        let t: BehaviorType = b
            .behavior_type
            .parse()
            .map_err(|e: String| PipelineError::input(BEHAVIORS_CSV, e))?;
        let row = labels.iter().position(|l| l == g).expect("label collected");
        table[row][t.index()] += 1;
    }
    Ok((labels, table))
}

/// behaviors.csv + projection.csv (+ quality.csv) -> stats.json,
/// contingency.csv, and eval.csv when a truth file is configured.
pub fn run_stats(config: &PipelineConfig) -> Result<StageSummary, PipelineError> {
    let mut stage = Stage::start("stats", config)?;
    stage.input(SEQUENCES_CSV)?;
    stage.input(BEHAVIORS_CSV)?;
    stage.input(PROJECTION_CSV)?;
    let (labels, table) = contingency(stage.dir())?;
    let records: Vec<Vec<String>> = labels
        .iter()
        .zip(&table)
        .map(|(l, r)| std::iter::once(l.clone()).chain(r.iter().map(u64::to_string)).collect())
        .collect();
    let mut header = vec!["group"];
    header.extend(BehaviorType::ALL.iter().map(|t| t.name()));
    write_csv_records(&stage.output(CONTINGENCY_CSV), &header, &records)?;

    // empty rows and columns carry no information and have zero expectation
    let keep_rows: Vec<usize> = (0..table.len()).filter(|&i| table[i].iter().any(|&c| c > 0)).collect();
    let keep_cols: Vec<usize> = (0..3).filter(|&j| table.iter().any(|r| r[j] > 0)).collect();
    let chi = if keep_rows.len() >= 2 && keep_cols.len() >= 2 {
        let reduced: Vec<Vec<u64>> = keep_rows
            .iter()
            .map(|&i| keep_cols.iter().map(|&j| table[i][j]).collect())
            .collect();
        let yates = config.stats.yates && reduced.len() == 2 && reduced[0].len() == 2;
        let t = ContingencyTable::new(reduced).map_err(|e| e.at("stats"))?;
        let r = chi_square_independence(&t, yates).map_err(|e| e.at("stats"))?;
        let mut v = test_json(&r);
        v["yates"] = json!(yates);
        v["rows"] = json!(keep_rows.iter().map(|&i| &labels[i]).collect::<Vec<_>>());
        v["columns"] = json!(keep_cols.iter().map(|&j| BehaviorType::ALL[j]).collect::<Vec<_>>());
        v["n"] = json!(table.iter().flatten().sum::<u64>());
        v
    } else {
        json!({"skipped": "contingency table has fewer than two nonempty rows or columns"})
    };
    let percentages: BTreeMap<&str, Vec<f64>> = labels
        .iter()
        .zip(&table)
        .map(|(l, r)| {
            let total = r.iter().sum::<u64>().max(1) as f64;
            (l.as_str(), r.iter().map(|&c| 100.0 * c as f64 / total).collect())
        })
        .collect();
    let mut doc = json!({"chi_square": chi, "row_percentages": percentages});
    if stage.dir().join(QUALITY_CSV).is_file() {
        let rows = read_csv::<QualityRow>(&stage.input(QUALITY_CSV)?)?;
        doc["quality"] = json!({
            "complexity": quality_tests(&rows, "complexity", config),
            "variety": quality_tests(&rows, "variety", config),
            "t_test_mode": if config.stats.welch { "welch" } else { "pooled" },
        });
    }
    write_json(&stage.output(STATS_JSON), &doc)?;

    if let Some(truth_path) = &config.truth {
        let file = fs::File::open(truth_path).map_err(|e| io_error(truth_path, e))?;
        let truth = GroundTruth::read_csv(BufReader::new(file)).map_err(|e| e.at(truth_path.display().to_string()))?;
        stage.inputs.push(truth_path.display().to_string());
        let rows = evaluate(stage.dir(), &truth)?;
        let records: Vec<Vec<String>> = rows.iter().map(|(k, v)| vec![k.to_string(), sig10(*v)]).collect();
        write_csv_records(&stage.output(EVAL_CSV), &["metric", "value"], &records)?;
    }
    stage.finish()
}

/// Agreement of predicted behavior types and engagement groups with
/// planted labels. Sequences dropped as outliers and excluded learners
/// count as a label of their own in the `_all` metrics.
pub fn evaluate(dir: &Path, truth: &GroundTruth) -> Result<Vec<(&'static str, f64)>, PipelineError> {
    let seqs = read_csv::<SequenceRow>(&dir.join(SEQUENCES_CSV))?;
    let behaviors = read_csv::<BehaviorRow>(&dir.join(BEHAVIORS_CSV))?;
    let mut predicted = vec!["unassigned".to_string(); seqs.len()];
    for b in behaviors {
        if let Some(p) = predicted.get_mut(b.sequence_id) {
            *p = b.behavior_type;
        }
    }
    let planted: BTreeMap<&str, BehaviorType> = truth.models.iter().map(|(m, b)| (m.as_str(), *b)).collect();
    let (mut t_all, mut p_all, mut t_kept, mut p_kept) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (s, p) in seqs.iter().zip(&predicted) {
        let Some(&t) = planted.get(s.model_id.as_str()) else { continue };
        t_all.push(t.name());
        p_all.push(p.as_str());
        if p != "unassigned" {
            t_kept.push(t.name());
            p_kept.push(p.as_str());
        }
    }
    let ari = |a: &[&str], b: &[&str]| adjusted_rand_index(a, b).map_err(|e| e.at("evaluate"));
    let accuracy = t_kept.iter().zip(&p_kept).filter(|(a, b)| a == b).count() as f64 / t_kept.len().max(1) as f64;
    let mut out = vec![
        ("behavior_ari_all", ari(&t_all, &p_all)?),
        ("behavior_ari_assigned", ari(&t_kept, &p_kept)?),
        ("behavior_accuracy_assigned", accuracy),
        ("behavior_coverage", t_kept.len() as f64 / t_all.len().max(1) as f64),
        ("models_evaluated", t_all.len() as f64),
    ];
    let projection = dir.join(PROJECTION_CSV);
    if projection.is_file() && !truth.learners.is_empty() {
        let (header, records) = read_csv_records(&projection)?;
        let gcol = header.iter().position(|h| h == "group").unwrap_or(header.len() - 1);
        let predicted: BTreeMap<&str, &str> = records.iter().map(|r| (r[0].as_str(), r[gcol].as_str())).collect();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (learner, label) in &truth.learners {
            if let Some(p) = predicted.get(learner.as_str()) {
                a.push(label.as_str());
                b.push(if p.is_empty() { "excluded" } else { p });
            }
        }
        out.push(("engagement_ari_all", ari(&a, &b)?));
    }
    Ok(out)
}
