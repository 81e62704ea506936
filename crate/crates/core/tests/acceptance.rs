//! Acceptance suite: one numbered check per line, `PASS` or `FAIL`.
//!
//! Runs without the libtest harness so the lines are always printed.
//! Exits nonzero when any check fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use learntrace::ingest::write_event_log;
use learntrace::learners::{covariance, kmeans_pp, pca, pca_from_covariance, squared_distance, standardize, KMeansConfig};
use learntrace::pipeline::{evaluate, run_pipeline, PipelineConfig};
use learntrace::rng::SeededRng;
use learntrace::segment::{segment_lengths, SegmentationConfig};
use learntrace::seqclust::{agglomerate, levenshtein, DistanceMatrix, Linkage};
use learntrace::stats::{
    chi2_sf, chi_square_independence, f_sf, one_way_anova, t_sf_two_tailed, t_test, ContingencyTable, TTestMode,
};
use learntrace::synth::{default_cohort, generate, GroundTruth};
use learntrace::BehaviorType;

use common::{exhaustive_two_partition_sse, naive_agglomerate, normal_lengths, random_integer_matrix, EditGraph};

type Check = Result<String, String>;
type Named<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(start: Instant, limit_s: f64) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure!(t.as_secs_f64() < limit_s, "took {:.1} s, limit {limit_s} s", t.as_secs_f64());
    Ok(t)
}

fn levenshtein_oracle() -> Check {
    let start = Instant::now();
    let small = EditGraph::new(3, 4);
    let strings = small.strings();
    let mut table = vec![vec![0usize; strings.len()]; strings.len()];
    for (i, a) in strings.iter().enumerate() {
        let bfs = small.distances_from(i);
        for (j, b) in strings.iter().enumerate() {
            let d = levenshtein(a, b);
            ensure!(d as u32 == bfs[j], "{a:?} vs {b:?}: {d} != {}", bfs[j]);
            table[i][j] = d;
        }
    }
    let n = strings.len();
    for i in 0..n {
        ensure!(table[i][i] == 0, "d(x,x) != 0 for {:?}", strings[i]);
        for j in 0..n {
            ensure!(table[i][j] == table[j][i], "asymmetric at {:?}, {:?}", strings[i], strings[j]);
            ensure!(i == j || table[i][j] > 0, "zero distance between distinct strings");
            for k in 0..n {
                ensure!(table[i][k] <= table[i][j] + table[j][k], "triangle inequality fails");
            }
        }
    }

    let large = EditGraph::new(3, 7);
    let mut rng = SeededRng::new(11);
    for _ in 0..1000 {
        let a = common::random_string(7, 3, &mut rng);
        let b = common::random_string(7, 3, &mut rng);
        let want = large.distances_from(large.id(&a))[large.id(&b)];
        let got = levenshtein(&a, &b);
        ensure!(got as u32 == want, "{a:?} vs {b:?}: {got} != {want}");
    }
    let t = within(start, 10.0)?;
    Ok(format!("{} exhaustive pairs + 1000 random pairs, metric axioms ({:.1} s)", n * n, t.as_secs_f64()))
}

fn agglomeration_oracle() -> Check {
    let start = Instant::now();
    let mut rng = SeededRng::new(12);
    let mut merges = 0;
    for case in 0..100 {
        let n = 2 + rng.below(49);
        // narrow integer ranges produce many ties
        let max = if case % 2 == 0 { 5 } else { 1000 };
        let d = random_integer_matrix(n, max, &mut rng);
        let matrix = DistanceMatrix::from_square(&d);
        for linkage in [Linkage::Single, Linkage::Complete, Linkage::Average] {
            let fast = agglomerate(&matrix, linkage).map_err(|e| e.to_string())?;
            let slow = naive_agglomerate(&d, linkage);
            ensure!(fast.merges.len() == n - 1, "wrong merge count");
            for (t, (a, b)) in fast.merges.iter().zip(&slow).enumerate() {
                ensure!(a == b, "case {case} {linkage:?} n={n} step {t}: {a:?} != {b:?}");
            }
            merges += slow.len();
        }
    }
    let t = within(start, 30.0)?;
    Ok(format!("{merges} merges identical over 100 matrices x 3 linkages ({:.1} s)", t.as_secs_f64()))
}

fn pca_checks() -> Check {
    let mut rng = SeededRng::new(13);
    let mut worst_residual = 0.0f64;
    let mut worst_ortho = 0.0f64;
    let mut worst_sum = 0.0f64;
    for _ in 0..200 {
        let rows = 10 + rng.below(50);
        let raw: Vec<Vec<f64>> = (0..rows)
            .map(|_| {
                let z = rng.normal();
                (0..5).map(|j| rng.normal() * (1.0 + j as f64) + z * j as f64).collect()
            })
            .collect();
        let data = standardize(&raw).map_err(|e| e.to_string())?.data;
        let model = pca(&data, 5).map_err(|e| e.to_string())?;
        let cov = covariance(&data);
        for (a, &lambda) in model.components.iter().zip(&model.eigenvalues) {
            for i in 0..5 {
                let ca: f64 = (0..5).map(|j| cov[i][j] * a[j]).sum();
                worst_residual = worst_residual.max((ca - lambda * a[i]).abs());
            }
        }
        for i in 0..5 {
            for j in 0..5 {
                let dot: f64 = (0..5).map(|k| model.components[i][k] * model.components[j][k]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                worst_ortho = worst_ortho.max((dot - want).abs());
            }
        }
        let total: f64 = model.explained_ratio.iter().sum();
        worst_sum = worst_sum.max((total - 1.0).abs());
        let oracle = nalgebra::DMatrix::from_fn(5, 5, |i, j| cov[i][j]).symmetric_eigen();
        let mut want: Vec<f64> = oracle.eigenvalues.iter().copied().collect();
        want.sort_by(|a, b| b.total_cmp(a));
        for (got, want) in model.eigenvalues.iter().zip(&want) {
            ensure!((got - want).abs() < 1e-9, "eigenvalue {got} vs reference {want}");
        }
    }
    ensure!(worst_residual < 1e-9, "eigen residual {worst_residual:e}");
    ensure!(worst_ortho < 1e-9, "orthonormality error {worst_ortho:e}");
    ensure!(worst_sum < 1e-9, "explained ratios sum off by {worst_sum:e}");

    let model = pca_from_covariance(&[vec![2.0, 1.0], vec![1.0, 2.0]], 2).map_err(|e| e.to_string())?;
    let r = &model.explained_ratio;
    ensure!((r[0] - 0.75).abs() < 1e-12 && (r[1] - 0.25).abs() < 1e-12, "[[2,1],[1,2]] ratios {r:?}");
    Ok(format!(
        "200 matrices: residual {worst_residual:.1e}, orthonormality {worst_ortho:.1e}, ratio sum {worst_sum:.1e}; 0.75/0.25 exact"
    ))
}

fn kmeans_checks() -> Check {
    let mut rng = SeededRng::new(14);
    let single = KMeansConfig {
        restarts: 1,
        ..KMeansConfig::default()
    };
    for run in 0..100u64 {
        let n = 5 + rng.below(60);
        let k = 1 + rng.below(6.min(n));
        let points: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.normal() * 3.0, rng.normal(), rng.uniform()]).collect();
        let res = kmeans_pp(&points, k, run, &single).map_err(|e| e.to_string())?;
        for w in res.sse_history.windows(2) {
            ensure!(w[1] <= w[0], "run {run}: SSE rose from {} to {}", w[0], w[1]);
        }
        let direct: f64 = points
            .iter()
            .zip(&res.assignment)
            .map(|(p, &c)| squared_distance(p, &res.centroids[c]))
            .sum();
        ensure!((direct - res.sse).abs() <= 1e-9 * direct.max(1.0), "reported SSE differs from assignment");

        let one = kmeans_pp(&points, 1, run, &single).map_err(|e| e.to_string())?;
        let mean: Vec<f64> = (0..3).map(|j| points.iter().map(|p| p[j]).sum::<f64>() / n as f64).collect();
        let tss: f64 = points.iter().map(|p| squared_distance(p, &mean)).sum();
        ensure!((one.sse - tss).abs() <= 1e-9 * tss.max(1.0), "k=1 SSE {} != total {}", one.sse, tss);
        let all = kmeans_pp(&points, n, run, &single).map_err(|e| e.to_string())?;
        ensure!(all.sse == 0.0, "k=n SSE {} != 0", all.sse);
    }
    for instance in 0..50u64 {
        let n = 4 + rng.below(9);
        let shift = 8.0 + 4.0 * rng.uniform();
        let points: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let c = if i % 2 == 0 { 0.0 } else { shift };
                vec![c + rng.normal(), rng.normal()]
            })
            .collect();
        let best = exhaustive_two_partition_sse(&points);
        let got = kmeans_pp(&points, 2, instance, &KMeansConfig::default()).map_err(|e| e.to_string())?;
        ensure!((got.sse - best).abs() <= 1e-9 * best.max(1.0), "instance {instance}: {} vs optimum {best}", got.sse);
    }
    Ok("100 runs nonincreasing SSE, k=1 and k=n exact, 50 two-cluster optima".into())
}

fn tail_checks() -> Check {
    for i in 0..100 {
        let x = 0.25 * i as f64;
        let got = chi2_sf(x, 2.0).map_err(|e| e.to_string())?;
        let want = (-x / 2.0).exp();
        ensure!((got - want).abs() < 1e-12, "chi2_sf({x}, 2) = {got}, want {want}");
    }
    for i in 0..100 {
        let t = -20.0 + 0.4 * i as f64;
        let got = t_sf_two_tailed(t, 1.0).map_err(|e| e.to_string())?;
        let want = 1.0 - 2.0 * t.abs().atan() / std::f64::consts::PI;
        ensure!((got - want).abs() < 1e-12, "t tail({t}, 1) = {got}, want {want}");
    }
    let mut worst = 0.0f64;
    for &(x, df, want) in &common::tails::CHI2 {
        let got = chi2_sf(x, df).map_err(|e| e.to_string())?;
        worst = worst.max((got - want).abs());
        ensure!((got - want).abs() < 1e-10, "chi2_sf({x}, {df}) = {got}, want {want}");
    }
    for &(x, d1, d2, want) in &common::tails::F {
        let got = f_sf(x, d1, d2).map_err(|e| e.to_string())?;
        worst = worst.max((got - want).abs());
        ensure!((got - want).abs() < 1e-10, "f_sf({x}, {d1}, {d2}) = {got}, want {want}");
    }
    for &(t, df, want) in &common::tails::T {
        let got = t_sf_two_tailed(t, df).map_err(|e| e.to_string())?;
        worst = worst.max((got - want).abs());
        ensure!((got - want).abs() < 1e-10, "t tail({t}, {df}) = {got}, want {want}");
    }
    Ok(format!("closed forms to 1e-12, 90 reference values (worst {worst:.1e})"))
}

fn test_statistic_checks() -> Check {
    let mut rng = SeededRng::new(16);
    for case in 0..100 {
        let na = 2 + rng.below(30);
        let nb = 2 + rng.below(30);
        let shift = rng.normal();
        let a: Vec<f64> = (0..na).map(|_| rng.normal()).collect();
        let b: Vec<f64> = (0..nb).map(|_| rng.normal() * 2.0 + shift).collect();
        let f = one_way_anova(&[&a, &b]).map_err(|e| e.to_string())?.statistic;
        let t = t_test(&a, &b, TTestMode::Pooled).map_err(|e| e.to_string())?.statistic;
        ensure!((f - t * t).abs() <= 1e-9 * f.max(1.0), "case {case}: F {f} vs t^2 {}", t * t);
    }
    let table = ContingencyTable::new(vec![vec![10, 20], vec![20, 10]]).map_err(|e| e.to_string())?;
    let chi = chi_square_independence(&table, false).map_err(|e| e.to_string())?.statistic;
    ensure!((chi - 20.0 / 3.0).abs() < 1e-12, "chi2 {chi}, want 20/3");
    for _ in 0..20 {
        let rows = 2 + rng.below(4);
        let cols = 2 + rng.below(4);
        let r: Vec<u64> = (0..rows).map(|_| 1 + rng.below(9) as u64).collect();
        let c: Vec<u64> = (0..cols).map(|_| 1 + rng.below(9) as u64).collect();
        let counts = r.iter().map(|&x| c.iter().map(|&y| x * y).collect()).collect();
        let table = ContingencyTable::new(counts).map_err(|e| e.to_string())?;
        let chi = chi_square_independence(&table, false).map_err(|e| e.to_string())?.statistic;
        ensure!(chi < 1e-12, "proportional table gives {chi}");
    }
    Ok("F = t^2 on 100 instances, 20/3 exact, 20 proportional tables < 1e-12".into())
}

fn segmentation_recovery() -> Check {
    let start = Instant::now();
    let mut rng = SeededRng::new(17);
    let modes = [(400, 12.0, 1.5), (360, 36.0, 3.0), (240, 120.0, 6.0)];
    let mut lengths = Vec::new();
    let mut truth = Vec::new();
    for (g, &(n, mean, sd)) in modes.iter().enumerate() {
        lengths.extend(normal_lengths(n, mean, sd, &mut rng));
        truth.extend(std::iter::repeat_n(g, n));
    }
    let report = segment_lengths(&lengths, &SegmentationConfig::default()).map_err(|e| e.to_string())?;
    ensure!(!report.fallback && report.cuts.len() == 2, "no density cuts: {:?}", report.cuts);
    for (g, &cut) in report.cuts.iter().enumerate() {
        let below = (0..lengths.len()).filter(|&i| truth[i] == g).map(|i| lengths[i]).max().unwrap();
        let above = (0..lengths.len()).filter(|&i| truth[i] == g + 1).map(|i| lengths[i]).min().unwrap();
        ensure!(
            below as f64 <= cut && cut <= above as f64,
            "cut {cut:.2} outside the gap [{below}, {above}]"
        );
    }
    let mut captured = Vec::new();
    for g in 0..3 {
        let members: Vec<usize> = (0..lengths.len()).filter(|&i| truth[i] == g).collect();
        let hit = members.iter().filter(|&&i| report.group[i] == Some(g)).count();
        let share = hit as f64 / members.len() as f64;
        ensure!(share >= 0.95, "group {g} captured {share:.3}");
        captured.push(format!("{share:.3}"));
    }
    let t = within(start, 5.0)?;
    Ok(format!(
        "cuts {:.1} / {:.1}, captured {} ({:.2} s)",
        report.cuts[0],
        report.cuts[1],
        captured.join(" / "),
        t.as_secs_f64()
    ))
}

const SYNTH_SEED: u64 = 7;

struct Cohort {
    dir: PathBuf,
    truth: GroundTruth,
}

fn write_cohort(dir: &Path, seed: u64) -> Result<Cohort, String> {
    let out = generate(&default_cohort(seed)).map_err(|e| e.to_string())?;
    fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let mut log = Vec::new();
    write_event_log(&out.events, &mut log).map_err(|e| e.to_string())?;
    fs::write(dir.join("log.tsv"), log).map_err(|e| e.to_string())?;
    let models = serde_json::to_string(&out.models).map_err(|e| e.to_string())?;
    fs::write(dir.join("models.json"), models).map_err(|e| e.to_string())?;
    let mut truth = Vec::new();
    out.truth.write_csv(&mut truth).map_err(|e| e.to_string())?;
    fs::write(dir.join("truth.csv"), truth).map_err(|e| e.to_string())?;
    Ok(Cohort {
        dir: dir.to_path_buf(),
        truth: out.truth,
    })
}

fn pipeline_config(cohort: &Cohort, out: &Path, seed: u64) -> PipelineConfig {
    PipelineConfig {
        log: Some(cohort.dir.join("log.tsv")),
        models: Some(cohort.dir.join("models.json")),
        truth: Some(cohort.dir.join("truth.csv")),
        out: Some(out.to_path_buf()),
        seed: Some(seed),
        ..PipelineConfig::default()
    }
}

fn read_stats(dir: &Path) -> Result<serde_json::Value, String> {
    let text = fs::read_to_string(dir.join("stats.json")).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn planted_recovery(work: &Path) -> Check {
    let start = Instant::now();
    let cohort = write_cohort(&work.join("cohort"), SYNTH_SEED)?;
    let out = work.join("run_a");
    run_pipeline(&pipeline_config(&cohort, &out, SYNTH_SEED)).map_err(|e| e.to_string())?;
    let t = within(start, 60.0)?;

    let metrics: BTreeMap<&str, f64> = evaluate(&out, &cohort.truth).map_err(|e| e.to_string())?.into_iter().collect();
    let ari_all = metrics["behavior_ari_all"];
    let ari_assigned = metrics["behavior_ari_assigned"];
    ensure!(ari_all >= 0.8, "ARI over all models {ari_all:.3}");
    ensure!(ari_assigned >= 0.8, "ARI over clustered models {ari_assigned:.3}");

    let stats = read_stats(&out)?;
    let mut order = Vec::new();
    for metric in ["complexity", "variety"] {
        let mean = |b: BehaviorType| {
            stats["quality"][metric]["groups"][b.name()]["mean"]
                .as_f64()
                .ok_or_else(|| format!("no {metric} mean for {}", b.name()))
        };
        let (fc, obs, cons) = (
            mean(BehaviorType::FullCycle)?,
            mean(BehaviorType::Observation)?,
            mean(BehaviorType::Construction)?,
        );
        ensure!(fc > obs && obs > cons, "{metric} means FC {fc:.2}, Obs {obs:.2}, Cons {cons:.2}");
        order.push(format!("{metric} {fc:.2} > {obs:.2} > {cons:.2}"));
    }
    Ok(format!(
        "ARI {ari_all:.3} (all) / {ari_assigned:.3} (clustered, coverage {:.3}), {} ({:.1} s)",
        metrics["behavior_coverage"],
        order.join(", "),
        t.as_secs_f64()
    ))
}

fn cohort_association(work: &Path) -> Check {
    let stats = read_stats(&work.join("run_a"))?;
    let chi = &stats["chi_square"];
    let p = chi["p_value"].as_f64().ok_or("no chi-square p-value")?;
    ensure!(p < 0.001, "p = {p:e}");
    Ok(format!("chi2 = {:.2}, df = {}, p = {p:.2e}", chi["statistic"].as_f64().unwrap_or(f64::NAN), chi["df"][0]))
}

fn files_under(dir: &Path) -> Result<BTreeMap<PathBuf, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().to_path_buf();
                out.insert(rel, fs::read(&path).map_err(|e| e.to_string())?);
            }
        }
    }
    Ok(out)
}

fn reproducibility(work: &Path) -> Check {
    let again = write_cohort(&work.join("cohort_again"), SYNTH_SEED)?;
    for name in ["log.tsv", "models.json", "truth.csv"] {
        let a = fs::read(work.join("cohort").join(name)).map_err(|e| e.to_string())?;
        let b = fs::read(again.dir.join(name)).map_err(|e| e.to_string())?;
        ensure!(a == b, "synthetic {name} differs between runs");
    }
    let cohort = Cohort {
        dir: work.join("cohort"),
        truth: again.truth,
    };
    let out = work.join("run_b");
    run_pipeline(&pipeline_config(&cohort, &out, SYNTH_SEED)).map_err(|e| e.to_string())?;
    let a = files_under(&work.join("run_a"))?;
    let b = files_under(&out)?;
    ensure!(a.keys().eq(b.keys()), "different file sets");
    for (name, bytes) in &a {
        ensure!(bytes == &b[name], "{} differs", name.display());
    }
    Ok(format!("{} output files byte-identical", a.len()))
}

fn main() {
    let work = tempfile::tempdir().expect("temporary directory");
    let work = work.path();
    let checks: Vec<Named> = vec![
        ("edit distance vs edit-path search", Box::new(levenshtein_oracle)),
        ("agglomeration vs naive re-scan", Box::new(agglomeration_oracle)),
        ("PCA eigen decomposition", Box::new(pca_checks)),
        ("K-means++ / Lloyd", Box::new(kmeans_checks)),
        ("distribution tails", Box::new(tail_checks)),
        ("ANOVA, t and chi-square statistics", Box::new(test_statistic_checks)),
        ("length segmentation recovery", Box::new(segmentation_recovery)),
        ("planted behavior recovery", Box::new(move || planted_recovery(work))),
        ("behavior x engagement association", Box::new(move || cohort_association(work))),
        ("same-seed runs byte-identical", Box::new(move || reproducibility(work))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
