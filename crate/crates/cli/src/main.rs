use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use learntrace::ingest::{write_event_log_as, LogFormat};
use learntrace::learners::Aggregation;
use learntrace::pipeline::{
    self, configure_threads, write_json, write_text, ErrorClass, PipelineConfig, PipelineError,
};
use learntrace::seqclust::Linkage;
use learntrace::synth::{default_cohort, generate, CohortSpec};

/// Behavior mining for model-building event logs.
#[derive(Parser, Debug)]
#[command(name = "learntrace", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::large_enum_variant)] // parsed once
enum Command {
    /// Event log -> activity sequences and model records.
    Ingest {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        log: LogArgs,
    },
    /// Outlier trimming and length strata.
    Segment {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        segment: SegmentArgs,
    },
    /// Edit-distance clustering into behavior types.
    ClusterBehaviors {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        behaviors: BehaviorArgs,
    },
    /// PCA + K-means++ engagement groups.
    ClusterLearners {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        learners: LearnerArgs,
    },
    /// Complexity and variety of model documents.
    Quality {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        quality: QualityArgs,
    },
    /// Chi-square, ANOVA and t tests (+ evaluation against planted labels).
    Stats {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        stats: StatsArgs,
    },
    /// Synthetic cohort: log.tsv, models.json, truth.csv.
    Synth(SynthArgs),
    /// All stages in order on one working directory.
    Pipeline {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        log: LogArgs,
        #[command(flatten)]
        segment: SegmentArgs,
        #[command(flatten)]
        behaviors: BehaviorArgs,
        #[command(flatten)]
        learners: LearnerArgs,
        #[command(flatten)]
        quality: QualityArgs,
        #[command(flatten)]
        stats: StatsArgs,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// TOML configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Working directory for inputs and outputs of the stages.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel kernels (results do not depend on it).
    #[arg(long)]
    threads: Option<usize>,
    /// Add wall-clock timings to run metadata (makes outputs run-dependent).
    #[arg(long)]
    record_timings: bool,
}

#[derive(Args, Debug)]
struct LogArgs {
    #[arg(long)]
    log: Option<PathBuf>,
    /// tsv or jsonl.
    #[arg(long)]
    format: Option<LogFormat>,
}

#[derive(Args, Debug)]
struct SegmentArgs {
    /// Outlier window in standard deviations, or `off`.
    #[arg(long)]
    outlier_k: Option<String>,
    /// Sample (n - 1) instead of population standard deviation.
    #[arg(long)]
    sample_sd: bool,
    /// Kernel bandwidth, or `auto` for Silverman's rule.
    #[arg(long)]
    bandwidth: Option<String>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    n_cuts: Option<usize>,
}

#[derive(Args, Debug)]
struct BehaviorArgs {
    /// single, complete or average.
    #[arg(long)]
    linkage: Option<Linkage>,
    /// Clusters per stratum, e.g. `2,2,3`, or `gap:<max>` for the largest-gap rule.
    #[arg(long)]
    counts: Option<String>,
    #[arg(long)]
    merge_target: Option<usize>,
    #[arg(long)]
    construction_min_c: Option<f64>,
    #[arg(long)]
    observation_min_ps: Option<f64>,
    #[arg(long)]
    observation_max_c: Option<f64>,
}

#[derive(Args, Debug)]
struct LearnerArgs {
    /// sum or mean.
    #[arg(long)]
    aggregation: Option<Aggregation>,
    #[arg(long)]
    components: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    elbow_min: Option<usize>,
    #[arg(long)]
    elbow_max: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iterations: Option<usize>,
}

#[derive(Args, Debug)]
struct QualityArgs {
    /// Model document file, or a directory of `*.json` files.
    #[arg(long)]
    models: Option<PathBuf>,
    /// Also report component and relationship variety separately.
    #[arg(long)]
    split_variety: bool,
}

#[derive(Args, Debug)]
struct StatsArgs {
    /// Continuity correction for 2x2 contingency tables.
    #[arg(long)]
    yates: bool,
    #[arg(long)]
    welch: bool,
    #[arg(long)]
    bonferroni: bool,
    /// Planted labels (synth truth.csv); writes eval.csv.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// TOML cohort description replacing the default cohort (its seed is ignored).
    #[arg(long)]
    cohort: Option<PathBuf>,
    /// Log format to write.
    #[arg(long, default_value = "tsv")]
    format: LogFormat,
}

fn input(context: &str, msg: impl std::fmt::Display) -> PipelineError {
    PipelineError::input(context, msg)
}

impl CommonArgs {
    fn load(&self) -> Result<PipelineConfig, PipelineError> {
        let mut c = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        if self.out.is_some() {
            c.out.clone_from(&self.out);
        }
        if self.seed.is_some() {
            c.seed = self.seed;
        }
        if self.threads.is_some() {
            c.threads = self.threads;
        }
        c.record_timings |= self.record_timings;
        Ok(c)
    }
}

impl LogArgs {
    fn apply(&self, c: &mut PipelineConfig) {
        if self.log.is_some() {
            c.log.clone_from(&self.log);
        }
        if let Some(f) = self.format {
            c.log_format = f;
        }
    }
}

impl SegmentArgs {
    fn apply(&self, c: &mut PipelineConfig) -> Result<(), PipelineError> {
        let s = &mut c.segment;
        match self.outlier_k.as_deref() {
            None => {}
            Some("off") => s.trim_outliers = false,
            Some(k) => {
                s.outlier_k = k.parse().map_err(|_| input("--outlier-k", format!("expected a number or `off`, got `{k}`")))?;
                s.trim_outliers = true;
            }
        }
        s.sample_sd |= self.sample_sd;
        match self.bandwidth.as_deref() {
            None => {}
            Some("auto") => s.bandwidth = None,
            Some(h) => {
                s.bandwidth = Some(h.parse().map_err(|_| input("--bandwidth", format!("expected a number or `auto`, got `{h}`")))?)
            }
        }
        if let Some(g) = self.grid_points {
            s.grid_points = g;
        }
        if let Some(n) = self.n_cuts {
            s.n_cuts = n;
        }
        Ok(())
    }
}

impl BehaviorArgs {
    fn apply(&self, c: &mut PipelineConfig) -> Result<(), PipelineError> {
        let b = &mut c.behaviors;
        if let Some(l) = self.linkage {
            b.linkage = l;
        }
        if let Some(counts) = &self.counts {
            let bad = || input("--counts", format!("expected e.g. `2,2,3` or `gap:6`, got `{counts}`"));
            if let Some(max) = counts.strip_prefix("gap:") {
                b.gap_max_k = Some(max.parse().map_err(|_| bad())?);
            } else {
                b.cluster_counts = counts
                    .split(',')
                    .map(|x| x.trim().parse())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad())?;
                b.gap_max_k = None;
            }
        }
        if let Some(t) = self.merge_target {
            b.merge_target = t;
        }
        if let Some(v) = self.construction_min_c {
            b.construction_min_c = v;
        }
        if let Some(v) = self.observation_min_ps {
            b.observation_min_ps = v;
        }
        if let Some(v) = self.observation_max_c {
            b.observation_max_c = v;
        }
        Ok(())
    }
}

impl LearnerArgs {
    fn apply(&self, c: &mut PipelineConfig) {
        let l = &mut c.learners;
        if let Some(a) = self.aggregation {
            l.aggregation = a;
        }
        for (dst, src) in [
            (&mut l.components, self.components),
            (&mut l.k, self.k),
            (&mut l.elbow_min, self.elbow_min),
            (&mut l.elbow_max, self.elbow_max),
            (&mut l.restarts, self.restarts),
            (&mut l.max_iterations, self.max_iterations),
        ] {
            if let Some(v) = src {
                *dst = v;
            }
        }
    }
}

impl QualityArgs {
    fn apply(&self, c: &mut PipelineConfig) {
        if self.models.is_some() {
            c.models.clone_from(&self.models);
        }
        c.stats.split_variety |= self.split_variety;
    }
}

impl StatsArgs {
    fn apply(&self, c: &mut PipelineConfig) {
        c.stats.yates |= self.yates;
        c.stats.welch |= self.welch;
        c.stats.bonferroni |= self.bonferroni;
        if self.truth.is_some() {
            c.truth.clone_from(&self.truth);
        }
    }
}

fn run_synth(args: &SynthArgs) -> Result<(), PipelineError> {
    let mut cohort = match &args.cohort {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| input(&p.display().to_string(), e))?;
            toml::from_str::<CohortSpec>(&text).map_err(|e| input(&p.display().to_string(), e))?
        }
        None => default_cohort(args.seed),
    };
    cohort.seed = args.seed;
    let out = generate(&cohort).map_err(|e| e.at("synth"))?;
    let dir = &args.out;
    std::fs::create_dir_all(dir).map_err(|e| input(&dir.display().to_string(), e))?;
    let log_name = match args.format {
        LogFormat::Tsv => "log.tsv",
        LogFormat::Jsonl => "log.jsonl",
    };
    let mut log = Vec::new();
    write_event_log_as(&out.events, args.format, &mut log).map_err(|e| input("synth", e))?;
    let text = String::from_utf8(log).map_err(|e| PipelineError::internal("synth", e))?;
    write_text(&dir.join(log_name), &text)?;
    write_json(&dir.join("models.json"), &out.models)?;
    let mut truth = Vec::new();
    out.truth.write_csv(&mut truth).map_err(|e| input("synth", e))?;
    write_text(&dir.join("truth.csv"), &String::from_utf8_lossy(&truth))?;
    write_json(&dir.join("cohort.json"), &cohort)?;
    write_json(
        &dir.join("run_synth.json"),
        &serde_json::json!({
            "stage": "synth",
            "version": env!("CARGO_PKG_VERSION"),
            "seed": args.seed,
            "events": out.events.len(),
            "models": out.models.len(),
            "learners": out.truth.learners.len(),
            "outputs": [log_name, "models.json", "truth.csv", "cohort.json"],
        }),
    )
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let config = match &cli.command {
        Command::Synth(args) => return run_synth(args),
        Command::Ingest { common, log } => {
            let mut c = common.load()?;
            log.apply(&mut c);
            c
        }
        Command::Segment { common, segment } => {
            let mut c = common.load()?;
            segment.apply(&mut c)?;
            c
        }
        Command::ClusterBehaviors { common, behaviors } => {
            let mut c = common.load()?;
            behaviors.apply(&mut c)?;
            c
        }
        Command::ClusterLearners { common, learners } => {
            let mut c = common.load()?;
            learners.apply(&mut c);
            c
        }
        Command::Quality { common, quality } => {
            let mut c = common.load()?;
            quality.apply(&mut c);
            c
        }
        Command::Stats { common, stats } => {
            let mut c = common.load()?;
            stats.apply(&mut c);
            c
        }
        Command::Pipeline {
            common,
            log,
            segment,
            behaviors,
            learners,
            quality,
            stats,
        } => {
            let mut c = common.load()?;
            log.apply(&mut c);
            segment.apply(&mut c)?;
            behaviors.apply(&mut c)?;
            learners.apply(&mut c);
            quality.apply(&mut c);
            stats.apply(&mut c);
            c
        }
    };
    configure_threads(config.threads);
    match &cli.command {
        Command::Ingest { .. } => pipeline::run_ingest(&config).map(drop),
        Command::Segment { .. } => pipeline::run_segment(&config).map(drop),
        Command::ClusterBehaviors { .. } => pipeline::run_cluster_behaviors(&config).map(drop),
        Command::ClusterLearners { .. } => pipeline::run_cluster_learners(&config).map(drop),
        Command::Quality { .. } => pipeline::run_quality(&config).map(drop),
        Command::Stats { .. } => pipeline::run_stats(&config).map(drop),
        Command::Pipeline { .. } => pipeline::run_pipeline(&config).map(drop),
        Command::Synth(_) => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
