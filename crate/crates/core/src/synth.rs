//! Synthetic event logs with planted behavior archetypes and engagement
//! groups.
//!
//! Each model's activity sequence is a Markov chain over `c, p, s` drawn
//! from its archetype; symbols are then turned into concrete actions that
//! edit a [`ConceptualModel`], so the emitted model documents agree with the
//! log. Learner `i` draws from its own sub-stream of the cohort seed and the
//! result does not depend on thread scheduling.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{ActionKind, ActivityClass, RawEvent};
use crate::quality::{Component, ConceptualModel, Relationship};
use crate::rng::SeededRng;
use crate::seqclust::BehaviorType;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid cohort: {0}")]
    InvalidSpec(String),
    #[error("labelings differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("truth file line {line}: {reason}")]
    BadTruth { line: usize, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LengthDistribution {
    /// `1 + Geometric`, memoryless.
    Geometric { mean: f64 },
    /// `1 + NegBin(shape, p)` with the given mean; smaller spread for larger shapes.
    NegativeBinomial { mean: f64, shape: u32 },
}

impl LengthDistribution {
    pub fn mean(&self) -> f64 {
        match *self {
            LengthDistribution::Geometric { mean } | LengthDistribution::NegativeBinomial { mean, .. } => mean,
        }
    }

    fn scaled(&self, factor: f64) -> Self {
        match *self {
            LengthDistribution::Geometric { mean } => LengthDistribution::Geometric {
                mean: 1.0 + (mean - 1.0) * factor,
            },
            LengthDistribution::NegativeBinomial { mean, shape } => LengthDistribution::NegativeBinomial {
                mean: 1.0 + (mean - 1.0) * factor,
                shape,
            },
        }
    }

    pub fn sample(&self, rng: &mut SeededRng) -> usize {
        match *self {
            LengthDistribution::Geometric { mean } => {
                1 + rng.geometric_failures(1.0 / mean) as usize
            }
            LengthDistribution::NegativeBinomial { mean, shape } => {
                let r = f64::from(shape);
                let p = r / (r + mean - 1.0);
                1 + (0..shape).map(|_| rng.geometric_failures(p) as usize).sum::<usize>()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeSpec {
    pub behavior: BehaviorType,
    /// First-symbol distribution over `c, p, s`.
    pub initial: [f64; 3],
    /// Row-stochastic, rows and columns in `c, p, s` order.
    pub transition: [[f64; 3]; 3],
    pub length: LengthDistribution,
    /// Chance the model starts as a copy of an exemplar.
    pub copy_probability: f64,
    /// Chance a construction step deletes an element instead of adding one.
    pub removal_probability: f64,
}

impl ArchetypeSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |what: String| Err(SynthError::InvalidSpec(format!("{}: {what}", self.behavior)));
        let rows = std::iter::once(&self.initial).chain(self.transition.iter());
        for (i, row) in rows.enumerate() {
            if row.iter().any(|&x| !(0.0..=1.0).contains(&x)) || (row.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return bad(format!("probability row {i} is not a distribution"));
            }
        }
        let mean = self.length.mean();
        if !(mean >= 1.0 && mean.is_finite()) {
            return bad(format!("mean length {mean} below 1"));
        }
        if let LengthDistribution::NegativeBinomial { shape: 0, .. } = self.length {
            return bad("negative binomial shape must be positive".into());
        }
        for (name, p) in [("copy", self.copy_probability), ("removal", self.removal_probability)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} probability {p} outside [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn sample_symbols(&self, length_scale: f64, rng: &mut SeededRng) -> Vec<ActivityClass> {
        let n = self.length.scaled(length_scale).sample(rng);
        let mut out = Vec::with_capacity(n);
        let mut state = rng.categorical(&self.initial);
        out.push(ActivityClass::ALL[state]);
        for _ in 1..n {
            state = rng.categorical(&self.transition[state]);
            out.push(ActivityClass::ALL[state]);
        }
        out
    }
}

/// The three default archetypes, indexed by [`BehaviorType::index`].
///
/// | archetype    | initial          | from c              | from p              | from s              | length       |
/// |--------------|------------------|---------------------|---------------------|---------------------|--------------|
/// | observation  | .10 .50 .40      | .10 .60 .30         | .02 .08 .90         | .02 .88 .10         | 22.62, r=100 |
/// | construction | .90 .05 .05      | .92 .05 .03         | .60 .30 .10         | .70 .10 .20         | 16, r=100    |
/// | full cycle   | .60 .25 .15      | .55 .40 .05         | .10 .40 .50         | .50 .15 .35         | 154.73, r=400 |
///
/// Lengths are close to Poisson so that short sessions of one type stay
/// comparable under edit distance; a wide spread lets length dominate it.
pub fn default_archetypes() -> [ArchetypeSpec; 3] {
    [
        ArchetypeSpec {
            behavior: BehaviorType::Observation,
            initial: [0.1, 0.5, 0.4],
            transition: [[0.1, 0.6, 0.3], [0.02, 0.08, 0.9], [0.02, 0.88, 0.1]],
            length: LengthDistribution::NegativeBinomial { mean: 22.62, shape: 100 },
            copy_probability: 0.9,
            removal_probability: 0.3,
        },
        ArchetypeSpec {
            behavior: BehaviorType::Construction,
            initial: [0.9, 0.05, 0.05],
            transition: [[0.92, 0.05, 0.03], [0.6, 0.3, 0.1], [0.7, 0.1, 0.2]],
            length: LengthDistribution::NegativeBinomial { mean: 16.0, shape: 100 },
            copy_probability: 0.1,
            removal_probability: 0.38,
        },
        ArchetypeSpec {
            behavior: BehaviorType::FullCycle,
            initial: [0.6, 0.25, 0.15],
            transition: [[0.55, 0.4, 0.05], [0.1, 0.4, 0.5], [0.5, 0.15, 0.35]],
            length: LengthDistribution::NegativeBinomial { mean: 154.73, shape: 400 },
            copy_probability: 0.3,
            removal_probability: 0.36,
        },
    ]
}

/// Stationary distribution of a 3-state chain by power iteration.
pub fn stationary_distribution(transition: &[[f64; 3]; 3]) -> [f64; 3] {
    let mut pi = [1.0 / 3.0; 3];
    for _ in 0..100_000 {
        let mut next = [0.0; 3];
        for (i, row) in transition.iter().enumerate() {
            for j in 0..3 {
                next[j] += pi[i] * row[j];
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let delta = (0..3).map(|j| (next[j] - pi[j]).abs()).fold(0.0, f64::max);
        pi = next;
        if delta < 1e-16 {
            break;
        }
    }
    pi
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngagementSpec {
    pub label: String,
    pub learners: usize,
    /// Mean models per learner (at least one each).
    pub models_per_learner: f64,
    /// Multiplies the extra length `mean - 1` of every archetype.
    pub length_scale: f64,
    /// Behavior mixture in [`BehaviorType::index`] order.
    pub mixture: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohortSpec {
    pub seed: u64,
    pub archetypes: [ArchetypeSpec; 3],
    pub groups: Vec<EngagementSpec>,
    /// Number of exemplar models that copies start from.
    pub exemplars: usize,
    pub start_timestamp: u64,
    /// Mean spacing of consecutive events of one learner.
    pub mean_gap_ms: f64,
}

/// 300 learners over four engagement groups, A most active.
pub fn default_cohort(seed: u64) -> CohortSpec {
    let group = |label: &str, learners, models_per_learner, mixture| EngagementSpec {
        label: label.to_string(),
        learners,
        models_per_learner,
        length_scale: 1.0,
        mixture,
    };
    CohortSpec {
        seed,
        archetypes: default_archetypes(),
        groups: vec![
            group("A", 30, 6.0, [0.4, 0.1, 0.5]),
            group("B", 45, 4.0, [0.45, 0.15, 0.4]),
            group("C", 105, 3.0, [0.45, 0.5, 0.05]),
            group("D", 120, 1.3, [0.55, 0.43, 0.02]),
        ],
        exemplars: 4,
        start_timestamp: 1_600_000_000_000,
        mean_gap_ms: 4_000.0,
    }
}

impl CohortSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        for (i, a) in self.archetypes.iter().enumerate() {
            if a.behavior.index() != i {
                return Err(SynthError::InvalidSpec(format!("archetype {i} is {}", a.behavior)));
            }
            a.validate()?;
        }
        for g in &self.groups {
            let bad = |what: &str| Err(SynthError::InvalidSpec(format!("group {}: {what}", g.label)));
            if g.mixture.iter().any(|&x| x < 0.0) || (g.mixture.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return bad("mixture must sum to 1");
            }
            if !(g.models_per_learner >= 1.0 && g.models_per_learner.is_finite()) {
                return bad("models_per_learner must be at least 1");
            }
            if !(g.length_scale > 0.0 && g.length_scale.is_finite()) {
                return bad("length_scale must be positive");
            }
        }
        if self.exemplars == 0 && self.archetypes.iter().any(|a| a.copy_probability > 0.0) {
            return Err(SynthError::InvalidSpec("copies need at least one exemplar".into()));
        }
        if !(self.mean_gap_ms >= 0.0 && self.mean_gap_ms.is_finite()) {
            return Err(SynthError::InvalidSpec("mean_gap_ms must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// (model id, planted behavior), generation order.
    pub models: Vec<(String, BehaviorType)>,
    /// (learner id, engagement group label).
    pub learners: Vec<(String, String)>,
}

impl GroundTruth {
    pub fn model_label(&self, model: &str) -> Option<BehaviorType> {
        self.models.iter().find(|(m, _)| m == model).map(|&(_, b)| b)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "entity_id,kind,label")?;
        for (id, b) in &self.models {
            writeln!(out, "{id},model,{b}")?;
        }
        for (id, g) in &self.learners {
            writeln!(out, "{id},learner,{g}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self, SynthError> {
        let mut truth = GroundTruth::default();
        for (i, line) in reader.lines().enumerate() {
            let bad = |reason: String| SynthError::BadTruth { line: i + 1, reason };
            let line = line.map_err(|e| bad(e.to_string()))?;
            if i == 0 || line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim_end().split(',').collect();
            let [id, kind, label] = fields[..] else {
                return Err(bad(format!("expected 3 fields, got {}", fields.len())));
            };
            match kind {
                "model" => truth.models.push((id.to_string(), label.parse().map_err(bad)?)),
                "learner" => truth.learners.push((id.to_string(), label.to_string())),
                other => return Err(bad(format!("unknown entity kind `{other}`"))),
            }
        }
        Ok(truth)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthOutput {
    /// Sorted by timestamp, then learner id.
    pub events: Vec<RawEvent>,
    pub models: Vec<ConceptualModel>,
    pub truth: GroundTruth,
}

const COMPONENT_CATEGORIES: [(&str, f64); 2] = [("biotic", 0.7), ("abiotic", 0.3)];
const RELATION_CATEGORIES: [(&str, f64); 5] = [
    ("consume", 0.6),
    ("produce", 0.2),
    ("destroy", 0.1),
    ("compete", 0.07),
    ("cooperate", 0.03),
];
const BIOTIC_NAMES: [&str; 8] = ["grass", "rabbit", "fox", "deer", "wolf", "algae", "fish", "bee"];
const ABIOTIC_NAMES: [&str; 4] = ["water", "sunlight", "soil", "fire"];
const PARAMETER_NAMES: [&str; 3] = ["initial_population", "lifespan", "reproduction_rate"];

/// A model under construction; every edit mirrors one emitted action.
struct ModelBuilder {
    model: ConceptualModel,
    prefix: char,
    next_id: usize,
    next_is_component: bool,
}

impl ModelBuilder {
    fn new(id: String, prefix: char, base: Option<&ConceptualModel>) -> Self {
        let mut model = base.cloned().unwrap_or_else(|| ConceptualModel {
            id: String::new(),
            components: Vec::new(),
            relationships: Vec::new(),
            parameters: BTreeMap::new(),
        });
        model.id = id;
        Self {
            model,
            prefix,
            next_id: 0,
            next_is_component: true,
        }
    }

    fn weighted(rng: &mut SeededRng, table: &[(&'static str, f64)]) -> &'static str {
        let w: Vec<f64> = table.iter().map(|t| t.1).collect();
        table[rng.categorical(&w)].0
    }

    fn add_component(&mut self, rng: &mut SeededRng) {
        let category = Self::weighted(rng, &COMPONENT_CATEGORIES);
        let names: &[&str] = if category == "biotic" { &BIOTIC_NAMES } else { &ABIOTIC_NAMES };
        let id = loop {
            let id = format!("{}{}", self.prefix, self.next_id);
            self.next_id += 1;
            if self.model.components.iter().all(|c| c.id != id) {
                break id;
            }
        };
        self.model.components.push(Component {
            id,
            category: category.to_string(),
            name: names[rng.below(names.len())].to_string(),
        });
    }

    fn add_relationship(&mut self, rng: &mut SeededRng) {
        let n = self.model.components.len();
        let a = rng.below(n);
        let b = (a + 1 + rng.below(n - 1)) % n;
        self.model.relationships.push(Relationship {
            source: self.model.components[a].id.clone(),
            target: self.model.components[b].id.clone(),
            category: Self::weighted(rng, &RELATION_CATEGORIES).to_string(),
        });
    }

    /// One construction step.
    fn construct(&mut self, removal_probability: f64, rng: &mut SeededRng) -> ActionKind {
        let isolated: Vec<usize> = (0..self.model.components.len())
            .filter(|&i| {
                let id = &self.model.components[i].id;
                self.model.relationships.iter().all(|r| &r.source != id && &r.target != id)
            })
            .collect();
        let has_relationships = !self.model.relationships.is_empty();
        if rng.bernoulli(removal_probability) && (has_relationships || !isolated.is_empty()) {
            if has_relationships && (isolated.is_empty() || rng.bernoulli(0.5)) {
                self.model.relationships.remove(rng.below(self.model.relationships.len()));
                return ActionKind::RemoveRelationship;
            }
            let removed = self.model.components.remove(isolated[rng.below(isolated.len())]);
            self.model.parameters.remove(&removed.id);
            return ActionKind::RemoveComponent;
        }
        let component = self.next_is_component || self.model.components.len() < 2;
        self.next_is_component = !component;
        if component {
            self.add_component(rng);
            ActionKind::AddComponent
        } else {
            self.add_relationship(rng);
            ActionKind::AddRelationship
        }
    }

    fn set_parameter(&mut self, rng: &mut SeededRng) {
        if self.model.components.is_empty() {
            return;
        }
        let target = self.model.components[rng.below(self.model.components.len())].id.clone();
        let name = PARAMETER_NAMES[rng.below(PARAMETER_NAMES.len())];
        let value = (1 + rng.below(100)) as f64;
        self.model
            .parameters
            .entry(target)
            .or_default()
            .insert(name.to_string(), value);
    }
}

fn exemplar_id(i: usize) -> String {
    format!("X{:02}", i + 1)
}

/// Starting points for copied models, 8 to 10 elements each.
fn exemplars(cohort: &CohortSpec) -> Vec<ConceptualModel> {
    let mut rng = SeededRng::stream(cohort.seed, 0);
    (0..cohort.exemplars)
        .map(|i| {
            let mut b = ModelBuilder::new(exemplar_id(i), 'x', None);
            let size = 8 + rng.below(3);
            for _ in 0..size {
                b.construct(0.0, &mut rng);
            }
            for _ in 0..3 {
                b.set_parameter(&mut rng);
            }
            b.model
        })
        .collect()
}

struct LearnerOutput {
    events: Vec<RawEvent>,
    models: Vec<ConceptualModel>,
    truth: Vec<(String, BehaviorType)>,
}

fn generate_learner(
    cohort: &CohortSpec,
    group: &EngagementSpec,
    learner_id: &str,
    index: usize,
    exemplars: &[ConceptualModel],
) -> LearnerOutput {
    let mut rng = SeededRng::stream(cohort.seed, index as u64 + 1);
    let n_models = 1 + rng.geometric_failures(1.0 / group.models_per_learner) as usize;
    let mut ts = cohort.start_timestamp + rng.below(30 * 24 * 3_600_000) as u64;
    let mut out = LearnerOutput {
        events: Vec::new(),
        models: Vec::new(),
        truth: Vec::new(),
    };
    let mut emit = |ts: &mut u64, rng: &mut SeededRng, model: &str, action, copied_from| {
        *ts += 1 + rng.exponential(cohort.mean_gap_ms).floor() as u64;
        out.events.push(RawEvent {
            timestamp: *ts,
            learner_id: learner_id.to_string(),
            model_id: model.to_string(),
            action,
            copied_from,
        });
    };
    for m in 0..n_models {
        let model_id = format!("{learner_id}-m{}", m + 1);
        let arch = &cohort.archetypes[rng.categorical(&group.mixture)];
        let base = (!exemplars.is_empty() && rng.bernoulli(arch.copy_probability))
            .then(|| &exemplars[rng.below(exemplars.len())]);
        match base {
            Some(x) => emit(&mut ts, &mut rng, &model_id, ActionKind::CopyModel, Some(x.id.clone())),
            None => emit(&mut ts, &mut rng, &model_id, ActionKind::CreateModel, None),
        }
        let mut builder = ModelBuilder::new(model_id.clone(), 'e', base);
        for symbol in arch.sample_symbols(group.length_scale, &mut rng) {
            let action = match symbol {
                ActivityClass::Construction => builder.construct(arch.removal_probability, &mut rng),
                ActivityClass::Parameterization => {
                    builder.set_parameter(&mut rng);
                    ActionKind::SetParameter
                }
                ActivityClass::Simulation => ActionKind::RunSimulation,
            };
            emit(&mut ts, &mut rng, &model_id, action, None);
        }
        out.models.push(builder.model);
        out.truth.push((model_id, arch.behavior));
    }
    out
}

/// Generates the cohort's log, model documents and ground truth.
pub fn generate(cohort: &CohortSpec) -> Result<SynthOutput, SynthError> {
    cohort.validate()?;
    let exemplars = exemplars(cohort);
    let mut jobs = Vec::new();
    for g in &cohort.groups {
        for _ in 0..g.learners {
            let index = jobs.len();
            jobs.push((g, format!("L{:04}", index + 1), index));
        }
    }
    let run = |(g, id, index): &(&EngagementSpec, String, usize)| generate_learner(cohort, g, id, *index, &exemplars);
    #[cfg(feature = "parallel")]
    let parts: Vec<LearnerOutput> = {
        use rayon::prelude::*;
        jobs.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<LearnerOutput> = jobs.iter().map(run).collect();

    let mut output = SynthOutput {
        events: Vec::new(),
        models: Vec::new(),
        truth: GroundTruth::default(),
    };
    for ((g, id, _), part) in jobs.iter().zip(parts) {
        output.events.extend(part.events);
        output.models.extend(part.models);
        output.truth.models.extend(part.truth);
        output.truth.learners.push((id.clone(), g.label.clone()));
    }
    // stable: per-learner order survives equal timestamps
    output
        .events
        .sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| a.learner_id.cmp(&b.learner_id)));
    Ok(output)
}

fn choose2(n: u64) -> f64 {
    (n * n.saturating_sub(1)) as f64 / 2.0
}

/// Adjusted Rand index of two labelings of the same items.
///
/// When both labelings are all-singletons or both a single cluster the
/// index is undefined (zero denominator); this returns 1.0 then.
pub fn adjusted_rand_index<A: Ord, B: Ord>(a: &[A], b: &[B]) -> Result<f64, SynthError> {
    if a.len() != b.len() {
        return Err(SynthError::LengthMismatch(a.len(), b.len()));
    }
    let mut table: BTreeMap<(&A, &B), u64> = BTreeMap::new();
    let mut rows: BTreeMap<&A, u64> = BTreeMap::new();
    let mut cols: BTreeMap<&B, u64> = BTreeMap::new();
    for (x, y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = table.values().map(|&n| choose2(n)).sum();
    let sum_a: f64 = rows.values().map(|&n| choose2(n)).sum();
    let sum_b: f64 = cols.values().map(|&n| choose2(n)).sum();
    let total = choose2(a.len() as u64);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = sum_a * sum_b / total;
    let max = (sum_a + sum_b) / 2.0;
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}
