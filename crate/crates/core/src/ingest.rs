//! Event-log ingestion.
//!
//! A log is a sequence of [`RawEvent`]s. Six of the eight action kinds
//! are activities and map onto the three [`ActivityClass`]es; the two
//! lifecycle kinds (`create_model`, `copy_model`) only mark where a model
//! came from. [`build_sequences`] groups activities per (learner, model)
//! pair into [`ActivitySequence`]s and keeps a [`ModelRecord`] for every
//! model, including those that never received an activity.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("line {line}: unknown action kind `{token}`")]
    UnknownActionKind { line: usize, token: String },
    #[error("event log contains no records")]
    EmptyLog,
    #[error("no sequences to summarize")]
    EmptyCollection,
    #[error("reading event log: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    CreateModel,
    CopyModel,
    AddComponent,
    RemoveComponent,
    AddRelationship,
    RemoveRelationship,
    SetParameter,
    RunSimulation,
}

impl ActionKind {
    pub const ALL: [ActionKind; 8] = [
        ActionKind::CreateModel,
        ActionKind::CopyModel,
        ActionKind::AddComponent,
        ActionKind::RemoveComponent,
        ActionKind::AddRelationship,
        ActionKind::RemoveRelationship,
        ActionKind::SetParameter,
        ActionKind::RunSimulation,
    ];

    pub fn token(self) -> &'static str {
        match self {
            ActionKind::CreateModel => "create_model",
            ActionKind::CopyModel => "copy_model",
            ActionKind::AddComponent => "add_component",
            ActionKind::RemoveComponent => "remove_component",
            ActionKind::AddRelationship => "add_relationship",
            ActionKind::RemoveRelationship => "remove_relationship",
            ActionKind::SetParameter => "set_parameter",
            ActionKind::RunSimulation => "run_simulation",
        }
    }

    pub fn is_lifecycle(self) -> bool {
        matches!(self, ActionKind::CreateModel | ActionKind::CopyModel)
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for ActionKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        ActionKind::ALL
            .into_iter()
            .find(|k| k.token() == s)
            .ok_or(())
    }
}

/// The three-symbol activity alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActivityClass {
    Construction,
    Parameterization,
    Simulation,
}

impl ActivityClass {
    pub const ALL: [ActivityClass; 3] = [
        ActivityClass::Construction,
        ActivityClass::Parameterization,
        ActivityClass::Simulation,
    ];

    pub fn symbol(self) -> char {
        match self {
            ActivityClass::Construction => 'c',
            ActivityClass::Parameterization => 'p',
            ActivityClass::Simulation => 's',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'c' => Some(ActivityClass::Construction),
            'p' => Some(ActivityClass::Parameterization),
            's' => Some(ActivityClass::Simulation),
            _ => None,
        }
    }

    /// Column index (0, 1, 2) used by per-model frequency rows.
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Maps an action onto its activity class. Lifecycle actions have none.
pub fn classify_action(kind: ActionKind) -> Option<ActivityClass> {
    match kind {
        ActionKind::AddComponent
        | ActionKind::RemoveComponent
        | ActionKind::AddRelationship
        | ActionKind::RemoveRelationship => Some(ActivityClass::Construction),
        ActionKind::SetParameter => Some(ActivityClass::Parameterization),
        ActionKind::RunSimulation => Some(ActivityClass::Simulation),
        ActionKind::CreateModel | ActionKind::CopyModel => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawEvent {
    pub timestamp: u64,
    pub learner_id: String,
    pub model_id: String,
    pub action: ActionKind,
    /// Source model; present exactly for `copy_model`.
    pub copied_from: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogFormat {
    /// Tab-separated: timestamp_ms, learner_id, model_id, action_kind, copied_from.
    #[default]
    Tsv,
    /// One JSON object per line with keys ts, learner, model, action, copied_from.
    Jsonl,
}

impl FromStr for LogFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tsv" => Ok(LogFormat::Tsv),
            "jsonl" | "json" => Ok(LogFormat::Jsonl),
            other => Err(format!("unknown log format `{other}` (expected tsv or jsonl)")),
        }
    }
}

/// Parses a whole log. Blank lines and lines starting with `#` are skipped.
pub fn parse_event_log<R: BufRead>(reader: R, format: LogFormat) -> Result<Vec<RawEvent>, IngestError> {
    let mut events = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let event = match format {
            LogFormat::Tsv => parse_tsv_line(trimmed, line_no)?,
            LogFormat::Jsonl => parse_json_line(trimmed, line_no)?,
        };
        events.push(event);
    }
    if events.is_empty() {
        return Err(IngestError::EmptyLog);
    }
    Ok(events)
}

pub fn parse_event_str(text: &str, format: LogFormat) -> Result<Vec<RawEvent>, IngestError> {
    parse_event_log(text.as_bytes(), format)
}

fn malformed(line: usize, reason: impl Into<String>) -> IngestError {
    IngestError::MalformedRecord {
        line,
        reason: reason.into(),
    }
}

fn parse_tsv_line(line: &str, line_no: usize) -> Result<RawEvent, IngestError> {
    let fields: Vec<&str> = line.split('\t').collect();
    if !(4..=5).contains(&fields.len()) {
        return Err(malformed(
            line_no,
            format!("expected 4 or 5 tab-separated fields, found {}", fields.len()),
        ));
    }
    let timestamp = fields[0]
        .trim()
        .parse::<u64>()
        .map_err(|_| malformed(line_no, format!("bad timestamp `{}`", fields[0])))?;
    let copied = fields.get(4).map(|s| s.trim()).filter(|s| !s.is_empty());
    finish_event(
        line_no,
        timestamp,
        fields[1].trim(),
        fields[2].trim(),
        fields[3].trim(),
        copied.map(str::to_string),
    )
}

fn json_id(value: Option<&serde_json::Value>) -> Option<String> {
    match value? {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn parse_json_line(line: &str, line_no: usize) -> Result<RawEvent, IngestError> {
    let value: serde_json::Value =
        serde_json::from_str(line).map_err(|e| malformed(line_no, e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| malformed(line_no, "record is not an object"))?;
    let timestamp = obj
        .get("ts")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| malformed(line_no, "missing or invalid `ts`"))?;
    let learner = json_id(obj.get("learner")).ok_or_else(|| malformed(line_no, "missing `learner`"))?;
    let model = json_id(obj.get("model")).ok_or_else(|| malformed(line_no, "missing `model`"))?;
    let action = obj
        .get("action")
        .and_then(serde_json::Value::as_str)
        .ok_or_else(|| malformed(line_no, "missing `action`"))?;
    let copied = match obj.get("copied_from") {
        None | Some(serde_json::Value::Null) => None,
        Some(v) => {
            let id = json_id(Some(v)).ok_or_else(|| malformed(line_no, "invalid `copied_from`"))?;
            Some(id).filter(|s| !s.is_empty())
        }
    };
    finish_event(line_no, timestamp, &learner, &model, action, copied)
}

fn finish_event(
    line_no: usize,
    timestamp: u64,
    learner: &str,
    model: &str,
    action: &str,
    copied_from: Option<String>,
) -> Result<RawEvent, IngestError> {
    if learner.is_empty() {
        return Err(malformed(line_no, "empty learner_id"));
    }
    if model.is_empty() {
        return Err(malformed(line_no, "empty model_id"));
    }
    let action: ActionKind = action.parse().map_err(|_| IngestError::UnknownActionKind {
        line: line_no,
        token: action.to_string(),
    })?;
    match (action, &copied_from) {
        (ActionKind::CopyModel, None) => {
            return Err(malformed(line_no, "copy_model requires copied_from"));
        }
        (a, Some(_)) if a != ActionKind::CopyModel => {
            return Err(malformed(line_no, format!("copied_from given for {a}")));
        }
        _ => {}
    }
    Ok(RawEvent {
        timestamp,
        learner_id: learner.to_string(),
        model_id: model.to_string(),
        action,
        copied_from,
    })
}

pub const TSV_HEADER: &str = "#timestamp_ms\tlearner_id\tmodel_id\taction_kind\tcopied_from";

pub fn write_event_log<W: Write>(events: &[RawEvent], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{TSV_HEADER}")?;
    for e in events {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            e.timestamp,
            e.learner_id,
            e.model_id,
            e.action,
            e.copied_from.as_deref().unwrap_or("")
        )?;
    }
    Ok(())
}

/// Writes `events` in either log format.
pub fn write_event_log_as<W: Write>(events: &[RawEvent], format: LogFormat, mut out: W) -> std::io::Result<()> {
    match format {
        LogFormat::Tsv => write_event_log(events, out),
        LogFormat::Jsonl => {
            for e in events {
                let line = serde_json::json!({
                    "ts": e.timestamp,
                    "learner": e.learner_id,
                    "model": e.model_id,
                    "action": e.action.token(),
                    "copied_from": e.copied_from,
                });
                writeln!(out, "{line}")?;
            }
            Ok(())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActivitySequence {
    pub learner_id: String,
    pub model_id: String,
    pub is_copied: bool,
    pub symbols: Vec<ActivityClass>,
}

impl ActivitySequence {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol_string(&self) -> String {
        symbols_to_string(&self.symbols)
    }
}

pub fn symbols_to_string(symbols: &[ActivityClass]) -> String {
    symbols.iter().map(|s| s.symbol()).collect()
}

/// Parses a `c`/`p`/`s` string; `None` on any other character.
pub fn symbols_from_str(s: &str) -> Option<Vec<ActivityClass>> {
    s.chars().map(ActivityClass::from_symbol).collect()
}

/// Every model seen in the log, with or without activities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub learner_id: String,
    pub model_id: String,
    pub is_copied: bool,
    /// Timestamp of the first event of any kind touching the model.
    pub first_timestamp: u64,
    /// Activity counts indexed by [`ActivityClass::index`].
    pub counts: [u64; 3],
}

#[derive(Clone, Debug, Default)]
pub struct SequenceBuild {
    /// Sorted by (learner_id, model_id).
    pub sequences: Vec<ActivitySequence>,
    /// Sorted by (learner_id, model_id); includes zero-activity models.
    pub models: Vec<ModelRecord>,
    /// (learner, model) pairs with no classifiable event.
    pub omitted_pairs: usize,
}

/// Groups events into one sequence per (learner, model) pair.
///
/// Symbols are ordered by timestamp with input position breaking ties, so
/// unordered exports are accepted as-is.
pub fn build_sequences(events: &[RawEvent]) -> SequenceBuild {
    struct Acc {
        is_copied: bool,
        first_timestamp: u64,
        activities: Vec<(u64, usize, ActivityClass)>,
    }

    let mut by_pair: BTreeMap<(&str, &str), Acc> = BTreeMap::new();
    for (pos, e) in events.iter().enumerate() {
        let acc = by_pair
            .entry((e.learner_id.as_str(), e.model_id.as_str()))
            .or_insert(Acc {
                is_copied: false,
                first_timestamp: e.timestamp,
                activities: Vec::new(),
            });
        acc.first_timestamp = acc.first_timestamp.min(e.timestamp);
        if e.action == ActionKind::CopyModel {
            acc.is_copied = true;
        }
        if let Some(class) = classify_action(e.action) {
            acc.activities.push((e.timestamp, pos, class));
        }
    }

    let mut build = SequenceBuild::default();
    for ((learner, model), mut acc) in by_pair {
        acc.activities.sort_by_key(|&(ts, pos, _)| (ts, pos));
        let mut counts = [0u64; 3];
        for &(_, _, class) in &acc.activities {
            counts[class.index()] += 1;
        }
        build.models.push(ModelRecord {
            learner_id: learner.to_string(),
            model_id: model.to_string(),
            is_copied: acc.is_copied,
            first_timestamp: acc.first_timestamp,
            counts,
        });
        if acc.activities.is_empty() {
            build.omitted_pairs += 1;
            continue;
        }
        build.sequences.push(ActivitySequence {
            learner_id: learner.to_string(),
            model_id: model.to_string(),
            is_copied: acc.is_copied,
            symbols: acc.activities.into_iter().map(|(_, _, c)| c).collect(),
        });
    }
    build
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceSummary {
    pub count: usize,
    pub mean_length: f64,
    pub median_length: f64,
    pub min_length: usize,
    pub max_length: usize,
}

pub fn sequence_stats(lengths: &[usize]) -> Result<SequenceSummary, IngestError> {
    if lengths.is_empty() {
        return Err(IngestError::EmptyCollection);
    }
    let mut sorted = lengths.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
    };
    Ok(SequenceSummary {
        count: n,
        mean_length: sorted.iter().sum::<usize>() as f64 / n as f64,
        median_length: median,
        min_length: sorted[0],
        max_length: sorted[n - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(ts: u64, model: &str, action: ActionKind) -> RawEvent {
        RawEvent {
            timestamp: ts,
            learner_id: "L1".into(),
            model_id: model.into(),
            action,
            copied_from: None,
        }
    }

    #[test]
    fn empty_stream_is_empty_log() {
        assert!(matches!(parse_event_str("", LogFormat::Tsv), Err(IngestError::EmptyLog)));
        assert!(matches!(
            parse_event_str("#header only\n\n", LogFormat::Tsv),
            Err(IngestError::EmptyLog)
        ));
    }

    #[test]
    fn single_add_component_record() {
        let events = parse_event_str("10\tL1\tM1\tadd_component\t\n", LogFormat::Tsv).unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(classify_action(events[0].action), Some(ActivityClass::Construction));
    }

    #[test]
    fn unknown_action_reports_line() {
        let text = "#h\n1\tL\tM\tadd_component\n2\tL\tM\tfly\n";
        match parse_event_str(text, LogFormat::Tsv) {
            Err(IngestError::UnknownActionKind { line, token }) => {
                assert_eq!(line, 3);
                assert_eq!(token, "fly");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_records() {
        for bad in [
            "x\tL\tM\tadd_component",
            "-5\tL\tM\tadd_component",
            "1\tL\tM",
            "1\t\tM\tadd_component",
            "1\tL\tM\tcopy_model\t",
            "1\tL\tM\tadd_component\tM0",
        ] {
            assert!(
                matches!(parse_event_str(bad, LogFormat::Tsv), Err(IngestError::MalformedRecord { line: 1, .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn jsonl_reader_matches_tsv() {
        let tsv = "5\tL1\tM2\tcopy_model\tM0\n6\tL1\tM2\tset_parameter\t\n";
        let jsonl = "{\"ts\":5,\"learner\":\"L1\",\"model\":\"M2\",\"action\":\"copy_model\",\"copied_from\":\"M0\"}\n\
                     {\"ts\":6,\"learner\":\"L1\",\"model\":\"M2\",\"action\":\"set_parameter\",\"copied_from\":null}\n";
        assert_eq!(
            parse_event_str(tsv, LogFormat::Tsv).unwrap(),
            parse_event_str(jsonl, LogFormat::Jsonl).unwrap()
        );
        assert!(matches!(
            parse_event_str("{\"ts\":1}", LogFormat::Jsonl),
            Err(IngestError::MalformedRecord { .. })
        ));
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_action(ActionKind::AddRelationship), Some(ActivityClass::Construction));
        assert_eq!(classify_action(ActionKind::SetParameter), Some(ActivityClass::Parameterization));
        assert_eq!(classify_action(ActionKind::CopyModel), None);
        let activity: Vec<_> = ActionKind::ALL.into_iter().filter_map(classify_action).collect();
        assert_eq!(activity.len(), 6);
        for class in ActivityClass::ALL {
            assert!(activity.contains(&class));
        }
    }

    #[test]
    fn ccs_sequence() {
        use ActionKind::*;
        let b = build_sequences(&[
            ev(1, "M", AddComponent),
            ev(2, "M", AddComponent),
            ev(3, "M", RunSimulation),
        ]);
        assert_eq!(b.sequences.len(), 1);
        assert_eq!(b.sequences[0].symbol_string(), "ccs");
    }

    #[test]
    fn ps_sequence_and_tie_break() {
        use ActionKind::*;
        // equal timestamps keep input order
        let b = build_sequences(&[ev(5, "M", SetParameter), ev(5, "M", RunSimulation)]);
        assert_eq!(b.sequences[0].symbol_string(), "ps");
        let b = build_sequences(&[ev(9, "M", RunSimulation), ev(2, "M", SetParameter)]);
        assert_eq!(b.sequences[0].symbol_string(), "ps");
    }

    #[test]
    fn lifecycle_only_model_is_omitted_but_recorded() {
        let b = build_sequences(&[ev(1, "M", ActionKind::CreateModel)]);
        assert!(b.sequences.is_empty());
        assert_eq!(b.omitted_pairs, 1);
        assert_eq!(b.models.len(), 1);
        assert_eq!(b.models[0].counts, [0, 0, 0]);
    }

    #[test]
    fn copied_flag() {
        let mut copy = ev(1, "M", ActionKind::CopyModel);
        copy.copied_from = Some("X".into());
        let b = build_sequences(&[copy, ev(2, "M", ActionKind::RunSimulation), ev(3, "N", ActionKind::SetParameter)]);
        assert!(b.sequences[0].is_copied);
        assert!(!b.sequences[1].is_copied);
    }

    #[test]
    fn stats_examples() {
        let s = sequence_stats(&[3]).unwrap();
        assert_eq!((s.mean_length, s.median_length, s.min_length, s.max_length), (3.0, 3.0, 3, 3));
        assert_eq!(sequence_stats(&[1, 2, 3, 4]).unwrap().median_length, 2.5);
        let s = sequence_stats(&[1, 15, 1605]).unwrap();
        assert!((s.mean_length - 1621.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.median_length, 15.0);
        assert!(matches!(sequence_stats(&[]), Err(IngestError::EmptyCollection)));
    }
}
