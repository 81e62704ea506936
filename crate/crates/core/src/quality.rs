//! Conceptual models and their quality proxies.
//!
//! Complexity counts components plus relationships; variety counts the
//! distinct category tokens used by either.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QualityError {
    #[error("{source_name}: schema error: {message}")]
    SchemaError { source_name: String, message: String },
    #[error("model `{model}`: relationship {index} references unknown component `{id}`")]
    DanglingEndpoint { model: String, index: usize, id: String },
    #[error("model `{model}`: duplicate component id `{id}`")]
    DuplicateComponentId { model: String, id: String },
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub id: String,
    pub category: String,
    #[serde(default)]
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relationship {
    pub source: String,
    pub target: String,
    pub category: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConceptualModel {
    pub id: String,
    #[serde(default)]
    pub components: Vec<Component>,
    #[serde(default)]
    pub relationships: Vec<Relationship>,
    /// Element id -> parameter name -> value. Carried, never scored.
    #[serde(default)]
    pub parameters: BTreeMap<String, BTreeMap<String, f64>>,
}

impl ConceptualModel {
    pub fn validate(&self) -> Result<(), QualityError> {
        let mut ids = HashSet::new();
        for c in &self.components {
            if !ids.insert(c.id.as_str()) {
                return Err(QualityError::DuplicateComponentId {
                    model: self.id.clone(),
                    id: c.id.clone(),
                });
            }
        }
        for (index, r) in self.relationships.iter().enumerate() {
            for end in [&r.source, &r.target] {
                if !ids.contains(end.as_str()) {
                    return Err(QualityError::DanglingEndpoint {
                        model: self.id.clone(),
                        index,
                        id: end.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ModelDocument {
    Many(Vec<ConceptualModel>),
    One(ConceptualModel),
}

/// Parses a document holding one model object or a list of them.
pub fn parse_models(text: &str, source_name: &str) -> Result<Vec<ConceptualModel>, QualityError> {
    let doc: ModelDocument = serde_json::from_str(text).map_err(|e| QualityError::SchemaError {
        source_name: source_name.to_string(),
        message: e.to_string(),
    })?;
    let models = match doc {
        ModelDocument::Many(v) => v,
        ModelDocument::One(m) => vec![m],
    };
    for m in &models {
        m.validate()?;
    }
    Ok(models)
}

pub fn parse_model(text: &str) -> Result<ConceptualModel, QualityError> {
    let m: ConceptualModel = serde_json::from_str(text).map_err(|e| QualityError::SchemaError {
        source_name: "<model>".to_string(),
        message: e.to_string(),
    })?;
    m.validate()?;
    Ok(m)
}

/// Loads a model file, or every `*.json` file of a directory in name order.
pub fn read_models(path: &Path) -> Result<Vec<ConceptualModel>, QualityError> {
    let io = |e| QualityError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let mut files = Vec::new();
    if path.is_dir() {
        for entry in std::fs::read_dir(path).map_err(io)? {
            let p = entry.map_err(io)?.path();
            if p.extension().is_some_and(|e| e == "json") {
                files.push(p);
            }
        }
        files.sort();
    } else {
        files.push(path.to_path_buf());
    }
    let mut out = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(&f).map_err(|e| QualityError::Io {
            path: f.display().to_string(),
            source: e,
        })?;
        out.extend(parse_models(&text, &f.display().to_string())?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualityMetrics {
    pub complexity: usize,
    pub variety: usize,
}

pub fn complexity(model: &ConceptualModel) -> usize {
    model.components.len() + model.relationships.len()
}

/// Distinct category tokens over components and relationships pooled.
pub fn variety(model: &ConceptualModel) -> usize {
    model
        .components
        .iter()
        .map(|c| c.category.as_str())
        .chain(model.relationships.iter().map(|r| r.category.as_str()))
        .collect::<BTreeSet<_>>()
        .len()
}

/// Distinct (component, relationship) category counts.
pub fn split_variety(model: &ConceptualModel) -> (usize, usize) {
    let comps: BTreeSet<&str> = model.components.iter().map(|c| c.category.as_str()).collect();
    let rels: BTreeSet<&str> = model.relationships.iter().map(|r| r.category.as_str()).collect();
    (comps.len(), rels.len())
}

pub fn score(model: &ConceptualModel) -> QualityMetrics {
    QualityMetrics {
        complexity: complexity(model),
        variety: variety(model),
    }
}
