use serde::{Deserialize, Serialize};

use super::hierarchy::{agglomerate, cut, Linkage};
use super::levenshtein::DistanceMatrix;
use super::ClusterError;
use crate::ingest::ActivityClass;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActivityProfile {
    /// Pooled symbol fractions in `c, p, s` order.
    pub frac: [f64; 3],
    pub mean_length: f64,
    pub count: usize,
}

impl ActivityProfile {
    pub fn frac_c(&self) -> f64 {
        self.frac[0]
    }
    pub fn frac_p(&self) -> f64 {
        self.frac[1]
    }
    pub fn frac_s(&self) -> f64 {
        self.frac[2]
    }
}

/// Pools the symbols of all members; fractions are not per-member averages.
pub fn profile<S: AsRef<[ActivityClass]>>(members: &[S]) -> Result<ActivityProfile, ClusterError> {
    let mut counts = [0usize; 3];
    for m in members {
        for s in m.as_ref() {
            counts[s.index()] += 1;
        }
    }
    let total: usize = counts.iter().sum();
    if members.is_empty() || total == 0 {
        return Err(ClusterError::EmptyCluster);
    }
    Ok(ActivityProfile {
        frac: counts.map(|c| c as f64 / total as f64),
        mean_length: total as f64 / members.len() as f64,
        count: members.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviorType {
    /// Type 1: parameter tweaking and simulation, little construction.
    Observation,
    /// Type 2: construction with little simulation.
    Construction,
    /// Type 3: the construct, parameterize, simulate cycle.
    FullCycle,
}

impl BehaviorType {
    pub const ALL: [BehaviorType; 3] = [
        BehaviorType::Observation,
        BehaviorType::Construction,
        BehaviorType::FullCycle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BehaviorType::Observation => "observation",
            BehaviorType::Construction => "construction",
            BehaviorType::FullCycle => "full_cycle",
        }
    }

    pub fn type_number(self) -> u8 {
        self as u8 + 1
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl std::fmt::Display for BehaviorType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BehaviorType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        BehaviorType::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown behavior type `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelThresholds {
    /// Construction when `frac_c >= construction_min_c`.
    pub construction_min_c: f64,
    /// Observation when `frac_p + frac_s >= observation_min_ps` ...
    pub observation_min_ps: f64,
    /// ... and `frac_c < observation_max_c`.
    pub observation_max_c: f64,
}

impl Default for LabelThresholds {
    fn default() -> Self {
        Self {
            construction_min_c: 0.6,
            observation_min_ps: 0.7,
            observation_max_c: 0.3,
        }
    }
}

pub fn label_behavior(profile: &ActivityProfile, t: &LabelThresholds) -> BehaviorType {
    if profile.frac_c() >= t.construction_min_c {
        BehaviorType::Construction
    } else if profile.frac_p() + profile.frac_s() >= t.observation_min_ps && profile.frac_c() < t.observation_max_c {
        BehaviorType::Observation
    } else {
        BehaviorType::FullCycle
    }
}

/// Point in profile space: the three fractions plus `ln(mean_length)`
/// scaled by the largest log mean length among the profiles.
pub fn profile_vectors(profiles: &[ActivityProfile]) -> Vec<[f64; 4]> {
    let max_log = profiles
        .iter()
        .map(|p| p.mean_length.ln())
        .fold(0.0f64, f64::max);
    profiles
        .iter()
        .map(|p| {
            let len = if max_log > 0.0 { p.mean_length.ln() / max_log } else { 0.0 };
            [p.frac[0], p.frac[1], p.frac[2], len]
        })
        .collect()
}

/// Merges per-stratum clusters into `target` clusters by average-linkage
/// agglomeration of their profile vectors (Euclidean distance). Returns
/// the merged cluster index of every input profile.
pub fn merge_groups(profiles: &[ActivityProfile], target: usize) -> Result<Vec<usize>, ClusterError> {
    if target == 0 || profiles.len() < target {
        return Err(ClusterError::TooFewClusters {
            have: profiles.len(),
            target,
        });
    }
    if profiles.len() == 1 {
        return Ok(vec![0]);
    }
    let v = profile_vectors(profiles);
    let matrix = DistanceMatrix::from_fn(v.len(), |i, j| {
        v[i].iter().zip(&v[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    });
    let dendrogram = agglomerate(&matrix, Linkage::Average)?;
    cut(&dendrogram, target)
}
