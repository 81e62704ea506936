//! Behavior types from activity sequences.
//!
//! Within each length stratum sequences are compared by Levenshtein
//! distance and clustered agglomeratively; the stratum clusters are then
//! merged across strata in profile space and each merged cluster is
//! labeled with a [`BehaviorType`].

mod behavior;
mod hierarchy;
mod levenshtein;

pub use behavior::{
    label_behavior, merge_groups, profile, profile_vectors, ActivityProfile, BehaviorType, LabelThresholds,
};
pub use hierarchy::{agglomerate, cut, largest_gap_k, leaf_order, Dendrogram, Linkage, Merge};
pub use levenshtein::{distance_matrix, levenshtein, DistanceMatrix};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::ActivityClass;

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("agglomeration needs at least 2 items, got {0}")]
    TooFewItems(usize),
    #[error("cannot cut {n} leaves into {k} clusters")]
    BadK { k: usize, n: usize },
    #[error("cluster has no members")]
    EmptyCluster,
    #[error("{have} clusters cannot be merged into {target}")]
    TooFewClusters { have: usize, target: usize },
    #[error("{given} per-stratum cluster counts given for {groups} strata")]
    CountMismatch { given: usize, groups: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterCountRule {
    /// Fixed cluster count per stratum (clamped to the stratum size).
    Fixed(Vec<usize>),
    /// Cut each dendrogram in its widest height gap, at most `max_k` clusters.
    LargestGap { max_k: usize },
}

impl Default for ClusterCountRule {
    fn default() -> Self {
        ClusterCountRule::Fixed(vec![2, 2, 3])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehaviorConfig {
    pub linkage: Linkage,
    pub counts: ClusterCountRule,
    pub merge_target: usize,
    pub thresholds: LabelThresholds,
}

impl Default for BehaviorConfig {
    fn default() -> Self {
        Self {
            linkage: Linkage::Average,
            counts: ClusterCountRule::default(),
            merge_target: 3,
            thresholds: LabelThresholds::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupClustering {
    pub group: usize,
    /// Indices into the input sequence list, ascending.
    pub members: Vec<usize>,
    pub dendrogram: Option<Dendrogram>,
    pub k: usize,
    /// Stratum-local cluster label per member.
    pub labels: Vec<usize>,
    pub profiles: Vec<ActivityProfile>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceAssignment {
    pub group: usize,
    pub local_cluster: usize,
    pub merged_cluster: usize,
    pub behavior: BehaviorType,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehaviorClustering {
    pub groups: Vec<GroupClustering>,
    /// `(group, local cluster)` for every stratum cluster, in merge input order.
    pub stratum_clusters: Vec<(usize, usize)>,
    /// Merged cluster of each entry of `stratum_clusters`.
    pub merged_of: Vec<usize>,
    pub merged_profiles: Vec<ActivityProfile>,
    pub merged_types: Vec<BehaviorType>,
    /// Per input sequence; `None` for sequences outside every stratum.
    pub assignment: Vec<Option<SequenceAssignment>>,
}

/// Clusters every stratum, merges the stratum clusters and labels them.
/// `group_of[i]` is the stratum of sequence `i` (`None` = excluded).
pub fn cluster_behaviors<S: AsRef<[ActivityClass]> + Sync>(
    sequences: &[S],
    group_of: &[Option<usize>],
    n_groups: usize,
    config: &BehaviorConfig,
) -> Result<BehaviorClustering, ClusterError> {
    if let ClusterCountRule::Fixed(ks) = &config.counts {
        if ks.len() != n_groups {
            return Err(ClusterError::CountMismatch {
                given: ks.len(),
                groups: n_groups,
            });
        }
    }
    let mut groups = Vec::with_capacity(n_groups);
    let mut stratum_clusters = Vec::new();
    let mut stratum_profiles = Vec::new();
    for g in 0..n_groups {
        let members: Vec<usize> = (0..sequences.len()).filter(|&i| group_of[i] == Some(g)).collect();
        let seqs: Vec<&[ActivityClass]> = members.iter().map(|&i| sequences[i].as_ref()).collect();
        let (dendrogram, k, labels) = match members.len() {
            0 => (None, 0, Vec::new()),
            1 => (None, 1, vec![0]),
            n => {
                let matrix = distance_matrix(&seqs);
                let d = agglomerate(&matrix, config.linkage)?;
                let k = match &config.counts {
                    ClusterCountRule::Fixed(ks) => ks[g].clamp(1, n),
                    ClusterCountRule::LargestGap { max_k } => largest_gap_k(&d, *max_k),
                };
                let labels = cut(&d, k)?;
                (Some(d), k, labels)
            }
        };
        let mut profiles = Vec::with_capacity(k);
        for c in 0..k {
            let cluster: Vec<&[ActivityClass]> = labels
                .iter()
                .zip(&seqs)
                .filter(|(&l, _)| l == c)
                .map(|(_, s)| *s)
                .collect();
            let p = profile(&cluster)?;
            stratum_clusters.push((g, c));
            stratum_profiles.push(p.clone());
            profiles.push(p);
        }
        groups.push(GroupClustering {
            group: g,
            members,
            dendrogram,
            k,
            labels,
            profiles,
        });
    }

    let merged_of = merge_groups(&stratum_profiles, config.merge_target)?;
    let n_merged = config.merge_target;
    let mut assignment = vec![None; sequences.len()];
    let mut pooled: Vec<Vec<&[ActivityClass]>> = vec![Vec::new(); n_merged];
    for gc in &groups {
        for (&i, &local) in gc.members.iter().zip(&gc.labels) {
            let idx = stratum_clusters
                .iter()
                .position(|&(g, c)| g == gc.group && c == local)
                .expect("stratum cluster registered");
            let merged = merged_of[idx];
            pooled[merged].push(sequences[i].as_ref());
            assignment[i] = Some((gc.group, local, merged));
        }
    }
    let merged_profiles = pooled.iter().map(|m| profile(m)).collect::<Result<Vec<_>, _>>()?;
    let merged_types: Vec<BehaviorType> = merged_profiles
        .iter()
        .map(|p| label_behavior(p, &config.thresholds))
        .collect();
    let assignment = assignment
        .into_iter()
        .map(|a| {
            a.map(|(group, local_cluster, merged_cluster)| SequenceAssignment {
                group,
                local_cluster,
                merged_cluster,
                behavior: merged_types[merged_cluster],
            })
        })
        .collect();

    Ok(BehaviorClustering {
        groups,
        stratum_clusters,
        merged_of,
        merged_profiles,
        merged_types,
        assignment,
    })
}
