use serde::{Deserialize, Serialize};

use super::levenshtein::DistanceMatrix;
use super::ClusterError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Single,
    Complete,
    /// UPGMA.
    #[default]
    Average,
}

impl std::str::FromStr for Linkage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            other => Err(format!("unknown linkage `{other}` (single, complete, average)")),
        }
    }
}

/// One agglomeration step. Leaves are nodes `0..n`; the cluster created
/// by step `t` is node `n + t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub n_leaves: usize,
    pub linkage: Linkage,
    pub merges: Vec<Merge>,
}

/// Bottom-up clustering with Lance-Williams updates.
///
/// Each cluster lives in the slot of its smallest leaf. Every step merges
/// the pair of slots `(i, j)`, `i < j`, with the smallest linkage value,
/// ties going to the lexicographically smallest `(i, j)`. Average linkage
/// tracks the sum of member distances instead of the mean so integer
/// distances merge without rounding drift.
pub fn agglomerate(matrix: &DistanceMatrix, linkage: Linkage) -> Result<Dendrogram, ClusterError> {
    let n = matrix.len();
    if n < 2 {
        return Err(ClusterError::TooFewItems(n));
    }
    let mut work = vec![0.0f64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = matrix.get(i, j);
            work[i * n + j] = d;
            work[j * n + i] = d;
        }
    }
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    let mut node = (0..n).collect::<Vec<_>>();

    let value = |work: &[f64], size: &[usize], i: usize, j: usize| -> f64 {
        let w = work[i * n + j];
        match linkage {
            Linkage::Average => w / (size[i] * size[j]) as f64,
            _ => w,
        }
    };
    // nearest active partner above each slot: (value, partner)
    let scan = |work: &[f64], size: &[usize], active: &[bool], i: usize| -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for j in i + 1..n {
            if !active[j] {
                continue;
            }
            let v = value(work, size, i, j);
            if best.is_none_or(|(bv, _)| v < bv) {
                best = Some((v, j));
            }
        }
        best
    };
    let mut nearest: Vec<Option<(f64, usize)>> = (0..n).map(|i| scan(&work, &size, &active, i)).collect();

    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        let mut pick: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            if let Some((v, j)) = nearest[i] {
                if pick.is_none_or(|(pv, _, _)| v < pv) {
                    pick = Some((v, i, j));
                }
            }
        }
        let (height, i, j) = pick.expect("at least two active clusters");

        merges.push(Merge {
            left: node[i],
            right: node[j],
            height,
            size: size[i] + size[j],
        });

        for k in 0..n {
            if !active[k] || k == i || k == j {
                continue;
            }
            let (a, b) = (work[i * n + k], work[j * n + k]);
            let merged = match linkage {
                Linkage::Single => a.min(b),
                Linkage::Complete => a.max(b),
                Linkage::Average => a + b,
            };
            work[i * n + k] = merged;
            work[k * n + i] = merged;
        }
        size[i] += size[j];
        active[j] = false;
        node[i] = n + step;
        nearest[j] = None;

        nearest[i] = scan(&work, &size, &active, i);
        for k in 0..j {
            if !active[k] || k == i {
                continue;
            }
            let partner = nearest[k].map(|(_, p)| p);
            if partner == Some(i) || partner == Some(j) {
                nearest[k] = scan(&work, &size, &active, k);
            } else if k < i {
                let v = value(&work, &size, k, i);
                if let Some((bv, bp)) = nearest[k] {
                    if v < bv || (v == bv && i < bp) {
                        nearest[k] = Some((v, i));
                    }
                } else {
                    nearest[k] = Some((v, i));
                }
            }
        }
    }

    Ok(Dendrogram {
        n_leaves: n,
        linkage,
        merges,
    })
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Flat clustering into `k` groups by undoing the last `k - 1` merges.
/// Labels are numbered by the smallest leaf of each cluster.
pub fn cut(dendrogram: &Dendrogram, k: usize) -> Result<Vec<usize>, ClusterError> {
    let n = dendrogram.n_leaves;
    if k < 1 || k > n {
        return Err(ClusterError::BadK { k, n });
    }
    let mut parent: Vec<usize> = (0..2 * n).collect();
    for (t, m) in dendrogram.merges.iter().take(n - k).enumerate() {
        let a = find(&mut parent, m.left);
        let b = find(&mut parent, m.right);
        parent[a] = n + t;
        parent[b] = n + t;
    }
    let mut label_of_root = std::collections::HashMap::new();
    let mut labels = Vec::with_capacity(n);
    for leaf in 0..n {
        let root = find(&mut parent, leaf);
        let next = label_of_root.len();
        labels.push(*label_of_root.entry(root).or_insert(next));
    }
    Ok(labels)
}

/// Cluster count in `2..=max_k` whose cut falls in the widest gap between
/// consecutive merge heights (smallest `k` on ties). Returns 1 for a
/// single leaf.
pub fn largest_gap_k(dendrogram: &Dendrogram, max_k: usize) -> usize {
    let n = dendrogram.n_leaves;
    if n < 2 {
        return 1;
    }
    let h: Vec<f64> = dendrogram.merges.iter().map(|m| m.height).collect();
    let mut best = (f64::NEG_INFINITY, 2usize);
    for k in 2..=max_k.min(n) {
        // k clusters: merges n-k.. are undone
        let gap = h[n - k] - if n - k >= 1 { h[n - k - 1] } else { 0.0 };
        if gap > best.0 {
            best = (gap, k);
        }
    }
    best.1
}

/// Leaves in left-to-right drawing order.
pub fn leaf_order(dendrogram: &Dendrogram) -> Vec<usize> {
    let n = dendrogram.n_leaves;
    if n == 0 {
        return Vec::new();
    }
    if dendrogram.merges.is_empty() {
        return (0..n).collect();
    }
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![n + dendrogram.merges.len() - 1];
    while let Some(node) = stack.pop() {
        if node < n {
            order.push(node);
        } else {
            let m = &dendrogram.merges[node - n];
            stack.push(m.right);
            stack.push(m.left);
        }
    }
    order
}
