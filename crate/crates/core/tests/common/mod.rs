//! Reference implementations used as oracles by the integration tests.
//! None of these share code with the library; they are deliberately
//! naive.
#![allow(dead_code, clippy::needless_range_loop)]

pub mod tails;

use std::collections::{HashMap, VecDeque};

use learntrace::rng::SeededRng;
use learntrace::seqclust::{Linkage, Merge};

/// Every string over `0..alphabet` of length at most `max_len`, shortest
/// first.
pub fn all_strings(alphabet: u8, max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &layer {
            for a in 0..alphabet {
                let mut t = s.clone();
                t.push(a);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Edit distances by breadth-first search over single-symbol edits.
///
/// Nodes are all strings up to `max_len`; an optimal edit script never
/// needs an intermediate string longer than both ends, so distances are
/// exact for any pair inside the space.
pub struct EditGraph {
    strings: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    adjacent: Vec<Vec<usize>>,
}

impl EditGraph {
    pub fn new(alphabet: u8, max_len: usize) -> Self {
        let strings = all_strings(alphabet, max_len);
        let index: HashMap<Vec<u8>, usize> = strings.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let adjacent = strings
            .iter()
            .map(|s| {
                let mut nb = Vec::new();
                for pos in 0..s.len() {
                    let mut t = s.clone();
                    t.remove(pos);
                    nb.push(index[&t]);
                    for a in 0..alphabet {
                        if a != s[pos] {
                            let mut t = s.clone();
                            t[pos] = a;
                            nb.push(index[&t]);
                        }
                    }
                }
                if s.len() < max_len {
                    for pos in 0..=s.len() {
                        for a in 0..alphabet {
                            let mut t = s.clone();
                            t.insert(pos, a);
                            nb.push(index[&t]);
                        }
                    }
                }
                nb.sort_unstable();
                nb.dedup();
                nb
            })
            .collect();
        Self {
            strings,
            index,
            adjacent,
        }
    }

    pub fn strings(&self) -> &[Vec<u8>] {
        &self.strings
    }

    pub fn id(&self, s: &[u8]) -> usize {
        self.index[s]
    }

    /// Distances from `source` to every node.
    pub fn distances_from(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.strings.len()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacent[u] {
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

/// Agglomeration that recomputes every inter-cluster linkage from the
/// original matrix at every step. Clusters are ordered by smallest leaf;
/// ties go to the first pair in that order.
pub fn naive_agglomerate(d: &[Vec<f64>], linkage: Linkage) -> Vec<Merge> {
    let n = d.len();
    // (members, node id), kept sorted by smallest member
    let mut clusters: Vec<(Vec<usize>, usize)> = (0..n).map(|i| (vec![i], i)).collect();
    let mut merges = Vec::new();
    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let (ma, mb) = (&clusters[a].0, &clusters[b].0);
                let v = match linkage {
                    Linkage::Single => {
                        let mut m = f64::INFINITY;
                        for &i in ma {
                            for &j in mb {
                                m = m.min(d[i][j]);
                            }
                        }
                        m
                    }
                    Linkage::Complete => {
                        let mut m = f64::NEG_INFINITY;
                        for &i in ma {
                            for &j in mb {
                                m = m.max(d[i][j]);
                            }
                        }
                        m
                    }
                    Linkage::Average => {
                        let mut s = 0.0;
                        for &i in ma {
                            for &j in mb {
                                s += d[i][j];
                            }
                        }
                        s / (ma.len() * mb.len()) as f64
                    }
                };
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, a, b));
                }
            }
        }
        let (height, a, b) = best.unwrap();
        let (mb, nb) = clusters.remove(b);
        let (ma, na) = &mut clusters[a];
        merges.push(Merge {
            left: *na,
            right: nb,
            height,
            size: ma.len() + mb.len(),
        });
        ma.extend(mb);
        *na = n + step;
    }
    merges
}

/// Smallest two-cluster SSE over all nontrivial 2-partitions.
pub fn exhaustive_two_partition_sse(points: &[Vec<f64>]) -> f64 {
    let n = points.len();
    assert!((2..=20).contains(&n));
    let mut best = f64::INFINITY;
    // point 0 always in the first part, so each split is visited once
    for mask in 0u32..(1 << (n - 1)) {
        let in_second = |i: usize| i > 0 && mask & (1 << (i - 1)) != 0;
        let second: Vec<&Vec<f64>> = (0..n).filter(|&i| in_second(i)).map(|i| &points[i]).collect();
        if second.is_empty() {
            continue;
        }
        let first: Vec<&Vec<f64>> = (0..n).filter(|&i| !in_second(i)).map(|i| &points[i]).collect();
        best = best.min(part_sse(&first) + part_sse(&second));
    }
    best
}

pub fn part_sse(part: &[&Vec<f64>]) -> f64 {
    let d = part[0].len();
    let m = part.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| part.iter().map(|p| p[j]).sum::<f64>() / m).collect();
    part.iter()
        .map(|p| p.iter().zip(&mean).map(|(x, c)| (x - c) * (x - c)).sum::<f64>())
        .sum()
}

/// Symmetric matrix with zero diagonal and integer entries in `1..=max`.
pub fn random_integer_matrix(n: usize, max: usize, rng: &mut SeededRng) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = (1 + rng.below(max)) as f64;
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

pub fn random_string(max_len: usize, alphabet: u8, rng: &mut SeededRng) -> Vec<u8> {
    let len = rng.below(max_len + 1);
    (0..len).map(|_| rng.below(alphabet as usize) as u8).collect()
}

/// Normal draws with the given mean and sd, rounded to a positive length.
pub fn normal_lengths(n: usize, mean: f64, sd: f64, rng: &mut SeededRng) -> Vec<usize> {
    (0..n).map(|_| (mean + sd * rng.normal()).round().max(1.0) as usize).collect()
}
