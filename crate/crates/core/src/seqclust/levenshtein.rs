#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Unit-cost edit distance (insertions, deletions, substitutions).
///
/// Runs in `O(|a|·|b|)` time and keeps a single row of
/// `min(|a|, |b|) + 1` cells.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return long.len();
    }
    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (i, x) in long.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in short.iter().enumerate() {
            let up = row[j + 1];
            let sub = diag + usize::from(x != y);
            row[j + 1] = sub.min(up + 1).min(row[j] + 1);
            diag = up;
        }
    }
    row[short.len()]
}

/// Condensed symmetric distance matrix (entries for `i < j` only).
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    upper: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                upper.push(f(i, j));
            }
        }
        Self { n, upper }
    }

    /// Builds from a full square matrix, reading the upper triangle.
    pub fn from_square(rows: &[Vec<f64>]) -> Self {
        Self::from_fn(rows.len(), |i, j| rows[i][j])
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        // row i starts after sum_{r<i} (n - 1 - r) entries
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.upper[self.offset(i, j)],
            std::cmp::Ordering::Greater => self.upper[self.offset(j, i)],
        }
    }
}

/// All pairwise Levenshtein distances of a group of sequences.
pub fn distance_matrix<T: PartialEq + Sync>(group: &[&[T]]) -> DistanceMatrix {
    let n = group.len();
    let row = |i: usize| -> Vec<f64> {
        (i + 1..n)
            .map(|j| levenshtein(group[i], group[j]) as f64)
            .collect()
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<f64>> = (0..n).into_par_iter().map(row).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<f64>> = (0..n).map(row).collect();
    DistanceMatrix {
        n,
        upper: rows.into_iter().flatten().collect(),
    }
}
