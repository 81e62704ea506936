use serde::{Deserialize, Serialize};

use super::special::{chi2_sf, f_sf, t_sf_two_tailed};
use super::StatsError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    ChiSquare,
    Anova,
    TTestPooled,
    TTestWelch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub kind: TestKind,
    pub statistic: f64,
    /// One entry for chi-square and t, two for F.
    pub df: Vec<f64>,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
}

impl ContingencyTable {
    pub fn new(counts: Vec<Vec<u64>>) -> Result<Self, StatsError> {
        let cols = counts.first().map_or(0, Vec::len);
        if counts.is_empty() || cols == 0 {
            return Err(StatsError::InvalidTable("empty table".into()));
        }
        if counts.iter().any(|r| r.len() != cols) {
            return Err(StatsError::InvalidTable("rows differ in length".into()));
        }
        if counts.iter().flatten().all(|&c| c == 0) {
            return Err(StatsError::InvalidTable("grand total is zero".into()));
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn rows(&self) -> usize {
        self.counts.len()
    }

    pub fn cols(&self) -> usize {
        self.counts[0].len()
    }
}

/// Pearson's chi-square test of independence. `yates` applies the
/// continuity correction and is only accepted for 2x2 tables.
pub fn chi_square_independence(table: &ContingencyTable, yates: bool) -> Result<TestResult, StatsError> {
    let (r, c) = (table.rows(), table.cols());
    if yates && (r, c) != (2, 2) {
        return Err(StatsError::InvalidTable("Yates correction needs a 2x2 table".into()));
    }
    let row: Vec<f64> = table.counts.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col: Vec<f64> = (0..c)
        .map(|j| table.counts.iter().map(|r| r[j]).sum::<u64>() as f64)
        .collect();
    if row.iter().chain(&col).any(|&s| s == 0.0) {
        return Err(StatsError::ZeroExpected);
    }
    let total: f64 = row.iter().sum();
    let mut stat = 0.0;
    for i in 0..r {
        for j in 0..c {
            let expected = row[i] * col[j] / total;
            let mut diff = (table.counts[i][j] as f64 - expected).abs();
            if yates {
                diff = (diff - 0.5).max(0.0);
            }
            stat += diff * diff / expected;
        }
    }
    let df = ((r - 1) * (c - 1)) as f64;
    let p_value = if df == 0.0 { 1.0 } else { chi2_sf(stat, df)? };
    Ok(TestResult {
        kind: TestKind::ChiSquare,
        statistic: stat,
        df: vec![df],
        p_value,
    })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sum_sq_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum()
}

/// One-way ANOVA F test.
pub fn one_way_anova<S: AsRef<[f64]>>(groups: &[S]) -> Result<TestResult, StatsError> {
    let k = groups.len();
    if k < 2 {
        return Err(StatsError::InvalidTable("ANOVA needs at least 2 groups".into()));
    }
    if groups.iter().any(|g| g.as_ref().is_empty()) {
        return Err(StatsError::TooFewValues { need: 1 });
    }
    let n: usize = groups.iter().map(|g| g.as_ref().len()).sum();
    if n <= k {
        return Err(StatsError::TooFewValues { need: 2 });
    }
    let grand = groups.iter().flat_map(|g| g.as_ref()).sum::<f64>() / n as f64;
    let ssb: f64 = groups
        .iter()
        .map(|g| {
            let g = g.as_ref();
            g.len() as f64 * (mean(g) - grand).powi(2)
        })
        .sum();
    let ssw: f64 = groups.iter().map(|g| sum_sq_dev(g.as_ref())).sum();
    if ssw <= 0.0 {
        return Err(StatsError::DegenerateVariance);
    }
    let (df1, df2) = ((k - 1) as f64, (n - k) as f64);
    let f = (ssb / df1) / (ssw / df2);
    Ok(TestResult {
        kind: TestKind::Anova,
        statistic: f,
        df: vec![df1, df2],
        p_value: f_sf(f, df1, df2)?,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TTestMode {
    /// Student's t with pooled variance.
    #[default]
    Pooled,
    /// Unequal variances, Welch-Satterthwaite degrees of freedom.
    Welch,
}

/// Two-sample, two-tailed t test of `mean(a) - mean(b)`.
pub fn t_test(a: &[f64], b: &[f64], mode: TTestMode) -> Result<TestResult, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::TooFewValues { need: 2 });
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (sum_sq_dev(a) / (na - 1.0), sum_sq_dev(b) / (nb - 1.0));
    let diff = mean(a) - mean(b);
    let (se2, df, kind) = match mode {
        TTestMode::Pooled => {
            let sp2 = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
            (sp2 * (1.0 / na + 1.0 / nb), na + nb - 2.0, TestKind::TTestPooled)
        }
        TTestMode::Welch => {
            let (qa, qb) = (va / na, vb / nb);
            let se2 = qa + qb;
            let df = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
            (se2, df, TestKind::TTestWelch)
        }
    };
    if se2 <= 0.0 {
        return Err(StatsError::DegenerateVariance);
    }
    let t = diff / se2.sqrt();
    Ok(TestResult {
        kind,
        statistic: t,
        df: vec![df],
        p_value: t_sf_two_tailed(t, df)?,
    })
}

/// Bonferroni-adjusted p-value for `m` comparisons.
pub fn bonferroni(p: f64, m: usize) -> f64 {
    (p * m as f64).min(1.0)
}
