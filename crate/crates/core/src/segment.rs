//! Length stratification of activity sequences.
//!
//! Edit distance grows with the length difference of its arguments, so
//! sequences are first split into length strata and only compared within
//! a stratum. Strata come from the valleys of a Gaussian kernel density
//! estimate of the lengths, after trimming lengths outside
//! `mean ± k·sd`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Error, PartialEq)]
pub enum SegmentError {
    #[error("need at least 2 sequences, got {0}")]
    TooFewSequences(usize),
    #[error("all lengths identical; automatic bandwidth is undefined")]
    DegenerateData,
    #[error("bandwidth must be finite and positive, got {0}")]
    InvalidBandwidth(f64),
    #[error("cut points must be finite and strictly ascending: {0:?}")]
    BadThresholds(Vec<f64>),
    #[error("density estimate needs at least one sample")]
    NoSamples,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SdKind {
    /// Divide by n.
    #[default]
    Population,
    /// Divide by n - 1.
    Sample,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutlierBounds {
    pub mean: f64,
    pub sd: f64,
    pub k: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutlierSplit {
    pub retained: Vec<usize>,
    pub removed: Vec<usize>,
    pub bounds: OutlierBounds,
}

pub fn mean_sd(xs: &[f64], kind: SdKind) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    let denom = match kind {
        SdKind::Population => n,
        SdKind::Sample => n - 1.0,
    };
    (mean, (ss / denom).sqrt())
}

/// Splits indices into those inside `[mean - k·sd, mean + k·sd]` and the
/// rest. `k = f64::INFINITY` disables trimming.
pub fn filter_outliers(lengths: &[usize], k: f64, sd_kind: SdKind) -> Result<OutlierSplit, SegmentError> {
    if lengths.len() < 2 {
        return Err(SegmentError::TooFewSequences(lengths.len()));
    }
    let xs: Vec<f64> = lengths.iter().map(|&l| l as f64).collect();
    let (mean, sd) = mean_sd(&xs, sd_kind);
    let (lower, upper) = if k.is_infinite() {
        (f64::NEG_INFINITY, f64::INFINITY)
    } else {
        (mean - k * sd, mean + k * sd)
    };
    let (mut retained, mut removed) = (Vec::new(), Vec::new());
    for (i, &x) in xs.iter().enumerate() {
        if x > upper || x < lower {
            removed.push(i);
        } else {
            retained.push(i);
        }
    }
    Ok(OutlierSplit {
        retained,
        removed,
        bounds: OutlierBounds { mean, sd, k, lower, upper },
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bandwidth {
    /// Silverman's rule of thumb.
    #[default]
    Auto,
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
}

impl DensityEstimate {
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(g, d)| (g[1] - g[0]) * (d[0] + d[1]) / 2.0)
            .sum()
    }
}

/// Linear-interpolation quantile of sorted data (`q` in `[0, 1]`).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// `0.9 · min(sd, IQR / 1.34) · n^(-1/5)`, falling back to the sd when
/// the IQR is zero.
pub fn silverman_bandwidth(samples: &[f64]) -> Result<f64, SegmentError> {
    if samples.len() < 2 {
        return Err(SegmentError::TooFewSequences(samples.len()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (_, sd) = mean_sd(&sorted, SdKind::Sample);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    if !(spread > 0.0) {
        return Err(SegmentError::DegenerateData);
    }
    Ok(0.9 * spread * (samples.len() as f64).powf(-0.2))
}

pub const DEFAULT_GRID_POINTS: usize = 512;

/// Gaussian KDE on a uniform grid spanning `[min - 3h, max + 3h]`.
///
/// The grid has `grid_points` points unless that would space them more
/// than one bandwidth apart, in which case it is refined until spacing is
/// at most `h`; this keeps the trapezoidal integral near 1.
/// Samples are summed in sorted order, so the result does not depend on
/// their order.
pub fn kde(samples: &[f64], bandwidth: Bandwidth, grid_points: usize) -> Result<DensityEstimate, SegmentError> {
    if samples.is_empty() {
        return Err(SegmentError::NoSamples);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let samples = &sorted[..];
    let h = match bandwidth {
        Bandwidth::Auto => silverman_bandwidth(samples)?,
        Bandwidth::Fixed(h) if h.is_finite() && h > 0.0 => h,
        Bandwidth::Fixed(h) => return Err(SegmentError::InvalidBandwidth(h)),
    };
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = min - 3.0 * h;
    let hi = max + 3.0 * h;
    let needed = ((hi - lo) / h).ceil() as usize + 1;
    let points = grid_points.max(2).max(needed);
    let step = (hi - lo) / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|i| lo + step * i as f64).collect();

    let norm = 1.0 / (samples.len() as f64 * h * (2.0 * std::f64::consts::PI).sqrt());
    let eval = |g: &f64| -> f64 {
        let mut acc = 0.0;
        for &x in samples {
            let z = (g - x) / h;
            acc += (-0.5 * z * z).exp();
        }
        acc * norm
    };
    #[cfg(feature = "parallel")]
    let density: Vec<f64> = grid.par_iter().map(eval).collect();
    #[cfg(not(feature = "parallel"))]
    let density: Vec<f64> = grid.iter().map(eval).collect();

    Ok(DensityEstimate {
        grid,
        density,
        bandwidth: h,
    })
}

/// Interior local minima of the density as `(grid index, density)`.
///
/// A strict minimum is a point lower than both neighbors. A flat valley
/// (a run of equal values with higher values on both sides, which happens
/// where the density underflows to zero between distant modes) counts
/// once, at the middle of the run.
pub fn local_minima(density: &[f64]) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    let n = density.len();
    let mut i = 1;
    while i + 1 < n {
        if density[i] < density[i - 1] {
            let mut j = i;
            while j + 1 < n && density[j + 1] == density[i] {
                j += 1;
            }
            if j + 1 < n && density[j + 1] > density[i] {
                out.push(((i + j) / 2, density[i]));
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutPoints {
    pub cuts: Vec<f64>,
    /// True when too few density minima existed and equal-count
    /// quantiles of the samples were used instead.
    pub fallback: bool,
}

/// Picks `n_cuts` cut points at the deepest density valleys, returned in
/// ascending order. With fewer valleys than requested the samples are
/// split into `n_cuts + 1` equal-count parts instead.
pub fn find_cutpoints(density: &DensityEstimate, samples: &[f64], n_cuts: usize) -> CutPoints {
    let n_cuts = n_cuts.max(1);
    let mut minima = local_minima(&density.density);
    if minima.len() >= n_cuts {
        minima.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let mut idx: Vec<usize> = minima[..n_cuts].iter().map(|m| m.0).collect();
        idx.sort_unstable();
        return CutPoints {
            cuts: idx.into_iter().map(|i| density.grid[i]).collect(),
            fallback: false,
        };
    }
    CutPoints {
        cuts: quantile_cuts(samples, n_cuts),
        fallback: true,
    }
}

/// Equal-count cut points at the `j / (n_cuts + 1)` quantiles, made
/// strictly ascending (ties push later cuts above the sample maximum,
/// leaving those strata empty).
pub fn quantile_cuts(samples: &[f64], n_cuts: usize) -> Vec<f64> {
    if samples.is_empty() {
        return (1..=n_cuts).map(|j| j as f64).collect();
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let max = sorted[sorted.len() - 1];
    let mut cuts: Vec<f64> = Vec::with_capacity(n_cuts);
    for j in 1..=n_cuts {
        let mut c = quantile_sorted(&sorted, j as f64 / (n_cuts + 1) as f64);
        if let Some(&prev) = cuts.last() {
            if c <= prev {
                c = sorted.iter().copied().find(|&x| x > prev).unwrap_or(prev.max(max) + 1.0);
            }
        }
        cuts.push(c);
    }
    cuts
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthSegments {
    pub cuts: Vec<f64>,
    /// Stratum index per input length: 0 below the first cut, `i` for
    /// `cuts[i-1] <= len < cuts[i]`, `cuts.len()` at or above the last.
    pub assignment: Vec<usize>,
    pub counts: Vec<usize>,
}

pub fn segment(lengths: &[usize], cuts: &[f64]) -> Result<LengthSegments, SegmentError> {
    let ascending = cuts.windows(2).all(|w| w[0] < w[1]);
    if cuts.is_empty() || !ascending || cuts.iter().any(|c| !c.is_finite()) {
        return Err(SegmentError::BadThresholds(cuts.to_vec()));
    }
    let mut counts = vec![0; cuts.len() + 1];
    let assignment: Vec<usize> = lengths
        .iter()
        .map(|&l| {
            let g = cuts.iter().take_while(|&&c| l as f64 >= c).count();
            counts[g] += 1;
            g
        })
        .collect();
    Ok(LengthSegments {
        cuts: cuts.to_vec(),
        assignment,
        counts,
    })
}

/// Name of stratum `g` out of `n_groups`.
pub fn group_name(g: usize, n_groups: usize) -> String {
    match (n_groups, g) {
        (3, 0) => "short".into(),
        (3, 1) => "medium".into(),
        (3, 2) => "long".into(),
        (2, 0) => "short".into(),
        (2, 1) => "long".into(),
        _ => format!("g{g}"),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentationConfig {
    pub outlier_k: f64,
    pub sd_kind: SdKind,
    pub bandwidth: Bandwidth,
    pub grid_points: usize,
    pub n_cuts: usize,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        Self {
            outlier_k: 2.0,
            sd_kind: SdKind::Population,
            bandwidth: Bandwidth::Auto,
            grid_points: DEFAULT_GRID_POINTS,
            n_cuts: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentationReport {
    pub bounds: OutlierBounds,
    pub removed: Vec<usize>,
    pub retained: Vec<usize>,
    pub bandwidth: f64,
    pub cuts: Vec<f64>,
    pub fallback: bool,
    /// Stratum per input index; `None` for removed outliers.
    pub group: Vec<Option<usize>>,
    pub counts: Vec<usize>,
    #[serde(skip)]
    pub density: Option<DensityEstimate>,
}

/// Outlier trimming, density estimation, cut selection and assignment in
/// one call.
pub fn segment_lengths(lengths: &[usize], config: &SegmentationConfig) -> Result<SegmentationReport, SegmentError> {
    let split = filter_outliers(lengths, config.outlier_k, config.sd_kind)?;
    let kept: Vec<f64> = split.retained.iter().map(|&i| lengths[i] as f64).collect();
    let density = kde(&kept, config.bandwidth, config.grid_points)?;
    let cuts = find_cutpoints(&density, &kept, config.n_cuts);
    let kept_lengths: Vec<usize> = split.retained.iter().map(|&i| lengths[i]).collect();
    let seg = segment(&kept_lengths, &cuts.cuts)?;
    let mut group = vec![None; lengths.len()];
    for (&i, &g) in split.retained.iter().zip(&seg.assignment) {
        group[i] = Some(g);
    }
    Ok(SegmentationReport {
        bounds: split.bounds,
        removed: split.removed,
        retained: split.retained,
        bandwidth: density.bandwidth,
        cuts: cuts.cuts,
        fallback: cuts.fallback,
        group,
        counts: seg.counts,
        density: Some(density),
    })
}
