//! RR-interval ingest: parsing, artifact cleaning, windowing, scaling and
//! train/validation/test splitting.

use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Number of beats per analysis window.
pub const WINDOW_LEN: usize = 30;

/// Fraction of windows held out as the unseen test set.
pub const TEST_FRACTION: f64 = 0.10;

/// Number of cross-validation folds.
pub const N_FOLDS: usize = 5;

/// Smallest window count [`make_split`] accepts.
pub const MIN_SPLIT_WINDOWS: usize = 50;

/// One subject's RR intervals in milliseconds, in acquisition order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RriSeries {
    pub subject_id: String,
    pub intervals: Vec<f64>,
}

impl RriSeries {
    pub fn new(subject_id: impl Into<String>, intervals: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = intervals
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::Validation(format!(
                "interval {i} is {v}; intervals must be positive"
            )));
        }
        Ok(Self {
            subject_id: subject_id.into(),
            intervals,
        })
    }

    pub fn sample_count(&self) -> usize {
        self.intervals.len()
    }
}

/// Reads the one-value-per-line RRI format. Blank lines and lines starting
/// with `#` are skipped.
pub fn parse_rri<R: BufRead>(reader: R, subject_id: &str) -> Result<RriSeries> {
    let mut intervals = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let token = line.trim();
        if token.is_empty() || token.starts_with('#') {
            continue;
        }
        let value: f64 = token.parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("`{token}` is not a number"),
        })?;
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Validation(format!(
                "line {lineno}: interval {value} must be positive"
            )));
        }
        intervals.push(value);
    }
    Ok(RriSeries {
        subject_id: subject_id.to_string(),
        intervals,
    })
}

pub fn parse_rri_str(text: &str, subject_id: &str) -> Result<RriSeries> {
    parse_rri(text.as_bytes(), subject_id)
}

/// Outlier rule for [`winsorize`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CleanConfig {
    /// Physiological lower bound (ms).
    pub min_ms: f64,
    /// Physiological upper bound (ms).
    pub max_ms: f64,
    /// Maximum relative change from the previous non-outlier sample.
    pub max_rel_change: f64,
}

impl Default for CleanConfig {
    fn default() -> Self {
        Self {
            min_ms: 300.0,
            max_ms: 2000.0,
            max_rel_change: 0.20,
        }
    }
}

/// Marks samples outside `[min_ms, max_ms]` or deviating more than
/// `max_rel_change` from the last accepted sample.
pub fn outlier_mask(intervals: &[f64], cfg: &CleanConfig) -> Vec<bool> {
    let mut last_normal: Option<f64> = None;
    intervals
        .iter()
        .map(|&x| {
            let in_range = x >= cfg.min_ms && x <= cfg.max_ms;
            let jump = last_normal.is_some_and(|p| (x - p).abs() > cfg.max_rel_change * p);
            let outlier = !in_range || jump;
            if !outlier {
                last_normal = Some(x);
            }
            outlier
        })
        .collect()
}

/// Replaces every outlier with the value of the nearest-in-index normal
/// sample. Equidistant neighbours resolve to the earlier one.
pub fn winsorize(series: &RriSeries, cfg: &CleanConfig) -> Result<RriSeries> {
    let x = &series.intervals;
    if x.is_empty() {
        return Err(Error::InsufficientData(format!(
            "series `{}` is empty",
            series.subject_id
        )));
    }
    let mask = outlier_mask(x, cfg);
    if mask.iter().all(|&m| m) {
        return Err(Error::UnusableSeries(series.subject_id.clone()));
    }

    let n = x.len();
    // Nearest normal index to the left and right of every position.
    let mut left = vec![None; n];
    let mut last = None;
    for i in 0..n {
        if !mask[i] {
            last = Some(i);
        }
        left[i] = last;
    }
    let mut right = vec![None; n];
    let mut next = None;
    for i in (0..n).rev() {
        if !mask[i] {
            next = Some(i);
        }
        right[i] = next;
    }

    let cleaned = (0..n)
        .map(|i| {
            if !mask[i] {
                return x[i];
            }
            let src = match (left[i], right[i]) {
                (Some(l), Some(r)) => {
                    if i - l <= r - i {
                        l
                    } else {
                        r
                    }
                }
                (Some(l), None) => l,
                (None, Some(r)) => r,
                (None, None) => unreachable!("at least one normal sample exists"),
            };
            x[src]
        })
        .collect();

    Ok(RriSeries {
        subject_id: series.subject_id.clone(),
        intervals: cleaned,
    })
}

/// A fixed-length segment of one subject's series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub source_subject: String,
    pub start_index: usize,
    pub raw: Vec<f64>,
    pub scaled: Vec<f64>,
}

/// Min-max scaling to `[0, 1]`; a constant input maps to all zeros.
pub fn min_max_scale(raw: &[f64]) -> Vec<f64> {
    let (lo, hi) = raw
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    scale_between(raw, lo, hi)
}

fn scale_between(raw: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) {
        return vec![0.0; raw.len()];
    }
    raw.iter().map(|&v| (v - lo) / span).collect()
}

/// Cuts a series into non-overlapping windows of [`WINDOW_LEN`] beats. The
/// trailing remainder is dropped.
pub fn windowize(series: &RriSeries) -> Vec<Window> {
    series
        .intervals
        .chunks_exact(WINDOW_LEN)
        .enumerate()
        .map(|(k, chunk)| Window {
            source_subject: series.subject_id.clone(),
            start_index: k * WINDOW_LEN,
            raw: chunk.to_vec(),
            scaled: min_max_scale(chunk),
        })
        .collect()
}

/// Where min-max statistics come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingMode {
    /// Each window is scaled by its own min and max.
    #[default]
    PerWindow,
    /// All windows share the min and max over the whole cohort.
    Global,
}

/// Recomputes the scaled view of every window under `mode`.
pub fn rescale(windows: &mut [Window], mode: ScalingMode) {
    match mode {
        ScalingMode::PerWindow => {
            for w in windows.iter_mut() {
                w.scaled = min_max_scale(&w.raw);
            }
        }
        ScalingMode::Global => {
            let (lo, hi) = windows
                .iter()
                .flat_map(|w| w.raw.iter())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
            for w in windows.iter_mut() {
                w.scaled = scale_between(&w.raw, lo, hi);
            }
        }
    }
}

/// Held-out test windows plus a 5-fold partition of the rest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub seed: u64,
    pub test: Vec<usize>,
    pub folds: Vec<Vec<usize>>,
}

impl SplitPlan {
    pub fn n_windows(&self) -> usize {
        self.test.len() + self.folds.iter().map(Vec::len).sum::<usize>()
    }

    /// Training indices for `fold`: every other fold, never the test set.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = self
            .folds
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != fold)
            .flat_map(|(_, f)| f.iter().copied())
            .collect();
        idx.sort_unstable();
        idx
    }
}

/// Shuffles `0..n_windows` with [`SplitMix64`] seeded by `seed`, takes the
/// first `round(0.1 n)` as the test set and deals the rest into 5 contiguous
/// folds, the first `m % 5` folds receiving one extra window.
pub fn make_split(n_windows: usize, seed: u64) -> Result<SplitPlan> {
    if n_windows < MIN_SPLIT_WINDOWS {
        return Err(Error::InsufficientData(format!(
            "{n_windows} windows; a split needs at least {MIN_SPLIT_WINDOWS}"
        )));
    }
    let mut order: Vec<usize> = (0..n_windows).collect();
    SplitMix64::new(seed).shuffle(&mut order);

    let n_test = (TEST_FRACTION * n_windows as f64).round() as usize;
    let (test, rest) = order.split_at(n_test);
    let base = rest.len() / N_FOLDS;
    let extra = rest.len() % N_FOLDS;

    let mut folds = Vec::with_capacity(N_FOLDS);
    let mut start = 0;
    for k in 0..N_FOLDS {
        let size = base + usize::from(k < extra);
        let mut fold = rest[start..start + size].to_vec();
        fold.sort_unstable();
        folds.push(fold);
        start += size;
    }
    let mut test = test.to_vec();
    test.sort_unstable();
    Ok(SplitPlan { seed, test, folds })
}
