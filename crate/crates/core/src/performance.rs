//! Start/End Delay indicators and equal-width binned delay statistics.

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::network::ActivityNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayKind {
    Start,
    End,
}

/// Delay in whole days per node; `None` where the actual date is missing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DelayVector {
    pub kind: DelayKind,
    pub values: Vec<Option<i64>>,
}

impl DelayVector {
    pub fn valid_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Actual start minus planned start; negative means an early start.
pub fn start_delay(network: &ActivityNetwork) -> Result<DelayVector, AnalysisError> {
    delays(network, DelayKind::Start)
}

/// Actual end minus planned end.
pub fn end_delay(network: &ActivityNetwork) -> Result<DelayVector, AnalysisError> {
    delays(network, DelayKind::End)
}

pub fn delays(network: &ActivityNetwork, kind: DelayKind) -> Result<DelayVector, AnalysisError> {
    let values: Vec<Option<i64>> = network
        .nodes()
        .iter()
        .map(|a| match kind {
            DelayKind::Start => a.actual_start.map(|d| (d - a.planned_start).num_days()),
            DelayKind::End => a.actual_end.map(|d| (d - a.planned_end).num_days()),
        })
        .collect();
    if values.iter().all(Option::is_none) {
        return Err(AnalysisError::NoValidDelays);
    }
    Ok(DelayVector { kind, values })
}

/// Linear-interpolation quantile of ascending `sorted` data
/// (position `(len - 1) * q`).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Equal-width bin index of `x` on `[min, max]`; `max` lands in the last bin.
/// Computed from the relative position, so any positive affine rescaling of
/// the data yields the same assignment up to rounding at bin edges.
pub(crate) fn bin_index(x: f64, min: f64, max: f64, n_bins: usize) -> usize {
    if max <= min {
        return 0;
    }
    let pos = (x - min) / (max - min) * n_bins as f64;
    (pos.floor().max(0.0) as usize).min(n_bins - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinSummary {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub q25: Option<f64>,
    pub q75: Option<f64>,
    pub q16: Option<f64>,
    pub q84: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinnedStats {
    pub bin_edges: Vec<f64>,
    pub bins: Vec<BinSummary>,
    /// All metric values were identical; a single bin was produced.
    pub degenerate: bool,
}

impl BinnedStats {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = String::from("bin_lo,bin_hi,count,mean,median,q25,q75,q16,q84\n");
        for b in &self.bins {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                b.lo,
                b.hi,
                b.count,
                opt(b.mean),
                opt(b.median),
                opt(b.q25),
                opt(b.q75),
                opt(b.q16),
                opt(b.q84)
            ));
        }
        out
    }
}

/// Groups valid delays into `n_bins` equal-width bins along the metric axis
/// and summarises each bin.
pub fn bin_by_metric(
    metric: &[f64],
    delays: &DelayVector,
    n_bins: usize,
) -> Result<BinnedStats, AnalysisError> {
    if n_bins == 0 {
        return Err(AnalysisError::ZeroBins);
    }
    let pairs = valid_pairs(metric, delays)?;
    if pairs.is_empty() {
        return Err(AnalysisError::NoValidDelays);
    }
    let (min, max) = min_max(pairs.iter().map(|p| p.0));
    let degenerate = max <= min;
    let n_bins = if degenerate {
        log::warn!("metric is constant over valid nodes; using a single bin");
        1
    } else {
        n_bins
    };

    let mut members: Vec<Vec<f64>> = vec![Vec::new(); n_bins];
    for &(x, y) in &pairs {
        members[bin_index(x, min, max, n_bins)].push(y);
    }
    let width = (max - min) / n_bins as f64;
    let bin_edges: Vec<f64> = (0..=n_bins)
        .map(|k| if k == n_bins { max } else { min + width * k as f64 })
        .collect();
    let bins = members
        .into_iter()
        .enumerate()
        .map(|(k, mut ys)| {
            ys.sort_by(f64::total_cmp);
            let stat = |q: f64| (!ys.is_empty()).then(|| quantile(&ys, q));
            BinSummary {
                lo: bin_edges[k],
                hi: bin_edges[k + 1],
                count: ys.len(),
                mean: (!ys.is_empty()).then(|| ys.iter().sum::<f64>() / ys.len() as f64),
                median: stat(0.5),
                q25: stat(0.25),
                q75: stat(0.75),
                q16: stat(0.16),
                q84: stat(0.84),
            }
        })
        .collect();
    Ok(BinnedStats {
        bin_edges,
        bins,
        degenerate,
    })
}

/// Freedman-Diaconis bin count on `values`, clamped to `[4, 30]`. Falls back
/// to the square-root rule when the interquartile range is zero.
pub fn default_bin_count(values: &[f64]) -> usize {
    const LO: usize = 4;
    const HI: usize = 30;
    if values.len() < 2 {
        return LO;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let range = sorted[sorted.len() - 1] - sorted[0];
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let raw = if iqr > 0.0 && range > 0.0 {
        let width = 2.0 * iqr / (sorted.len() as f64).cbrt();
        (range / width).ceil() as usize
    } else {
        (sorted.len() as f64).sqrt().ceil() as usize
    };
    raw.clamp(LO, HI)
}

/// `(metric, delay)` for nodes with a defined delay.
pub(crate) fn valid_pairs(
    metric: &[f64],
    delays: &DelayVector,
) -> Result<Vec<(f64, f64)>, AnalysisError> {
    if metric.len() != delays.len() {
        return Err(AnalysisError::LengthMismatch {
            metric: metric.len(),
            delays: delays.len(),
        });
    }
    let mut pairs = Vec::with_capacity(metric.len());
    for (i, (&x, d)) in metric.iter().zip(&delays.values).enumerate() {
        if !x.is_finite() {
            return Err(AnalysisError::NonFinite(i));
        }
        if let Some(y) = d {
            pairs.push((x, *y as f64));
        }
    }
    Ok(pairs)
}

pub(crate) fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}
