//! Plug-in mutual information from joint frequency matrices, and the
//! metric-vs-delay benchmark.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::metrics::{metric_suite, MetricName, MetricVector};
use crate::network::ActivityNetwork;
use crate::performance::{bin_index, min_max, valid_pairs, DelayVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "e")]
    E,
    #[serde(rename = "2")]
    Two,
}

impl LogBase {
    fn ln_scale(self) -> f64 {
        match self {
            LogBase::E => 1.0,
            LogBase::Two => std::f64::consts::LN_2,
        }
    }
}

impl FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "e" => Ok(LogBase::E),
            "2" => Ok(LogBase::Two),
            other => Err(format!("unsupported log base `{other}` (use e or 2)")),
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::E => "e",
            LogBase::Two => "2",
        })
    }
}

/// Joint histogram, rows along x and columns along y.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrequencyMatrix {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
    row_totals: Vec<u64>,
    col_totals: Vec<u64>,
    total: u64,
}

impl FrequencyMatrix {
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Self {
        let rows = counts.len();
        let cols = counts.first().map_or(0, Vec::len);
        assert!(counts.iter().all(|r| r.len() == cols), "ragged count matrix");
        let row_totals: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
        let col_totals: Vec<u64> = (0..cols).map(|c| counts.iter().map(|r| r[c]).sum()).collect();
        let total = row_totals.iter().sum();
        Self {
            rows,
            cols,
            counts: counts.into_iter().flatten().collect(),
            row_totals,
            col_totals,
            total,
        }
    }

    /// Uniform bins over each variable's own `[min, max]`, `n_bins` per axis.
    pub fn from_pairs(pairs: &[(f64, f64)], n_bins: usize) -> Result<Self, AnalysisError> {
        if n_bins == 0 {
            return Err(AnalysisError::ZeroBins);
        }
        if pairs.len() < 2 {
            return Err(AnalysisError::InsufficientData(format!(
                "{} paired observation(s), need at least 2",
                pairs.len()
            )));
        }
        let (xmin, xmax) = min_max(pairs.iter().map(|p| p.0));
        let (ymin, ymax) = min_max(pairs.iter().map(|p| p.1));
        let mut counts = vec![vec![0u64; n_bins]; n_bins];
        for &(x, y) in pairs {
            counts[bin_index(x, xmin, xmax, n_bins)][bin_index(y, ymin, ymax, n_bins)] += 1;
        }
        Ok(Self::from_counts(counts))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.cols + col]
    }

    pub fn row_totals(&self) -> &[u64] {
        &self.row_totals
    }

    pub fn col_totals(&self) -> &[u64] {
        &self.col_totals
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.counts.chunks(self.cols.max(1)).map(<[u64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let t = (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.get(r, c)).collect())
            .collect();
        Self::from_counts(t)
    }
}

/// `floor(sqrt(n))`, at least 1.
pub fn sqrt_bin_count(valid: usize) -> usize {
    let mut k = (valid as f64).sqrt() as usize;
    // guard against floating error either side of perfect squares
    while k * k > valid {
        k -= 1;
    }
    while (k + 1) * (k + 1) <= valid {
        k += 1;
    }
    k.max(1)
}

/// Pairs a metric with delays, dropping nodes without a delay. `n_bins`
/// defaults to `floor(sqrt(number of kept pairs))`.
pub fn frequency_matrix(
    metric: &[f64],
    delays: &DelayVector,
    n_bins: Option<usize>,
) -> Result<FrequencyMatrix, AnalysisError> {
    let pairs = valid_pairs(metric, delays)?;
    let bins = n_bins.unwrap_or_else(|| sqrt_bin_count(pairs.len()));
    FrequencyMatrix::from_pairs(&pairs, bins)
}

/// Plug-in mutual information of the joint distribution in `m`.
pub fn mutual_information(m: &FrequencyMatrix, base: LogBase) -> f64 {
    if m.total == 0 {
        return 0.0;
    }
    let total = m.total as f64;
    let mut mi = 0.0;
    for r in 0..m.rows {
        let pr = m.row_totals[r];
        if pr == 0 {
            continue;
        }
        for c in 0..m.cols {
            let joint = m.get(r, c);
            if joint == 0 {
                continue;
            }
            // p(x,y) / (p(x) p(y)) = joint * total / (row * col)
            let ratio = (joint as f64 * total) / (pr as f64 * m.col_totals[c] as f64);
            mi += joint as f64 / total * ratio.ln();
        }
    }
    (mi / base.ln_scale()).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkEntry {
    pub metric: MetricName,
    pub mi: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    /// In suite order.
    pub entries: Vec<BenchmarkEntry>,
    pub bins: usize,
    pub valid_nodes: usize,
    pub log_base: LogBase,
}

impl BenchmarkReport {
    pub fn rank_of(&self, metric: MetricName) -> Option<usize> {
        self.entries.iter().find(|e| e.metric == metric).map(|e| e.rank)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,mi,rank\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},{}\n", e.metric, e.mi, e.rank));
        }
        out
    }
}

/// Ranks metrics by MI with the delays; ties broken by metric name.
pub fn rank_metrics(
    suite: &[MetricVector],
    delays: &DelayVector,
    n_bins: Option<usize>,
    base: LogBase,
) -> Result<BenchmarkReport, AnalysisError> {
    let valid_nodes = delays.valid_count();
    let bins = n_bins.unwrap_or_else(|| sqrt_bin_count(valid_nodes));
    let mut entries = suite
        .iter()
        .map(|m| {
            let fm = frequency_matrix(&m.values, delays, Some(bins))?;
            Ok(BenchmarkEntry {
                metric: m.name,
                mi: mutual_information(&fm, base),
                rank: 0,
            })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&a, &b| {
        entries[b]
            .mi
            .total_cmp(&entries[a].mi)
            .then_with(|| entries[a].metric.as_str().cmp(entries[b].metric.as_str()))
    });
    for (rank, &i) in order.iter().enumerate() {
        entries[i].rank = rank + 1;
    }
    Ok(BenchmarkReport {
        entries,
        bins,
        valid_nodes,
        log_base: base,
    })
}

/// Full eight-metric benchmark against `delays`.
pub fn benchmark_metrics(
    network: &ActivityNetwork,
    delays: &DelayVector,
    n_bins: Option<usize>,
    base: LogBase,
) -> Result<BenchmarkReport, AnalysisError> {
    rank_metrics(&metric_suite(network), delays, n_bins, base)
}
