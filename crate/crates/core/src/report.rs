//! Command implementations behind the `reachnet` binary and the run
//! manifest they produce.
//!
//! Every artifact is written in a fixed order and listed in `manifest.json`
//! with its SHA-256 digest. Data files carry no timestamps or absolute paths,
//! so identical inputs and flags reproduce identical digests.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::error::{AnalysisError, GeneratorError, GraphError};
use crate::heterogeneity::{estrada_rho, rh_local_all, LocalRhVector};
use crate::info::{rank_metrics, BenchmarkReport, LogBase};
use crate::io::{self, NetworkJson, Schedule, ScheduleError};
use crate::metrics::{metric_suite, metrics_csv, MetricName, MetricVector};
use crate::network::{prune_isolated, weakly_connected_components, ActivityNetwork};
use crate::performance::{bin_by_metric, default_bin_count, delays, BinnedStats, DelayKind, DelayVector};
use crate::reachability::{reachability_table, tail_distribution, Lineage};
use crate::synth::{generate_dag, simulate_delays, GeneratorConfig, PropagationConfig};

pub const TOOL_NAME: &str = "reachnet";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error("{path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 0 ok, 1 output failure, 2 input/parse error, 3 cycle, 4 empty after
    /// pruning, 5 analysis failure, 6 generator failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schedule(ScheduleError::Graph(GraphError::CycleDetected { .. })) => 3,
            CliError::Schedule(ScheduleError::Graph(GraphError::EmptyNetwork)) => 4,
            CliError::Schedule(_) | CliError::Usage(_) => 2,
            CliError::Analysis(_) => 5,
            CliError::Generator(_) => 6,
            CliError::Write { .. } => 1,
        }
    }
}

/// Bin count choice for binned statistics and frequency matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BinChoice {
    /// Freedman-Diaconis for delay bins, `floor(sqrt(n))` for MI.
    #[default]
    Auto,
    Fixed(usize),
}

impl std::str::FromStr for BinChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(BinChoice::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(BinChoice::Fixed(n)),
            _ => Err(format!("bins must be a positive integer or `auto`, got `{s}`")),
        }
    }
}

impl Serialize for BinChoice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            BinChoice::Auto => s.serialize_str("auto"),
            BinChoice::Fixed(n) => s.serialize_u64(*n as u64),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisOptions {
    pub bins: BinChoice,
    pub log_base: LogBase,
    pub delay: DelayKind,
    /// Metric whose axis the delay bins run along.
    pub bin_metric: MetricName,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            bins: BinChoice::Auto,
            log_base: LogBase::E,
            delay: DelayKind::Start,
            bin_metric: MetricName::LocalRh,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NetworkStats {
    pub nodes: usize,
    pub dependencies: usize,
    pub wcc_count: usize,
    pub largest_wcc: usize,
    pub isolated_removed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub inputs: Vec<FileDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<NetworkStats>,
    pub parameters: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub global_rh: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estrada_rho: Option<f64>,
    pub artifacts: Vec<FileDigest>,
    pub warnings: Vec<String>,
}

impl RunReport {
    fn new(command: &str, parameters: serde_json::Value) -> Self {
        Self {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            command: command.into(),
            inputs: Vec::new(),
            stats: None,
            parameters,
            global_rh: None,
            estrada_rho: None,
            artifacts: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn warn(&mut self, message: String) {
        log::warn!("{message}");
        self.warnings.push(message);
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Collects artifacts under one output directory.
struct ArtifactWriter {
    dir: PathBuf,
    written: Vec<FileDigest>,
}

impl ArtifactWriter {
    fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.display().to_string(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        })?;
        self.written.push(FileDigest {
            path: name.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(())
    }
}

/// A parsed, validated and pruned schedule.
pub struct LoadedSchedule {
    pub network: ActivityNetwork,
    pub stats: NetworkStats,
    pub inputs: Vec<FileDigest>,
}

/// Reads both CSV files, builds the network and removes isolated nodes.
pub fn load_schedule(activities: &Path, dependencies: &Path) -> Result<LoadedSchedule, CliError> {
    let digest = |path: &Path| -> Result<FileDigest, CliError> {
        let bytes = fs::read(path).map_err(|source| {
            CliError::Schedule(ScheduleError::Io {
                path: path.display().to_string(),
                source,
            })
        })?;
        Ok(FileDigest {
            path: file_name(path),
            sha256: sha256_hex(&bytes),
        })
    };
    let inputs = vec![digest(activities)?, digest(dependencies)?];
    let full = Schedule::read(activities, dependencies)?.build()?;
    let network = prune_isolated(&full).map_err(ScheduleError::Graph)?;
    let wcc = weakly_connected_components(&network);
    let stats = NetworkStats {
        nodes: network.node_count(),
        dependencies: network.edge_count(),
        wcc_count: wcc.component_count,
        largest_wcc: wcc.largest_component_size,
        isolated_removed: full.node_count() - network.node_count(),
    };
    Ok(LoadedSchedule {
        network,
        stats,
        inputs,
    })
}

pub fn cmd_validate(activities: &Path, dependencies: &Path) -> Result<RunReport, CliError> {
    let loaded = load_schedule(activities, dependencies)?;
    let mut report = RunReport::new("validate", serde_json::json!({}));
    report.inputs = loaded.inputs;
    report.stats = Some(loaded.stats);
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalRhEntry {
    pub id: String,
    pub value: f64,
}

/// `{global, local}` with local scores sorted by descending value, ties by id.
#[derive(Debug, Clone, Serialize)]
pub struct RhReport {
    pub global: f64,
    pub local: Vec<LocalRhEntry>,
}

impl RhReport {
    pub fn new(network: &ActivityNetwork, local: &LocalRhVector) -> Self {
        let mut entries: Vec<LocalRhEntry> = network
            .ids()
            .zip(&local.values)
            .map(|(id, &value)| LocalRhEntry {
                id: id.to_string(),
                value,
            })
            .collect();
        entries.sort_by(|a, b| b.value.total_cmp(&a.value).then_with(|| a.id.cmp(&b.id)));
        Self {
            global: local.global.value,
            local: entries,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,value\n");
        for e in &self.local {
            out.push_str(&format!("{},{}\n", io::csv_field(&e.id), e.value));
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BinsReport {
    pub by: MetricName,
    pub delay: DelayKind,
    #[serde(flatten)]
    pub stats: BinnedStats,
}

impl BinsReport {
    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

pub fn benchmark_json(report: &BenchmarkReport) -> String {
    to_json(report)
}

fn reachability_csv(network: &ActivityNetwork) -> String {
    let table = reachability_table(network);
    let mut out = String::from("id,descendants,ancestors\n");
    for (i, id) in network.ids().enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            io::csv_field(id),
            table.descendants()[i],
            table.ancestors()[i]
        ));
    }
    out
}

fn delays_csv(network: &ActivityNetwork) -> String {
    let start = delays(network, DelayKind::Start).ok();
    let end = delays(network, DelayKind::End).ok();
    let cell = |d: &Option<DelayVector>, i: usize| {
        d.as_ref()
            .and_then(|v| v.values[i])
            .map(|x| x.to_string())
            .unwrap_or_default()
    };
    let mut out = String::from("id,start_delay,end_delay\n");
    for (i, id) in network.ids().enumerate() {
        out.push_str(&format!("{},{},{}\n", io::csv_field(id), cell(&start, i), cell(&end, i)));
    }
    out
}

fn find_metric(suite: &[MetricVector], name: MetricName) -> &MetricVector {
    suite
        .iter()
        .find(|m| m.name == name)
        .expect("suite holds every metric")
}

/// Binned delay statistics along one metric.
pub fn binned_delays(
    suite: &[MetricVector],
    delays: &DelayVector,
    opts: &AnalysisOptions,
) -> Result<BinsReport, AnalysisError> {
    let metric = find_metric(suite, opts.bin_metric);
    let n_bins = match opts.bins {
        BinChoice::Fixed(n) => n,
        BinChoice::Auto => {
            let valid: Vec<f64> = metric
                .values
                .iter()
                .zip(&delays.values)
                .filter(|(_, d)| d.is_some())
                .map(|(&x, _)| x)
                .collect();
            default_bin_count(&valid)
        }
    };
    Ok(BinsReport {
        by: opts.bin_metric,
        delay: delays.kind,
        stats: bin_by_metric(&metric.values, delays, n_bins)?,
    })
}

fn mi_bins(opts: &AnalysisOptions) -> Option<usize> {
    match opts.bins {
        BinChoice::Fixed(n) => Some(n),
        BinChoice::Auto => None,
    }
}

pub fn cmd_rh(activities: &Path, dependencies: &Path) -> Result<RhReport, CliError> {
    let loaded = load_schedule(activities, dependencies)?;
    Ok(RhReport::new(&loaded.network, &rh_local_all(&loaded.network)))
}

pub fn cmd_metrics(activities: &Path, dependencies: &Path) -> Result<String, CliError> {
    let loaded = load_schedule(activities, dependencies)?;
    Ok(metrics_csv(&loaded.network, &metric_suite(&loaded.network)))
}

pub fn cmd_bins(
    activities: &Path,
    dependencies: &Path,
    opts: &AnalysisOptions,
) -> Result<BinsReport, CliError> {
    let loaded = load_schedule(activities, dependencies)?;
    let delays = delays(&loaded.network, opts.delay)?;
    Ok(binned_delays(&metric_suite(&loaded.network), &delays, opts)?)
}

pub fn cmd_benchmark(
    activities: &Path,
    dependencies: &Path,
    opts: &AnalysisOptions,
) -> Result<BenchmarkReport, CliError> {
    let loaded = load_schedule(activities, dependencies)?;
    let delays = delays(&loaded.network, opts.delay)?;
    Ok(rank_metrics(
        &metric_suite(&loaded.network),
        &delays,
        mi_bins(opts),
        opts.log_base,
    )?)
}

/// Runs the whole pipeline and writes every artifact plus `manifest.json`
/// into `out`.
pub fn cmd_analyze(
    activities: &Path,
    dependencies: &Path,
    opts: &AnalysisOptions,
    out: &Path,
) -> Result<RunReport, CliError> {
    let loaded = load_schedule(activities, dependencies)?;
    let net = &loaded.network;
    let mut report = RunReport::new(
        "analyze",
        serde_json::to_value(opts).expect("serializable options"),
    );
    report.inputs = loaded.inputs.clone();
    report.stats = Some(loaded.stats.clone());

    let mut w = ArtifactWriter::new(out)?;
    w.write("network.json", &to_json(&NetworkJson::from_network(net)))?;
    w.write("reachability.csv", &reachability_csv(net))?;
    let table = reachability_table(net);
    let n = net.node_count();
    w.write(
        "tail_descendants.csv",
        &tail_distribution(&table, Lineage::Descendants, n).to_csv(),
    )?;
    w.write(
        "tail_ancestors.csv",
        &tail_distribution(&table, Lineage::Ancestors, n).to_csv(),
    )?;

    let suite = metric_suite(net);
    let local = LocalRhVector {
        global: crate::heterogeneity::rh_from_table(&table, n),
        values: find_metric(&suite, MetricName::LocalRh).values.clone(),
    };
    let rh = RhReport::new(net, &local);
    report.global_rh = Some(rh.global);
    report.estrada_rho = estrada_rho(net).ok().map(|s| s.value);
    w.write("rh.json", &rh.to_json())?;
    w.write("rh.csv", &rh.to_csv())?;
    w.write("metrics.csv", &metrics_csv(net, &suite))?;

    match delays(net, opts.delay) {
        Ok(target) => {
            w.write("delays.csv", &delays_csv(net))?;
            match binned_delays(&suite, &target, opts) {
                Ok(bins) => {
                    w.write("bins.csv", &bins.stats.to_csv())?;
                    w.write("bins.json", &bins.to_json())?;
                    if bins.stats.degenerate {
                        report.warn(format!(
                            "{} is constant over nodes with delays; single bin used",
                            opts.bin_metric
                        ));
                    }
                }
                Err(e) => report.warn(format!("binned statistics skipped: {e}")),
            }
            match rank_metrics(&suite, &target, mi_bins(opts), opts.log_base) {
                Ok(bench) => {
                    w.write("benchmark.csv", &bench.to_csv())?;
                    w.write("benchmark.json", &benchmark_json(&bench))?;
                }
                Err(e) => report.warn(format!("mutual information benchmark skipped: {e}")),
            }
        }
        Err(AnalysisError::NoValidDelays) => report.warn(format!(
            "no actual {} dates; performance outputs skipped",
            match opts.delay {
                DelayKind::Start => "start",
                DelayKind::End => "end",
            }
        )),
        Err(e) => return Err(e.into()),
    }

    report.artifacts = w.written.clone();
    w.write("manifest.json", &report.to_json())?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct GenerateParams {
    pub config: GeneratorConfig,
    pub propagation: PropagationConfig,
    /// Seed for delay draws; `None` leaves actual dates empty.
    pub delay_seed: Option<u64>,
}

/// Generates a schedule and writes `activities.csv`, `dependencies.csv` and
/// `manifest.json` into `out`.
pub fn cmd_generate(params: &GenerateParams, out: &Path) -> Result<RunReport, CliError> {
    let planned = generate_dag(&params.config)?;
    let network = match params.delay_seed {
        Some(seed) => simulate_delays(
            &planned,
            &params.propagation,
            &params.config.endogenous_noise,
            seed,
        )?,
        None => planned,
    };
    let mut report = RunReport::new(
        "generate",
        serde_json::to_value(params).expect("serializable params"),
    );
    let wcc = weakly_connected_components(&network);
    report.stats = Some(NetworkStats {
        nodes: network.node_count(),
        dependencies: network.edge_count(),
        wcc_count: wcc.component_count,
        largest_wcc: wcc.largest_component_size,
        isolated_removed: 0,
    });
    let mut w = ArtifactWriter::new(out)?;
    w.write("activities.csv", &io::activities_csv(network.nodes()))?;
    w.write("dependencies.csv", &io::dependencies_csv(&network.dependencies()))?;
    report.artifacts = w.written.clone();
    w.write("manifest.json", &report.to_json())?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_choice_parse() {
        assert_eq!("auto".parse::<BinChoice>().unwrap(), BinChoice::Auto);
        assert_eq!("12".parse::<BinChoice>().unwrap(), BinChoice::Fixed(12));
        assert!("0".parse::<BinChoice>().is_err());
        assert!("many".parse::<BinChoice>().is_err());
    }

    #[test]
    fn rh_report_sorting() {
        let net = ActivityNetwork::from_edges(4, &[(0, 1), (0, 2), (2, 3)]).unwrap();
        let rh = RhReport::new(&net, &rh_local_all(&net));
        for w in rh.local.windows(2) {
            assert!(w[0].value >= w[1].value);
        }
        assert!(rh.to_csv().starts_with("id,value\n"));
        let json: serde_json::Value = serde_json::from_str(&rh.to_json()).unwrap();
        assert_eq!(json["local"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn exit_codes() {
        let cycle = CliError::Schedule(ScheduleError::Graph(GraphError::CycleDetected {
            cycle: vec![],
        }));
        assert_eq!(cycle.exit_code(), 3);
        let empty = CliError::Schedule(ScheduleError::Graph(GraphError::EmptyNetwork));
        assert_eq!(empty.exit_code(), 4);
        let parse = CliError::Schedule(ScheduleError::Parse {
            file: "a".into(),
            line: 2,
            message: "bad".into(),
        });
        assert_eq!(parse.exit_code(), 2);
    }
}
