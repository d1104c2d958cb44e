//! Reachability-heterogeneity analysis of project activity networks.
//!
//! Schedules (activities plus precedence dependencies) become validated DAGs
//! ([`network`]). On those we compute descendant/ancestor counts
//! ([`reachability`]), the global and per-node reachability-heterogeneity
//! scores ([`heterogeneity`]), a suite of benchmark node metrics
//! ([`metrics`]), delay indicators with binned statistics ([`performance`]),
//! and histogram mutual information between metrics and delays ([`info`]).
//! [`synth`] generates seeded test projects and [`report`] ties everything
//! into the `reachnet` command-line pipeline.

pub mod error;
pub mod heterogeneity;
pub mod info;
pub mod io;
pub mod metrics;
pub mod network;
pub mod performance;
pub mod reachability;
pub mod report;
pub mod synth;

pub use error::{AnalysisError, GeneratorError, GraphError};
pub use heterogeneity::{estrada_rho, rh_global, rh_local, rh_local_all, HeterogeneityScore, LocalRhVector};
pub use info::{benchmark_metrics, frequency_matrix, mutual_information, BenchmarkReport, FrequencyMatrix, LogBase};
pub use metrics::{betweenness, closeness, degree_metrics, metric_suite, MetricName, MetricVector};
pub use network::{
    build_network, prune_isolated, topological_order, weakly_connected_components, ActivityNetwork,
    ActivityRecord, ComponentSummary, Dependency,
};
pub use performance::{bin_by_metric, end_delay, start_delay, BinnedStats, DelayKind, DelayVector};
pub use reachability::{reachability_table, tail_distribution, Lineage, ReachabilityTable, TailDistribution};
pub use synth::{generate_dag, simulate_delays, GeneratorConfig, NoiseModel, PropagationConfig};
