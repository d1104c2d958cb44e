//! Seeded layered DAG generator and a max-plus delay propagation model used
//! to produce test schedules with known structure.

use std::fmt;
use std::str::FromStr;

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeneratorError, GraphError};
use crate::network::{
    build_network, prune_isolated, topological_order, ActivityNetwork, ActivityRecord, Dependency,
};

/// Planned start of every root activity.
pub fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 1, 6).expect("valid date")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LayerWidth {
    Fixed(usize),
    PerLayer(Vec<usize>),
}

/// Per-activity fluctuation in days.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    #[default]
    None,
    /// Integer uniformly drawn from `lo..=hi`.
    Uniform { lo: i64, hi: i64 },
    /// `days` with probability `p`, else 0.
    TwoPoint { p: f64, days: i64 },
}

impl NoiseModel {
    pub fn sample<R: Rng>(&self, rng: &mut R) -> i64 {
        match *self {
            NoiseModel::None => 0,
            NoiseModel::Uniform { lo, hi } => rng.random_range(lo..=hi),
            NoiseModel::TwoPoint { p, days } => {
                if rng.random_bool(p) {
                    days
                } else {
                    0
                }
            }
        }
    }

    fn validate(&self) -> Result<(), GeneratorError> {
        match *self {
            NoiseModel::Uniform { lo, hi } if lo > hi => Err(GeneratorError::InvalidConfig(
                format!("uniform noise needs lo <= hi, got {lo} > {hi}"),
            )),
            NoiseModel::TwoPoint { p, .. } if !(0.0..=1.0).contains(&p) => Err(
                GeneratorError::InvalidConfig(format!("two-point probability {p} outside [0, 1]")),
            ),
            _ => Ok(()),
        }
    }
}

/// `none`, `uniform:LO:HI` or `two-point:P:DAYS`.
impl FromStr for NoiseModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || format!("invalid noise model `{s}`");
        match parts.as_slice() {
            ["none"] => Ok(NoiseModel::None),
            ["uniform", lo, hi] => Ok(NoiseModel::Uniform {
                lo: lo.parse().map_err(|_| bad())?,
                hi: hi.parse().map_err(|_| bad())?,
            }),
            ["two-point", p, days] => Ok(NoiseModel::TwoPoint {
                p: p.parse().map_err(|_| bad())?,
                days: days.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseModel::None => write!(f, "none"),
            NoiseModel::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
            NoiseModel::TwoPoint { p, days } => write!(f, "two-point:{p}:{days}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub layer_count: usize,
    pub layer_width: LayerWidth,
    /// Probability of each candidate edge between layers at distance
    /// `1..=skip_depth`.
    pub edge_probability: f64,
    pub skip_depth: usize,
    pub seed: u64,
    /// Inclusive range of planned durations.
    pub base_duration_days: [u32; 2],
    #[serde(default)]
    pub endogenous_noise: NoiseModel,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            layer_count: 40,
            layer_width: LayerWidth::Fixed(17),
            edge_probability: 0.0215,
            skip_depth: 3,
            seed: 42,
            base_duration_days: [1, 10],
            endogenous_noise: NoiseModel::TwoPoint { p: 0.05, days: 20 },
        }
    }
}

impl GeneratorConfig {
    fn widths(&self) -> Vec<usize> {
        match &self.layer_width {
            LayerWidth::Fixed(w) => vec![*w; self.layer_count],
            LayerWidth::PerLayer(ws) => ws.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        let invalid = |msg: String| Err(GeneratorError::InvalidConfig(msg));
        if self.layer_count == 0 {
            return invalid("layer_count must be positive".into());
        }
        let widths = self.widths();
        if widths.len() != self.layer_count {
            return invalid(format!(
                "{} layer widths given for {} layers",
                widths.len(),
                self.layer_count
            ));
        }
        if widths.contains(&0) {
            return invalid("layer widths must be positive".into());
        }
        if !(self.edge_probability > 0.0 && self.edge_probability <= 1.0) {
            return invalid(format!(
                "edge_probability {} outside (0, 1]",
                self.edge_probability
            ));
        }
        if self.skip_depth == 0 {
            return invalid("skip_depth must be positive".into());
        }
        let [lo, hi] = self.base_duration_days;
        if lo == 0 || lo > hi {
            return invalid(format!("bad duration range [{lo}, {hi}]"));
        }
        self.endogenous_noise.validate()
    }
}

/// Layered random DAG with planned dates from a forward pass. Isolated nodes
/// are pruned.
pub fn generate_dag(config: &GeneratorConfig) -> Result<ActivityNetwork, GeneratorError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let widths = config.widths();
    let total: usize = widths.iter().sum();
    let digits = total.to_string().len();

    let mut layers: Vec<Vec<String>> = Vec::with_capacity(widths.len());
    let mut next = 0usize;
    for &w in &widths {
        layers.push(
            (0..w)
                .map(|_| {
                    next += 1;
                    format!("A{:0digits$}", next - 1)
                })
                .collect(),
        );
    }

    let mut deps = Vec::new();
    for (l, layer) in layers.iter().enumerate() {
        for src in layer {
            for target in layers.iter().skip(l + 1).take(config.skip_depth) {
                for dst in target {
                    if rng.random_bool(config.edge_probability) {
                        deps.push(Dependency::new(src.clone(), dst.clone()));
                    }
                }
            }
        }
    }

    let placeholder: Vec<ActivityRecord> = layers
        .iter()
        .flatten()
        .map(|id| ActivityRecord::planned(id.clone(), epoch(), epoch()))
        .collect();
    let full = build_network(placeholder, &deps)?;
    let pruned = match prune_isolated(&full) {
        Ok(net) => net,
        Err(GraphError::EmptyNetwork) => return Err(GeneratorError::DegenerateConfig),
        Err(other) => return Err(other.into()),
    };

    let [lo, hi] = config.base_duration_days;
    let durations: Vec<u64> = (0..pruned.node_count())
        .map(|_| u64::from(rng.random_range(lo..=hi)))
        .collect();
    let order = topological_order(&pruned)?;
    let mut records = pruned.nodes().to_vec();
    for &v in &order {
        let start = pruned
            .predecessors(v)
            .iter()
            .map(|&p| records[p].planned_end)
            .max()
            .unwrap_or_else(epoch);
        records[v].planned_start = start;
        records[v].planned_end = start + Days::new(durations[v]);
        records[v].name = format!("activity {}", records[v].id);
    }
    Ok(pruned.with_records(records)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropagationConfig {
    /// Inherited delay is reduced by this many days.
    pub slack_days: u32,
    /// Start delays never go below zero.
    pub clamp_negative: bool,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            slack_days: 1,
            clamp_negative: true,
        }
    }
}

/// Random inputs of one activity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NodeDraw {
    /// Start delay the activity would have with no upstream influence.
    pub early_start: i64,
    /// Added to the start delay to give the end delay.
    pub endogenous: i64,
}

/// One draw per node in index order: the endogenous fluctuation from `noise`
/// and an early-start offset mirroring a second `noise` sample.
pub fn draw_noise(node_count: usize, noise: &NoiseModel, seed: u64) -> Vec<NodeDraw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..node_count)
        .map(|_| {
            let endogenous = noise.sample(&mut rng);
            let early_start = -noise.sample(&mut rng);
            NodeDraw {
                early_start,
                endogenous,
            }
        })
        .collect()
}

/// Start and end delays from explicit per-node draws, in topological order:
/// `start = max(floor, max over predecessors of (end - slack), early_start)`
/// and `end = start + endogenous`, where `floor` is 0 with clamping on. The
/// end delay is limited so the actual end never precedes the actual start.
pub fn propagate_delays(
    network: &ActivityNetwork,
    config: &PropagationConfig,
    draws: &[NodeDraw],
) -> Vec<(i64, i64)> {
    assert_eq!(draws.len(), network.node_count(), "one draw per node");
    let order = topological_order(network).expect("validated network is acyclic");
    let slack = i64::from(config.slack_days);
    let mut delays = vec![(0i64, 0i64); network.node_count()];
    for &v in &order {
        let mut start = draws[v].early_start;
        if config.clamp_negative {
            start = start.max(0);
        }
        for &p in network.predecessors(v) {
            start = start.max(delays[p].1 - slack);
        }
        let node = network.node(v);
        let duration = (node.planned_end - node.planned_start).num_days();
        let end = (start + draws[v].endogenous).max(start - duration);
        delays[v] = (start, end);
    }
    delays
}

/// Fills actual dates on a copy of `network` using seeded draws from `noise`.
pub fn simulate_delays(
    network: &ActivityNetwork,
    config: &PropagationConfig,
    noise: &NoiseModel,
    seed: u64,
) -> Result<ActivityNetwork, GeneratorError> {
    noise.validate()?;
    let draws = draw_noise(network.node_count(), noise, seed);
    apply_delays(network, &propagate_delays(network, config, &draws))
}

/// Writes `(start, end)` delays into the actual dates.
pub fn apply_delays(
    network: &ActivityNetwork,
    delays: &[(i64, i64)],
) -> Result<ActivityNetwork, GeneratorError> {
    let shift = |d: NaiveDate, by: i64| d + chrono::Duration::days(by);
    let records = network
        .nodes()
        .iter()
        .zip(delays)
        .map(|(a, &(s, e))| ActivityRecord {
            actual_start: Some(shift(a.planned_start, s)),
            actual_end: Some(shift(a.planned_end, e)),
            ..a.clone()
        })
        .collect();
    Ok(network.with_records(records)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::performance::{end_delay, start_delay};

    fn chain_config() -> GeneratorConfig {
        GeneratorConfig {
            layer_count: 3,
            layer_width: LayerWidth::Fixed(1),
            edge_probability: 1.0,
            skip_depth: 1,
            seed: 7,
            base_duration_days: [2, 5],
            endogenous_noise: NoiseModel::None,
        }
    }

    #[test]
    fn forced_path() {
        let net = generate_dag(&chain_config()).unwrap();
        assert_eq!(net.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(net.node(0).planned_start, epoch());
        assert_eq!(net.node(1).planned_start, net.node(0).planned_end);
        assert_eq!(net.node(2).planned_start, net.node(1).planned_end);
    }

    #[test]
    fn single_layer_is_degenerate() {
        let cfg = GeneratorConfig {
            layer_count: 1,
            layer_width: LayerWidth::Fixed(4),
            ..chain_config()
        };
        assert_eq!(generate_dag(&cfg), Err(GeneratorError::DegenerateConfig));
    }

    #[test]
    fn config_validation() {
        let bad = [
            GeneratorConfig { layer_count: 0, ..chain_config() },
            GeneratorConfig { edge_probability: 0.0, ..chain_config() },
            GeneratorConfig { skip_depth: 0, ..chain_config() },
            GeneratorConfig { base_duration_days: [3, 2], ..chain_config() },
            GeneratorConfig { layer_width: LayerWidth::PerLayer(vec![1, 2]), ..chain_config() },
            GeneratorConfig {
                endogenous_noise: NoiseModel::Uniform { lo: 2, hi: 1 },
                ..chain_config()
            },
        ];
        for cfg in bad {
            assert!(matches!(generate_dag(&cfg), Err(GeneratorError::InvalidConfig(_))));
        }
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let cfg = GeneratorConfig::default();
        let a = generate_dag(&cfg).unwrap();
        let b = generate_dag(&cfg).unwrap();
        assert_eq!(a, b);
        let other = generate_dag(&GeneratorConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a.edges(), other.edges());
    }

    #[test]
    fn quiescent_system() {
        let net = generate_dag(&GeneratorConfig::default()).unwrap();
        let sim = simulate_delays(&net, &PropagationConfig::default(), &NoiseModel::None, 1).unwrap();
        assert!(start_delay(&sim).unwrap().values.iter().all(|d| *d == Some(0)));
        assert!(end_delay(&sim).unwrap().values.iter().all(|d| *d == Some(0)));
    }

    #[test]
    fn seeded_root_delay_propagates() {
        let net = ActivityNetwork::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        let mut draws = vec![NodeDraw::default(); 4];
        draws[0].endogenous = 5;
        let tight = PropagationConfig {
            slack_days: 0,
            clamp_negative: true,
        };
        let delays = propagate_delays(&net, &tight, &draws);
        let starts: Vec<i64> = delays.iter().map(|d| d.0).collect();
        assert_eq!(starts, vec![0, 5, 5, 0]);

        let absorbed = PropagationConfig {
            slack_days: 5,
            clamp_negative: true,
        };
        let delays = propagate_delays(&net, &absorbed, &draws);
        assert_eq!(delays.iter().map(|d| d.0).collect::<Vec<_>>(), vec![0, 0, 0, 0]);
    }

    #[test]
    fn unclamped_early_starts() {
        let net = ActivityNetwork::from_edges(2, &[(0, 1)]).unwrap();
        let draws = [
            NodeDraw { early_start: -3, endogenous: 0 },
            NodeDraw { early_start: -1, endogenous: 0 },
        ];
        let cfg = PropagationConfig {
            slack_days: 0,
            clamp_negative: false,
        };
        assert_eq!(propagate_delays(&net, &cfg, &draws), vec![(-3, -3), (-1, -1)]);
    }

    #[test]
    fn noise_model_parsing() {
        for text in ["none", "uniform:-2:4", "two-point:0.25:7"] {
            let m: NoiseModel = text.parse().unwrap();
            assert_eq!(m.to_string(), text);
        }
        assert!("uniform:1".parse::<NoiseModel>().is_err());
        assert!("gauss:0:1".parse::<NoiseModel>().is_err());
    }

    #[test]
    fn config_from_json() {
        let cfg: GeneratorConfig = serde_json::from_str(
            r#"{"layer_count":3,"layer_width":[1,2,1],"edge_probability":0.5,
                "skip_depth":2,"seed":9,"base_duration_days":[1,3],
                "endogenous_noise":{"kind":"two_point","p":0.1,"days":4}}"#,
        )
        .unwrap();
        assert_eq!(cfg.layer_width, LayerWidth::PerLayer(vec![1, 2, 1]));
        assert_eq!(cfg.endogenous_noise, NoiseModel::TwoPoint { p: 0.1, days: 4 });
    }
}
