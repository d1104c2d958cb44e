//! Node metrics benchmarked against local RH.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::heterogeneity::rh_local_all;
use crate::network::ActivityNetwork;
use crate::reachability::reachability_table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    InDegree,
    OutDegree,
    Betweenness,
    Closeness,
    ReverseCloseness,
    Descendants,
    Ancestors,
    LocalRh,
}

impl MetricName {
    /// Suite order, also the column order of the metrics CSV.
    pub const ALL: [MetricName; 8] = [
        MetricName::InDegree,
        MetricName::OutDegree,
        MetricName::Betweenness,
        MetricName::Closeness,
        MetricName::ReverseCloseness,
        MetricName::Descendants,
        MetricName::Ancestors,
        MetricName::LocalRh,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricName::InDegree => "in_degree",
            MetricName::OutDegree => "out_degree",
            MetricName::Betweenness => "betweenness",
            MetricName::Closeness => "closeness",
            MetricName::ReverseCloseness => "reverse_closeness",
            MetricName::Descendants => "descendants",
            MetricName::Ancestors => "ancestors",
            MetricName::LocalRh => "local_rh",
        }
    }
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MetricName::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown metric `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricVector {
    pub name: MetricName,
    pub values: Vec<f64>,
}

impl MetricVector {
    pub fn new(name: MetricName, values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { name, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `(in_degree, out_degree)`.
pub fn degree_metrics(network: &ActivityNetwork) -> (MetricVector, MetricVector) {
    let n = network.node_count();
    let ins = (0..n).map(|i| network.in_degree(i) as f64).collect();
    let outs = (0..n).map(|i| network.out_degree(i) as f64).collect();
    (
        MetricVector::new(MetricName::InDegree, ins),
        MetricVector::new(MetricName::OutDegree, outs),
    )
}

/// Unnormalised directed shortest-path betweenness, endpoints excluded.
pub fn betweenness(network: &ActivityNetwork) -> MetricVector {
    let n = network.node_count();
    let mut centrality = vec![0.0; n];
    let mut stack = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    let mut delta = vec![0.0f64; n];

    for s in 0..n {
        stack.clear();
        for p in preds.iter_mut() {
            p.clear();
        }
        sigma.fill(0.0);
        dist.fill(-1);
        delta.fill(0.0);
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in network.successors(v) {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }
    MetricVector::new(MetricName::Betweenness, centrality)
}

/// Out-closeness with the Wasserman-Faust correction:
/// `C(i) = (r / (n - 1)) * (r / sum of distances)` over the `r` nodes
/// reachable from `i`; zero when nothing is reachable. With `reversed` the
/// same is computed on the edge-reversed graph.
pub fn closeness(network: &ActivityNetwork, reversed: bool) -> MetricVector {
    let n = network.node_count();
    let name = if reversed {
        MetricName::ReverseCloseness
    } else {
        MetricName::Closeness
    };
    let neighbours = |v: usize| {
        if reversed {
            network.predecessors(v)
        } else {
            network.successors(v)
        }
    };
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    let values = (0..n)
        .map(|s| {
            dist.fill(usize::MAX);
            dist[s] = 0;
            queue.push_back(s);
            let (mut reached, mut total) = (0usize, 0usize);
            while let Some(v) = queue.pop_front() {
                for &w in neighbours(v) {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        reached += 1;
                        total += dist[w];
                        queue.push_back(w);
                    }
                }
            }
            if reached == 0 || n < 2 {
                0.0
            } else {
                let r = reached as f64;
                (r / (n - 1) as f64) * (r / total as f64)
            }
        })
        .collect();
    MetricVector::new(name, values)
}

/// All eight metrics in [`MetricName::ALL`] order.
pub fn metric_suite(network: &ActivityNetwork) -> Vec<MetricVector> {
    let (ins, outs) = degree_metrics(network);
    let table = reachability_table(network);
    let to_f64 = |xs: &[usize]| xs.iter().map(|&x| x as f64).collect::<Vec<_>>();
    vec![
        ins,
        outs,
        betweenness(network),
        closeness(network, false),
        closeness(network, true),
        MetricVector::new(MetricName::Descendants, to_f64(table.descendants())),
        MetricVector::new(MetricName::Ancestors, to_f64(table.ancestors())),
        MetricVector::new(MetricName::LocalRh, rh_local_all(network).values),
    ]
}

/// Wide CSV: `id` followed by one column per metric.
pub fn metrics_csv(network: &ActivityNetwork, suite: &[MetricVector]) -> String {
    let mut out = String::from("id");
    for m in suite {
        out.push(',');
        out.push_str(m.name.as_str());
    }
    out.push('\n');
    for (i, id) in network.ids().enumerate() {
        out.push_str(&crate::io::csv_field(id));
        for m in suite {
            out.push_str(&format!(",{}", m.values[i]));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> ActivityNetwork {
        ActivityNetwork::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn diamond() -> ActivityNetwork {
        ActivityNetwork::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn degrees() {
        let (ins, outs) = degree_metrics(&path3());
        assert_eq!(ins.values, vec![0.0, 1.0, 1.0]);
        assert_eq!(outs.values, vec![1.0, 1.0, 0.0]);
        let (ins, outs) = degree_metrics(&diamond());
        assert_eq!(ins.values[3], 2.0);
        assert_eq!(outs.values[0], 2.0);
    }

    #[test]
    fn betweenness_hand_values() {
        assert_eq!(betweenness(&path3()).values, vec![0.0, 1.0, 0.0]);
        assert_eq!(betweenness(&diamond()).values, vec![0.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn closeness_hand_values() {
        let c = closeness(&path3(), false);
        assert!((c.values[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((c.values[1] - 0.5).abs() < 1e-15);
        assert_eq!(c.values[2], 0.0);
        let r = closeness(&path3(), true);
        assert_eq!(r.name, MetricName::ReverseCloseness);
        assert_eq!(r.values, vec![c.values[2], c.values[1], c.values[0]]);
    }

    #[test]
    fn suite_shape() {
        let suite = metric_suite(&path3());
        assert_eq!(suite.len(), 8);
        for (m, name) in suite.iter().zip(MetricName::ALL) {
            assert_eq!(m.name, name);
            assert_eq!(m.len(), 3);
        }
        assert_eq!(suite[5].values, vec![2.0, 1.0, 0.0]);
        assert_eq!(suite[6].values, vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn metric_names_parse() {
        for m in MetricName::ALL {
            assert_eq!(m.as_str().parse::<MetricName>().unwrap(), m);
        }
        assert!("pagerank".parse::<MetricName>().is_err());
    }
}
