//! Descendant and ancestor counts over an activity DAG.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::network::{topological_order, ActivityNetwork};

/// Proper reachability (paths of length at least one) for every node.
#[derive(Debug, Clone)]
pub struct ReachabilityTable {
    descendants: Vec<usize>,
    ancestors: Vec<usize>,
    sets: Vec<FixedBitSet>,
    ancestor_sets: Vec<FixedBitSet>,
}

impl ReachabilityTable {
    /// `d_i`: number of nodes reachable from `i`.
    pub fn descendants(&self) -> &[usize] {
        &self.descendants
    }

    /// `a_i`: number of nodes that reach `i`.
    pub fn ancestors(&self) -> &[usize] {
        &self.ancestors
    }

    pub fn node_count(&self) -> usize {
        self.descendants.len()
    }

    pub fn is_reachable(&self, from: usize, to: usize) -> bool {
        self.sets[from].contains(to)
    }

    /// Descendant set of `node`, ascending.
    pub fn descendant_set(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.sets[node].ones()
    }

    /// Every `(i, j)` with `j` a proper descendant of `i`, ordered by `i` then `j`.
    pub fn reachable_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.sets
            .iter()
            .enumerate()
            .flat_map(|(i, set)| set.ones().map(move |j| (i, j)))
    }

    pub fn pair_count(&self) -> usize {
        self.descendants.iter().sum()
    }
}

pub fn reachability_table(network: &ActivityNetwork) -> ReachabilityTable {
    let order = topological_order(network).expect("validated network is acyclic");
    let n = network.node_count();
    let sets = lineage_sets(n, order.iter().rev().copied(), |v| network.successors(v));
    let ancestor_sets = lineage_sets(n, order.iter().copied(), |v| network.predecessors(v));
    ReachabilityTable {
        descendants: sets.iter().map(|s| s.count_ones(..)).collect(),
        ancestors: ancestor_sets.iter().map(|s| s.count_ones(..)).collect(),
        sets,
        ancestor_sets,
    }
}

/// Unions neighbour sets along `order`, which must visit every node after all
/// of its neighbours.
fn lineage_sets<'a>(
    n: usize,
    order: impl Iterator<Item = usize>,
    neighbours: impl Fn(usize) -> &'a [usize],
) -> Vec<FixedBitSet> {
    let mut sets = vec![FixedBitSet::with_capacity(n); n];
    for v in order {
        let mut acc = FixedBitSet::with_capacity(n);
        for &w in neighbours(v) {
            acc.insert(w);
            acc.union_with(&sets[w]);
        }
        sets[v] = acc;
    }
    sets
}

impl ReachabilityTable {
    pub(crate) fn descendant_bits(&self, node: usize) -> &FixedBitSet {
        &self.sets[node]
    }

    pub(crate) fn ancestor_bits(&self, node: usize) -> &FixedBitSet {
        &self.ancestor_sets[node]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lineage {
    Descendants,
    Ancestors,
}

/// Reverse cumulative distribution of lineage size as a fraction of `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailDistribution {
    pub thresholds: Vec<f64>,
    pub frequency: Vec<usize>,
}

impl TailDistribution {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,count\n");
        for (t, c) in self.thresholds.iter().zip(&self.frequency) {
            out.push_str(&format!("{t},{c}\n"));
        }
        out
    }
}

/// Thresholds are the distinct observed fractions; each frequency counts the
/// nodes at or above its threshold.
pub fn tail_distribution(table: &ReachabilityTable, which: Lineage, n: usize) -> TailDistribution {
    assert!(n >= 1, "tail distribution needs n >= 1");
    let counts = match which {
        Lineage::Descendants => table.descendants(),
        Lineage::Ancestors => table.ancestors(),
    };
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let mut thresholds = Vec::new();
    let mut frequency = Vec::new();
    let total = sorted.len();
    let mut k = 0;
    while k < total {
        let value = sorted[k];
        thresholds.push(value as f64 / n as f64);
        frequency.push(total - k);
        while k < total && sorted[k] == value {
            k += 1;
        }
    }
    TailDistribution {
        thresholds,
        frequency,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> ActivityNetwork {
        ActivityNetwork::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn chain_counts() {
        let t = reachability_table(&path3());
        assert_eq!(t.descendants(), &[2, 1, 0]);
        assert_eq!(t.ancestors(), &[0, 1, 2]);
        assert_eq!(t.pair_count(), 3);
    }

    #[test]
    fn diamond_pairs() {
        let net = ActivityNetwork::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let t = reachability_table(&net);
        assert_eq!(t.descendants()[0], 3);
        assert_eq!(t.ancestors()[3], 3);
        let pairs: Vec<_> = t.reachable_pairs().collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)]);
    }

    #[test]
    fn chain_tail_distribution() {
        let t = reachability_table(&path3());
        let desc = tail_distribution(&t, Lineage::Descendants, 3);
        assert_eq!(desc.thresholds, vec![0.0, 1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!(desc.frequency, vec![3, 2, 1]);
        assert_eq!(tail_distribution(&t, Lineage::Ancestors, 3), desc);
    }

    #[test]
    fn uniform_lineage_is_one_step() {
        let net = ActivityNetwork::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let t = reachability_table(&net);
        let anc = tail_distribution(&t, Lineage::Ancestors, 4);
        assert_eq!(anc.frequency, vec![4, 2]);
        let csv = anc.to_csv();
        assert!(csv.starts_with("threshold,count\n0,4\n0.25,2"));
    }
}
