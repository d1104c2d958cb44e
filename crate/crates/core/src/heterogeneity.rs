//! Degree heterogeneity and reachability heterogeneity (RH) scores.
//!
//! Both scores share the normalisation `1 / (n - 2 sqrt(n - 1))` with `n` the
//! node count. It vanishes at `n = 2`, where every raw sum is zero anyway, so
//! scores are defined as 0 for `n <= 2` and for empty summation domains.

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::GraphError;
use crate::network::{topological_order, ActivityNetwork};
use crate::reachability::{reachability_table, ReachabilityTable};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeterogeneityScore {
    pub value: f64,
    /// Node count used in the normalisation.
    pub n: usize,
    /// Number of summed terms.
    pub pair_count: usize,
}

/// Per-node local RH values, indexed like the network's nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalRhVector {
    pub global: HeterogeneityScore,
    pub values: Vec<f64>,
}

fn normalisation(n: usize) -> f64 {
    let n = n as f64;
    n - 2.0 * (n - 1.0).sqrt()
}

fn inv_sqrt(k: usize) -> f64 {
    1.0 / (k as f64).sqrt()
}

fn term(out_size: usize, in_size: usize) -> f64 {
    debug_assert!(out_size >= 1 && in_size >= 1);
    let diff = inv_sqrt(out_size) - inv_sqrt(in_size);
    diff * diff
}

/// `1 / sqrt(k)` for `k` in `0..=n`.
fn inv_sqrt_table(n: usize) -> Vec<f64> {
    (0..=n).map(inv_sqrt).collect()
}

/// Sum of RH terms over one row: `c = 1/sqrt(d_i)` against `b[j] = 1/sqrt(a_j)`
/// for every `j` in the row's set, ascending.
fn row_sum(row: &FixedBitSet, c: f64, b: &[f64]) -> f64 {
    const BITS: usize = usize::BITS as usize;
    let mut sum = 0.0;
    for (k, &block) in row.as_slice().iter().enumerate() {
        let mut w = block;
        while w != 0 {
            let diff = c - b[k * BITS + w.trailing_zeros() as usize];
            sum += diff * diff;
            w &= w - 1;
        }
    }
    sum
}

/// Per-source partial sums of the RH terms; the global sum adds them in
/// source order.
fn row_sums(table: &ReachabilityTable, inv: &[f64]) -> Vec<f64> {
    let b: Vec<f64> = table.ancestors().iter().map(|&a| inv[a]).collect();
    (0..table.node_count())
        .map(|i| row_sum(table.descendant_bits(i), inv[table.descendants()[i]], &b))
        .collect()
}

fn score(sum: f64, pair_count: usize, n: usize) -> HeterogeneityScore {
    let value = if n <= 2 || pair_count == 0 {
        0.0
    } else {
        sum / normalisation(n)
    };
    HeterogeneityScore {
        value,
        n,
        pair_count,
    }
}

/// Degree-based directed heterogeneity, summed over edges.
pub fn estrada_rho(network: &ActivityNetwork) -> Result<HeterogeneityScore, GraphError> {
    let n = network.node_count();
    let sum: f64 = network
        .edges()
        .iter()
        .map(|&(i, j)| term(network.out_degree(i), network.in_degree(j)))
        .sum();
    let pair_count = network.edge_count();
    if n == 2 && sum != 0.0 {
        return Err(GraphError::DegenerateNormalization { n, sum });
    }
    let value = if n <= 2 || pair_count == 0 {
        0.0
    } else {
        sum / normalisation(n)
    };
    Ok(HeterogeneityScore {
        value,
        n,
        pair_count,
    })
}

/// Global RH over all reachable ordered pairs.
pub fn rh_global(network: &ActivityNetwork) -> HeterogeneityScore {
    rh_from_table(&reachability_table(network), network.node_count())
}

/// Global RH from a precomputed table; `n` is the node count to normalise by.
pub fn rh_from_table(table: &ReachabilityTable, n: usize) -> HeterogeneityScore {
    let rows = row_sums(table, &inv_sqrt_table(table.node_count()));
    score(rows.iter().fold(0.0, |s, r| s + r), table.pair_count(), n)
}

/// Drop in global RH when `node` and its incident edges are removed.
pub fn rh_local(network: &ActivityNetwork, node: usize) -> Result<f64, GraphError> {
    let reduced = network.without_node(node)?;
    Ok(rh_global(network).value - rh_global(&reduced).value)
}

/// Local RH for every node.
///
/// Removing `v` only changes the descendant sets of its ancestors and the
/// ancestor counts of its descendants, so only those lineages are rebuilt and
/// only rows touching them are re-summed; other rows reuse the full network's
/// partial sums. Rows are combined in source order exactly as a rebuilt graph
/// would, so results match [`rh_local`] bit for bit.
pub fn rh_local_all(network: &ActivityNetwork) -> LocalRhVector {
    let n = network.node_count();
    let table = reachability_table(network);
    let inv = inv_sqrt_table(n);
    let rows = row_sums(&table, &inv);
    let global = score(rows.iter().fold(0.0, |s, r| s + r), table.pair_count(), n);
    let order = topological_order(network).expect("validated network is acyclic");
    let values = (0..n)
        .into_par_iter()
        .map(|v| global.value - rh_without(network, &table, &order, &rows, &inv, v).value)
        .collect();
    LocalRhVector { global, values }
}

fn rh_without(
    network: &ActivityNetwork,
    table: &ReachabilityTable,
    order: &[usize],
    rows: &[f64],
    inv: &[f64],
    v: usize,
) -> HeterogeneityScore {
    let n = network.node_count();
    let below = table.descendant_bits(v);
    let above = table.ancestor_bits(v);

    let mut desc: Vec<Option<FixedBitSet>> = vec![None; n];
    for &u in order.iter().rev().filter(|&&u| above.contains(u)) {
        let mut acc = FixedBitSet::with_capacity(n);
        for &w in network.successors(u).iter().filter(|&&w| w != v) {
            acc.insert(w);
            acc.union_with(desc[w].as_ref().unwrap_or_else(|| table.descendant_bits(w)));
        }
        desc[u] = Some(acc);
    }
    let mut anc: Vec<Option<FixedBitSet>> = vec![None; n];
    for &u in order.iter().filter(|&&u| below.contains(u)) {
        let mut acc = FixedBitSet::with_capacity(n);
        for &p in network.predecessors(u).iter().filter(|&&p| p != v) {
            acc.insert(p);
            acc.union_with(anc[p].as_ref().unwrap_or_else(|| table.ancestor_bits(p)));
        }
        anc[u] = Some(acc);
    }

    let mut b: Vec<f64> = table.ancestors().iter().map(|&a| inv[a]).collect();
    for j in below.ones() {
        b[j] = inv[anc[j].as_ref().map_or(0, |s| s.count_ones(..))];
    }
    let mut sum = 0.0;
    let mut pairs = 0;
    for i in (0..n).filter(|&i| i != v) {
        let (set, rebuilt) = match &desc[i] {
            Some(s) => (s, true),
            None => (table.descendant_bits(i), false),
        };
        let d = if rebuilt { set.count_ones(..) } else { table.descendants()[i] };
        pairs += d;
        sum += if rebuilt || !set.is_disjoint(below) {
            row_sum(set, inv[d], &b)
        } else {
            rows[i]
        };
    }
    score(sum, pairs, n - 1)
}
