//! Activity networks: construction, validation, pruning, components and
//! topological ordering.
//!
//! Nodes are stored in ascending id order, so node indices are a deterministic
//! renumbering of the schedule ids. Edges are kept sorted and deduplicated.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// One schedule row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityRecord {
    pub id: String,
    pub name: String,
    pub planned_start: NaiveDate,
    pub planned_end: NaiveDate,
    pub actual_start: Option<NaiveDate>,
    pub actual_end: Option<NaiveDate>,
}

impl ActivityRecord {
    /// A record with planned dates only.
    pub fn planned(id: impl Into<String>, start: NaiveDate, end: NaiveDate) -> Self {
        let id = id.into();
        Self {
            name: id.clone(),
            id,
            planned_start: start,
            planned_end: end,
            actual_start: None,
            actual_end: None,
        }
    }

    fn validate(&self, index: usize) -> Result<(), GraphError> {
        if self.id.is_empty() {
            return Err(GraphError::EmptyActivityId { index });
        }
        if self.planned_end < self.planned_start {
            return Err(GraphError::InvalidDates {
                id: self.id.clone(),
                reason: "planned_end precedes planned_start".into(),
            });
        }
        if let (Some(s), Some(e)) = (self.actual_start, self.actual_end) {
            if e < s {
                return Err(GraphError::InvalidDates {
                    id: self.id.clone(),
                    reason: "actual_end precedes actual_start".into(),
                });
            }
        }
        Ok(())
    }
}

/// Precedence constraint: `predecessor` must finish before `successor` starts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dependency {
    pub predecessor: String,
    pub successor: String,
}

impl Dependency {
    pub fn new(predecessor: impl Into<String>, successor: impl Into<String>) -> Self {
        Self {
            predecessor: predecessor.into(),
            successor: successor.into(),
        }
    }
}

/// A validated, immutable activity DAG.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityNetwork {
    nodes: Vec<ActivityRecord>,
    edges: Vec<(usize, usize)>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    index_of: BTreeMap<String, usize>,
}

/// Weakly connected component summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentSummary {
    pub component_count: usize,
    pub largest_component_size: usize,
    /// Component label per node; each label is the smallest node index in
    /// that component.
    pub membership: Vec<usize>,
}

impl ComponentSummary {
    pub fn sizes(&self) -> BTreeMap<usize, usize> {
        let mut sizes = BTreeMap::new();
        for &label in &self.membership {
            *sizes.entry(label).or_insert(0) += 1;
        }
        sizes
    }
}

/// Builds a validated network. Duplicate dependency rows collapse to a single
/// edge.
pub fn build_network(
    activities: Vec<ActivityRecord>,
    dependencies: &[Dependency],
) -> Result<ActivityNetwork, GraphError> {
    let mut index_by_row = BTreeMap::new();
    for (row, act) in activities.iter().enumerate() {
        act.validate(row)?;
        if index_by_row.insert(act.id.clone(), row).is_some() {
            return Err(GraphError::DuplicateActivityId {
                id: act.id.clone(),
                index: row,
            });
        }
    }

    let mut nodes = activities;
    nodes.sort_by(|a, b| a.id.cmp(&b.id));
    let index_of: BTreeMap<String, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, a)| (a.id.clone(), i))
        .collect();

    let mut edges = Vec::with_capacity(dependencies.len());
    for (index, dep) in dependencies.iter().enumerate() {
        let lookup = |id: &str| {
            index_of
                .get(id)
                .copied()
                .ok_or_else(|| GraphError::UnknownActivityId {
                    id: id.to_string(),
                    index,
                })
        };
        let s = lookup(&dep.predecessor)?;
        let t = lookup(&dep.successor)?;
        if s == t {
            return Err(GraphError::SelfLoop {
                id: dep.predecessor.clone(),
                index,
            });
        }
        edges.push((s, t));
    }
    let raw = edges.len();
    edges.sort_unstable();
    edges.dedup();
    if edges.len() < raw {
        log::warn!(
            "collapsed {} duplicate dependency row(s)",
            raw - edges.len()
        );
    }

    let net = ActivityNetwork::assemble(nodes, edges, index_of);
    net.check_acyclic()?;
    Ok(net)
}

/// Removes every node with in-degree + out-degree zero.
pub fn prune_isolated(network: &ActivityNetwork) -> Result<ActivityNetwork, GraphError> {
    let keep: Vec<bool> = (0..network.node_count())
        .map(|i| network.in_degree(i) + network.out_degree(i) > 0)
        .collect();
    if !keep.iter().any(|&k| k) {
        return Err(GraphError::EmptyNetwork);
    }
    Ok(network.retain(&keep))
}

/// Components of the undirected view, labelled by smallest member index.
pub fn weakly_connected_components(network: &ActivityNetwork) -> ComponentSummary {
    let n = network.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(s, t) in network.edges() {
        let (rs, rt) = (find(&mut parent, s), find(&mut parent, t));
        if rs != rt {
            // keep the smaller index as root so roots are the labels
            let (lo, hi) = if rs < rt { (rs, rt) } else { (rt, rs) };
            parent[hi] = lo;
        }
    }
    let membership: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    let mut summary = ComponentSummary {
        component_count: 0,
        largest_component_size: 0,
        membership,
    };
    let sizes = summary.sizes();
    summary.component_count = sizes.len();
    summary.largest_component_size = sizes.values().copied().max().unwrap_or(0);
    summary
}

/// Kahn's algorithm with ties broken by ascending node index.
pub fn topological_order(network: &ActivityNetwork) -> Result<Vec<usize>, GraphError> {
    let (order, _) = kahn(&network.succ, &network.pred);
    if order.len() == network.node_count() {
        Ok(order)
    } else {
        Err(GraphError::CycleDetected {
            cycle: network.find_cycle(&order),
        })
    }
}

fn kahn(succ: &[Vec<usize>], pred: &[Vec<usize>]) -> (Vec<usize>, Vec<usize>) {
    let n = succ.len();
    let mut indeg: Vec<usize> = pred.iter().map(Vec::len).collect();
    let mut heap: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&i| indeg[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = heap.pop() {
        order.push(v);
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                heap.push(Reverse(w));
            }
        }
    }
    (order, indeg)
}

impl ActivityNetwork {
    fn assemble(
        nodes: Vec<ActivityRecord>,
        edges: Vec<(usize, usize)>,
        index_of: BTreeMap<String, usize>,
    ) -> Self {
        let n = nodes.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        // edges are sorted, so adjacency lists come out sorted too
        for &(s, t) in &edges {
            succ[s].push(t);
        }
        let mut by_target = edges.clone();
        by_target.sort_unstable_by_key(|&(s, t)| (t, s));
        for &(s, t) in &by_target {
            pred[t].push(s);
        }
        Self {
            nodes,
            edges,
            succ,
            pred,
            index_of,
        }
    }

    /// Network with nodes `0..n` (ids are zero-padded indices) and the given
    /// edges. Handy for tests and synthetic inputs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let epoch = NaiveDate::from_ymd_opt(2020, 1, 1).expect("valid date");
        let width = n.saturating_sub(1).to_string().len();
        let ids: Vec<String> = (0..n).map(|i| format!("{i:0width$}")).collect();
        let acts = ids
            .iter()
            .map(|id| ActivityRecord::planned(id.clone(), epoch, epoch))
            .collect();
        let deps: Vec<Dependency> = edges
            .iter()
            .map(|&(s, t)| {
                let get = |i: usize| ids.get(i).cloned().ok_or(GraphError::UnknownNode(i));
                Ok(Dependency::new(get(s)?, get(t)?))
            })
            .collect::<Result<_, GraphError>>()?;
        build_network(acts, &deps)
    }

    fn check_acyclic(&self) -> Result<(), GraphError> {
        topological_order(self).map(|_| ())
    }

    /// Names one cycle among the nodes Kahn's algorithm could not order.
    fn find_cycle(&self, ordered: &[usize]) -> Vec<String> {
        let n = self.node_count();
        let mut done = vec![false; n];
        for &v in ordered {
            done[v] = true;
        }
        let Some(start) = (0..n).find(|&v| !done[v]) else {
            return Vec::new();
        };
        // every unordered node has an unordered predecessor; walk backwards
        let mut seen_at = vec![usize::MAX; n];
        let mut walk = Vec::new();
        let mut v = start;
        while seen_at[v] == usize::MAX {
            seen_at[v] = walk.len();
            walk.push(v);
            v = *self.pred[v]
                .iter()
                .find(|&&p| !done[p])
                .expect("unordered node keeps an unordered predecessor");
        }
        let mut cycle: Vec<usize> = walk[seen_at[v]..].to_vec();
        cycle.reverse();
        let mut ids: Vec<String> = cycle.iter().map(|&i| self.nodes[i].id.clone()).collect();
        ids.push(ids[0].clone());
        ids
    }

    /// Keeps the flagged nodes and their mutual edges, recompacting indices
    /// while preserving relative order.
    pub(crate) fn retain(&self, keep: &[bool]) -> Self {
        let mut remap = vec![usize::MAX; self.node_count()];
        let mut nodes = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if keep[i] {
                remap[i] = nodes.len();
                nodes.push(node.clone());
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(s, t)| keep[s] && keep[t])
            .map(|&(s, t)| (remap[s], remap[t]))
            .collect();
        let index_of = nodes
            .iter()
            .enumerate()
            .map(|(i, a)| (a.id.clone(), i))
            .collect();
        Self::assemble(nodes, edges, index_of)
    }

    /// Removes one node and its incident edges. Other nodes, including ones
    /// left isolated, are kept.
    pub fn without_node(&self, node: usize) -> Result<Self, GraphError> {
        if node >= self.node_count() {
            return Err(GraphError::UnknownNode(node));
        }
        let keep: Vec<bool> = (0..self.node_count()).map(|i| i != node).collect();
        Ok(self.retain(&keep))
    }

    /// Same nodes, every edge flipped.
    pub fn reversed(&self) -> Self {
        let mut edges: Vec<(usize, usize)> = self.edges.iter().map(|&(s, t)| (t, s)).collect();
        edges.sort_unstable();
        Self::assemble(self.nodes.clone(), edges, self.index_of.clone())
    }

    /// Replaces node records (same ids, same order), e.g. after filling in
    /// actual dates.
    pub fn with_records(&self, records: Vec<ActivityRecord>) -> Result<Self, GraphError> {
        if records.len() != self.node_count() {
            return Err(GraphError::UnknownNode(records.len()));
        }
        for (i, (old, new)) in self.nodes.iter().zip(&records).enumerate() {
            if old.id != new.id {
                return Err(GraphError::UnknownActivityId {
                    id: new.id.clone(),
                    index: i,
                });
            }
            new.validate(i)?;
        }
        Ok(Self {
            nodes: records,
            ..self.clone()
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[ActivityRecord] {
        &self.nodes
    }

    pub fn node(&self, index: usize) -> &ActivityRecord {
        &self.nodes[index]
    }

    /// Sorted, deduplicated `(source, target)` index pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.succ[node]
    }

    pub fn predecessors(&self, node: usize) -> &[usize] {
        &self.pred[node]
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.succ[node].len()
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.pred[node].len()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index_of.get(id).copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.nodes.iter().map(|a| a.id.as_str())
    }

    pub fn dependencies(&self) -> Vec<Dependency> {
        self.edges
            .iter()
            .map(|&(s, t)| Dependency::new(self.nodes[s].id.clone(), self.nodes[t].id.clone()))
            .collect()
    }
}
