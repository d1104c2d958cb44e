//! Random DAGs and brute-force oracles shared by the integration tests. The
//! oracles only use adjacency lists and never call into the library's
//! reachability or centrality code.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reachnet::ActivityNetwork;

/// Random DAG on `n` nodes: each forward pair `(i, j)`, `i < j`, is an edge
/// with probability `p`, then node labels are shuffled so edges do not always
/// point to higher indices.
pub fn random_dag(seed: u64, n: usize, p: f64) -> (usize, Vec<(usize, usize)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((perm[i], perm[j]));
            }
        }
    }
    (n, edges)
}

pub fn network(n: usize, edges: &[(usize, usize)]) -> ActivityNetwork {
    ActivityNetwork::from_edges(n, edges).expect("random dag is valid")
}

/// Draws `count` random DAGs with 3..=max_n nodes.
pub fn dag_family(seed: u64, count: usize, max_n: usize) -> Vec<(usize, Vec<(usize, usize)>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(3..=max_n);
            let p = rng.random_range(0.1..0.6);
            random_dag(rng.random(), n, p)
        })
        .collect()
}

pub fn successors(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut succ = vec![Vec::new(); n];
    for &(s, t) in edges {
        succ[s].push(t);
    }
    succ
}

/// `reach[i][j]`: a directed path of length >= 1 leads from i to j.
pub fn dfs_reach(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let succ = successors(n, edges);
    (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = succ[s].clone();
            while let Some(v) = stack.pop() {
                if !seen[v] {
                    seen[v] = true;
                    stack.extend(&succ[v]);
                }
            }
            seen
        })
        .collect()
}

/// Direct evaluation of the global RH sum over DFS-derived pairs.
pub fn rh_oracle(n: usize, edges: &[(usize, usize)]) -> f64 {
    let reach = dfs_reach(n, edges);
    let d: Vec<usize> = reach.iter().map(|r| r.iter().filter(|&&x| x).count()).collect();
    let a: Vec<usize> = (0..n).map(|j| (0..n).filter(|&i| reach[i][j]).count()).collect();
    let mut sum = 0.0;
    let mut pairs = 0;
    for i in 0..n {
        for j in 0..n {
            if reach[i][j] {
                let t = 1.0 / (d[i] as f64).sqrt() - 1.0 / (a[j] as f64).sqrt();
                sum += t * t;
                pairs += 1;
            }
        }
    }
    if n <= 2 || pairs == 0 {
        0.0
    } else {
        sum / (n as f64 - 2.0 * ((n - 1) as f64).sqrt())
    }
}

/// All-pairs BFS distances; `usize::MAX` where unreachable.
pub fn bfs_distances(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let succ = successors(n, edges);
    (0..n)
        .map(|s| {
            let mut dist = vec![usize::MAX; n];
            dist[s] = 0;
            let mut frontier = vec![s];
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for v in frontier {
                    for &w in &succ[v] {
                        if dist[w] == usize::MAX {
                            dist[w] = dist[v] + 1;
                            next.push(w);
                        }
                    }
                }
                frontier = next;
            }
            dist
        })
        .collect()
}

/// Betweenness by listing every geodesic explicitly.
pub fn betweenness_oracle(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let succ = successors(n, edges);
    let dist = bfs_distances(n, edges);
    let mut score = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t || dist[s][t] == usize::MAX {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(path) = stack.pop() {
                let last = *path.last().unwrap();
                if last == t {
                    paths.push(path);
                    continue;
                }
                for &w in &succ[last] {
                    if dist[s][w] == path.len() && dist[w][t] != usize::MAX {
                        let mut longer = path.clone();
                        longer.push(w);
                        stack.push(longer);
                    }
                }
            }
            let total = paths.len() as f64;
            for path in &paths {
                for &v in &path[1..path.len() - 1] {
                    score[v] += 1.0 / total;
                }
            }
        }
    }
    score
}

/// Component labels by repeated min-label propagation over undirected edges.
pub fn label_propagation(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut label: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for &(s, t) in edges {
            let m = label[s].min(label[t]);
            if label[s] != m || label[t] != m {
                label[s] = m;
                label[t] = m;
                changed = true;
            }
        }
        if !changed {
            return label;
        }
    }
}

/// Network without node `removed`, rebuilt from scratch with recompacted
/// indices.
pub fn rebuild_without(n: usize, edges: &[(usize, usize)], removed: usize) -> ActivityNetwork {
    let shift = |v: usize| if v > removed { v - 1 } else { v };
    let kept: Vec<(usize, usize)> = edges
        .iter()
        .filter(|&&(s, t)| s != removed && t != removed)
        .map(|&(s, t)| (shift(s), shift(t)))
        .collect();
    network(n - 1, &kept)
}

pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let sxy: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}
