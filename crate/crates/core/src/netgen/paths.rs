use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::Network;
use crate::error::{CvnetError, Result};

/// Hop distances from `start` on the unweighted support of the adjacency.
pub fn bfs_distances(net: &Network, start: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; net.n()];
    let mut queue = VecDeque::new();
    dist[start] = Some(0);
    queue.push_back(start);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap_or(0);
        for &v in net.neighbors(u) {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// All shortest paths between two nodes. `distance` is `None` when they
/// are disconnected, in which case `paths` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSet {
    pub source: usize,
    pub target: usize,
    pub distance: Option<usize>,
    pub paths: Vec<Vec<usize>>,
}

/// The subgraph of nodes lying on some shortest `source`–`target` path.
///
/// Paths are produced lazily in lexicographic order of their node
/// sequences, so callers can walk graphs whose path count is large.
#[derive(Debug, Clone)]
pub struct ShortestPathDag<'a> {
    net: &'a Network,
    source: usize,
    target: usize,
    from_source: Vec<Option<usize>>,
    to_target: Vec<Option<usize>>,
}

impl<'a> ShortestPathDag<'a> {
    pub fn new(net: &'a Network, source: usize, target: usize) -> Result<Self> {
        Self::with_source_distances(net, source, target, bfs_distances(net, source))
    }

    /// Reuses BFS distances from `source` that the caller already holds.
    pub fn with_source_distances(
        net: &'a Network,
        source: usize,
        target: usize,
        from_source: Vec<Option<usize>>,
    ) -> Result<Self> {
        net.check_node(source)?;
        net.check_node(target)?;
        if source == target {
            return Err(CvnetError::InvalidParameter(format!(
                "source and target are the same node {source}"
            )));
        }
        let to_target =
            if from_source[target].is_some() { bfs_distances(net, target) } else { vec![None; net.n()] };
        Ok(ShortestPathDag { net, source, target, from_source, to_target })
    }

    pub fn distance(&self) -> Option<usize> {
        self.from_source[self.target]
    }

    fn on_dag(&self, v: usize, depth: usize) -> bool {
        match (self.distance(), self.from_source[v], self.to_target[v]) {
            (Some(d), Some(a), Some(b)) => a == depth && a + b == d,
            _ => false,
        }
    }

    /// Number of shortest paths, saturating at `u64::MAX`.
    pub fn count(&self) -> u64 {
        let Some(d) = self.distance() else {
            return 0;
        };
        let mut layers: Vec<Vec<usize>> = vec![Vec::new(); d + 1];
        for v in 0..self.net.n() {
            if let Some(a) = self.from_source[v] {
                if a <= d && self.on_dag(v, a) {
                    layers[a].push(v);
                }
            }
        }
        let mut ways = vec![0u64; self.net.n()];
        ways[self.source] = 1;
        for (depth, layer) in layers.iter().enumerate().take(d + 1).skip(1) {
            for &v in layer {
                ways[v] = self
                    .net
                    .neighbors(v)
                    .iter()
                    .filter(|&&u| self.on_dag(u, depth - 1))
                    .fold(0u64, |acc, &u| acc.saturating_add(ways[u]));
            }
        }
        ways[self.target]
    }

    /// Nodes (other than the endpoints) lying on at least one shortest path.
    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.net.n())
            .filter(|&v| v != self.source && v != self.target)
            .filter(|&v| self.from_source[v].is_some_and(|a| self.on_dag(v, a)))
            .collect()
    }

    pub fn paths(&self) -> PathIter<'_, 'a> {
        PathIter {
            dag: self,
            stack: if self.distance().is_some() { vec![(self.source, 0)] } else { Vec::new() },
        }
    }

    pub fn to_path_set(&self) -> PathSet {
        PathSet {
            source: self.source,
            target: self.target,
            distance: self.distance(),
            paths: self.paths().collect(),
        }
    }
}

/// Depth-first walk of a [`ShortestPathDag`]; each stack frame holds a node
/// and the position of the next neighbor to try.
pub struct PathIter<'d, 'a> {
    dag: &'d ShortestPathDag<'a>,
    stack: Vec<(usize, usize)>,
}

impl Iterator for PathIter<'_, '_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let target = self.dag.target;
        while let Some(&(u, start)) = self.stack.last() {
            if u == target {
                let path = self.stack.iter().map(|&(v, _)| v).collect();
                self.stack.pop();
                return Some(path);
            }
            let depth = self.stack.len();
            let nb = self.dag.net.neighbors(u);
            let next = (start..nb.len()).find(|&c| self.dag.on_dag(nb[c], depth));
            match next {
                Some(c) => {
                    if let Some(top) = self.stack.last_mut() {
                        top.1 = c + 1;
                    }
                    self.stack.push((nb[c], 0));
                }
                None => {
                    self.stack.pop();
                }
            }
        }
        None
    }
}

/// Every shortest path from `a` to `b`, lexicographically ordered.
pub fn all_shortest_paths(net: &Network, a: usize, b: usize) -> Result<PathSet> {
    Ok(ShortestPathDag::new(net, a, b)?.to_path_set())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::{gen_er, gen_lattice, gen_regular, LatticeVariant, Topology};
    use proptest::prelude::*;

    /// Every simple path by exhaustive DFS, keeping the shortest ones.
    fn brute_force_shortest(net: &Network, a: usize, b: usize) -> Vec<Vec<usize>> {
        fn walk(net: &Network, path: &mut Vec<usize>, b: usize, out: &mut Vec<Vec<usize>>) {
            let u = *path.last().unwrap();
            if u == b {
                out.push(path.clone());
                return;
            }
            for &v in net.neighbors(u) {
                if !path.contains(&v) {
                    path.push(v);
                    walk(net, path, b, out);
                    path.pop();
                }
            }
        }
        let mut all = Vec::new();
        walk(net, &mut vec![a], b, &mut all);
        let Some(best) = all.iter().map(Vec::len).min() else {
            return Vec::new();
        };
        let mut shortest: Vec<_> = all.into_iter().filter(|p| p.len() == best).collect();
        shortest.sort();
        shortest
    }

    #[test]
    fn diamond_hubs() {
        let net = gen_regular(Topology::Diamond, 5, 1.0).unwrap();
        let ps = all_shortest_paths(&net, 0, 4).unwrap();
        assert_eq!(ps.distance, Some(2));
        assert_eq!(ps.paths, vec![vec![0, 1, 4], vec![0, 2, 4], vec![0, 3, 4]]);
    }

    #[test]
    fn ring_opposite_nodes() {
        let net = gen_regular(Topology::Ring, 6, 1.0).unwrap();
        let ps = all_shortest_paths(&net, 0, 3).unwrap();
        assert_eq!(ps.distance, Some(3));
        assert_eq!(ps.paths, vec![vec![0, 1, 2, 3], vec![0, 5, 4, 3]]);
    }

    #[test]
    fn linear_ends() {
        let net = gen_regular(Topology::Linear, 5, 1.0).unwrap();
        let ps = all_shortest_paths(&net, 0, 4).unwrap();
        assert_eq!(ps.paths, vec![vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn disconnected_and_invalid() {
        let net = Network::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)], 0.0, Default::default()).unwrap();
        let ps = all_shortest_paths(&net, 0, 3).unwrap();
        assert_eq!(ps.distance, None);
        assert!(ps.paths.is_empty());
        assert_eq!(ShortestPathDag::new(&net, 0, 3).unwrap().count(), 0);
        assert!(all_shortest_paths(&net, 0, 0).is_err());
        assert!(all_shortest_paths(&net, 0, 9).is_err());
    }

    #[test]
    fn grid_path_count_is_binomial() {
        let net = gen_lattice(2, 4, 1.0, LatticeVariant::Square).unwrap();
        let dag = ShortestPathDag::new(&net, 0, 15).unwrap();
        assert_eq!(dag.count(), 20);
        assert_eq!(dag.paths().count(), 20);
    }

    proptest! {
        #[test]
        fn matches_exhaustive_enumeration(n in 2usize..=10, p in 0.1f64..0.8, seed in any::<u64>()) {
            let net = gen_er(n, p, 1.0, seed).unwrap();
            for b in 1..n {
                let dag = ShortestPathDag::new(&net, 0, b).unwrap();
                let ps = dag.to_path_set();
                let expected = brute_force_shortest(&net, 0, b);
                prop_assert_eq!(&ps.paths, &expected);
                prop_assert_eq!(dag.count() as usize, expected.len());
                for path in &ps.paths {
                    prop_assert_eq!(path.len() - 1, ps.distance.unwrap());
                    prop_assert_eq!((path[0], *path.last().unwrap()), (0, b));
                }
            }
        }
    }
}
