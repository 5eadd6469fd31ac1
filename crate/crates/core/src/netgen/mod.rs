//! Network topologies and graph queries.
//!
//! A [`Network`] is a weighted undirected graph (symmetric adjacency, zero
//! diagonal, nonnegative weights) together with the p-squeezing of each node
//! in dB. Nodes are 0-indexed.

mod format;
mod paths;
mod random;
mod regular;

pub use format::{load_edgelist, parse_network, write_network, HEADER};
pub use paths::{all_shortest_paths, bfs_distances, PathSet, ShortestPathDag};
pub use random::{gen_as, gen_as_with, gen_ba, gen_er, gen_pp, gen_ws, AsParams};
pub use regular::{
    gen_circulant, gen_diamond_chain, gen_diamond_interconnected, gen_lattice, gen_regular, LatticeVariant,
    Topology,
};

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CvnetError, Result};

/// Provenance of a generated network.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NetworkMeta {
    pub topology: String,
    pub params: BTreeMap<String, f64>,
    pub seed: Option<u64>,
}

impl NetworkMeta {
    pub fn new(topology: &str) -> Self {
        NetworkMeta { topology: topology.to_string(), ..Default::default() }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn seeded(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    adj: DMatrix<f64>,
    node_squeeze_db: Vec<f64>,
    neighbors: Vec<Vec<usize>>,
    meta: NetworkMeta,
}

impl Network {
    /// Validates the adjacency matrix and squeezing list.
    pub fn new(adj: DMatrix<f64>, node_squeeze_db: Vec<f64>, meta: NetworkMeta) -> Result<Self> {
        let n = adj.nrows();
        if n == 0 {
            return Err(CvnetError::InvalidNetwork("network needs at least one node".into()));
        }
        if adj.ncols() != n {
            return Err(CvnetError::InvalidNetwork(format!(
                "adjacency is {}x{}, not square",
                n,
                adj.ncols()
            )));
        }
        if node_squeeze_db.len() != n {
            return Err(CvnetError::InvalidNetwork(format!(
                "{} squeezing values for {} nodes",
                node_squeeze_db.len(),
                n
            )));
        }
        if node_squeeze_db.iter().any(|s| !s.is_finite()) {
            return Err(CvnetError::InvalidNetwork("non-finite squeezing".into()));
        }
        for i in 0..n {
            if adj[(i, i)] != 0.0 {
                return Err(CvnetError::InvalidNetwork(format!("nonzero diagonal at node {i}")));
            }
            for j in (i + 1)..n {
                let w = adj[(i, j)];
                if w != adj[(j, i)] {
                    return Err(CvnetError::InvalidNetwork(format!("asymmetric weight between {i} and {j}")));
                }
                if !(w >= 0.0 && w.is_finite()) {
                    return Err(CvnetError::InvalidNetwork(format!(
                        "weight {w} between {i} and {j} is not a finite nonnegative number"
                    )));
                }
            }
        }
        let neighbors = (0..n).map(|i| (0..n).filter(|&j| adj[(i, j)] != 0.0).collect()).collect();
        Ok(Network { adj, node_squeeze_db, neighbors, meta })
    }

    /// Builds a network from an edge list with uniform squeezing.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
        squeeze_db: f64,
        meta: NetworkMeta,
    ) -> Result<Self> {
        let mut adj = DMatrix::zeros(n, n);
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(CvnetError::InvalidNode { index: i.max(j), n });
            }
            if i == j {
                return Err(CvnetError::InvalidNetwork(format!("self-loop on node {i}")));
            }
            adj[(i, j)] = w;
            adj[(j, i)] = w;
        }
        Network::new(adj, vec![squeeze_db; n], meta)
    }

    pub fn n(&self) -> usize {
        self.adj.nrows()
    }

    pub fn adj(&self) -> &DMatrix<f64> {
        &self.adj
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.adj[(i, j)]
    }

    pub fn node_squeeze_db(&self) -> &[f64] {
        &self.node_squeeze_db
    }

    pub fn meta(&self) -> &NetworkMeta {
        &self.meta
    }

    /// Sorted neighbor indices of `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(i, j, w)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for i in 0..self.n() {
            for &j in &self.neighbors[i] {
                if j > i {
                    out.push((i, j, self.adj[(i, j)]));
                }
            }
        }
        out
    }

    /// The common squeezing value if every node carries the same one.
    pub fn uniform_squeeze_db(&self) -> Option<f64> {
        let first = self.node_squeeze_db[0];
        self.node_squeeze_db.iter().all(|&s| s == first).then_some(first)
    }

    pub fn with_uniform_squeezing(&self, squeeze_db: f64) -> Result<Network> {
        self.with_node_squeezing(vec![squeeze_db; self.n()])
    }

    pub fn with_node_squeezing(&self, node_squeeze_db: Vec<f64>) -> Result<Network> {
        Network::new(self.adj.clone(), node_squeeze_db, self.meta.clone())
    }

    pub fn check_node(&self, index: usize) -> Result<()> {
        if index < self.n() {
            Ok(())
        } else {
            Err(CvnetError::InvalidNode { index, n: self.n() })
        }
    }

    /// Nodes reachable from `start`, sorted.
    pub fn component_of(&self, start: usize) -> Vec<usize> {
        let dist = bfs_distances(self, start);
        (0..self.n()).filter(|&v| dist[v].is_some()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_matrices() {
        let mut a = DMatrix::zeros(2, 2);
        a[(0, 1)] = 1.0;
        assert!(Network::new(a.clone(), vec![0.0; 2], NetworkMeta::default()).is_err());
        a[(1, 0)] = 1.0;
        assert!(Network::new(a.clone(), vec![0.0; 2], NetworkMeta::default()).is_ok());
        assert!(Network::new(a.clone(), vec![0.0; 3], NetworkMeta::default()).is_err());
        a[(0, 0)] = 1.0;
        assert!(Network::new(a, vec![0.0; 2], NetworkMeta::default()).is_err());
        let mut neg = DMatrix::zeros(2, 2);
        neg[(0, 1)] = -1.0;
        neg[(1, 0)] = -1.0;
        assert!(Network::new(neg, vec![0.0; 2], NetworkMeta::default()).is_err());
    }

    #[test]
    fn edges_and_degrees() {
        let net =
            Network::from_edges(4, [(0, 1, 1.0), (1, 2, 2.0), (1, 3, 1.0)], 0.0, NetworkMeta::default())
                .unwrap();
        assert_eq!(net.edge_count(), 3);
        assert_eq!(net.degree(1), 3);
        assert_eq!(net.neighbors(1), &[0, 2, 3]);
        assert_eq!(net.edges(), vec![(0, 1, 1.0), (1, 2, 2.0), (1, 3, 1.0)]);
        assert_eq!(net.uniform_squeeze_db(), Some(0.0));
    }
}
