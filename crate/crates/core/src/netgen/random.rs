use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{gen_circulant, Network, NetworkMeta};
use crate::error::{CvnetError, Result};
use crate::rng::rng_from_seed;

/// Erdős–Rényi graph: every unordered pair is linked with probability `p`.
pub fn gen_er(n: usize, p: f64, g: f64, seed: u64) -> Result<Network> {
    check_probability("p", p)?;
    check_nodes(n, 1)?;
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((i, j, g));
            }
        }
    }
    let meta = NetworkMeta::new("er").param("n", n as f64).param("p", p).param("g", g).seeded(seed);
    Network::from_edges(n, edges, 0.0, meta)
}

/// Barabási–Albert preferential attachment with `k_attach` links per new
/// node, giving `(n - k_attach) * k_attach` edges.
///
/// The first `k_attach` nodes start unlinked, so node `k_attach` links to
/// all of them. Afterwards targets are drawn proportionally to degree
/// (without replacement within one node's attachment).
pub fn gen_ba(n: usize, k_attach: usize, g: f64, seed: u64) -> Result<Network> {
    if k_attach == 0 || k_attach >= n {
        return Err(CvnetError::InvalidParameter(format!(
            "attachment count {k_attach} must satisfy 1 <= k < n = {n}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    // every edge endpoint, so uniform draws from it are degree-proportional
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * n * k_attach);
    let mut edges = Vec::with_capacity((n - k_attach) * k_attach);
    for v in k_attach..n {
        let targets: BTreeSet<usize> = if endpoints.is_empty() {
            // uniform over the k unlinked bootstrap nodes, i.e. all of them
            (0..v).collect()
        } else {
            let mut chosen = BTreeSet::new();
            while chosen.len() < k_attach {
                chosen.insert(endpoints[rng.random_range(0..endpoints.len())]);
            }
            chosen
        };
        for &t in &targets {
            edges.push((t, v, g));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    let meta =
        NetworkMeta::new("ba").param("n", n as f64).param("k", k_attach as f64).param("g", g).seeded(seed);
    Network::from_edges(n, edges, 0.0, meta)
}

/// Watts–Strogatz small world: a `q_neigh`-neighbor ring lattice whose edges
/// are each rewired with probability `beta` to a uniformly chosen node,
/// avoiding self-loops and duplicates. The edge count `n * q_neigh / 2` is
/// preserved.
pub fn gen_ws(n: usize, q_neigh: usize, beta: f64, g: f64, seed: u64) -> Result<Network> {
    check_probability("beta", beta)?;
    let ring = gen_circulant(n, q_neigh, g)?;
    let mut rng = rng_from_seed(seed);
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|i| ring.neighbors(i).iter().copied().collect()).collect();
    for j in 1..=q_neigh / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if !adj[u].contains(&v) || rng.random::<f64>() >= beta {
                continue;
            }
            if adj[u].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.random_range(0..n);
                if w != u && !adj[u].contains(&w) {
                    break w;
                }
            };
            adj[u].remove(&v);
            adj[v].remove(&u);
            adj[u].insert(w);
            adj[w].insert(u);
        }
    }
    let edges = (0..n)
        .flat_map(|u| adj[u].iter().filter(move |&&w| w > u).map(move |&w| (u, w, g)).collect::<Vec<_>>());
    let meta = NetworkMeta::new("ws")
        .param("n", n as f64)
        .param("q", q_neigh as f64)
        .param("beta", beta)
        .param("g", g)
        .seeded(seed);
    Network::from_edges(n, edges, 0.0, meta)
}

/// Duplication model of protein interaction networks.
///
/// Starts from a single edge; each step picks a uniformly random existing
/// node, adds a duplicate, and copies each of the original's links to the
/// duplicate independently with probability `sigma_retain`. The
/// duplicate is never linked to its original, and the original keeps all
/// of its links.
pub fn gen_pp(n: usize, sigma_retain: f64, g: f64, seed: u64) -> Result<Network> {
    check_probability("sigma", sigma_retain)?;
    check_nodes(n, 2)?;
    let mut rng = rng_from_seed(seed);
    let mut adj: Vec<Vec<usize>> = vec![vec![1], vec![0]];
    while adj.len() < n {
        let v = adj.len();
        let original = rng.random_range(0..v);
        let copied: Vec<usize> =
            adj[original].iter().copied().filter(|_| rng.random::<f64>() < sigma_retain).collect();
        for &w in &copied {
            adj[w].push(v);
        }
        adj.push(copied);
    }
    let edges: Vec<_> = adj
        .iter()
        .enumerate()
        .flat_map(|(u, nb)| nb.iter().filter(move |&&w| w > u).map(move |&w| (u, w, g)))
        .collect();
    let meta =
        NetworkMeta::new("pp").param("n", n as f64).param("sigma", sigma_retain).param("g", g).seeded(seed);
    Network::from_edges(n, edges, 0.0, meta)
}

/// Tier parameters of the simplified Internet AS growth model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsParams {
    /// Size of the fully meshed tier-1 core.
    pub core_size: usize,
    /// Probability that a newcomer is a single-homed leaf customer.
    pub leaf_prob: f64,
    /// Number of distinct providers a mid-tier newcomer attaches to.
    pub mid_providers: usize,
}

impl Default for AsParams {
    fn default() -> Self {
        AsParams { core_size: 4, leaf_prob: 0.6, mid_providers: 2 }
    }
}

/// Simplified multi-tier AS-level Internet model with default tiers.
pub fn gen_as(n: usize, g: f64, seed: u64) -> Result<Network> {
    gen_as_with(n, g, seed, &AsParams::default())
}

/// Simplified multi-tier AS-level Internet model.
///
/// A fully meshed core of `core_size` providers seeds the graph. Each
/// newcomer is a leaf with probability `leaf_prob` and links to one
/// provider; otherwise it becomes a mid-tier provider linked to
/// `mid_providers` distinct providers. Providers are chosen
/// proportionally to their degree. Leaves never act as providers, which
/// makes many nodes share a neighborhood and keeps the adjacency rank low.
pub fn gen_as_with(n: usize, g: f64, seed: u64, params: &AsParams) -> Result<Network> {
    check_probability("leaf_prob", params.leaf_prob)?;
    if params.core_size < 2 || params.mid_providers == 0 {
        return Err(CvnetError::InvalidParameter(
            "AS model needs a core of at least 2 nodes and at least one provider per mid-tier node".into(),
        ));
    }
    if n < params.core_size.max(4) {
        return Err(CvnetError::InvalidParameter(format!(
            "AS model needs at least {} nodes, got {n}",
            params.core_size.max(4)
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    // provider endpoints weighted by degree
    let mut provider_pool: Vec<usize> = Vec::new();
    let core = params.core_size;
    for i in 0..core {
        for j in (i + 1)..core {
            edges.push((i, j, g));
            provider_pool.push(i);
            provider_pool.push(j);
        }
    }
    let mut n_providers = core;
    for v in core..n {
        let is_leaf = rng.random::<f64>() < params.leaf_prob;
        let wanted = if is_leaf { 1 } else { params.mid_providers.min(n_providers) };
        let mut chosen = BTreeSet::new();
        while chosen.len() < wanted {
            chosen.insert(provider_pool[rng.random_range(0..provider_pool.len())]);
        }
        for &p in &chosen {
            edges.push((p, v, g));
            provider_pool.push(p);
            if !is_leaf {
                provider_pool.push(v);
            }
        }
        if !is_leaf {
            n_providers += 1;
        }
    }
    let meta = NetworkMeta::new("as")
        .param("n", n as f64)
        .param("g", g)
        .param("core_size", core as f64)
        .param("leaf_prob", params.leaf_prob)
        .param("mid_providers", params.mid_providers as f64)
        .seeded(seed);
    Network::from_edges(n, edges, 0.0, meta)
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(CvnetError::InvalidParameter(format!("{name} = {p} is not a probability")))
    }
}

fn check_nodes(n: usize, min: usize) -> Result<()> {
    if n >= min {
        Ok(())
    } else {
        Err(CvnetError::InvalidParameter(format!("need at least {min} nodes, got {n}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::{gen_regular, Topology};

    fn is_acyclic(net: &Network) -> bool {
        // a connected graph on n nodes with n - 1 edges is a tree
        net.edge_count() == net.n() - 1 && net.component_of(0).len() == net.n()
    }

    #[test]
    fn er_extremes() {
        assert_eq!(gen_er(10, 0.0, 1.0, 3).unwrap().edge_count(), 0);
        assert_eq!(gen_er(10, 1.0, 1.0, 3).unwrap().edge_count(), 45);
        assert!(gen_er(10, 1.5, 1.0, 3).is_err());
    }

    #[test]
    fn er_edge_count_statistics() {
        // binomial(C(1000,2), 0.4): mean 79920, sd ~219
        let pairs = 1000.0 * 999.0 / 2.0;
        let sd = (pairs * 0.4 * 0.6f64).sqrt();
        for seed in 0..100 {
            let e = gen_er(1000, 0.4, 1.0, seed).unwrap().edge_count() as f64;
            assert!((e - pairs * 0.4).abs() < 4.0 * sd, "seed {seed}: {e}");
        }
    }

    #[test]
    fn ba_edge_counts() {
        let tree = gen_ba(100, 1, 1.0, 5).unwrap();
        assert_eq!(tree.edge_count(), 99);
        assert!(is_acyclic(&tree));
        assert_eq!(gen_ba(100, 4, 1.0, 5).unwrap().edge_count(), 384);
        let star_like = gen_ba(5, 4, 1.0, 9).unwrap();
        assert_eq!(star_like.edge_count(), 4);
        assert_eq!(star_like.degree(4), 4);
        assert!(gen_ba(5, 5, 1.0, 0).is_err());
        assert!(gen_ba(5, 0, 1.0, 0).is_err());
    }

    #[test]
    fn ws_preserves_edges() {
        let ring = gen_ws(10, 2, 0.0, 1.0, 1).unwrap();
        assert_eq!(ring.adj(), gen_regular(Topology::Ring, 10, 1.0).unwrap().adj());
        let lattice = gen_ws(100, 4, 0.0, 1.0, 1).unwrap();
        assert_eq!(lattice.edge_count(), 200);
        assert!((0..100).all(|i| lattice.degree(i) == 4));
        let rewired = gen_ws(100, 4, 1.0, 1.0, 1).unwrap();
        assert_eq!(rewired.edge_count(), 200);
        assert!((0..100).any(|i| rewired.degree(i) != 4));
        assert!(gen_ws(10, 3, 0.5, 1.0, 1).is_err());
    }

    #[test]
    fn pp_extremes() {
        let seed_edge = gen_pp(2, 1.0, 1.0, 0).unwrap();
        assert_eq!(seed_edge.edges(), vec![(0, 1, 1.0)]);
        let isolated = gen_pp(10, 0.0, 1.0, 4).unwrap();
        assert_eq!(isolated.edge_count(), 1);
        assert!((2..10).all(|v| isolated.degree(v) == 0));
        let full = gen_pp(3, 1.0, 1.0, 0).unwrap();
        // the duplicate copies the single link of its original
        assert_eq!(full.edge_count(), 2);
    }

    #[test]
    fn as_core_and_leaves() {
        let core = gen_as(4, 1.0, 0).unwrap();
        assert_eq!(core.edge_count(), 6);
        let net = gen_as(100, 1.0, 11).unwrap();
        let leaves = (0..100).filter(|&v| net.degree(v) == 1).count();
        assert!(leaves >= 30, "{leaves} leaves");
        assert_eq!(net.component_of(0).len(), 100);
        assert!(gen_as(3, 1.0, 0).is_err());
    }

    #[test]
    fn generators_are_seed_deterministic() {
        assert_eq!(gen_er(50, 0.2, 1.0, 8).unwrap(), gen_er(50, 0.2, 1.0, 8).unwrap());
        assert_eq!(gen_ba(50, 3, 1.0, 8).unwrap(), gen_ba(50, 3, 1.0, 8).unwrap());
        assert_eq!(gen_ws(50, 4, 0.3, 1.0, 8).unwrap(), gen_ws(50, 4, 0.3, 1.0, 8).unwrap());
        assert_eq!(gen_pp(50, 0.4, 1.0, 8).unwrap(), gen_pp(50, 0.4, 1.0, 8).unwrap());
        assert_eq!(gen_as(50, 1.0, 8).unwrap(), gen_as(50, 1.0, 8).unwrap());
        assert_ne!(gen_er(50, 0.2, 1.0, 8).unwrap(), gen_er(50, 0.2, 1.0, 9).unwrap());
    }
}
