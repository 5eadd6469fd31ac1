use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Network, NetworkMeta};
use crate::error::{CvnetError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Linear,
    Ring,
    Star,
    Diamond,
    Complete,
}

impl Topology {
    pub const ALL: [Topology; 5] =
        [Topology::Linear, Topology::Ring, Topology::Star, Topology::Diamond, Topology::Complete];

    pub fn min_nodes(self) -> usize {
        match self {
            Topology::Diamond | Topology::Ring => 3,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Topology::Linear => "linear",
            Topology::Ring => "ring",
            Topology::Star => "star",
            Topology::Diamond => "diamond",
            Topology::Complete => "complete",
        }
    }

    /// The pair of nodes used for end-to-end entanglement on this topology:
    /// path ends for linear, antipodal nodes for ring, two leaves for star,
    /// the hubs for diamond, and nodes 0 and 1 for complete.
    pub fn far_pair(self, n: usize) -> (usize, usize) {
        match self {
            Topology::Linear | Topology::Diamond => (0, n - 1),
            Topology::Ring => (0, n / 2),
            Topology::Star => (1, n - 1),
            Topology::Complete => (0, 1),
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topology {
    type Err = CvnetError;

    fn from_str(s: &str) -> Result<Self> {
        Topology::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| CvnetError::InvalidParameter(format!("unknown regular topology '{s}'")))
    }
}

/// Linear, ring, star, diamond or complete graph with uniform weight `g`.
///
/// Node layout: the star hub is node 0; the diamond hubs are nodes 0 and
/// `n - 1` with the centers in between.
pub fn gen_regular(topology: Topology, n: usize, g: f64) -> Result<Network> {
    if n < topology.min_nodes() {
        return Err(CvnetError::InvalidParameter(format!(
            "{topology} needs at least {} nodes, got {n}",
            topology.min_nodes()
        )));
    }
    check_weight(g)?;
    let edges: Vec<(usize, usize)> = match topology {
        Topology::Linear => (0..n - 1).map(|i| (i, i + 1)).collect(),
        Topology::Ring => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        Topology::Star => (1..n).map(|i| (0, i)).collect(),
        Topology::Diamond => (1..n - 1).flat_map(|c| [(0, c), (c, n - 1)]).collect(),
        Topology::Complete => (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect(),
    };
    let meta = NetworkMeta::new(topology.name()).param("n", n as f64).param("g", g);
    Network::from_edges(n, edges.into_iter().map(|(i, j)| (i, j, g)), 0.0, meta)
}

/// Ring lattice where every node links to its `q` nearest neighbors
/// (`q / 2` on each side). `q` must be even and below `n`.
pub fn gen_circulant(n: usize, q: usize, g: f64) -> Result<Network> {
    if !q.is_multiple_of(2) {
        return Err(CvnetError::InvalidParameter(format!("neighbor count {q} must be even")));
    }
    if q >= n {
        return Err(CvnetError::InvalidParameter(format!("neighbor count {q} must be below node count {n}")));
    }
    check_weight(g)?;
    let mut edges = Vec::with_capacity(n * q / 2);
    for u in 0..n {
        for j in 1..=q / 2 {
            edges.push((u, (u + j) % n, g));
        }
    }
    let meta = NetworkMeta::new("circulant").param("n", n as f64).param("q", q as f64).param("g", g);
    Network::from_edges(n, edges, 0.0, meta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeVariant {
    Square,
    /// Square grid plus the anti-diagonal of every face; corner-to-corner
    /// distance unchanged.
    TriT,
    /// Square grid plus the main diagonal of every face; shortens the
    /// corner-to-corner distance.
    TriTtilde,
}

impl FromStr for LatticeVariant {
    type Err = CvnetError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(LatticeVariant::Square),
            "tri_T" | "tri-t" | "tri_t" => Ok(LatticeVariant::TriT),
            "tri_Ttilde" | "tri-ttilde" | "tri_ttilde" => Ok(LatticeVariant::TriTtilde),
            _ => Err(CvnetError::InvalidParameter(format!("unknown lattice variant '{s}'"))),
        }
    }
}

/// Hypercubic lattice with `side` nodes per axis, row-major indexing.
/// Corners `0` and `side^dim - 1` are the far pair.
pub fn gen_lattice(dim: usize, side: usize, g: f64, variant: LatticeVariant) -> Result<Network> {
    if !(1..=3).contains(&dim) {
        return Err(CvnetError::InvalidParameter(format!("lattice dimension {dim} not in 1..=3")));
    }
    if side < 2 {
        return Err(CvnetError::InvalidParameter(format!("lattice side {side} below 2")));
    }
    if variant != LatticeVariant::Square && dim != 2 {
        return Err(CvnetError::InvalidParameter("triangular variants exist only in two dimensions".into()));
    }
    check_weight(g)?;
    let n = side.pow(dim as u32);
    let mut edges = Vec::new();
    for idx in 0..n {
        let mut stride = 1;
        for _axis in 0..dim {
            let coord = (idx / stride) % side;
            if coord + 1 < side {
                edges.push((idx, idx + stride, g));
            }
            stride *= side;
        }
    }
    if dim == 2 {
        for r in 0..side - 1 {
            for c in 0..side - 1 {
                let at = |r: usize, c: usize| r * side + c;
                match variant {
                    LatticeVariant::Square => {}
                    LatticeVariant::TriT => edges.push((at(r, c + 1), at(r + 1, c), g)),
                    LatticeVariant::TriTtilde => edges.push((at(r, c), at(r + 1, c + 1), g)),
                }
            }
        }
    }
    let label = match variant {
        LatticeVariant::Square => "lattice",
        LatticeVariant::TriT => "lattice_tri_T",
        LatticeVariant::TriTtilde => "lattice_tri_Ttilde",
    };
    let meta = NetworkMeta::new(label).param("dim", dim as f64).param("side", side as f64).param("g", g);
    Network::from_edges(n, edges, 0.0, meta)
}

/// Two hubs (nodes 0 and `n - 1`) joined by `k` vertex-disjoint branches of
/// `n_inner` interior nodes each. Branch `b` occupies nodes
/// `1 + b * n_inner ..= (b + 1) * n_inner`, ordered from hub 0.
pub fn gen_diamond_chain(k: usize, n_inner: usize, g: f64) -> Result<Network> {
    if k == 0 || n_inner == 0 {
        return Err(CvnetError::InvalidParameter(
            "diamond chain needs at least one branch with one interior node".into(),
        ));
    }
    check_weight(g)?;
    let n = 2 + k * n_inner;
    let last = n - 1;
    let mut edges = Vec::with_capacity(k * (n_inner + 1));
    for b in 0..k {
        let first = 1 + b * n_inner;
        edges.push((0, first, g));
        for i in 0..n_inner - 1 {
            edges.push((first + i, first + i + 1, g));
        }
        edges.push((first + n_inner - 1, last, g));
    }
    let meta =
        NetworkMeta::new("diamond_chain").param("k", k as f64).param("n_inner", n_inner as f64).param("g", g);
    Network::from_edges(n, edges, 0.0, meta)
}

/// Diamond whose consecutive centers are also linked (`c` to `c + 1`).
pub fn gen_diamond_interconnected(n: usize, g: f64) -> Result<Network> {
    let diamond = gen_regular(Topology::Diamond, n, g)?;
    let mut edges = diamond.edges();
    for c in 1..n.saturating_sub(2) {
        edges.push((c, c + 1, g));
    }
    let meta = NetworkMeta::new("diamond_interconnected").param("n", n as f64).param("g", g);
    Network::from_edges(n, edges, 0.0, meta)
}

fn check_weight(g: f64) -> Result<()> {
    if g.is_finite() && g >= 0.0 {
        Ok(())
    } else {
        Err(CvnetError::InvalidParameter(format!("edge weight {g} must be finite and >= 0")))
    }
}
