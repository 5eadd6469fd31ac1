//! Entanglement routing between two nodes of a graph state.
//!
//! Every protocol assigns a homodyne basis to each non-user node and scores
//! the resulting pair by its (clamped) logarithmic negativity.
//!
//! * `shortest`: p̂ on the interior of the first shortest path, q̂ elsewhere.
//! * `routing`: starts from `shortest` and adds the other shortest paths one
//!   at a time, keeping each only if it raises the log-negativity.
//! * `allp`: q̂ on leaves, p̂ on everything else.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entangle::{log_negativity, LogNeg, PairState};
use crate::error::{CvnetError, Result};
use crate::gaussian::{z_from_network, ZGraph};
use crate::measure::{reduce_pair, Assignment, MeasurementPlan};
use crate::netgen::{bfs_distances, Network, ShortestPathDag};

/// A candidate path is kept only if it raises the clamped log-negativity
/// by more than this.
pub const ACCEPT_TOL: f64 = 1e-12;

/// Largest graph accepted by [`brute_force_optimum`].
pub const MAX_BRUTE_FORCE_NODES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Routing,
    Shortest,
    AllP,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Routing, Protocol::Shortest, Protocol::AllP];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Routing => "routing",
            Protocol::Shortest => "shortest",
            Protocol::AllP => "allp",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = CvnetError;

    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| CvnetError::InvalidParameter(format!("unknown protocol '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub alice: usize,
    pub target: usize,
    pub protocol: Protocol,
    /// Clamped log-negativity; 0 for unreachable targets.
    pub logneg: f64,
    pub logneg_raw: f64,
    /// Hops from Alice; `None` when unreachable.
    pub distance: Option<usize>,
    /// Number of shortest paths.
    pub n_paths: u64,
    /// Shortest paths whose interiors are all p̂-measured: the accepted
    /// paths for `routing`, 1 for `shortest`, every path for `allp`.
    pub n_paths_used: u64,
    pub useful_fraction: f64,
    pub plan: MeasurementPlan,
}

/// Immutable inputs shared by all evaluations on one network.
pub struct RoutingContext<'a> {
    net: &'a Network,
    z: ZGraph,
}

impl<'a> RoutingContext<'a> {
    pub fn new(net: &'a Network) -> Self {
        RoutingContext { net, z: z_from_network(net) }
    }

    pub fn network(&self) -> &Network {
        self.net
    }

    /// Log-negativity of `(alice, bob)` after p̂ on `p_nodes` and q̂ on every
    /// other node.
    pub fn evaluate(&self, alice: usize, bob: usize, p_nodes: &[usize]) -> Result<LogNeg> {
        pair_logneg(reduce_pair(&self.z, alice, bob, p_nodes)?, [alice, bob])
    }

    fn check_pair(&self, alice: usize, bob: usize) -> Result<()> {
        self.net.check_node(alice)?;
        self.net.check_node(bob)?;
        if alice == bob {
            return Err(CvnetError::InvalidParameter(format!("alice and bob are the same node {alice}")));
        }
        Ok(())
    }

    fn dag(
        &self,
        alice: usize,
        bob: usize,
        from_alice: Option<&[Option<usize>]>,
    ) -> Result<ShortestPathDag<'a>> {
        self.check_pair(alice, bob)?;
        match from_alice {
            Some(d) => ShortestPathDag::with_source_distances(self.net, alice, bob, d.to_vec()),
            None => ShortestPathDag::new(self.net, alice, bob),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn result(
        &self,
        protocol: Protocol,
        alice: usize,
        bob: usize,
        dag: &ShortestPathDag,
        p_nodes: &[usize],
        logneg: LogNeg,
        n_paths_used: u64,
    ) -> Result<ProtocolResult> {
        let mut plan = MeasurementPlan::uniform(self.net.n(), alice, bob, Assignment::Q)?;
        for &p in p_nodes {
            plan.set(p, Assignment::P)?;
        }
        let n_paths = dag.count();
        Ok(ProtocolResult {
            alice,
            target: bob,
            protocol,
            logneg: logneg.clamped,
            logneg_raw: logneg.raw,
            distance: dag.distance(),
            n_paths,
            n_paths_used,
            useful_fraction: if n_paths == 0 { 0.0 } else { n_paths_used as f64 / n_paths as f64 },
            plan,
        })
    }

    fn unreachable(
        &self,
        protocol: Protocol,
        alice: usize,
        bob: usize,
        dag: &ShortestPathDag,
        p_nodes: &[usize],
    ) -> Result<ProtocolResult> {
        let zero = LogNeg { raw: 0.0, clamped: 0.0 };
        self.result(protocol, alice, bob, dag, p_nodes, zero, 0)
    }

    fn shortest(
        &self,
        alice: usize,
        bob: usize,
        from_alice: Option<&[Option<usize>]>,
    ) -> Result<ProtocolResult> {
        let dag = self.dag(alice, bob, from_alice)?;
        let Some(first) = dag.paths().next() else {
            return self.unreachable(Protocol::Shortest, alice, bob, &dag, &[]);
        };
        let p = interior_sorted(&first);
        let ln = self.evaluate(alice, bob, &p)?;
        self.result(Protocol::Shortest, alice, bob, &dag, &p, ln, 1)
    }

    fn routing(
        &self,
        alice: usize,
        bob: usize,
        from_alice: Option<&[Option<usize>]>,
    ) -> Result<ProtocolResult> {
        let dag = self.dag(alice, bob, from_alice)?;
        let mut paths = dag.paths();
        let Some(first) = paths.next() else {
            return self.unreachable(Protocol::Routing, alice, bob, &dag, &[]);
        };
        let n_interior = dag.interior_nodes().len();
        let mut accepted: BTreeSet<usize> = first[1..first.len() - 1].iter().copied().collect();
        let mut p: Vec<usize> = accepted.iter().copied().collect();
        let mut best = self.evaluate(alice, bob, &p)?;
        let mut used = 1;
        for path in paths {
            if accepted.len() == n_interior {
                break;
            }
            let fresh: Vec<usize> =
                path[1..path.len() - 1].iter().copied().filter(|v| !accepted.contains(v)).collect();
            if fresh.is_empty() {
                continue;
            }
            let trial: Vec<usize> =
                accepted.iter().chain(&fresh).copied().collect::<BTreeSet<_>>().into_iter().collect();
            let ln = self.evaluate(alice, bob, &trial)?;
            if ln.clamped > best.clamped + ACCEPT_TOL {
                accepted.extend(fresh);
                p = trial;
                best = ln;
                used += 1;
            }
        }
        self.result(Protocol::Routing, alice, bob, &dag, &p, best, used)
    }

    fn allp_nodes(&self, alice: usize, bob: usize) -> Vec<usize> {
        (0..self.net.n()).filter(|&v| v != alice && v != bob && self.net.degree(v) != 1).collect()
    }

    fn allp(&self, alice: usize, bob: usize, from_alice: Option<&[Option<usize>]>) -> Result<ProtocolResult> {
        let dag = self.dag(alice, bob, from_alice)?;
        let p = self.allp_nodes(alice, bob);
        if dag.distance().is_none() {
            return self.unreachable(Protocol::AllP, alice, bob, &dag, &p);
        }
        // nodes outside Alice's component do not affect the pair
        let component: BTreeSet<usize> = self.net.component_of(alice).into_iter().collect();
        let p_local: Vec<usize> = p.iter().copied().filter(|v| component.contains(v)).collect();
        let ln = self.evaluate(alice, bob, &p_local)?;
        let n_paths = dag.count();
        self.result(Protocol::AllP, alice, bob, &dag, &p, ln, n_paths)
    }

    pub fn run(&self, protocol: Protocol, alice: usize, bob: usize) -> Result<ProtocolResult> {
        match protocol {
            Protocol::Routing => self.routing(alice, bob, None),
            Protocol::Shortest => self.shortest(alice, bob, None),
            Protocol::AllP => self.allp(alice, bob, None),
        }
    }
}

fn interior_sorted(path: &[usize]) -> Vec<usize> {
    let mut p = path[1..path.len() - 1].to_vec();
    p.sort_unstable();
    p
}

fn pair_logneg(pair: DMatrix<Complex64>, labels: [usize; 2]) -> Result<LogNeg> {
    log_negativity(&PairState::from_z(&ZGraph::from_complex_unchecked(pair), labels)?)
}

pub fn protocol_shortest(net: &Network, alice: usize, bob: usize) -> Result<ProtocolResult> {
    RoutingContext::new(net).run(Protocol::Shortest, alice, bob)
}

pub fn protocol_routing(net: &Network, alice: usize, bob: usize) -> Result<ProtocolResult> {
    RoutingContext::new(net).run(Protocol::Routing, alice, bob)
}

pub fn protocol_allp(net: &Network, alice: usize, bob: usize) -> Result<ProtocolResult> {
    RoutingContext::new(net).run(Protocol::AllP, alice, bob)
}

/// Highest-degree node, lowest index on ties.
pub fn auto_alice(net: &Network) -> usize {
    (0..net.n()).max_by_key(|&v| (net.degree(v), std::cmp::Reverse(v))).unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetReport {
    pub target: usize,
    pub distance: Option<usize>,
    pub n_paths: u64,
    /// One per requested protocol, in request order.
    pub results: Vec<ProtocolResult>,
    /// Wall time of each result, milliseconds.
    pub wall_ms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub alice: usize,
    pub protocols: Vec<Protocol>,
    /// Sorted by distance (unreachable last), path count, index.
    pub targets: Vec<TargetReport>,
    /// Mean clamped log-negativity over reachable targets, per protocol.
    pub means: Vec<f64>,
    pub total_ms: f64,
}

impl SurveyReport {
    pub fn mean(&self, protocol: Protocol) -> Option<f64> {
        self.protocols.iter().position(|&p| p == protocol).map(|i| self.means[i])
    }
}

/// All-p̂ evaluation for every target of one Alice, sharing one inverse.
///
/// With `P₀` the non-leaf nodes of Alice's component other than Alice, a
/// non-leaf target `b ∈ P₀` sees the pair `((Z_S)⁻¹[{a,b}])⁻¹` with
/// `S = {a} ∪ P₀`; a leaf target sees `Z_KK − Z_K,P₀ Z_P₀⁻¹ Z_P₀,K`.
struct AllPBatch {
    alice: usize,
    /// Position of each node in `{a} ∪ P₀`, Alice first.
    slot: Vec<Option<usize>>,
    order: Vec<usize>,
    h: DMatrix<Complex64>,
    p0_inv: Option<DMatrix<Complex64>>,
}

impl AllPBatch {
    fn new(ctx: &RoutingContext, alice: usize) -> Result<Self> {
        let net = ctx.net;
        let mut order = vec![alice];
        let mut component = net.component_of(alice);
        component.sort_unstable();
        order.extend(component.into_iter().filter(|&v| v != alice && net.degree(v) != 1));
        let mut slot = vec![None; net.n()];
        for (i, &v) in order.iter().enumerate() {
            slot[v] = Some(i);
        }
        let zz = ctx.z.z();
        let m = order.len();
        let zs = DMatrix::from_fn(m, m, |i, j| zz[(order[i], order[j])]);
        let h = zs.clone().lu().try_inverse().ok_or(CvnetError::SingularPivot(0.0))?;
        let leaf_targets =
            (0..net.n()).any(|v| v != alice && net.degree(v) == 1 && slot_reachable(net, v, &slot));
        let p0_inv = if leaf_targets && m > 1 {
            let p0 = zs.view((1, 1), (m - 1, m - 1)).clone_owned();
            Some(p0.lu().try_inverse().ok_or(CvnetError::SingularPivot(0.0))?)
        } else {
            None
        };
        Ok(AllPBatch { alice, slot, order, h, p0_inv })
    }

    fn pair(&self, ctx: &RoutingContext, bob: usize) -> Result<DMatrix<Complex64>> {
        let zz = ctx.z.z();
        if let Some(ib) = self.slot[bob] {
            let idx = [0, ib];
            let sub = DMatrix::from_fn(2, 2, |i, j| self.h[(idx[i], idx[j])]);
            let mut pair = sub.try_inverse().ok_or(CvnetError::SingularPivot(0.0))?;
            let off = (pair[(0, 1)] + pair[(1, 0)]) * 0.5;
            pair[(0, 1)] = off;
            pair[(1, 0)] = off;
            return Ok(pair);
        }
        let keep = [self.alice, bob];
        let mut pair = DMatrix::from_fn(2, 2, |i, j| zz[(keep[i], keep[j])]);
        if let Some(g) = &self.p0_inv {
            let p0 = &self.order[1..];
            let zpk = DMatrix::from_fn(p0.len(), 2, |i, j| zz[(p0[i], keep[j])]);
            pair -= zpk.transpose() * (g * &zpk);
            let off = (pair[(0, 1)] + pair[(1, 0)]) * 0.5;
            pair[(0, 1)] = off;
            pair[(1, 0)] = off;
        }
        Ok(pair)
    }
}

fn slot_reachable(net: &Network, leaf: usize, slot: &[Option<usize>]) -> bool {
    net.neighbors(leaf).iter().any(|&u| slot[u].is_some())
}

/// Runs each protocol from `alice` (or the highest-degree node) to every
/// other node. Targets are evaluated independently and in parallel on the
/// current rayon pool; the output does not depend on the thread count.
pub fn survey(net: &Network, alice: Option<usize>, protocols: &[Protocol]) -> Result<SurveyReport> {
    let start = Instant::now();
    if net.n() < 2 {
        return Err(CvnetError::InvalidNetwork("a survey needs at least two nodes".into()));
    }
    let alice = match alice {
        Some(a) => {
            net.check_node(a)?;
            a
        }
        None => auto_alice(net),
    };
    let ctx = RoutingContext::new(net);
    let from_alice = bfs_distances(net, alice);
    let batch = if protocols.contains(&Protocol::AllP) { Some(AllPBatch::new(&ctx, alice)?) } else { None };
    let targets: Vec<usize> = (0..net.n()).filter(|&v| v != alice).collect();
    let mut rows = targets
        .par_iter()
        .map(|&bob| -> Result<TargetReport> {
            let mut results = Vec::with_capacity(protocols.len());
            let mut wall_ms = Vec::with_capacity(protocols.len());
            for &protocol in protocols {
                let t0 = Instant::now();
                let res = match protocol {
                    Protocol::Routing => ctx.routing(alice, bob, Some(&from_alice))?,
                    Protocol::Shortest => ctx.shortest(alice, bob, Some(&from_alice))?,
                    Protocol::AllP => allp_batched(&ctx, batch.as_ref(), alice, bob, &from_alice)?,
                };
                wall_ms.push(t0.elapsed().as_secs_f64() * 1e3);
                results.push(res);
            }
            let (distance, n_paths) =
                results.first().map(|r| (r.distance, r.n_paths)).unwrap_or((from_alice[bob], 0));
            Ok(TargetReport { target: bob, distance, n_paths, results, wall_ms })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.distance.is_none(), r.distance, r.n_paths, r.target));
    let means = (0..protocols.len())
        .map(|i| {
            let vals: Vec<f64> =
                rows.iter().filter(|r| r.distance.is_some()).map(|r| r.results[i].logneg).collect();
            if vals.is_empty() {
                0.0
            } else {
                vals.iter().sum::<f64>() / vals.len() as f64
            }
        })
        .collect();
    Ok(SurveyReport {
        alice,
        protocols: protocols.to_vec(),
        targets: rows,
        means,
        total_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn allp_batched(
    ctx: &RoutingContext,
    batch: Option<&AllPBatch>,
    alice: usize,
    bob: usize,
    from_alice: &[Option<usize>],
) -> Result<ProtocolResult> {
    let Some(batch) = batch else {
        return ctx.allp(alice, bob, Some(from_alice));
    };
    let dag = ctx.dag(alice, bob, Some(from_alice))?;
    let p = ctx.allp_nodes(alice, bob);
    if dag.distance().is_none() {
        return ctx.unreachable(Protocol::AllP, alice, bob, &dag, &p);
    }
    let ln = pair_logneg(batch.pair(ctx, bob)?, [alice, bob])?;
    let n_paths = dag.count();
    ctx.result(Protocol::AllP, alice, bob, &dag, &p, ln, n_paths)
}

/// Best clamped log-negativity over all Q/P assignments of the non-user
/// nodes, with the first plan (in binary order, bit `i` set = p̂) that
/// attains it.
pub fn brute_force_optimum(net: &Network, alice: usize, bob: usize) -> Result<(f64, MeasurementPlan)> {
    let n = net.n();
    if n > MAX_BRUTE_FORCE_NODES {
        return Err(CvnetError::InvalidParameter(format!(
            "brute force is limited to {MAX_BRUTE_FORCE_NODES} nodes, got {n}"
        )));
    }
    let ctx = RoutingContext::new(net);
    ctx.check_pair(alice, bob)?;
    let others: Vec<usize> = (0..n).filter(|&v| v != alice && v != bob).collect();
    let mut best = (f64::NEG_INFINITY, 0u32);
    for mask in 0u32..(1u32 << others.len()) {
        let p: Vec<usize> = (0..others.len()).filter(|&i| mask >> i & 1 == 1).map(|i| others[i]).collect();
        let ln = ctx.evaluate(alice, bob, &p)?.clamped;
        if ln > best.0 {
            best = (ln, mask);
        }
    }
    let mut plan = MeasurementPlan::uniform(n, alice, bob, Assignment::Q)?;
    for (i, &v) in others.iter().enumerate() {
        if best.1 >> i & 1 == 1 {
            plan.set(v, Assignment::P)?;
        }
    }
    Ok((best.0, plan))
}
