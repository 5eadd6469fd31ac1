//! Homodyne measurements on graph states.
//!
//! A q̂ measurement deletes the node (`Z → W`); a p̂ measurement deletes it
//! and rewires its neighbours, `Z → W − RRᵀ/t` with `t = Z_kk` and `R` the
//! node's column without `t`. Outcomes are discarded, so only covariances
//! are tracked.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CvnetError, Result};
use crate::gaussian::{CovMatrix, ZGraph};

/// `|t|` below this is a singular pivot.
pub const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Q,
    P,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Assignment {
    Q,
    P,
    Keep,
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Assignment::Q => "Q",
            Assignment::P => "P",
            Assignment::Keep => "KEEP",
        })
    }
}

impl FromStr for Assignment {
    type Err = CvnetError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Q" => Ok(Assignment::Q),
            "P" => Ok(Assignment::P),
            "KEEP" => Ok(Assignment::Keep),
            other => Err(CvnetError::InvalidParameter(format!("unknown assignment '{other}'"))),
        }
    }
}

/// One tag per node; exactly two nodes are kept, and `alice` becomes mode 0
/// of the extracted pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementPlan {
    assignments: Vec<Assignment>,
    alice: usize,
    bob: usize,
}

impl MeasurementPlan {
    pub fn new(assignments: Vec<Assignment>, alice: usize) -> Result<Self> {
        let kept: Vec<usize> =
            (0..assignments.len()).filter(|&i| assignments[i] == Assignment::Keep).collect();
        if kept.len() != 2 {
            return Err(CvnetError::InvalidParameter(format!(
                "a plan keeps exactly two nodes, found {}",
                kept.len()
            )));
        }
        if !kept.contains(&alice) {
            return Err(CvnetError::InvalidParameter(format!("alice {alice} is not a KEEP node")));
        }
        let bob = if kept[0] == alice { kept[1] } else { kept[0] };
        Ok(MeasurementPlan { assignments, alice, bob })
    }

    /// Keeps `alice` and `bob` and assigns `default` everywhere else.
    pub fn uniform(n: usize, alice: usize, bob: usize, default: Assignment) -> Result<Self> {
        if alice >= n || bob >= n {
            return Err(CvnetError::InvalidNode { index: alice.max(bob), n });
        }
        let mut a = vec![default; n];
        a[alice] = Assignment::Keep;
        a[bob] = Assignment::Keep;
        Self::new(a, alice)
    }

    pub fn n(&self) -> usize {
        self.assignments.len()
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn get(&self, node: usize) -> Assignment {
        self.assignments[node]
    }

    /// Retags a non-kept node.
    pub fn set(&mut self, node: usize, tag: Assignment) -> Result<()> {
        if node >= self.n() {
            return Err(CvnetError::InvalidNode { index: node, n: self.n() });
        }
        if tag == Assignment::Keep || self.assignments[node] == Assignment::Keep {
            return Err(CvnetError::InvalidParameter(format!("cannot retag node {node} to or from KEEP")));
        }
        self.assignments[node] = tag;
        Ok(())
    }

    pub fn alice(&self) -> usize {
        self.alice
    }

    pub fn bob(&self) -> usize {
        self.bob
    }

    pub fn nodes_with(&self, tag: Assignment) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.assignments[i] == tag).collect()
    }

    /// `<index> Q|P|KEEP` per line, preceded by `# alice: <index>`.
    pub fn to_text(&self) -> String {
        let mut out = format!("# alice: {}\n", self.alice);
        for (i, a) in self.assignments.iter().enumerate() {
            let _ = writeln!(out, "{i} {a}");
        }
        out
    }

    /// Inverse of [`to_text`](Self::to_text). Without an `alice` comment the
    /// lower kept index is Alice.
    pub fn parse(text: &str) -> Result<Self> {
        let mut alice = None;
        let mut tags: Vec<Option<Assignment>> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let perr = |msg: String| CvnetError::Parse { line, msg };
            let (content, comment) = match raw.find('#') {
                Some(pos) => (&raw[..pos], Some(raw[pos + 1..].trim())),
                None => (raw, None),
            };
            if let Some(a) = comment.and_then(|c| c.strip_prefix("alice:")) {
                alice = Some(a.trim().parse::<usize>().map_err(|_| perr(format!("bad alice '{a}'")))?);
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            match fields.as_slice() {
                [] => continue,
                [i, tag] => {
                    let i: usize = i.parse().map_err(|_| perr(format!("bad node index '{i}'")))?;
                    let tag: Assignment = tag.parse().map_err(|e: CvnetError| perr(e.to_string()))?;
                    if tags.len() <= i {
                        tags.resize(i + 1, None);
                    }
                    if tags[i].replace(tag).is_some() {
                        return Err(perr(format!("node {i} assigned twice")));
                    }
                }
                _ => return Err(perr(format!("expected '<index> Q|P|KEEP', found '{}'", content.trim()))),
            }
        }
        let assignments = tags
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                t.ok_or_else(|| CvnetError::Parse { line: 0, msg: format!("node {i} has no assignment") })
            })
            .collect::<Result<Vec<_>>>()?;
        let alice = match alice {
            Some(a) => a,
            None => assignments.iter().position(|&a| a == Assignment::Keep).unwrap_or(0),
        };
        Self::new(assignments, alice)
    }
}

fn check_index(z: &ZGraph, node: usize) -> Result<()> {
    if node >= z.n_modes() {
        return Err(CvnetError::InvalidNode { index: node, n: z.n_modes() });
    }
    Ok(())
}

/// Vertex removal. Measuring the last mode yields an empty state.
pub fn measure_q(z: &ZGraph, node: usize) -> Result<ZGraph> {
    check_index(z, node)?;
    Ok(ZGraph::from_complex_unchecked(z.z().clone().remove_row(node).remove_column(node)))
}

/// Wire shortening, `W − RRᵀ/t`.
pub fn measure_p(z: &ZGraph, node: usize) -> Result<ZGraph> {
    check_index(z, node)?;
    let t = z.z()[(node, node)];
    if t.norm() < PIVOT_TOL {
        return Err(CvnetError::SingularPivot(t.norm()));
    }
    let w = z.z().clone().remove_row(node).remove_column(node);
    let r = z.z().column(node).clone_owned().remove_row(node);
    let n = w.nrows();
    let out = DMatrix::from_fn(n, n, |i, j| w[(i, j)] - r[i] * r[j] / t);
    Ok(ZGraph::from_complex_unchecked(out))
}

pub fn measure(z: &ZGraph, node: usize, basis: Basis) -> Result<ZGraph> {
    match basis {
        Basis::Q => measure_q(z, node),
        Basis::P => measure_p(z, node),
    }
}

/// A state after some measurements, with `labels[i]` the original index of
/// current mode `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledState {
    pub z: ZGraph,
    pub labels: Vec<usize>,
}

impl LabeledState {
    pub fn new(z: ZGraph) -> Self {
        let labels = (0..z.n_modes()).collect();
        LabeledState { z, labels }
    }

    pub fn position(&self, label: usize) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or(CvnetError::InvalidNode { index: label, n: self.labels.len() })
    }

    /// Measures the mode originally labelled `label`.
    pub fn measure(&self, label: usize, basis: Basis) -> Result<LabeledState> {
        let k = self.position(label)?;
        let z = measure(&self.z, k, basis)?;
        let mut labels = self.labels.clone();
        labels.remove(k);
        Ok(LabeledState { z, labels })
    }
}

/// Applies measurements one by one, addressed by original labels.
pub fn measure_sequence(z: &ZGraph, steps: &[(usize, Basis)]) -> Result<LabeledState> {
    steps.iter().try_fold(LabeledState::new(z.clone()), |st, &(label, basis)| st.measure(label, basis))
}

/// The 2×2 `Z` of `(alice, bob)` after q̂ on every node outside
/// `{alice, bob} ∪ p_nodes` and p̂ on `p_nodes`.
///
/// Equals the Schur complement `Z_KK − Z_KP Z_PP⁻¹ Z_PK`, the composition of
/// the sequential p̂ rules. `Z_PP` is invertible whenever `Im Z` is positive
/// definite.
pub fn reduce_pair(z: &ZGraph, alice: usize, bob: usize, p_nodes: &[usize]) -> Result<DMatrix<Complex64>> {
    check_index(z, alice)?;
    check_index(z, bob)?;
    if alice == bob {
        return Err(CvnetError::InvalidParameter("alice and bob coincide".into()));
    }
    let zz = z.z();
    let keep = [alice, bob];
    let z_kk = DMatrix::from_fn(2, 2, |i, j| zz[(keep[i], keep[j])]);
    if p_nodes.is_empty() {
        return Ok(z_kk);
    }
    for &p in p_nodes {
        check_index(z, p)?;
        if keep.contains(&p) {
            return Err(CvnetError::InvalidParameter(format!("node {p} is both kept and measured")));
        }
    }
    let m = p_nodes.len();
    let z_pp = DMatrix::from_fn(m, m, |i, j| zz[(p_nodes[i], p_nodes[j])]);
    let z_pk = DMatrix::from_fn(m, 2, |i, j| zz[(p_nodes[i], keep[j])]);
    let x = z_pp.lu().solve(&z_pk).ok_or(CvnetError::SingularPivot(0.0))?;
    let corr = z_pk.transpose() * x;
    let mut pair = z_kk - corr;
    // symmetric by construction; remove roundoff asymmetry
    let off = (pair[(0, 1)] + pair[(1, 0)]) * 0.5;
    pair[(0, 1)] = off;
    pair[(1, 0)] = off;
    Ok(pair)
}

/// Applies a plan: all Q measurements, then all P measurements. Returns the
/// two-mode `Z` with Alice as mode 0.
pub fn apply_plan(z: &ZGraph, plan: &MeasurementPlan) -> Result<ZGraph> {
    if plan.n() != z.n_modes() {
        return Err(CvnetError::InvalidParameter(format!(
            "plan covers {} nodes, state has {}",
            plan.n(),
            z.n_modes()
        )));
    }
    let pair = reduce_pair(z, plan.alice(), plan.bob(), &plan.nodes_with(Assignment::P))?;
    Ok(ZGraph::from_complex_unchecked(pair))
}

/// Node-by-node version of [`apply_plan`], Q before P, each in index order.
pub fn apply_plan_sequential(z: &ZGraph, plan: &MeasurementPlan) -> Result<ZGraph> {
    let steps: Vec<(usize, Basis)> = plan
        .nodes_with(Assignment::Q)
        .into_iter()
        .map(|i| (i, Basis::Q))
        .chain(plan.nodes_with(Assignment::P).into_iter().map(|i| (i, Basis::P)))
        .collect();
    let st = measure_sequence(z, &steps)?;
    let a = st.position(plan.alice())?;
    let b = st.position(plan.bob())?;
    let zz = st.z.z();
    let order = [a, b];
    Ok(ZGraph::from_complex_unchecked(DMatrix::from_fn(2, 2, |i, j| zz[(order[i], order[j])])))
}

/// Gaussian homodyne conditioning of `σ` on quadrature `q_node` or
/// `p_node`: `σ_rr − σ_rx σ_xx⁻¹ σ_xr` over the other modes, which keep
/// their order.
pub fn conditioning_oracle(cov: &CovMatrix, node: usize, basis: Basis) -> Result<CovMatrix> {
    let n = cov.n_modes();
    if node >= n {
        return Err(CvnetError::InvalidNode { index: node, n });
    }
    let s = cov.matrix();
    let x = match basis {
        Basis::Q => node,
        Basis::P => n + node,
    };
    let var = s[(x, x)];
    let scale = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if var <= 1e-14 * scale.max(1.0) {
        return Err(CvnetError::NumericalDegeneracy(format!("measured quadrature variance {var:e}")));
    }
    let rest: Vec<usize> = (0..2 * n).filter(|&i| i != node && i != n + node).collect();
    let m = rest.len();
    let out = DMatrix::from_fn(m, m, |i, j| {
        let (a, b) = (rest[i], rest[j]);
        s[(a, b)] - s[(a, x)] * s[(x, b)] / var
    });
    let out = (&out + out.transpose()) * 0.5;
    CovMatrix::new(out)
}

/// Chains [`conditioning_oracle`] over steps addressed by original labels.
pub fn conditioning_sequence(cov: &CovMatrix, steps: &[(usize, Basis)]) -> Result<(CovMatrix, Vec<usize>)> {
    let mut labels: Vec<usize> = (0..cov.n_modes()).collect();
    let mut cur = cov.clone();
    for &(label, basis) in steps {
        let k = labels
            .iter()
            .position(|&l| l == label)
            .ok_or(CvnetError::InvalidNode { index: label, n: labels.len() })?;
        cur = conditioning_oracle(&cur, k, basis)?;
        labels.remove(k);
    }
    Ok((cur, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{cov_from_z, graph_state_cov, symplectic_spectrum, z_from_network};
    use crate::netgen::{gen_er, gen_regular, Network, NetworkMeta, Topology};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn path3() -> ZGraph {
        z_from_network(&gen_regular(Topology::Linear, 3, 1.0).unwrap())
    }

    #[test]
    fn q_on_middle_of_path_disconnects() {
        let z = measure_q(&path3(), 1).unwrap();
        assert_eq!(
            z.z(),
            &DMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)])
        );
    }

    #[test]
    fn q_on_triangle_leaves_edge() {
        let z = z_from_network(&gen_regular(Topology::Complete, 3, 1.0).unwrap());
        let w = measure_q(&z, 0).unwrap();
        assert_eq!(
            w.z(),
            &DMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)])
        );
    }

    #[test]
    fn p_on_middle_of_path() {
        let z = measure_p(&path3(), 1).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[c(0.0, 2.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 2.0)]);
        assert!((z.z() - expected).iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn isolated_node_measurements_leave_rest_unchanged() {
        let net = Network::from_edges(3, [(0, 1, 1.5)], 3.0, NetworkMeta::default()).unwrap();
        let z = z_from_network(&net);
        let expected = z.z().clone().remove_row(2).remove_column(2);
        assert_eq!(measure_q(&z, 2).unwrap().z(), &expected);
        assert_eq!(measure_p(&z, 2).unwrap().z(), &expected);
    }

    #[test]
    fn last_mode_gives_empty_state() {
        let z = z_from_network(&Network::from_edges(1, [], 0.0, NetworkMeta::default()).unwrap());
        assert!(measure_q(&z, 0).unwrap().is_empty());
        assert!(measure_p(&z, 0).unwrap().is_empty());
        assert!(measure_q(&z, 1).is_err());
    }

    #[test]
    fn singular_pivot() {
        let z = ZGraph::from_complex_unchecked(DMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 1e-13), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)],
        ));
        assert!(matches!(measure_p(&z, 0), Err(CvnetError::SingularPivot(_))));
    }

    #[test]
    fn oracle_examples() {
        let vac = CovMatrix::vacuum(3);
        for basis in [Basis::Q, Basis::P] {
            assert_eq!(conditioning_oracle(&vac, 1, basis).unwrap(), CovMatrix::vacuum(2));
        }
        let z = path3();
        let via_rule = cov_from_z(&measure_p(&z, 1).unwrap()).unwrap();
        let via_oracle = conditioning_oracle(&cov_from_z(&z).unwrap(), 1, Basis::P).unwrap();
        assert!(max_abs_diff(via_rule.matrix(), via_oracle.matrix()) < 1e-9);

        let s = 7.0;
        let edge = Network::from_edges(2, [(0, 1, 1.0)], s, NetworkMeta::default()).unwrap();
        let cond = conditioning_oracle(&graph_state_cov(&edge), 0, Basis::Q).unwrap();
        assert_abs_diff_eq!(cond.matrix()[(0, 0)], 0.5 * 10f64.powf(s / 10.0), epsilon = 1e-12);
    }

    #[test]
    fn plan_text_round_trip() {
        let mut plan = MeasurementPlan::uniform(5, 4, 0, Assignment::Q).unwrap();
        plan.set(2, Assignment::P).unwrap();
        assert_eq!((plan.alice(), plan.bob()), (4, 0));
        let text = plan.to_text();
        assert!(text.contains("2 P\n") && text.contains("4 KEEP\n"));
        assert_eq!(MeasurementPlan::parse(&text).unwrap(), plan);
        assert!(plan.set(0, Assignment::P).is_err());
        assert!(MeasurementPlan::parse("0 KEEP\n1 KEEP\n2 X\n").is_err());
        assert!(MeasurementPlan::parse("0 KEEP\n2 KEEP\n").is_err());
        assert!(MeasurementPlan::parse("0 KEEP\n1 Q\n").is_err());
        assert_eq!(MeasurementPlan::parse("1 KEEP\n0 P\n2 KEEP\n").unwrap().alice(), 1);
    }

    #[test]
    fn plan_examples_on_small_graphs() {
        let z = z_from_network(&gen_regular(Topology::Linear, 3, 1.0).unwrap());
        let mut plan = MeasurementPlan::uniform(3, 0, 2, Assignment::P).unwrap();
        assert!(apply_plan(&z, &plan).unwrap().z()[(0, 1)].norm() > 0.5);
        plan.set(1, Assignment::Q).unwrap();
        assert_eq!(apply_plan(&z, &plan).unwrap().z()[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn alice_is_mode_zero() {
        let net =
            Network::from_edges(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5)], 2.0, NetworkMeta::default())
                .unwrap();
        let z = z_from_network(&net);
        let fwd = apply_plan(&z, &MeasurementPlan::uniform(4, 0, 3, Assignment::P).unwrap()).unwrap();
        let rev = apply_plan(&z, &MeasurementPlan::uniform(4, 3, 0, Assignment::P).unwrap()).unwrap();
        assert_abs_diff_eq!(fwd.z()[(0, 0)].im, rev.z()[(1, 1)].im, epsilon = 1e-14);
        assert!((fwd.z()[(0, 0)] - fwd.z()[(1, 1)]).norm() > 1e-3);
    }

    fn arb_state() -> impl Strategy<Value = Network> {
        (
            2usize..=8,
            0.2f64..0.9,
            prop::sample::select(vec![0.5, 1.0, 2.0]),
            any::<u64>(),
            prop::collection::vec(0.0f64..=10.0, 8),
        )
            .prop_map(|(n, p, g, seed, s)| {
                gen_er(n, p, g, seed).unwrap().with_node_squeezing(s[..n].to_vec()).unwrap()
            })
    }

    fn arb_steps(n: usize) -> impl Strategy<Value = Vec<(usize, Basis)>> {
        (Just((0..n).collect::<Vec<usize>>()).prop_shuffle(), prop::collection::vec(any::<bool>(), n), 1..n)
            .prop_map(|(order, bases, len)| {
                order
                    .into_iter()
                    .zip(bases)
                    .take(len)
                    .map(|(k, b)| (k, if b { Basis::P } else { Basis::Q }))
                    .collect()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn rules_match_conditioning(
            (net, steps) in arb_state().prop_flat_map(|net| { let n = net.n(); (Just(net), arb_steps(n)) })
        ) {
            let z = z_from_network(&net);
            let st = measure_sequence(&z, &steps).unwrap();
            let (oracle, labels) = conditioning_sequence(&graph_state_cov(&net), &steps).unwrap();
            prop_assert_eq!(&st.labels, &labels);
            let via_rules = cov_from_z(&st.z).unwrap();
            let diff = max_abs_diff(via_rules.matrix(), oracle.matrix());
            prop_assert!(diff < 1e-9, "max diff {:e}", diff);
            for nu in symplectic_spectrum(&via_rules).unwrap() {
                prop_assert!((nu - 0.5).abs() < 1e-9, "nu = {}", nu);
            }
        }

        #[test]
        fn disjoint_measurements_commute(
            (net, steps) in arb_state().prop_flat_map(|net| { let n = net.n(); (Just(net), arb_steps(n)) })
        ) {
            let z = z_from_network(&net);
            let fwd = measure_sequence(&z, &steps).unwrap();
            let rev: Vec<_> = steps.iter().rev().copied().collect();
            let bwd = measure_sequence(&z, &rev).unwrap();
            prop_assert_eq!(&fwd.labels, &bwd.labels);
            let diff = (fwd.z.z() - bwd.z.z()).iter().fold(0.0f64, |m, v| m.max(v.norm()));
            prop_assert!(diff < 1e-10, "diff {:e}", diff);
        }

        #[test]
        fn q_rule_is_mode_deletion(net in arb_state(), k in 0usize..8) {
            let k = k % net.n();
            let z = z_from_network(&net);
            let by_rule = cov_from_z(&measure_q(&z, k).unwrap()).unwrap();
            let conditioned = conditioning_oracle(&graph_state_cov(&net), k, Basis::Q).unwrap();
            prop_assert!(max_abs_diff(by_rule.matrix(), conditioned.matrix()) < 1e-9);
            let zk = z.z().clone().remove_row(k).remove_column(k);
            let measured = measure_q(&z, k).unwrap();
            prop_assert_eq!(measured.z(), &zk);
        }

        #[test]
        fn block_reduction_matches_sequential(net in arb_state(), tags in prop::collection::vec(any::<bool>(), 8), a in 0usize..8, b in 0usize..8) {
            let n = net.n();
            let (a, b) = (a % n, b % n);
            prop_assume!(a != b);
            let mut plan = MeasurementPlan::uniform(n, a, b, Assignment::Q).unwrap();
            for i in (0..n).filter(|&i| i != a && i != b) {
                if tags[i] {
                    plan.set(i, Assignment::P).unwrap();
                }
            }
            let z = z_from_network(&net);
            let fast = apply_plan(&z, &plan).unwrap();
            let slow = apply_plan_sequential(&z, &plan).unwrap();
            let diff = (fast.z() - slow.z()).iter().fold(0.0f64, |m, v| m.max(v.norm()));
            prop_assert!(diff < 1e-10, "diff {:e}", diff);
        }
    }
}
