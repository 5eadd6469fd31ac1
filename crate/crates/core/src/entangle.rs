//! Entanglement of two-mode Gaussian states.
//!
//! Covariances use vacuum variance ½. The reported symplectic eigenvalue is
//! `ν̄ = ν̃₋ / ½`, so `ν̄ = 1` is the separability threshold and the
//! logarithmic negativity is `−2 log2 ν̄`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CvnetError, Result};
use crate::gaussian::{cov_from_z, squeeze_factor, symplectic_spectrum, CovMatrix, ZGraph};

/// Negative discriminants of `ν²` above `-DISCRIMINANT_TOL · max(1, Δ²)`
/// are clamped to zero.
pub const DISCRIMINANT_TOL: f64 = 1e-10;

/// Raw log-negativities at or below this count as separable.
pub const SEPARABLE_TOL: f64 = 1e-12;

/// Two-mode state in qp-ordering `(q_A, q_B, p_A, p_B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairState {
    pub cov: CovMatrix,
    /// Original node indices of modes A and B.
    pub labels: [usize; 2],
}

impl PairState {
    pub fn new(cov: CovMatrix, labels: [usize; 2]) -> Result<Self> {
        if cov.n_modes() != 2 {
            return Err(CvnetError::InvalidParameter(format!(
                "pair state needs 2 modes, got {}",
                cov.n_modes()
            )));
        }
        Ok(PairState { cov, labels })
    }

    pub fn from_z(z: &ZGraph, labels: [usize; 2]) -> Result<Self> {
        Self::new(cov_from_z(z)?, labels)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNeg {
    pub raw: f64,
    /// `raw` above [`SEPARABLE_TOL`], otherwise 0.
    pub clamped: f64,
}

impl LogNeg {
    fn from_raw(raw: f64) -> Self {
        LogNeg { raw, clamped: if raw > SEPARABLE_TOL { raw } else { 0.0 } }
    }
}

/// Flips the sign of `p_B` (row and column 3).
pub fn partial_transpose(pair: &PairState) -> DMatrix<f64> {
    let mut m = pair.cov.matrix().clone();
    for k in 0..4 {
        if k != 3 {
            m[(3, k)] = -m[(3, k)];
            m[(k, 3)] = -m[(k, 3)];
        }
    }
    m
}

fn block(m: &DMatrix<f64>, a: usize, b: usize) -> f64 {
    // det of the 2×2 block pairing mode a's (q, p) rows with mode b's columns
    m[(a, b)] * m[(a + 2, b + 2)] - m[(a, b + 2)] * m[(a + 2, b)]
}

/// `det σ_A + det σ_B + 2 det σ_AB` with mode-major 2×2 blocks.
pub fn seralian(sigma: &DMatrix<f64>) -> f64 {
    block(sigma, 0, 0) + block(sigma, 1, 1) + 2.0 * block(sigma, 0, 1)
}

/// Smaller symplectic eigenvalue of a 4×4 matrix,
/// `ν₋² = (Δ − √(Δ² − 4 det σ)) / 2`, evaluated as
/// `2 det σ / (Δ + √(Δ² − 4 det σ))` to avoid cancellation. Nearly
/// degenerate pairs fall back to the general symplectic spectrum.
pub fn nu_minus(sigma: &DMatrix<f64>) -> Result<f64> {
    if sigma.shape() != (4, 4) {
        return Err(CvnetError::InvalidParameter("expected a 4×4 matrix".into()));
    }
    let delta = seralian(sigma);
    let det = sigma.determinant();
    let mut disc = delta * delta - 4.0 * det;
    if disc < 0.0 {
        if disc > -DISCRIMINANT_TOL * (delta * delta).max(1.0) {
            disc = 0.0;
        } else {
            return Err(CvnetError::NumericalDegeneracy(format!(
                "negative discriminant {disc:e} in symplectic eigenvalues"
            )));
        }
    }
    if disc < 1e-4 * delta * delta {
        // near-equal roots: the quadratic formula keeps only half the digits
        let cov = CovMatrix::new(sigma.clone())?;
        return Ok(symplectic_spectrum(&cov)?[0]);
    }
    let plus_sq = 0.5 * (delta + disc.sqrt());
    if plus_sq <= 0.0 || det <= 0.0 {
        return Err(CvnetError::NumericalDegeneracy(format!(
            "non-positive invariants (Δ = {delta:e}, det = {det:e})"
        )));
    }
    Ok((det / plus_sq).sqrt())
}

/// `ν̄ = ν̃₋ / ½` of the partially transposed state.
pub fn nu_bar(pair: &PairState) -> Result<f64> {
    Ok(2.0 * nu_minus(&partial_transpose(pair))?)
}

pub fn log_negativity(pair: &PairState) -> Result<LogNeg> {
    Ok(LogNeg::from_raw(-2.0 * nu_bar(pair)?.log2()))
}

/// Hub and center parameters of a diamond. Squeezing is given as the
/// p-variance factor `S = 10^(-s/10)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiamondParams {
    pub s_a: f64,
    pub s_b: f64,
    /// `(S_k, g_Ak, g_Bk)` per center.
    pub centers: Vec<(f64, f64, f64)>,
}

impl DiamondParams {
    /// Unsqueezed hubs; `n_centers` centers with `s_db` squeezing and both
    /// couplings `g`.
    pub fn uniform(n_centers: usize, s_db: f64, g: f64) -> Self {
        DiamondParams { s_a: 1.0, s_b: 1.0, centers: vec![(squeeze_factor(s_db), g, g); n_centers] }
    }

    /// Every node, hubs included, squeezed by `s_db`.
    pub fn all_squeezed(n_centers: usize, s_db: f64, g: f64) -> Self {
        let s = squeeze_factor(s_db);
        DiamondParams { s_a: s, s_b: s, centers: vec![(s, g, g); n_centers] }
    }

    fn validate(&self) -> Result<()> {
        let all_s = [self.s_a, self.s_b].into_iter().chain(self.centers.iter().map(|c| c.0));
        for s in all_s {
            if !(s > 0.0 && s.is_finite()) {
                return Err(CvnetError::InvalidParameter(format!("squeezing factor {s} must be positive")));
            }
        }
        Ok(())
    }

    /// `(Σ_A, Σ_B, Γ)` of `Z_AB = i [[Σ_A, Γ], [Γ, Σ_B]]`.
    pub fn sigma_gamma(&self) -> Result<(f64, f64, f64)> {
        self.validate()?;
        let mut out = (self.s_a, self.s_b, 0.0);
        for &(s, ga, gb) in &self.centers {
            out.0 += ga * ga / s;
            out.1 += gb * gb / s;
            out.2 += ga * gb / s;
        }
        Ok(out)
    }

    /// `ν̄² = (√(Σ_AΣ_B) − |Γ|)² / (Σ_AΣ_B − Γ²)`.
    pub fn nu_bar_sq(&self) -> Result<f64> {
        let (sa, sb, gamma) = self.sigma_gamma()?;
        let root = (sa * sb).sqrt();
        Ok((root - gamma.abs()).powi(2) / (sa * sb - gamma * gamma))
    }
}

/// Hub pair left after p̂-measuring every center of the diamond.
pub fn diamond_pair_closed_form(params: &DiamondParams) -> Result<PairState> {
    let (sa, sb, gamma) = params.sigma_gamma()?;
    let i = |x: f64| Complex64::new(0.0, x);
    let z = ZGraph::from_complex(DMatrix::from_row_slice(2, 2, &[i(sa), i(gamma), i(gamma), i(sb)]))?;
    PairState::from_z(&z, [0, 1])
}

/// `log2(1 + 2 n R g²)` with `R = 10^(s/10)` the anti-squeezing of the
/// centers; hubs unsqueezed.
pub fn diamond_logneg(n_centers: usize, s_db: f64, g: f64) -> f64 {
    (1.0 + 2.0 * n_centers as f64 * 10f64.powf(s_db / 10.0) * g * g).log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{graph_state_cov, z_from_network};
    use crate::measure::{apply_plan, conditioning_sequence, Assignment, Basis, MeasurementPlan};
    use crate::netgen::{gen_regular, Network, NetworkMeta, Topology};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn vacuum_pair() -> PairState {
        PairState::new(CovMatrix::vacuum(2), [0, 1]).unwrap()
    }

    fn product_squeezed(sa: f64, sb: f64) -> PairState {
        let net = Network::from_edges(2, [], 0.0, NetworkMeta::default())
            .unwrap()
            .with_node_squeezing(vec![sa, sb])
            .unwrap();
        PairState::new(graph_state_cov(&net), [0, 1]).unwrap()
    }

    /// Diamond with unsqueezed hubs 0 and n+1 and squeezed centers.
    fn diamond_net(n_centers: usize, s_db: f64, g: f64) -> Network {
        let n = n_centers + 2;
        let mut s = vec![s_db; n];
        s[0] = 0.0;
        s[n - 1] = 0.0;
        gen_regular(Topology::Diamond, n, g).unwrap().with_node_squeezing(s).unwrap()
    }

    fn simulate_hub_pair(net: &Network) -> PairState {
        let n = net.n();
        let plan = MeasurementPlan::uniform(n, 0, n - 1, Assignment::P).unwrap();
        PairState::from_z(&apply_plan(&z_from_network(net), &plan).unwrap(), [0, n - 1]).unwrap()
    }

    #[test]
    fn partial_transpose_examples() {
        let vac = vacuum_pair();
        assert_eq!(&partial_transpose(&vac), vac.cov.matrix());
        let pair = diamond_pair_closed_form(&DiamondParams::uniform(2, 3.0, 1.0)).unwrap();
        let once = partial_transpose(&pair);
        assert_ne!(&once, pair.cov.matrix());
        let twice =
            partial_transpose(&PairState::new(CovMatrix::new(once.clone()).unwrap(), [0, 1]).unwrap());
        assert_eq!(&twice, pair.cov.matrix());
        assert_abs_diff_eq!(once.determinant(), pair.cov.matrix().determinant(), epsilon = 1e-12);
    }

    #[test]
    fn seralian_examples() {
        assert_abs_diff_eq!(seralian(vacuum_pair().cov.matrix()), 0.5, epsilon = 1e-15);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 3.0, 2.0, 3.0]));
        assert_abs_diff_eq!(seralian(&d), 4.0 + 9.0, epsilon = 1e-12);
    }

    #[test]
    fn nu_minus_examples() {
        assert_abs_diff_eq!(nu_minus(vacuum_pair().cov.matrix()).unwrap(), 0.5, epsilon = 1e-14);
        let pair = simulate_hub_pair(&diamond_net(1, 0.0, 1.0));
        let nu = nu_minus(&partial_transpose(&pair)).unwrap();
        assert_abs_diff_eq!(nu, 0.5 * (1.0f64 / 3.0).sqrt(), epsilon = 1e-12);
        let product = product_squeezed(4.0, 9.0);
        assert!(nu_minus(&partial_transpose(&product)).unwrap() >= 0.5 - 1e-12);
    }

    #[test]
    fn log_negativity_examples() {
        assert_abs_diff_eq!(log_negativity(&vacuum_pair()).unwrap().raw, 0.0, epsilon = 1e-14);
        let d5 = simulate_hub_pair(&gen_regular(Topology::Diamond, 5, 1.0).unwrap());
        assert_abs_diff_eq!(log_negativity(&d5).unwrap().clamped, 7f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(log_negativity(&d5).unwrap().clamped, 2.807354922057604, epsilon = 1e-12);
        assert_eq!(log_negativity(&product_squeezed(6.0, 2.0)).unwrap().clamped, 0.0);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(diamond_logneg(0, 7.0, 3.0), 0.0);
        assert_abs_diff_eq!(diamond_logneg(3, 0.0, 1.0), 7f64.log2(), epsilon = 1e-14);
        assert_abs_diff_eq!(diamond_logneg(3, 10.0, 1.0), 61f64.log2(), epsilon = 1e-13);
        let empty = diamond_pair_closed_form(&DiamondParams::uniform(0, 5.0, 1.0)).unwrap();
        assert_abs_diff_eq!(log_negativity(&empty).unwrap().raw, 0.0, epsilon = 1e-14);
        let one_sided = DiamondParams { s_a: 1.0, s_b: 1.0, centers: vec![(0.5, 1.0, 0.0); 3] };
        assert_eq!(one_sided.sigma_gamma().unwrap().2, 0.0);
        let pair = diamond_pair_closed_form(&one_sided).unwrap();
        assert_abs_diff_eq!(log_negativity(&pair).unwrap().clamped, 0.0, epsilon = 1e-14);
        let bad = DiamondParams { s_a: 1.0, s_b: 1.0, centers: vec![(0.0, 1.0, 1.0)] };
        assert!(diamond_pair_closed_form(&bad).is_err());
    }

    #[test]
    fn closed_form_matches_measurement_chain() {
        for n_centers in 1..=6 {
            for s in [0.0, 5.0, 10.0] {
                for g in [0.5, 1.0, 2.0] {
                    let expected = diamond_logneg(n_centers, s, g);
                    let net = diamond_net(n_centers, s, g);
                    let sim = log_negativity(&simulate_hub_pair(&net)).unwrap().clamped;
                    assert_abs_diff_eq!(sim, expected, epsilon = 1e-9);

                    let n = net.n();
                    let steps: Vec<_> = (1..n - 1).map(|k| (k, Basis::P)).collect();
                    let (cov, labels) = conditioning_sequence(&graph_state_cov(&net), &steps).unwrap();
                    assert_eq!(labels, vec![0, n - 1]);
                    let oracle = log_negativity(&PairState::new(cov, [0, n - 1]).unwrap()).unwrap();
                    assert_abs_diff_eq!(oracle.clamped, expected, epsilon = 1e-9);

                    let params = DiamondParams::uniform(n_centers, s, g);
                    let closed = log_negativity(&diamond_pair_closed_form(&params).unwrap()).unwrap();
                    assert_abs_diff_eq!(closed.clamped, expected, epsilon = 1e-9);
                    assert_abs_diff_eq!(-params.nu_bar_sq().unwrap().log2(), expected, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn fully_squeezed_diamond_doubles_the_exponent() {
        for (n_centers, s, g) in [(1, 5.0, 1.0), (4, 10.0, 0.5), (6, 3.0, 2.0)] {
            let n = n_centers + 2;
            let net = gen_regular(Topology::Diamond, n, g).unwrap().with_uniform_squeezing(s).unwrap();
            let sim = log_negativity(&simulate_hub_pair(&net)).unwrap().clamped;
            let r = 10f64.powf(s / 10.0);
            assert_abs_diff_eq!(sim, (1.0 + 2.0 * n_centers as f64 * r * r * g * g).log2(), epsilon = 1e-9);
            let params = DiamondParams::all_squeezed(n_centers, s, g);
            assert_abs_diff_eq!(-params.nu_bar_sq().unwrap().log2(), sim, epsilon = 1e-9);
        }
    }

    #[test]
    fn closed_form_is_monotone() {
        for n in 0..10 {
            assert!(diamond_logneg(n + 1, 3.0, 1.0) > diamond_logneg(n, 3.0, 1.0));
        }
        for k in 0..10 {
            let s = k as f64;
            assert!(diamond_logneg(2, s + 1.0, 1.0) > diamond_logneg(2, s, 1.0));
            let g = 0.2 + 0.3 * k as f64;
            assert!(diamond_logneg(2, 0.0, g + 0.3) > diamond_logneg(2, 0.0, g));
        }
    }

    proptest! {
        #[test]
        fn nu_minus_matches_general_spectrum(
            sa in 0.1f64..10.0, sb in 0.1f64..10.0,
            centers in prop::collection::vec((0.1f64..10.0, -2.0f64..2.0, -2.0f64..2.0), 0..6),
        ) {
            let params = DiamondParams { s_a: sa, s_b: sb, centers };
            let pair = diamond_pair_closed_form(&params).unwrap();
            let pt = CovMatrix::new(partial_transpose(&pair)).unwrap();
            let general = symplectic_spectrum(&pt).unwrap()[0];
            let nu = nu_minus(pt.matrix()).unwrap();
            prop_assert!((nu - general).abs() < 1e-10 * general.max(1.0), "{} vs {}", nu, general);
            let ln = log_negativity(&pair).unwrap();
            prop_assert!(ln.clamped >= 0.0 && ln.clamped >= ln.raw - SEPARABLE_TOL);
            prop_assert!((nu_bar(&pair).unwrap().powi(2) - params.nu_bar_sq().unwrap()).abs() < 1e-9);
        }

        #[test]
        fn product_states_are_separable(sa in -10.0f64..10.0, sb in -10.0f64..10.0) {
            prop_assert_eq!(log_negativity(&product_squeezed(sa, sb)).unwrap().clamped, 0.0);
        }
    }
}
