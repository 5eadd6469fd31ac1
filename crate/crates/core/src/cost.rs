//! Squeezing resources of graph states.
//!
//! For an unsqueezed graph state, every adjacency eigenvalue `D` yields one
//! Bloch–Messiah supermode with variances
//! `λ± = ½ (1 + D²/2 ± √(D² + D⁴/4))`; the squeezing cost is
//! `G = Σ 10 log10(2λ⁺)` dB.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{CvnetError, Result};
use crate::gaussian::squeeze_factor;
use crate::netgen::Network;

/// Per-mode squeezing of a pure Gaussian state, sorted by `λ⁺` descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezingSpectrum {
    /// `(λ⁺, λ⁻)` variances, vacuum ½.
    pub pairs: Vec<(f64, f64)>,
    /// `10 log10(2λ⁺)` per mode.
    pub db: Vec<f64>,
    pub n_squeezers: usize,
    /// Adjacency eigenvalues (ascending) when the spectrum came from them.
    pub adjacency_eigenvalues: Option<Vec<f64>>,
}

impl SqueezingSpectrum {
    pub fn from_pairs(mut pairs: Vec<(f64, f64)>, n_squeezers: usize) -> Self {
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let db = pairs.iter().map(|&(p, _)| 10.0 * (2.0 * p).log10()).collect();
        SqueezingSpectrum { pairs, db, n_squeezers, adjacency_eigenvalues: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub total_db: f64,
    /// Descending.
    pub per_mode_db: Vec<f64>,
    pub n_squeezers: usize,
    /// `Tr(A²)`, in units of ħω/2, when computed from a network.
    pub energy: Option<f64>,
}

/// `(λ⁺, λ⁻)` of the supermode attached to adjacency eigenvalue `d` in an
/// unsqueezed graph state. `λ⁻` is taken as `1/(4λ⁺)`, which equals the
/// minus branch exactly and avoids its cancellation at large `|d|`.
pub fn squeeze_pair(d: f64) -> (f64, f64) {
    let d2 = d * d;
    let plus = 0.5 * (1.0 + d2 / 2.0 + (d2 + d2 * d2 / 4.0).sqrt());
    (plus, 0.25 / plus)
}

/// Supermode variances when every node starts with `s` dB of p-squeezing.
///
/// Each adjacency eigenmode carries the 2×2 block
/// `½ [[R, RD], [RD, RD² + 1/R]]` (determinant ¼) with `R = 10^(s/10)`;
/// at `s = 0` this reduces to [`squeeze_pair`].
pub fn squeeze_pair_uniform(d: f64, squeeze_db: f64) -> (f64, f64) {
    if squeeze_db == 0.0 {
        return squeeze_pair(d);
    }
    let r = 1.0 / squeeze_factor(squeeze_db);
    let trace = r + r * d * d + 1.0 / r;
    let plus = 0.25 * (trace + (trace * trace - 4.0).max(0.0).sqrt());
    (plus, 0.25 / plus)
}

/// Adjacency eigenvalues, ascending.
pub fn adjacency_eigenvalues(net: &Network) -> Vec<f64> {
    let mut eig: Vec<f64> = net.adj().clone().symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// `n · ε · max|D|`.
pub fn rank_tolerance(n: usize, eigenvalues: &[f64]) -> f64 {
    let max = eigenvalues.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    n as f64 * f64::EPSILON * max
}

fn numerical_rank(n: usize, eigenvalues: &[f64]) -> usize {
    let tol = rank_tolerance(n, eigenvalues);
    eigenvalues.iter().filter(|d| d.abs() > tol).count()
}

/// Squeezing spectrum from the adjacency spectrum.
///
/// Requires uniform node squeezing. Without initial squeezing the number of
/// squeezers is the numerical rank of the adjacency; with it, every mode is
/// squeezed.
pub fn spectrum_from_adjacency(net: &Network) -> Result<SqueezingSpectrum> {
    let s = net.uniform_squeeze_db().ok_or_else(|| {
        CvnetError::InvalidParameter(
            "adjacency route needs uniform node squeezing; use the covariance route".into(),
        )
    })?;
    let eig = adjacency_eigenvalues(net);
    let pairs: Vec<_> = eig.iter().map(|&d| squeeze_pair_uniform(d, s)).collect();
    let n_squeezers = if s == 0.0 { numerical_rank(net.n(), &eig) } else { net.n() };
    let mut spec = SqueezingSpectrum::from_pairs(pairs, n_squeezers);
    spec.adjacency_eigenvalues = Some(eig);
    Ok(spec)
}

pub fn squeezing_cost(spec: &SqueezingSpectrum) -> CostReport {
    let mut per_mode_db = spec.db.clone();
    per_mode_db.sort_by(|a, b| b.total_cmp(a));
    CostReport {
        total_db: per_mode_db.iter().sum(),
        per_mode_db,
        n_squeezers: spec.n_squeezers,
        energy: None,
    }
}

/// Cost report of a network, with the energy filled in.
pub fn network_cost(net: &Network) -> Result<CostReport> {
    let mut report = squeezing_cost(&spectrum_from_adjacency(net)?);
    report.energy = Some(energy_delta(net));
    Ok(report)
}

/// Squeezing cost from the squeezed-quadrature variances of a possibly
/// mixed state: `-Σ 10 log10 min(2λ⁻, 1)`. Antisqueezed-only modes
/// contribute nothing.
pub fn squeezing_cost_mixed(lambda_minus: &[f64]) -> f64 {
    lambda_minus.iter().map(|&l| -10.0 * (2.0 * l).min(1.0).log10()).sum::<f64>() + 0.0
    // no -0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticTopology {
    Linear,
    /// Circulant with `q` nearest neighbors in total (`q / 2` per side).
    RingQ {
        q: usize,
    },
    Star,
    /// Two hubs and `n - 2` centers: `±g√(2(n−2))`.
    Diamond,
    /// The diamond spectrum `±g√(2n)` labelled by the number of centers `n`.
    DiamondByCenters,
    Complete,
}

/// Closed-form adjacency spectrum, ascending.
pub fn analytic_spectrum(topology: AnalyticTopology, n: usize, g: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(CvnetError::InvalidParameter("empty graph".into()));
    }
    let two_nonzero = |d: f64, len: usize| -> Vec<f64> {
        let mut v = vec![0.0; len];
        v[0] = -d;
        v[len - 1] = d;
        v
    };
    let mut eig = match topology {
        AnalyticTopology::Linear => {
            (1..=n).map(|k| 2.0 * g * (PI * k as f64 / (n as f64 + 1.0)).cos()).collect()
        }
        AnalyticTopology::RingQ { q } => {
            if q % 2 != 0 || q >= n {
                return Err(CvnetError::InvalidParameter(format!(
                    "circulant needs even q < n, got q = {q}, n = {n}"
                )));
            }
            (0..n)
                .map(|k| (1..=q / 2).map(|j| 2.0 * g * (2.0 * PI * (j * k) as f64 / n as f64).cos()).sum())
                .collect()
        }
        AnalyticTopology::Star => {
            if n < 2 {
                return Err(CvnetError::InvalidParameter("star needs n >= 2".into()));
            }
            two_nonzero(g * ((n - 1) as f64).sqrt(), n)
        }
        AnalyticTopology::Diamond => {
            if n < 3 {
                return Err(CvnetError::InvalidParameter("diamond needs n >= 3".into()));
            }
            two_nonzero(g * (2.0 * (n - 2) as f64).sqrt(), n)
        }
        AnalyticTopology::DiamondByCenters => two_nonzero(g * (2.0 * n as f64).sqrt(), n + 2),
        AnalyticTopology::Complete => {
            let mut v = vec![-g; n];
            v[n - 1] = g * (n - 1) as f64;
            v
        }
    };
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostTopology {
    Star,
    Diamond,
    Complete,
    /// Large-`n` cost per squeezed mode of the linear graph.
    LinearAsymptotic,
}

/// Closed-form squeezing cost in dB. For [`CostTopology::LinearAsymptotic`]
/// the value is the per-mode limit and `n` is ignored.
pub fn analytic_cost(topology: CostTopology, n: usize, g: f64) -> Result<f64> {
    let nf = n as f64;
    match topology {
        CostTopology::Star => {
            if n < 2 {
                return Err(CvnetError::InvalidParameter("star needs n >= 2".into()));
            }
            let x = g * g * (nf - 1.0);
            Ok(20.0 * ((2.0 + x + (x * x + 4.0 * x).sqrt()) / 2.0).log10())
        }
        CostTopology::Diamond => {
            if n < 3 {
                return Err(CvnetError::InvalidParameter("diamond needs n >= 3".into()));
            }
            let m = nf - 2.0;
            Ok(20.0 * (1.0 + g * g * m + g * (m * (g * g * m + 2.0)).sqrt()).log10())
        }
        CostTopology::Complete => {
            if n < 2 {
                return Err(CvnetError::InvalidParameter("complete graph needs n >= 2".into()));
            }
            let m = nf - 1.0;
            let small = 10.0 * m * ((2.0 + g * g + g * (g * g + 4.0).sqrt()) / 2.0).log10();
            let big =
                10.0 * (1.0 + (1.0 + (1.0 + 4.0 / (g * g * m * m)).sqrt()) / 2.0 * g * g * m * m).log10();
            Ok(small + big)
        }
        CostTopology::LinearAsymptotic => linear_asymptotic_per_mode(g),
    }
}

/// Star cost written with the `-2(2g⁴ - g²)N` term under the root. Agrees
/// with the exact cost only asymptotically; see [`analytic_cost`].
pub fn star_cost_approx(n: usize, g: f64) -> f64 {
    let nf = n as f64;
    let (g2, g4) = (g * g, g.powi(4));
    let root = (g4 * nf * nf - 2.0 * (2.0 * g4 - g2) * nf + g4 - 4.0 * g2).max(0.0).sqrt();
    20.0 * ((2.0 - g2 + g2 * nf + root) / 2.0).log10()
}

/// Diamond cost `20 log10(1 + g²N + g√(N(g²N + 4)))` with `N` read as
/// the number of centers. Agrees with the exact cost only asymptotically.
pub fn diamond_cost_approx(n: usize, g: f64) -> f64 {
    let nf = n as f64;
    20.0 * (1.0 + g * g * nf + g * (nf * (g * g * nf + 4.0)).sqrt()).log10()
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, target: f64) -> Result<f64> {
    let out = quadrature::double_exponential::integrate(f, a, b, target);
    if out.error_estimate.is_finite() && out.error_estimate <= target.max(1e-8) {
        Ok(out.integral)
    } else {
        Err(CvnetError::QuadratureNonConvergence(out.error_estimate))
    }
}

/// `10 ∫₀¹ log10 2λ⁺(2g cos πy) dy`, the Riemann limit of the linear
/// graph's cost per mode. Cached per `g`.
pub fn linear_asymptotic_per_mode(g: f64) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&v) = cache.lock().ok().and_then(|c| c.get(&g.to_bits()).copied()).as_ref() {
        return Ok(v);
    }
    // the integrand is symmetric about y = ½
    let half =
        integrate(|y| 10.0 * (2.0 * squeeze_pair(2.0 * g * (PI * y).cos()).0).log10(), 0.0, 0.5, 1e-10)?;
    let value = 2.0 * half;
    if let Ok(mut c) = cache.lock() {
        c.insert(g.to_bits(), value);
    }
    Ok(value)
}

/// Expected squeezing cost of an Erdős–Rényi graph state from the
/// semicircle law of width `R = 2g√(Np(1−p))` plus the outlier eigenvalue
/// `gpN`. The bulk integral uses `x = R sin θ`.
pub fn er_expected_cost(n: usize, p: f64, g: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(CvnetError::InvalidParameter(format!("p = {p} must lie in (0, 1)")));
    }
    let nf = n as f64;
    let cost_of = |d: f64| 10.0 * (2.0 * squeeze_pair(d).0).log10();
    let outlier = cost_of(g * p * nf);
    let radius = 2.0 * g * (nf * p * (1.0 - p)).sqrt();
    // (40N/πR²) ∫₀^R √(R²−x²) log10 2λ⁺(x) dx = (4N/π) ∫₀^{π/2} cos²θ · cost(R sin θ) dθ
    let bulk =
        integrate(|theta: f64| theta.cos().powi(2) * cost_of(radius * theta.sin()), 0.0, PI / 2.0, 1e-10)?;
    Ok(outlier + 4.0 * nf / PI * bulk)
}

/// `Tr(A²)`, the energy above vacuum in units of ħω/2.
pub fn energy_delta(net: &Network) -> f64 {
    let a = net.adj();
    let n = net.n();
    let mut trace = 0.0;
    for i in 0..n {
        for j in 0..n {
            trace += a[(i, j)] * a[(j, i)];
        }
    }
    trace
}

pub fn adjacency_rank(net: &Network) -> usize {
    numerical_rank(net.n(), &adjacency_eigenvalues(net))
}
