//! Gaussian-state representations.
//!
//! Covariance matrices use qp-ordering `(q_1..q_N, p_1..p_N)` with vacuum
//! variance ½. Pure states are equivalently described by the complex
//! symmetric matrix `Z = V + iU` with `U` positive definite. First moments
//! are never tracked.

use std::fmt::Write as _;

use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cost::SqueezingSpectrum;
use crate::error::{CvnetError, Result};
use crate::netgen::Network;

/// Absolute tolerance of the physicality checks.
pub const PHYSICAL_TOL: f64 = 1e-9;
/// Largest condition number of `U` accepted when inverting it.
pub const MAX_CONDITION: f64 = 1e12;

/// p-variance reduction factor `10^(-s/10)` of `s` dB squeezing.
pub fn squeeze_factor(squeeze_db: f64) -> f64 {
    10f64.powf(-squeeze_db / 10.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovMatrix {
    m: DMatrix<f64>,
}

impl CovMatrix {
    /// Checks symmetry and positive definiteness. The stored matrix is the
    /// exact symmetric part of `m`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let dim = m.nrows();
        if m.ncols() != dim || !dim.is_multiple_of(2) {
            return Err(CvnetError::InvalidParameter(format!(
                "covariance must be 2N x 2N, got {}x{}",
                dim,
                m.ncols()
            )));
        }
        let scale = m.amax().max(1.0);
        let asym = (&m - m.transpose()).amax();
        if asym > 1e-9 * scale {
            return Err(CvnetError::NotSymmetric(asym));
        }
        let m = (&m + m.transpose()) * 0.5;
        if dim > 0 && Cholesky::new(m.clone()).is_none() {
            return Err(CvnetError::NotPositiveDefinite);
        }
        Ok(CovMatrix { m })
    }

    pub fn vacuum(n_modes: usize) -> Self {
        CovMatrix { m: DMatrix::identity(2 * n_modes, 2 * n_modes) * 0.5 }
    }

    pub fn n_modes(&self) -> usize {
        self.m.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    /// Row-major CSV preceded by an `n_modes,<N>` header line.
    pub fn to_csv(&self) -> String {
        let mut out = format!("n_modes,{}\n", self.n_modes());
        for row in self.m.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Complex graph `Z = V + iU` of a pure Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct ZGraph {
    z: DMatrix<Complex64>,
}

impl ZGraph {
    pub fn new(v: &DMatrix<f64>, u: &DMatrix<f64>) -> Result<Self> {
        if v.shape() != u.shape() || v.nrows() != v.ncols() {
            return Err(CvnetError::InvalidParameter("V and U must be square and equal-sized".into()));
        }
        let z = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| Complex64::new(v[(i, j)], u[(i, j)]));
        Self::from_complex(z)
    }

    /// Validates symmetry of `Z` and positive definiteness of `Im Z`.
    pub fn from_complex(z: DMatrix<Complex64>) -> Result<Self> {
        let n = z.nrows();
        if z.ncols() != n {
            return Err(CvnetError::InvalidParameter("Z must be square".into()));
        }
        let scale = z.iter().map(|c| c.norm()).fold(1.0, f64::max);
        let asym = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (z[(i, j)] - z[(j, i)]).norm())
            .fold(0.0, f64::max);
        if asym > 1e-9 * scale {
            return Err(CvnetError::NotSymmetric(asym));
        }
        let zg = ZGraph { z };
        if n > 0 && Cholesky::new(zg.u()).is_none() {
            return Err(CvnetError::NotPositiveDefinite);
        }
        Ok(zg)
    }

    pub(crate) fn from_complex_unchecked(z: DMatrix<Complex64>) -> Self {
        ZGraph { z }
    }

    pub fn n_modes(&self) -> usize {
        self.z.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.n_modes() == 0
    }

    pub fn z(&self) -> &DMatrix<Complex64> {
        &self.z
    }

    pub fn v(&self) -> DMatrix<f64> {
        self.z.map(|c| c.re)
    }

    pub fn u(&self) -> DMatrix<f64> {
        self.z.map(|c| c.im)
    }

    /// Two CSV blocks, `V` then `U`, each introduced by a label line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (label, mat) in [("V", self.v()), ("U", self.u())] {
            let _ = writeln!(out, "{label},{}", self.n_modes());
            for row in mat.row_iter() {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
        }
        out
    }
}

/// `Ω = [[0, I], [-I, 0]]` in qp-ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    omega: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(n_modes: usize) -> Self {
        let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
        for i in 0..n_modes {
            omega[(i, n_modes + i)] = 1.0;
            omega[(n_modes + i, i)] = -1.0;
        }
        SymplecticForm { omega }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.omega
    }
}

/// Covariance of the graph state: squeezed vacua (p-squeezing
/// `R_i = 10^(s_i/10)`) entangled by CZ gates weighted by the adjacency,
/// `σ = ½ S_CZ diag(R, 1/R) S_CZᵀ` with `S_CZ = [[I, 0], [A, I]]`.
pub fn graph_state_cov(net: &Network) -> CovMatrix {
    let n = net.n();
    let a = net.adj();
    let r: Vec<f64> = net.node_squeeze_db().iter().map(|&s| 1.0 / squeeze_factor(s)).collect();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    // A diag(R) A, with the unsqueezed case kept free of extra roundoff
    let ar = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * r[j]);
    let ara = &ar * a;
    for i in 0..n {
        m[(i, i)] = r[i];
        for j in 0..n {
            m[(i, n + j)] = r[i] * a[(i, j)];
            m[(n + i, j)] = a[(i, j)] * r[j];
            m[(n + i, n + j)] = ara[(i, j)];
        }
        m[(n + i, n + i)] += 1.0 / r[i];
    }
    CovMatrix { m: m * 0.5 }
}

/// `Z = A + i diag(10^(-s_i/10))`.
pub fn z_from_network(net: &Network) -> ZGraph {
    let n = net.n();
    let a = net.adj();
    let squeeze = net.node_squeeze_db();
    let z = DMatrix::from_fn(n, n, |i, j| {
        let im = if i == j { squeeze_factor(squeeze[i]) } else { 0.0 };
        Complex64::new(a[(i, j)], im)
    });
    ZGraph { z }
}

/// `σ = ½ [[U⁻¹, U⁻¹V], [VU⁻¹, U + VU⁻¹V]]`.
pub fn cov_from_z(z: &ZGraph) -> Result<CovMatrix> {
    let n = z.n_modes();
    if n == 0 {
        return Ok(CovMatrix::vacuum(0));
    }
    let u = z.u();
    let v = z.v();
    let eig = u.clone().symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if lo <= 0.0 {
        return Err(CvnetError::NotPositiveDefinite);
    }
    if hi / lo > MAX_CONDITION {
        return Err(CvnetError::NumericalDegeneracy(format!(
            "condition number {:e} of U exceeds {MAX_CONDITION:e}",
            hi / lo
        )));
    }
    let u_inv = Cholesky::new(u.clone()).ok_or(CvnetError::NotPositiveDefinite)?.inverse();
    let uinv_v = &u_inv * &v;
    let lower = &u + &v * &uinv_v;
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&u_inv);
    m.view_mut((0, n), (n, n)).copy_from(&uinv_v);
    m.view_mut((n, 0), (n, n)).copy_from(&uinv_v.transpose());
    m.view_mut((n, n), (n, n)).copy_from(&lower);
    let m = (&m + m.transpose()) * 0.25;
    Ok(CovMatrix { m })
}

/// Symplectic eigenvalues, ascending.
///
/// With `K = σ^½ Ω σ^½` (real antisymmetric, eigenvalues `±iν`), the
/// symmetric matrix `KᵀK` has each `ν²` twice; these are the moduli of the
/// eigenvalues of `iΩσ`.
pub fn symplectic_spectrum(cov: &CovMatrix) -> Result<Vec<f64>> {
    let n = cov.n_modes();
    if n == 0 {
        return Ok(Vec::new());
    }
    let eig = cov.matrix().clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&x| x <= 0.0) {
        return Err(CvnetError::NotPositiveDefinite);
    }
    let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let root = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.transpose();
    let k = &root * SymplecticForm::new(n).matrix() * &root;
    let mut sq: Vec<f64> = (k.transpose() * &k).symmetric_eigenvalues().iter().copied().collect();
    sq.sort_by(f64::total_cmp);
    Ok(sq.chunks(2).map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt()).collect())
}

/// Squeezing spectrum from the eigenvalues of a pure covariance matrix.
///
/// Eigenvalues of a pure state come in pairs with product ¼; sorting them
/// descending and pairing the i-th largest with the i-th smallest recovers
/// `(λ⁺_i, λ⁻_i)`.
pub fn squeezing_spectrum_numeric(cov: &CovMatrix) -> Result<SqueezingSpectrum> {
    let n = cov.n_modes();
    let mut eig: Vec<f64> = cov.matrix().clone().symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    let mut pairs = Vec::with_capacity(n);
    for i in 0..n {
        let (plus, minus) = (eig[i], eig[2 * n - 1 - i]);
        if minus <= 0.0 || (4.0 * plus * minus - 1.0).abs() > 1e-6 {
            return Err(CvnetError::PairingFailure(format!(
                "eigenvalues {plus} and {minus} do not multiply to 1/4; state is not pure"
            )));
        }
        pairs.push((plus, minus));
    }
    let lambda_max = eig.first().copied().unwrap_or(0.5);
    let tol = 1e-10 * lambda_max.max(1.0);
    let n_squeezers = pairs.iter().filter(|&&(p, _)| p > 0.5 + tol).count();
    Ok(SqueezingSpectrum::from_pairs(pairs, n_squeezers))
}
