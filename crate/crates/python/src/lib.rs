//! Python bindings: network generation, squeezing cost, routing and
//! surveys. Errors from bad input raise `ValueError`; numerical failures
//! raise `ArithmeticError`.

use cvnet::cost::{self, CostTopology};
use cvnet::entangle;
use cvnet::netgen::{self, Network, Topology};
use cvnet::routing::{self, Protocol, ProtocolResult, RoutingContext};
use cvnet::CvnetError;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: CvnetError) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn missing(name: &str, topology: &str) -> CvnetError {
    CvnetError::InvalidParameter(format!("{topology} needs {name}"))
}

/// Optional generator parameters, keyed as in the `generate` signature.
#[derive(Debug, Clone, Copy, Default)]
pub struct GenParams {
    pub k: Option<usize>,
    pub p: Option<f64>,
    pub beta: Option<f64>,
    pub q: Option<usize>,
    pub sigma: Option<f64>,
}

/// Builds any supported family by name. `n` is the node count except for
/// `diamond_chain`, where it is the branch length and `k` the branch count.
pub fn build(topology: &str, n: usize, g: f64, seed: u64, params: GenParams) -> Result<Network, CvnetError> {
    let need = |v: Option<f64>, name| v.ok_or_else(|| missing(name, topology));
    let need_n = |v: Option<usize>, name| v.ok_or_else(|| missing(name, topology));
    match topology {
        "circulant" => netgen::gen_circulant(n, need_n(params.q, "q")?, g),
        "diamond_chain" => netgen::gen_diamond_chain(need_n(params.k, "k")?, n, g),
        "diamond_interconnected" => netgen::gen_diamond_interconnected(n, g),
        "er" => netgen::gen_er(n, need(params.p, "p")?, g, seed),
        "ba" => netgen::gen_ba(n, need_n(params.k, "k")?, g, seed),
        "ws" => netgen::gen_ws(n, need_n(params.q, "q")?, need(params.beta, "beta")?, g, seed),
        "pp" => netgen::gen_pp(n, need(params.sigma, "sigma")?, g, seed),
        "as" => netgen::gen_as(n, g, seed),
        other => netgen::gen_regular(other.parse::<Topology>()?, n, g),
    }
}

#[pyclass(name = "Cost", module = "cvnet_py", frozen, get_all, skip_from_py_object)]
#[derive(Debug, Clone)]
pub struct PyCost {
    total_db: f64,
    per_mode_db: Vec<f64>,
    n_squeezers: usize,
    energy: Option<f64>,
}

#[pymethods]
impl PyCost {
    fn __repr__(&self) -> String {
        format!("Cost(total_db={}, n_squeezers={})", self.total_db, self.n_squeezers)
    }
}

#[pyclass(name = "RouteResult", module = "cvnet_py", frozen, get_all, skip_from_py_object)]
#[derive(Debug, Clone)]
pub struct PyRouteResult {
    alice: usize,
    target: usize,
    protocol: String,
    logneg: f64,
    logneg_raw: f64,
    /// `None` when the target is unreachable.
    distance: Option<usize>,
    n_paths: u64,
    n_paths_used: u64,
    useful_fraction: f64,
    /// Plan in the text format read by `MeasurementPlan::parse`.
    plan: String,
}

impl From<ProtocolResult> for PyRouteResult {
    fn from(r: ProtocolResult) -> Self {
        PyRouteResult {
            alice: r.alice,
            target: r.target,
            protocol: r.protocol.name().to_string(),
            logneg: r.logneg,
            logneg_raw: r.logneg_raw,
            distance: r.distance,
            n_paths: r.n_paths,
            n_paths_used: r.n_paths_used,
            useful_fraction: r.useful_fraction,
            plan: r.plan.to_text(),
        }
    }
}

#[pymethods]
impl PyRouteResult {
    fn __repr__(&self) -> String {
        format!(
            "RouteResult({} {}->{}: logneg={}, distance={:?})",
            self.protocol, self.alice, self.target, self.logneg, self.distance
        )
    }
}

#[pyclass(name = "Network", module = "cvnet_py", frozen, skip_from_py_object)]
#[derive(Debug, Clone)]
pub struct PyNetwork {
    inner: Network,
}

fn protocols(names: Option<Vec<String>>) -> Result<Vec<Protocol>, CvnetError> {
    match names {
        None => Ok(Protocol::ALL.to_vec()),
        Some(names) => names.iter().map(|s| s.parse()).collect(),
    }
}

#[pymethods]
impl PyNetwork {
    /// Parses the cvnet-graph v1 text format.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        netgen::parse_network(text).map(|inner| PyNetwork { inner }).map_err(py_err)
    }

    fn to_text(&self) -> String {
        netgen::write_network(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.inner.edges()
    }

    fn degree(&self, node: usize) -> PyResult<usize> {
        self.inner.check_node(node).map_err(py_err)?;
        Ok(self.inner.degree(node))
    }

    /// Copy with every node initially squeezed by `squeeze_db`.
    fn with_squeezing(&self, squeeze_db: f64) -> PyResult<Self> {
        self.inner.with_uniform_squeezing(squeeze_db).map(|inner| PyNetwork { inner }).map_err(py_err)
    }

    fn cost(&self) -> PyResult<PyCost> {
        let r = cost::network_cost(&self.inner).map_err(py_err)?;
        Ok(PyCost {
            total_db: r.total_db,
            per_mode_db: r.per_mode_db,
            n_squeezers: r.n_squeezers,
            energy: r.energy,
        })
    }

    #[pyo3(signature = (alice, bob, protocol = "routing"))]
    fn route(&self, py: Python<'_>, alice: usize, bob: usize, protocol: &str) -> PyResult<PyRouteResult> {
        let protocol: Protocol = protocol.parse().map_err(py_err)?;
        py.detach(|| RoutingContext::new(&self.inner).run(protocol, alice, bob))
            .map(Into::into)
            .map_err(py_err)
    }

    /// Every other node under each protocol, in survey order (distance,
    /// path count, index); `alice=None` picks the highest-degree node.
    #[pyo3(signature = (alice = None, protocols = None))]
    fn survey(
        &self,
        py: Python<'_>,
        alice: Option<usize>,
        protocols: Option<Vec<String>>,
    ) -> PyResult<Vec<PyRouteResult>> {
        let protocols = self::protocols(protocols).map_err(py_err)?;
        let report = py.detach(|| routing::survey(&self.inner, alice, &protocols)).map_err(py_err)?;
        Ok(report.targets.into_iter().flat_map(|t| t.results.into_iter().map(Into::into)).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Network({}, n={}, edges={})",
            self.inner.meta().topology,
            self.inner.n(),
            self.inner.edge_count()
        )
    }
}

/// Generates a network. Families: linear, ring, star, diamond, complete,
/// circulant (q), diamond_chain (k; `n` is the branch length),
/// diamond_interconnected, er (p), ba (k), ws (q, beta), pp (sigma), as.
#[pyfunction]
#[pyo3(signature = (topology, n, g = 1.0, seed = 0, k = None, p = None, beta = None, q = None, sigma = None))]
#[allow(clippy::too_many_arguments)]
fn generate(
    topology: &str,
    n: usize,
    g: f64,
    seed: u64,
    k: Option<usize>,
    p: Option<f64>,
    beta: Option<f64>,
    q: Option<usize>,
    sigma: Option<f64>,
) -> PyResult<PyNetwork> {
    build(topology, n, g, seed, GenParams { k, p, beta, q, sigma })
        .map(|inner| PyNetwork { inner })
        .map_err(py_err)
}

/// Closed-form squeezing cost of star, diamond or complete networks.
#[pyfunction]
fn analytic_cost(topology: &str, n: usize, g: f64) -> PyResult<f64> {
    let t = match topology {
        "star" => CostTopology::Star,
        "diamond" => CostTopology::Diamond,
        "complete" => CostTopology::Complete,
        other => return Err(PyValueError::new_err(format!("no closed form for '{other}'"))),
    };
    cost::analytic_cost(t, n, g).map_err(py_err)
}

/// Expected squeezing cost of an Erdős–Rényi graph state.
#[pyfunction]
fn er_expected_cost(n: usize, p: f64, g: f64) -> PyResult<f64> {
    cost::er_expected_cost(n, p, g).map_err(py_err)
}

/// Hub-to-hub log-negativity of a diamond with p̂-measured centers.
#[pyfunction]
fn diamond_logneg(n_centers: usize, squeeze_db: f64, g: f64) -> f64 {
    entangle::diamond_logneg(n_centers, squeeze_db, g)
}

#[pymodule]
fn cvnet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetwork>()?;
    m.add_class::<PyCost>()?;
    m.add_class::<PyRouteResult>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_cost, m)?)?;
    m.add_function(wrap_pyfunction!(er_expected_cost, m)?)?;
    m.add_function(wrap_pyfunction!(diamond_logneg, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_dispatches_every_family() {
        let p = GenParams { k: Some(2), p: Some(0.3), beta: Some(0.2), q: Some(4), sigma: Some(0.5) };
        for name in [
            "linear",
            "ring",
            "star",
            "diamond",
            "complete",
            "circulant",
            "diamond_chain",
            "diamond_interconnected",
            "er",
            "ba",
            "ws",
            "pp",
            "as",
        ] {
            let net = build(name, 12, 1.0, 3, p).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(net.n() >= 12, "{name}");
        }
        assert_eq!(build("diamond_chain", 2, 1.0, 0, p).unwrap().n(), 6);
    }

    #[test]
    fn build_reports_missing_parameters() {
        let err = build("er", 10, 1.0, 0, GenParams::default()).unwrap_err();
        assert!(err.to_string().contains("needs p"));
        assert!(build("hexagon", 10, 1.0, 0, GenParams::default()).is_err());
    }

    #[test]
    fn survey_protocol_names() {
        assert_eq!(protocols(None).unwrap(), Protocol::ALL.to_vec());
        assert_eq!(protocols(Some(vec!["allp".into()])).unwrap(), vec![Protocol::AllP]);
        assert!(protocols(Some(vec!["fastest".into()])).is_err());
    }
}
