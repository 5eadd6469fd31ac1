use thiserror::Error;

pub type Result<T> = std::result::Result<T, CvnetError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CvnetError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("node index {index} out of range for {n} nodes")]
    InvalidNode { index: usize, n: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: usize },

    #[error("line {line}: duplicate edge ({i}, {j})")]
    DuplicateEdge { line: usize, i: usize, j: usize },

    #[error("line {line}: edge ({i}, {j}) declared with asymmetric weights {first} and {second}")]
    AsymmetricWeight { line: usize, i: usize, j: usize, first: f64, second: f64 },

    #[error("matrix is not symmetric (max deviation {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("singular pivot |t| = {0:e} in p-measurement")]
    SingularPivot(f64),

    #[error("squeezing spectrum pairing failed: {0}")]
    PairingFailure(String),

    #[error("quadrature did not converge (error estimate {0:e})")]
    QuadratureNonConvergence(f64),

    #[error("io error: {0}")]
    Io(String),
}

impl CvnetError {
    /// Failures of the numerics, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            CvnetError::NotPositiveDefinite
                | CvnetError::NumericalDegeneracy(_)
                | CvnetError::SingularPivot(_)
                | CvnetError::PairingFailure(_)
                | CvnetError::QuadratureNonConvergence(_)
        )
    }
}

impl From<std::io::Error> for CvnetError {
    fn from(e: std::io::Error) -> Self {
        CvnetError::Io(e.to_string())
    }
}
