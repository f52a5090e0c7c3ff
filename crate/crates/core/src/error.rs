use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("polygon is not simple: {0}")]
    NotSimple(String),
    #[error("subdomains {0} and {1} overlap (shared area {2:e})")]
    Overlap(usize, usize, f64),
    #[error("subdomains do not tile the domain: area {covered} vs domain area {domain}")]
    Gap { covered: f64, domain: f64 },
    #[error("edge of subdomain {subdomain} from {from:?} to {to:?} has no neighbour and is not on the domain boundary")]
    DanglingEdge {
        subdomain: usize,
        from: (f64, f64),
        to: (f64, f64),
    },
    #[error("region {0} is not contained in the background grid")]
    RegionOutsideGrid(String),
    #[error("intersection has zero measure")]
    EmptyIntersection,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
}

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("unsupported element: {0}")]
    Unsupported(String),
    #[error("point ({0}, {1}) lies outside cell {2}")]
    PointOutsideCell(f64, f64, usize),
    #[error("derivative order {order} exceeds polynomial degree {degree}")]
    DerivativeOrder { order: usize, degree: usize },
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("system matrix is not positive definite (non-positive pivot at index {0})")]
    Indefinite(usize),
    #[error("subdomain {0} matrix is singular or indefinite")]
    SingularSubdomain(usize),
    #[error("conjugate gradients did not converge after {iterations} iterations (residual {residual:e})")]
    CgNotConverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },
    #[error("relative residual {residual:e} exceeds tolerance {tol:e}")]
    Residual { residual: f64, tol: f64 },
    #[error("eigenvalue computation failed: {0}")]
    Eigen(String),
    #[error("sparse matrix construction failed: {0}")]
    Sparse(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("boundary quadrature point ({0}, {1}) is not located in any skeleton cell")]
    Unlocated(f64, f64),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 for solver failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Solver(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
