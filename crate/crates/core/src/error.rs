use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: duplicate edge {from} -> {to}")]
    DuplicateEdge { line: usize, from: String, to: String },

    #[error("line {line}: self-loop on vertex {vertex} (laziness is set by alpha, not by loop edges)")]
    SelfLoop { line: usize, vertex: String },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("invalid JSON graph: {0}")]
    Json(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("graph is not strongly connected")]
    NotStronglyConnected,

    #[error("graph needs at least two vertices, got {0}")]
    TooFewVertices(usize),

    #[error("vertex {vertex} has no out-neighbours; its transition row cannot be stochastic")]
    ZeroOutDegree { vertex: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is singular to working precision (pivot magnitude {pivot:e})")]
    Singular { pivot: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("stationary vector residual {residual:e} exceeds tolerance (is the chain irreducible?)")]
    PerronResidual { residual: f64 },

    #[error("ambiguous kernel split: smallest retained eigenvalue is only {gap:.3e} times the kernel threshold")]
    KernelBorderline { gap: f64 },

    #[error("random strongly connected graph not found after {attempts} draws; try a larger -p")]
    GenerationBudget { attempts: usize },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::DuplicateEdge { .. }
            | Error::SelfLoop { .. }
            | Error::EmptyGraph
            | Error::Json(_)
            | Error::Io(_)
            | Error::InvalidArgument(_)
            | Error::GenerationBudget { .. } => 2,
            Error::NotStronglyConnected | Error::TooFewVertices(_) | Error::ZeroOutDegree { .. } => 3,
            Error::Singular { .. }
            | Error::NoConvergence { .. }
            | Error::PerronResidual { .. }
            | Error::KernelBorderline { .. } => 4,
        }
    }
}
