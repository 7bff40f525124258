use thiserror::Error;

/// Errors raised by the solvers and constructions in this crate.
///
/// Edge and vertex references carry the user-facing ids, not internal indices.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("edge {0} has equal values at both endpoints")]
    ZeroDifference(String),

    #[error("enumeration over {edges} edges exceeds the cap of {cap}")]
    TooLarge { edges: usize, cap: usize },

    #[error("linear system is singular")]
    SingularSystem,

    #[error("constraints admit no function inducing the orientation")]
    Infeasible,

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("edge {0} carries zero energy")]
    ZeroEnergy(String),

    #[error("value for {0} must be strictly positive")]
    NonPositive(String),

    #[error("rotation system is not planar (Euler characteristic {euler})")]
    NotPlanar { euler: i64 },

    #[error("boundary vertex {0} is not on the outer face")]
    BoundaryNotOnOuterFace(String),

    #[error("conjugate is not single-valued around vertex {vertex} (defect {defect:e})")]
    NotIntegrable { vertex: String, defect: f64 },

    #[error("four tiles meet at ({x}, {y}); choose a perturbation")]
    CrossPoint { x: f64, y: f64 },

    #[error("rectangles do not tile their bounds: {0}")]
    NotATiling(String),

    #[error("polynomial roots are not strictly interlaced by the anchors")]
    NotInterlaced,

    #[error("grid has no lattice points inside the domain")]
    EmptyGrid,

    #[error("gradient component vanishes at ({x}, {y})")]
    DegenerateGradient { x: f64, y: f64 },

    #[error("south/west orientation is incompatible with the boundary labelling: {0}")]
    InfeasibleOrientation(String),
}

impl Error {
    /// Stable variant name, used by the CLI on stderr.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::InvalidNetwork(_) => "InvalidNetwork",
            Error::ZeroDifference(_) => "ZeroDifference",
            Error::TooLarge { .. } => "TooLarge",
            Error::SingularSystem => "SingularSystem",
            Error::Infeasible => "Infeasible",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::ZeroEnergy(_) => "ZeroEnergy",
            Error::NonPositive(_) => "NonPositive",
            Error::NotPlanar { .. } => "NotPlanar",
            Error::BoundaryNotOnOuterFace(_) => "BoundaryNotOnOuterFace",
            Error::NotIntegrable { .. } => "NotIntegrable",
            Error::CrossPoint { .. } => "CrossPoint",
            Error::NotATiling(_) => "NotATiling",
            Error::NotInterlaced => "NotInterlaced",
            Error::EmptyGrid => "EmptyGrid",
            Error::DegenerateGradient { .. } => "DegenerateGradient",
            Error::InfeasibleOrientation(_) => "InfeasibleOrientation",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
