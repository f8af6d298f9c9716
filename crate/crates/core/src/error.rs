use thiserror::Error;

use crate::linalg::Vec3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} out of range 0..{bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("mass must be positive and finite, got {0}")]
    NonPositiveMass(f64),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not invertible")]
    Singular,

    #[error("matrix is not an element of the Dirac representation (defect {defect:e})")]
    NotInDiracRepresentation { defect: f64 },

    #[error("momentum {p:?} is too close to zero for a momentum-dependent polarization direction")]
    ZeroMomentum { p: Vec3 },

    #[error(
        "momentum {p:?} lies in the excluded chart region of the helicity basis \
         (p + p3 <= eps |p|, i.e. along -e3)"
    )]
    ChartSingularity { p: Vec3 },

    #[error("polarization basis is not orthonormal at p = {p:?} (defect {defect:e})")]
    NonOrthonormal { p: Vec3, defect: f64 },

    #[error("polarization basis spinors are not eigenvectors of s.n at p = {p:?} (defect {defect:e})")]
    NotPolarizationEigenbasis { p: Vec3, defect: f64 },

    #[error("polarization basis carries no polarization direction")]
    MissingDirection,

    #[error("operator `{operator}`: independent constructions disagree by {defect:e}")]
    InternalMismatch { operator: &'static str, defect: f64 },

    #[error("quadrature error estimate {estimate:e} exceeds bound {bound:e} for `{observable}`")]
    QuadratureNonConvergence {
        observable: String,
        estimate: f64,
        bound: f64,
    },

    #[error("unknown suite `{name}`; registered suites: {}", registered.join(", "))]
    UnknownSuite {
        name: String,
        registered: Vec<&'static str>,
    },
}

impl Error {
    /// True for errors caused by a momentum outside a basis chart.
    pub fn is_chart_error(&self) -> bool {
        matches!(self, Error::ZeroMomentum { .. } | Error::ChartSingularity { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
