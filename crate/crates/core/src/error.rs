use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, HqrError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HqrError {
    #[error("a coefficient series needs at least one coefficient")]
    EmptySeries,

    #[error("coefficient {index} is not finite")]
    NonFiniteCoefficient { index: usize },

    #[error("radius {0} is outside [0, 1)")]
    RadiusOutOfRange(f64),

    #[error("circle grid must have at least one sample")]
    EmptyGrid,

    #[error("radii must be strictly increasing and lie in [0, 1)")]
    InvalidRadii,

    #[error("g(0) = {0} but a harmonic map requires g(0) = 0")]
    UnnormalizedCoanalytic(Complex64),

    #[error("h' vanishes at sample {index} (|h'| = {modulus:e})")]
    DegenerateDilatation { index: usize, modulus: f64 },

    #[error("u({z}) = {value} is not positive")]
    NonpositiveU { z: Complex64, value: f64 },

    #[error("|f({z})| = {modulus:e} is too close to zero")]
    ZeroModulus { z: Complex64, modulus: f64 },

    #[error("five-point stencil at {z} with step {step} leaves the unit disk")]
    StencilOutsideDisk { z: Complex64, step: f64 },

    #[error("exponent p = {p} outside {domain}")]
    InvalidExponent { p: f64, domain: &'static str },

    #[error("parameter `{name}` = {value} outside {domain}")]
    ParameterOutOfDomain {
        name: String,
        value: f64,
        domain: &'static str,
    },

    #[error("missing parameter `{0}`")]
    MissingParameter(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("hypothesis violated ({hypothesis}): {detail}")]
    HypothesisViolated {
        hypothesis: &'static str,
        detail: String,
    },

    #[error("probe grid has no cells")]
    EmptyProbeGrid,

    #[error("cutoff {cutoff} exceeds series degree {degree}")]
    CutoffBeyondDegree { cutoff: usize, degree: usize },
}

impl HqrError {
    pub(crate) fn hypothesis(hypothesis: &'static str, detail: impl Into<String>) -> Self {
        HqrError::HypothesisViolated {
            hypothesis,
            detail: detail.into(),
        }
    }

    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(self, HqrError::HypothesisViolated { .. })
    }
}
