use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NonSquareMatrix { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("image generators do not lie in the span of the kernel basis")]
    ImageNotInKernel,

    #[error("monodromy matrix {index} is not invertible over Z")]
    NonInvertibleMonodromy { index: usize },

    #[error("monodromy matrix {index} is not unimodular")]
    NonUnimodular { index: usize },

    #[error("generator index {index} out of range for genus {genus}")]
    BadGeneratorIndex { index: usize, genus: usize },

    #[error("monodromy violates the surface relation: product of commutators is not the identity")]
    RelationViolated,

    #[error("expected {expected} monodromy matrices for genus {genus}, found {found}")]
    WrongMonodromyCount {
        genus: usize,
        expected: usize,
        found: usize,
    },

    #[error("genus {0} is not supported by the simplicial model")]
    UnsupportedGenus(usize),

    #[error("cochain shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("cochain is not a cocycle")]
    NotACocycle,

    #[error("vector is not in the kernel of the relator differential")]
    NotInKernel,

    #[error("level is not invariant under monodromy matrix {index}")]
    NotInvariant { index: usize },

    #[error("component representative has length {found}, expected {expected}")]
    BadComponent { expected: usize, found: usize },

    #[error("component enumeration would produce {0} blocks; supply explicit representatives or a smaller bound")]
    TooManyComponents(u128),

    #[error("malformed fraction {0:?}: expected reduced \"num/den\" with 0 <= num < den")]
    MalformedFraction(String),

    #[error("invalid braiding refinement: {0}")]
    InvalidRefinement(String),

    #[error("multiplicity overflow while fusing graded objects")]
    MultiplicityOverflow,

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// Stable machine-readable code, used by the CLI error object and the C ABI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonSquareMatrix { .. } => "non_square_matrix",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::ImageNotInKernel => "image_not_in_kernel",
            Error::NonInvertibleMonodromy { .. } => "non_invertible_monodromy",
            Error::NonUnimodular { .. } => "non_unimodular",
            Error::BadGeneratorIndex { .. } => "bad_generator_index",
            Error::RelationViolated => "relation_violated",
            Error::WrongMonodromyCount { .. } => "wrong_monodromy_count",
            Error::UnsupportedGenus(_) => "unsupported_genus",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::NotACocycle => "not_a_cocycle",
            Error::NotInKernel => "not_in_kernel",
            Error::NotInvariant { .. } => "not_invariant",
            Error::BadComponent { .. } => "bad_component",
            Error::TooManyComponents(_) => "too_many_components",
            Error::MalformedFraction(_) => "malformed_fraction",
            Error::InvalidRefinement(_) => "invalid_refinement",
            Error::MultiplicityOverflow => "multiplicity_overflow",
            Error::InvariantViolation(_) => "invariant_violation",
        }
    }

    /// True for errors that indicate a bug or an oracle disagreement rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::InvariantViolation(_) | Error::ImageNotInKernel | Error::MultiplicityOverflow
        )
    }
}
