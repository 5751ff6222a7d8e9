use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid cyclic factor order {0}: every factor must be at least 2")]
    InvalidOrder(u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("modulus {0:?} is reducible over Z_{1}")]
    ReduciblePolynomial(Vec<u32>, u32),

    #[error("invalid field modulus: {0}")]
    InvalidModulus(String),

    #[error("element outside group: {0}")]
    ElementDomain(String),

    #[error("sets are not disjoint: element {element} appears in sets {first} and {second}")]
    Disjointness { element: String, first: usize, second: usize },

    #[error("duplicate element {element} in set {set}")]
    DuplicateElement { element: String, set: usize },

    #[error("empty set at position {0}")]
    EmptySet(usize),

    #[error("family has {0} set(s); at least two are required")]
    TrivialFamily(usize),

    #[error("index {index} out of range for a family of {len} sets")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid size class: {0}")]
    ClassDefinition(String),

    #[error("wrong family type: {0}")]
    WrongType(String),

    #[error("parity error: {0}")]
    Parity(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("the offset must be nonzero")]
    ZeroDelta,

    #[error("invalid AMD code: {0}")]
    InvalidCode(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{from} -> {to} is not an edge of the implication lattice")]
    Lattice { from: String, to: String },

    #[error("parameter identity violated: {0}")]
    Identity(String),

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    /// Stable numeric code used by the C interface.
    pub fn code(&self) -> i32 {
        match self {
            Error::InvalidOrder(_) => 10,
            Error::NotPrime(_) => 11,
            Error::ReduciblePolynomial(..) => 12,
            Error::InvalidModulus(_) => 13,
            Error::ElementDomain(_) => 20,
            Error::Disjointness { .. } => 21,
            Error::DuplicateElement { .. } => 22,
            Error::EmptySet(_) => 23,
            Error::TrivialFamily(_) => 24,
            Error::IndexOutOfRange { .. } => 25,
            Error::ClassDefinition(_) => 26,
            Error::WrongType(_) => 30,
            Error::Parity(_) => 31,
            Error::Parameter(_) => 32,
            Error::Lattice { .. } => 33,
            Error::Identity(_) => 34,
            Error::ZeroDelta => 40,
            Error::InvalidCode(_) => 41,
            Error::InvalidStrategy(_) => 42,
            Error::Precondition(_) => 43,
            Error::InternalConsistency(_) => 50,
            Error::Input(_) => 60,
        }
    }

    /// Stable snake_case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidOrder(_) => "invalid_order",
            Error::NotPrime(_) => "not_prime",
            Error::ReduciblePolynomial(..) => "reducible_polynomial",
            Error::InvalidModulus(_) => "invalid_modulus",
            Error::ElementDomain(_) => "element_domain",
            Error::Disjointness { .. } => "disjointness",
            Error::DuplicateElement { .. } => "duplicate_element",
            Error::EmptySet(_) => "empty_set",
            Error::TrivialFamily(_) => "trivial_family",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::ClassDefinition(_) => "class_definition",
            Error::WrongType(_) => "wrong_type",
            Error::Parity(_) => "parity",
            Error::Parameter(_) => "parameter",
            Error::Lattice { .. } => "lattice",
            Error::Identity(_) => "identity",
            Error::ZeroDelta => "zero_delta",
            Error::InvalidCode(_) => "invalid_code",
            Error::InvalidStrategy(_) => "invalid_strategy",
            Error::Precondition(_) => "precondition",
            Error::InternalConsistency(_) => "internal_consistency",
            Error::Input(_) => "input",
        }
    }
}
