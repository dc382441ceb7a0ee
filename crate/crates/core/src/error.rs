use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("group is infinite: {0}")]
    InfiniteGroup(String),
    #[error("homomorphism is not well defined: {0}")]
    IllDefined(String),
    #[error("homomorphism is not an isomorphism")]
    NotIsomorphism,
    #[error("morphism does not send the special element to the special element")]
    SpecialElementMismatch,
    #[error("element {0} does not have order at most 2")]
    NotAnInvolution(String),
    #[error("pull-back constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("element is not torsion")]
    NonTorsion,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("isomorphism does not preserve the linking pairing")]
    LinkingMismatch,
    #[error("records are configured with different modulus sets: {0:?} vs {1:?}")]
    ModuliMismatch(Vec<u64>, Vec<u64>),
    #[error("homology is infinite and no isomorphism candidates were supplied")]
    InfiniteSearchSpace,
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
