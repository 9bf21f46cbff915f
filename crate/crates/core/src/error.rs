use crate::Label;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("lattice must contain at least one label")]
    EmptyLattice,
    #[error("duplicate label {0}")]
    DuplicateLabel(Label),
    #[error("lattice of size {size} exceeds the cap of {cap} labels")]
    LatticeTooLarge { size: usize, cap: usize },
    #[error("label {0} is not in the lattice")]
    UnknownLabel(Label),
    #[error("supports {0:?} and {1:?} must be disjoint")]
    OverlappingSupports(Vec<Label>, Vec<Label>),
    #[error("{0} is not a subset of the support {1:?}")]
    NotInSupport(String, Vec<Label>),
    #[error("operator does not leave the subspace invariant (off-block mass {0:.3e})")]
    NotInvariant(f64),
    #[error("operator is not in the algebra (expansion residual {0:.3e})")]
    NotInAlgebra(f64),
    #[error("invalid relabeling: {0}")]
    InvalidRelabeling(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("operator is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("invalid basis cycle: {0}")]
    InvalidBasisCycle(String),
    #[error("invalid probability table: {0}")]
    InvalidProbabilities(String),
    #[error("weight {0} must lie in [0, 1]")]
    InvalidWeight(f64),
    #[error("time {0} must be non-negative")]
    NegativeTime(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("support mismatch: {0}")]
    SupportMismatch(String),
    #[error("fermionic duals require strictly positive probabilities (p_M > 0 for every M)")]
    NotStrictlyPositive,
    #[error("bilinear form is ill-conditioned (condition number {0:.3e})")]
    IllConditioned(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
