//! Finite fermion lattices: the antisymmetric Fock space, the CAR algebras
//! `A(I)`, the entangled state `Φ = Σ p_M^{1/2} f_{Mι(M)}`, and numerical
//! certificates for standard and fermionic standard quantum detailed balance
//! together with fermionic duals of linear maps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod balance;
pub mod duality;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod scenarios;
pub mod states;

pub use algebra::{AlgebraBasis, AlgebraElement, LinearMap, Monomial, Relabeling};
pub use balance::{fermionic_sqdb, fermionic_sqdb_continuous, prob_symmetry, standard_sqdb, BalanceReport};
pub use dynamics::{LatticePermutation, MixtureDynamics, Semigroup};
pub use error::{Error, Result};
pub use fock::{FockOperator, Lattice, SignedSequence, StateVector, Subset};
pub use states::{EntangledState, LatticeConfig, ProbabilityTable};

/// Lattice sites are labelled by integers.
pub type Label = i64;

pub type C64 = num_complex::Complex64;

/// Default tolerance for numerical comparisons and verdicts.
pub const DEFAULT_TOL: f64 = 1e-10;
