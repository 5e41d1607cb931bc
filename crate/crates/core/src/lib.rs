//! Exact integer computations for torus biquotients and their vector bundles.
//!
//! Everything here is arbitrary-precision integer (or rational, for the
//! semidefiniteness checks) arithmetic; there is no floating point. The crate
//! is organised around a handful of small, pure subsystems:
//!
//! * [`ring`] — graded rings `Z[u_1..u_k]/I` truncated at degree 4, with the
//!   degree-4 abelian group normalised by Smith normal form.
//! * [`star`] — a decision procedure for the "sum of squares of degree-2
//!   classes vanishes only trivially" property, emitting machine-checkable
//!   positive-semidefinite certificates or explicit counterexample tuples.
//! * [`bundle`] — Chern/Pontryagin calculus for sums of line bundles and the
//!   inverse-existence predicates built on top of it.
//! * [`biquotient`] — the example families: admissible weight matrices, their
//!   torus actions on products of 3-spheres, freeness checks, unimodular
//!   completion, and the low-dimensional catalog.
//! * [`distinguish`] — computational invariants separating the cohomology
//!   rings of the `R(p)` family for distinct primes.
//!
//! All values are immutable after construction and every operation is a pure
//! function, so the types are safe to share across threads.

pub mod biquotient;
pub mod builtins;
pub mod bundle;
pub mod distinguish;
mod error;
pub mod jsonint;
pub mod matrix;
pub mod ring;
pub mod star;

pub use error::Error;
pub use matrix::{Int, IntMat};
pub use ring::{
    build_ring, multiply, square, sum_of_squares, verify_graded_iso, CohomologyRing,
    DegreeFourClass, DegreeFourGroup, DegreeTwoClass, SymCoeffVector,
};
pub use star::{
    check_star, gram_of_functional, verify_certificate, verify_witness, BudgetReport,
    CertStage, SearchBudget, StarCertificate, StarVerdict, StarWitness,
};
