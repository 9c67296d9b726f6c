//! Exact-arithmetic engine for the first two pages of the cohomology
//! spectral sequence of spaces of long knots in a Euclidean cube.
//!
//! The crate is organized around four subsystems:
//!
//! * [`trees`] — rooted leaf-labeled trees, their contraction poset,
//!   associahedron face data, and the indexing functors between subset
//!   posets and the simplex category.
//! * [`graphs`] — the graph presentation of configuration-space
//!   cohomology: admissible monomials, Arnold-relation normal forms,
//!   and the coface/codegeneracy pullbacks.
//! * [`linalg`] — exact sparse linear algebra over the integers, the
//!   rationals, and prime fields (rank, Smith normal form).
//! * [`sseq`] — assembly of the E1 page, the d1 differential, the E2
//!   computation, and the vanishing-line predicates.
//!
//! All computations are exact; no floating point is used anywhere.

pub mod graphs;
pub mod limits;
pub mod linalg;
pub mod sseq;
pub mod trees;

pub use limits::Limits;
