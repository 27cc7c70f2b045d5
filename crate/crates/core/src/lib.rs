//! Classification of finite metric spaces by their Gromov product
//! structures.
//!
//! A generic metric on `n` points assigns to every vertex `i` the pair
//! `{a_i, b_i}` minimizing the Gromov product `½(d(i,a) + d(i,b) − d(a,b))`.
//! This crate extracts that structure with exact rational arithmetic,
//! represents it as a 0/1 matrix with two ones per row, computes exact matrix
//! invariants (rank, traces of powers, characteristic and minimal
//! polynomials, ends count, irreducibility), decides equivalence under
//! relabeling, and runs reproducible Monte Carlo censuses of the realizable
//! classes.
//!
//! Vertex indices are 0-based in the Rust API and 1-based in every text
//! format and report.

pub mod census;
pub mod equivalence;
pub mod invariants;
pub mod linalg;
pub mod metric;
pub mod poly;
pub mod rational;
pub mod structure;


pub use equivalence::{are_equivalent, brute_force_equiv, canonical_form, decide_equivalence, verify_similarity, CanonicalForm, EquivalenceVerdict};
pub use invariants::{fingerprint, InvariantFingerprint};
pub use metric::{apsp_closure, extract_structure, gromov_product, parse_metric, MetricFormat, MetricSpace};
pub use poly::{IntegerPolynomial, RationalPolynomial};
pub use rational::Rational;
pub use structure::{apply_permutation, matrix_rep, GromovStructure, Permutation, StructureMatrix};
