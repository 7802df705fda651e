//! Exact analysis of sparse homogeneous polynomials with respect to sums of
//! nonnegative circuit forms (SONC), sums of squares of circuits, and their
//! Minkowski sum.
//!
//! The pipeline is: parse a [`SparseForm`], compute its [`SupportPartition`],
//! test circuit structure, apply the coefficient-sum necessary condition for
//! SONC membership, and optionally run maximal-mediated-set and numeric
//! feasibility checks.

pub mod circuit;
pub mod corpus;
pub mod form;
pub mod geometry;
pub mod grid;
pub mod linalg;
pub mod lp;
pub mod mediated;
pub mod rational;
pub mod report;
pub mod search;
pub mod sonc;

pub use circuit::{Circuit, CircuitKind, CircuitNumber};
pub use form::{parse_form, ExponentVector, FormError, SparseForm};
pub use geometry::{Simplex, SupportPartition};
pub use mediated::MediatedSet;
pub use rational::Rational;
pub use report::{analyze, AnalysisReport, AnalyzeOptions};
