//! Finite metric lattices.
//!
//! Lattices are stored as explicit tables. On top of them sit three ways
//! of producing a metric (valuations, ultravaluations and intervaluations),
//! discretized lattices of 1-Lipschitz functions, and brute-force deciders
//! for join-irreducibility and d-irreducibility together with the
//! characterizations they are cross-checked against.

pub mod analysis;
pub mod corpus;
pub mod exact;
pub mod function_lattices;
pub mod generators;
pub mod intervaluation;
pub mod lattice;
pub mod metric;
pub mod ultravaluation;
pub mod valuation;

pub use exact::Rational;
pub use lattice::{build_from_leq, Element, ElementSet, FiniteLattice, LatticeError};
pub use metric::{MetricKind, MetricTable, PairTable};
