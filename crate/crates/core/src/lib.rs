//! Verification toolkit for quantum contextuality scenarios.
//!
//! The library pits two descriptions of the same measurement scenario against
//! each other: exact quantum statistics (dense complex linear algebra in
//! dimension at most 64, plus a symbolic Pauli layer) and noncontextual value
//! assignments (brute-force enumeration filtered by partition and parity
//! constraints). A *contradiction* is a query where the two descriptions
//! disagree; a *witness* is an event the classical side forbids but quantum
//! mechanics refuses to assign statistics to at all.
//!
//! Entry points:
//! - [`scenario::Scenario`] and the builtins in [`builtins`]
//! - [`analysis::analyze`] for the full classical-vs-quantum report
//! - [`dsl`] for the `.ksl` text format
//! - [`chsh`] for the correlation-functional optimizer
//! - [`sampler`] for seeded finite-statistics simulation

pub mod analysis;
pub mod builtins;
pub mod chsh;
pub mod dsl;
pub mod error;
pub mod lhv;
pub mod matrix;
pub mod pauli;
pub mod quantum;
pub mod sampler;
pub mod scenario;

pub use error::{Error, Result};
