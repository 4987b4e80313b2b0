//! Exact combinatorics of ADE flops.
//!
//! Starting from a Dynkin diagram `Δ` and a subset `I` of its nodes, the crate
//! computes restricted roots and their hyperplane arrangements, wall crossings
//! and flop matrices, transports Gopakumar–Vafa tables between crepant
//! resolutions and evaluates the associated quantum potential. All arithmetic
//! is exact.

pub mod dynkin;
pub mod enumerative;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod plot;
pub mod rational;
pub mod restriction;
pub mod wallcross;

#[doc(hidden)]
pub mod cli;

pub use dynkin::{parse_diagram, DynkinDiagram, DynkinType, NodeSubset, RootVector, WeylElement};
pub use error::{FlopError, Result};
pub use linalg::IntMatrix;
pub use {num_bigint, num_rational};
