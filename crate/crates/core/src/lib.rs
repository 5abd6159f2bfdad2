//! Finite-truncation toolkit for noncommutative graphs.
//!
//! An operator system is a unital self-adjoint span of complex matrices.
//! This crate builds them from graphs, quantum channels and fixtures,
//! compresses them by projections, searches for quantum cliques and
//! anticliques, and runs the certified constructions (dilation isometries,
//! spanning families, diagonal reductions, clique certificates) that back
//! those searches.

pub mod channels;
pub mod constructions;
pub mod error;
pub mod json;
pub mod matcore;
pub mod opsys;
pub mod ramsey;

pub use channels::{KLReport, QuantumChannel};
pub use error::{Error, Result};
pub use matcore::{CMatrix, CVector, Tolerance};
pub use opsys::{FixtureKind, Graph, GraphConvention, OperatorSystem, Projection, TruncationSpec};
pub use ramsey::{SearchConfig, Verdict, VerdictKind};
