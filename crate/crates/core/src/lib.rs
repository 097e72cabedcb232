//! Curvature, algebraic Ricci solitons and linear stability certificates for
//! left-invariant metrics on Lie groups.
//!
//! A [`MetricLieAlgebra`] holds structure constants in an orthonormal basis.
//! [`CurvaturePackage`] computes the connection and curvature tensors,
//! [`symtensor`] turns them into operators on symmetric 2-tensors, and
//! [`soliton`] detects `Ric = λ id + D` and issues stability certificates.

// Index loops mirror the tensor formulas; `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod catalog;
pub mod construct;
pub mod curvature;
pub mod eigen;
pub mod error;
pub mod par;
pub mod report;
pub mod soliton;
pub mod sweep;
pub mod symtensor;
pub mod tol;

mod linalg;

pub use algebra::{AlgebraDocument, DerivationSet, MetricLieAlgebra, StructureConstants};
pub use curvature::CurvaturePackage;
pub use error::{Error, Result};
pub use par::Execution;
pub use soliton::{SolitonReport, StabilityCertificate, Verdict};
pub use tol::Tolerances;
