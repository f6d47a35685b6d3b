//! Geometry of Lie groups with bi-invariant semi-Riemannian metrics and of
//! hypersurfaces immersed in them.
//!
//! Everything is expressed in an orthonormal basis of the Lie algebra. Exact
//! computations run over `Q(√2)` ([`scalar::Exact`]); chart-based numerics use
//! `f64`.

// Index loops mirror the tensor notation; negated comparisons reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod catalog;
pub mod chart;
pub mod error;
pub mod format;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod surface;
pub mod theorem;

pub use algebra::{AlgebraVector, MetricLieAlgebra, MetricSignature, SubspaceBasis};
pub use error::{GeoError, Result};
pub use scalar::{Exact, Scalar};
