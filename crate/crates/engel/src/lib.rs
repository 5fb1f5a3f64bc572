//! Computable metric geometry of the Engel group.
//!
//! The Engel group is the step-3 stratified Lie group on R^4 with
//! brackets `[X1,X2] = X3`, `[X1,X3] = X4`. This crate makes its metric
//! geometry computable for parametrized C^1 curves and surfaces:
//!
//! - [`group`]: exact group arithmetic, dilations, the left-invariant
//!   frame, and a symmetrized box-type homogeneous gauge.
//! - [`tangent`]: frame decompositions of tangent vectors and 2-vectors
//!   and their pointwise degree under the layer weights (1, 1, 2, 3).
//! - [`submanifold`]: parametrized curves/surfaces, degree stratification,
//!   degree-3 differential constraints, intrinsic-measure quadrature.
//! - [`measure`]: ball-intersection measures with error brackets, blow-up
//!   slope fits, greedy covering counts, dimension estimates,
//!   negligibility decay tables, and spherical-vs-intrinsic comparisons.
//! - [`oracle`]: independent brute-force certification of the group law
//!   and Monte Carlo cross-checks of the measure quadrature.
//! - [`scenario`] / [`config`]: a reproducible scenario runner with CSV
//!   output, plus the human-readable definition files it consumes.

pub mod catalog;
pub mod config;
pub mod error;
pub mod group;
pub mod measure;
pub mod oracle;
pub mod poly;
pub mod quad;
pub mod scenario;
pub mod submanifold;
pub mod tangent;

pub use error::{EngelError, Result};
pub use group::{dist, gauge, GroupPoint, HomGauge};
pub use submanifold::{ParamCurve, ParamSurface, StratificationReport, Submanifold};
pub use tangent::{DegreeValue, Frame2Vector, FrameVector};
