//! Linear Weingarten cyclic surfaces in Minkowski 3-space.
//!
//! The crate is organised bottom-up:
//!
//! - [`lorentz`]: vector algebra under the scalar product `x1 y1 + x2 y2 - x3 y3`.
//! - [`jet`]: forward-mode second-order jets in two variables `(u, v)`.
//! - [`ode`]: Dormand–Prince 5(4) integration with dense output and guard events.
//! - [`kernel`]: fundamental forms, curvatures, and the Weingarten residuals of a surface jet.
//! - [`catalog`]: every surface family (circles in parallel planes, pseudohyperbolic
//!   surfaces, maximal and flat families, Frenet-foliated surfaces).
//! - [`coeffs`]: harmonic/monomial coefficient extraction of the rationalized residual
//!   along the foliation circles, plus closed-form reference coefficients.
//! - [`harness`]: run configuration, verification suite, mesh export and reports.

// `!(x > 0.0)` is the NaN-rejecting form used throughout; index loops mirror the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod catalog;
pub mod coeffs;
mod error;
pub mod harness;
pub mod jet;
pub mod kernel;
pub mod lorentz;
pub mod ode;

pub use error::{Error, Result};
pub use jet::{ScalarJet2, VecJet2};
pub use kernel::{CurvaturePair, FundamentalForms, Surface, WeingartenCoeffs};
pub use lorentz::{CausalClass, MVec3};
