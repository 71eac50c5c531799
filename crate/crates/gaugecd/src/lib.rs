//! Numerical toolkit for gauge curvature-dimension comparison on the
//! Heisenberg group.
//!
//! The crate has four layers:
//!
//! * [`lq`] — linear-quadratic optimal-control comparison models: the
//!   Hamiltonian matrix ODE, conjugate times, determinant and Riccati
//!   representations of model distortion, closed-form families, the
//!   rescaling law and the vector-valued extension.
//! * [`distortion`] — distortion coefficients `beta_t(theta)` built from
//!   model functions, the named classical families, DOM regions, lower
//!   exponent bounds, and composite model functions.
//! * [`heisenberg`] — the concrete geometry backend: the Heisenberg group
//!   and its canonical variation of Riemannian metrics, geodesic flow,
//!   covector shooting, distances, gauge functions, and exponential-map
//!   Jacobians (the "true" distortion coefficient).
//! * [`verify`] — deterministic and Monte Carlo verification suites for
//!   the comparison inequalities, entropy/volume inequalities and gauge
//!   limits, reporting through [`report::VerificationReport`].
//!
//! Extended-real convention: `+inf` is represented by `f64::INFINITY`, set
//! explicitly where a quantity is infinite by definition — it is never the
//! byproduct of overflow. Serialization renders it as the string `"inf"`.

pub mod cli;
pub mod distortion;
pub mod error;
pub mod grid;
pub mod heisenberg;
pub mod lq;
pub mod ode;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
