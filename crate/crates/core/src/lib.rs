//! Finite-difference elliptic problems on boxes.
//!
//! `meshbound` works with the standard `2n+1`-point discretisation of
//! `-Δu = f(x, u)` on `Ω = Π (a_i, b_i)` with zero Dirichlet data. It provides
//! the discrete calculus, closed-form first eigenpairs, explicit constants for
//! the discrete Poincaré, Sobolev, Hardy and Hardy–Sobolev inequalities, and
//! mesh-independent `L∞` bounds for nonnegative solutions, together with a
//! Newton solver and a sweep harness to test those bounds.
//!
//! The runnable programs in `examples/` are the best starting point:
//!
//! | example | shows |
//! |---|---|
//! | `weak_form` | grids, difference quotients, summation by parts |
//! | `eigenpair` | closed-form `λ_{1,h}` against inverse iteration |
//! | `inequalities` | constants and randomized worst-ratio searches |
//! | `interpolation` | piecewise-linear interpolation on the two-triangle split |
//! | `bound_1d` | comparison principle, Poisson solution, 1D bound |
//! | `bound_nd` | Moser constants and the n-dimensional bound |
//! | `moser_trace` | measured `L^p` norms against the iteration |
//! | `mesh_sweep` | refinement sweep with CSV/JSON export |
//! | `supercritical` | growth of `‖u_h‖_∞` above the critical exponent |

// `!(x > 0.0)` style guards reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds1d;
pub mod boundsnd;
pub mod calculus;
pub mod error;
pub mod grid;
pub mod inequalities;
pub mod interp2d;
pub mod linalg;
pub mod norms;
pub mod sampling;
pub mod solver;
pub mod spectral;
pub mod sweep;

pub use error::{Error, Result};
pub use grid::{BoxDomain, GridFunction, Mesh};
