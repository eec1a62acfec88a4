//! Thin-film (lubrication) limit of a Jaumann Oldroyd-B fluid between a
//! sliding lower wall and a fixed upper wall of height `h(x)`.
//!
//! The limit system reduces to a scalar constitutive law `phi` linking the
//! shear rate to the total shear stress. Inverting it and integrating across
//! the gap gives the velocity profile up to an integration constant `kappa`,
//! which is pinned by the upper no-slip condition. Flux conservation along
//! the channel then yields a first-order ODE for the pressure gradient
//! `q = dp/dx` (a generalized Reynolds equation), solved here both by
//! marching the ODE and, independently, by a node-by-node flux solve.
//!
//! Modules, bottom-up:
//!
//! - [`quad`], [`roots`], [`ode`]: numerical primitives.
//! - [`constitutive`]: `phi`, its inverse `psi`, and the algebraic stress closures.
//! - [`kappa`]: the integration-constant closure `K(h, q, s)` and its partials.
//! - [`reynolds`]: gap profiles, the `U`/`V` coefficients and both pressure solvers.
//! - [`fields`]: reconstruction of velocity and stress on a tensor grid.
//! - [`validate`]: invariant checks and the aggregated [`ValidationReport`].

pub mod constitutive;
pub mod error;
pub mod fields;
pub mod kappa;
pub mod ode;
pub mod quad;
pub mod reynolds;
pub mod roots;
pub mod validate;

pub use constitutive::FluidParams;
pub use error::{Error, Result};
pub use fields::{LimitFields, ResidualReport};
pub use kappa::{Closure, KappaQuery};
pub use reynolds::{GapProfile, PressureSolution, SolveMethod};
pub use validate::{RunConfig, SolverChoice, ValidationReport};
