//! Differential geometry of two-dimensional graphs in R^4.
//!
//! Fields come from closed-form evaluators or sampled grids ([`field`]) and
//! are reduced to second-order jets ([`jets`]). [`geometry`] turns jets into
//! fundamental forms and curvature invariants, [`isothermal`] works in shear
//! charts `x = u, y = a u + b v`, and [`solvers`] contains Dirichlet solvers
//! for the minimal surface system and the Monge-Ampere equation.

pub mod error;
pub mod field;
pub mod geometry;
pub mod grid;
pub mod isothermal;
pub mod jets;
mod par;
pub mod solvers;
pub mod surfaces;

pub use error::{MglError, Result};
pub use field::{Evaluator, FieldSource, Rect};
pub use grid::GridField;
pub use jets::{Jet2, Third};
