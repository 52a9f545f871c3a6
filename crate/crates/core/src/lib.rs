//! Jet-space geometry of autonomous first-order ODE systems.
//!
//! A system `x' = X(x)` on R^n is recast as the least-squares Lagrangian
//! `JLS(x, v) = |v - X(x)|^2` on the 1-jet space with coordinates
//! `(t, x, v)`. From it this crate builds the non-linear connection, torsion,
//! electromagnetic components and Yang–Mills energy ([`geometry`]), the
//! Euler–Lagrange dynamics and action ([`dynamics`]), and specializes all of
//! it to the five-component Lorenz atmospheric model ([`lorenz5`]).
//!
//! Fields are read from a small text grammar:
//!
//! ```
//! use jetgeo_core::{parse_field, yang_mills_energy, Params};
//!
//! let field = parse_field("X1 = -x2\nX2 = x1", &Params::new()).unwrap();
//! assert_eq!(yang_mills_energy(&field, &[0.3, 0.4]).unwrap(), 1.0);
//! ```

pub mod dynamics;
pub mod error;
pub mod expr;
pub mod field;
pub mod geometry;
pub mod lorenz5;
mod parse;
pub mod trajectory_csv;
pub mod verify;

pub use dynamics::{action, el_acceleration, el_residual, integrate_el, integrate_field, jls, JetState, Trajectory};
pub use error::{DynamicsError, EvalError, ParseError, TrajectoryIoError};
pub use expr::{Expr, ExprError, Func};
pub use field::{eval_field, parse_field, partial, second_partial, Params, VectorField};
pub use geometry::{
    em_matrix, flat_certificate, jacobian, maxwell_residual, nonlinear_connection, numeric_jacobian, torsion,
    yang_mills_energy, FlatCertificate, GeometryReport, Matrix,
};
pub use lorenz5::{classify_level_set, lorenz_field, rotation_matrix, LevelSetClass};
pub use parse::parse_expr;
