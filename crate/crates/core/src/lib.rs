//! Regular shock reflection by a wedge in self-similar potential flow.
//!
//! Uniform states and shock polars ([`states`], [`polar`]), configuration
//! geometry ([`geometry`]) and a free-boundary solver for the elliptic region
//! behind the reflected shock ([`fbsolver`]).

// `!(x > 0.0)` is used on purpose: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fbsolver;
pub mod gas;
pub mod geometry;
pub mod io;
pub mod polar;
pub mod roots;
pub mod states;

pub use error::{Error, Result};
pub use gas::GasModel;
pub use polar::{Branch, Classification, PolarSolution, Problem};
pub use states::{IncidentShock, NormalReflection, Point, UniformState};
