//! Contour dynamics for generalized surface quasi-geostrophic (g-SQG) patches.
//!
//! Patches are regions of constant strength whose boundaries are closed plane curves.
//! The crate evolves such families under the mollified g-SQG velocity, tracks the
//! curve functionals that control regularity, and ships a randomized harness that
//! checks the geometric inequalities the model relies on.

pub mod alignment;
pub mod bump;
pub mod config;
pub mod curve;
pub mod dynamics;
pub mod error;
pub mod lab;
pub mod metrics;
pub mod output;
pub mod scenarios;
pub mod spectral;
pub mod spline;
pub mod vec2;
pub mod velocity;

pub use curve::{ClosedCurve, ParamKind};
pub use error::{Error, Result};
pub use vec2::Vec2;
