//! Eigenvalues of the semiclassical Zakharov-Shabat operator
//!
//! ```text
//! L_eps = [ i h d/dx     -i A_eps(x) ]      A_eps = A + i eps B
//!         [ i A_eps(x)   -i h d/dx   ]
//! ```
//!
//! computed two ways: from Bohr-Sommerfeld-type quantization of the action
//! integral between complex turning points ([`quantize`]), and from zeros of
//! the Wronskian of decaying shooting solutions ([`direct`]). [`stokes`]
//! traces the Stokes geometry around the turning points.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the scalar to `f64`.

pub mod action;
pub mod direct;
pub mod error;
pub mod ode;
pub mod potential;
pub mod problem;
pub mod quantize;
pub mod scalar;
pub mod stokes;
pub mod turning;

pub use error::{A1Violation, Error, Result};
pub use potential::{A1Report, Family, PotentialSpec, SymmetryClass, WellType};
pub use problem::{Problem, Tolerances};
pub use scalar::{Cx, Real};

pub type PotentialSpec64 = PotentialSpec<f64>;
pub type PotentialSpec32 = PotentialSpec<f32>;
pub type Problem64 = Problem<f64>;
pub type Problem32 = Problem<f32>;
pub type TurningPointPair64 = turning::TurningPointPair<f64>;
pub type ActionValue64 = action::ActionValue<f64>;
pub type EigenvalueRecord64 = quantize::EigenvalueRecord<f64>;
pub type StokesGraph64 = stokes::StokesGraph<f64>;
