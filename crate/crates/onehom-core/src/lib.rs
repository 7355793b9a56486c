//! Numerics for positively one-homogeneous maps `u(x) = |x| g(x/|x|)` of the
//! plane, driven by the angular curve `g: S^1 -> R^2`.
//!
//! The crate builds and cross-checks stationary points of the circle energy
//!
//! ```text
//!     I(g) = \int_{S^1} 1/2 |grad u^g|^2 + h(det grad u^g) dtheta,
//!     h(t) = t^{-s}  (t > 0),   h(t) = +inf  (t <= 0),
//! ```
//!
//! by two independent routes: direct constrained minimization over discrete
//! curves pinned to the origin at one node ([`variational`]), and integration
//! of the polar profile ODEs that govern the radius and winding rate near an
//! isolated zero ([`spiral`]). The [`annulus`] module verifies the
//! two-dimensional weak equilibrium and Euler-Lagrange forms on an annulus,
//! including the quantitative failure of the Euler-Lagrange equation at the
//! singular ray.
//!
//! The crate is `no_std` (with `alloc`); all floating-point math goes through
//! `libm`. IO, file formats, and the command-line driver live in the
//! companion `onehom-cli` crate.

#![no_std]

extern crate alloc;

pub mod annulus;
pub mod curve;
pub mod energy;
pub mod math;
pub mod report;
pub mod spiral;
pub mod variational;
pub mod vec2;

pub use curve::{AngularGrid, Curve, CurveError, DerivedCurve, PolarProfile};
pub use energy::{EnergyBreakdown, EnergyError, EnergyModel, HFamily, QuadratureConfig};
pub use report::{ResidualEntry, ResidualReport};
pub use vec2::{Mat2, Vec2};
