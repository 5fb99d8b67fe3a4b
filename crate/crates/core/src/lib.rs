//! Dynamics of the restricted three-body problem in which all three bodies
//! exchange mass with a static ambient medium, so every mass carries the same
//! positive time factor `u(t)` and the mass ratios stay constant.
//!
//! The crate provides:
//!
//! * [`ode`] — a deterministic Dormand-Prince 5(4) integrator with dense
//!   output and terminal scalar events, shared by all dynamics modules;
//! * [`mass_law`] — the closed-form family of mass factors `u(t)` plus the
//!   kappa-constrained law obtained by integrating the reduced primary
//!   equation under `G R u^3 = kappa`;
//! * [`primaries`] — propagation of the two primaries in reduced polar form
//!   (rotating frame), in the purely radial collinear case, and as a full
//!   Cartesian two-body oracle;
//! * [`third_body`] — the third body's equations of motion in the rotating
//!   barycentric frame or the inertial frame of the collinear case, with
//!   self-similarity residual diagnostics;
//! * [`equilibria`] — the equilibrium families in similarity coordinates:
//!   collinear L1-L3, triangular L4/L5, the kappa-dependent coplanar pairs
//!   L6-L11 with their existence bound and remote limit, and the ring L0 of
//!   the collinear case.

// `!(x > 0.0)` is the NaN-rejecting form of the domain guards here.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod equilibria;
pub mod mass_law;
pub mod ode;
pub mod primaries;
pub mod third_body;

pub use equilibria::{EquilibriumPoint, Label, RingSolution};
pub use mass_law::MassLaw;
pub use ode::{DenseSolution, IntegratorSettings, OdeStatus};
pub use primaries::{FrameMode, PrimaryEphemeris, SystemConfig};
pub use third_body::{ThirdBodyState, Trajectory};
