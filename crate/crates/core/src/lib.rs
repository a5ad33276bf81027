//! Optimal transport on path groups and loop groups over compact Lie groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`lie_group`]: the structure group (tori, SO(3), and the Heisenberg group
//!   for its explicit sub-Riemannian geodesics), exponential and logarithm,
//!   adjoint actions, the Levi-Civita connection of a left-invariant metric and
//!   the geodesic equation in body coordinates.
//! * [`path_space`]: paths and loops sampled on a uniform grid, the uniform,
//!   L² and Cameron–Martin distances, Brownian samplers and the Green-kernel
//!   gradient of cylindrical functions on loops.
//! * [`ot_solver`]: Kantorovich problems between empirical path measures with
//!   cost `d_L2^p`, exact (assignment / network simplex) and entropic solvers,
//!   c-transforms and dual potentials.
//! * [`transport_geometry`]: displacement fields, displacement interpolation,
//!   finite-difference gradients of c-concave potentials and the explicit
//!   transport map recovered from them.
//! * [`bundle`]: the JSON / CSV artifacts shared by the command line and the
//!   browser demo, and [`verify`]: the invariant suites.

pub mod bundle;
mod error;
pub mod lie_group;
pub mod ot_solver;
pub mod path_space;
pub mod transport_geometry;
pub mod verify;

pub use error::{Error, Result};
pub use lie_group::{AlgebraElement, Group, GroupElement};
pub use path_space::{DiscreteLoop, DiscretePath, EmpiricalMeasure};
