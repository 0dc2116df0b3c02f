//! Primal-dual weak Galerkin solver for the elliptic Cauchy problem
//! `Δu = f` on the unit square with Dirichlet and Neumann data prescribed on
//! (possibly overlapping) parts of the boundary.
//!
//! The discretization uses continuous quadratics for `u`, linear normal
//! fluxes on edges and piecewise constant multipliers on a uniform
//! triangulation.

pub mod assembly;
pub mod error;
pub mod harness;
pub mod linsolve;
pub mod mesh;
pub mod polyspace;
pub mod norms;
pub mod problems;
pub mod verify;
pub mod weak_laplacian;

pub use error::{Error, Result};
