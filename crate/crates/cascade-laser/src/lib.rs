//! Quadrature statistics of a coherently driven degenerate three-level
//! cascade laser.
//!
//! The cavity mode couples to a stream of three-level atoms in a cascade
//! configuration whose upper and lower levels are driven by a resonant
//! classical field. Adiabatic elimination of the atoms leaves a Gaussian
//! dynamics for the cavity mode, so everything observable reduces to a
//! small set of drift/diffusion coefficients. This crate computes those
//! coefficients and exposes four independent routes to the same physics:
//!
//! - [`analytic`]: closed-form steady-state and transient quadrature
//!   variances and mean photon number,
//! - [`dynamics`]: direct integration of the moment equations and a
//!   stochastic quadrature sampler,
//! - [`fock`]: brute-force evolution of the density matrix in a truncated
//!   number basis, used as a cross-check oracle,
//! - [`scan`]: parameter sweeps and optimum search over the closed forms.
//!
//! Rates are measured in units of the atomic decay rate, so `gamma = 1`
//! throughout and times are in units of the atomic lifetime.

pub mod analytic;
pub mod dynamics;
mod error;
pub mod fock;
pub mod model;
pub mod scan;

pub use error::ModelError;
