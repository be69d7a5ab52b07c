//! Numerical building blocks for the ground-state energy of dilute
//! one-dimensional spin-J Fermi gases.
//!
//! The crate is organised by subsystem:
//!
//! * [`spin_algebra`] – pair-spin swap, symmetric/antisymmetric projectors and
//!   the nearest-neighbour couplings built from them.
//! * [`scattering`] – zero-energy scattering for scalar and matrix-valued
//!   measure potentials, scattering lengths `a_e`, `a_o` and the scattering
//!   length matrix, plus the Dyson and hard-core comparison checks.
//! * [`spin_chain`] – exact diagonalisation (dense and Lanczos) of
//!   Lai–Sutherland type chains and the thermodynamic digamma formula.
//! * [`bethe`] – Lieb–Liniger and Yang–Gaudin thermodynamic Bethe equations.
//! * [`free_fermi`] – the Dirichlet free Fermi state and its reduced densities.
//! * [`expansion`] – first-order dilute energy formulas and cross-model checks.
//! * [`verify`] – the acceptance criteria as a runnable, deterministic suite.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bethe;
pub mod error;
pub mod expansion;
pub mod free_fermi;
pub mod json;
pub mod quadrature;
pub mod scattering;
pub mod special;
pub mod spin_algebra;
pub mod spin_chain;
pub mod verify;

pub use error::{Error, Result};

/// Version tag written into (and required from) every JSON document.
pub const SCHEMA: &str = "dilute1d/1";
