//! Representations of the quantum algebra `U_q(u_{n,1})`.
//!
//! The crate builds explicit generator matrices on Gel'fand-Tsetlin bases,
//! checks the defining relations numerically (or exactly, in rational
//! arithmetic, where no square roots are involved), computes intertwining
//! operators of the principal series and classifies reducibility and
//! unitarizability.
//!
//! Modules, bottom-up:
//!
//! * [`scalar`]: q-numbers `[z]`, exact or floating.
//! * [`tableau`]: GT patterns, branching, principal-series weight windows.
//! * [`compact`]: finite-dimensional representations of `U_q(u_n)`.
//! * [`principal`]: windowed principal series `T_{m,c1,c2}`.
//! * [`intertwine`]: diagonal intertwiners, pole and zero orders, residues.
//! * [`structure`]: reducibility cases, constituent lattices, equivalences.
//! * [`star`]: Hermitian adjointness, unitary classes, positivity, twists.

pub mod error;
pub mod scalar;
pub mod tableau;
pub mod operator;
pub mod relations;
pub mod compact;
pub mod principal;
pub mod intertwine;
pub mod structure;
pub mod star;

pub use error::{Error, Result};
