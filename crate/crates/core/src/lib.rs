//! Multiseed Krylov complexity for spin chains and quantum resonant systems.
//!
//! The pipeline is: build a Hamiltonian ([`models`]), choose a family of
//! simple seed operators or states ([`seeds`]), grow the block Krylov basis
//! with block Lanczos at configurable precision ([`krylov`]), then evaluate the
//! late-time plateau in the Hamiltonian eigenbasis ([`complexity`]).
//!
//! All Lanczos arithmetic runs on MPFR-backed vectors ([`hiprec`]); spectral
//! post-processing runs in `f64`.

pub mod complexity;
pub mod error;
pub mod hiprec;
pub mod krylov;
pub mod matrix_io;
pub mod models;
pub mod seeds;

pub use error::{Error, Result};
pub use hiprec::{HComplex, HMatrix, HVector, Precision};
