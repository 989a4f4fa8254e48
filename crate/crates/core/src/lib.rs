//! Two Josephson-coupled bosonic modes in the two-mode approximation.
//!
//! The crate evolves product-coherent initial states either exactly, by
//! diagonalizing each fixed-total-number block of the Hamiltonian
//! ([`numeric`]), or through the closed-form propagator valid when
//! `U_aa + U_bb = 2 U_ab` ([`analytic`]). On top of that it detects the
//! generalized coherent states formed at purification times, decomposes them
//! into finite superpositions of coherent states ([`gcs`]), evaluates
//! single-mode diagnostics and Husimi functions ([`observables`], [`husimi`]),
//! and applies the phase-damping channel ([`decoherence`]).

pub mod analytic;
pub mod config;
pub mod decoherence;
pub mod error;
pub mod gcs;
pub mod husimi;
pub mod numeric;
pub mod observables;
pub mod params;
pub mod runner;
pub mod state;
pub mod tridiag;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use params::{derive_params, CoherentPair, DerivedParams, ModelParams};
pub use state::{coherent_product, TwoModeState};
