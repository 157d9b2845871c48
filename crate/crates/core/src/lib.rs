//! Teleportation of spin-½ states through nucleon scattering.
//!
//! The crate is organized bottom-up:
//!
//! * [`spin_core`] – states and operators for one to three spins;
//! * [`bell_basis`] – Bell kets, projectors, collective spin operators and
//!   statistical Bell-state identification;
//! * [`scattering`] – the two-spin scattering operator in invariant and
//!   Bell-projector form;
//! * [`teleport`] – the four-channel protocol engine;
//! * [`expsim`] – a Monte Carlo model of the two-target proton experiment;
//! * [`cli`] – configuration, file formats and the batch subcommands.
//!
//! All randomness flows through explicit [`rng::Stream`]s addressed by
//! `(seed, domain, index)`.

pub mod bell_basis;
pub mod cli;
pub mod error;
pub mod expsim;
pub mod rng;
pub mod scattering;
pub mod spin_core;
pub mod teleport;

pub use error::{Error, Result};
