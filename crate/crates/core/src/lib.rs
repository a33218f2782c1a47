//! Robust controller synthesis for timed Büchi automata with punctual guards.
//!
//! The pipeline goes from a textual automaton ([`model`]) through regions and
//! zones ([`region`], [`dbm`]) to orbit graphs ([`orbit`]), robust predecessors
//! ([`robust`]), slices ([`slice`]) and the lasso search ([`synthesis`]).
//! [`game`] plays the resulting strategies against a perturbing opponent.

pub mod cli;
pub mod dbm;
pub mod dot;
pub mod game;
pub mod model;
pub mod orbit;
pub mod region;
pub mod robust;
pub mod samples;
pub mod slice;
pub mod synthesis;

pub use model::{rat, Rational};

#[cfg(test)]
mod testgen;
