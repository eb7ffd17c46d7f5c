//! Simulation and numerical analysis of max-chain formation by robot swarms.
//!
//! A chain of robots, each seeing only its two neighbours within unit range,
//! tries to stretch into a straight line of length n-1. This crate provides
//! the discrete round-based strategies, the continuous-time strategy, the
//! configuration families that exercise them, and the spectral tools used to
//! reason about their convergence.

pub mod acceptance;
pub mod chain;
pub mod continuous;
pub mod discrete;
pub mod error;
pub mod fit;
pub mod generators;
pub mod harness;
pub mod spectral;

pub use chain::{Configuration, Point};
pub use error::{End, Error, Result};
