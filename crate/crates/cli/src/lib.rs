//! Experiment harness for the theta sum library: deterministic seeded Monte
//! Carlo over the group, tail and growth statistics, and machine-checkable
//! invariant suites. Everything is a pure function of `(command, config,
//! seed)`; outputs are byte-stable across runs and thread counts.

pub mod config;
pub mod experiments;
pub mod json;
pub mod sample;
pub mod verify;

pub use config::HarnessConfig;
