//! Numerical kernels for theta sums with a quadratic oscillatory phase and
//! the group machinery that makes them fast: the symplectic group `Sp(n, R)`,
//! its Iwasawa and Langlands coordinates, reduction into a fundamental domain
//! for `Sp(n, Z)`, the Schrodinger and oscillator-representation actions on
//! Gaussian packets, and smooth dyadic cutoff resolutions of box indicators.
//!
//! The crate is `no_std`-compatible (with `alloc`); all floating point math
//! routes through [`fx`], which uses `libm` when the `std` feature is off.
//!
//! Layer map, bottom to top:
//!
//! * [`mat`] / [`cmat`] / [`imat`] — small dense real, complex and integer
//!   matrix kernels (n <= 8), including the upper-triangular square root
//!   and the `U V U^T` factorization of a positive definite matrix.
//! * [`symplectic`] — `Sp(n, R)` elements, Iwasawa coordinates, the unitary
//!   embedding `k(Q)`, Langlands coordinates of maximal parabolics.
//! * [`jacobi`] — the Heisenberg group, the semidirect Jacobi group, and the
//!   integral subgroup data (parity vectors, integral symplectic matrices).
//! * [`reduction`] — Grenier reduction for `GL(n, Z)`, Siegel reduction for
//!   `Sp(n, Z)`, the height function and domain membership certification.
//! * [`weil`] — exact action of both representations on Gaussian packets.
//! * [`cutoff`] — the smooth dyadic partition of unity for box indicators.
//! * [`theta`] — direct, automorphic and reduced theta evaluators, the cusp
//!   main term, and the dyadic height bound for box truncations.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cmat;
pub mod cutoff;
pub mod error;
pub mod fx;
pub mod imat;
pub mod jacobi;
pub mod mat;
pub mod reduction;
pub mod rng;
pub mod seeded;
pub mod symplectic;
pub mod theta;
pub mod weil;

pub use error::Error;
pub use num_complex::Complex64;

/// Maximum supported matrix rank. The regime of interest is small rank;
/// fixed small-n kernels avoid premature generality.
pub const MAX_RANK: usize = 8;
