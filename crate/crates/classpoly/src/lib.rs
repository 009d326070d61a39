//! Class polynomials of nonholomorphic modular functions, computed with the
//! CRT method on isogeny volcanoes.
//!
//! The library computes, over the integers (or the rationals where the result
//! is genuinely rational):
//!
//! * classical modular polynomials `Phi_m(X, J)` for arbitrary `m >= 2`,
//! * Hilbert class polynomials `H_D(j; x)`,
//! * class polynomials `H_D(gamma; x)` of the nonholomorphic weight-zero
//!   function `gamma = (E4 E2^* )/(6 E6 j) - (7j - 6912)/(6 j (j - 1728))`,
//!   and of "good" nonholomorphic functions `F = sum_n A_n(j) gamma^n`,
//! * partition class polynomials `H_n^part(x)`, whose traces encode the
//!   partition numbers `p(n)`.
//!
//! The per-prime workhorse finds the roots of a Hilbert class polynomial on
//! the surface of an `l`-isogeny volcano, walks the volcano with Vélu's
//! formulas to recover the full set of `m`-isogenous neighbours, and
//! reconstructs integer coefficients by the explicit CRT over a pool of
//! suitable primes. The analytic module carries an independent
//! floating-point evaluator (used both to seed the CRT pipeline with Hilbert
//! class polynomials and as a cross-check oracle for everything else).

pub mod analytic;
pub mod arith;
pub mod ecfp;
pub mod error;
pub mod fppoly;
pub mod gammapoly;
pub mod modpoly;
pub mod partition;
pub mod qforms;

pub use error::Error;

/// Convenience alias used throughout: `Result` with the crate error type.
pub type Result<T> = std::result::Result<T, Error>;
