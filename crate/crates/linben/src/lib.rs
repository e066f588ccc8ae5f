//! Simulation and classification toolkit for leading-digit statistics of
//! linear difference equations and matrix-power observables.
//!
//! The crate is organized around a small set of layers:
//!
//! * [`numkit`] — overflow-proof scaled reals, significand extraction,
//!   complex log-Gamma and related helpers.
//! * [`udist`] — empirical uniform-distribution-mod-1 and leading-digit
//!   diagnostics (Weyl sums, star discrepancy, digit histograms).
//! * [`spectral`] — companion matrices, characteristic polynomials,
//!   eigenvalue extraction, Jordan indices and the extremal peripheral
//!   spectrum.
//! * [`resonance`] — high-precision integer-relation detection (PSLQ) and
//!   the nonresonance classification of modulus classes.
//! * [`linrec`] — sequence engines in scaled arithmetic, zero-set analysis
//!   and the predict-and-verify pipeline.
//! * [`specfun`] — an independent special-function oracle layer: closed
//!   forms and quadrature for a family of oscillatory torus integrals.
//! * [`cli`] — the command-line surface and report serialization.

pub mod cli;
pub mod linrec;
pub mod numkit;
pub mod resonance;
pub mod specfun;
pub mod spectral;
pub mod udist;
