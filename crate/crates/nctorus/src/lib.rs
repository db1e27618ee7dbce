//! An exact desk-scale engine for algebraic noncommutative tori and their
//! periodic cyclic (co)homology.
//!
//! The library provides, over finitely supported Fourier data:
//!
//! * the twisted convolution algebra at any deformation parameter, with its
//!   canonical derivations, trace, closed-form product velocity, and matrix
//!   algebras ([`torus`], [`matrix`]);
//! * normalized Hochschild chains with the differentials `b` and `B`, Chern
//!   characters of idempotents and invertibles, and the generalized trace
//!   ([`chain`], [`chern`]);
//! * the operator calculus of Hochschild cochains: cup products, the
//!   Gerstenhaber bracket, Lie derivatives, cyclic contractions, and the
//!   two-derivation pair operators with their homotopy formulas
//!   ([`cochain`], [`calculus`]);
//! * scalar cochains, the characteristic map, and the canonical pairing
//!   ([`functional`]);
//! * the derivation-invariant complex, its chain equivalence with the full
//!   complex, closed-form parallel transport across the deformation, and the
//!   finite wedge model of the induced connection ([`invariant`]);
//! * generic transport utilities: Dyson series integration and nilpotent
//!   exponentials ([`ode`], [`section`]);
//! * seeded verification suites binding every operator law to an executable
//!   residual check ([`verify`]), and JSON interchange formats ([`io`]).

// index loops mirror the displayed formulas; iterator rewrites would obscure
// the subscript bookkeeping
#![allow(clippy::needless_range_loop)]

pub mod calculus;
pub mod chain;
pub mod chern;
pub mod cochain;
pub mod error;
pub mod functional;
pub mod invariant;
pub mod io;
pub mod matrix;
pub mod ode;
pub mod section;
pub mod torus;
pub mod verify;

pub use error::{Error, Result};
pub use torus::{DeformationPoint, MultiIndex, SkewMatrix, TorusElement, C64};
