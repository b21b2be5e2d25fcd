//! Surface-code lattice-surgery toolkit.
//!
//! The crate compiles small quantum circuits into schedules of patch
//! operations on a grid of surface-code tiles and executes those schedules on
//! a stabilizer simulator, with a dense statevector oracle for desk-scale
//! verification. Main layers, bottom up:
//!
//! - [`pauli`]: phase-exact Pauli strings, products, commutation.
//! - [`gates`]: gate IR, exact angles, decomposition into Pauli rotations.
//! - [`dense`]: ≤ 20-qubit statevector/unitary oracle.
//! - [`tableau`]: stabilizer tableau simulator with Pauli-product
//!   measurement, tracked logical frames, and stabilizer membership tests.
//! - [`grid`]: tile grid geometry — allocation, seams, release.
//! - [`patch`]: surface-code patch construction, logical operators, syndrome
//!   circuits, stabilization.
//! - [`surgery`]: merges, splits, state injection, growth, contraction, and
//!   patch-orientation changes.
//! - [`protocols`]: logical gates built from surgery primitives, with
//!   outcome-dependent corrections.
//! - [`compiler`]: circuit text parsing, rotation-level lowering, fence
//!   scheduling, and schedule execution at logical or physical tier.
//! - [`noise`]: error injection, small-distance lookup decoding, Monte-Carlo
//!   logical error rates.
//! - [`render`]: ASCII and SVG canvas snapshots.
//! - [`suites`]: named self-check suites used by the command-line interface.

pub mod compiler;
pub mod dense;
pub mod error;
pub mod gates;
mod gf2;
pub mod grid;
pub mod noise;
pub mod patch;
pub mod pauli;
pub mod protocols;
pub mod render;
pub mod suites;
pub mod surgery;
pub mod tableau;
