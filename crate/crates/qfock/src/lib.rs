//! Finite-dimensional models of q-commuting operator tuples.
//!
//! The crate builds truncated Fock-space models for tuples of operators
//! satisfying the exchange relations `T_j T_i = q_ij T_i T_j` with
//! unimodular deformation parameters, extracts the maximal q-commuting
//! piece of an arbitrary tuple, constructs standard dilations, and checks
//! the moment combinatorics of the associated position operators. All
//! constructions are exact linear algebra at desk scale, with residuals
//! reported against explicit tolerances.

pub mod config;
pub mod dilation;
pub mod fock;
pub mod linalg;
pub mod moments;
pub mod piece;
pub mod qcoeff;
pub mod report;
pub mod suite;
