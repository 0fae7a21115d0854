//! Classification of Gorenstein fake weighted projective spaces, equivalently
//! reflexive lattice simplices, together with the Picard group and Gorenstein
//! index of an arbitrary fake weighted projective space.
//!
//! The pipeline runs in four stages, one module each:
//! [`weights`] enumerates Gorenstein weight vectors, [`torsion`] the minimal
//! Gorenstein torsion rows for a weight vector, [`gluing`] stacks compatible
//! rows into degree matrices and [`normal_form`] keeps one representative per
//! isomorphism class. [`classify`] drives the stages over many weight vectors
//! in parallel with checkpointing.

#![allow(clippy::needless_range_loop)]

pub mod abelian;
pub mod arith;
pub mod classify;
pub mod error;
pub mod gluing;
pub mod intmat;
pub mod invariants;
pub mod lattice;
pub mod normal_form;
pub mod record;
pub mod reflexive;
pub mod torsion;
pub mod verify;
pub mod weights;

pub use arith::Int;
pub use error::{Error, Result};
