//! Casimir-Polder free energy and entropy of an atom above a graphene sheet
//! with an energy gap and chemical potential, from the Lifshitz formula with
//! the Dirac-model polarization tensor.
//!
//! Matsubara terms are evaluated in parallel with rayon when the `parallel`
//! feature is on (the default); without it every map runs sequentially. The
//! reductions use a fixed order, so both builds give identical results.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod asymptotics;
pub mod error;
pub mod lifshitz;
pub mod parallel;
pub mod quadrature;
pub mod reflection;
pub mod special;
pub mod summation;
pub mod tensor;
pub mod thermo;
pub mod units;

pub use error::{Error, Result};
