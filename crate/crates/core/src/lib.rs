//! Weighted conditional type operators `T = M_w E M_u` on finite atomic
//! measure spaces: conditional expectations, adjoints, domains, polar
//! decompositions, spectra, normality and expansivity, with a dense-matrix
//! oracle for every closed form.

// `!(x < y)` is used deliberately so that NaN falls on the rejecting side
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dense;
pub mod exec;
pub mod expansivity;
pub mod expect;
pub mod gallery;
pub mod io;
pub mod measure;
pub mod operator;
pub mod sample;
pub mod structure;

mod error;
mod sum;

pub use error::{Error, Result};
pub use exec::Execution;

/// Complex scalars used throughout.
pub type C64 = nalgebra::Complex<f64>;
