//! Numerical laboratory for 3-dimensional oriented-congruence structures.
//!
//! The crate evaluates everything pointwise with truncated-Taylor (jet)
//! arithmetic: a structure is given by a chart and a pair of 1-forms
//! (lambda real, mu complex), its twist/shear branch is classified, the
//! branch-appropriate Cartan coframe is normalized numerically, and the
//! scalar invariants plus the residuals of the defining structure equations
//! are reported. The associated 4-dimensional Lorentzian metrics feed a
//! curvature suite (Riemann/Ricci/Weyl, Newman-Penrose spinors, Petrov
//! types, Cotton/Bach tensors, Einstein residuals).
//!
//! All numerics are generic over the real scalar type via [`scalar::Real`]
//! (`f32` or `f64`); the aliases below fix the `f64` instantiation used by
//! the command-line tools.

// index-based loops are the clearer idiom in the tensor kernels
#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod congruence;
pub mod expr;
pub mod forms;
pub mod invariants;
pub mod jet;
pub mod scalar;
pub mod spacetime;

pub use scalar::{Real, C};

/// `f64` instantiations, the default working precision.
pub type Jet64 = jet::JetScalar<f64>;
pub type JetMatrix64 = jet::JetMatrix<f64>;
pub type OneForm64 = forms::OneForm<f64>;
pub type Congruence64 = congruence::OrientedCongruence<f64>;
pub type Metric64 = spacetime::Metric4<f64>;
pub type Complex64 = num_complex::Complex<f64>;

#[cfg(test)]
#[path = "/tmp/calib.rs"]
mod calib;
