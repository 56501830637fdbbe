//! Cartan reduction of oriented-congruence structures: normalized coframes,
//! scalar and relative invariants, and residual checks of the defining
//! structural systems for each twist/shear branch.

pub mod generic;
pub mod st;
pub mod ts;

use crate::congruence::{OrientedCongruence, PointFrame, StructureFunctions};
use crate::forms::{wedge, FormsError, OneFormJet, TwoFormJet};
use crate::jet::{JetError, JetScalar};
use crate::scalar::{cr, Real, C};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InvError {
    #[error("branch mismatch: {0}")]
    BranchMismatch(String),
    #[error("A1 vanishes at this point; B1 is undefined by this route")]
    A1Zero,
    #[error("ambiguous sub-branch: sampled magnitude {value:.3e} straddles tolerance {tol:.3e} for '{what}'")]
    AmbiguousVariant {
        what: &'static str,
        value: f64,
        tol: f64,
    },
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

impl From<crate::expr::EvalError> for InvError {
    fn from(e: crate::expr::EvalError) -> Self {
        InvError::Forms(FormsError::Eval(e))
    }
}

pub type InvResult<V> = Result<V, InvError>;

/// Named residuals of the structural-system checks, all relative.
#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct Residuals(pub BTreeMap<String, f64>);

impl Residuals {
    pub fn push<T: Real>(&mut self, name: &str, value: T) {
        self.0
            .insert(name.to_string(), value.to_f64().unwrap_or(f64::NAN));
    }

    pub fn max(&self) -> f64 {
        self.0.values().cloned().fold(0.0, f64::max)
    }
}

/// Relative difference of the constant terms of two 2-forms.
pub fn two_form_residual<T: Real>(lhs: &TwoFormJet<T>, rhs: &TwoFormJet<T>) -> T {
    let scale = lhs.value_norm().max(rhs.value_norm()).max(T::one());
    lhs.sub(rhs).value_norm() / scale
}

/// Relative difference of two complex constants.
pub fn rel_diff<T: Real>(a: C<T>, b: C<T>) -> T {
    (a - b).norm() / a.norm().max(b.norm()).max(T::one())
}

/// The invariant coframe on M for one branch.
pub struct CoframeM<T: Real> {
    pub w: OneFormJet<T>,
    pub w1: OneFormJet<T>,
    pub w1b: OneFormJet<T>,
}

impl<T: Real> CoframeM<T> {
    pub fn basis2(&self) -> [TwoFormJet<T>; 3] {
        [
            wedge(&self.w1, &self.w1b),
            wedge(&self.w1, &self.w),
            wedge(&self.w1b, &self.w),
        ]
    }

    /// Coefficients of a 2-form on (w1^w1b, w1^w, w1b^w).
    pub fn decompose_two(&self, f: &TwoFormJet<T>) -> InvResult<[JetScalar<T>; 3]> {
        let b = self.basis2();
        Ok(crate::forms::decompose_two_form(f, &[&b[0], &b[1], &b[2]])?)
    }

    /// Coefficients of a 1-form on (w1, w1b, w).
    pub fn decompose_one(&self, eta: &OneFormJet<T>) -> InvResult<[JetScalar<T>; 3]> {
        let v = crate::forms::decompose_one_form(eta, &[&self.w1, &self.w1b, &self.w])?;
        Ok([v[0].clone(), v[1].clone(), v[2].clone()])
    }

    /// Dual frame rows ordered as (d0, d, db) for (w, w1, w1b).
    pub fn dual(&self) -> InvResult<crate::forms::FrameJet<T>> {
        Ok(crate::forms::dual_frame(&[&self.w, &self.w1, &self.w1b])?)
    }
}

/// Bundle of per-point data all branch reductions start from.
pub struct BranchPoint<T: Real> {
    pub pf: PointFrame<T>,
    pub sf: StructureFunctions<T>,
    pub point: Vec<T>,
}

pub fn branch_point<T: Real>(
    c: &OrientedCongruence<T>,
    point: &[T],
    order: usize,
) -> InvResult<BranchPoint<T>> {
    let pf = c.point_frame(point, order)?;
    let sf = crate::congruence::structure_functions_of(&pf)?;
    Ok(BranchPoint {
        pf,
        sf,
        point: point.to_vec(),
    })
}

/// e^{i y} for a real jet y.
pub fn unit_phase<T: Real>(y: &JetScalar<T>) -> JetScalar<T> {
    y.scale(C::new(T::zero(), T::one())).exp()
}

/// i as a constant jet matching a template's shape.
pub fn i_like<T: Real>(template: &JetScalar<T>) -> JetScalar<T> {
    JetScalar::constant(
        C::new(T::zero(), T::one()),
        template.dim(),
        template.order(),
    )
}

/// Real constant jet matching a template's shape.
pub fn const_like<T: Real>(x: f64, template: &JetScalar<T>) -> JetScalar<T> {
    JetScalar::constant(cr(x), template.dim(), template.order())
}
