//! Einstein residuals: the pure-radiation form Ric = Lambda g + Phi k (x) k
//! for metrics with the distinguished null direction k = d/dr, and the
//! reduced Einstein system on M over twist-only structures with K1 != 0,
//! K2 == 0. All frame derivatives use the pipeline-normalized invariant
//! coframe, so the signs of the section choices are always consistent.

use super::curvature::CurvatureBundle;
use super::metric::Metric4;
use crate::congruence::OrientedCongruence;
use crate::expr::{eval_jet, EvalCtx, Expr};
use crate::forms::{dual_frame, frame_derivative, FormsError, FormsResult};
use crate::invariants::ts::{ts_k1_coframe_with, K1Coframe};
use crate::invariants::InvError;
use crate::jet::JetScalar;
use crate::scalar::{cr, im, Real, C};

const N: usize = 4;

/// Residual of Ric - Lambda g - Phi k (x) k with Phi the least-squares
/// coefficient; k = d/dr identified by the chart variable named "r".
pub struct EinsteinResidual<T: Real> {
    pub residual_norm: T,
    pub phi: T,
    pub lambda: T,
}

pub fn einstein_residual<T: Real>(
    metric: &Metric4<T>,
    cb: &CurvatureBundle<T>,
    lambda: T,
) -> FormsResult<EinsteinResidual<T>> {
    let r_ix = metric
        .chart
        .names
        .iter()
        .position(|n| n == "r")
        .ok_or_else(|| FormsError::Invalid("no chart variable named 'r'".into()))?;
    // k_mu = g_{mu r}
    let mut k = [T::zero(); 4];
    for mu in 0..N {
        k[mu] = cb.mj.g.at(mu, r_ix).value().re;
    }
    let mut num = T::zero();
    let mut den = T::zero();
    let mut a = [[T::zero(); 4]; 4];
    for mu in 0..N {
        for nu in 0..N {
            a[mu][nu] = cb.ricci_at(mu, nu).value().re - lambda * cb.mj.g.at(mu, nu).value().re;
            let kk = k[mu] * k[nu];
            num = num + a[mu][nu] * kk;
            den = den + kk * kk;
        }
    }
    let phi = if den > T::of(1e-30) {
        num / den
    } else {
        T::zero()
    };
    let mut worst = T::zero();
    for mu in 0..N {
        for nu in 0..N {
            let r = (a[mu][nu] - phi * k[mu] * k[nu]).abs();
            if r > worst {
                worst = r;
            }
        }
    }
    Ok(EinsteinResidual {
        residual_norm: worst / cb.metric_scale(),
        phi,
        lambda,
    })
}

/// Null-geodesic check for k = d/dr: g(k,k) and the non-proportional part
/// of grad_k k relative to k.
pub fn null_geodesic_residual<T: Real>(
    metric: &Metric4<T>,
    cb: &CurvatureBundle<T>,
) -> FormsResult<(T, T)> {
    let r_ix = metric
        .chart
        .names
        .iter()
        .position(|n| n == "r")
        .ok_or_else(|| FormsError::Invalid("no chart variable named 'r'".into()))?;
    let null = cb.mj.g.at(r_ix, r_ix).value().norm() / cb.metric_scale();
    // (grad_k k)^mu = Gamma^mu_{rr}; must be proportional to k^mu
    let mut acc = [C::new(T::zero(), T::zero()); 4];
    for (mu, slot) in acc.iter_mut().enumerate() {
        *slot = cb.christoffel.at(mu, r_ix, r_ix).value();
    }
    let lam = acc[r_ix];
    let mut worst = T::zero();
    for (mu, v) in acc.iter().enumerate() {
        if mu != r_ix {
            worst = worst.max(v.norm());
        }
    }
    let scale = lam.norm().max(T::one());
    Ok((null, worst / scale))
}

/// The invariant frame data of a K1-branch structure at a point.
pub struct InvariantFrame<T: Real> {
    pub k1c: K1Coframe<T>,
    pub d0: Vec<JetScalar<T>>,
    pub dd: Vec<JetScalar<T>>,
    pub db: Vec<JetScalar<T>>,
    pub a1: JetScalar<T>,
    pub b1: JetScalar<T>,
    pub a11: C<T>,
}

pub fn invariant_frame<T: Real>(
    structure: &OrientedCongruence<T>,
    point: &[T],
    order: usize,
) -> Result<InvariantFrame<T>, InvError> {
    let k1c = ts_k1_coframe_with(structure, point, order, true)?;
    let frame = dual_frame(&[&k1c.cof.w, &k1c.cof.w1, &k1c.cof.w1b])?;
    // a11 from the omega1 slot of dA1 minus (i/2)A1(B1 + conj B1)
    let da1 = k1c
        .cof
        .decompose_one(&crate::forms::d_scalar(&k1c.a1, 3)?)?;
    let a1v = k1c.a1.value();
    let b1v = k1c.b1.value();
    let a11 = da1[0].value() - a1v * (b1v + b1v.conj()) * C::new(T::zero(), T::of(0.5));
    Ok(InvariantFrame {
        d0: frame.vectors[0].clone(),
        dd: frame.vectors[1].clone(),
        db: frame.vectors[2].clone(),
        a1: k1c.a1.clone(),
        b1: k1c.b1.clone(),
        a11,
        k1c,
    })
}

/// Residuals of the three reduced Einstein equations for ansatz fields
/// (c, m, p) given as expressions on the chart of the structure.
pub fn reduced_einstein_residuals<T: Real>(
    structure: &OrientedCongruence<T>,
    c_expr: &Expr,
    m_expr: &Expr,
    p_expr: &Expr,
    point: &[T],
    order: usize,
) -> Result<[T; 3], InvError> {
    let fr = invariant_frame(structure, point, order)?;
    let ctx = EvalCtx::new(&structure.chart.names, &structure.params)
        .with_guard(crate::congruence::DENOM_GUARD);
    let c_jet = eval_jet(c_expr, &ctx, point, order)?;
    let m_jet = eval_jet(m_expr, &ctx, point, order)?;
    let p_jet = eval_jet(p_expr, &ctx, point, order)?;
    let a1 = &fr.a1;
    let b1 = &fr.b1;
    let sign = fr.k1c.sign as f64;
    let a11 = JetScalar::constant(fr.a11, 3, c_jet.order());

    // (d - 3A1 + iB1)c - 2c^2 + a11 - A1^2 + (i/2)A1(3B1 + conj B1) = 0
    let d_c = frame_derivative(&c_jet, &fr.dd)?;
    let r1 = &(&(&(&(&d_c - &a1.mul(&c_jet).scale(cr(3.0))) + &b1.mul(&c_jet).scale(im()))
        - &c_jet.mul(&c_jet).scale(cr(2.0)))
        + &a11)
        + &(&a1
            .mul(&(&b1.scale(cr(3.0)) + &b1.conj()))
            .scale(C::new(T::zero(), T::of(0.5)))
            - &a1.mul(a1));

    // (db - 6 conj c) m = 0
    let db_m = frame_derivative(&m_jet, &fr.db)?;
    let r2 = &db_m - &c_jet.conj().mul(&m_jet).scale(cr(6.0));

    // (d + 3A1 - iB1) db p + (db + 3A1 + i conj B1) d p
    //  - 3[(d + 3A1 - iB1) conj c + (db + 3A1 + i conj B1) c + 2 c conj c
    //     + (8/3)A1^2 + (4/3)a11 + (2i/3)A1(conj B1 - B1) ± 1/6] p
    //  + (m + conj m)/p^3 = 0
    let db_p = frame_derivative(&p_jet, &fr.db)?;
    let d_p = frame_derivative(&p_jet, &fr.dd)?;
    let d_dbp = frame_derivative(&db_p, &fr.dd)?;
    let db_dp = frame_derivative(&d_p, &fr.db)?;
    let lplus = &a1.scale(cr(3.0)) - &b1.scale(im()); // 3A1 - iB1
    let lminus = &a1.scale(cr(3.0)) + &b1.conj().scale(im()); // 3A1 + i conj B1
    let second_order = &(&d_dbp + &lplus.mul(&db_p)) + &(&db_dp + &lminus.mul(&d_p));
    let d_cb = frame_derivative(&c_jet.conj(), &fr.dd)?;
    let db_c = frame_derivative(&c_jet, &fr.db)?;
    let bracket = &(&(&(&(&(&(&d_cb + &lplus.mul(&c_jet.conj())) + &db_c) + &lminus.mul(&c_jet))
        + &c_jet.mul(&c_jet.conj()).scale(cr(2.0)))
        + &a1.mul(a1).scale(cr(8.0 / 3.0)))
        + &a11.scale(cr(4.0 / 3.0)))
        + &(&a1
            .mul(&(&b1.conj() - b1))
            .scale(C::new(T::zero(), T::of(2.0 / 3.0)))
            + &JetScalar::constant(cr(sign / 6.0), 3, c_jet.order()));
    let m_term = (&m_jet + &m_jet.conj()).div(&p_jet.powi(3)?)?;
    let r3 = &(&second_order - &bracket.mul(&p_jet).scale(cr(3.0))) + &m_term;

    Ok([r1.value().norm(), r2.value().norm(), r3.value().norm()])
}

/// Residual of the second-order ODE satisfied by p(y) in the two-symmetry
/// reduction, at a point y.
pub fn solp_residual<T: Real>(p_expr: &Expr, tau: f64, t: f64, y: T) -> FormsResult<T> {
    let names = vec!["y".to_string()];
    let params = std::collections::BTreeMap::new();
    let ctx = EvalCtx::new(&names, &params).with_guard(crate::congruence::DENOM_GUARD);
    let p = eval_jet(p_expr, &ctx, &[y], 2)?;
    let p0 = c2f(p.value());
    let p1 = c2f(p.partial(0)?.value());
    let p2 = c2f(p.partial(0)?.partial(0)?.value());
    let tau2 = tau * tau;
    let yf = y.to_f64().unwrap();
    let y4t = yf.powf(4.0 * tau2);
    let lead = 4.0 * yf * (yf - t * y4t).powi(2);
    let first = yf * p2 + (4.0 * tau2 - 2.0) * p1;
    let poly = (-32.0 * tau2 * tau2 + 20.0 * tau2 - 1.0) * yf * yf
        + 4.0 * t * t * (4.0 * tau2 * tau2 - 7.0 * tau2 + 2.0) * yf.powf(8.0 * tau2)
        - 16.0 * t * (8.0 * tau2 * tau2 - 5.0 * tau2 + 1.0) * yf.powf(4.0 * tau2 + 1.0);
    let res = lead * first + poly * p0;
    Ok(T::of(res.norm()))
}

/// Section data of the Bianchi VI_h structures as the pipeline normalizes
/// them: A1 > 0 always, so for parameters where the displayed
/// A1 = -(∓1+2τ²)/(2τ) is negative the frame phase is flipped and the
/// effective B1 = i·(-τ). Solutions of the reduced system transform as
/// c -> -c under that flip; m and p are unchanged.
pub fn pr3s1_section(tau: f64, upper: bool) -> (f64, f64) {
    let formula = if upper {
        -(-1.0 + 2.0 * tau * tau) / (2.0 * tau)
    } else {
        -(1.0 + 2.0 * tau * tau) / (2.0 * tau)
    };
    if formula >= 0.0 {
        (formula, tau)
    } else {
        (-formula, -tau)
    }
}

/// Constants (A1, Im B1) of the structure in the section the pipeline
/// actually uses at `point` (this differs from the displayed formulas by a
/// phase flip when the displayed A1 would be negative, and falls back to
/// the phi = 0 section when A1 == 0).
pub fn effective_constants<T: Real>(
    structure: &OrientedCongruence<T>,
    point: &[T],
    order: usize,
) -> Result<(T, T), InvError> {
    let fr = invariant_frame(structure, point, order)?;
    Ok((fr.a1.value().re, fr.b1.value().im))
}

fn c2f<T: Real>(c: C<T>) -> num_complex::Complex64 {
    num_complex::Complex64::new(c.re.to_f64().unwrap_or(0.0), c.im.to_f64().unwrap_or(0.0))
}

#[derive(Debug, thiserror::Error)]
pub enum CrSolveError {
    #[error("d eta has no omega1 component (degenerate CR candidate)")]
    DegenerateCr,
    #[error(transparent)]
    Inv(#[from] InvError),
    #[error(transparent)]
    Forms(#[from] FormsError),
}

/// c derived from a CR-function candidate eta: d eta = x w1 + y w gives
/// c = (i/2)(conj y / conj x) - A1. Returns the CR residual of eta and the
/// d Pi ^ Pi residual for Pi = w1 + 2i(A1 + conj c) w, which vanishes iff
/// c solves the first reduced equation.
pub struct CrDerivedC<T: Real> {
    pub c: C<T>,
    pub cr_residual: T,
    pub pi_residual: T,
}

pub fn c_from_cr<T: Real>(
    eta: &Expr,
    structure: &OrientedCongruence<T>,
    point: &[T],
    order: usize,
) -> Result<CrDerivedC<T>, CrSolveError> {
    let k1c = ts_k1_coframe_with(structure, point, order, true)?;
    let ctx = EvalCtx::new(&structure.chart.names, &structure.params)
        .with_guard(crate::congruence::DENOM_GUARD);
    let eta_jet = eval_jet(eta, &ctx, point, order).map_err(FormsError::Eval)?;
    let deta = crate::forms::d_scalar(&eta_jet, 3)?;
    let coefs = k1c.cof.decompose_one(&deta)?;
    let x = coefs[0].value();
    let cr_res = coefs[1].value().norm() / x.norm().max(T::of(1e-12));
    if x.norm() < T::of(1e-10) {
        return Err(CrSolveError::DegenerateCr);
    }
    let yv = coefs[2].value();
    let a1 = k1c.a1.value();
    let c = im::<T>() * (yv.conj() / x.conj()) * C::new(T::of(0.5), T::zero()) - a1;

    let coef = (a1 + c.conj()) * C::new(T::zero(), T::of(2.0));
    let pi = k1c
        .cof
        .w1
        .add(&k1c.cof.w.scale_jet(&JetScalar::constant(coef, 3, order)));
    let dpi = crate::forms::exterior_d(&pi)?;
    let vol = crate::forms::wedge_two_one(&dpi, &pi);
    let scale_form =
        crate::forms::wedge_two_one(&crate::forms::wedge(&k1c.cof.w1, &k1c.cof.w1b), &k1c.cof.w);
    let pi_res = vol.value().norm() / scale_form.value().norm().max(T::of(1e-12));
    Ok(CrDerivedC {
        c,
        cr_residual: cr_res,
        pi_residual: pi_res,
    })
}

/// m derived from a CR function xi: m = [d0 xi - 2i(A1 + conj c) d xi
/// + 2i(A1 + c) db xi]^3, with the residual of (db - 6 conj c) m.
pub struct CrDerivedM<T: Real> {
    pub m: C<T>,
    pub residual: T,
}

pub fn m_from_xi<T: Real>(
    xi: &Expr,
    c_expr: &Expr,
    structure: &OrientedCongruence<T>,
    point: &[T],
    order: usize,
) -> Result<CrDerivedM<T>, InvError> {
    let fr = invariant_frame(structure, point, order)?;
    let ctx = EvalCtx::new(&structure.chart.names, &structure.params)
        .with_guard(crate::congruence::DENOM_GUARD);
    let xi_jet = eval_jet(xi, &ctx, point, order)?;
    let c_jet = eval_jet(c_expr, &ctx, point, order)?;

    let d0_xi = frame_derivative(&xi_jet, &fr.d0)?;
    let d_xi = frame_derivative(&xi_jet, &fr.dd)?;
    let db_xi = frame_derivative(&xi_jet, &fr.db)?;
    let two_i = C::new(T::zero(), T::of(2.0));
    let base = &(&d0_xi - &(&fr.a1 + &c_jet.conj()).mul(&d_xi).scale(two_i))
        + &(&fr.a1 + &c_jet).mul(&db_xi).scale(two_i);
    let m_jet = base.powi(3)?;
    let db_m = frame_derivative(&m_jet, &fr.db)?;
    let res = &db_m - &c_jet.conj().mul(&m_jet).scale(cr(6.0));
    let scale = m_jet.value().norm().max(T::one());
    Ok(CrDerivedM {
        m: m_jet.value(),
        residual: res.value().norm() / scale,
    })
}
