//! Twist-only branch (a != 0, s == 0): the relative invariants K1, K2 of
//! the 5-dimensional Cartan bundle, and the two further reductions
//! K1 != 0 / K2 == 0 (invariants A1, B1) and K2 != 0 (invariants Z0, Z1,
//! Z2, K1).

use super::{
    branch_point, const_like, i_like, rel_diff, two_form_residual, unit_phase, BranchPoint,
    CoframeM, InvError, InvResult, Residuals,
};
use crate::congruence::OrientedCongruence;
use crate::expr::{eval_jet, EvalCtx, Expr};
use crate::forms::{d_scalar, exterior_d, wedge, OneFormJet};
use crate::jet::JetScalar;
use crate::scalar::{cr, im, Real, C};
use std::collections::BTreeMap;

/// Tolerance for "this structure function vanishes here" sanity checks.
const POINT_TOL: f64 = 1e-7;

/// Relative invariants of the twist-only branch at one point, reported at
/// fiber values (rho, phi): K1 = k1/rho^2, K2 = e^{-i phi} k2 / rho^3.
#[derive(Debug, Clone)]
pub struct TsInvariants<T: Real> {
    pub k1: C<T>,
    pub k2: C<T>,
    pub big_k1: C<T>,
    pub big_k2: C<T>,
    pub rho: T,
    pub phi: T,
    pub k1_imag_rel: T,
    pub residuals: Residuals,
}

/// Jet-valued ingredients of the twist-only reduction kept for reuse.
pub struct TsJets<T: Real> {
    pub bp: BranchPoint<T>,
    pub log_a: JetScalar<T>,
    pub la_mu: JetScalar<T>,
    pub k1: JetScalar<T>,
    pub k2: JetScalar<T>,
}

fn check_twist_only<T: Real>(bp: &BranchPoint<T>) -> InvResult<()> {
    let scale = bp.pf.lam.scale_mag().max(bp.pf.mu.scale_mag());
    if bp.sf.s.value().norm() > T::of(POINT_TOL) * scale {
        return Err(InvError::BranchMismatch(format!(
            "shear |s| = {:.3e} is not zero at this point",
            bp.sf.s.value().norm().to_f64().unwrap_or(f64::NAN)
        )));
    }
    if bp.sf.a.value().norm() <= T::of(POINT_TOL) * scale {
        return Err(InvError::BranchMismatch(
            "twist a vanishes at this point".into(),
        ));
    }
    Ok(())
}

/// The closed forms for k1 (real) and k2 below the structural system, using
/// frame derivatives of the structure functions a, b, p, q.
pub fn ts_jets<T: Real>(
    c: &OrientedCongruence<T>,
    point: &[T],
    order: usize,
) -> InvResult<TsJets<T>> {
    let bp = branch_point(c, point, order)?;
    check_twist_only(&bp)?;
    ts_jets_of(bp)
}

pub(crate) fn ts_jets_of<T: Real>(bp: BranchPoint<T>) -> InvResult<TsJets<T>> {
    let sf = &bp.sf;
    let pf = &bp.pf;

    let log_a = sf.a.log()?;
    let la_mu = pf.d_mu(&log_a)?;
    let la_mumub = pf.d_mubar(&la_mu)?;
    let b_mub = pf.d_mubar(&sf.b)?;
    let pbar_mub = pf.d_mubar(&sf.p.conj())?;
    let p_sq = sf.p.mul(&sf.p.conj());

    // k1 = Re((log a)_{mu mub} - (log a)_mu p - i q a - b_mub + b p
    //         - 2 pbar_mub + 2 |p|^2)
    let k1_full = &(&(&(&(&(&la_mumub - &la_mu.mul(&sf.p)) - &sf.q.mul(&sf.a).scale(im()))
        - &b_mub)
        + &sf.b.mul(&sf.p))
        - &pbar_mub.scale(cr(2.0)))
        + &p_sq.scale(cr(2.0));
    let k1 = k1_full.real_part();

    // k2 = a_{mu lam} - a b_lam + i (log a)_mu (b_mub - bbar_mu - b p + bbar pbar)
    //      - 2 a_mu q - a q_mu - (a qbar)_mu - a b qbar
    let a_mu = pf.d_mu(&sf.a)?;
    let a_mulam = pf.d_lam(&a_mu)?;
    let b_lam = pf.d_lam(&sf.b)?;
    let bbar_mu = pf.d_mu(&sf.b.conj())?;
    let q_mu = pf.d_mu(&sf.q)?;
    let aqbar_mu = pf.d_mu(&sf.a.mul(&sf.q.conj()))?;
    let bracket = &(&(&b_mub - &bbar_mu) - &sf.b.mul(&sf.p)) + &sf.b.conj().mul(&sf.p.conj());
    let k2 = &(&(&(&(&(&a_mulam - &sf.a.mul(&b_lam)) + &la_mu.mul(&bracket).scale(im()))
        - &a_mu.mul(&sf.q).scale(cr(2.0)))
        - &sf.a.mul(&q_mu))
        - &aqbar_mu)
        - &sf.a.mul(&sf.b).mul(&sf.q.conj());

    Ok(TsJets {
        bp,
        log_a,
        la_mu,
        k1,
        k2,
    })
}

/// K1, K2 at fiber values plus the residuals of the structural system,
/// verified by rebuilding the five-dimensional coframe and differentiating
/// it with rho and phi as genuine jet variables.
pub fn ts_invariants<T: Real>(
    c: &OrientedCongruence<T>,
    point: &[T],
    order: usize,
    rho: T,
    phi: T,
) -> InvResult<TsInvariants<T>> {
    let tj = ts_jets(c, point, order)?;
    let mut residuals = Residuals::default();
    verify_syste(&tj, rho, phi, &mut residuals)?;

    let k1_full = tj.k1.value();
    let k2 = tj.k2.value();
    let rho2 = rho * rho;
    let e_miphi = C::new(T::zero(), -phi).exp();
    Ok(TsInvariants {
        k1: k1_full,
        k2,
        big_k1: k1_full / C::new(rho2, T::zero()),
        big_k2: k2 * e_miphi / C::new(rho2 * rho, T::zero()),
        rho,
        phi,
        k1_imag_rel: k1_full.im.abs() / k1_full.norm().max(T::one()),
        residuals,
    })
}

/// Check the full structural system on P = M x C at the section point
/// (rho, phi), with rho and phi promoted to jet variables 3 and 4.
fn verify_syste<T: Real>(tj: &TsJets<T>, rho: T, phi: T, out: &mut Residuals) -> InvResult<()> {
    let pf = &tj.bp.pf;
    let sf = &tj.bp.sf;
    let order = sf.a.order();
    let up = |j: &JetScalar<T>| j.truncate(order).promote(5, &[0, 1, 2]).unwrap();

    let rho_j = JetScalar::variable(3, C::new(rho, T::zero()), 5, order)?;
    let phi_j = JetScalar::variable(4, C::new(phi, T::zero()), 5, order)?;
    let e_iphi = unit_phase(&phi_j);

    let ext = |f: &OneFormJet<T>| -> OneFormJet<T> {
        let mut v: Vec<JetScalar<T>> = f.comps.iter().map(&up).collect();
        v.push(JetScalar::zero(5, order));
        v.push(JetScalar::zero(5, order));
        OneFormJet { comps: v }
    };
    let lam5 = ext(&pf.lam);
    let mu5 = ext(&pf.mu);
    let mu5b = mu5.conj();

    // omega = rho^2 / a lambda ; omega1 = rho e^{i phi} mu
    let a5 = up(&sf.a);
    let f = rho_j.mul(&rho_j).div(&a5)?;
    let w = lam5.scale_jet(&f);
    let w1 = mu5.scale_jet(&rho_j.mul(&e_iphi));
    let w1b = w1.conj();

    // Omega = d log rho + i d phi + (pbar + b - (log a)_mu) mu - p mub - q lam
    let c_mu = &(&up(&sf.p.conj()) + &up(&sf.b)) - &up(&tj.la_mu);
    let mut omega = mu5
        .scale_jet(&c_mu)
        .sub(&mu5b.scale_jet(&up(&sf.p)))
        .sub(&lam5.scale_jet(&up(&sf.q)));
    omega.comps[3] = &omega.comps[3] + &rho_j.recip()?;
    omega.comps[4] = &omega.comps[4] + &i_like(&phi_j);
    let omega_b = omega.conj();

    let dw = exterior_d(&w)?;
    let dw1 = exterior_d(&w1)?;
    let domega = exterior_d(&omega)?;

    let w1_w1b = wedge(&w1, &w1b);
    let re_omega = omega.add(&omega_b);
    let rhs_dw = w1_w1b.scale_jet(&i_like(&rho_j)).add(&wedge(&re_omega, &w));
    out.push("syste:dw", two_form_residual(&dw, &rhs_dw));

    let rhs_dw1 = wedge(&omega, &w1);
    out.push("syste:dw1", two_form_residual(&dw1, &rhs_dw1));

    // d Omega = K1 w1 ^ w1b + K2 w1 ^ w
    let rho2 = rho_j.mul(&rho_j);
    let big_k1 = up(&tj.k1).div(&rho2)?;
    let big_k2 = up(&tj.k2).mul(&e_iphi.recip()?).div(&rho2.mul(&rho_j))?;
    let rhs_domega = w1_w1b
        .scale_jet(&big_k1)
        .add(&wedge(&w1, &w).scale_jet(&big_k2));
    out.push("syste:dOmega", two_form_residual(&domega, &rhs_domega));
    Ok(())
}

/// Result of the K1 != 0, K2 == 0 reduction at a point: the section is
/// chosen so A1 is real and positive when nonzero.
#[derive(Debug, Clone)]
pub struct TsReducedK1<T: Real> {
    pub a1: C<T>,
    pub b1: C<T>,
    /// +1 when k1 > 0 (the K1 = +1 sheet), -1 otherwise.
    pub sign: i32,
    pub derived: BTreeMap<String, C<T>>,
    pub residuals: Residuals,
}

/// The fully normalized K1-branch coframe at a point, with the jets of
/// A1, B1 and the pullback Sigma. Shared by the reduction check and by
/// the reduced Einstein machinery.
pub struct K1Coframe<T: Real> {
    pub cof: CoframeM<T>,
    pub a1: JetScalar<T>,
    pub b1: JetScalar<T>,
    pub sigma: OneFormJet<T>,
    pub sigma_coefs: [C<T>; 3],
    pub sign: i32,
}

pub fn ts_k1_coframe<T: Real>(
    c: &OrientedCongruence<T>,
    point: &[T],
    order: usize,
) -> InvResult<K1Coframe<T>> {
    ts_k1_coframe_with(c, point, order, false)
}

/// As [`ts_k1_coframe`], but with `allow_a1_zero` the A1 == 0 structures
/// (which admit a 4-dimensional symmetry group and no canonical phase) are
/// given the phi = 0 section instead of an error. Used by the reduced
/// Einstein machinery, which covers the tau^2 = 1/2 vacuum case.
pub fn ts_k1_coframe_with<T: Real>(
    c: &OrientedCongruence<T>,
    point: &[T],
    order: usize,
    allow_a1_zero: bool,
) -> InvResult<K1Coframe<T>> {
    let tj = ts_jets(c, point, order)?;
    let sf = &tj.bp.sf;
    let pf = &tj.bp.pf;

    let k1v = tj.k1.value();
    let scale = pf.lam.scale_mag().max(pf.mu.scale_mag());
    if k1v.norm() <= T::of(POINT_TOL) * scale {
        return Err(InvError::BranchMismatch("k1 vanishes at this point".into()));
    }
    if tj.k2.value().norm() > T::of(POINT_TOL) * k1v.norm().max(scale) {
        return Err(InvError::BranchMismatch(format!(
            "k2 = {:.3e} does not vanish at this point",
            tj.k2.value().norm().to_f64().unwrap_or(f64::NAN)
        )));
    }
    let sign = if k1v.re > T::zero() { 1 } else { -1 };

    // W = (log(|k1|/a))_mu + b ; the section phi = Arg W makes A1 real and
    // positive. The normalization A1 = |W| / (2 sqrt|k1|) is the one under
    // which dw = i w1^w1b + 2 A1 (w1 + w1b)^w and dA1 obeys the
    // integrability table; it is pinned by the Bianchi VI_h/IV values.
    let abs_k1 = tj.k1.abs_real();
    let log_ratio = abs_k1.div(&sf.a)?.log()?;
    let w_jet = &pf.d_mu(&log_ratio)? + &sf.b;
    let sqrt_k1 = abs_k1.sqrt()?;
    let a1_is_zero = w_jet.value().norm() <= T::of(POINT_TOL);
    if a1_is_zero && !allow_a1_zero {
        return Err(InvError::A1Zero);
    }
    let (a1_jet, mut e_iphi) = if a1_is_zero {
        let one = JetScalar::constant(cr(1.0), w_jet.dim(), w_jet.order());
        (w_jet.div(&sqrt_k1)?.scale(cr(0.5)), one)
    } else {
        let abs_w = w_jet.modulus()?;
        (abs_w.div(&sqrt_k1)?.scale(cr(0.5)), w_jet.div(&abs_w)?)
    };
    if a1_is_zero {
        // A1 == 0 leaves a constant phase free; rotate the section so that
        // B1 is purely imaginary with positive imaginary part, continuous
        // with the homogeneous families where B1 = i tau
        let probe = build_k1_frame(&tj, &sqrt_k1, &abs_k1, &e_iphi)?;
        let b1_probe = probe.sigma_coefs[0];
        if b1_probe.norm() > T::of(POINT_TOL) {
            let target = b1_probe.arg() - T::FRAC_PI_2();
            e_iphi = JetScalar::constant(
                C::new(target.cos(), target.sin()),
                e_iphi.dim(),
                e_iphi.order(),
            );
        }
    }

    let mut frame = build_k1_frame(&tj, &sqrt_k1, &abs_k1, &e_iphi)?;
    frame.a1 = a1_jet;
    frame.sign = sign;
    Ok(frame)
}

/// The coframe, Sigma and its decomposition for one choice of section.
fn build_k1_frame<T: Real>(
    tj: &TsJets<T>,
    sqrt_k1: &JetScalar<T>,
    abs_k1: &JetScalar<T>,
    e_iphi: &JetScalar<T>,
) -> InvResult<K1Coframe<T>> {
    let sf = &tj.bp.sf;
    let pf = &tj.bp.pf;
    let cof = CoframeM {
        w: pf.lam.scale_jet(&abs_k1.div(&sf.a)?),
        w1: pf.mu.scale_jet(&sqrt_k1.mul(e_iphi)),
        w1b: pf.mubar.scale_jet(&sqrt_k1.mul(&e_iphi.conj())),
    };

    // Sigma = pullback of (Omega - conj Omega) / 2i
    let dlog_rho = d_scalar(&abs_k1.log()?.scale(cr(0.5)), 3)?;
    let phi_jet = e_iphi.arg()?;
    let dphi = d_scalar(&phi_jet, 3)?;
    let c_mu = &(&sf.p.conj() + &sf.b) - &tj.la_mu;
    let omega_m = dlog_rho
        .add(&dphi.scale_jet(&i_like(&phi_jet)))
        .add(&pf.mu.scale_jet(&c_mu))
        .sub(&pf.mubar.scale_jet(&sf.p))
        .sub(&pf.lam.scale_jet(&sf.q));
    let sigma = omega_m.sub(&omega_m.conj()).scale_jet(&JetScalar::constant(
        C::new(T::zero(), T::of(-0.5)),
        phi_jet.dim(),
        phi_jet.order(),
    ));

    let sig_coefs = cof.decompose_one(&sigma)?;
    let b1_jet = sig_coefs[0].clone();
    let a1 = JetScalar::zero(3, b1_jet.order());
    Ok(K1Coframe {
        cof,
        a1,
        b1: b1_jet,
        sigma,
        sigma_coefs: [
            sig_coefs[0].value(),
            sig_coefs[1].value(),
            sig_coefs[2].value(),
        ],
        sign: 0,
    })
}

pub fn ts_reduce_k1_branch<T: Real>(
    c: &OrientedCongruence<T>,
    point: &[T],
    order: usize,
) -> InvResult<TsReducedK1<T>> {
    let k1c = ts_k1_coframe(c, point, order)?;
    let mut residuals = Residuals::default();
    let (cof, a1_jet, b1_jet, sigma, sign) = (k1c.cof, k1c.a1, k1c.b1, k1c.sigma, k1c.sign);
    let a1 = a1_jet.value();
    let b1 = b1_jet.value();
    residuals.push("systek:B1conj", rel_diff(k1c.sigma_coefs[1], b1.conj()));
    residuals.push(
        "systek:B0",
        k1c.sigma_coefs[2].norm() / b1.norm().max(T::one()),
    );

    // (systek)
    let dw = exterior_d(&cof.w)?;
    let w1pw1b = cof.w1.add(&cof.w1b);
    let rhs = wedge(&cof.w1, &cof.w1b)
        .scale_jet(&i_like(&a1_jet))
        .add(&wedge(&w1pw1b, &cof.w).scale_jet(&a1_jet.scale(cr(2.0))));
    residuals.push("systek:dw", two_form_residual(&dw, &rhs));

    let dw1 = exterior_d(&cof.w1)?;
    let coef = -&(&a1_jet + &b1_jet.conj().scale(im()));
    let rhs = wedge(&cof.w1, &cof.w1b).scale_jet(&coef);
    residuals.push("systek:dw1", two_form_residual(&dw1, &rhs));

    // (systekk): d Sigma = -(sign) i w1 ^ w1b
    let dsigma = exterior_d(&sigma)?;
    let rhs = wedge(&cof.w1, &cof.w1b).scale_jet(&i_like(&a1_jet).scale(cr(-(sign as f64))));
    residuals.push("systekk", two_form_residual(&dsigma, &rhs));

    // (itg): decompositions of dA1 and dB1 on the invariant coframe
    let mut derived = BTreeMap::new();
    let da1 = cof.decompose_one(&d_scalar(&a1_jet, 3)?)?;
    // slot1 = a11 + (i/2) A1 (B1 + conj B1); slot2 = a11 - (i/2) A1 (...)
    let ib_sum = a1 * (b1 + b1.conj()) * C::new(T::zero(), T::of(0.5));
    let a11 = da1[0].value() - ib_sum;
    derived.insert("a11".to_string(), a11);
    residuals.push("itg:a11_imag", a11.im.abs() / a11.norm().max(T::one()));
    residuals.push("itg:dA1_conj_slot", rel_diff(da1[1].value(), a11 - ib_sum));
    residuals.push(
        "itg:dA1_w_slot",
        da1[2].value().norm() / a1.norm().max(T::one()),
    );

    let db1 = cof.decompose_one(&d_scalar(&b1_jet, 3)?)?;
    let b11 = db1[0].value();
    derived.insert("B11".to_string(), b11);
    // slot2 = b12 + (1/2) A1 (conj B1 - B1) + i(sign/2 - |B1|^2)
    let half_term = a1 * (b1.conj() - b1) * cr::<T>(0.5);
    let i_term = im::<T>() * (cr::<T>(sign as f64 / 2.0) - C::new(b1.norm_sqr(), T::zero()));
    let b12 = db1[1].value() - half_term - i_term;
    derived.insert("b12".to_string(), b12);
    residuals.push("itg:b12_imag", b12.im.abs() / b12.norm().max(T::one()));
    residuals.push(
        "itg:dB1_w_slot",
        db1[2].value().norm() / b1.norm().max(T::one()),
    );

    Ok(TsReducedK1 {
        a1,
        b1,
        sign,
        derived,
        residuals,
    })
}

/// Result of the K2 != 0 reduction: the normalization K2 = 1 fixes both
/// fiber coordinates, and the basic scalar invariants are (Z0, Z1, Z2, K1).
#[derive(Debug, Clone)]
pub struct TsReducedK2<T: Real> {
    pub z0: C<T>,
    pub z1: C<T>,
    pub z2: C<T>,
    pub big_k1: C<T>,
    pub derived: BTreeMap<String, C<T>>,
    pub residuals: Residuals,
}

pub fn ts_reduce_k2_branch<T: Real>(
    c: &OrientedCongruence<T>,
    point: &[T],
    order: usize,
) -> InvResult<TsReducedK2<T>> {
    let tj = ts_jets(c, point, order)?;
    let sf = &tj.bp.sf;
    let pf = &tj.bp.pf;
    let mut residuals = Residuals::default();

    let scale = pf.lam.scale_mag().max(pf.mu.scale_mag());
    if tj.k2.value().norm() <= T::of(POINT_TOL) * scale {
        return Err(InvError::BranchMismatch("k2 vanishes at this point".into()));
    }

    // rho = |k2|^{1/3}, e^{i phi} = k2 / |k2|
    let abs_k2 = tj.k2.modulus()?;
    let rho = abs_k2.powf(T::of(1.0 / 3.0))?;
    let e_iphi = tj.k2.div(&abs_k2)?;
    let big_k1_jet = tj.k1.div(&abs_k2.powf(T::of(2.0 / 3.0))?)?;

    let cof = CoframeM {
        w: pf.lam.scale_jet(&rho.mul(&rho).div(&sf.a)?),
        w1: pf.mu.scale_jet(&rho.mul(&e_iphi)),
        w1b: pf.mubar.scale_jet(&rho.mul(&e_iphi.conj())),
    };

    // pulled-back Omega decomposed on the invariant coframe:
    // Omega = Z1 w1 + Z2 w1b + Z0 w
    let dlog_rho = d_scalar(&abs_k2.log()?.scale(cr(1.0 / 3.0)), 3)?;
    let phi_jet = e_iphi.arg()?;
    let dphi = d_scalar(&phi_jet, 3)?;
    let c_mu = &(&sf.p.conj() + &sf.b) - &tj.la_mu;
    let omega_m = dlog_rho
        .add(&dphi.scale_jet(&i_like(&phi_jet)))
        .add(&pf.mu.scale_jet(&c_mu))
        .sub(&pf.mubar.scale_jet(&sf.p))
        .sub(&pf.lam.scale_jet(&sf.q));
    let zc = cof.decompose_one(&omega_m)?;
    let (z1_jet, z2_jet, z0_jet) = (zc[0].clone(), zc[1].clone(), zc[2].clone());
    let (z0, z1, z2) = (z0_jet.value(), z1_jet.value(), z2_jet.value());
    let k1v = big_k1_jet.value();

    // (szy)
    let dw = exterior_d(&cof.w)?;
    let rhs = wedge(&cof.w1, &cof.w1b)
        .scale_jet(&i_like(&z0_jet))
        .add(&wedge(&cof.w1, &cof.w).scale_jet(&(&z1_jet + &z2_jet.conj())))
        .add(&wedge(&cof.w1b, &cof.w).scale_jet(&(&z2_jet + &z1_jet.conj())));
    residuals.push("szy:dw", two_form_residual(&dw, &rhs));

    let dw1 = exterior_d(&cof.w1)?;
    let rhs = wedge(&cof.w1, &cof.w1b)
        .scale_jet(&-&z2_jet)
        .add(&wedge(&cof.w1, &cof.w).scale_jet(&-&z0_jet));
    residuals.push("szy:dw1", two_form_residual(&dw1, &rhs));

    // (szy1): higher-order coefficients and their redundancy checks
    let mut derived = BTreeMap::new();
    let dz0 = cof.decompose_one(&d_scalar(&z0_jet, 3)?)?;
    let (z01, z02, z00) = (dz0[0].value(), dz0[1].value(), dz0[2].value());
    derived.insert("Z01".into(), z01);
    derived.insert("Z02".into(), z02);
    derived.insert("Z00".into(), z00);

    let dz2 = cof.decompose_one(&d_scalar(&z2_jet, 3)?)?;
    let (z21, z22) = (dz2[0].value(), dz2[1].value());
    derived.insert("Z21".into(), z21);
    derived.insert("Z22".into(), z22);
    let expect = z02 + z0 * z1.conj() + z0 * z2 - z0.conj() * z2;
    residuals.push("szy1:dZ2_w_slot", rel_diff(dz2[2].value(), expect));

    let dz1 = cof.decompose_one(&d_scalar(&z1_jet, 3)?)?;
    let z11 = dz1[0].value();
    derived.insert("Z11".into(), z11);
    let expect = -k1v + im::<T>() * z0 - z1 * z2 + z2 * z2.conj() + z21;
    residuals.push("szy1:dZ1_w1b_slot", rel_diff(dz1[1].value(), expect));
    let expect = z0 * z2.conj() + z01 - cr::<T>(1.0);
    residuals.push("szy1:dZ1_w_slot", rel_diff(dz1[2].value(), expect));

    let dk1 = cof.decompose_one(&d_scalar(&big_k1_jet, 3)?)?;
    let k11 = dk1[0].value();
    derived.insert("K11".into(), k11);
    residuals.push("szy1:dK1_conj_slot", rel_diff(dk1[1].value(), k11.conj()));
    let k10 = dk1[2].value();
    derived.insert("K10".into(), k10);
    residuals.push("szy1:K10_imag", k10.im.abs() / k10.norm().max(T::one()));
    residuals.push("szy:K1_imag", k1v.im.abs() / k1v.norm().max(T::one()));

    Ok(TsReducedK2 {
        z0,
        z1,
        z2,
        big_k1: k1v,
        derived,
        residuals,
    })
}

/// Gaussian curvature of the leaf metric 2 e^{-2(A+t)} w1 w1b of the
/// K1-branch Riemann surface, in the local normal form where the structure
/// is rigid with data (A(x,y), h(x,y)); returns it together with the
/// predicted -(sign) e^{2(A+t)}.
pub fn gauss_curvature_check<T: Real>(
    a_expr: &Expr,
    h_expr: &Expr,
    upper_sign: bool,
    t: T,
    point: &[T; 2],
) -> InvResult<(T, T)> {
    let names = vec!["x".to_string(), "y".to_string()];
    let params = BTreeMap::new();
    let ctx = EvalCtx::new(&names, &params);
    let h = eval_jet(h_expr, &ctx, point, 3)?;
    let a = eval_jet(a_expr, &ctx, point, 3)?;
    // leaf metric E (dx^2 + dy^2) with E = 2 e^{-2t} e^{-h};
    // kappa = -(1/(2E)) Laplacian(log E)
    let log_e = &const_like(2.0f64.ln() - 2.0 * t.to_f64().unwrap(), &h) - &h;
    let e = log_e.exp();
    let lap = &log_e.partial(0)?.partial(0)? + &log_e.partial(1)?.partial(1)?;
    let kappa = -(lap.div(&e)?.scale(cr(0.5)).value().re);
    let sgn = if upper_sign { -1.0 } else { 1.0 };
    let expected = T::of(sgn) * ((a.value().re + t) * T::of(2.0)).exp();
    Ok((kappa, expected))
}

/// Residuals of the Liouville-type characterization of the K1-branch:
/// |h_{z zb} +- e^{2A} e^{-h}| and |H_{z zb} - e^{-h}| at a point.
pub fn liouville_residual<T: Real>(
    a_expr: &Expr,
    h_expr: &Expr,
    big_h_expr: &Expr,
    upper_sign: bool,
    point: &[T; 2],
) -> InvResult<(T, T)> {
    let names = vec!["x".to_string(), "y".to_string()];
    let params = BTreeMap::new();
    let ctx = EvalCtx::new(&names, &params);
    let wirtinger_lap = |e: &Expr| -> InvResult<C<T>> {
        let j = eval_jet(e, &ctx, point, 2)?;
        let xx = j.partial(0)?.partial(0)?;
        let yy = j.partial(1)?.partial(1)?;
        Ok((&xx + &yy).scale(cr(0.25)).value())
    };
    let h_zzb = wirtinger_lap(h_expr)?;
    let bigh_zzb = wirtinger_lap(big_h_expr)?;
    let a = eval_jet(a_expr, &ctx, point, 0)?.value();
    let h = eval_jet(h_expr, &ctx, point, 0)?.value();
    let forcing = (a * cr::<T>(2.0) - h).exp();
    let sgn = cr::<T>(if upper_sign { 1.0 } else { -1.0 });
    let r1 = (h_zzb + sgn * forcing).norm();
    let r2 = (bigh_zzb - (-h).exp()).norm();
    Ok((r1, r2))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::congruence::heisenberg;
    use crate::expr::parse;
    use crate::forms::{Chart, OneForm, ScalarField};

    pub(crate) fn eps_family(e1: f64, e2: f64) -> OrientedCongruence<f64> {
        let mut params = BTreeMap::new();
        params.insert("e1".to_string(), e1);
        params.insert("e2".to_string(), e2);
        OrientedCongruence {
            chart: Chart::new(
                &["u", "x", "y"],
                &[(-1.0, 1.0), (-1.2, 1.2), (-1.1, 1.1)],
                "x^2 + y^2 > 0.1",
                13,
            ),
            lambda: OneForm::from_exprs(&["1", "-2*y", "2*x"]),
            mu: OneForm::from_exprs(&["e2", "e1 + 2*i*e2*x", "i*e1 + 2*i*e2*y"]),
            params,
        }
    }

    #[test]
    fn heisenberg_k1_k2_vanish() {
        let h = heisenberg();
        for pt in h.sample_points(4).unwrap() {
            let inv = ts_invariants(&h, &pt, 6, 1.0, 0.0).unwrap();
            assert!(inv.k1.norm() < 1e-9, "k1 = {:?}", inv.k1);
            assert!(inv.k2.norm() < 1e-9, "k2 = {:?}", inv.k2);
            assert!(inv.residuals.max() < 1e-8, "{:?}", inv.residuals);
        }
    }

    #[test]
    fn epsilon_family_k1_formula() {
        // K1 = 8 e2^2 / (rho^2 |2 e2 z + i e1|^4), K2 = 0
        for (e1, e2) in [(0.0, 1.0), (1.0, 1.0), (0.5, -0.8)] {
            let c = eps_family(e1, e2);
            for pt in c.sample_points(4).unwrap() {
                let rho = 1.3;
                let inv = ts_invariants(&c, &pt, 6, rho, 0.7).unwrap();
                let (x, y) = (pt[1], pt[2]);
                let denom = {
                    let re = 2.0 * e2 * x;
                    let im = 2.0 * e2 * y + e1;
                    (re * re + im * im).powi(2)
                };
                let expect = 8.0 * e2 * e2 / (rho * rho * denom);
                assert!(
                    (inv.big_k1.re - expect).abs() / expect.abs() < 1e-8,
                    "K1 {} vs {}",
                    inv.big_k1.re,
                    expect
                );
                assert!(inv.big_k2.norm() < 1e-9);
                assert!(inv.k1_imag_rel < 1e-9);
                assert!(inv.residuals.max() < 1e-8, "{:?}", inv.residuals);
            }
        }
    }

    #[test]
    fn epsilon_family_a1_vanishes() {
        let c = eps_family(0.0, 1.0);
        let pts = c.sample_points(3).unwrap();
        match ts_reduce_k1_branch(&c, &pts[0], 7) {
            Err(InvError::A1Zero) => {}
            other => panic!("expected A1Zero, got {other:?}"),
        }
    }

    pub(crate) fn bianchi_vih(tau: f64, upper: bool) -> OrientedCongruence<f64> {
        let b = if upper {
            -2.0 * (1.0 - 2.0 * tau * tau)
        } else {
            -2.0 * (1.0 + 2.0 * tau * tau)
        };
        let mut params = BTreeMap::new();
        params.insert("b".to_string(), b);
        OrientedCongruence {
            chart: Chart::new(
                &["u", "x", "y"],
                &[(-1.0, 1.0), (-1.0, 1.0), (0.4, 2.0)],
                "y > 0.3",
                17,
            ),
            lambda: OneForm {
                comps: vec![
                    ScalarField::parse("exp(b*log(y))"),
                    ScalarField::parse("-1/y"),
                    ScalarField::zero(),
                ],
            },
            mu: OneForm::from_exprs(&["0", "1/y", "i/y"]),
            params,
        }
    }

    #[test]
    fn bianchi_vih_a1_b1() {
        // A1 = -(-+1 + 2 tau^2)/(2 tau) > 0, B1 = i tau
        for (tau, upper) in [(-0.5f64, false), (-1.2, false), (0.3, true), (-0.9, true)] {
            let c = bianchi_vih(tau, upper);
            let expect_a1 = if upper {
                -(-1.0 + 2.0 * tau * tau) / (2.0 * tau)
            } else {
                -(1.0 + 2.0 * tau * tau) / (2.0 * tau)
            };
            assert!(expect_a1 > 0.0, "test case must have A1 > 0");
            for pt in c.sample_points(3).unwrap() {
                let red = ts_reduce_k1_branch(&c, &pt, 7).unwrap();
                assert!(
                    (red.a1.re - expect_a1).abs() / expect_a1 < 1e-7,
                    "A1 {} vs {} (tau {tau}, upper {upper})",
                    red.a1.re,
                    expect_a1
                );
                assert!(red.a1.im.abs() < 1e-8);
                let expect_b1 = C::new(0.0, tau);
                assert!((red.b1 - expect_b1).norm() < 1e-7, "B1 {:?}", red.b1);
                assert!(red.residuals.max() < 1e-7, "{:?}", red.residuals);
                // constant invariants: higher-order coefficients vanish
                assert!(red.derived["a11"].norm() < 1e-6);
                assert!(red.derived["b12"].norm() < 1e-6);
            }
        }
    }

    #[test]
    fn bianchi_iv_a1_b1() {
        // lambda = y^-1 (du + log y dx), mu = y^-1(dx + i dy): A1 = 1/2, B1 = i/2
        let c = OrientedCongruence::<f64> {
            chart: Chart::new(
                &["u", "x", "y"],
                &[(-1.0, 1.0), (-1.0, 1.0), (0.4, 2.2)],
                "y > 0.3",
                19,
            ),
            lambda: OneForm::from_exprs(&["1/y", "log(y)/y", "0"]),
            mu: OneForm::from_exprs(&["0", "1/y", "i/y"]),
            params: BTreeMap::new(),
        };
        for pt in c.sample_points(3).unwrap() {
            let red = ts_reduce_k1_branch(&c, &pt, 7).unwrap();
            assert!((red.a1 - C::new(0.5, 0.0)).norm() < 1e-7, "A1 {:?}", red.a1);
            assert!((red.b1 - C::new(0.0, 0.5)).norm() < 1e-7, "B1 {:?}", red.b1);
            assert!(red.residuals.max() < 1e-7, "{:?}", red.residuals);
        }
    }

    pub(crate) fn beta_family(beta: f64) -> OrientedCongruence<f64> {
        let mut params = BTreeMap::new();
        params.insert("bt".to_string(), beta);
        let d = "((x^2 + y^2) - 2*bt^2*(2 + bt^3))";
        let lam_dz = format!("(2*bt*exp(-i*bt*u) + i*(x - i*y))/(bt*{d})");
        let lam_x = format!("({lam_dz}) + conj({lam_dz})");
        let lam_y = format!("i*(({lam_dz}) - conj({lam_dz}))");
        let mu_dz = format!("-2*bt^2*exp(-i*bt*u)/{d}");
        OrientedCongruence {
            chart: Chart::new(
                &["u", "x", "y"],
                &[(-1.0, 1.0), (-1.3, 1.3), (-1.3, 1.3)],
                "",
                23,
            ),
            lambda: OneForm {
                comps: vec![
                    ScalarField::parse("1"),
                    ScalarField::parse(&lam_x),
                    ScalarField::parse(&lam_y),
                ],
            },
            mu: OneForm {
                comps: vec![
                    ScalarField::zero(),
                    ScalarField::parse(&mu_dz),
                    ScalarField::parse(&format!("i*({mu_dz})")),
                ],
            },
            params,
        }
    }

    #[test]
    fn beta_family_k2_branch_invariants() {
        // K1 = (beta^3+3)/beta^2, Z1 = -2i/beta, Z2 = -i/beta, Z0 = -i beta
        for beta in [-1.0f64, -(2.0f64.cbrt()), 0.5] {
            let c = beta_family(beta);
            for pt in c.sample_points(3).unwrap() {
                let red = ts_reduce_k2_branch(&c, &pt, 7).unwrap();
                let expect_k1 = (beta.powi(3) + 3.0) / (beta * beta);
                assert!(
                    (red.big_k1.re - expect_k1).abs() / expect_k1.abs().max(1.0) < 1e-7,
                    "K1 {:?} vs {} at beta {}",
                    red.big_k1,
                    expect_k1,
                    beta
                );
                assert!(
                    (red.z1 - C::new(0.0, -2.0 / beta)).norm() < 1e-7,
                    "Z1 {:?}",
                    red.z1
                );
                assert!(
                    (red.z2 - C::new(0.0, -1.0 / beta)).norm() < 1e-7,
                    "Z2 {:?}",
                    red.z2
                );
                assert!(
                    (red.z0 - C::new(0.0, -beta)).norm() < 1e-7,
                    "Z0 {:?}",
                    red.z0
                );
                assert!(red.residuals.max() < 1e-7, "{:?}", red.residuals);
            }
        }
        // K1 vanishes at beta_K = -3^{1/3}
        let c = beta_family(-(3.0f64.cbrt()));
        let pts = c.sample_points(2).unwrap();
        let red = ts_reduce_k2_branch(&c, &pts[0], 7).unwrap();
        assert!(red.big_k1.norm() < 1e-8, "K1(beta_K) = {:?}", red.big_k1);
    }

    #[test]
    fn poincare_and_sphere_flat_models() {
        // lambda-+ = du + (x dy - y dx)/(1 -+ (x^2+y^2)/2), mu = dz
        for (upper, expect_positive) in [(true, true), (false, false)] {
            let denom = if upper {
                "(1 - (x^2 + y^2)/2)"
            } else {
                "(1 + (x^2 + y^2)/2)"
            };
            let c = OrientedCongruence::<f64> {
                chart: Chart::new(
                    &["u", "x", "y"],
                    &[(-1.0, 1.0), (-0.7, 0.7), (-0.7, 0.7)],
                    "x^2 + y^2 > 0.04 & x^2 + y^2 < 1.2",
                    29,
                ),
                lambda: OneForm {
                    comps: vec![
                        ScalarField::parse("1"),
                        ScalarField::parse(&format!("-y/{denom}")),
                        ScalarField::parse(&format!("x/{denom}")),
                    ],
                },
                mu: OneForm::from_exprs(&["0", "1", "i"]),
                params: BTreeMap::new(),
            };
            for pt in c.sample_points(3).unwrap() {
                let tj = ts_jets(&c, &pt, 6).unwrap();
                let k1 = tj.k1.value();
                assert!(tj.k2.value().norm() < 1e-9 * k1.norm().max(1.0));
                assert_eq!(k1.re > 0.0, expect_positive, "K1 sign, upper={upper}");
                // A1 == 0: the flat models of this subtree
                match ts_reduce_k1_branch(&c, &pt, 7) {
                    Err(InvError::A1Zero) => {}
                    other => panic!("expected A1Zero for taub structures, got {other:?}"),
                }
            }
        }
    }

    #[test]
    fn gauss_curvature_of_flat_models() {
        // spherical structure (lower sign): kappa = +1; disc (upper): -1
        let a0 = parse("0").unwrap();
        let h_up = parse("2*log(1 - (x^2 + y^2)/2)").unwrap();
        let h_lo = parse("2*log(1 + (x^2 + y^2)/2)").unwrap();
        for (h, upper, expect) in [(h_up, true, -1.0), (h_lo, false, 1.0)] {
            for pt in [[0.3f64, 0.2], [-0.4, 0.5], [0.1, -0.6]] {
                let (kappa, pred) = gauss_curvature_check(&a0, &h, upper, 0.0, &pt).unwrap();
                assert!((kappa - expect).abs() < 1e-9, "kappa {kappa} vs {expect}");
                assert!((pred - expect).abs() < 1e-12);
                // t-shift: kappa scales by e^{2t}
                let (kappa_t, pred_t) = gauss_curvature_check(&a0, &h, upper, 0.35, &pt).unwrap();
                assert!((kappa_t - pred_t).abs() < 1e-8);
                assert!((kappa_t / kappa - (0.7f64).exp()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn liouville_system_solutions() {
        let a0 = parse("0").unwrap();
        let h_up = parse("2*log(1 - (x^2 + y^2)/2)").unwrap();
        let bigh_up = parse("-2*log(1 - (x^2 + y^2)/2)").unwrap();
        let h_lo = parse("2*log(1 + (x^2 + y^2)/2)").unwrap();
        let bigh_lo = parse("2*log(1 + (x^2 + y^2)/2)").unwrap();
        for pt in [[0.25f64, -0.3], [0.5, 0.1]] {
            let (r1, r2) = liouville_residual(&a0, &h_up, &bigh_up, true, &pt).unwrap();
            assert!(r1 < 1e-9 && r2 < 1e-9, "upper: {r1} {r2}");
            let (r1, r2) = liouville_residual(&a0, &h_lo, &bigh_lo, false, &pt).unwrap();
            assert!(r1 < 1e-9 && r2 < 1e-9, "lower: {r1} {r2}");
            // perturbed h is detected
            let h_bad = parse("2*log(1 - (x^2 + y^2)/2) + 0.1").unwrap();
            let (r1, _) = liouville_residual(&a0, &h_bad, &bigh_up, true, &pt).unwrap();
            assert!(r1 > 1e-3);
        }
    }

    #[test]
    fn rigid_structure_k1_formula() {
        // H = z zb + (z zb)^2/4: rho^2 K1 = [log H_{z zb}]_{z zb} = 1/(1+|z|^2)^2
        let c = OrientedCongruence::<f64> {
            chart: Chart::new(
                &["u", "x", "y"],
                &[(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)],
                "x^2 + y^2 > 0.05",
                31,
            ),
            lambda: OneForm {
                comps: vec![
                    ScalarField::parse("1"),
                    ScalarField::parse("-y*(1 + (x^2 + y^2)/2)"),
                    ScalarField::parse("x*(1 + (x^2 + y^2)/2)"),
                ],
            },
            mu: OneForm::from_exprs(&["0", "1", "i"]),
            params: BTreeMap::new(),
        };
        for pt in c.sample_points(4).unwrap() {
            let inv = ts_invariants(&c, &pt, 6, 1.0, 0.0).unwrap();
            let r2 = pt[1] * pt[1] + pt[2] * pt[2];
            let expect = 1.0 / (1.0 + r2).powi(2);
            assert!(
                (inv.k1.re - expect).abs() / expect < 1e-8,
                "k1 {} vs {}",
                inv.k1.re,
                expect
            );
            assert!(inv.k2.norm() < 1e-9);
        }
    }
}
