//! Shear-only branch (a == 0, s != 0): the invariant T0 and relative
//! invariants T1, K0, K1 on the 4-dimensional bundle, plus the five
//! sub-branch reductions to M selected by the vanishing pattern of
//! (t1, k1, k0).

use super::{
    branch_point, i_like, rel_diff, two_form_residual, BranchPoint, CoframeM, InvError, InvResult,
    Residuals,
};
use crate::congruence::OrientedCongruence;
use crate::forms::{d_scalar, exterior_d, wedge, OneFormJet};
use crate::jet::JetScalar;
use crate::scalar::{cr, im, Real, C};
use std::collections::BTreeMap;

const POINT_TOL: f64 = 1e-7;

/// Invariants of the shear-only branch on the bundle P = M x R_+,
/// reported at fiber value rho: T1 = t1/rho, K0 = k0/(2 rho^2),
/// K1 = k1/(2 rho). T0 is a function on M.
#[derive(Debug, Clone)]
pub struct StInvariants<T: Real> {
    pub t0: T,
    pub t1: C<T>,
    pub k0: T,
    pub k1: C<T>,
    pub rho: T,
    pub epsilon: u8,
    pub t0_imag_rel: T,
    pub k0_imag_rel: T,
    pub residuals: Residuals,
}

pub struct StJets<T: Real> {
    pub bp: BranchPoint<T>,
    pub psi: JetScalar<T>,
    pub abs_s: JetScalar<T>,
    pub t0: JetScalar<T>,
    pub t1: JetScalar<T>,
    pub k0: JetScalar<T>,
    pub k1: JetScalar<T>,
    pub epsilon: u8,
}

fn check_shear_only<T: Real>(bp: &BranchPoint<T>) -> InvResult<()> {
    let scale = bp.pf.lam.scale_mag().max(bp.pf.mu.scale_mag());
    if bp.sf.a.value().norm() > T::of(POINT_TOL) * scale {
        return Err(InvError::BranchMismatch(format!(
            "twist a = {:.3e} is not zero at this point",
            bp.sf.a.value().norm().to_f64().unwrap_or(f64::NAN)
        )));
    }
    if bp.sf.s.value().norm() <= T::of(POINT_TOL) * scale {
        return Err(InvError::BranchMismatch(
            "shear s vanishes at this point".into(),
        ));
    }
    Ok(())
}

/// e^{-i(psi - eps*pi)/2} as a jet: the phase of the normalized omega1.
fn half_phase<T: Real>(psi: &JetScalar<T>, epsilon: u8) -> JetScalar<T> {
    let base = psi.scale(C::new(T::zero(), T::of(-0.5))).exp();
    if epsilon == 0 {
        base
    } else {
        base.scale(C::new(T::zero(), T::one())) // e^{i pi / 2} = i
    }
}

/// The closed forms (to)/(wwn) for T0, t1, k0, k1 at a point.
pub fn st_jets<T: Real>(
    c: &OrientedCongruence<T>,
    point: &[T],
    order: usize,
    epsilon: u8,
) -> InvResult<StJets<T>> {
    let bp = branch_point(c, point, order)?;
    check_shear_only(&bp)?;
    let sf = &bp.sf;
    let pf = &bp.pf;
    let sgn = if epsilon == 0 { 1.0 } else { -1.0 };

    let psi = sf.s.arg()?;
    let abs_s = sf.s.modulus()?;

    // T0 = e^{i eps pi} (psi_lam + i(qbar - q)) / (2|s|)
    let psi_lam = pf.d_lam(&psi)?;
    let t0 = (&psi_lam + &(&sf.q.conj() - &sf.q).scale(im()))
        .div(&abs_s)?
        .scale(cr(0.5 * sgn));

    // t1 = (b|s| + |s|_mu) e^{i(psi - eps pi)/2} / |s|
    let abs_s_mu = pf.d_mu(&abs_s)?;
    let conj_half = half_phase(&psi, epsilon).conj(); // e^{+i(psi - eps pi)/2}
    let t1 = (&sf.b.mul(&abs_s) + &abs_s_mu)
        .mul(&conj_half)
        .div(&abs_s)?;

    // k0 = -psi_{mu mub} - psi_{mub mu} + p psi_mu + pbar psi_mub
    //      + 2i (p_mu - pbar_mub)
    let psi_mu = pf.d_mu(&psi)?;
    let psi_mub = pf.d_mubar(&psi)?;
    let psi_mumub = pf.d_mubar(&psi_mu)?;
    let psi_mubmu = pf.d_mu(&psi_mub)?;
    let p_mu = pf.d_mu(&sf.p)?;
    let pbar_mub = pf.d_mubar(&sf.p.conj())?;
    let k0 = &(&(&-&(&psi_mumub + &psi_mubmu) + &sf.p.mul(&psi_mu)) + &sf.p.conj().mul(&psi_mub))
        + &(&p_mu - &pbar_mub).scale(C::new(T::zero(), T::of(2.0)));

    // k1 = 2(t1 - conj t1) + e^{i eps pi/2} [(b qbar - b q - q_mu + qbar_mu
    //      + i q psi_mu - i psi_{mu lam}) e^{i psi/2}
    //      + i psi_mub |s| e^{-i psi/2}] / |s|
    let q_mu = pf.d_mu(&sf.q)?;
    let qbar_mu = pf.d_mu(&sf.q.conj())?;
    let psi_mulam = pf.d_lam(&psi_mu)?;
    let br1 = &(&(&(&(&sf.b.mul(&sf.q.conj()) - &sf.b.mul(&sf.q)) - &q_mu) + &qbar_mu)
        + &sf.q.mul(&psi_mu).scale(im()))
        - &psi_mulam.scale(im());
    let e_iphalf = psi.scale(C::new(T::zero(), T::of(0.5))).exp();
    let inner = &br1.mul(&e_iphalf) + &psi_mub.mul(&abs_s).mul(&e_iphalf.recip()?).scale(im());
    let eps_half = if epsilon == 0 {
        cr::<T>(1.0)
    } else {
        im::<T>()
    };
    let k1 = &(&t1 - &t1.conj()).scale(cr(2.0)) + &inner.div(&abs_s)?.scale(eps_half);

    Ok(StJets {
        bp,
        psi,
        abs_s,
        t0,
        t1,
        k0,
        k1,
        epsilon,
    })
}

/// Invariants at one point with the (systey) residuals, verified on the
/// bundle with rho promoted to a jet variable.
pub fn st_invariants<T: Real>(
    c: &OrientedCongruence<T>,
    point: &[T],
    order: usize,
    rho: T,
    epsilon: u8,
) -> InvResult<StInvariants<T>> {
    let sj = st_jets(c, point, order, epsilon)?;
    let mut residuals = Residuals::default();
    verify_systey(&sj, rho, &mut residuals)?;
    let t0 = sj.t0.value();
    let k0 = sj.k0.value();
    Ok(StInvariants {
        t0: t0.re,
        t1: sj.t1.value(),
        k0: k0.re,
        k1: sj.k1.value(),
        rho,
        epsilon,
        t0_imag_rel: t0.im.abs() / t0.norm().max(T::one()),
        k0_imag_rel: k0.im.abs() / k0.norm().max(T::one()),
        residuals,
    })
}

/// The normalized coframe (n771) on P with rho as jet variable 3, and the
/// residuals of the structural system (systey).
fn verify_systey<T: Real>(sj: &StJets<T>, rho: T, out: &mut Residuals) -> InvResult<()> {
    let pf = &sj.bp.pf;
    let sf = &sj.bp.sf;
    let order = sf.a.order();
    let up = |j: &JetScalar<T>| j.truncate(order).promote(4, &[0, 1, 2]).unwrap();
    let ext = |f: &OneFormJet<T>| -> OneFormJet<T> {
        let mut v: Vec<JetScalar<T>> = f.comps.iter().map(&up).collect();
        v.push(JetScalar::zero(4, order));
        OneFormJet { comps: v }
    };
    let sgn = if sj.epsilon == 0 { 1.0 } else { -1.0 };

    let rho_j = JetScalar::variable(3, C::new(rho, T::zero()), 4, order)?;
    let lam4 = ext(&pf.lam);
    let mu4 = ext(&pf.mu);

    let w = lam4.scale_jet(&up(&sj.abs_s).scale(cr(sgn)));
    let phase = up(&half_phase(&sj.psi, sj.epsilon));
    let w1 = mu4.scale_jet(&rho_j.mul(&phase));
    let w1b = w1.conj();

    // Omega = d log rho + c1 w1 + c2 w1b + c0 w
    let psi_mu = up(&pf.d_mu(&sj.psi)?);
    let psi_mub = psi_mu.conj();
    let two_rho = rho_j.scale(cr(2.0));
    let c1 = (&psi_mu.scale(im()) - &up(&sf.p.conj()).scale(cr(2.0)))
        .mul(&phase.recip()?)
        .div(&two_rho)?;
    let c2 = (&psi_mub.scale(-im::<T>()) - &up(&sf.p).scale(cr(2.0)))
        .mul(&phase)
        .div(&two_rho)?;
    let q_sum = &up(&sf.q) + &up(&sf.q.conj());
    let c0 = &JetScalar::constant(cr(1.0), 4, order)
        - &q_sum.div(&up(&sj.abs_s).scale(cr(2.0)))?.scale(cr(sgn));
    let mut omega = w1
        .scale_jet(&c1)
        .add(&w1b.scale_jet(&c2))
        .add(&w.scale_jet(&c0));
    omega.comps[3] = &omega.comps[3] + &rho_j.recip()?;

    let dw = exterior_d(&w)?;
    let dw1 = exterior_d(&w1)?;
    let domega = exterior_d(&omega)?;

    let t1_big = up(&sj.t1).div(&rho_j)?;
    let rhs_dw = wedge(&w1, &w)
        .scale_jet(&t1_big)
        .add(&wedge(&w1b, &w).scale_jet(&t1_big.conj()));
    out.push("systey:dw", two_form_residual(&dw, &rhs_dw));

    let t0_big = up(&sj.t0);
    let rhs_dw1 = wedge(&omega, &w1)
        .add(&wedge(&w1.add(&w1b), &w))
        .add(&wedge(&w1, &w).scale_jet(&t0_big.scale(im())));
    out.push("systey:dw1", two_form_residual(&dw1, &rhs_dw1));

    let k0_big = up(&sj.k0).div(&rho_j.mul(&rho_j).scale(cr(2.0)))?;
    let k1_big = up(&sj.k1).div(&rho_j.scale(cr(2.0)))?;
    let rhs_domega = wedge(&w1, &w1b)
        .scale_jet(&k0_big.scale(im()))
        .add(&wedge(&w1, &w).scale_jet(&k1_big))
        .add(&wedge(&w1b, &w).scale_jet(&k1_big.conj()));
    out.push("systey:dOmega", two_form_residual(&domega, &rhs_domega));
    Ok(())
}

/// Vanishing pattern of the relative invariants (t1, k1, k0), sampled.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct StPattern {
    pub t1_zero: bool,
    pub k1_zero: bool,
    pub k0_zero: bool,
}

pub fn st_zero_pattern<T: Real>(
    c: &OrientedCongruence<T>,
    n_points: usize,
    tol: f64,
) -> InvResult<StPattern> {
    let pts = c.sample_points(n_points.max(8))?;
    let mut max_t1 = T::zero();
    let mut max_k1 = T::zero();
    let mut max_k0 = T::zero();
    let mut scale = T::zero();
    for pt in &pts {
        let sj = st_jets(c, pt, 5, 0)?;
        max_t1 = max_t1.max(sj.t1.value().norm());
        max_k1 = max_k1.max(sj.k1.value().norm());
        max_k0 = max_k0.max(sj.k0.value().norm());
        scale = scale
            .max(sj.bp.pf.lam.scale_mag())
            .max(sj.bp.pf.mu.scale_mag());
    }
    let cut = T::of(tol) * scale;
    let decide = |v: T, what: &'static str| -> InvResult<bool> {
        if v > cut && v < cut * T::of(100.0) {
            return Err(InvError::AmbiguousVariant {
                what,
                value: v.to_f64().unwrap_or(f64::NAN),
                tol: cut.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(v <= cut)
    };
    Ok(StPattern {
        t1_zero: decide(max_t1, "t1")?,
        k1_zero: decide(max_k1, "k1")?,
        k0_zero: decide(max_k0, "k0")?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum StVariant {
    K0Norm,
    K1Circle,
    K1Pm1,
    T1Circle,
    T1Pm1,
}

/// Scalar invariants on M after the variant's normalization of rho.
#[derive(Debug, Clone)]
pub struct StReduced<T: Real> {
    pub variant: StVariant,
    pub a: T,
    pub b: T,
    pub c: T,
    pub t0: T,
    /// gamma for the K1 variants, delta for the T1 variants, 0 otherwise.
    pub angle: T,
    pub k0: T,
    /// sign(k0) for K0Norm, the sign of K1 (resp. T1) for the Pm1 variants.
    pub sign: i32,
    pub derived: BTreeMap<String, C<T>>,
    pub residuals: Residuals,
}

pub fn st_reduce<T: Real>(
    c: &OrientedCongruence<T>,
    point: &[T],
    order: usize,
) -> InvResult<StReduced<T>> {
    let pattern = st_zero_pattern(
        c,
        crate::congruence::CLASSIFY_POINTS,
        crate::congruence::CLASSIFY_TOL,
    )?;
    st_reduce_at(c, point, order, pattern)
}

pub fn st_reduce_at<T: Real>(
    c: &OrientedCongruence<T>,
    point: &[T],
    order: usize,
    pattern: StPattern,
) -> InvResult<StReduced<T>> {
    let sj = st_jets(c, point, order, 0)?;
    let mut residuals = Residuals::default();
    let mut derived = BTreeMap::new();

    // select the variant and its rho normalization
    let (variant, rho, sign, angle): (StVariant, JetScalar<T>, i32, T) = if !pattern.t1_zero {
        let abs_t1 = sj.t1.modulus()?;
        let delta = sj.t1.value().arg();
        let on_axis = delta.sin().abs() < T::of(1e-7);
        let variant = if on_axis {
            StVariant::T1Pm1
        } else {
            StVariant::T1Circle
        };
        let sgn = if delta.cos() > T::zero() { 1 } else { -1 };
        (variant, abs_t1, sgn, delta)
    } else if !pattern.k1_zero {
        let abs_k1 = sj.k1.modulus()?;
        let gamma = sj.k1.value().arg();
        let on_axis = gamma.sin().abs() < T::of(1e-7);
        let variant = if on_axis {
            StVariant::K1Pm1
        } else {
            StVariant::K1Circle
        };
        let sgn = if gamma.cos() > T::zero() { 1 } else { -1 };
        (variant, abs_k1.scale(cr(0.5)), sgn, gamma)
    } else if !pattern.k0_zero {
        let sgn = if sj.k0.value().re > T::zero() { 1 } else { -1 };
        let rho = sj.k0.real_part().abs_real().scale(cr(0.5)).sqrt()?;
        (StVariant::K0Norm, rho, sgn, T::zero())
    } else {
        return Err(InvError::BranchMismatch(
            "all relative invariants t1, k1, k0 vanish identically; the \
             structure is in the 4-symmetric family and admits no further \
             reduction"
                .into(),
        ));
    };

    // coframe on M at the normalized rho
    let pf = &sj.bp.pf;
    let phase = half_phase(&sj.psi, 0);
    let cof = CoframeM {
        w: pf.lam.scale_jet(&sj.abs_s),
        w1: pf.mu.scale_jet(&rho.mul(&phase)),
        w1b: pf.mubar.scale_jet(&rho.mul(&phase.conj())),
    };

    // decompose d omega1 to read off A, B, C, T0
    let dw1 = exterior_d(&cof.w1)?;
    let co = cof.decompose_two(&dw1)?;
    let slot1 = co[0].clone(); // iB - A
    let a_jet = -&slot1.real_part();
    let b_jet = slot1.imag_part();
    let a = a_jet.value().re;
    let b = b_jet.value().re;
    let (c_val, c_jet, t0) = match variant {
        StVariant::K0Norm => {
            // slot2 = i T0
            residuals.push(
                "ssy:dw1_w1w_real",
                co[1].value().re.abs() / co[1].value().norm().max(T::one()),
            );
            let t0 = co[1].value().im;
            (
                T::zero(),
                JetScalar::constant(cr(0.0), slot1.dim(), slot1.order()),
                t0,
            )
        }
        _ => {
            // slot2 = 1 - C + i T0
            let c_jet =
                &JetScalar::constant(cr(1.0), co[1].dim(), co[1].order()) - &co[1].real_part();
            (c_jet.value().re, c_jet, co[1].value().im)
        }
    };
    residuals.push("ssy:dw1_w1bw", rel_diff(co[2].value(), cr(1.0)));
    residuals.push(
        "ssy:T0_match",
        (t0 - sj.t0.value().re).abs() / t0.abs().max(T::one()),
    );

    // d omega check
    let dw = exterior_d(&cof.w)?;
    match variant {
        StVariant::T1Circle | StVariant::T1Pm1 => {
            let e_id = sj.t1.div(&sj.t1.modulus()?)?;
            let rhs = wedge(&cof.w1, &cof.w)
                .scale_jet(&e_id)
                .add(&wedge(&cof.w1b, &cof.w).scale_jet(&e_id.conj()));
            residuals.push("ssy45:dw", two_form_residual(&dw, &rhs));
        }
        _ => {
            let scale = wedge(&cof.w1, &cof.w).value_norm().max(T::one());
            residuals.push("ssy:dw_zero", dw.value_norm() / scale);
        }
    }

    // fourth equation and integrability tables per variant
    let k0_val = sj.k0.value().re;
    match variant {
        StVariant::K0Norm => {
            // d[(A+iB)w1 + (A-iB)w1b + w] = ±i w1^w1b
            let apib = &a_jet + &b_jet.scale(im());
            let four = cof
                .w1
                .scale_jet(&apib)
                .add(&cof.w1b.scale_jet(&apib.conj()))
                .add(&cof.w);
            let d4 = exterior_d(&four)?;
            let rhs = wedge(&cof.w1, &cof.w1b).scale_jet(&i_like(&a_jet).scale(cr(sign as f64)));
            residuals.push("ssy:fourth", two_form_residual(&d4, &rhs));

            // (ssyp)
            let db = cof.decompose_one(&d_scalar(&b_jet, 3)?)?;
            let b1 = db[0].value();
            derived.insert("B1".into(), b1);
            residuals.push("ssyp:dB_conj", rel_diff(db[1].value(), b1.conj()));
            let expect = C::new(a * t0 - b, T::zero());
            residuals.push("ssyp:dB_w", rel_diff(db[2].value(), expect));
            let da = cof.decompose_one(&d_scalar(&a_jet, 3)?)?;
            let a1 = da[0].value().re;
            derived.insert("A1".into(), C::new(a1, T::zero()));
            let expect_im = (b1 + b1.conj() + cr(sign as f64)) * C::new(T::zero(), T::of(0.5));
            residuals.push(
                "ssyp:dA_imag",
                (da[0].value().im - expect_im.im).abs() / expect_im.norm().max(T::one()),
            );
            let expect = C::new(a - b * t0, T::zero());
            residuals.push("ssyp:dA_w", rel_diff(da[2].value(), expect));
            // dT0 ^ w = 0: the w1, w1b components of dT0 vanish
            let t0_jet = co[1].imag_part();
            let dt0 = cof.decompose_one(&d_scalar(&t0_jet, 3)?)?;
            residuals.push(
                "ssyp:dT0_wedge_w",
                (dt0[0].value().norm() + dt0[1].value().norm()) / T::one().max(t0.abs()),
            );
        }
        StVariant::K1Circle | StVariant::K1Pm1 => {
            let big_k0 = k0_val * T::of(2.0) / sj.k1.value().norm_sqr();
            derived.insert("K0".into(), C::new(big_k0, T::zero()));
            let e_ig = sj.k1.div(&sj.k1.modulus()?)?;
            let apib = &a_jet + &b_jet.scale(im());
            let four = cof
                .w1
                .scale_jet(&apib)
                .add(&cof.w1b.scale_jet(&apib.conj()))
                .add(&cof.w.scale_jet(&c_jet));
            let d4 = exterior_d(&four)?;
            let big_k0_jet = sj
                .k0
                .real_part()
                .scale(cr(2.0))
                .div(&sj.k1.mul(&sj.k1.conj()))?;
            let rhs = wedge(&cof.w1, &cof.w1b)
                .scale_jet(&big_k0_jet.scale(im()))
                .add(&wedge(&cof.w1, &cof.w).scale_jet(&e_ig))
                .add(&wedge(&cof.w1b, &cof.w).scale_jet(&e_ig.conj()));
            residuals.push("ssy1:fourth", two_form_residual(&d4, &rhs));

            // integrability: (ssy2) off the axis, (ssy2p) on it
            let t0_jet = co[1].imag_part();
            let dt0 = cof.decompose_one(&d_scalar(&t0_jet, 3)?)?;
            let da = cof.decompose_one(&d_scalar(&a_jet, 3)?)?;
            let db = cof.decompose_one(&d_scalar(&b_jet, 3)?)?;
            let dc = cof.decompose_one(&d_scalar(&c_jet, 3)?)?;
            let dk0 = cof.decompose_one(&d_scalar(&big_k0_jet, 3)?)?;
            let a0 = da[2].value().re;
            let b0 = db[2].value().re;
            derived.insert("A0".into(), C::new(a0, T::zero()));
            derived.insert("B0".into(), C::new(b0, T::zero()));
            derived.insert("C0".into(), dc[2].value());
            derived.insert("T00".into(), dt0[2].value());
            derived.insert("K01".into(), dk0[0].value());
            if variant == StVariant::K1Pm1 {
                residuals.push("ssy2p:A_zero", a.abs());
                // dT0 = ±i(w1 - w1b) + T00 w
                let si = C::new(T::zero(), T::of(sign as f64));
                residuals.push("ssy2p:dT0_w1", rel_diff(dt0[0].value(), si));
                residuals.push("ssy2p:dT0_w1b", rel_diff(dt0[1].value(), -si));
                // dB slot1 = -K0/2 + i B1
                let b1 = db[0].value().im;
                derived.insert("B1".into(), C::new(b1, T::zero()));
                residuals.push(
                    "ssy2p:dB_re",
                    (db[0].value().re + T::of(0.5) * big_k0).abs() / T::one().max(big_k0.abs()),
                );
                // dC slot1 = B T0 + i(B C + B0) ± 1
                let expect = C::new(b * t0 + T::of(sign as f64), b * c_val + b0);
                residuals.push("ssy2p:dC_w1", rel_diff(dc[0].value(), expect));
                // dK0 w-slot = 2(∓B + (1 - C) K0)
                let expect = T::of(2.0) * (-T::of(sign as f64) * b + (T::one() - c_val) * big_k0);
                residuals.push(
                    "ssy2p:dK0_w",
                    (dk0[2].value().re - expect).abs() / expect.abs().max(T::one()),
                );
            } else {
                let gamma = angle;
                // dT0 = i(e^{i gamma} w1 - e^{-i gamma} w1b) + T00 w
                let eig = C::new(gamma.cos(), gamma.sin());
                residuals.push("ssy2:dT0_w1", rel_diff(dt0[0].value(), im::<T>() * eig));
                residuals.push(
                    "ssy2:dT0_w1b",
                    rel_diff(dt0[1].value(), -(im::<T>() * eig.conj())),
                );
                // dA slot1 = (1/2)[i(K0/2 + A1) + A2]
                let a2 = da[0].value().re * T::of(2.0);
                let a1 = da[0].value().im * T::of(2.0) - big_k0 * T::of(0.5);
                derived.insert("A1".into(), C::new(a1, T::zero()));
                derived.insert("A2".into(), C::new(a2, T::zero()));
                // dB slot1 = (1/2)[-K0/2 + A1 + i B1]: cross-check of A1
                let b1 = db[0].value().im * T::of(2.0);
                derived.insert("B1".into(), C::new(b1, T::zero()));
                let expect_re = (a1 - big_k0 * T::of(0.5)) * T::of(0.5);
                residuals.push(
                    "ssy2:dB_re_matches_A1",
                    (db[0].value().re - expect_re).abs() / expect_re.abs().max(T::one()),
                );
                // dC slot1 = -2A + AC + A0 + B T0 + i(BC - A T0 + B0) + e^{i gamma}
                let expect = C::new(
                    -T::of(2.0) * a + a * c_val + a0 + b * t0,
                    b * c_val - a * t0 + b0,
                ) + eig;
                residuals.push("ssy2:dC_w1", rel_diff(dc[0].value(), expect));
                // d gamma slot1 = B + (A + gamma1) cot gamma + i gamma1
                let gamma_jet = sj.k1.arg()?;
                let dgamma = cof.decompose_one(&d_scalar(&gamma_jet, 3)?)?;
                let gamma1 = dgamma[0].value().im;
                derived.insert("gamma1".into(), C::new(gamma1, T::zero()));
                derived.insert("gamma0".into(), dgamma[2].value());
                let cot = gamma.cos() / gamma.sin();
                let expect = b + (a + gamma1) * cot;
                residuals.push(
                    "ssy2:dgamma_re",
                    (dgamma[0].value().re - expect).abs() / expect.abs().max(T::one()),
                );
                // dK0 w-slot = 2[(A + gamma1) csc gamma + (1 - C) K0]
                let expect =
                    T::of(2.0) * ((a + gamma1) / gamma.sin() + (T::one() - c_val) * big_k0);
                residuals.push(
                    "ssy2:dK0_w",
                    (dk0[2].value().re - expect).abs() / expect.abs().max(T::one()),
                );
            }
        }
        StVariant::T1Circle | StVariant::T1Pm1 => {
            let t0_jet = co[1].imag_part();
            let dt0 = cof.decompose_one(&d_scalar(&t0_jet, 3)?)?;
            let da = cof.decompose_one(&d_scalar(&a_jet, 3)?)?;
            let a0 = da[2].value().re;
            derived.insert("A0".into(), C::new(a0, T::zero()));
            derived.insert("T00".into(), dt0[2].value());
            // the w1/w1b slots of dT0 are conjugate in both displayed systems
            residuals.push(
                "ssy46:dT0_conj",
                rel_diff(dt0[0].value(), dt0[1].value().conj()),
            );
            if variant == StVariant::T1Pm1 {
                residuals.push("ssy47:B_zero", b.abs());
                // dT0 slot1 = (∓1 - A) T0 + i(2A - AC - A0 + C1 ± C)
                let s = T::of(sign as f64);
                let c1 = (dt0[0].value() - C::new((-s - a) * t0, T::zero())) * (-im::<T>())
                    - C::new(T::of(2.0) * a - a * c_val - a0 + s * c_val, T::zero());
                derived.insert("C1".into(), c1);
            } else {
                let delta = angle;
                let db = cof.decompose_one(&d_scalar(&b_jet, 3)?)?;
                let b0 = db[2].value().re;
                derived.insert("B0".into(), C::new(b0, T::zero()));
                // d delta slot1 = delta1 + i((B - delta1) cot delta - A)
                let delta_jet = sj.t1.arg()?;
                let ddelta = cof.decompose_one(&d_scalar(&delta_jet, 3)?)?;
                let delta1 = ddelta[0].value().re;
                derived.insert("delta1".into(), C::new(delta1, T::zero()));
                derived.insert("delta0".into(), ddelta[2].value());
                let cot = delta.cos() / delta.sin();
                let expect = (b - delta1) * cot - a;
                residuals.push(
                    "ssy46:ddelta_im",
                    (ddelta[0].value().im - expect).abs() / expect.abs().max(T::one()),
                );
                // C1 from the displayed dT0 ^ w identity
                let eid = C::new(delta.cos(), delta.sin());
                let x = b0 + b * c_val - a * t0 + T::of(2.0) * delta.sin();
                let y = T::of(2.0) * a - a * c_val - b * t0 - a0;
                let c1 = (dt0[0].value() - C::new(x, T::zero()) + eid * C::new(t0, -c_val))
                    * (-im::<T>())
                    - C::new(y, T::zero());
                derived.insert("C1".into(), c1);
            }
        }
    }

    Ok(StReduced {
        variant,
        a,
        b,
        c: c_val,
        t0,
        angle,
        k0: k0_val,
        sign,
        derived,
        residuals,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::forms::{Chart, OneForm, ScalarField};

    /// The one-parameter family with a strictly 4-dimensional transitive
    /// symmetry group: T0 = alpha, all relative invariants zero.
    pub(crate) fn st_4sym(alpha: f64) -> OrientedCongruence<f64> {
        let mut params = BTreeMap::new();
        params.insert("al".to_string(), alpha);
        let chart = Chart::new(
            &["u", "x", "y"],
            &[(-0.8, 0.8), (-1.0, 1.0), (-1.0, 1.0)],
            "",
            37,
        );
        if alpha < 1.0 {
            let root = "sqrt(1 - al^2)";
            OrientedCongruence {
                chart,
                lambda: OneForm::from_exprs(&["1", "0", "0"]),
                mu: OneForm {
                    comps: vec![
                        ScalarField::zero(),
                        ScalarField::parse("1"),
                        ScalarField::parse(&format!("exp(2*u*{root})*(al + i*{root})")),
                    ],
                },
                params,
            }
        } else if alpha == 1.0 {
            OrientedCongruence {
                chart,
                lambda: OneForm::from_exprs(&["1", "0", "0"]),
                mu: OneForm::from_exprs(&["0", "1", "i + 2*u"]),
                params,
            }
        } else {
            let root = "sqrt(al^2 - 1)";
            let mu_x = format!("(i + al)*cos(u*{root}) - i*{root}*sin(u*{root})");
            let mu_y = format!("(i + al)*sin(u*{root}) + i*{root}*cos(u*{root})");
            OrientedCongruence {
                chart,
                lambda: OneForm::from_exprs(&["1", "0", "0"]),
                mu: OneForm {
                    comps: vec![
                        ScalarField::zero(),
                        ScalarField::parse(&mu_x),
                        ScalarField::parse(&mu_y),
                    ],
                },
                params,
            }
        }
    }

    #[test]
    fn four_symmetric_family_t0_equals_alpha() {
        for alpha in [0.0, 0.5, 1.0, 2.0] {
            let c = st_4sym(alpha);
            for pt in c.sample_points(4).unwrap() {
                let inv = st_invariants(&c, &pt, 6, 1.2, 0).unwrap();
                assert!(
                    (inv.t0.abs() - alpha).abs() < 1e-9,
                    "T0 {} vs alpha {alpha}",
                    inv.t0
                );
                assert!(inv.t1.norm() < 1e-9, "t1 {:?}", inv.t1);
                assert!(inv.k0.abs() < 1e-8, "k0 {}", inv.k0);
                assert!(inv.k1.norm() < 1e-8, "k1 {:?}", inv.k1);
                assert!(inv.residuals.max() < 1e-8, "{:?}", inv.residuals);
                assert!(inv.t0_imag_rel < 1e-10);
            }
        }
    }

    #[test]
    fn epsilon_flip_is_immaterial() {
        let c = st_4sym(0.7);
        for pt in c.sample_points(3).unwrap() {
            let inv0 = st_invariants(&c, &pt, 6, 1.0, 0).unwrap();
            let inv1 = st_invariants(&c, &pt, 6, 1.0, 1).unwrap();
            assert!((inv0.t0.abs() - inv1.t0.abs()).abs() < 1e-10);
            assert_eq!(inv0.t1.norm() < 1e-9, inv1.t1.norm() < 1e-9);
            assert_eq!(inv0.k0.abs() < 1e-8, inv1.k0.abs() < 1e-8);
            assert_eq!(inv0.k1.norm() < 1e-8, inv1.k1.norm() < 1e-8);
            assert!(inv1.residuals.max() < 1e-8, "{:?}", inv1.residuals);
        }
    }

    /// Section 8.2.1 example: lambda = du, mu = dx + i e^{2(u+f)} dy.
    pub(crate) fn st_h0(fxy: &str) -> OrientedCongruence<f64> {
        OrientedCongruence {
            chart: Chart::new(
                &["u", "x", "y"],
                &[(-0.7, 0.7), (-0.9, 0.9), (-0.9, 0.9)],
                "",
                41,
            ),
            lambda: OneForm::from_exprs(&["1", "0", "0"]),
            mu: OneForm {
                comps: vec![
                    ScalarField::zero(),
                    ScalarField::parse("1"),
                    ScalarField::parse(&format!("i*exp(2*(u + ({fxy})))")),
                ],
            },
            params: BTreeMap::new(),
        }
    }

    #[test]
    fn h0_example_k0_formula() {
        // f = xy: k0 = -2 e^{-2(u+f)} f_xy with T0 = T1 = K1 = 0
        let c = st_h0("x*y");
        for pt in c.sample_points(4).unwrap() {
            let inv = st_invariants(&c, &pt, 6, 1.4, 0).unwrap();
            let expect_k0 = -2.0 * (-2.0 * (pt[0] + pt[1] * pt[2])).exp();
            assert!(
                (inv.k0 - expect_k0).abs() / expect_k0.abs() < 1e-9,
                "k0 {} vs {}",
                inv.k0,
                expect_k0
            );
            assert!(inv.t0.abs() < 1e-9);
            assert!(inv.t1.norm() < 1e-9);
            assert!(inv.k1.norm() < 1e-8);
            assert!(inv.residuals.max() < 1e-8, "{:?}", inv.residuals);
        }
    }

    #[test]
    fn h0_example_k0norm_reduction() {
        // A = (y/2) e^{u+f}, B = (x/2) e^{-(u+f)} for f = xy (K0 = -1 sheet)
        let c = st_h0("x*y");
        let pattern = st_zero_pattern(&c, 16, 1e-8).unwrap();
        assert!(pattern.t1_zero && pattern.k1_zero && !pattern.k0_zero);
        for pt in c.sample_points(4).unwrap() {
            let red = st_reduce_at(&c, &pt, 7, pattern).unwrap();
            assert_eq!(red.variant, StVariant::K0Norm);
            assert_eq!(red.sign, -1);
            let f = pt[1] * pt[2];
            let expect_a = 0.5 * pt[2] * (pt[0] + f).exp();
            let expect_b = 0.5 * pt[1] * (-(pt[0] + f)).exp();
            assert!(
                (red.a - expect_a).abs() / expect_a.abs().max(1.0) < 1e-7,
                "A {} vs {}",
                red.a,
                expect_a
            );
            assert!(
                (red.b - expect_b).abs() / expect_b.abs().max(1.0) < 1e-7,
                "B {} vs {}",
                red.b,
                expect_b
            );
            assert!(red.t0.abs() < 1e-8);
            assert!(red.residuals.max() < 1e-7, "{:?}", red.residuals);
        }
    }

    #[test]
    fn k0norm_homogeneous_obstruction() {
        // constant A, B, T0 forces dB = 0 hence B1 = 0, but then the
        // imaginary part of the dA slot is (2 Re B1 ± 1)/2 = ±1/2 != 0
        let b1 = C::new(0.0, 0.0); // forced by dB = 0
        let min_residual = ((b1 + b1.conj() + C::new(1.0, 0.0)) * C::new(0.0, 0.5)).norm();
        assert!(
            min_residual >= 0.4,
            "the (ssyp) obstruction is at least 1/2"
        );
    }

    /// Left-invariant coframe realizing the homogeneous T1 = ±1 system:
    /// lambda = e^{2p} dq, mu = dp + (1/2) e^{2p} dq + i e^{-2p} dr.
    pub(crate) fn st_ssy49() -> OrientedCongruence<f64> {
        OrientedCongruence {
            chart: Chart::new(
                &["p", "q", "r"],
                &[(-0.5, 0.5), (-1.0, 1.0), (-1.0, 1.0)],
                "",
                43,
            ),
            lambda: OneForm::from_exprs(&["0", "exp(2*p)", "0"]),
            mu: OneForm::from_exprs(&["1", "exp(2*p)/2", "i*exp(-2*p)"]),
            params: BTreeMap::new(),
        }
    }

    #[test]
    fn ssy49_homogeneous_t1pm1() {
        let c = st_ssy49();
        let pattern = st_zero_pattern(&c, 16, 1e-8).unwrap();
        assert!(!pattern.t1_zero, "t1 must be nonzero for this structure");
        for pt in c.sample_points(3).unwrap() {
            let red = st_reduce_at(&c, &pt, 7, pattern).unwrap();
            assert_eq!(red.variant, StVariant::T1Pm1, "angle {}", red.angle);
            assert!((red.a.abs() - 1.0).abs() < 1e-7, "|A| = 1, got {}", red.a);
            assert!(red.b.abs() < 1e-8, "B = 0, got {}", red.b);
            assert!((red.c - 1.0).abs() < 1e-7, "C = 1, got {}", red.c);
            assert!(red.t0.abs() < 1e-8, "T0 = 0, got {}", red.t0);
            assert_eq!(red.a.signum() as i32, -red.sign, "A = -sign(T1)");
            assert!(red.residuals.max() < 1e-7, "{:?}", red.residuals);
        }
    }
}
