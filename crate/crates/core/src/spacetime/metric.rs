//! 4-dimensional Lorentzian metrics given by a null coframe and constant
//! coframe-metric coefficients, plus the constructors for the metric
//! families studied by the curvature suite.

use crate::congruence::OrientedCongruence;
use crate::expr::{parse, EvalCtx};
use crate::forms::{Chart, FormsError, FormsResult, OneForm, OneFormJet, ScalarField};
use crate::invariants::ts::ts_jets;
use crate::jet::{JetMatrix, JetScalar};
use crate::scalar::{cr, im, Real, C};
use std::collections::BTreeMap;
use std::sync::Arc;

/// g = eta_ij theta^i theta^j over a 4-chart. All metrics in the catalog
/// use the off-diagonal pairing eta = 2(theta^1 theta^2 + theta^3 theta^4)
/// with theta^2 = conj theta^1 and theta^3, theta^4 real.
#[derive(Debug, Clone)]
pub struct Metric4<T: Real> {
    pub chart: Chart,
    pub coframe: Vec<OneForm<T>>,
    pub eta: [[f64; 4]; 4],
    pub params: BTreeMap<String, T>,
}

/// The standard null pairing 2(theta^1 theta^2 + theta^3 theta^4).
pub fn eta_null_pair() -> [[f64; 4]; 4] {
    let mut e = [[0.0; 4]; 4];
    e[0][1] = 1.0;
    e[1][0] = 1.0;
    e[2][3] = 1.0;
    e[3][2] = 1.0;
    e
}

/// Coframe and coordinate metric evaluated at one point.
pub struct MetricJets<T: Real> {
    pub theta: Vec<OneFormJet<T>>,
    pub g: JetMatrix<T>,
    pub ginv: JetMatrix<T>,
}

impl<T: Real> Metric4<T> {
    pub fn ctx(&self) -> EvalCtx<'_, T> {
        EvalCtx::new(&self.chart.names, &self.params).with_guard(crate::congruence::DENOM_GUARD)
    }

    pub fn eval(&self, point: &[T], order: usize) -> FormsResult<MetricJets<T>> {
        let ctx = self.ctx();
        let theta = self
            .coframe
            .iter()
            .map(|f| f.eval(&ctx, point, order))
            .collect::<FormsResult<Vec<_>>>()?;
        let g = JetMatrix::from_fn(4, 4, |mu, nu| {
            let mut acc = JetScalar::zero(4, order);
            for (i, ti) in theta.iter().enumerate() {
                for (j, tj) in theta.iter().enumerate() {
                    if self.eta[i][j] != 0.0 {
                        acc = &acc + &ti.comps[mu].mul(&tj.comps[nu]).scale(cr(self.eta[i][j]));
                    }
                }
            }
            acc
        });
        let ginv = g.inverse()?;
        Ok(MetricJets { theta, g, ginv })
    }

    /// Signature by eigenvalue count of the real symmetric constant part;
    /// also checks reality and symmetry.
    pub fn signature_check(&self, point: &[T]) -> FormsResult<()> {
        let mj = self.eval(point, 0)?;
        let mut m = [[0.0f64; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                let v = mj.g.at(r, c).value();
                if v.im.abs() > T::of(1e-9) * (v.norm() + T::one()) {
                    return Err(FormsError::Invalid(format!(
                        "metric component ({r},{c}) is not real: {:?}",
                        v.im.to_f64()
                    )));
                }
                m[r][c] = v.re.to_f64().unwrap_or(f64::NAN);
            }
        }
        for r in 0..4 {
            for c in (r + 1)..4 {
                if (m[r][c] - m[c][r]).abs() > 1e-9 * (m[r][c].abs() + 1.0) {
                    return Err(FormsError::Invalid("metric is not symmetric".into()));
                }
            }
        }
        let ev = sym_eigenvalues(m);
        let negatives = ev.iter().filter(|&&v| v < 0.0).count();
        if negatives != 1 || ev.iter().any(|&v| v.abs() < 1e-10) {
            return Err(FormsError::Invalid(format!(
                "signature is not Lorentzian: eigenvalues {ev:?}"
            )));
        }
        Ok(())
    }

    /// Admissible sample points (metric evaluable, Lorentzian).
    pub fn sample_points(&self, n: usize) -> FormsResult<Vec<Vec<T>>> {
        self.chart
            .sample_where(n, &self.params, |pt| self.signature_check(pt).is_ok())
    }
}

/// Eigenvalues of a real symmetric 4x4 matrix by cyclic Jacobi sweeps.
pub fn sym_eigenvalues(mut m: [[f64; 4]; 4]) -> [f64; 4] {
    for _ in 0..64 {
        let mut off = 0.0;
        for p in 0..4 {
            for q in (p + 1)..4 {
                off += m[p][q] * m[p][q];
            }
        }
        if off < 1e-26 {
            break;
        }
        for p in 0..4 {
            for q in (p + 1)..4 {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..4 {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..4 {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    [m[0][0], m[1][1], m[2][2], m[3][3]]
}

fn fmt(x: f64) -> String {
    format!("({x:.17e})")
}

/// The Kerr-family metric: a 2-parameter extension of Kerr/Schwarzschild/
/// Taub-NUT written over the twist-only congruence (lambda, mu = dz).
pub fn metric_kerr<T: Real>(m: f64, a: f64, big_m: f64, k: f64) -> Metric4<T> {
    let chart = Chart::new(
        &["u", "x", "y", "r"],
        &[(-1.0, 1.0), (-0.8, 0.8), (-0.8, 0.8), (1.5, 3.0)],
        "x^2 + y^2 > 0.05",
        71,
    );
    let mut params = BTreeMap::new();
    params.insert("m".to_string(), T::of(m));
    params.insert("a".to_string(), T::of(a));
    params.insert("bm".to_string(), T::of(big_m));
    params.insert("k".to_string(), T::of(k));

    let zz = "(x^2 + y^2)";
    let box_ = format!("(1 + k/2*{zz})");
    // lambda = du + B dz + conj(B) dzb, B = i(2 bm + (a+bm) z zb)/(z box^2)
    let b = format!("(i*(2*bm + (a + bm)*{zz})/((x + i*y)*{box_}^2))");
    let lam = [
        "1".to_string(),
        format!("({b}) + conj({b})"),
        format!("i*(({b}) - conj({b}))"),
        "0".to_string(),
    ];
    let p2 = format!("(r^2/{box_}^2 + (k*bm - a + (k*bm + a)*(k/2)*{zz})^2/{box_}^4)");
    let p = format!("sqrt({p2})");
    let w = format!("(i*k*a*(x - i*y)/{box_}^2)");
    let h = format!(
        "(-(k/2) + (m*r + k*bm^2 - a*bm*(1 - (k/2)*{zz})/(1 + (k/2)*{zz})) / \
         (r^2 + (k*bm - a + (k*bm + a)*(k/2)*{zz})^2/{box_}^2))"
    );
    let theta1 = OneForm::from_exprs(&["0", &p, &format!("i*({p})"), "0"]);
    let theta2 = OneForm::from_exprs(&["0", &p, &format!("-i*({p})"), "0"]);
    let theta3 = OneForm {
        comps: lam.iter().map(|s| ScalarField::parse(s)).collect(),
    };
    let t4x = format!("(({w}) + conj({w})) + ({h})*({})", lam[1]);
    let t4y = format!("(i*(({w}) - conj({w}))) + ({h})*({})", lam[2]);
    let theta4 = OneForm {
        comps: vec![
            ScalarField::parse(&h),
            ScalarField::parse(&t4x),
            ScalarField::parse(&t4y),
            ScalarField::parse("1"),
        ],
    };
    Metric4 {
        chart,
        coframe: vec![theta1, theta2, theta3, theta4],
        eta: eta_null_pair(),
        params,
    }
}

/// h(u) for the plane-wave family with constant alpha: a generic solution
/// of h'' + 2h' + alpha^2 h = 0. Single-mode solutions make theta^1
/// degenerate (the dz and dzb coefficients have equal modulus), so a
/// two-term combination is used.
fn pp_h_exprs(alpha: f64) -> (String, String) {
    if (alpha - 1.0).abs() < 1e-14 {
        // double root -1: h = e^{-u}(1 + u/2)
        (
            "(exp(-u)*(1 + u/2))".to_string(),
            "(exp(-u)*(-1/2 - u/2))".to_string(),
        )
    } else if alpha < 1.0 {
        let rp = -1.0 + (1.0 - alpha * alpha).sqrt();
        let rm = -1.0 - (1.0 - alpha * alpha).sqrt();
        let h = format!("(exp({}*u) + exp({}*u)/2)", fmt(rp), fmt(rm));
        let hp = format!(
            "({}*exp({}*u) + {}*exp({}*u)/2)",
            fmt(rp),
            fmt(rp),
            fmt(rm),
            fmt(rm)
        );
        (h, hp)
    } else {
        let b = (alpha * alpha - 1.0).sqrt();
        let rp = format!("(-1 + i*{})", fmt(b));
        let rm = format!("(-1 - i*{})", fmt(b));
        let h = format!("(exp({rp}*u) + exp({rm}*u)/2)");
        let hp = format!("({rp}*exp({rp}*u) + {rm}*exp({rm}*u)/2)");
        (h, hp)
    }
}

/// The plane-wave metrics g_c built from a shear-only structure with
/// curvature in the translation part:
/// g_c = 2 theta^1 theta^2 + 2 omega (Omega + c omega), realized as
/// 2 theta^1 theta^2 + 2 du (dr + c du), so that g_0 and g_{-1} are the
/// two connection-form metrics.
pub fn metric_pp<T: Real>(alpha: f64, c_wave: f64) -> Metric4<T> {
    let chart = Chart::new(
        &["u", "x", "y", "r"],
        &[(-0.8, 0.8), (-1.0, 1.0), (-1.0, 1.0), (-0.8, 0.8)],
        "",
        73,
    );
    let (h, hp) = pp_h_exprs(alpha);
    let al = fmt(alpha);
    // theta1 = e^r (h dz - (conj h' + conj h - i alpha conj h) dzb)
    let coef2 = format!("(conj({hp}) + conj({h}) - i*{al}*conj({h}))");
    let t1x = format!("exp(r)*(({h}) - ({coef2}))");
    let t1y = format!("exp(r)*i*(({h}) + ({coef2}))");
    let theta1 = OneForm::from_exprs(&["0", &t1x, &t1y, "0"]);
    let theta2 = OneForm::from_exprs(&["0", &format!("conj({t1x})"), &format!("conj({t1y})"), "0"]);
    let theta3 = OneForm::from_exprs(&["1", "0", "0", "0"]);
    let theta4 = OneForm::from_exprs(&[&fmt(c_wave), "0", "0", "1"]);
    Metric4 {
        chart,
        coframe: vec![theta1, theta2, theta3, theta4],
        eta: eta_null_pair(),
        params: BTreeMap::new(),
    }
}

/// The Ricci-flat conformal representative of g_{-1}: every coframe form
/// rescaled by e^{2u - r}/(t + e^{2u}).
pub fn metric_pp_hat<T: Real>(alpha: f64, t: f64) -> Metric4<T> {
    let base = metric_pp::<T>(alpha, -1.0);
    let phi = format!("(exp(2*u - r)/({} + exp(2*u)))", fmt(t));
    let rescale = |f: &OneForm<T>| OneForm {
        comps: f
            .comps
            .iter()
            .map(|c| match c {
                ScalarField::Expr(e) => ScalarField::parse(&format!("({phi})*({e})")),
                ScalarField::Custom(_) => unreachable!("pp coframe is expression-based"),
            })
            .collect(),
    };
    Metric4 {
        chart: base.chart.clone(),
        coframe: base.coframe.iter().map(rescale).collect(),
        eta: eta_null_pair(),
        params: BTreeMap::new(),
    }
}

/// The closed-form family g_t(beta) on the chart (u, x, y, r): the
/// twist-only circle-bundle metric of the beta-structures in the display
/// gauge 2 dz dzb + t lambda (x) (...).
pub fn metric_g_t_beta<T: Real>(beta: f64, t: f64) -> Metric4<T> {
    let chart = Chart::new(
        &["u", "x", "y", "r"],
        &[(-1.0, 1.0), (-1.2, 1.2), (-1.2, 1.2), (-1.0, 1.0)],
        "",
        83,
    );
    let bt = fmt(beta);
    let d = format!("((x^2 + y^2) - 2*{bt}^2*(2 + {bt}^3))");
    let theta1 = OneForm::from_exprs(&["0", "1", "i", "0"]);
    let theta2 = OneForm::from_exprs(&["0", "1", "-i", "0"]);
    // theta3 is the invariant omega = (D^2/(4 beta^4)) lambda, so that the
    // Bach components below come out in the coframe the displays use;
    // 2 theta3 theta4 = t lambda (x) (D^2/(2 beta^4))(2dr + ...)
    let lam_dz = format!("((2*{bt}*exp(-i*{bt}*u) + i*(x - i*y))/({bt}*{d}))");
    let scale3 = format!("(({d})^2/(4*{bt}^4))");
    let theta3 = OneForm::from_exprs(&[
        &scale3,
        &format!("({scale3})*(({lam_dz}) + conj({lam_dz}))"),
        &format!("({scale3})*i*(({lam_dz}) - conj({lam_dz}))"),
        "0",
    ]);
    let pref = fmt(t);
    let w_dz = format!("(2*({bt}*exp(-i*{bt}*u) - i*(x - i*y))/({d}))");
    let theta4 = OneForm::from_exprs(&[
        "0",
        &format!("({pref})*(({w_dz}) + conj({w_dz}))"),
        &format!("({pref})*i*(({w_dz}) - conj({w_dz}))"),
        &format!("2*({pref})"),
    ]);
    Metric4 {
        chart,
        coframe: vec![theta1, theta2, theta3, theta4],
        eta: eta_null_pair(),
        params: BTreeMap::new(),
    }
}

/// g_t built from a general twist-only structure on the 4-chart (the chart
/// of M plus the fiber angle as 4th variable), on the section rho = 1:
/// theta^1 = e^{i phi} mu, theta^3 = lambda/a,
/// theta^4 = t(2 dphi + 2 Im(z mu) - 2 Im(q) lambda),
/// z = 2 pbar + b - (log a)_mu.
pub fn metric_g_t_general<T: Real>(
    congruence: &OrientedCongruence<T>,
    t: f64,
    order: usize,
) -> FormsResult<Metric4<T>> {
    if t == 0.0 {
        return Err(FormsError::Invalid("g_t needs t != 0".into()));
    }
    let c = Arc::new(congruence.clone());
    let chart = Chart {
        names: {
            let mut n = congruence.chart.names.clone();
            n.push("phi".to_string());
            n
        },
        bounds: {
            let mut b = congruence.chart.bounds.clone();
            b.push((-1.2, 1.2));
            b
        },
        predicate: congruence.chart.predicate.clone(),
        seed: congruence.chart.seed ^ 0x5bd1e995,
    };

    // every component evaluates the structure data at the base 3-point and
    // promotes to 4 variables with phi as a jet variable
    let make = move |which: usize| -> ScalarField<T> {
        let c = c.clone();
        ScalarField::Custom(Arc::new(move |pt: &[T], ord: usize| {
            // the theta^4 components sit two derivative levels below the
            // input forms; evaluate deep enough and truncate afterwards
            let ord = ord.min(order);
            let work = (ord + 2).clamp(3, crate::jet::MAX_ORDER);
            let base = &pt[..3];
            let tj = ts_jets(&c, base, work)
                .map_err(|e| FormsError::Invalid(format!("g_t structure data: {e}")))?;
            let pf = &tj.bp.pf;
            let sf = &tj.bp.sf;
            let up = |j: &JetScalar<T>| j.promote(4, &[0, 1, 2]).unwrap();
            let phi = JetScalar::variable(3, C::new(pt[3], T::zero()), 4, work)?;
            let e_iphi = phi.scale(im()).exp();
            let (form, comp) = (which / 4, which % 4);
            let out = match form {
                0 => {
                    if comp == 3 {
                        JetScalar::zero(4, work)
                    } else {
                        up(&pf.mu.comps[comp]).mul(&e_iphi)
                    }
                }
                1 => {
                    if comp == 3 {
                        JetScalar::zero(4, work)
                    } else {
                        up(&pf.mu.comps[comp].conj()).mul(&e_iphi.conj())
                    }
                }
                2 => {
                    if comp == 3 {
                        JetScalar::zero(4, work)
                    } else {
                        up(&pf.lam.comps[comp].div(&sf.a)?)
                    }
                }
                _ => {
                    if comp == 3 {
                        JetScalar::constant(cr(2.0 * t), 4, work)
                    } else {
                        let zc = &(&sf.p.conj().scale(cr(2.0)) + &sf.b) - &tj.la_mu;
                        let zmu = zc.mul(&pf.mu.comps[comp]);
                        let qlam = sf.q.mul(&pf.lam.comps[comp]);
                        up(&(&zmu.imag_part() - &qlam.imag_part()).scale(cr(2.0 * t)))
                    }
                }
            };
            Ok(out.truncate(ord))
        }))
    };

    let coframe = (0..4)
        .map(|f| OneForm {
            comps: (0..4).map(|c| make(f * 4 + c)).collect(),
        })
        .collect();
    Ok(Metric4 {
        chart,
        coframe,
        eta: eta_null_pair(),
        params: congruence.params.clone(),
    })
}

/// Ansatz data for the reduced metrics over a twist-only structure with
/// K1 != 0, K2 == 0.
#[derive(Clone, Debug)]
pub struct ReducedAnsatz {
    /// c as an expression in the chart variables of the structure
    pub c_expr: String,
    pub m_re: f64,
    pub m_im: f64,
    /// p as an expression in the chart variables of the structure
    pub p_expr: String,
}

/// The reduced metric g = P^2[2 w1 w1b + 2 w(dr + W w1 + conj W w1b + H w)]
/// over the invariant coframe of `structure`, with the r-dependence of
/// (P, W, H) in closed form and (alpha, beta, phi, chi) derived from the
/// ansatz fields.
pub fn metric_reduced<T: Real>(
    structure: &OrientedCongruence<T>,
    ansatz: &ReducedAnsatz,
) -> FormsResult<Metric4<T>> {
    let chart = Chart {
        names: {
            let mut n = structure.chart.names.clone();
            n.push("r".to_string());
            n
        },
        bounds: {
            let mut b = structure.chart.bounds.clone();
            b.push((-1.1, 1.1));
            b
        },
        predicate: structure.chart.predicate.clone(),
        seed: structure.chart.seed ^ 0x1357_9bdf,
    };
    let c_e = parse(&ansatz.c_expr).map_err(|e| FormsError::Invalid(e.to_string()))?;
    let p_e = parse(&ansatz.p_expr).map_err(|e| FormsError::Invalid(e.to_string()))?;
    let m_const = (ansatz.m_re, ansatz.m_im);
    let shared = Arc::new((structure.clone(), c_e, p_e));

    let make = move |which: usize| -> ScalarField<T> {
        let sh = shared.clone();
        ScalarField::Custom(Arc::new(move |pt: &[T], ord: usize| {
            let (st, c_e, p_e) = &*sh;
            let base = &pt[..3];
            // the ansatz enters through two frame derivatives
            let work = (ord + 2).clamp(3, crate::jet::MAX_ORDER);
            let k1c = crate::invariants::ts::ts_k1_coframe_with(st, base, work + 2, true)
                .map_err(|e| FormsError::Invalid(format!("reduced metric coframe: {e}")))?;
            let frame = crate::forms::dual_frame(&[&k1c.cof.w, &k1c.cof.w1, &k1c.cof.w1b])?;
            let dd = &frame.vectors[1];
            let db = &frame.vectors[2];
            let ctx = EvalCtx::new(&st.chart.names, &st.params)
                .with_guard(crate::congruence::DENOM_GUARD);
            let c_jet = crate::expr::eval_jet(c_e, &ctx, base, work)?;
            let p_jet = crate::expr::eval_jet(p_e, &ctx, base, work)?;
            let logp = p_jet.log()?;
            let d_logp = crate::forms::frame_derivative(&logp, dd)?;

            let a1j = &k1c.a1;
            let b1j = &k1c.b1;
            let sign = k1c.sign as f64;
            let shape = (d_logp.dim(), d_logp.order());
            let mj =
                JetScalar::constant(C::new(T::of(m_const.0), T::of(m_const.1)), shape.0, shape.1);

            // alpha = 2(d log p - c); beta = 2i(d log p - 2c - A1)
            let alpha = (&d_logp - &c_jet).scale(cr(2.0));
            let beta =
                (&(&d_logp - &c_jet.scale(cr(2.0))) - a1j).scale(C::new(T::zero(), T::of(2.0)));
            // phi_f = (db + A1 + i conj B1 + i conj beta) alpha - 4 m/p^4
            let db_alpha = crate::forms::frame_derivative(&alpha, db)?;
            let p4 = p_jet.powi(4)?;
            let phi_f = &(&db_alpha
                + &(&(a1j + &b1j.conj().scale(im())) + &beta.conj().scale(im())).mul(&alpha))
                - &mj.div(&p4)?.scale(cr(4.0));
            // chi = 3|alpha|^2 + 2i(d + A1 - i B1) conj beta
            //       - 2i(db + A1 + i conj B1) beta -+ 1
            let d_betab = crate::forms::frame_derivative(&beta.conj(), dd)?;
            let db_beta = crate::forms::frame_derivative(&beta, db)?;
            let term1 = alpha.mul(&alpha.conj()).scale(cr(3.0));
            let term2 = (&d_betab + &(a1j - &b1j.scale(im())).mul(&beta.conj()))
                .scale(C::new(T::zero(), T::of(2.0)));
            let term3 = (&db_beta + &(a1j + &b1j.conj().scale(im())).mul(&beta))
                .scale(C::new(T::zero(), T::of(-2.0)));
            let chi = &(&(&term1 + &term2) + &term3)
                - &JetScalar::constant(cr(sign), term1.dim(), term1.order());

            // r-dependence in closed form
            let up = |j: &JetScalar<T>| j.promote(4, &[0, 1, 2]).unwrap();
            let r_j = JetScalar::variable(3, C::new(pt[3], T::zero()), 4, work)?;
            let e_ir = r_j.scale(im()).exp();
            let e_mir = e_ir.recip()?;
            let cos_half = r_j.scale(cr(0.5)).cos();
            let p_cap = up(&p_jet).div(&cos_half)?;

            let w_cap = &up(&alpha).scale(im()).mul(&e_mir) + &up(&beta);
            let m_over_p4 = up(&mj.div(&p4)?);
            let h_cap = &(&(&(&-&m_over_p4.conj().mul(&e_ir).mul(&e_ir)
                - &m_over_p4.mul(&e_mir).mul(&e_mir))
                + &up(&phi_f.conj()).mul(&e_ir).scale(cr(0.5)))
                + &up(&phi_f).mul(&e_mir).scale(cr(0.5)))
                + &up(&chi).scale(cr(0.5));

            let ext = |f: &crate::forms::OneFormJet<T>| -> Vec<JetScalar<T>> {
                let mut v: Vec<JetScalar<T>> = f.comps.iter().map(&up).collect();
                v.push(JetScalar::zero(4, work));
                v
            };
            let w4 = ext(&k1c.cof.w);
            let w14 = ext(&k1c.cof.w1);
            let (form, comp) = (which / 4, which % 4);
            let out = match form {
                0 => p_cap.mul(&w14[comp]),
                1 => p_cap.mul(&w14[comp].conj()),
                2 => p_cap.mul(&w4[comp]),
                _ => {
                    let dr = if comp == 3 {
                        JetScalar::constant(cr(1.0), 4, work)
                    } else {
                        JetScalar::zero(4, work)
                    };
                    let t = &(&dr + &w_cap.mul(&w14[comp])) + &w_cap.conj().mul(&w14[comp].conj());
                    p_cap.mul(&(&t + &h_cap.mul(&w4[comp])))
                }
            };
            Ok(out.truncate(ord))
        }))
    };

    let coframe = (0..4)
        .map(|f| OneForm {
            comps: (0..4).map(|c| make(f * 4 + c)).collect(),
        })
        .collect();
    Ok(Metric4 {
        chart,
        coframe,
        eta: eta_null_pair(),
        params: BTreeMap::new(),
    })
}

/// Minkowski space in null-pair form, for tests.
pub fn metric_minkowski<T: Real>() -> Metric4<T> {
    let chart = Chart::new(
        &["u", "x", "y", "r"],
        &[(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)],
        "",
        97,
    );
    let s = "0.7071067811865476";
    Metric4 {
        chart,
        coframe: vec![
            OneForm::from_exprs(&["0", s, &format!("i*{s}"), "0"]),
            OneForm::from_exprs(&["0", s, &format!("-i*{s}"), "0"]),
            OneForm::from_exprs(&[s, "0", "0", s]),
            OneForm::from_exprs(&[s, "0", "0", &format!("(-{s})")]),
        ],
        eta: eta_null_pair(),
        params: BTreeMap::new(),
    }
}
