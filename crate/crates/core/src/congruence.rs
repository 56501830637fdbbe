//! Oriented congruences: structure functions, twist/shear branch
//! classification, the tangential CR test, and the classical
//! expansion/twist/shear decomposition of vector fields in flat 3-space.

use crate::expr::{EvalCtx, Expr};
use crate::forms::{
    decompose_two_form, dual_frame, exterior_d, wedge, wedge_two_one, Chart, FormsError,
    FormsResult, FrameJet, OneForm, OneFormJet,
};
use crate::jet::JetScalar;
use crate::scalar::{im, Real};
use std::collections::BTreeMap;

/// Guard below which a point is rejected as too close to a pole of the
/// defining expressions.
pub const DENOM_GUARD: f64 = 1e-6;

/// Default sampling policy for "identically zero on M" decisions.
pub const CLASSIFY_POINTS: usize = 32;
pub const CLASSIFY_TOL: f64 = 1e-8;

/// A structure (M, [lambda, mu]): a 3-chart, a real 1-form and a complex
/// 1-form, with named real parameters.
#[derive(Debug, Clone)]
pub struct OrientedCongruence<T: Real> {
    pub chart: Chart,
    pub lambda: OneForm<T>,
    pub mu: OneForm<T>,
    pub params: BTreeMap<String, T>,
}

/// The quintuple of Eq-(str) coefficients at a point, jet-valued:
/// `d lambda = i a mu^mub + b mu^lambda + conj(b) mub^lambda`,
/// `d mu     = p mu^mub + q mu^lambda + s mub^lambda`.
#[derive(Debug, Clone)]
pub struct StructureFunctions<T: Real> {
    pub a: JetScalar<T>,
    pub b: JetScalar<T>,
    pub p: JetScalar<T>,
    pub q: JetScalar<T>,
    pub s: JetScalar<T>,
    /// Arg(s), defined when s is nonzero at the point.
    pub psi: Option<JetScalar<T>>,
    /// reality and reconstruction residuals
    pub a_imag_residual: T,
    pub reconstruction_residual: T,
}

/// Everything needed to take frame derivatives at one point.
pub struct PointFrame<T: Real> {
    pub lam: OneFormJet<T>,
    pub mu: OneFormJet<T>,
    pub mubar: OneFormJet<T>,
    pub frame: FrameJet<T>,
}

impl<T: Real> PointFrame<T> {
    /// u_lambda
    pub fn d_lam(&self, f: &JetScalar<T>) -> FormsResult<JetScalar<T>> {
        crate::forms::frame_derivative(f, self.frame.vector(0))
    }

    /// u_mu
    pub fn d_mu(&self, f: &JetScalar<T>) -> FormsResult<JetScalar<T>> {
        crate::forms::frame_derivative(f, self.frame.vector(1))
    }

    /// u_mubar
    pub fn d_mubar(&self, f: &JetScalar<T>) -> FormsResult<JetScalar<T>> {
        crate::forms::frame_derivative(f, self.frame.vector(2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Branch {
    TwistFreeShearFree,
    TwistOnly,
    ShearOnly,
    Generic,
}

/// Branch verdict plus the sampled witness statistics it was based on.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BranchClass {
    pub branch: Branch,
    pub max_abs_a: f64,
    pub max_abs_s: f64,
    pub scale: f64,
    pub tol: f64,
    pub points_used: usize,
}

impl<T: Real> OrientedCongruence<T> {
    pub fn ctx(&self) -> EvalCtx<'_, T> {
        EvalCtx::new(&self.chart.names, &self.params).with_guard(DENOM_GUARD)
    }

    /// Deterministic admissible sample points (rejecting poles of the
    /// defining expressions).
    pub fn sample_points(&self, n: usize) -> FormsResult<Vec<Vec<T>>> {
        let ctx = self.ctx();
        self.chart.sample_where(n, &self.params, |pt| {
            let Ok(l) = self.lambda.eval(&ctx, pt, 1) else {
                return false;
            };
            let Ok(m) = self.mu.eval(&ctx, pt, 1) else {
                return false;
            };
            // independence lambda ^ mu ^ mubar != 0
            let vol = wedge_two_one(&wedge(&m, &m.conj()), &l);
            let scale = l.scale_mag().max(m.scale_mag());
            vol.value().norm() > T::of(1e-9) * scale * scale * scale
        })
    }

    /// Evaluate (lambda, mu) at a point and build the dual frame
    /// (u_lambda, u_mu, u_mubar).
    pub fn point_frame(&self, point: &[T], order: usize) -> FormsResult<PointFrame<T>> {
        let ctx = self.ctx();
        let lam = self.lambda.eval(&ctx, point, order)?;
        let mu = self.mu.eval(&ctx, point, order)?;
        let imag = lam
            .comps
            .iter()
            .map(|c| c.imag_part().norm_inf())
            .fold(T::zero(), |a, b| if b > a { b } else { a });
        let scale = lam.scale_mag() + T::of(1e-30);
        if imag > T::of(1e-9) * scale {
            return Err(FormsError::Invalid(format!(
                "lambda must be real (imaginary residual {:.3e})",
                imag.to_f64().unwrap_or(f64::NAN)
            )));
        }
        let mubar = mu.conj();
        let frame = dual_frame(&[&lam, &mu, &mubar])?;
        Ok(PointFrame {
            lam,
            mu,
            mubar,
            frame,
        })
    }

    /// Decompose d(lambda) and d(mu) on the 2-form basis
    /// (mu^mubar, mu^lambda, mubar^lambda).
    pub fn structure_functions(
        &self,
        point: &[T],
        order: usize,
    ) -> FormsResult<StructureFunctions<T>> {
        let pf = self.point_frame(point, order)?;
        structure_functions_of(&pf)
    }

    /// Twist/shear branch by sampling |a| and |s| at `n_points` points.
    pub fn classify_branch(&self, n_points: usize, tol: f64) -> FormsResult<BranchClass> {
        let pts = self.sample_points(n_points.max(8))?;
        let mut max_a = T::zero();
        let mut max_s = T::zero();
        let mut scale = T::zero();
        for pt in &pts {
            let pf = self.point_frame(pt, 2)?;
            let sf = structure_functions_of(&pf)?;
            let a = sf.a.value().norm();
            let s = sf.s.value().norm();
            if a > max_a {
                max_a = a;
            }
            if s > max_s {
                max_s = s;
            }
            let m = pf.lam.scale_mag().max(pf.mu.scale_mag());
            if m > scale {
                scale = m;
            }
        }
        let cut = T::of(tol) * scale;
        let branch = match (max_a > cut, max_s > cut) {
            (false, false) => Branch::TwistFreeShearFree,
            (true, false) => Branch::TwistOnly,
            (false, true) => Branch::ShearOnly,
            (true, true) => Branch::Generic,
        };
        Ok(BranchClass {
            branch,
            max_abs_a: max_a.to_f64().unwrap_or(f64::NAN),
            max_abs_s: max_s.to_f64().unwrap_or(f64::NAN),
            scale: scale.to_f64().unwrap_or(f64::NAN),
            tol,
            points_used: pts.len(),
        })
    }

    /// Magnitude of the coefficient of d(zeta)^lambda^mu, normalized by the
    /// coframe scale; ~0 iff zeta satisfies the tangential CR equation.
    pub fn cr_residual(&self, zeta: &Expr, point: &[T]) -> FormsResult<T> {
        let ctx = self.ctx();
        let pf = self.point_frame(point, 2)?;
        let zj = crate::expr::eval_jet(zeta, &ctx, point, 2)?;
        let dz = crate::forms::d_scalar(&zj, 3)?;
        let vol = wedge_two_one(&wedge(&pf.lam, &pf.mu), &dz);
        // normalize by the same 3-form built from mubar in place of dzeta
        let norm = wedge_two_one(&wedge(&pf.lam, &pf.mu), &pf.mubar);
        let denom = norm.value().norm().max(T::of(1e-30)) * dz.scale_mag().max(T::of(1e-12));
        Ok(vol.value().norm() / denom)
    }
}

/// Structure functions from an evaluated point frame.
pub fn structure_functions_of<T: Real>(pf: &PointFrame<T>) -> FormsResult<StructureFunctions<T>> {
    let b1 = wedge(&pf.mu, &pf.mubar);
    let b2 = wedge(&pf.mu, &pf.lam);
    let b3 = wedge(&pf.mubar, &pf.lam);
    let basis = [&b1, &b2, &b3];

    let dlam = exterior_d(&pf.lam)?;
    let dmu = exterior_d(&pf.mu)?;
    let lam_coefs = decompose_two_form(&dlam, &basis)?;
    let mu_coefs = decompose_two_form(&dmu, &basis)?;

    let a = lam_coefs[0].scale(-im::<T>()); // coefficient of i mu^mubar
    let b = lam_coefs[1].clone();
    let p = mu_coefs[0].clone();
    let q = mu_coefs[1].clone();
    let s = mu_coefs[2].clone();

    // reconstruction residual: rebuild both 2-forms from the coefficients
    let rebuilt_lam = b1
        .scale_jet(&lam_coefs[0])
        .add(&b2.scale_jet(&lam_coefs[1]))
        .add(&b3.scale_jet(&lam_coefs[2]));
    let rebuilt_mu = b1
        .scale_jet(&mu_coefs[0])
        .add(&b2.scale_jet(&mu_coefs[1]))
        .add(&b3.scale_jet(&mu_coefs[2]));
    let scale = dlam.value_norm().max(dmu.value_norm()).max(T::of(1e-12));
    let recon = rebuilt_lam
        .sub(&dlam)
        .value_norm()
        .max(rebuilt_mu.sub(&dmu).value_norm())
        / scale;

    // reality of a, and conj(b) consistency in the third slot
    let a_scale = a.value().norm().max(T::of(1e-12));
    let a_imag = a.imag_part().value().norm() / a_scale;
    let bbar_dev = (lam_coefs[2].value() - b.conj().value()).norm() / a_scale.max(b.value().norm());

    let psi = if s.value().norm() > T::of(1e-14) {
        Some(s.arg()?)
    } else {
        None
    };

    Ok(StructureFunctions {
        a,
        b,
        p,
        q,
        s,
        psi,
        a_imag_residual: a_imag,
        reconstruction_residual: recon.max(bbar_dev),
    })
}

/// Classical pointwise decomposition of the gradient of a vector field in
/// Euclidean 3-space: expansion, twist matrix and norm, shear matrix and
/// norm, with `grad v = alpha + sigma + (theta/3) I`.
#[derive(Debug, Clone)]
pub struct ClassicalDecomposition<T: Real> {
    pub theta: T,
    pub alpha_matrix: [[T; 3]; 3],
    pub sigma_matrix: [[T; 3]; 3],
    pub alpha_norm: T,
    pub sigma_norm: T,
    pub reconstruction_residual: T,
}

pub fn classical_decomposition<T: Real>(
    v: &[Expr; 3],
    chart: &Chart,
    params: &BTreeMap<String, T>,
    point: &[T],
) -> FormsResult<ClassicalDecomposition<T>> {
    assert_eq!(chart.dim(), 3);
    let ctx = EvalCtx::new(&chart.names, params);
    // J[i][j] = d_i v_j
    let mut jac = [[T::zero(); 3]; 3];
    for (j, comp) in v.iter().enumerate() {
        let jv = crate::expr::eval_jet(comp, &ctx, point, 1)?;
        for (i, row) in jac.iter_mut().enumerate() {
            row[j] = jv
                .extract(&crate::jet::MultiIndex::unit(i))
                .map(|c| c.re)
                .unwrap_or(T::zero());
        }
    }
    let third = T::of(1.0 / 3.0);
    let theta = jac[0][0] + jac[1][1] + jac[2][2];
    let mut alpha = [[T::zero(); 3]; 3];
    let mut sigma = [[T::zero(); 3]; 3];
    let half = T::of(0.5);
    for i in 0..3 {
        for j in 0..3 {
            alpha[i][j] = half * (jac[i][j] - jac[j][i]);
            sigma[i][j] = half * (jac[i][j] + jac[j][i]);
            if i == j {
                sigma[i][j] = sigma[i][j] - third * theta;
            }
        }
    }
    let frob = |m: &[[T; 3]; 3]| {
        let mut acc = T::zero();
        for row in m {
            for &e in row {
                acc = acc + e * e;
            }
        }
        acc.sqrt()
    };
    let mut recon = T::zero();
    for i in 0..3 {
        for j in 0..3 {
            let g = if i == j { third * theta } else { T::zero() };
            let d = (alpha[i][j] + sigma[i][j] + g - jac[i][j]).abs();
            if d > recon {
                recon = d;
            }
        }
    }
    Ok(ClassicalDecomposition {
        theta,
        alpha_matrix: alpha,
        sigma_matrix: sigma,
        alpha_norm: frob(&alpha),
        sigma_norm: frob(&sigma),
        reconstruction_residual: recon,
    })
}

/// The Heisenberg-group structure with the standard splitting, used by
/// several unit tests: lambda = du + i(z dzb - zb dz), mu = dz.
#[cfg(test)]
pub fn heisenberg() -> OrientedCongruence<f64> {
    OrientedCongruence {
        chart: Chart::new(
            &["u", "x", "y"],
            &[(-1.0, 1.0), (-1.2, 1.2), (-1.1, 1.1)],
            "x^2 + y^2 > 0.05",
            11,
        ),
        lambda: OneForm::from_exprs(&["1", "-2*y", "2*x"]),
        mu: OneForm::from_exprs(&["0", "1", "i"]),
        params: BTreeMap::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::scalar::C;

    #[test]
    fn heisenberg_structure_functions() {
        let h = heisenberg();
        for pt in h.sample_points(6).unwrap() {
            let sf = h.structure_functions(&pt, 4).unwrap();
            assert!((sf.a.value() - C::new(2.0, 0.0)).norm() < 1e-11, "a = 2");
            assert!(sf.b.value().norm() < 1e-11);
            assert!(sf.p.value().norm() < 1e-11);
            assert!(sf.q.value().norm() < 1e-11);
            assert!(sf.s.value().norm() < 1e-11);
            assert!(sf.reconstruction_residual < 1e-10);
            assert!(sf.a_imag_residual < 1e-11);
        }
    }

    #[test]
    fn rigid_quadratic_structure_functions() {
        // H = z zb: lambda = du + x dy - y dx, a = H_{z zb} = 1, s = 0
        let c = OrientedCongruence::<f64> {
            chart: Chart::new(
                &["u", "x", "y"],
                &[(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)],
                "",
                3,
            ),
            lambda: OneForm::from_exprs(&["1", "-y", "x"]),
            mu: OneForm::from_exprs(&["0", "1", "i"]),
            params: BTreeMap::new(),
        };
        for pt in c.sample_points(4).unwrap() {
            let sf = c.structure_functions(&pt, 3).unwrap();
            assert!((sf.a.value() - C::new(1.0, 0.0)).norm() < 1e-11);
            assert!(sf.s.value().norm() < 1e-11);
        }
    }

    #[test]
    fn shear_only_example_has_zero_twist() {
        // lambda = du, mu = dx + i e^{2u} dy (4symtm alpha = 0)
        let c = OrientedCongruence::<f64> {
            chart: Chart::new(
                &["u", "x", "y"],
                &[(-0.8, 0.8), (-1.0, 1.0), (-1.0, 1.0)],
                "",
                5,
            ),
            lambda: OneForm::from_exprs(&["1", "0", "0"]),
            mu: OneForm::from_exprs(&["0", "1", "i*exp(2*u)"]),
            params: BTreeMap::new(),
        };
        let cls = c.classify_branch(16, CLASSIFY_TOL).unwrap();
        assert_eq!(cls.branch, Branch::ShearOnly);
        for pt in c.sample_points(4).unwrap() {
            let sf = c.structure_functions(&pt, 3).unwrap();
            assert!(sf.a.value().norm() < 1e-11, "a = 0");
            assert!(sf.s.value().norm() > 0.1, "|s| > 0");
        }
    }

    #[test]
    fn branch_classification_heisenberg_and_flat() {
        let h = heisenberg();
        assert_eq!(
            h.classify_branch(16, CLASSIFY_TOL).unwrap().branch,
            Branch::TwistOnly
        );
        let flat = OrientedCongruence::<f64> {
            chart: Chart::new(
                &["u", "x", "y"],
                &[(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)],
                "",
                9,
            ),
            lambda: OneForm::from_exprs(&["1", "0", "0"]),
            mu: OneForm::from_exprs(&["0", "1", "i"]),
            params: BTreeMap::new(),
        };
        assert_eq!(
            flat.classify_branch(16, CLASSIFY_TOL).unwrap().branch,
            Branch::TwistFreeShearFree
        );
    }

    #[test]
    fn cr_function_test_on_heisenberg() {
        let h = heisenberg();
        let zeta = parse("x + i*y").unwrap();
        let zeta_u = parse("u + i*(x^2 + y^2)").unwrap();
        let zbar = parse("x - i*y").unwrap();
        for pt in h.sample_points(5).unwrap() {
            assert!(h.cr_residual(&zeta, &pt).unwrap() < 1e-10, "z is CR");
            assert!(
                h.cr_residual(&zeta_u, &pt).unwrap() < 1e-10,
                "u + i|z|^2 is CR"
            );
            assert!(h.cr_residual(&zbar, &pt).unwrap() > 1e-3, "zb is not CR");
        }
    }

    #[test]
    fn classical_decomposition_examples() {
        let chart = Chart::new(
            &["x", "y", "zc"],
            &[(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)],
            "",
            1,
        );
        let params = BTreeMap::new();
        let pt = [0.3, -0.2, 0.5];

        // pure expansion
        let v = [
            parse("x").unwrap(),
            parse("y").unwrap(),
            parse("zc").unwrap(),
        ];
        let d: ClassicalDecomposition<f64> =
            classical_decomposition(&v, &chart, &params, &pt).unwrap();
        assert!((d.theta - 3.0).abs() < 1e-12);
        assert!(d.alpha_norm < 1e-12);
        assert!(d.sigma_norm < 1e-12);

        // rigid rotation: alpha norm sqrt(2)
        let v = [
            parse("-y").unwrap(),
            parse("x").unwrap(),
            parse("0").unwrap(),
        ];
        let d = classical_decomposition(&v, &chart, &params, &pt).unwrap();
        assert!(d.theta.abs() < 1e-12);
        assert!(d.sigma_norm < 1e-12);
        assert!((d.alpha_norm - 2.0f64.sqrt()).abs() < 1e-12);

        // single off-diagonal entry splits evenly
        let v = [
            parse("y").unwrap(),
            parse("0").unwrap(),
            parse("0").unwrap(),
        ];
        let d = classical_decomposition(&v, &chart, &params, &pt).unwrap();
        assert!(d.theta.abs() < 1e-12);
        assert!((d.alpha_norm - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((d.sigma_norm - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(d.reconstruction_residual < 1e-12);
    }

    #[test]
    fn f32_instantiation_of_the_tower() {
        let c = OrientedCongruence::<f32> {
            chart: Chart::new(
                &["u", "x", "y"],
                &[(-1.0, 1.0), (-1.2, 1.2), (-1.1, 1.1)],
                "x^2 + y^2 > 0.05",
                11,
            ),
            lambda: OneForm::from_exprs(&["1", "-2*y", "2*x"]),
            mu: OneForm::from_exprs(&["0", "1", "i"]),
            params: BTreeMap::new(),
        };
        let pts = c.sample_points(2).unwrap();
        let sf = c.structure_functions(&pts[0], 3).unwrap();
        assert!((sf.a.value().re - 2.0).abs() < 1e-4);
        assert!(sf.s.value().norm() < 1e-4);
    }

    #[test]
    fn gauge_covariance_of_a() {
        // (lambda, mu) -> (f lambda, h mu) maps a -> f a / |h|^2
        let h = heisenberg();
        let f_expr = "1 + 0.3*sin(x) + 0.1*u";
        let h_re = "1 + 0.2*x";
        let h_im = "0.3*y - 0.1";
        let gauged = OrientedCongruence::<f64> {
            chart: h.chart.clone(),
            lambda: OneForm {
                comps: vec![
                    ScalarFieldHelper::product(f_expr, "1"),
                    ScalarFieldHelper::product(f_expr, "-2*y"),
                    ScalarFieldHelper::product(f_expr, "2*x"),
                ],
            },
            mu: OneForm {
                comps: vec![
                    crate::forms::ScalarField::zero(),
                    ScalarFieldHelper::product(&format!("({h_re}) + i*({h_im})"), "1"),
                    ScalarFieldHelper::product(&format!("({h_re}) + i*({h_im})"), "i"),
                ],
            },
            params: BTreeMap::new(),
        };
        for pt in h.sample_points(6).unwrap() {
            let sf0 = h.structure_functions(&pt, 3).unwrap();
            let sf1 = gauged.structure_functions(&pt, 3).unwrap();
            let ctx = h.ctx();
            let fv = crate::expr::eval_complex(&parse(f_expr).unwrap(), &ctx, &pt).unwrap();
            let hv = crate::expr::eval_complex(
                &parse(&format!("({h_re}) + i*({h_im})")).unwrap(),
                &ctx,
                &pt,
            )
            .unwrap();
            let expect = sf0.a.value() * fv / C::new(hv.norm_sqr(), 0.0);
            let rel = (sf1.a.value() - expect).norm() / expect.norm();
            assert!(rel < 1e-8, "a transforms as f a/|h|^2 (rel {rel:.2e})");
        }
    }

    struct ScalarFieldHelper;
    impl ScalarFieldHelper {
        fn product(a: &str, b: &str) -> crate::forms::ScalarField<f64> {
            crate::forms::ScalarField::parse(&format!("({a})*({b})"))
        }
    }
}
