//! Randomized property tests: jet ring axioms, truncation consistency,
//! linear-solve residuals, parser round trips and conjugation laws.

use num_complex::Complex64;
use oclab_core::expr::{self, EvalCtx, Expr, Func};
use oclab_core::jet::{JetMatrix, JetScalar, MultiIndex};
use proptest::prelude::*;

type J = JetScalar<f64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Random jets as sums of scaled monomials in two variables.
fn jet_strategy(order: usize) -> impl Strategy<Value = J> {
    let coeff = (-1.0..1.0f64).prop_flat_map(|re| (Just(re), -1.0..1.0f64));
    proptest::collection::vec((coeff, 0usize..3, 0usize..3), 1..6).prop_map(move |terms| {
        let x = J::variable(0, c(0.3, 0.0), 2, order).unwrap();
        let y = J::variable(1, c(-0.4, 0.0), 2, order).unwrap();
        let mut acc = J::constant(c(0.5, 0.1), 2, order);
        for ((re, im), px, py) in terms {
            let mut term = J::constant(c(re, im), 2, order);
            for _ in 0..px {
                term = term.mul(&x);
            }
            for _ in 0..py {
                term = term.mul(&y);
            }
            acc = &acc + &term;
        }
        acc
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_ring_axioms(a in jet_strategy(4), b in jet_strategy(4), d in jet_strategy(4)) {
        // distributivity
        let lhs = (&a + &b).mul(&d);
        let rhs = &a.mul(&d) + &b.mul(&d);
        let scale = lhs.norm_inf().max(rhs.norm_inf()).max(1.0);
        prop_assert!((&lhs - &rhs).norm_inf() / scale < 1e-12);
        // associativity
        let lhs = a.mul(&b).mul(&d);
        let rhs = a.mul(&b.mul(&d));
        let scale = lhs.norm_inf().max(1.0);
        prop_assert!((&lhs - &rhs).norm_inf() / scale < 1e-12);
        // commutativity
        prop_assert!((&a.mul(&b) - &b.mul(&a)).norm_inf() < 1e-12 * scale);
    }

    #[test]
    fn truncation_consistency(a in jet_strategy(6), b in jet_strategy(6)) {
        // computing at order 6 then truncating equals computing at order 3
        let hi = a.mul(&b).exp();
        let lo = a.truncate(3).mul(&b.truncate(3)).exp();
        prop_assert_eq!(hi.truncate(3), lo);
    }

    #[test]
    fn jet_solve_residual(seed in 0u64..1000) {
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut rnd = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let order = 3;
        let mut mk = |diag: f64| {
            let mut j = J::constant(c(diag + rnd(), rnd()), 2, order);
            for v in 0..2 {
                let var = J::variable(v, c(0.1, 0.0), 2, order).unwrap();
                j = &j + &var.scale(c(rnd(), rnd()));
            }
            j
        };
        let a = JetMatrix::from_fn(3, 3, |r, cix| mk(if r == cix { 3.0 } else { 0.0 }));
        let b = JetMatrix::from_fn(3, 1, |_, _| mk(0.0));
        let x = a.solve(&b).unwrap();
        let bnorm: f64 = (0..3).map(|r| b.at(r, 0).norm_inf()).fold(0.0, f64::max);
        prop_assert!(a.residual_norm(&x, &b) < 1e-10 * bnorm.max(1.0));
    }

    #[test]
    fn elementary_inverse_pairs(a in jet_strategy(4)) {
        // log(exp(a)) = a whenever exp stays in the principal strip
        if a.value().im.abs() < 3.0 {
            let back = a.exp().log().unwrap();
            prop_assert!((&back - &a).norm_inf() < 1e-10 * a.norm_inf().max(1.0));
        }
    }
}

/// Random expressions over two real variables.
fn expr_strategy() -> impl Strategy<Value = Expr> {
    // literals are non-negative: "-2.9" reparses as Neg(Num(2.9)), so the
    // canonical tree keeps the sign in a Neg node
    let leaf = prop_oneof![
        (0.0..4.0f64).prop_map(Expr::Num),
        Just(Expr::ImUnit),
        Just(Expr::Ident("x".to_string())),
        Just(Expr::Ident("y".to_string())),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            inner
                .clone()
                .prop_map(|a| Expr::Call(Func::Sin, Box::new(a))),
            inner
                .clone()
                .prop_map(|a| Expr::Call(Func::Conj, Box::new(a))),
            inner
                .clone()
                .prop_map(|a| Expr::Call(Func::Exp, Box::new(a))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pretty_print_round_trip(e in expr_strategy()) {
        let printed = e.to_string();
        let re = expr::parse(&printed);
        prop_assert!(re.is_ok(), "'{}' failed to reparse: {:?}", printed, re.err());
        prop_assert_eq!(re.unwrap(), e, "round trip through '{}'", printed);
    }

    #[test]
    fn conj_is_an_involution(e in expr_strategy(), x in -1.0..1.0f64, y in -1.0..1.0f64) {
        let names = vec!["x".to_string(), "y".to_string()];
        let params = std::collections::BTreeMap::new();
        let ctx = EvalCtx::new(&names, &params);
        let double = Expr::Call(
            Func::Conj,
            Box::new(Expr::Call(Func::Conj, Box::new(e.clone()))),
        );
        let v0 = expr::eval_complex(&e, &ctx, &[x, y]);
        let v1 = expr::eval_complex(&double, &ctx, &[x, y]);
        if let (Ok(v0), Ok(v1)) = (v0, v1) {
            if v0.norm().is_finite() {
                prop_assert!((v0 - v1).norm() <= 1e-12 * v0.norm().max(1.0));
            }
        }
        // conj(e) evaluates to the conjugate of e (real chart variables)
        let conj_e = Expr::Call(Func::Conj, Box::new(e.clone()));
        if let (Ok(v), Ok(vc)) = (
            expr::eval_complex(&e, &ctx, &[x, y]),
            expr::eval_complex(&conj_e, &ctx, &[x, y]),
        ) {
            if v.norm().is_finite() {
                prop_assert!((v.conj() - vc).norm() <= 1e-12 * v.norm().max(1.0));
            }
        }
    }

    #[test]
    fn real_expressions_stay_real(x in -1.0..1.0f64, y in -1.0..1.0f64, k in 1.0..3.0f64) {
        // expressions with real leaves and no imaginary unit
        let names = vec!["x".to_string(), "y".to_string()];
        let params = std::collections::BTreeMap::new();
        let ctx = EvalCtx::new(&names, &params);
        let src = format!("exp(x*{k})*sin(y) + x^3/({k} + y^2) + cos({k}*x - y)");
        let e = expr::parse(&src).unwrap();
        let j = expr::eval_jet(&e, &ctx, &[x, y], 4).unwrap();
        prop_assert!(j.imag_part().norm_inf() < 1e-13 * j.norm_inf().max(1.0));
    }
}

#[test]
fn derivative_extraction_matches_multifactorial() {
    // d^(2,1) of x^2 y at (x0, y0) is 2; the raw coefficient is 1
    let x = J::variable(0, c(0.7, 0.0), 2, 4).unwrap();
    let y = J::variable(1, c(-0.2, 0.0), 2, 4).unwrap();
    let f = x.mul(&x).mul(&y);
    let m = MultiIndex::from_slice(&[2, 1]);
    assert!((f.extract(&m).unwrap() - c(2.0, 0.0)).norm() < 1e-14);
    assert!((f.coeff(&m).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
}
