use nlpb_core::ladder::{ladders_from_gammas, pseudo_boson_ladders, GammaData};
use nlpb_core::rankone::{build_x, verify_projection_family};
use nlpb_core::semigroup::expm;
use nlpb_core::space::{
    alphas_from_epsilon, check_biorthogonality, make_epsilon, random_riesz, riesz_pair, BiorthogonalPair,
    EpsilonKind, EpsilonSequence,
};
use nlpb_core::spectral::spectrum_check;
use nlpb_core::{CMatrix, CVector, Complex64};
use proptest::prelude::*;

fn epsilon_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..10.0, 2..24).prop_map(|gaps| {
        let mut acc = 0.0;
        let mut out = vec![0.0];
        for g in gaps {
            acc += g;
            out.push(acc);
        }
        out
    })
}

fn kind_strategy() -> impl Strategy<Value = EpsilonKind> {
    prop_oneof![
        Just(EpsilonKind::Linear),
        Just(EpsilonKind::Quadratic),
        Just(EpsilonKind::Kkplus1)
    ]
}

fn matrix_strategy(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| CMatrix::from_iterator(n, n, v.into_iter().map(|(re, im)| Complex64::new(re, im))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn alphas_telescope_to_epsilon(values in epsilon_strategy()) {
        let eps = EpsilonSequence::new(values.clone()).unwrap();
        let alpha = alphas_from_epsilon(&eps);
        let mut acc = 0.0;
        for (k, a) in alpha.values().iter().enumerate() {
            prop_assert!(*a > 0.0);
            acc += a;
            prop_assert!((acc - values[k + 1]).abs() <= 1e-12 * values[k + 1].max(1.0));
        }
    }

    #[test]
    fn riesz_pairs_are_biorthogonal(seed in 0u64..1000, log_cond in 0.0f64..3.0, n in 4usize..40) {
        let cond = 10f64.powf(log_cond);
        let g = random_riesz(n, cond, seed).unwrap();
        let pair = riesz_pair(&g).unwrap();
        let report = check_biorthogonality(&pair, 1e-12 * g.cond());
        prop_assert!(report.passed, "{:?}", report.residuals);
    }

    #[test]
    fn rank_one_projections_resolve_identity(seed in 0u64..1000, log_cond in 0.0f64..3.0) {
        let g = random_riesz(24, 10f64.powf(log_cond), seed).unwrap();
        let pair = riesz_pair(&g).unwrap();
        let report = verify_projection_family(&pair, 1e-10 * g.cond());
        prop_assert!(report.passed, "{:?}", report.residuals);
    }

    #[test]
    fn similar_operators_share_the_alpha_spectrum(seed in 0u64..1000, log_cond in 0.0f64..2.0, kind in kind_strategy()) {
        let g = random_riesz(24, 10f64.powf(log_cond), seed).unwrap();
        let pair = riesz_pair(&g).unwrap();
        let alpha = alphas_from_epsilon(&make_epsilon(kind, 24, None).unwrap());
        let report = spectrum_check(&pair, &alpha, 1e-8).unwrap();
        prop_assert!(report.passed, "{:?}", report.residuals);
    }

    #[test]
    fn expm_group_law(a in matrix_strategy(6), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let lhs = expm(&a, s + t).unwrap();
        let rhs = expm(&a, s).unwrap() * expm(&a, t).unwrap();
        prop_assert!((&lhs - &rhs).norm() <= 1e-11 * lhs.norm().max(1.0));
    }

    #[test]
    fn expm_commutes_with_adjoint(a in matrix_strategy(6), t in -2.0f64..2.0) {
        let lhs = expm(&a.adjoint(), t).unwrap();
        let rhs = expm(&a, t).unwrap().adjoint();
        prop_assert!((&lhs - &rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn expm_inverse_is_negative_time(a in matrix_strategy(6), t in -2.0f64..2.0) {
        let prod = expm(&a, t).unwrap() * expm(&a, -t).unwrap();
        prop_assert!((prod - CMatrix::identity(6, 6)).norm() <= 1e-10);
    }

    #[test]
    fn single_commutator_is_x_adjoint(
        seed in 0u64..1000,
        kind in kind_strategy(),
        cs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 14),
    ) {
        let n = 16;
        let pair = riesz_pair(&random_riesz(n, 10.0, seed).unwrap()).unwrap();
        let sys = pseudo_boson_ladders(&make_epsilon(kind, n, None).unwrap(), &pair, 1).unwrap();
        let mut coeffs = CVector::zeros(n);
        for (k, (re, im)) in cs.into_iter().enumerate() {
            coeffs[k] = Complex64::new(re, im);
        }
        let xi = pair.from_phi_coeffs(&coeffs);
        let lhs = sys.s.apply(&sys.t.apply(&xi)) - sys.t.apply(&sys.s.apply(&xi));
        let rhs = sys.x_adjoint().apply(&xi);
        prop_assert!((&lhs - &rhs).norm() <= 1e-9 * rhs.norm().max(1.0));
    }

    #[test]
    fn gamma_constructor_reproduces_pseudo_boson_ladders(seed in 0u64..1000, values in epsilon_strategy()) {
        let eps = EpsilonSequence::new(values).unwrap();
        let n = eps.dim();
        prop_assume!(n >= 3);
        let pair = if seed % 2 == 0 {
            BiorthogonalPair::identity(n)
        } else {
            riesz_pair(&random_riesz(n, 5.0, seed).unwrap()).unwrap()
        };
        let a = pseudo_boson_ladders(&eps, &pair, 1).unwrap();
        let b = ladders_from_gammas(&GammaData::pseudo_boson(&eps), &pair, 1).unwrap();
        let scale = a.t.norm().max(1.0);
        prop_assert!((&a.t.matrix - &b.t.matrix).norm() <= 1e-13 * scale);
        prop_assert!((&a.s.matrix - &b.s.matrix).norm() <= 1e-13 * scale);
        for (x, y) in a.alpha.values().iter().zip(b.alpha.values()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0));
        }
        let x = build_x(&pair, &a.alpha).unwrap();
        prop_assert!((&x.matrix - &b.x.matrix).norm() <= 1e-12 * x.norm().max(1.0));
        prop_assert_eq!(b.x.matrix.nrows(), n);
    }
}
