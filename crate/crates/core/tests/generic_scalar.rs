use schur_cert::block::BlockMatrix;
use schur_cert::extremum::{classify_critical_point, example_l2_functional, Classification};
use schur_cert::linalg::Tolerances;
use schur_cert::oracle::{compare_with_oracle, standard_instance};
use schur_cert::{check_nn, check_pd, check_pd_3x3, sym_eig_min, BlockMatrixF32, CheckMode, NnVerdict, TolerancesF32};

#[test]
fn f32_criteria_follow_f64_on_the_corpus() {
    let tol32 = TolerancesF32::default();
    let mut compared = 0;
    for seed in 0..100 {
        let b = standard_instance(seed, 5);
        let c = compare_with_oracle(&b, &Tolerances::default()).unwrap();
        // f32 thresholds are coarser, so stay well away from zero
        if c.lambda_min.abs() < 1e-2 * c.scale {
            continue;
        }
        let b32: BlockMatrixF32 = b.cast();
        let pd = check_pd(&b32, &tol32, CheckMode::EarlyExit).unwrap();
        assert_eq!(pd.is_positive_definite(), c.oracle_pd, "seed {seed}");
        let nn = check_nn(&b32, &tol32).unwrap();
        if nn.verdict != NnVerdict::PreconditionFailed {
            assert_eq!(nn.verdict == NnVerdict::Nonnegative, c.oracle_nn, "seed {seed}");
        }
        compared += 1;
    }
    assert!(compared > 80);
}

#[test]
fn f32_l2_example_is_a_strong_min() {
    let phi = example_l2_functional::<f32>(3).unwrap();
    let y = vec![vec![0.0f32; 3]; 3];
    let r = classify_critical_point(&phi, &y, &TolerancesF32::default(), Some(1e-2), Some(1e-3)).unwrap();
    assert_eq!(r.classification, Classification::StrongLocalMin);
    assert!(check_pd_3x3(&r.hessian, &TolerancesF32::default())
        .unwrap()
        .is_positive_definite());
}

#[test]
fn f32_identity_margins() {
    let b = BlockMatrix::<f32>::identity(&[2, 3]);
    let lam = sym_eig_min(&b.flatten(), &TolerancesF32::default()).unwrap();
    assert!((lam - 1.0).abs() < 1e-6);
}
