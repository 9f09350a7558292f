use covtest_core::covmodels::CovarianceModel;
use covtest_core::sampling::sample;

#[test]
fn identity_sample_has_near_zero_covariance() {
    let (n, p) = (100_000, 4);
    let s = sample(&CovarianceModel::identity(p).unwrap(), n, 1.0, 31).unwrap();
    let y = s.y();
    let bound = 4.0 / (n as f64).sqrt();
    for i in 0..p {
        for j in (i + 1)..p {
            let cov = y.column(i).dot(&y.column(j)) / n as f64;
            assert!(cov.abs() < bound, "cov({i},{j}) = {cov}");
        }
        let var = y.column(i).dot(&y.column(i)) / n as f64;
        assert!((var - 1.0).abs() < 0.02, "var({i}) = {var}");
    }
}

#[test]
fn banded_model_covariance_is_reproduced() {
    let model = CovarianceModel::toeplitz(&[1.0, 0.4, -0.2, 0.0, 0.0]).unwrap();
    let n = 100_000;
    let s = sample(&model, n, 1.0, 5).unwrap();
    let y = s.y();
    for (lag, want) in [(1, 0.4), (2, -0.2), (3, 0.0)] {
        let cov = y.column(0).dot(&y.column(lag)) / n as f64;
        assert!((cov - want).abs() < 5.0 / (n as f64).sqrt(), "lag {lag}: {cov}");
    }
}
