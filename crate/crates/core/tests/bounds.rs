use escape_core::bounds::*;
use escape_core::precise::Precise;
use num_bigint::BigUint;
use num_rational::BigRational;

#[test]
fn poisson_tail_against_exact_series() {
    // P[X >= 30] for X ~ Poisson(10): 1 - e^{-10} sum_{k<30} 10^k / k!
    let mut partial = BigRational::from_integer(0.into());
    let mut term = BigRational::from_integer(1.into());
    for k in 0..30u32 {
        partial += &term;
        term *= BigRational::new(10.into(), (k + 1).into());
    }
    let e10 = Precise::exp_neg_one().powi(10);
    let cdf = e10.mul(&Precise::from_ratio(&partial).unwrap());
    let tail = Precise::from_u64(1).sub(&cdf).unwrap();
    let got = poisson_tail_exact(10.0, 30).unwrap();
    assert!((got - tail.mid_f64()).abs() <= 1e-12 * tail.mid_f64());
    assert!((got - 2.509_951_201_527_907_8e-7).abs() <= 1e-19);
}

#[test]
fn poisson_lemmas_on_the_grid() {
    let lambdas = [0.5, 1.0, 2.0, 5.0, 10.0, 20.0];
    let ts = [0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0];
    let report = poisson_lemma_report(&lambdas, &ts, DEFAULT_THETA).unwrap();
    assert!(report.all_pass(), "{:?}", report.failures().collect::<Vec<_>>());
    assert_eq!(report.rows.len(), lambdas.len() * (2 * ts.len() + 3));
    assert!((c1().unwrap() - 1.25643).abs() < 1e-4);
    assert!(c2(DEFAULT_THETA) > 0.0 && c3() > 0.0);
    assert!(poisson_lemma_report(&[1.0], &[1.0], 3.0).is_err());
}

#[test]
fn binomial_tails_on_the_grid() {
    let report = binomial_corollary_report(&[1, 5, 20, 100], &[0.1, 0.5, 0.9], &[0.0, 1.0, 3.0, 10.0]).unwrap();
    assert!(report.all_pass(), "{:?}", report.failures().collect::<Vec<_>>());
    let (u, d) = binomial_tails(4, 0.5, 2.0).unwrap();
    assert!((u - 1.0 / 16.0).abs() < 1e-15 && (d - 1.0 / 16.0).abs() < 1e-15);
}

#[test]
fn heat_kernels() {
    let sup = discrete_kernel_sup_check(4096, 5642, 4);
    assert!(sup.pass(), "{sup:?}");
    assert!(sup.sup < 0.5642 && sup.last_value > 0.5641);
    assert_eq!(discrete_kernel_sup_check(10, 5000, 4).first_failure, Some(2));
    // n = 2: C(4, 2) / 16
    let p = discrete_heat_kernel_exact(2, 0);
    assert_eq!(p, BigRational::new(BigUint::from(3u32).into(), BigUint::from(8u32).into()));
    for &t in &[1.0, 4.0, 16.0] {
        let a = continuous_heat_kernel(t, 0).unwrap();
        let b = bessel_i0_scaled(t).unwrap();
        assert!(((a - b) / b).abs() < 1e-10, "t = {t}");
    }
    let rep = continuous_kernel_report(&[1.0, 10.0, 100.0], &[0, 1, 5], 1.0, &[1.0, 4.0, 16.0], 10).unwrap();
    assert!(rep.all_pass());
}
