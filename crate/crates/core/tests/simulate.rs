//! Samplers, the averaged-ISE harness and the auxiliary experiments.

use bernstein_core::asymptotics::TrueDensity;
use bernstein_core::estimators::BatchKind;
use bernstein_core::schedules::{OrderSchedule, StepsizeSchedule};
use bernstein_core::simulate::{
    bench_update, clt_check, convergence_slope, ise, log_log_slope, reports_to_csv,
    reports_to_markdown, run_table, sample_zoo, EstimatorSpec, TableConfig, ZooId,
};

#[test]
fn samplers_pass_kolmogorov_smirnov() {
    let n = 100_000;
    for id in ZooId::ALL {
        let d = id.density();
        let mut xs = sample_zoo(id, n, 2024).unwrap().values().to_vec();
        assert!(xs.iter().all(|x| (0.0..=1.0).contains(x)));
        xs.sort_by(f64::total_cmp);
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = d.cdf(x);
                (f - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - f)
            })
            .fold(0.0, f64::max);
        assert!(ks < 1.63 / (n as f64).sqrt(), "({id}) KS = {ks}");
    }
}

#[test]
fn beta_3_5_sample_mean() {
    let n = 100_000;
    let xs = sample_zoo(ZooId::A, n, 77).unwrap();
    let mean = xs.values().iter().sum::<f64>() / n as f64;
    // Var of B(3,5) is 15/576.
    let sd = (15.0f64 / 576.0 / n as f64).sqrt();
    assert!((mean - 0.375).abs() < 3.0 * sd, "{mean}");
}

#[test]
fn sampling_is_deterministic() {
    let a = sample_zoo(ZooId::J, 1000, 5).unwrap();
    let b = sample_zoo(ZooId::J, 1000, 5).unwrap();
    let c = sample_zoo(ZooId::J, 1000, 6).unwrap();
    assert_eq!(a.values(), b.values());
    assert_ne!(a.values(), c.values());
}

#[test]
fn ise_of_truth_is_zero() {
    for id in ZooId::ALL {
        let d = id.density();
        assert!(ise(&|x: f64| d.pdf(x), &d) < 1e-12);
    }
}

fn small_config() -> TableConfig {
    TableConfig {
        densities: vec![ZooId::A, ZooId::H],
        estimators: vec![
            EstimatorSpec::recursive(StepsizeSchedule::r1()),
            EstimatorSpec::batch(BatchKind::Vitale),
            EstimatorSpec::batch(BatchKind::Normalized { b: 2, eps: 1e-5 }),
        ],
        sizes: vec![50, 200],
        trials: 20,
        seed: 42,
    }
}

#[test]
fn tables_are_reproducible_and_consistent() {
    let a = run_table(&small_config()).unwrap();
    let b = run_table(&small_config()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 12);
    for r in &a {
        assert_eq!(r.ises.len(), 20);
        assert!(r.ises.iter().all(|&v| v >= 0.0));
        let mean = r.ises.iter().sum::<f64>() / 20.0;
        assert!((mean - r.mean_ise).abs() <= 1e-15 * mean.max(1.0));
    }
    let csv = reports_to_csv(&a);
    assert_eq!(csv.lines().count(), 13);
    let md = reports_to_markdown(&a);
    assert_eq!(md.lines().count(), 2 + 4);
    assert!(md.contains("**"));
}

#[test]
fn slope_needs_a_decade_and_positive_values() {
    let spec = EstimatorSpec::batch(BatchKind::Vitale);
    assert!(convergence_slope(&spec, ZooId::A, &[100, 200, 400], 5, 1).is_err());
    assert!(log_log_slope(&[100, 1000], &[0.0, 0.0]).is_err());
}

#[test]
fn clt_check_contract() {
    let s = StepsizeSchedule::r1();
    let o = OrderSchedule::new(1.0, 0.8).unwrap();
    assert!(clt_check(ZooId::A, 0.5, s, o, 500, 1, 3).is_err());
    assert!(clt_check(ZooId::A, 1.0, s, o, 500, 40, 3).is_err());
    let r = clt_check(ZooId::A, 0.5, s, o, 500, 200, 3).unwrap();
    assert_eq!(r.prediction.center, 0.0);
    assert_eq!(r.standardized.len(), 200);
    // Variance-dominated regime: centred at zero.
    assert!(r.mean.abs() < 4.0 * r.sd / (200f64).sqrt(), "{}", r.mean);
}

#[test]
fn bench_record_shape() {
    let r = bench_update(50, 50, 16, 1).unwrap();
    assert_eq!(r.recursive_block_medians.len(), 10);
    assert!(r.recursive_total_secs > 0.0 && r.batch_total_secs > 0.0);
    let r = bench_update(10, 20, 1, 1).unwrap();
    assert_eq!(r.grid_size, 1);
}
