//! Closed-form least-squares cross-validation against brute force.

use bernstein_core::estimators::{z_kernel, BatchEstimator, BatchKind, DensityEstimate, EvalGrid, RecursiveEstimator};
use bernstein_core::schedules::{OrderSchedule, StepsizeSchedule};
use bernstein_core::selection::{
    default_exponent_grid, default_order_candidates, lscv_batch, lscv_generic, lscv_recursive,
    lscv_vitale,
};
use bernstein_core::simulate::{derive_seed, sample_zoo, ZooId};
use bernstein_core::Sample;

fn samples() -> Vec<Sample> {
    let mut out = Vec::new();
    for n in [10usize, 30, 50] {
        for r in 0..20u64 {
            let id = ZooId::ALL[(r % 10) as usize];
            out.push(sample_zoo(id, n, derive_seed(&[n as u64, r])).unwrap());
        }
    }
    out
}

/// `∫ f̂² - (2/n) Σ f̂_{-i}(X_i)` by refitting without each point.
fn naive_batch(sample: &Sample, kind: BatchKind, m: usize) -> f64 {
    let grid = EvalGrid::shared(512);
    let full = BatchEstimator::new(kind, m, sample).unwrap();
    let v = full.eval_grid(&grid);
    let isq: f64 = v.iter().zip(grid.weights()).map(|(a, w)| w * a * a).sum();
    let loo: f64 = (0..sample.len())
        .map(|i| BatchEstimator::new(kind, m, &sample.without(i)).unwrap().eval(sample.values()[i]))
        .sum();
    isq - 2.0 / sample.len() as f64 * loo
}

#[test]
fn batch_closed_forms_match_refitting() {
    for sample in samples() {
        for (kind, ms) in [
            (BatchKind::Vitale, vec![2usize, 7, 20]),
            (BatchKind::Leblanc, vec![2, 8, 24]),
            (BatchKind::Generalized { b: 3 }, vec![3, 12, 30]),
        ] {
            let r = lscv_batch(&sample, kind, &ms).unwrap();
            for (m, score) in ms.iter().zip(&r.scores) {
                let want = naive_batch(&sample, kind, *m);
                assert!((score - want).abs() <= 1e-10, "{kind} n={} m={m}: {score} vs {want}", sample.len());
            }
        }
    }
}

#[test]
fn generic_matches_vitale_closed_form() {
    let sample = sample_zoo(ZooId::C, 40, 9).unwrap();
    let ms = [2usize, 10, 30];
    let closed = lscv_vitale(&sample, &ms).unwrap();
    let generic = lscv_generic(&sample, &ms, |m, s| BatchEstimator::new(BatchKind::Vitale, m, s)).unwrap();
    for (a, b) in closed.scores.iter().zip(&generic.scores) {
        assert!((a - b).abs() <= 1e-10);
    }
}

/// Deletes `X_i` and reruns the recursion over the rest in arrival order,
/// stepsizes re-indexed and each kernel kept at its own order.
fn naive_recursive(sample: &Sample, s: &StepsizeSchedule, o: &OrderSchedule) -> f64 {
    let xs = sample.values();
    let n = xs.len();
    let m: Vec<usize> = (1..=n).map(|j| o.order_at(j).unwrap()).collect();
    let grid = EvalGrid::shared(512);
    let mut full = RecursiveEstimator::with_grid(grid.clone(), *s, *o);
    full.update_all(xs).unwrap();
    let isq: f64 = full.values().iter().zip(grid.weights()).map(|(a, w)| w * a * a).sum();
    let mut loo = 0.0;
    for i in 0..n {
        let mut f = 0.0;
        let mut pos = 0;
        for j in (0..n).filter(|&j| j != i) {
            pos += 1;
            let g = s.gamma_at(pos).unwrap();
            f = (1.0 - g) * f + g * z_kernel(xs[i], xs[j], m[j]).unwrap();
        }
        loo += f;
    }
    isq - 2.0 / n as f64 * loo
}

#[test]
fn recursive_closed_form_matches_rerun() {
    let exps = [0.2, 0.45, 0.8];
    for sample in samples() {
        for s in [StepsizeSchedule::r1(), StepsizeSchedule::r2()] {
            let r = lscv_recursive(&sample, &s, 1.0, &exps).unwrap();
            for (a, score) in exps.iter().zip(&r.scores) {
                let want = naive_recursive(&sample, &s, &OrderSchedule::new(1.0, *a).unwrap());
                assert!(
                    (score - want).abs() <= 1e-10,
                    "gamma0={} n={} a={a}: {score} vs {want}",
                    s.gamma0(),
                    sample.len()
                );
            }
        }
    }
}

#[test]
fn argmin_and_degenerate_cases() {
    let s = Sample::unit(vec![0.4, 0.4]).unwrap();
    let r = lscv_vitale(&s, &[2]).unwrap();
    assert_eq!(r.argmin, 2);
    assert!(r.scores[0].is_finite());
    let sample = sample_zoo(ZooId::A, 30, 1).unwrap();
    let r = lscv_vitale(&sample, &default_order_candidates(30, 2)).unwrap();
    let best = r.scores.iter().cloned().fold(f64::INFINITY, f64::min);
    assert_eq!(r.scores[r.candidates.iter().position(|&m| m == r.argmin).unwrap()], best);
    assert!(r.integral_sq.iter().all(|&v| v >= 0.0));
    assert!(lscv_vitale(&Sample::unit(vec![0.3]).unwrap(), &[2]).is_err());
    assert!(lscv_batch(&sample, BatchKind::Generalized { b: 3 }, &[4]).is_err());
    let r = lscv_recursive(&sample, &StepsizeSchedule::r1(), 1.0, &default_exponent_grid()).unwrap();
    assert_eq!(r.candidates.len(), 90);
}
