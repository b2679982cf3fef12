//! Theory layer against independently computed values for the density zoo.

use bernstein_core::asymptotics::{
    c3, clt_prediction, delta1, delta2, lambda1, lambda2, optimal_mise, optimal_order,
    theoretical_mise, FiniteDifference, Method, TheoryConstants, TrueDensity, Tuning,
};
use bernstein_core::estimators::BatchKind;
use bernstein_core::schedules::{optimal_order_schedule, StepsizeSchedule};
use bernstein_core::simulate::{ZooDensity, ZooId};

/// `(C₁, C₂, C₄, C₅, C₆)` per density from a 30-digit symbolic/mpmath oracle.
const ORACLE: [(ZooId, [f64; 5]); 10] = [
    (ZooId::A, [0.636110146687282, 197.435897435897, 14.1958041958042, 1429.16666666667, 1907.45920745921]),
    (ZooId::B, [1.30856944461384, 19.2640692640693, 11.3636363636364, 34.077380952381, 66.9253923160173]),
    (ZooId::C, [0.997005291134353, 0.2, 1.2, 4.25, 6.8]),
    (ZooId::D, [0.717905879037935, 1147.33325111421, 29.2039558738475, 8529.85961704232, 10055.3539582567]),
    (ZooId::E, [0.788116018162871, 6507.6393173727, 40.2045394011177, 7065.45958878154, 7720.24389685268]),
    (ZooId::F, [0.97233979565056, 45.1787795537796, 2.41258741258741, 75.4320594775728, 94.0402113399826]),
    (ZooId::G, [0.997005291134353, 0.376190476190476, 0.554761904761905, 0.363262977915521, 0.34016191067184]),
    (ZooId::H, [0.914215899898198, 0.0164073614775329, 0.153395580791928, 0.0091145625946475, 0.00435001897387568]),
    (ZooId::I, [0.872580073273043, 0.00573085939781788, 0.0269206077650307, 0.0067802766801972, 0.00669092767170123]),
    (ZooId::J, [1.0104863535086, 0.622257579589166, 0.925496986688364, 0.398172047433668, 0.298476294902755]),
];

fn oracle(id: ZooId) -> TheoryConstants {
    let c = ORACLE.iter().find(|(d, _)| *d == id).unwrap().1;
    TheoryConstants::from_parts(c[0], c[1], c[2], c[3], c[4], 0.0)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn zoo_constants_match_oracle() {
    for (id, c) in ORACLE {
        let tc = TheoryConstants::compute(&id.density()).unwrap();
        let got = [tc.c1, tc.c2, tc.c4, tc.c5, tc.c6];
        for (k, (g, w)) in got.iter().zip(c).enumerate() {
            assert!(rel(*g, w) < 1e-9, "density {id} constant #{k}: {g} vs {w}");
        }
    }
}

#[test]
fn delta_values_at_midpoint() {
    let cases = [
        (ZooId::A, -1.640625, -3.828125, 1.640625),
        (ZooId::C, 0.75, -0.5, 0.75),
        (ZooId::H, 0.183153382281972, -0.104216182366174, 0.937745317283698),
        (ZooId::J, 0.735442941136076, -0.19179493192153, 0.734759448379595),
    ];
    for (id, d1, d2, f) in cases {
        let d = id.density();
        assert!((delta1(&d, 0.5) - d1).abs() < 1e-12, "{id}");
        assert!((delta2(&d, 0.5) - d2).abs() < 1e-12, "{id}");
        assert!((d.pdf(0.5) - f).abs() < 1e-12, "{id}");
    }
}

#[test]
fn finite_differences_track_analytic_derivatives() {
    for id in ZooId::ALL {
        let exact = id.density();
        let pdf = exact.clone();
        let fd = FiniteDifference::new(move |x| pdf.pdf(x));
        let xs: Vec<f64> = (1..=101).map(|i| i as f64 / 102.0).collect();
        for order in 1..=4 {
            let scale = xs
                .iter()
                .map(|&x| exact.derivative(order, x).abs())
                .fold(1.0, f64::max);
            for &x in &xs {
                let (a, b) = (exact.derivative(order, x), fd.derivative(order, x));
                assert!(
                    (a - b).abs() <= 1e-6 * scale,
                    "density {id}, order {order}, x = {x}: {a} vs {b}"
                );
            }
        }
    }
}

#[test]
fn lambda_identities() {
    assert!((lambda1(2) - c3()).abs() < 1e-14);
    assert_eq!(lambda2(2), 2.5);
    assert!((lambda1(3) - 1.333677395517585).abs() < 1e-13);
}

// The optimal-MISE closed forms evaluated at the oracle constants, compared
// with the published averaged-ISE tables (which agree with them to the
// printed precision).
#[test]
fn optimal_mise_matches_published_tables() {
    let ns = [50usize, 200, 500];
    let plain_columns: [(ZooId, [[f64; 4]; 3]); 4] = [
        (ZooId::A, [[0.085389, 0.088252, 0.089350, 0.092738], [0.028167, 0.025737, 0.026057, 0.027045], [0.013533, 0.011398, 0.011540, 0.011977]]),
        (ZooId::B, [[0.145441, 0.129385, 0.130996, 0.135963], [0.047977, 0.037733, 0.038202, 0.039651], [0.023050, 0.016710, 0.016918, 0.017560]]),
        (ZooId::C, [[0.074634, 0.061163, 0.061925, 0.064273], [0.024620, 0.017837, 0.018059, 0.0187441], [0.011828, 0.007899, 0.007997, 0.0083012]]),
        (ZooId::H, [[0.046147, 0.042890, 0.043424, 0.04507], [0.015222, 0.012508, 0.012664, 0.013144], [0.007313, 0.005539, 0.005608, 0.005821]]),
    ];
    let methods = [
        Method::Batch(BatchKind::Vitale),
        Method::Recursive(StepsizeSchedule::r1()),
        Method::Recursive(StepsizeSchedule::r2()),
        Method::Recursive(StepsizeSchedule::r3()),
    ];
    for (id, rows) in plain_columns {
        let tc = oracle(id);
        for (row, n) in rows.iter().zip(ns) {
            for (want, m) in row.iter().zip(&methods) {
                let got = optimal_mise(&tc, m, n).unwrap();
                assert!(rel(got, *want) < 2e-4, "({id}) n={n} {m:?}: {got} vs {want}");
            }
        }
    }
    let corrected_columns: [(ZooId, [[f64; 4]; 3]); 2] = [
        (ZooId::A, [[0.08504, 0.08687, 0.08874, 0.10597], [0.02480, 0.02533, 0.02587, 0.03090], [0.01098, 0.01122, 0.01146, 0.01368]]),
        (ZooId::H, [[0.04133, 0.04222, 0.04312, 0.03872], [0.01205, 0.01231, 0.01257, 0.01129], [0.00533, 0.00545, 0.00557, 0.00500]]),
    ];
    let kinds = [
        BatchKind::Leblanc,
        BatchKind::Generalized { b: 3 },
        BatchKind::Generalized { b: 4 },
        BatchKind::Multiplicative { b: 2, eps: 1e-5 },
    ];
    for (id, rows) in corrected_columns {
        let tc = oracle(id);
        for (row, n) in rows.iter().zip(ns) {
            for (want, k) in row.iter().zip(kinds) {
                let got = optimal_mise(&tc, &Method::Batch(k), n).unwrap();
                assert!(rel(got, *want) < 2e-3, "({id}) n={n} {k}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn leading_mise_at_optimal_order_approaches_optimum() {
    let tc = oracle(ZooId::A);
    let n = 1_000_000;
    for method in [
        Method::Recursive(StepsizeSchedule::r1()),
        Method::Batch(BatchKind::Vitale),
        Method::Batch(BatchKind::Leblanc),
        Method::Batch(BatchKind::Generalized { b: 3 }),
    ] {
        let m = optimal_order(&tc, &method, n).unwrap();
        let tuning = match method {
            Method::Recursive(s) => Tuning::Recursive {
                stepsize: s,
                orders: optimal_order_schedule(&tc, &s).unwrap(),
            },
            Method::Batch(kind) => Tuning::Batch { kind, m },
        };
        let at_m = theoretical_mise(&tc, &tuning, n).unwrap();
        let best = optimal_mise(&tc, &method, n).unwrap();
        assert!(at_m >= best * (1.0 - 1e-9), "{method:?}");
        assert!(rel(at_m, best) < 0.01, "{method:?}: {at_m} vs {best}");
    }
}

#[test]
fn recursive_beats_vitale_for_large_samples() {
    for (id, _) in ORACLE {
        let tc = oracle(id);
        let r = optimal_mise(&tc, &Method::Recursive(StepsizeSchedule::r1()), 1_000_000).unwrap();
        let v = optimal_mise(&tc, &Method::Batch(BatchKind::Vitale), 1_000_000).unwrap();
        assert!(r < v, "({id}) recursive {r} vs vitale {v}");
    }
}

#[test]
fn clt_variance_matches_closed_form() {
    let d: ZooDensity = ZooId::A.density();
    let tc = oracle(ZooId::A);
    for s in [StepsizeSchedule::r1(), StepsizeSchedule::r2(), StepsizeSchedule::r3()] {
        let o = optimal_order_schedule(&tc, &s).unwrap();
        let p = clt_prediction(&tc, &d, 0.5, &s, &o).unwrap();
        let g0 = s.gamma0();
        let psi = (std::f64::consts::PI).sqrt().recip();
        let want = g0 * c3() * 1.640625 * psi / (2.0 * g0 - 8.0 / 9.0);
        assert!(rel(p.variance, want) < 1e-12);
        let c = g0.powf(-0.5) * o.c().powf(-2.25);
        let want_center = -2.0 * c * -3.828125 / (1.0 - 4.0 / (9.0 * g0));
        assert!(rel(p.center, want_center) < 1e-12);
    }
}
