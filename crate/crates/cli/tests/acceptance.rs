//! Acceptance suite: one test per criterion, each printing a pass line.
//! Run with `cargo test -p membed-cli --test acceptance -- --nocapture`
//! to see the per-criterion lines.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use membed_cli::{build_report, cmd_embed};
use membed_core::circulant::{
    circ3_embed, circ3_exp, circ4_embed, circ4_exp, circ_general_embed, circ_general_exp,
    f_char, f_char_taylor, CirculantRates,
};
use membed_core::classes3::{
    const_input_exceptional, dstoch_embed, dstoch_exp, exceptional_gap, j3, multi_embeddings,
    sym_embed, sym_exp,
};
use membed_core::diagnostics::necessary_conditions;
use membed_core::equalinput::{ei_embed, EqualInputParams};
use membed_core::kendall2::embed_2x2;
use membed_core::logsearch::BranchWindow;
use membed_core::matcore::{
    expm, principal_log, validate_generator, validate_stochastic, RateMatrix, SquareMatrix,
    DEFAULT_TOL,
};

const PI: f64 = std::f64::consts::PI;

fn pass(criterion: usize, label: &str) {
    println!("criterion {criterion:2} ({label}): PASS");
}

fn markov(rows: &[Vec<f64>]) -> membed_core::matcore::StochasticMatrix {
    validate_stochastic(&SquareMatrix::from_rows(rows).unwrap(), DEFAULT_TOL).unwrap()
}

fn random_rate(rng: &mut ChaCha8Rng, d: usize, bound: f64) -> RateMatrix {
    let mut q = SquareMatrix::zeros(d);
    for i in 0..d {
        let mut off = 0.0;
        for j in 0..d {
            if i != j {
                let v = rng.random_range(0.0..bound / (d as f64 - 1.0));
                q[(i, j)] = v;
                off += v;
            }
        }
        q[(i, i)] = -off;
    }
    validate_generator(&q, DEFAULT_TOL).unwrap()
}

#[test]
fn criterion_01_kendall_equivalence_on_grid() {
    let start = Instant::now();
    let n = 200;
    for i in 0..n {
        for j in 0..n {
            let a = i as f64 / (n - 1) as f64;
            let b = j as f64 / (n - 1) as f64;
            let det = 1.0 - a - b;
            let m = markov(&[vec![1.0 - a, a], vec![b, 1.0 - b]]);
            let v = embed_2x2(&m).unwrap();
            // the det = 0 face is excluded at the declared tolerance
            let expected = det > 1e-9;
            assert_eq!(
                v.is_embeddable(),
                expected,
                "(a,b) = ({a},{b}), det = {det}"
            );
            if expected {
                let q = &v.generators[0].q;
                let residual = expm(q.matrix(), 1.0).sub(m.matrix()).inf_norm();
                assert!(residual <= 1e-10, "round-trip {residual:.3e} at ({a},{b})");
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "grid took {elapsed:?}");
    pass(1, "Kendall equivalence, 200x200 grid");
}

#[test]
fn criterion_02_power_paradox_reproduction() {
    // M itself is rejected
    let m = markov(&[vec![0.5, 0.5], vec![1.0, 0.0]]);
    let v = embed_2x2(&m).unwrap();
    assert!(v.is_not_embeddable());

    // M^2 is accepted and the half-generator reproduces the alternative
    // positive root
    let m2 = markov(&[vec![0.75, 0.25], vec![0.5, 0.5]]);
    let v2 = embed_2x2(&m2).unwrap();
    assert!(v2.is_embeddable());
    let half_root = expm(v2.generators[0].q.matrix(), 0.5);
    let alt = SquareMatrix::from_rows(&[
        vec![5.0 / 6.0, 1.0 / 6.0],
        vec![1.0 / 3.0, 2.0 / 3.0],
    ])
    .unwrap();
    let err = half_root.sub(&alt).max_abs();
    assert!(err <= 1e-12, "alternative root error {err:.3e}");
    // and it squares back to M^2
    assert!(half_root.matmul(&half_root).sub(m2.matrix()).max_abs() <= 1e-12);
    pass(2, "rejected matrix with embeddable square");
}

#[test]
fn criterion_03_equal_input_dichotomy_d4() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut checked = 0;
    while checked < 1000 {
        let c_sum = rng.random_range(0.0..1.5);
        let mut w: Vec<f64> = (0..4).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x *= c_sum / total);
        let p = EqualInputParams::new(w).unwrap();
        if !p.markov_admissible() {
            continue;
        }
        let m = match validate_stochastic(&p.matrix(), DEFAULT_TOL) {
            Ok(m) => m,
            Err(_) => continue,
        };
        checked += 1;
        let v = ei_embed(&m).unwrap();
        let expected = c_sum < 1.0 - 1e-9;
        if (c_sum - 1.0).abs() <= 1e-9 {
            assert!(v.is_not_embeddable());
        } else {
            assert_eq!(v.is_embeddable(), expected, "c = {c_sum}");
        }
        let det = m.matrix().det();
        let predicted = (1.0 - p.c_sum).powi(3);
        let denom = predicted.abs().max(1e-300);
        assert!(
            ((det - predicted) / denom).abs() <= 1e-10,
            "det {det} vs (1-c)^3 = {predicted}"
        );
    }
    pass(3, "equal-input dichotomy at d = 4, 1000 samples");
}

#[test]
fn criterion_04_exceptional_matrix_constants() {
    let delta = exceptional_gap() / 3.0;
    // 0.00144 to three significant figures
    assert!((delta * 1e5).round() / 1e5 == 0.00144, "delta = {delta}");

    let c = 1.0 + 3.0 * delta;
    let m_mat = SquareMatrix::identity(3).add(&j3().scale(c));
    let det = m_mat.det();
    let expected = (-2.0 * PI * 3.0f64.sqrt()).exp();
    assert!(((det - expected) / expected).abs() <= 1e-12);

    // the embed command finds the rotation generator (2 pi / sqrt 3) K1
    let dir = std::env::temp_dir().join("membed-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("exceptional.json");
    std::fs::write(&path, membed_core::matcore::io::to_json(&m_mat)).unwrap();
    let (code, output) = cmd_embed(path.to_str().unwrap(), 8, 1e-9);
    assert_eq!(code, 0, "embed exit code; output: {output}");
    let report: serde_json::Value = serde_json::from_str(&output).unwrap();
    assert_eq!(report["verdict"], "embeddable");
    assert_eq!(report["generators"][0]["provenance"], "doubly_stochastic");
    let residual = report["generators"][0]["residual"].as_f64().unwrap();
    assert!(residual <= 1e-9, "residual {residual:.3e}");
    let rows = report["generators"][0]["matrix"]["rows"].as_array().unwrap();
    let q01 = rows[0][1].as_f64().unwrap();
    let q02 = rows[0][2].as_f64().unwrap();
    let q10 = rows[1][0].as_f64().unwrap();
    let target = 2.0 * PI / 3.0f64.sqrt();
    // (2 pi / sqrt 3) K1 has first row (-t, t, 0)
    assert!((q01 - target).abs() <= 1e-9 && q02.abs() <= 1e-9 && q10.abs() <= 1e-9);
    pass(4, "exceptional constant-input matrix constants");
}

#[test]
fn criterion_05_exceptional_threshold() {
    // e^(-pi sqrt 3) = 4.333420509983131e-3
    let bound = 1.0 + exceptional_gap();
    assert!((bound - 1.0043334205).abs() < 1e-9);
    let v = const_input_exceptional(bound).unwrap();
    assert!(v.is_embeddable(), "boundary must be included");
    let v = const_input_exceptional(bound + 1e-9).unwrap();
    assert!(v.is_not_embeddable(), "beyond the boundary must be rejected");
    pass(5, "exceptional threshold 1 + e^(-pi sqrt 3)");
}

#[test]
fn criterion_06_circulant_jacobians() {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let h = 1e-6;
    for _ in 0..100 {
        let (a, b) = (rng.random_range(0.05..2.0), rng.random_range(0.05..2.0));
        let col = |f: &dyn Fn(f64, f64) -> (f64, f64)| {
            let da = f(a + h, b);
            let db = f(a - h, b);
            let dc = f(a, b + h);
            let dd = f(a, b - h);
            [
                [(da.0 - db.0) / (2.0 * h), (dc.0 - dd.0) / (2.0 * h)],
                [(da.1 - db.1) / (2.0 * h), (dc.1 - dd.1) / (2.0 * h)],
            ]
        };
        let j = col(&circ3_exp);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let expected = (-3.0 * (a + b)).exp();
        assert!(
            ((det - expected) / expected).abs() <= 1e-5,
            "d=3 Jacobian at ({a},{b}): {det} vs {expected}"
        );
    }
    for _ in 0..100 {
        let p = [
            rng.random_range(0.05..1.5),
            rng.random_range(0.05..1.5),
            rng.random_range(0.05..1.5),
        ];
        let mut j = [[0.0; 3]; 3];
        for (col, _) in p.iter().enumerate() {
            let mut hi = p;
            let mut lo = p;
            hi[col] += h;
            lo[col] -= h;
            let fh = circ4_exp(hi[0], hi[1], hi[2]);
            let fl = circ4_exp(lo[0], lo[1], lo[2]);
            j[0][col] = (fh.0 - fl.0) / (2.0 * h);
            j[1][col] = (fh.1 - fl.1) / (2.0 * h);
            j[2][col] = (fh.2 - fl.2) / (2.0 * h);
        }
        let det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1])
            - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
            + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
        let expected = (-4.0 * (p[0] + p[1] + p[2])).exp();
        assert!(
            ((det - expected) / expected).abs() <= 1e-5,
            "d=4 Jacobian at {p:?}: {det} vs {expected}"
        );
    }
    pass(6, "circulant Jacobian determinants, 100 points each");
}

#[test]
fn criterion_07_round_trip_inversion_per_family() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let n = 500;

    // circ3
    for _ in 0..n {
        let (a, b) = (rng.random_range(0.0..2.0), rng.random_range(0.0..2.0));
        let (x, y) = circ3_exp(a, b);
        let v = circ3_embed(x, y).unwrap();
        assert!(v.is_embeddable(), "false negative at circ3 ({a},{b})");
        let hit = v.generators.iter().any(|w| {
            (w.q.matrix()[(0, 1)] - a).abs() <= 1e-7 && (w.q.matrix()[(0, 2)] - b).abs() <= 1e-7
        });
        assert!(hit, "circ3 parameters not recovered at ({a},{b})");
    }

    // circ4
    for _ in 0..n {
        let p = [
            rng.random_range(0.0..1.5),
            rng.random_range(0.0..1.5),
            rng.random_range(0.0..1.5),
        ];
        let (x, y, z) = circ4_exp(p[0], p[1], p[2]);
        let v = circ4_embed(x, y, z).unwrap();
        assert!(v.is_embeddable(), "false negative at circ4 {p:?}");
        let hit = v.generators.iter().any(|w| {
            (0..3).all(|r| (w.q.matrix()[(0, r + 1)] - p[r]).abs() <= 1e-7)
        });
        assert!(hit, "circ4 parameters not recovered at {p:?}");
    }

    // general circulant at d = 5
    for _ in 0..n {
        let alpha: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.2)).collect();
        let rates = CirculantRates::new(5, alpha.clone()).unwrap();
        let coeffs = circ_general_exp(&rates).unwrap();
        let v = circ_general_embed(&coeffs);
        assert!(v.is_embeddable(), "false negative at circ5 {alpha:?}");
        let hit = v.generators.iter().any(|w| {
            (0..4).all(|r| (w.q.matrix()[(0, r + 1)] - alpha[r]).abs() <= 1e-7)
        });
        assert!(hit, "circ5 parameters not recovered at {alpha:?}");
    }

    // symmetric d = 3
    for _ in 0..n {
        let p = [
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..2.0),
        ];
        let m = sym_exp(p[0], p[1], p[2]);
        let v = sym_embed(&m).unwrap();
        assert!(v.is_embeddable(), "false negative at sym3 {p:?}");
        let hit = v.generators.iter().any(|w| {
            (w.q.matrix()[(0, 1)] - p[0]).abs() <= 1e-7
                && (w.q.matrix()[(0, 2)] - p[1]).abs() <= 1e-7
                && (w.q.matrix()[(1, 2)] - p[2]).abs() <= 1e-7
        });
        assert!(hit, "sym3 parameters not recovered at {p:?}");
    }

    // doubly stochastic d = 3
    for _ in 0..n {
        let (al, be, ga): (f64, f64, f64) = (
            rng.random_range(0.05..1.5),
            rng.random_range(0.05..1.5),
            rng.random_range(0.05..1.5),
        );
        let eps = rng.random_range(-1.0..1.0) * al.min(be).min(ga);
        let m = dstoch_exp(al, be, ga, eps).unwrap();
        let v = dstoch_embed(&m).unwrap();
        assert!(v.is_embeddable(), "false negative at dstoch {al},{be},{ga},{eps}");
        let hit = v.generators.iter().any(|w| {
            let q = w.q.matrix();
            ((q[(0, 1)] + q[(1, 0)]) / 2.0 - al).abs() <= 1e-7
                && ((q[(0, 2)] + q[(2, 0)]) / 2.0 - be).abs() <= 1e-7
                && ((q[(1, 2)] + q[(2, 1)]) / 2.0 - ga).abs() <= 1e-7
                && ((q[(0, 1)] - q[(1, 0)]) / 2.0 - eps).abs() <= 1e-7
        });
        assert!(hit, "dstoch parameters not recovered");
    }

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "round-trip suite took {elapsed:?}"
    );
    pass(7, "500 forward-inverse round trips per family");
}

#[test]
fn criterion_08_f_function_identities() {
    for d in 2..=8usize {
        for &t in &[0.1f64, 1.0, 5.0] {
            let total: f64 = (0..d).map(|m| f_char(d, m, t)).sum();
            assert!(
                (total - t.exp()).abs() <= 1e-12 * t.exp().max(1.0),
                "sum identity d={d} t={t}"
            );
            for m in 0..d {
                let a = f_char(d, m, t);
                let b = f_char_taylor(d, m, t);
                assert!(
                    (a - b).abs() <= 1e-12 * (1.0 + a.abs()),
                    "taylor/character mismatch d={d} m={m} t={t}"
                );
            }
        }
    }
    // summatory identity over every divisor pair with D <= 8
    for (small, big) in [(2usize, 4usize), (2, 6), (2, 8), (3, 6), (4, 8)] {
        let k = big / small;
        for r in 0..small {
            for &t in &[0.1f64, 1.0, 5.0] {
                let lhs: f64 = (0..k).map(|l| f_char(big, l * small + r, t)).sum();
                let rhs = f_char(small, r, t);
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()),
                    "summatory identity ({small},{big}) r={r} t={t}"
                );
            }
        }
    }
    pass(8, "cyclic decomposition identities, d = 2..8");
}

#[test]
fn criterion_09_multi_embedding_counts() {
    let c = 1.0 - (-2.0 * PI * 3.0f64.sqrt()).exp() + 1e-6;
    let qs = multi_embeddings(c, 3).unwrap();
    assert!(qs.len() >= 2, "expected >= 2 embeddings, got {}", qs.len());
    let target = SquareMatrix::identity(3).add(&j3().scale(c));
    for q in &qs {
        assert!(expm(q.matrix(), 1.0).sub(&target).inf_norm() <= 1e-9);
    }
    let qs = multi_embeddings(0.5, 3).unwrap();
    assert_eq!(qs.len(), 1);
    pass(9, "multiple-embedding counts near the winding threshold");
}

#[test]
fn criterion_10_commuting_exponential_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let ts = [0.2, 0.5, 1.0, 1.7, 2.3];
    for iter in 0..200 {
        let commuting = iter % 2 == 0;
        let (a, b) = if commuting {
            let r1 = CirculantRates::new(
                3,
                vec![rng.random_range(0.0..1.5), rng.random_range(0.0..1.5)],
            )
            .unwrap();
            let r2 = CirculantRates::new(
                3,
                vec![rng.random_range(0.0..1.5), rng.random_range(0.0..1.5)],
            )
            .unwrap();
            (r1.matrix(), r2.matrix())
        } else {
            (
                random_rate(&mut rng, 3, 2.0).into_inner(),
                random_rate(&mut rng, 3, 2.0).into_inner(),
            )
        };
        let comm = a.matmul(&b).sub(&b.matmul(&a)).inf_norm();
        let identity_holds = ts.iter().all(|&t| {
            expm(&a, t)
                .matmul(&expm(&b, t))
                .sub(&expm(&a.add(&b), t))
                .inf_norm()
                <= 1e-10
        });
        assert_eq!(
            identity_holds,
            comm <= 1e-10,
            "iteration {iter}: identity {identity_holds}, commutator {comm:.3e}"
        );
    }
    pass(10, "commuting-exponential equivalence, 200 pairs");
}

#[test]
fn criterion_11_oracle_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    for _ in 0..1000 {
        let d = rng.random_range(2..=4usize);
        // entries bounded by 2 keep the generator spectrum strictly inside
        // the principal strip
        let q = random_rate(&mut rng, d, 2.0);
        let m = validate_stochastic(&expm(q.matrix(), 1.0), DEFAULT_TOL).unwrap();
        let report = necessary_conditions(&m);
        assert!(
            report.overall,
            "false negative on an embeddable matrix: {:?}",
            report.failures
        );
        let log = principal_log(m.matrix()).expect("principal branch applies");
        let err = log.sub(q.matrix()).inf_norm();
        assert!(err <= 1e-8, "log(exp Q) error {err:.3e}");
    }
    pass(11, "oracle soundness on 1000 random generators");
}

#[test]
fn full_pipeline_smoke_over_report() {
    // not a numbered criterion: the report builder stays consistent on one
    // example of each verdict
    let embeddable = markov(&[vec![0.75, 0.25], vec![0.25, 0.75]]);
    let r = build_report(&embeddable, &BranchWindow::default());
    assert_eq!(r.dim, 2);
    assert!(r.necessity.overall);
    assert!(!r.generators.is_empty());

    let negative = markov(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
    let r = build_report(&negative, &BranchWindow::default());
    assert!(matches!(
        r.verdict,
        membed_core::verdict::Verdict::NotEmbeddable
    ));
    assert!(!r.reasons.is_empty() || !r.necessity.overall);
}
