//! Cross-module invariants: semigroup laws, spectral containments,
//! logarithm round trips, uniqueness statements and class consistency,
//! exercised on seeded random families.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use membed_core::circulant::{circ_general_embed, detect_circulant, CirculantRates};
use membed_core::diagnostics::{limit_matrix, necessary_conditions};
use membed_core::equalinput::{detect_equal_input, ei_compose, ei_embed, EqualInputParams};
use membed_core::kendall2::embed_2x2;
use membed_core::logsearch::{filter_generators, real_log_branches, BranchWindow};
use membed_core::matcore::{
    expm, principal_log, spectrum, validate_generator, validate_stochastic, RateMatrix,
    SquareMatrix, DEFAULT_TOL,
};

/// Random rate matrix with off-diagonal entries below `scale/(d-1)`, so
/// every entry of Q is bounded by `scale`.
fn random_rate(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> RateMatrix {
    let mut q = SquareMatrix::zeros(d);
    for i in 0..d {
        let mut off = 0.0;
        for j in 0..d {
            if i != j {
                let v = rng.random_range(0.0..scale / (d as f64 - 1.0));
                q[(i, j)] = v;
                off += v;
            }
        }
        q[(i, i)] = -off;
    }
    validate_generator(&q, DEFAULT_TOL).unwrap()
}

#[test]
fn exponentials_of_generators_are_stochastic() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let d = rng.random_range(2..=4usize);
        let q = random_rate(&mut rng, d, 2.0);
        let t = rng.random_range(0.0..5.0);
        let e = expm(q.matrix(), t);
        validate_stochastic(&e, 1e-10).expect("exp(tQ) must be Markov");
        for s in e.row_sums() {
            assert!((s - 1.0).abs() <= 1e-12, "row sum {s}");
        }
    }
}

#[test]
fn semigroup_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let d = rng.random_range(2..=4usize);
        let q = random_rate(&mut rng, d, 2.0);
        let s = rng.random_range(0.0..4.0);
        let t = rng.random_range(0.0..4.0);
        let lhs = expm(q.matrix(), s).matmul(&expm(q.matrix(), t));
        let rhs = expm(q.matrix(), s + t);
        assert!(
            lhs.sub(&rhs).inf_norm() <= 1e-10,
            "semigroup violation {:.3e}",
            lhs.sub(&rhs).inf_norm()
        );
    }
}

#[test]
fn determinant_equals_exp_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..300 {
        let d = rng.random_range(2..=4usize);
        let q = random_rate(&mut rng, d, 3.0);
        let det = expm(q.matrix(), 1.0).det();
        let expected = q.matrix().trace().exp();
        assert!(
            ((det - expected) / expected).abs() <= 1e-10,
            "det {det} vs e^tr {expected}"
        );
    }
}

#[test]
fn principal_log_inverts_expm_inside_the_strip() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..200 {
        let d = rng.random_range(2..=4usize);
        // entries bounded by 2 keep the spectrum inside |Im| < pi
        let q = random_rate(&mut rng, d, 2.0);
        let m = expm(q.matrix(), 1.0);
        let l = principal_log(&m).expect("principal branch applies");
        assert!(
            l.sub(q.matrix()).inf_norm() <= 1e-8,
            "log(exp Q) != Q by {:.3e}",
            l.sub(q.matrix()).inf_norm()
        );
    }
}

#[test]
fn generator_spectrum_in_gershgorin_disk() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..200 {
        let d = rng.random_range(2..=4usize);
        let q = random_rate(&mut rng, d, 4.0);
        let mu = (0..d)
            .map(|i| -q.matrix()[(i, i)])
            .fold(0.0f64, f64::max);
        let spec = spectrum(q.matrix()).unwrap();
        for &(lambda, _) in &spec.eigenvalues {
            let dist = (lambda - Complex64::new(-mu, 0.0)).norm();
            assert!(
                dist <= mu + 1e-8 * (1.0 + mu),
                "eigenvalue {lambda} outside B_mu(-mu), mu = {mu}"
            );
        }
    }
}

#[test]
fn zero_eigenvalue_of_a_generator_is_semisimple() {
    // algebraic multiplicity of 0 equals the geometric one, d - rank(Q);
    // reducible generators supply multiplicities above 1
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for iter in 0..200 {
        let d = rng.random_range(2..=4usize);
        let q = if iter % 3 == 0 && d == 4 {
            // block-diagonal generator: zero eigenvalue of multiplicity 2
            let top = random_rate(&mut rng, 2, 2.0);
            let bottom = random_rate(&mut rng, 2, 2.0);
            let mut m = SquareMatrix::zeros(4);
            for i in 0..2 {
                for j in 0..2 {
                    m[(i, j)] = top.matrix()[(i, j)];
                    m[(i + 2, j + 2)] = bottom.matrix()[(i, j)];
                }
            }
            validate_generator(&m, DEFAULT_TOL).unwrap()
        } else {
            random_rate(&mut rng, d, 2.0)
        };
        let spec = spectrum(q.matrix()).unwrap();
        let algebraic = spec.multiplicity_near(Complex64::new(0.0, 0.0), 1e-8);
        let geometric = d - q.matrix().rank(1e-8);
        assert!(algebraic >= 1);
        assert_eq!(
            algebraic, geometric,
            "algebraic {algebraic} vs geometric {geometric} at iteration {iter}"
        );
    }
}

#[test]
fn commuting_exponential_equivalence() {
    // e^{tA} e^{tB} = e^{t(A+B)} over sampled t holds exactly when A and B
    // commute
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let ts = [0.2, 0.5, 1.0, 1.7, 2.3];
    for iter in 0..100 {
        let commuting = iter % 2 == 0;
        let (a, b) = if commuting {
            // circulant pairs commute
            let r1 = CirculantRates::new(3, vec![rng.random_range(0.0..1.5), rng.random_range(0.0..1.5)]).unwrap();
            let r2 = CirculantRates::new(3, vec![rng.random_range(0.0..1.5), rng.random_range(0.0..1.5)]).unwrap();
            (r1.matrix(), r2.matrix())
        } else {
            let a = random_rate(&mut rng, 3, 2.0).into_inner();
            let b = random_rate(&mut rng, 3, 2.0).into_inner();
            (a, b)
        };
        let comm_norm = a.matmul(&b).sub(&b.matmul(&a)).inf_norm();
        let identity_holds = ts.iter().all(|&t| {
            let lhs = expm(&a, t).matmul(&expm(&b, t));
            let rhs = expm(&a.add(&b), t);
            lhs.sub(&rhs).inf_norm() <= 1e-10
        });
        assert_eq!(
            identity_holds,
            comm_norm <= 1e-10,
            "iter {iter}: identity {identity_holds} but commutator norm {comm_norm:.3e}"
        );
    }
}

#[test]
fn necessary_conditions_have_no_false_negatives() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..300 {
        let d = rng.random_range(2..=4usize);
        let q = random_rate(&mut rng, d, 2.0);
        let m = validate_stochastic(&expm(q.matrix(), 1.0), DEFAULT_TOL).unwrap();
        let report = necessary_conditions(&m);
        assert!(
            report.overall,
            "embeddable matrix flagged: {:?}",
            report.failures
        );
    }
}

#[test]
fn limit_matrix_agrees_with_long_time_evolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let mut tested = 0;
    while tested < 60 {
        let d = rng.random_range(2..=4usize);
        let q = random_rate(&mut rng, d, 2.0);
        let m = validate_stochastic(&expm(q.matrix(), 1.0), DEFAULT_TOL).unwrap();
        // require a spectral gap so that t = 2^20 has converged
        let spec = spectrum(m.matrix()).unwrap();
        let sub_one = spec
            .eigenvalues
            .iter()
            .filter(|(z, _)| (z - Complex64::new(1.0, 0.0)).norm() > 1e-6)
            .fold(0.0f64, |mx, (z, _)| mx.max(z.norm()));
        if sub_one > 0.95 {
            continue;
        }
        tested += 1;
        let inf = limit_matrix(&m).unwrap();
        let long = expm(q.matrix(), 1_048_576.0);
        assert!(
            inf.matrix().sub(&long).inf_norm() <= 1e-7,
            "limit mismatch {:.3e}",
            inf.matrix().sub(&long).inf_norm()
        );
        // sigma(M_inf) within {0, 1}
        let lspec = spectrum(inf.matrix()).unwrap();
        for &(z, _) in &lspec.eigenvalues {
            let near0 = z.norm() <= 1e-7;
            let near1 = (z - Complex64::new(1.0, 0.0)).norm() <= 1e-7;
            assert!(near0 || near1, "limit eigenvalue {z}");
        }
    }
}

#[test]
fn kendall_uniqueness_against_branch_search() {
    // every Metzler logarithm the branch search finds at d = 2 equals the
    // closed-form generator
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..60 {
        let a = rng.random_range(0.0..1.0);
        let b = rng.random_range(0.0..1.0f64);
        if a + b >= 0.98 || a + b < 0.02 {
            continue;
        }
        let m = validate_stochastic(
            &SquareMatrix::from_rows(&[vec![1.0 - a, a], vec![b, 1.0 - b]]).unwrap(),
            DEFAULT_TOL,
        )
        .unwrap();
        let v = embed_2x2(&m).unwrap();
        assert!(v.is_embeddable());
        let closed = v.generators[0].q.matrix().clone();
        let logs = real_log_branches(&m, &BranchWindow { k_max: 8 }).unwrap();
        let gens = filter_generators(&logs, DEFAULT_TOL);
        assert_eq!(gens.len(), 1, "two-state generators must be unique");
        assert!(gens[0].matrix().sub(&closed).inf_norm() <= 1e-9);
    }
}

#[test]
fn equal_input_determinant_and_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..200 {
        let d = rng.random_range(2..=5usize);
        let c_sum = rng.random_range(0.01..0.99);
        let mut weights: Vec<f64> = (0..d).map(|_| rng.random_range(0.01..1.0)).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w *= c_sum / total);
        let p = EqualInputParams::new(weights).unwrap();
        assert!(p.markov_admissible());
        let det = p.matrix().det();
        let expected = (1.0 - p.c_sum).powi(d as i32 - 1);
        assert!(
            ((det - expected) / expected).abs() <= 1e-10,
            "det {det} vs (1-c)^(d-1) {expected}"
        );
        // composition stays inside the class and inside [0, 1)
        let q_sum = rng.random_range(0.01..0.99);
        let mut w2: Vec<f64> = (0..d).map(|_| rng.random_range(0.01..1.0)).collect();
        let t2: f64 = w2.iter().sum();
        w2.iter_mut().for_each(|w| *w *= q_sum / t2);
        let q = EqualInputParams::new(w2).unwrap();
        let composed = ei_compose(&p, &q);
        assert!(composed.c_sum >= 0.0 && composed.c_sum < 1.0);
        let direct = p.matrix().matmul(&q.matrix());
        assert!(direct.sub(&composed.matrix()).max_abs() <= 1e-12);
    }
}

#[test]
fn equal_input_generator_is_unique() {
    // perturbing the column parameters changes the exponential
    let p = EqualInputParams::new(vec![0.2, 0.35, 0.1]).unwrap();
    let m = membed_core::equalinput::ei_exp(&p);
    let v = ei_embed(&m).unwrap();
    assert!(v.is_embeddable());
    for delta in [1e-3, -1e-3] {
        let mut c2 = p.c_vec.clone();
        c2[0] += delta;
        c2[1] -= delta;
        let p2 = EqualInputParams::new(c2).unwrap();
        let m2 = membed_core::equalinput::ei_exp(&p2);
        assert!(
            m2.matrix().sub(m.matrix()).max_abs() > 1e-5,
            "distinct equal-input generators gave the same exponential"
        );
    }
}

#[test]
fn even_dimension_large_c_is_never_embeddable() {
    // d = 4 equal-input with c >= 1: the verdict is negative and the
    // branch search confirms no Metzler logarithm on a sampled family
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..40 {
        let c_sum = rng.random_range(1.01..1.6);
        let mut weights: Vec<f64> = (0..4).map(|_| rng.random_range(0.2..1.0)).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w *= c_sum / total);
        let p = EqualInputParams::new(weights).unwrap();
        if !p.markov_admissible() {
            continue;
        }
        let m = match validate_stochastic(&p.matrix(), DEFAULT_TOL) {
            Ok(m) => m,
            Err(_) => continue,
        };
        let v = ei_embed(&m).unwrap();
        assert!(v.is_not_embeddable(), "c = {c_sum} accepted at d = 4");
        let failed_necessary = !necessary_conditions(&m).overall;
        let no_metzler_log = match real_log_branches(&m, &BranchWindow { k_max: 6 }) {
            Ok(logs) => filter_generators(&logs, DEFAULT_TOL).is_empty(),
            Err(_) => true,
        };
        assert!(failed_necessary || no_metzler_log);
    }
}

#[test]
fn embeddable_circulants_are_circulant_embeddable() {
    // whenever the generic branch search finds a Metzler logarithm of a
    // circulant matrix, the circulant solver must succeed as well
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut hits = 0;
    for _ in 0..60 {
        let d = rng.random_range(3..=5usize);
        let alpha: Vec<f64> = (0..d - 1).map(|_| rng.random_range(0.0..0.8)).collect();
        let rates = CirculantRates::new(d, alpha).unwrap();
        let m = validate_stochastic(&expm(&rates.matrix(), 1.0), DEFAULT_TOL).unwrap();
        let found_generic = match real_log_branches(&m, &BranchWindow { k_max: 3 }) {
            Ok(logs) => !filter_generators(&logs, DEFAULT_TOL).is_empty(),
            Err(_) => false,
        };
        if found_generic {
            hits += 1;
            let coeffs = detect_circulant(&m, 1e-9).expect("exponential of circulant is circulant");
            assert!(circ_general_embed(&coeffs).is_embeddable());
        }
    }
    assert!(hits > 10, "branch search found too few witnesses ({hits})");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prop_exp_validates_and_det_matches(
        a01 in 0.0..1.0f64, a02 in 0.0..1.0f64,
        a10 in 0.0..1.0f64, a12 in 0.0..1.0f64,
        a20 in 0.0..1.0f64, a21 in 0.0..1.0f64,
        t in 0.0..6.0f64,
    ) {
        let q = SquareMatrix::from_rows(&[
            vec![-(a01 + a02), a01, a02],
            vec![a10, -(a10 + a12), a12],
            vec![a20, a21, -(a20 + a21)],
        ]).unwrap();
        let e = expm(&q, t);
        prop_assert!(validate_stochastic(&e, 1e-10).is_ok());
        let det = e.det();
        let expected = (q.trace() * t).exp();
        prop_assert!(((det - expected) / expected).abs() <= 1e-9);
    }

    #[test]
    fn prop_matrix_io_roundtrip(entries in proptest::collection::vec(-1e3..1e3f64, 9)) {
        let m = SquareMatrix::new(3, entries).unwrap();
        let back = membed_core::matcore::io::from_json(&membed_core::matcore::io::to_json(&m)).unwrap();
        prop_assert_eq!(m, back);
    }

    #[test]
    fn prop_equal_input_detection_roundtrip(
        c1 in 0.0..0.4f64, c2 in 0.0..0.4f64, c3 in 0.0..0.4f64,
    ) {
        let p = EqualInputParams::new(vec![c1, c2, c3]).unwrap();
        prop_assume!(p.markov_admissible());
        let m = validate_stochastic(&p.matrix(), DEFAULT_TOL).unwrap();
        let detected = detect_equal_input(&m, 1e-9).unwrap();
        prop_assert!((detected.c_sum - p.c_sum).abs() <= 1e-9);
        for (x, y) in detected.c_vec.iter().zip(&p.c_vec) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }
}

#[test]
fn spectrum_structural_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..200 {
        let d = rng.random_range(2..=6usize);
        let mut m = SquareMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = rng.random_range(-1.0..1.0);
            }
        }
        let spec = spectrum(&m).unwrap();
        // multiplicities sum to the dimension
        assert_eq!(spec.dim(), d);
        // complex eigenvalues occur in exact conjugate pairs
        for &(z, mult) in &spec.eigenvalues {
            if z.im != 0.0 {
                assert!(
                    spec.eigenvalues
                        .iter()
                        .any(|&(w, m2)| w == z.conj() && m2 == mult),
                    "unpaired complex eigenvalue {z}"
                );
            }
        }
        assert!(spec.min_poly_degree >= 1 && spec.min_poly_degree <= d);
    }
}

#[test]
fn transitivity_holds_on_reducible_embeddable_products() {
    // products of block-embeddable matrices are reducible but keep a
    // transitive positivity pattern, so item (6) must pass on them
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..50 {
        let a = rng.random_range(0.05..0.45);
        let b = rng.random_range(0.05..0.45);
        let block1 = SquareMatrix::from_rows(&[
            vec![1.0 - a, a, 0.0],
            vec![b, 1.0 - b, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        let c = rng.random_range(0.05..0.45);
        let dd = rng.random_range(0.05..0.45);
        let block2 = SquareMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0 - c, c],
            vec![0.0, dd, 1.0 - dd],
        ])
        .unwrap();
        // each block is embeddable (Kendall on the coupled pair); their
        // product has one zero entry and fails transitivity, while the
        // blocks themselves pass it
        for m in [&block1, &block2] {
            let sm = validate_stochastic(m, DEFAULT_TOL).unwrap();
            let report = necessary_conditions(&sm);
            assert!(report.transitivity_ok, "block should be transitive");
        }
        let product =
            validate_stochastic(&block1.matmul(&block2), DEFAULT_TOL).unwrap();
        let report = necessary_conditions(&product);
        assert!(
            !report.transitivity_ok || !report.positivity_or_reducible,
            "the mixed product must fail a structural item"
        );
    }
}
