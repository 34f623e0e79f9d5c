mod common;

use cvwitness::bounds::{separability_bound, separability_bound_gradient, AscentOptions, WitnessPair};
use cvwitness::linalg::SymMatrix;
use cvwitness::partitions::{bipartitions, Partition};
use cvwitness::states::{builtin_state, CVState};
use cvwitness::witness::*;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn part(text: &str) -> Partition {
    Partition::parse(text, 4).unwrap()
}

fn klev4() -> CVState {
    builtin_state("klev4").unwrap()
}

#[test]
fn sigma_reads_the_double_sum() {
    let state = klev4();
    let w = common::genuine_witness();
    let sigma = measurement_sigma(&w, &state).unwrap();
    assert!((sigma - common::GENUINE_SIGMA).abs() < 1e-4, "{sigma}");
    // The upper-triangle reading lands elsewhere.
    let (sxx, spp) = (state.sigma_xx.as_ref().unwrap(), state.sigma_pp.as_ref().unwrap());
    let mut upper = 0.0;
    for i in 0..4 {
        for j in i..4 {
            upper += (w.x.get(i, j) * sxx.get(i, j)).powi(2) + (w.p.get(i, j) * spp.get(i, j)).powi(2);
        }
    }
    assert!((upper.sqrt() - common::GENUINE_SIGMA).abs() > 1e-3);
}

#[test]
fn condition_e_examples() {
    let state = klev4();
    let w = common::genuine_witness();
    let p = part("14|23");
    let at_s0 = condition_e(&w, &state, &p, common::GENUINE_MIN_S).unwrap();
    assert!(at_s0.abs() < 1e-3, "{at_s0}");
    let bare = condition_e(&w, &state, &p, 0.0).unwrap();
    assert!((bare + 0.08630).abs() < 1e-3, "{bare}");
}

#[test]
fn genuine_witness_scores() {
    let state = klev4();
    let w = common::genuine_witness();
    let reports: Vec<_> = bipartitions(4)
        .unwrap()
        .iter()
        .map(|p| violation_score(&w, &state, p).unwrap())
        .collect();
    let min = reports.iter().map(|r| r.s.unwrap()).fold(f64::INFINITY, f64::min);
    assert!((min - 4.432).abs() < 0.01, "{min}");
    for r in &reports {
        assert!((r.s.unwrap() - r.margin / r.sigma.unwrap()).abs() < 1e-12);
        assert!((r.confidence.unwrap() - confidence(r.s.unwrap())).abs() < 1e-300);
        assert!(r.certifies(4.0));
    }
}

#[test]
fn printed_rank_one_vectors_score_near_their_values() {
    let state = klev4();
    for row in &common::RANK_ONE_ROWS {
        let r = rank_one_violation_score(&row.h, &row.g, &state, &part(row.partition)).unwrap();
        let s = r.s.unwrap();
        // Vectors are printed to two decimals.
        assert!((s - row.s).abs() < 2.0, "{}: {s} vs {}", row.partition, row.s);
        let full = violation_score(&r.witness, &state, &part(row.partition)).unwrap();
        assert!((full.s.unwrap() - s).abs() < 1e-2, "{}", row.partition);
    }
    let (h, g, s_min) = common::GENUINE_RANK_ONE;
    let min = bipartitions(4)
        .unwrap()
        .iter()
        .map(|p| rank_one_violation_score(&h, &g, &state, p).unwrap().s.unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!((min - s_min).abs() < 0.1, "{min}");
    assert!((confidence(s_min) - 1.6e-3).abs() < 1e-4);
}

#[test]
fn no_violation_gives_negative_score() {
    let state = builtin_state("vacuum4").unwrap();
    let w = WitnessPair::new(SymMatrix::identity(4), SymMatrix::identity(4)).unwrap();
    let r = violation_score(&w, &state, &part("12|34")).unwrap();
    assert!(r.s.unwrap() <= 1e-6);
    assert!(!r.certifies(1.0));
}

#[test]
fn score_drops_when_any_error_grows() {
    let base = klev4();
    let w = common::genuine_witness();
    let p = part("1|234");
    let s0 = violation_score(&w, &base, &p).unwrap().s.unwrap();
    for (i, j) in [(0, 0), (0, 1), (2, 3)] {
        for xx in [true, false] {
            let mut state = base.clone();
            let target = if xx { state.sigma_xx.as_mut() } else { state.sigma_pp.as_mut() }.unwrap();
            target.set(i, j, target.get(i, j) + 0.01);
            let s = violation_score(&w, &state, &p).unwrap().s.unwrap();
            assert!(s < s0, "({i},{j}) xx={xx}: {s} >= {s0}");
        }
    }
}

#[test]
fn confidence_orders_of_magnitude() {
    assert!((1e-3..=5e-3).contains(&confidence(3.0)));
    assert!((1e-7..=1e-5).contains(&confidence(5.0)));
    assert!(confidence(6.0) <= 1e-8);
    let mut prev = 1.0;
    for k in 1..100 {
        let c = confidence(k as f64 * 0.1);
        assert!(c < prev);
        prev = c;
    }
}

#[test]
fn random_search_is_reproducible_across_thread_counts() {
    let state = klev4();
    let p = part("12|34");
    let cfg = SearchConfig {
        trials: 20_000,
        seed: 99,
        ..SearchConfig::default()
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| random_rank_one_search(&state, &p, &cfg, true).unwrap())
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let v = a.vectors.as_ref().unwrap();
    assert_eq!(trial_vectors(99, 0, Sampler::StandardNormal, 4).0.len(), v.h.len());

    let single = SearchConfig { trials: 1, ..cfg };
    let one = random_rank_one_search(&state, &p, &single, true).unwrap();
    let (h, g) = trial_vectors(99, 0, Sampler::StandardNormal, 4);
    assert_eq!(one.vectors.unwrap(), RankOneVectors { h, g });
}

#[test]
fn random_search_report_is_consistent() {
    let state = klev4();
    let p = part("1|234");
    let cfg = SearchConfig {
        trials: 50_000,
        seed: 3,
        ..SearchConfig::default()
    };
    let r = random_rank_one_search(&state, &p, &cfg, true).unwrap();
    let v = r.vectors.as_ref().unwrap();
    let again = rank_one_violation_score(&v.h, &v.g, &state, &p).unwrap();
    assert!((again.s.unwrap() - r.s.unwrap()).abs() < 1e-9);
    assert!(r.s.unwrap() > 10.0);
}

#[test]
fn random_search_without_errors_uses_margin() {
    let state = builtin_state("ppt4").unwrap();
    let cfg = SearchConfig {
        trials: 20_000,
        seed: 1,
        s_level: 0.0,
        ..SearchConfig::default()
    };
    let r = random_rank_one_search(&state, &part("1|234"), &cfg, false).unwrap();
    assert!(r.s.is_none() && r.sigma.is_none());
    assert!(r.margin > 0.0);
    assert!(matches!(
        random_rank_one_search(&state, &part("1|234"), &cfg, true),
        Err(cvwitness::Error::MissingErrorModel)
    ));
}

#[test]
fn optimizer_certifies_klev4() {
    let state = klev4();
    let p = part("1|234");
    let cfg = SearchConfig::default();
    let out = optimize_witness(&state, &p, &cfg, None).unwrap();
    assert!(out.certified, "objective {}", out.objective);
    assert!(out.objective < -cfg.c);
    assert!((out.report.g - cfg.c).abs() < 1e-12 * cfg.c);
    assert!(out.report.witness.x.min_eigenvalue().unwrap() >= -1e-10);
    assert!(out.report.witness.p.min_eigenvalue().unwrap() >= -1e-10);
    assert!(out.report.s.unwrap() > cfg.s_level);
    // The optimum is at least as good as the best random rank-one witness.
    let search = random_rank_one_search(
        &state,
        &p,
        &SearchConfig {
            trials: 20_000,
            ..cfg.clone()
        },
        true,
    )
    .unwrap();
    let w = search.witness.scaled(cfg.c / search.g);
    let rank_one_objective = cfg.s_level * measurement_sigma(&w, &state).unwrap() - search.bound * cfg.c / search.g;
    assert!(out.objective <= rank_one_objective + 1e-6, "{} > {rank_one_objective}", out.objective);
}

#[test]
fn optimizer_is_homogeneous_in_c() {
    let state = klev4();
    let p = part("14|23");
    let one = optimize_witness(&state, &p, &SearchConfig::default(), None).unwrap();
    let two = optimize_witness(
        &state,
        &p,
        &SearchConfig {
            c: 2.0,
            ..SearchConfig::default()
        },
        None,
    )
    .unwrap();
    assert!((two.report.g - 2.0 * one.report.g).abs() < 1e-9);
    assert!((two.report.sigma.unwrap() - 2.0 * one.report.sigma.unwrap()).abs() < 1e-9);
    assert!((two.report.bound - 2.0 * one.report.bound).abs() < 1e-7);
    assert!((two.objective - 2.0 * one.objective).abs() < 1e-7);
}

#[test]
fn optimizer_finds_nothing_in_vacuum() {
    let state = builtin_state("vacuum4").unwrap();
    for text in ["1|234", "12|34", "1|2|3|4"] {
        let out = optimize_witness(&state, &part(text), &SearchConfig::default(), None).unwrap();
        assert!(!out.certified, "{text}: objective {}", out.objective);
        assert!(out.objective >= -1.0 - 1e-9);
    }
}

#[test]
fn optimizer_without_errors_at_level_zero() {
    let state = builtin_state("ppt4").unwrap();
    let cfg = SearchConfig {
        s_level: 0.0,
        ..SearchConfig::default()
    };
    let out = optimize_witness(&state, &part("12|34"), &cfg, None).unwrap();
    assert!(out.certified);
    assert!(out.report.margin > 0.0);
    let strict = SearchConfig::default();
    assert!(optimize_witness(&state, &part("12|34"), &strict, None).is_err());
}

#[test]
fn genuine_search_from_printed_certificate() {
    let state = klev4();
    let cfg = SearchConfig {
        s_level: 4.0,
        ..SearchConfig::default()
    };
    let out = genuine_search(&state, &cfg, Some(&common::genuine_witness())).unwrap();
    assert!(out.found);
    assert_eq!(out.iterations, 0);
    assert!((out.min_s.unwrap() - 4.43).abs() < 0.01);
    assert_eq!(out.reports.len(), 7);
}

#[test]
fn genuine_search_from_random_start() {
    let state = klev4();
    let cfg = SearchConfig {
        s_level: 4.0,
        seed: 5,
        ..SearchConfig::default()
    };
    let out = genuine_search(&state, &cfg, None).unwrap();
    assert!(out.found);
    for r in &out.reports {
        let again = violation_score(&out.witness, &state, &r.partition).unwrap();
        assert!(again.s.unwrap() >= 4.0 - 1e-6, "{}", r.partition);
    }
}

#[test]
fn genuine_search_rejects_vacuum() {
    let state = builtin_state("vacuum4").unwrap();
    let cfg = SearchConfig {
        s_level: 1.0,
        restarts: 3,
        max_iterations: 200,
        ..SearchConfig::default()
    };
    let out = genuine_search(&state, &cfg, None).unwrap();
    assert!(!out.found);
    assert_eq!(out.restarts, 3);
}

fn random_pd(rng: &mut ChaCha8Rng, n: usize) -> SymMatrix {
    let r = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    SymMatrix::from_matrix(r.transpose() * r)
        .unwrap()
        .add_scaled(&SymMatrix::identity(n), 0.1)
}

#[test]
fn envelope_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    // The envelope gradient is only as accurate as the certificate, so close
    // the dual gap further than the default.
    let opts = AscentOptions {
        gap_tolerance: 1e-14,
        ..AscentOptions::default()
    };
    for case in 0..20 {
        let w = WitnessPair::new(random_pd(&mut rng, 4), random_pd(&mut rng, 4)).unwrap();
        let parts = bipartitions(4).unwrap();
        let p = &parts[case % parts.len()];
        let r = separability_bound(&w, p, &opts).unwrap();
        let (gx, gp) = separability_bound_gradient(&r, p).unwrap();
        let dx = random_pd(&mut rng, 4).add_scaled(&random_pd(&mut rng, 4), -1.0);
        let dp = random_pd(&mut rng, 4).add_scaled(&random_pd(&mut rng, 4), -1.0);
        let h = 1e-4;
        let plus = WitnessPair::new(w.x.add_scaled(&dx, h), w.p.add_scaled(&dp, h)).unwrap();
        let minus = WitnessPair::new(w.x.add_scaled(&dx, -h), w.p.add_scaled(&dp, -h)).unwrap();
        let numeric = (separability_bound(&plus, p, &opts).unwrap().value
            - separability_bound(&minus, p, &opts).unwrap().value)
            / (2.0 * h);
        let analytic = gx.dot(&dx) + gp.dot(&dp);
        let rel = (analytic - numeric).abs() / analytic.abs().max(1e-9);
        assert!(rel < 1e-4, "case {case} {p}: analytic {analytic} numeric {numeric}");
    }
}

#[test]
fn table_renders_fixed_width() {
    let state = klev4();
    let w = common::genuine_witness();
    let reports: Vec<_> = bipartitions(4)
        .unwrap()
        .iter()
        .map(|p| violation_score(&w, &state, p).unwrap())
        .collect();
    let text = render_table(&reports);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8);
    assert!(lines[1].starts_with("1|234"));
    assert!(lines[7].contains("1.56114"));
    assert!(lines[1].contains("1.47483"));
}
