//! Acceptance gate: one test per criterion, each printing a pass line.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use logrank::artifact::{check_budget, export_flat, load_flat, DEFAULT_SIZE_BUDGET};
use logrank::cli::run_pipeline;
use logrank::config::RunConfig;
use logrank::eval::{
    ab_report, bootstrap_pvalue, offline_report, ranked_lookups, recall_at_k, split_by_user,
    BootstrapConfig, MetricKind, OfflineRanker, RankedLookup, Scope,
};
use logrank::features::{default_schema, FeatureVector};
use logrank::log_schema::{encode_sessions, leakage_scan, to_labeled_groups, LogHeader};
use logrank::provider::build_index;
use logrank::ranker::{fit, QueryGroup, TrainParams};
use logrank::sim::{simulate, ArmRanker, SimConfig};

fn demo_config() -> RunConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../demo/config.json");
    RunConfig::load(&path).expect("demo config loads")
}

fn random_group(rng: &mut ChaCha20Rng, min: usize, max: usize, arity: usize) -> QueryGroup {
    let n = rng.gen_range(min..=max);
    let rows = (0..n)
        .map(|_| FeatureVector((0..arity).map(|_| rng.gen_range(-1.0..1.0)).collect()))
        .collect();
    let mut targets = vec![0u8; n];
    targets[rng.gen_range(0..n)] = 1;
    QueryGroup::new(rows, targets).unwrap()
}

#[test]
fn ac1_gradient_matches_finite_differences() {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(101);
    let h = 1e-5;
    for _ in 0..100 {
        let group = random_group(&mut rng, 2, 20, 3);
        let scores: Vec<f64> = (0..group.rows.len()).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let (grads, _) = group.grad_hess(&scores).unwrap();
        for i in 0..scores.len() {
            let mut up = scores.clone();
            let mut down = scores.clone();
            up[i] += h;
            down[i] -= h;
            let numeric = (group.loss(&up).unwrap() - group.loss(&down).unwrap()) / (2.0 * h);
            let denom = numeric.abs().max(grads[i].abs()).max(1e-8);
            assert!(
                (numeric - grads[i]).abs() / denom < 1e-4,
                "analytic {} vs numeric {numeric}",
                grads[i]
            );
        }
    }
    assert!(start.elapsed().as_secs_f64() < 5.0);
    println!("AC-1 gradient correctness: pass");
}

#[test]
fn ac2_first_split_matches_brute_force() {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(202);
    let l2 = 3.0;
    let params = TrainParams {
        iterations: 1,
        depth: 1,
        learning_rate: 1.0,
        l2_leaf_reg: l2,
        ..TrainParams::default()
    };
    for _ in 0..50 {
        let mut groups = Vec::new();
        let mut remaining = rng.gen_range(4..=16usize);
        while remaining >= 2 {
            let n = rng.gen_range(2..=remaining.min(5));
            groups.push(random_group(&mut rng, n, n, 2));
            remaining -= n;
        }
        let ensemble = fit(&groups, &params, &"00".repeat(32)).unwrap();
        let tree = &ensemble.trees[0];
        assert_eq!(tree.levels.len(), 1);
        let level = &tree.levels[0];

        // identical gain formula, enumerated over every (feature, midpoint)
        let mut grads = Vec::new();
        let mut hess = Vec::new();
        let mut values: Vec<[f64; 2]> = Vec::new();
        for g in &groups {
            let zeros = vec![0.0; g.rows.len()];
            let (gg, hh) = g.grad_hess(&zeros).unwrap();
            grads.extend(gg);
            hess.extend(hh);
            for row in &g.rows {
                values.push([row.values()[0], row.values()[1]]);
            }
        }
        let score = |g: f64, h: f64| g * g / (h + l2);
        let gain_of = |feature: usize, t: f64| {
            let (mut lg, mut lh, mut rg, mut rh) = (0.0, 0.0, 0.0, 0.0);
            for (i, v) in values.iter().enumerate() {
                if v[feature] > t {
                    rg += grads[i];
                    rh += hess[i];
                } else {
                    lg += grads[i];
                    lh += hess[i];
                }
            }
            score(lg, lh) + score(rg, rh)
        };
        let mut best_gain = f64::NEG_INFINITY;
        for feature in 0..2 {
            let mut xs: Vec<f64> = values.iter().map(|v| v[feature]).collect();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            xs.dedup();
            for pair in xs.windows(2) {
                best_gain = best_gain.max(gain_of(feature, (pair[0] + pair[1]) / 2.0));
            }
        }
        let fit_gain = gain_of(level.feature as usize, level.threshold);
        assert!(
            (fit_gain - best_gain).abs() < 1e-9,
            "fit gain {fit_gain} vs brute force {best_gain}"
        );
    }
    assert!(start.elapsed().as_secs_f64() < 10.0);
    println!("AC-2 split oracle: pass");
}

#[test]
fn ac3_recall_matches_position_scan() {
    let mut rng = ChaCha20Rng::seed_from_u64(303);
    let lookups: Vec<RankedLookup> = (0..1000)
        .map(|_| RankedLookup {
            ordinal: rng.gen_range(0..6),
            truth_pos: if rng.gen_bool(0.9) { Some(rng.gen_range(0..12)) } else { None },
        })
        .collect();
    let oracle = |k: usize, initial_only: bool| {
        let mut total = 0usize;
        let mut hits = 0usize;
        for l in &lookups {
            if initial_only && l.ordinal != 0 {
                continue;
            }
            total += 1;
            if let Some(p) = l.truth_pos {
                let mut found = false;
                for position in 0..k {
                    if position == p {
                        found = true;
                    }
                }
                if found {
                    hits += 1;
                }
            }
        }
        hits as f64 / total as f64
    };
    for k in [1usize, 5] {
        assert_eq!(recall_at_k(&lookups, k, Scope::All).unwrap(), oracle(k, false));
        assert_eq!(recall_at_k(&lookups, k, Scope::Initial).unwrap(), oracle(k, true));
    }
    println!("AC-3 metric oracle: pass");
}

#[test]
fn ac4_end_to_end_improvement() {
    let start = Instant::now();
    let config = demo_config();
    assert_eq!(config.sim.master_seed, 42);
    let corpus = config.load_corpus().unwrap();
    assert!(corpus.len() >= 50, "demo corpus has {} files", corpus.len());
    let keywords = config.load_keywords().unwrap();
    let schema = default_schema();

    let sessions_a =
        simulate(&corpus, &keywords, &schema, &config.sim, &ArmRanker::Heuristic).unwrap();
    assert!(sessions_a.len() >= 5000, "{} sessions", sessions_a.len());

    let (train, holdout) =
        split_by_user(sessions_a.clone(), config.split_ratio, config.sim.master_seed).unwrap();
    let mut groups = Vec::new();
    for s in &train {
        if s.outcome().map_or(false, |o| o.is_select()) {
            for labeled in to_labeled_groups(s).unwrap() {
                groups.push(QueryGroup::from_labeled(&labeled).unwrap());
            }
        }
    }
    let ensemble = fit(&groups, &config.train, &schema.hash()).unwrap();

    let baseline = offline_report(&ranked_lookups(&holdout, &OfflineRanker::Baseline)).unwrap();
    let model =
        offline_report(&ranked_lookups(&holdout, &OfflineRanker::Model(&ensemble))).unwrap();
    assert!(
        model.r1_all > baseline.r1_all,
        "R@1_all model {} vs baseline {}",
        model.r1_all,
        baseline.r1_all
    );
    assert!(
        model.r1_init > baseline.r1_init,
        "R@1_init model {} vs baseline {}",
        model.r1_init,
        baseline.r1_init
    );

    let flat = load_flat(&export_flat(&ensemble, config.size_budget_bytes).unwrap()).unwrap();
    let sessions_b =
        simulate(&corpus, &keywords, &schema, &config.sim, &ArmRanker::Model(&flat)).unwrap();
    let report = ab_report(&sessions_a, &sessions_b, &config.bootstrap).unwrap();
    let typing = report.metric(MetricKind::TypingActions);
    assert!(typing.b < typing.a, "typing actions {} vs {}", typing.b, typing.a);
    assert!(typing.p < 0.01, "typing actions p = {}", typing.p);

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 300.0, "took {elapsed:.1} s");
    println!(
        "AC-4 end-to-end improvement: pass (R@1 {:.3} -> {:.3}, typing {:.3} -> {:.3}, p = {:.4}, {elapsed:.0} s)",
        baseline.r1_all, model.r1_all, typing.a, typing.b, typing.p
    );
}

fn small_trained_model() -> logrank::TreeEnsemble {
    let config = demo_config();
    let corpus = config.load_corpus().unwrap();
    let keywords = config.load_keywords().unwrap();
    let schema = default_schema();
    let sim = SimConfig { users: 10, sessions_per_user: 30, master_seed: 9, ..config.sim.clone() };
    let sessions = simulate(&corpus, &keywords, &schema, &sim, &ArmRanker::Heuristic).unwrap();
    let mut groups = Vec::new();
    for s in &sessions {
        if s.outcome().map_or(false, |o| o.is_select()) {
            for labeled in to_labeled_groups(s).unwrap() {
                groups.push(QueryGroup::from_labeled(&labeled).unwrap());
            }
        }
    }
    fit(&groups, &config.train, &schema.hash()).unwrap()
}

#[test]
fn ac5_size_and_latency_budgets() {
    let ensemble = small_trained_model();
    let bytes = export_flat(&ensemble, DEFAULT_SIZE_BUDGET).unwrap();
    let report = check_budget(&bytes, DEFAULT_SIZE_BUDGET, 30.0, 100, 1000).unwrap();
    assert!(report.size_ok, "{} bytes", report.size_bytes);
    assert!(report.latency_ok, "median {} ms", report.median_latency_ms);
    println!(
        "AC-5 budgets: pass ({} bytes, median {:.3} ms)",
        report.size_bytes, report.median_latency_ms
    );
}

#[test]
fn ac6_bootstrap_calibration() {
    let config = demo_config();
    let corpus = config.load_corpus().unwrap();
    let keywords = config.load_keywords().unwrap();
    let schema = default_schema();
    let sim = SimConfig { users: 40, sessions_per_user: 20, master_seed: 7, ..config.sim.clone() };
    let sessions = simulate(&corpus, &keywords, &schema, &sim, &ArmRanker::Heuristic).unwrap();

    let mut low = 0usize;
    let splits = 200;
    for i in 0..splits {
        let (a, b) = split_by_user(sessions.clone(), 0.5, 40_000 + i).unwrap();
        let cfg = BootstrapConfig { resamples: 1000, seed: 90_000 + i, alpha: 0.01 };
        let p = bootstrap_pvalue(&a, &b, MetricKind::TypingActions, &cfg).unwrap();
        if p < 0.05 {
            low += 1;
        }
    }
    let fraction = low as f64 / splits as f64;
    assert!(
        (0.01..=0.10).contains(&fraction),
        "A/A rejection fraction {fraction}"
    );
    println!("AC-6 bootstrap calibration: pass (A/A rejection fraction {fraction:.3})");
}

#[test]
fn ac7_pipeline_determinism() {
    let config = RunConfig {
        sim: SimConfig {
            users: 6,
            sessions_per_user: 8,
            master_seed: 5,
            ..SimConfig::default()
        },
        train: TrainParams { iterations: 15, depth: 4, ..TrainParams::default() },
        bootstrap: BootstrapConfig { resamples: 50, seed: 5, alpha: 0.01 },
        ..demo_config()
    };
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    run_pipeline(&config, d1.path()).unwrap();
    run_pipeline(&config, d2.path()).unwrap();
    for name in ["logs_heuristic.jsonl", "logs_model.jsonl", "model.json", "model.rnkl", "abtest.json"] {
        let a = std::fs::read(d1.path().join(name)).unwrap();
        let b = std::fs::read(d2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
    println!("AC-7 determinism: pass");
}

#[test]
fn ac8_no_identifier_leakage() {
    let config = demo_config();
    let corpus = config.load_corpus().unwrap();
    let keywords = config.load_keywords().unwrap();
    let schema = default_schema();
    let sim = SimConfig { users: 20, sessions_per_user: 50, master_seed: 42, ..config.sim.clone() };
    let sessions = simulate(&corpus, &keywords, &schema, &sim, &ArmRanker::Heuristic).unwrap();
    let header = LogHeader {
        schema_version: logrank::log_schema::SCHEMA_VERSION,
        feature_schema_hash: schema.hash(),
    };
    let text = encode_sessions(&header, &sessions);
    let index = build_index(&corpus, keywords).unwrap();
    let vocabulary: BTreeSet<String> = index.vocabulary(3);
    let leaks = leakage_scan(text.as_bytes(), &vocabulary);
    assert!(leaks.is_empty(), "leaked identifiers: {leaks:?}");
    println!("AC-8 anonymization: pass ({} sessions, {} vocabulary words)", sessions.len(), vocabulary.len());
}

#[test]
fn ac9_round_trip_fidelity() {
    let ensemble = small_trained_model();
    let flat = load_flat(&export_flat(&ensemble, DEFAULT_SIZE_BUDGET).unwrap()).unwrap();
    let arity = ensemble.arity as usize;
    let mut rng = ChaCha20Rng::seed_from_u64(909);
    for _ in 0..1000 {
        let values: Vec<f64> = (0..arity)
            .map(|_| {
                if rng.gen_bool(0.15) {
                    f64::NAN
                } else {
                    rng.gen_range(-100.0..100.0)
                }
            })
            .collect();
        let expected = ensemble.predict_single(&values);
        let got = flat.predict(&values);
        assert!(
            expected == got || (expected.is_nan() && got.is_nan()),
            "round-trip mismatch: {expected} vs {got}"
        );
    }
    println!("AC-9 round-trip fidelity: pass");
}
