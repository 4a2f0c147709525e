//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers. Tests share a lock so wallclock-sensitive criteria
//! never contend for cores with the heavy ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skggp_core::gp::{AlgorithmConfig, Engine, TrainingContext};
use skggp_core::phenotype::{characterise_pair, sample_situations, PcVector, SituationKind};
use skggp_core::project::{generate_instance, InstanceContext, ScenarioConfig};
use skggp_core::rules::{random_tree, reference_rules, BinOp, Expr, GrowMethod, RulePair};
use skggp_core::sim::{simulate, validate_schedule, SimOptions, ValidationReport};
use skggp_core::surrogate::{manhattan, preselect_indices, SurrogateDatabase};
use skggp_harness::config::{AlgorithmEntry, FileConfig, PlanSection, QualitySection};
use skggp_harness::curves::{budget_saved_ratio, ConvergenceCurve};
use skggp_harness::gain::extra_offspring_gain;
use skggp_harness::plan::{load_label_rows, read_finals, run_plan};
use skggp_harness::quality::run_quality;
use skggp_harness::stats::{wilcoxon_signed_rank, SignificanceFlag};
use skggp_harness::timing::timing_report;
use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

static GATE: Mutex<()> = Mutex::new(());

fn gate() -> MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|e| e.into_inner())
}

fn scenario(n: usize, os: f64) -> ScenarioConfig {
    ScenarioConfig {
        activity_count: n,
        modes_per_activity: 3,
        resource_type_count: 4,
        target_order_strength: os,
        instances_per_evaluation: 5,
        ..ScenarioConfig::default()
    }
}

fn random_rules(rng: &mut ChaCha8Rng) -> RulePair {
    RulePair {
        ordering: random_tree(rng, GrowMethod::Grow, 6),
        group: random_tree(rng, GrowMethod::Grow, 6),
    }
}

// ---------------------------------------------------------------------
// Criterion 1: feasibility suite
// ---------------------------------------------------------------------
#[test]
fn criterion_1_feasibility_suite() {
    let _g = gate();
    let start = Instant::now();
    let mut contexts = Vec::new();
    for &n in &[10usize, 30, 60] {
        for &os in &[0.25, 0.5, 0.75] {
            for seed in 0..3u64 {
                let instance = generate_instance(&scenario(n, os), 1000 + seed).unwrap();
                contexts.push(InstanceContext::new(instance).unwrap());
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    let options = SimOptions::default();
    for run in 0..1000usize {
        let ctx = &contexts[run % contexts.len()];
        let rules = random_rules(&mut rng).compile();
        let mut sim_rng = ChaCha8Rng::seed_from_u64(run as u64);
        let result = simulate(ctx, &rules, &options, &mut sim_rng);
        match validate_schedule(ctx, &result) {
            ValidationReport::Pass => {}
            ValidationReport::Fail(v) => panic!("run {run} on {}: {v}", ctx.instance.id),
        }
        assert!(
            result.makespan >= ctx.lower_bound,
            "run {run}: makespan {} below bound {}",
            result.makespan,
            ctx.lower_bound
        );
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() <= 120,
        "feasibility suite took {elapsed:?}, above the 2 min budget"
    );
    println!(
        "criterion 1 PASS: 1000 simulations across 27 instances, zero precedence or \
         resource violations, makespan >= bound everywhere ({elapsed:.2?})"
    );
}

// ---------------------------------------------------------------------
// Criterion 2: characterisation correctness
// ---------------------------------------------------------------------
#[test]
fn criterion_2_pc_correctness() {
    let _g = gate();
    let ctx = InstanceContext::new(generate_instance(&scenario(40, 0.3), 77).unwrap()).unwrap();
    let set = sample_situations(&[&ctx], &reference_rules(), 10, 4, 2, 99, 256).unwrap();
    let situations = &set.situations;

    // Trees whose candidate priorities sit closer than double-precision can
    // carry through an affine map are degenerate for the invariance check:
    // fl(2v+1) merges gaps below one ulp of the transformed scale, which is
    // a float identity limit, not a ranking defect. Such trees are skipped
    // and replaced until 200 well-separated trees have been checked.
    let robust = |pair: &RulePair| -> bool {
        situations.iter().all(|sit| {
            let program = match sit.kind {
                SituationKind::Ordering => pair.ordering.compile(),
                SituationKind::GroupSelection => pair.group.compile(),
            };
            let mut values: Vec<f64> = (0..sit.candidate_count())
                .map(|i| program.priority(sit.candidate_attrs(i)))
                .filter(|v| v.is_finite())
                .collect();
            values.sort_by(|a, b| a.total_cmp(b));
            values.windows(2).all(|w| {
                w[0] == w[1] || (w[1] - w[0]) > 1e-12 * w[1].abs().max(w[0].abs()).max(1.0)
            })
        })
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    let mut checked = 0;
    let mut skipped_degenerate = 0;
    while checked < 200 {
        let pair = random_rules(&mut rng);
        if !robust(&pair) {
            skipped_degenerate += 1;
            assert!(
                skipped_degenerate < 200,
                "generator keeps producing degenerate trees"
            );
            continue;
        }
        checked += 1;
        let pc = characterise_pair(&pair, situations);

        // (a) rank segments: permutations of 1..=m for distinct priorities,
        // shared minimum rank under ties
        for (i, situation) in situations.iter().enumerate() {
            let seg = pc.segment(i);
            let m = situation.candidate_count();
            assert_eq!(seg.len(), m);
            let mut sorted = seg.to_vec();
            sorted.sort_unstable();
            assert_eq!(sorted[0], 1);
            assert!(*sorted.last().unwrap() as usize <= m);
            let distinct: std::collections::HashSet<u16> = seg.iter().copied().collect();
            if distinct.len() == m {
                assert_eq!(sorted, (1..=m as u16).collect::<Vec<_>>());
            } else {
                // competition ranking: each rank equals 1 + count of
                // strictly better candidates
                for &r in seg {
                    let better = seg.iter().filter(|&&x| x < r).count();
                    assert_eq!(r as usize, better + 1);
                }
            }
        }

        // (b) strictly increasing affine transform leaves the vector intact
        let transform = |e: Expr<_>| {
            Expr::Bin(
                BinOp::Add,
                Box::new(Expr::Bin(
                    BinOp::Mul,
                    Box::new(Expr::Const(2.0)),
                    Box::new(e),
                )),
                Box::new(Expr::Const(1.0)),
            )
        };
        let transformed = RulePair {
            ordering: transform(pair.ordering.clone()),
            group: {
                let g = pair.group.clone();
                Expr::Bin(
                    BinOp::Add,
                    Box::new(Expr::Bin(
                        BinOp::Mul,
                        Box::new(Expr::Const(2.0)),
                        Box::new(g),
                    )),
                    Box::new(Expr::Const(1.0)),
                )
            },
        };
        assert_eq!(
            pc,
            characterise_pair(&transformed, situations),
            "2f+1 changed the vector"
        );
    }

    // (c) determinism across 8-way parallel recomputation
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2C2);
    let pairs: Vec<RulePair> = (0..64).map(|_| random_rules(&mut rng)).collect();
    let serial: Vec<PcVector> = pairs
        .iter()
        .map(|p| characterise_pair(p, situations))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap();
    for round in 0..2 {
        let parallel: Vec<PcVector> = pool.install(|| {
            use rayon::prelude::*;
            pairs
                .par_iter()
                .map(|p| characterise_pair(p, situations))
                .collect()
        });
        assert_eq!(serial, parallel, "parallel round {round} diverged");
    }

    let ordering = situations
        .iter()
        .filter(|s| s.kind == SituationKind::Ordering)
        .count();
    println!(
        "criterion 2 PASS: 200 rule pairs over {} situations ({} ordering / {} group), \
         rank-permutation and tie checks clean, 2f+1 invariance exact ({} sub-ulp \
         degenerate trees replaced), 8-way parallel recomputation bit-identical",
        situations.len(),
        ordering,
        situations.len() - ordering,
        skipped_degenerate
    );
}

// ---------------------------------------------------------------------
// Criterion 3: surrogate oracle equivalence
// ---------------------------------------------------------------------
#[test]
fn criterion_3_surrogate_oracle_equivalence() {
    let _g = gate();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    let len = 14;
    let vector = |rng: &mut ChaCha8Rng| {
        PcVector::from_segments(vec![(0..len).map(|_| rng.gen_range(1..20u16)).collect()])
    };

    // 1000 queries against 100-entry databases vs an independent scan
    let mut checked = 0;
    for db_round in 0..5 {
        let entries: Vec<(PcVector, f64)> = (0..100)
            .map(|i| (vector(&mut rng), 1.0 + (i * 7 % 100) as f64 * 0.01))
            .collect();
        let db = SurrogateDatabase::new(entries.clone(), db_round).unwrap();
        for _ in 0..200 {
            let query = vector(&mut rng);
            let mut best = (u64::MAX, usize::MAX);
            for (i, (entry, _)) in entries.iter().enumerate() {
                let d: u64 = entry
                    .ranks()
                    .iter()
                    .zip(query.ranks())
                    .map(|(&a, &b)| (a as i64 - b as i64).unsigned_abs())
                    .sum();
                if d < best.0 {
                    best = (d, i);
                }
            }
            assert_eq!(db.estimate(&query), entries[best.1].1);
            checked += 1;
        }
    }
    assert_eq!(checked, 1000);

    // preselect against a full-sort oracle on 100 random batches
    for batch in 0..100 {
        let entries: Vec<(PcVector, f64)> = (0..30)
            .map(|_| (vector(&mut rng), rng.gen_range(1.0..3.0)))
            .collect();
        let db = SurrogateDatabase::new(entries, 0).unwrap();
        let pcs: Vec<PcVector> = (0..40).map(|_| vector(&mut rng)).collect();
        let target = rng.gen_range(5..35);
        let got = preselect_indices(&db, &pcs, target);
        let mut scored: Vec<(f64, usize)> = pcs
            .iter()
            .enumerate()
            .map(|(i, pc)| (db.estimate(pc), i))
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut expected: Vec<usize> = scored
            .iter()
            .take(target.min(pcs.len()))
            .map(|s| s.1)
            .collect();
        expected.sort_unstable();
        assert_eq!(got, expected, "batch {batch}");
    }

    // the worked nearest-neighbour case: query at distance 4 from the first
    // entry, strictly further from the rest, returns the first fitness
    let query = PcVector::from_segments(vec![vec![2, 1, 3, 1, 2, 4]]);
    let entries = vec![
        (PcVector::from_segments(vec![vec![1, 2, 3, 2, 1, 4]]), 1.21),
        (PcVector::from_segments(vec![vec![5, 1, 3, 1, 5, 5]]), 1.37),
        (PcVector::from_segments(vec![vec![4, 4, 4, 4, 2, 1]]), 1.44),
        (PcVector::from_segments(vec![vec![6, 6, 1, 1, 2, 4]]), 1.52),
    ];
    assert_eq!(manhattan(&query, &entries[0].0), 4);
    for (other, _) in &entries[1..] {
        assert!(manhattan(&query, other) > 4);
    }
    let db = SurrogateDatabase::new(entries, 0).unwrap();
    assert_eq!(db.estimate(&query), 1.21);

    println!(
        "criterion 3 PASS: 1000/1000 nearest-neighbour queries match the scan oracle, \
         100/100 preselect batches match the sort oracle, distance-4 case returns the \
         nearest entry's fitness"
    );
}

// ---------------------------------------------------------------------
// Criterion 4: budget accounting
// ---------------------------------------------------------------------
#[test]
fn criterion_4_budget_accounting() {
    let _g = gate();
    let cfg = scenario(12, 0.4);
    let train: Vec<InstanceContext> = (0..3)
        .map(|i| InstanceContext::new(generate_instance(&cfg, 300 + i).unwrap()).unwrap())
        .collect();
    let test: Vec<InstanceContext> = (0..2)
        .map(|i| InstanceContext::new(generate_instance(&cfg, 400 + i).unwrap()).unwrap())
        .collect();
    let situations = sample_situations(&[&train[0]], &reference_rules(), 3, 3, 2, 5, 256).unwrap();
    let ctx = TrainingContext {
        train,
        test,
        test_seeds: vec![11, 12],
        situations: Some(situations),
    };

    let mut cases = 0;
    for &(surrogate, k) in &[
        (false, 1.0),
        (true, 1.0),
        (true, 1.5),
        (true, 2.0),
        (true, 4.0),
    ] {
        for &generations in &[3usize, 5] {
            for &elitism in &[0usize, 1, 2] {
                let config = AlgorithmConfig {
                    population_size: 10,
                    generations,
                    offspring_multiplier: k,
                    surrogate_enabled: surrogate,
                    dedup_enabled: surrogate,
                    elitism_count: elitism,
                    master_seed: 1000 + cases as u64,
                    ..AlgorithmConfig::default()
                };
                let result = Engine::new(config, &ctx).unwrap().run();
                let expected = 10 * (generations as u64 + 1) + generations as u64 * elitism as u64;
                assert_eq!(
                    result.full_evaluations, expected,
                    "k={k} surrogate={surrogate} G={generations} e={elitism}"
                );
                assert_eq!(result.rows.last().unwrap().full_evals_cumulative, expected);
                cases += 1;
            }
        }
    }
    println!(
        "criterion 4 PASS: {cases} configurations hit |P|(G+1) + G*elitism exactly; \
         surrogate estimates never touch the counter (k up to 4 changes nothing)"
    );
}

// ---------------------------------------------------------------------
// Criterion 5: desk-scale directional convergence
// ---------------------------------------------------------------------
fn criterion5_config(dir: &std::path::Path) -> FileConfig {
    let algorithm = |label: &str, k: f64, surrogate: bool| AlgorithmEntry {
        label: label.into(),
        config: AlgorithmConfig {
            population_size: 50,
            generations: 30,
            offspring_multiplier: k,
            surrogate_enabled: surrogate,
            dedup_enabled: surrogate,
            ..AlgorithmConfig::default()
        },
    };
    FileConfig {
        scenario: scenario(30, 0.5),
        plan: PlanSection {
            master_seed: 2024,
            repetitions: 10,
            output_dir: dir.to_path_buf(),
            test_instances: 5,
            situations_per_kind: 10,
            min_candidates: 10,
        },
        algorithms: vec![
            algorithm("KGGP", 1.0, false),
            algorithm("SKGGP-2", 2.0, true),
        ],
        quality: None,
    }
}

#[test]
fn criterion_5_desk_scale_convergence() {
    let _g = gate();
    let start = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let cfg = criterion5_config(tmp.path());
    run_plan(&cfg, None, None).unwrap();
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() <= 30 * 60,
        "desk-scale plan took {elapsed:?}, above the 30 min budget"
    );

    let finals = read_finals(&cfg).unwrap();
    let final_of = |label: &str, rep: usize| -> f64 {
        finals
            .iter()
            .find(|f| f.algorithm == label && f.rep == rep)
            .unwrap()
            .final_best_test_so_far
    };
    let wins = (0..10)
        .filter(|&r| final_of("SKGGP-2", r) <= final_of("KGGP", r))
        .count();
    assert!(
        wins >= 7,
        "surrogate variant won only {wins} of 10 paired seeds (need 7)"
    );

    let baseline_rows = load_label_rows(&cfg, "KGGP").unwrap();
    let assisted_rows = load_label_rows(&cfg, "SKGGP-2").unwrap();
    let mut positive = 0;
    for rep in 0..10 {
        let baseline = ConvergenceCurve::from_rows(&baseline_rows[rep]);
        let assisted = ConvergenceCurve::from_rows(&assisted_rows[rep]);
        let at = baseline.final_evals().unwrap();
        if let Some(ratio) = budget_saved_ratio(&baseline, &assisted, at) {
            if ratio > 0.0 {
                positive += 1;
            }
        }
    }
    assert!(
        positive >= 6,
        "positive budget saving in only {positive} of 10 seeds (need 6)"
    );
    println!(
        "criterion 5 PASS: surrogate variant final test fitness <= baseline in {wins}/10 \
         seeds, positive budget saving at the final baseline budget in {positive}/10 \
         seeds ({elapsed:.1?} of the 30 min budget)"
    );
}

// ---------------------------------------------------------------------
// Criterion 6: surrogate-quality analysis sanity
// ---------------------------------------------------------------------
#[test]
fn criterion_6_surrogate_quality_sanity() {
    let _g = gate();
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = criterion5_config(tmp.path());
    cfg.plan.repetitions = 1;
    let quality = QualitySection {
        multipliers: vec![1.5, 4.0],
        seeds: 5,
        generations: 8,
        population_size: 30,
        perfect_oracle: false,
    };

    // perfect oracle: precision exactly 1 at every generation
    let perfect = QualitySection {
        perfect_oracle: true,
        seeds: 2,
        ..quality.clone()
    };
    let rows = run_quality(&cfg, &perfect).unwrap();
    assert!(!rows.is_empty());
    for row in &rows {
        assert_eq!(
            row.precision, 1.0,
            "perfect oracle below 1 at k={} gen {}",
            row.multiplier, row.gen
        );
    }

    // real surrogate: precision for k=1.5 at least that of k=4 on average
    let rows = run_quality(&cfg, &quality).unwrap();
    let mean_precision = |k: f64| {
        let subset: Vec<f64> = rows
            .iter()
            .filter(|r| r.multiplier == k)
            .map(|r| r.precision)
            .collect();
        subset.iter().sum::<f64>() / subset.len() as f64
    };
    let low_k = mean_precision(1.5);
    let high_k = mean_precision(4.0);
    assert!(
        low_k >= high_k,
        "precision should fall as the multiplier grows: k=1.5 {low_k:.3} vs k=4 {high_k:.3}"
    );
    println!(
        "criterion 6 PASS: perfect oracle precision 1.0 at every generation; real \
         surrogate precision k=1.5 {low_k:.3} >= k=4 {high_k:.3} over 5 seeds"
    );
}

// ---------------------------------------------------------------------
// Criterion 7: surrogate overhead
// ---------------------------------------------------------------------
#[test]
fn criterion_7_surrogate_overhead() {
    let _g = gate();
    let tmp = tempfile::tempdir().unwrap();
    let cfg = FileConfig {
        scenario: scenario(100, 0.5),
        plan: PlanSection {
            master_seed: 7,
            repetitions: 1,
            output_dir: tmp.path().to_path_buf(),
            test_instances: 2,
            situations_per_kind: 10,
            min_candidates: 10,
        },
        algorithms: vec![AlgorithmEntry {
            label: "SKGGP-4".into(),
            config: AlgorithmConfig {
                population_size: 50,
                generations: 20,
                offspring_multiplier: 4.0,
                surrogate_enabled: true,
                dedup_enabled: true,
                ..AlgorithmConfig::default()
            },
        }],
        quality: None,
    };
    run_plan(&cfg, None, None).unwrap();
    let rows = load_label_rows(&cfg, "SKGGP-4").unwrap();
    let report = timing_report(&[("SKGGP-4".into(), rows)]);
    let ratio = report[0].ratio;
    assert!(
        ratio <= 0.10,
        "surrogate estimation took {:.1}% of full evaluation (limit 10%)",
        ratio * 100.0
    );
    println!(
        "criterion 7 PASS: per-generation surrogate time is {:.1}% of full evaluation \
         at k=4 ({}ms vs {}ms per generation)",
        ratio * 100.0,
        (report[0].mean_surrogate_s * 1e3).round(),
        (report[0].mean_eval_s * 1e3).round()
    );
}

// ---------------------------------------------------------------------
// Criterion 8: statistical machinery
// ---------------------------------------------------------------------
#[test]
fn criterion_8_statistical_machinery() {
    let _g = gate();
    // hand-computed ten-pair fixture (see stats module for the ranks)
    let b = vec![10.0; 10];
    let d = [1.5, -0.5, 2.0, 3.5, -1.0, 2.5, 4.0, 0.5, 3.0, -2.0];
    let a: Vec<f64> = d.iter().map(|x| 10.0 + x).collect();
    let r = wilcoxon_signed_rank(&a, &b);
    assert_eq!(r.w_plus, 45.0);
    assert_eq!(r.w_minus, 10.0);
    assert_eq!(r.statistic, 10.0);
    assert_eq!(r.flag, SignificanceFlag::Indistinguishable);

    let mut rng = ChaCha8Rng::seed_from_u64(0xC8);
    // 100 synthetic step-curve fixtures vs a direct-definition oracle
    for fixture in 0..100 {
        let make_curve = |rng: &mut ChaCha8Rng| {
            let mut evals = 0u64;
            let mut best = 3.0f64;
            let points: Vec<(u64, f64)> = (0..rng.gen_range(3..12))
                .map(|_| {
                    evals += rng.gen_range(5..50);
                    best = (best - rng.gen_range(0.0..0.2)).max(1.0);
                    (evals, best)
                })
                .collect();
            ConvergenceCurve::new(points).unwrap()
        };
        let baseline = make_curve(&mut rng);
        let other = make_curve(&mut rng);
        let checkpoints: Vec<u64> = baseline.points().iter().map(|&(e, _)| e).collect();
        let at = checkpoints[rng.gen_range(0..checkpoints.len())];
        let got = budget_saved_ratio(&baseline, &other, at);
        // oracle: scan both curves literally by the definition
        let quality = baseline
            .points()
            .iter()
            .filter(|&&(e, _)| e <= at)
            .map(|&(_, f)| f)
            .next_back()
            .unwrap();
        let reached = other
            .points()
            .iter()
            .find(|&&(_, f)| f <= quality)
            .map(|&(e, _)| e);
        let expected = reached.map(|e| (at as i64 - e as i64) as f64 / at as f64);
        assert_eq!(got, expected, "fixture {fixture}");
    }

    // 100 synthetic rank fixtures for the extra-offspring classification
    for fixture in 0..100 {
        let total = 30;
        let base = 15;
        let cutoff = 15;
        let scored: Vec<(f64, f64)> = (0..total)
            .map(|_| (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)))
            .collect();
        let (got_c, got_i) = extra_offspring_gain(&scored, base, cutoff);
        // oracle: explicit rank tables with stable tie-break
        let rank = |key: fn(&(f64, f64)) -> f64| -> Vec<usize> {
            let mut order: Vec<usize> = (0..total).collect();
            order.sort_by(|&x, &y| key(&scored[x]).total_cmp(&key(&scored[y])).then(x.cmp(&y)));
            let mut out = vec![0; total];
            for (r, &i) in order.iter().enumerate() {
                out[i] = r + 1;
            }
            out
        };
        let est_rank = rank(|p| p.0);
        let tru_rank = rank(|p| p.1);
        let mut c = 0;
        let mut i = 0;
        for idx in base..total {
            if est_rank[idx] <= cutoff {
                if tru_rank[idx] <= cutoff {
                    c += 1;
                } else {
                    i += 1;
                }
            }
        }
        assert_eq!((got_c, got_i), (c, i), "fixture {fixture}");
    }
    println!(
        "criterion 8 PASS: signed-rank test reproduces the hand-computed fixture \
         (W+=45, W-=10); budget-saved and extra-offspring match their oracles on \
         100 fixtures each"
    );
}

// ---------------------------------------------------------------------
// Criterion 9: reproducibility
// ---------------------------------------------------------------------
#[test]
fn criterion_9_reproducibility() {
    let _g = gate();
    let make_config = |dir: &std::path::Path| -> FileConfig {
        let algorithm = |label: &str, k: f64, surrogate: bool| AlgorithmEntry {
            label: label.into(),
            config: AlgorithmConfig {
                population_size: 12,
                generations: 4,
                offspring_multiplier: k,
                surrogate_enabled: surrogate,
                dedup_enabled: surrogate,
                ..AlgorithmConfig::default()
            },
        };
        FileConfig {
            scenario: scenario(20, 0.5),
            plan: PlanSection {
                master_seed: 31,
                repetitions: 2,
                output_dir: dir.to_path_buf(),
                test_instances: 2,
                situations_per_kind: 4,
                min_candidates: 4,
            },
            algorithms: vec![
                algorithm("KGGP", 1.0, false),
                algorithm("SKGGP-2", 2.0, true),
            ],
            quality: None,
        }
    };
    let dirs: Vec<tempfile::TempDir> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    run_plan(&make_config(dirs[0].path()), None, Some(2)).unwrap();
    run_plan(&make_config(dirs[1].path()), None, Some(1)).unwrap();
    for file in [
        "aggregate/KGGP.csv",
        "aggregate/SKGGP-2.csv",
        "aggregate/finals.csv",
    ] {
        let a = std::fs::read(dirs[0].path().join(file)).unwrap();
        let b = std::fs::read(dirs[1].path().join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between thread counts");
    }
    println!(
        "criterion 9 PASS: two executions of the same plan under 2 and 1 threads \
         produced byte-identical aggregate CSVs"
    );
}
