//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Numbered criteria:
//!  1. greedy matching equals brute-force maximum matching
//!  2. alignment invariants hold on 10,000 random lists
//!  3. hand-computed alignment cases reproduce exactly
//!  4. the taxonomy has 23 groups; density fixtures sum as published
//!  5. ensemble weight arithmetic and fusion properties
//!  6. count-weighted loss value, gradient check, toy trainer
//!  7. static alignment strictly improves a margin-corrupted corpus
//!  8. dynamic alignment helps exactly the crowded ten-second group
//!  9. every CLI command is byte-deterministic
//! 10. per-group grid search returns the best grid point

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use bk_core::align::{align_dynamic, align_static, align_with_gap_factor, AlignConfig};
use bk_core::data::{AnnotationSet, BoundaryList, Prediction, Provenance, VideoMeta};
use bk_core::detect::{detect, DetectConfig};
use bk_core::eval::{compare_strategies, f1_corpus, match_boundaries, EvalConfig};
use bk_core::fixtures::reported_split_density;
use bk_core::fuse::{fuse, EnsembleMember, EnsembleSpec};
use bk_core::groups::{classify_group, GroupKey};
use bk_core::losses::{focal_grad, focal_loss, focal_objective, train_toy, FocalBatch, ToyModel};
use bk_core::pipeline::{tune_per_group, GridSpec, PipelineConfig};
use bk_core::simgen::{generate, SimConfig};
use bk_core::ScoreCurve;

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn range(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit(rng)
}

fn sorted_unique(mut times: Vec<f64>) -> Vec<f64> {
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    times
}

/// Exhaustive maximum matching, independent of the greedy sweep.
fn brute_force_max_matching(pred: &[f64], gt: &[f64], tol: f64) -> usize {
    fn go(i: usize, used: u32, pred: &[f64], gt: &[f64], tol: f64) -> usize {
        if i == pred.len() {
            return 0;
        }
        let mut best = go(i + 1, used, pred, gt, tol);
        for (j, &g) in gt.iter().enumerate() {
            if used & (1 << j) == 0 && (pred[i] - g).abs() <= tol {
                best = best.max(1 + go(i + 1, used | (1 << j), pred, gt, tol));
            }
        }
        best
    }
    go(0, 0, pred, gt, tol)
}

#[test]
fn criterion_01_matching_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for case in 0..1000 {
        let np = (rng.next_u64() % 7) as usize;
        let ng = (rng.next_u64() % 7) as usize;
        let pred = sorted_unique((0..np).map(|_| range(&mut rng, 0.0, 10.0)).collect());
        let gt = sorted_unique((0..ng).map(|_| range(&mut rng, 0.0, 10.0)).collect());
        let tol = range(&mut rng, 0.0, 3.0);

        let greedy = match_boundaries(&pred, &gt, tol);
        let best = brute_force_max_matching(&pred, &gt, tol);
        assert_eq!(
            greedy.true_positives, best,
            "case {case}: greedy {} vs oracle {best} on {pred:?} / {gt:?} tol {tol}",
            greedy.true_positives
        );
        assert_eq!(greedy.true_positives, greedy.pairs.len());
        assert_eq!(greedy.true_positives + greedy.false_positives, pred.len());
        assert_eq!(greedy.true_positives + greedy.false_negatives, gt.len());
        for &(p, g) in &greedy.pairs {
            assert!((p - g).abs() <= tol);
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!("[acceptance] C1 matching oracle equivalence (1000 instances, {elapsed:?}): PASS");
}

#[test]
fn criterion_02_alignment_invariant_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for case in 0..10_000 {
        let duration = range(&mut rng, 2.0, 20.0);
        let margin = range(&mut rng, 0.05, 0.45);
        let gap_factor = range(&mut rng, 0.0, 0.25);
        let config = AlignConfig {
            margin,
            gap_factor,
            dense_gap_floor_factor: gap_factor / 2.0,
            ..AlignConfig::default()
        };
        let n = (rng.next_u64() % 31) as usize;
        let times =
            sorted_unique((0..n).map(|_| range(&mut rng, 1e-4, 1.0) * (duration - 2e-4)).collect());
        let scores: Vec<f64> = times.iter().map(|_| unit(&mut rng)).collect();
        let meta = VideoMeta::new(format!("c{case}"), duration).unwrap();
        let input =
            Prediction::new(BoundaryList::new(meta.clone(), times.clone()).unwrap(), scores)
                .unwrap();

        for (label, out) in [
            ("static", align_static(&input, &config)),
            ("dynamic", align_dynamic(&input, &config)),
        ] {
            assert!(out.len() <= input.len(), "{label} case {case}: grew");
            let gap = match label {
                "static" => config.gap_factor * duration,
                _ => bk_core::align::effective_gap(duration, input.len(), &config),
            };
            for w in out.times().windows(2) {
                assert!(w[1] > w[0], "{label} case {case}: not increasing");
                assert!(
                    w[1] - w[0] >= gap - 1e-9,
                    "{label} case {case}: gap {} < {gap}",
                    w[1] - w[0]
                );
            }
            for &t in out.times() {
                assert!(
                    t >= margin && t <= duration - margin,
                    "{label} case {case}: {t} outside [{margin}, {}]",
                    duration - margin
                );
            }
            let again = match label {
                "static" => align_static(&out, &config),
                _ => align_dynamic(&out, &config),
            };
            assert_eq!(again, out, "{label} case {case}: not idempotent");
        }

        // Clamp monotonicity against margin-respecting ground truth.
        let gt: Vec<f64> = (0..4)
            .map(|_| range(&mut rng, margin, duration - margin))
            .collect();
        let nearest =
            |x: f64| gt.iter().map(|g| (g - x).abs()).fold(f64::INFINITY, f64::min);
        for &t in &times {
            let clamped = t.clamp(margin, duration - margin);
            assert!(
                nearest(clamped) <= nearest(t) + 1e-12,
                "case {case}: clamping {t} moved away from truth"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!("[acceptance] C2 alignment invariant suite (10000 lists, {elapsed:?}): PASS");
}

#[test]
fn criterion_03_hand_computed_alignment_cases() {
    let config = AlignConfig::default();
    let pred = |times: Vec<f64>| {
        let meta = VideoMeta::new("v", 10.0).unwrap();
        Prediction::unscored(BoundaryList::new(meta, times).unwrap())
    };

    // chain push at gap 1.0
    let pushed = align_static(&pred(vec![1.0, 1.2, 1.4]), &config);
    let expected = [1.0, 2.0, 3.0];
    assert_eq!(pushed.len(), 3);
    for (got, want) in pushed.times().iter().zip(expected) {
        assert!((got - want).abs() <= 1e-9, "{got} vs {want}");
    }

    // crowded ten-second video: the gap relaxes to span / 11
    let gap = bk_core::align::effective_gap(10.0, 12, &config);
    assert!((gap - 9.4 / 11.0).abs() <= 1e-9, "gap {gap}");
    let twelve: Vec<f64> = (0..12).map(|i| 0.4 + i as f64 * 0.77).collect();
    assert_eq!(align_dynamic(&pred(twelve), &config).len(), 12);

    // 25 predictions floor the gap at 0.5: capacity floor(9.4/0.5) + 1
    // = 19, so 6 are dropped.
    let floored: f64 = (0.05 * 10.0f64).max((0.10f64 * 10.0).min(9.4 / 24.0));
    assert!((floored - 0.5).abs() <= 1e-9, "floored gap {floored}");
    let capacity = (9.4 / floored + 1e-9).floor() as usize + 1;
    assert_eq!(capacity, 19);
    let many: Vec<f64> = (0..25).map(|i| 0.35 + i as f64 * 0.38).collect();
    let aligned = align_dynamic(&pred(many), &config);
    assert_eq!(aligned.len(), 19);

    println!("[acceptance] C3 hand-computed alignment cases: PASS");
}

#[test]
fn criterion_04_taxonomy_and_density_fixture() {
    let all = GroupKey::all();
    assert_eq!(all.len(), 23);
    let distinct: std::collections::HashSet<_> = all.iter().map(|k| k.to_string()).collect();
    assert_eq!(distinct.len(), 23);

    let rows = reported_split_density();
    let sums: Vec<f64> = rows.iter().map(|r| r.percent.iter().sum()).collect();
    assert!((sums[0] - 99.99).abs() < 1e-9, "ground-truth row sums to {}", sums[0]);
    assert!((sums[1] - 100.00).abs() < 1e-9, "prediction row sums to {}", sums[1]);

    println!("[acceptance] C4 taxonomy has 23 groups, fixture rows sum to 99.99 / 100.00: PASS");
}

#[test]
fn criterion_05_ensemble_arithmetic_and_fusion() {
    let weight_sum: f64 = 20.0 * 0.0385 + 4.0 * 0.0575;
    assert!((weight_sum - 1.0).abs() <= 1e-9, "weights sum to {weight_sum}");
    let members: Vec<EnsembleMember> = (0..24)
        .map(|i| EnsembleMember {
            source: format!("m{i}"),
            weight: if i < 20 { 0.0385 } else { 0.0575 },
        })
        .collect();
    EnsembleSpec::new(members).expect("challenge weight layout is a valid spec");

    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for case in 0..1000 {
        let len = 1 + (rng.next_u64() % 40) as usize;
        let meta = VideoMeta::new(format!("f{case}"), len as f64).unwrap();
        let scores_a: Vec<f64> = (0..len).map(|_| unit(&mut rng)).collect();
        let scores_b: Vec<f64> = (0..len).map(|_| unit(&mut rng)).collect();
        let a = ScoreCurve::new(meta.clone(), 1.0, 0.5, scores_a).unwrap();
        let b = ScoreCurve::new(meta, 1.0, 0.5, scores_b).unwrap();

        let identity = fuse(std::slice::from_ref(&a), &[1.0]).unwrap();
        assert_eq!(identity, a, "case {case}: weight-1 fusion not identity");

        let w = unit(&mut rng);
        let mixed = fuse(&[a.clone(), b.clone()], &[w, 1.0 - w]).unwrap();
        for i in 0..len {
            let lo = a.scores()[i].min(b.scores()[i]);
            let hi = a.scores()[i].max(b.scores()[i]);
            let v = mixed.scores()[i];
            assert!(
                v >= lo - 1e-12 && v <= hi + 1e-12,
                "case {case}: {v} outside [{lo}, {hi}]"
            );
        }
    }
    println!("[acceptance] C5 ensemble arithmetic and fusion properties (1000 pairs): PASS");
}

#[test]
fn criterion_06_focal_loss_gradient_and_trainer() {
    let batch = FocalBatch::new(vec![0.3, 0.5], vec![10, 5]).unwrap();
    assert!((focal_loss(&batch) - 0.55).abs() <= 1e-12);

    // analytic vs central-difference gradients on random logistic instances
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for case in 0..100 {
        let n = 4 + (rng.next_u64() % 12) as usize;
        let width = 2 + (rng.next_u64() % 4) as usize;
        let model = ToyModel {
            weights: (0..width).map(|_| range(&mut rng, -1.0, 1.0)).collect(),
            bias: range(&mut rng, -1.0, 1.0),
        };
        let features: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..width).map(|_| range(&mut rng, -2.0, 2.0)).collect())
            .collect();
        let labels: Vec<u8> = (0..n).map(|_| (unit(&mut rng) < 0.5) as u8).collect();
        let counts: Vec<u32> = (0..n).map(|_| (unit(&mut rng) * 15.0) as u32).collect();

        let (gw, gb) = focal_grad(&model, &features, &labels, &counts).unwrap();
        let h = 1e-5;
        let eval_at = |m: &ToyModel| focal_objective(m, &features, &labels, &counts).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-8);
        for i in 0..width {
            let mut plus = model.clone();
            plus.weights[i] += h;
            let mut minus = model.clone();
            minus.weights[i] -= h;
            let numeric = (eval_at(&plus) - eval_at(&minus)) / (2.0 * h);
            assert!(rel(gw[i], numeric) < 1e-4, "case {case} w{i}: {} vs {numeric}", gw[i]);
        }
        let mut plus = model.clone();
        plus.bias += h;
        let mut minus = model.clone();
        minus.bias -= h;
        let numeric = (eval_at(&plus) - eval_at(&minus)) / (2.0 * h);
        assert!(rel(gb, numeric) < 1e-4, "case {case} bias: {gb} vs {numeric}");
    }

    // trainer strictly reduces the loss on a separable dataset
    let features: Vec<Vec<f64>> = (0..20)
        .map(|i| vec![i as f64 / 10.0 - 1.0, (i as f64 / 10.0 - 1.0) * 0.5])
        .collect();
    let labels: Vec<u8> = features.iter().map(|f| (f[0] > 0.0) as u8).collect();
    let counts = vec![5u32; 20];
    let initial_model = train_toy(&features, &labels, &counts, 0.0, 0, 33).unwrap();
    let initial = focal_objective(&initial_model, &features, &labels, &counts).unwrap();
    let trained = train_toy(&features, &labels, &counts, 0.5, 200, 33).unwrap();
    let final_loss = focal_objective(&trained, &features, &labels, &counts).unwrap();
    assert!(final_loss < initial, "loss {final_loss} did not drop below {initial}");

    println!("[acceptance] C6 focal loss value, gradient check, trainer descent: PASS");
}

#[test]
fn criterion_07_static_alignment_beats_raw_on_corrupted_corpus() {
    let start = Instant::now();
    let sim = SimConfig {
        seed: 4242,
        n_videos: 2000,
        boundary_rate: 0.6,
        rater_jitter_sd: 0.1,
        noise_sd: 0.05,
        min_gap: 1.0,
        ..SimConfig::default()
    };
    let corpus = generate(&sim).unwrap();

    // Predictions: ground truth plus uniform jitter, with 20% of the
    // boundaries displaced into the 0.3 s end margins.
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    let mut raw = Vec::with_capacity(corpus.annotations.len());
    let mut displaced = 0usize;
    let mut total = 0usize;
    for ann in &corpus.annotations {
        let d = ann.meta().duration();
        let mut times = Vec::new();
        for &t in ann.primary().times() {
            total += 1;
            if unit(&mut rng) < 0.2 {
                displaced += 1;
                let pos = range(&mut rng, 0.02, 0.28);
                times.push(if unit(&mut rng) < 0.5 { pos } else { d - pos });
            } else {
                times.push(t + range(&mut rng, -0.1, 0.1));
            }
        }
        raw.push(BoundaryList::new(ann.meta().clone(), sorted_unique(times)).unwrap());
    }
    assert!(total > 0 && displaced > total / 10, "corruption too rare to test anything");

    let align_config = AlignConfig::default();
    let aligned: Vec<BoundaryList> = raw
        .iter()
        .map(|bl| {
            align_static(&Prediction::unscored(bl.clone()), &align_config)
                .boundaries()
                .clone()
        })
        .collect();

    let eval_config = EvalConfig::default();
    let f1_raw = f1_corpus(&raw, &corpus.annotations, &eval_config).unwrap();
    let f1_aligned = f1_corpus(&aligned, &corpus.annotations, &eval_config).unwrap();
    assert!(
        f1_aligned > f1_raw,
        "aligned F1 {f1_aligned} not above raw F1 {f1_raw}"
    );

    let cmp = compare_strategies(&raw, &aligned, &corpus.annotations, &eval_config).unwrap();
    assert!(
        cmp.overall.improved_pct > cmp.overall.lowered_pct,
        "improved {}% vs lowered {}%",
        cmp.overall.improved_pct,
        cmp.overall.lowered_pct
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "[acceptance] C7 static alignment beats raw (F1 {:.4} -> {:.4}, improved {:.2}% vs lowered {:.2}%, {elapsed:?}): PASS",
        f1_raw, f1_aligned, cmp.overall.improved_pct, cmp.overall.lowered_pct
    );
}

#[test]
fn criterion_08_dynamic_alignment_helps_the_crowded_group() {
    // Ten-second corpus, 30% of videos with more than ten boundaries.
    let mut rng = ChaCha8Rng::seed_from_u64(888);
    let mut annotations = Vec::new();
    let mut raw = Vec::new();
    for i in 0..500 {
        let meta = VideoMeta::new(format!("v{i:05}"), 10.0).unwrap();
        let dense = i % 10 < 3;
        let count = if dense {
            12 + (rng.next_u64() % 3) as usize
        } else {
            4 + (rng.next_u64() % 3) as usize
        };
        let base: Vec<f64> = (0..count)
            .map(|k| 0.3 + 9.4 * k as f64 / (count - 1) as f64)
            .collect();
        let gt = sorted_unique(
            base.iter()
                .map(|t| (t + range(&mut rng, -0.03, 0.03)).clamp(0.05, 9.95))
                .collect(),
        );
        let pred = sorted_unique(
            gt.iter()
                .map(|t| (t + range(&mut rng, -0.03, 0.03)).clamp(0.05, 9.95))
                .collect(),
        );
        annotations
            .push(AnnotationSet::new(meta.clone(), vec![gt], Provenance::Human).unwrap());
        raw.push(Prediction::unscored(BoundaryList::new(meta, pred).unwrap()));
    }

    let config = AlignConfig::default();
    let statics: Vec<BoundaryList> = raw
        .iter()
        .map(|p| align_static(p, &config).boundaries().clone())
        .collect();
    let dynamics: Vec<BoundaryList> = raw
        .iter()
        .map(|p| align_dynamic(p, &config).boundaries().clone())
        .collect();

    // dynamic alignment keeps boundaries the static gap would discard
    let kept_static: usize = statics.iter().map(BoundaryList::len).sum();
    let kept_dynamic: usize = dynamics.iter().map(BoundaryList::len).sum();
    assert!(
        kept_dynamic > kept_static,
        "dynamic kept {kept_dynamic}, static {kept_static}"
    );

    let eval_config = EvalConfig::default();
    let f1_static = f1_corpus(&statics, &annotations, &eval_config).unwrap();
    let f1_dynamic = f1_corpus(&dynamics, &annotations, &eval_config).unwrap();
    assert!(
        f1_dynamic >= f1_static,
        "dynamic F1 {f1_dynamic} below static F1 {f1_static}"
    );

    let cmp = compare_strategies(&statics, &dynamics, &annotations, &eval_config).unwrap();
    let crowded: GroupKey = "d10:c10+".parse().unwrap();
    for (group, row) in &cmp.per_group {
        if *group == crowded {
            assert!(
                row.improved_pct > 0.0,
                "no improvement inside the crowded group"
            );
            assert!(
                row.improved_pct > row.lowered_pct,
                "crowded group: improved {}% vs lowered {}%",
                row.improved_pct,
                row.lowered_pct
            );
        } else {
            assert_eq!(
                row.unchanged_pct, 100.0,
                "group {group} changed outside the crowded one"
            );
        }
    }

    println!(
        "[acceptance] C8 dynamic helps exactly d10:c10+ (corpus F1 {:.4} -> {:.4}): PASS",
        f1_static, f1_dynamic
    );
}

fn bk(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_bk"))
        .args(args)
        .output()
        .expect("bk binary runs")
}

fn assert_same_bytes(a: &Path, b: &Path) {
    let ba = std::fs::read(a).unwrap_or_else(|_| panic!("missing {}", a.display()));
    let bb = std::fs::read(b).unwrap_or_else(|_| panic!("missing {}", b.display()));
    assert_eq!(ba, bb, "{} and {} differ", a.display(), b.display());
}

#[test]
fn criterion_09_cli_byte_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name);
    let s = |p: std::path::PathBuf| p.to_string_lossy().into_owned();

    // Each command runs twice with identical inputs; outputs must match
    // byte for byte. The two simulate runs also provide the corpus.
    for run in ["r1", "r2"] {
        let corpus = s(path(&format!("{run}-corpus")));
        let ok = bk(&[
            "simulate", "--out-dir", &corpus, "--n-videos", "60", "--seed", "9",
        ]);
        assert!(ok.status.success(), "simulate failed: {ok:?}");
    }
    assert_same_bytes(&path("r1-corpus/scores.bk"), &path("r2-corpus/scores.bk"));
    assert_same_bytes(
        &path("r1-corpus/annotations.bk"),
        &path("r2-corpus/annotations.bk"),
    );

    let scores = s(path("r1-corpus/scores.bk"));
    let annotations = s(path("r1-corpus/annotations.bk"));
    let ensemble = path("ensemble.cfg");
    std::fs::write(&ensemble, format!("{scores} 0.6\n{scores} 0.4\n")).unwrap();

    for run in ["r1", "r2"] {
        let p = |name: &str| s(path(&format!("{run}-{name}")));
        let checks = [
            bk(&["detect", "--scores", &scores, "--out", &p("preds.bk")]),
            bk(&[
                "align", "--preds", &p("preds.bk"), "--durations-from", &scores,
                "--out", &p("aligned.bk"), "--mode", "dynamic",
            ]),
            bk(&["fuse", "--spec", &s(ensemble.clone()), "--out", &p("fused.bk")]),
            bk(&[
                "eval", "--preds", &p("aligned.bk"), "--annotations", &annotations,
                "--report-out", &p("eval.bk"),
            ]),
            bk(&[
                "groups", "--annotations", &annotations, "--out", &p("groups.bk"),
            ]),
            bk(&[
                "split", "--scores", &scores, "--out-easy", &p("easy.txt"),
                "--out-hard", &p("hard.txt"),
            ]),
            bk(&[
                "pseudo-label", "--scores", &scores, "--out", &p("pseudo.bk"),
            ]),
            bk(&[
                "tune", "--scores", &scores, "--annotations", &annotations,
                "--thresholds", "0.4,0.5", "--gap-factors", "0.05,0.1",
                "--out-gaps", &p("gaps.cfg"), "--out", &p("tune.bk"),
            ]),
            bk(&[
                "report", "--scores", &scores, "--annotations", &annotations,
                "--align-mode", "dynamic", "--compare-to", "static",
                "--out-dir", &p("report"),
            ]),
        ];
        for out in checks {
            assert!(out.status.success(), "command failed: {out:?}");
        }
    }

    for name in [
        "preds.bk", "aligned.bk", "fused.bk", "eval.bk", "groups.bk", "easy.txt",
        "hard.txt", "pseudo.bk", "gaps.cfg", "tune.bk", "report/report.txt",
        "report/report.bk", "report/predictions.bk",
    ] {
        assert_same_bytes(&path(&format!("r1-{name}")), &path(&format!("r2-{name}")));
    }
    println!("[acceptance] C9 CLI byte determinism across all commands: PASS");
}

#[test]
fn criterion_10_grid_search_soundness() {
    let sim = SimConfig {
        seed: 2024,
        n_videos: 200,
        noise_sd: 0.08,
        ..SimConfig::default()
    };
    let corpus = generate(&sim).unwrap();
    let config = PipelineConfig {
        grid: GridSpec {
            thresholds: vec![0.35, 0.5, 0.65],
            gap_factors: vec![0.05, 0.10],
        },
        ..PipelineConfig::default()
    };
    let outcome = tune_per_group(&corpus.curves, &corpus.annotations, &config).unwrap();
    assert!(!outcome.entries.is_empty());

    // Independent re-evaluation of every grid point per group.
    let by_id: std::collections::HashMap<&str, &AnnotationSet> = corpus
        .annotations
        .iter()
        .map(|a| (a.meta().id(), a))
        .collect();
    let mut members: BTreeMap<GroupKey, Vec<&ScoreCurve>> = BTreeMap::new();
    for curve in &corpus.curves {
        let base = detect(curve, &config.detect);
        members
            .entry(classify_group(curve.meta().duration(), base.len()))
            .or_default()
            .push(curve);
    }
    let group_f1 = |curves: &[&ScoreCurve], threshold: f64, gap: f64| -> f64 {
        let detect_cfg = DetectConfig {
            threshold,
            ..config.detect.clone()
        };
        let mut sum = 0.0;
        for curve in curves {
            let pred = align_with_gap_factor(
                &detect(curve, &detect_cfg),
                config.align.margin,
                gap,
            );
            let ann = by_id[curve.meta().id()];
            sum += bk_core::eval::f1_video(pred.boundaries(), ann, &config.eval).unwrap();
        }
        sum / curves.len() as f64
    };

    for (key, entry) in &outcome.entries {
        let curves = &members[key];
        assert_eq!(curves.len(), entry.videos);
        let winner = group_f1(curves, entry.threshold, entry.gap_factor);
        assert!(
            (winner - entry.f1_after).abs() < 1e-12,
            "group {key}: reported {} vs recomputed {winner}",
            entry.f1_after
        );
        for &threshold in &config.grid.thresholds {
            for &gap in &config.grid.gap_factors {
                let f1 = group_f1(curves, threshold, gap);
                assert!(
                    entry.f1_after >= f1 - 1e-12,
                    "group {key}: ({threshold}, {gap}) scores {f1} above the winner {}",
                    entry.f1_after
                );
            }
        }
    }
    println!(
        "[acceptance] C10 grid-search soundness over {} groups: PASS",
        outcome.entries.len()
    );
}
