//! One test per acceptance criterion. Each prints a single PASS/FAIL line.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use taintmine::frontend::{read_corpus, ElementId, ElementKind, ProjectModel};
use taintmine::inference::{solve, ConstraintSystem, Family};
use taintmine::pipeline::{eval_boosted, load_labels, run_in_memory, simulate_triage, PipelineConfig, Ratio};
use taintmine::propagation::{build_graph, mine_triples, DEFAULT_TRIPLE_CAP};
use taintmine::representations::{canonicalize, compute_access_paths, Representation};
use taintmine::similarity::{refine_score, CodePair, EmbeddingProvider, PredictionEmbeddings, TokenHashEmbedder};
use taintmine::specs::SpecKind;
use taintmine::triage::{load_state, FeedbackState, TriageSession};

fn report(n: u32, name: &str, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => println!("criterion {n} {name}: PASS ({detail})"),
        Err(why) => {
            println!("criterion {n} {name}: FAIL ({why})");
            panic!("criterion {n} failed: {why}");
        }
    }
}

fn check(cond: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why())
    }
}

#[test]
fn criterion_1_solver_matches_grid_search() {
    report(
        1,
        "solver vs grid search",
        (|| {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let mut solver_time = Duration::ZERO;
            let mut worst = 0.0f64;
            for round in 0..25 {
                let n_free = rng.gen_range(1..=3);
                let n_pinned = rng.gen_range(3 - n_free..=3);
                let pins: Vec<Option<f64>> = (0..n_free)
                    .map(|_| None)
                    .chain((0..n_pinned).map(|_| Some(if rng.gen_bool(0.5) { 1.0 } else { 0.0 })))
                    .collect();
                let n = pins.len();
                let c = rng.gen_range(0.2..0.9);
                let lambda = rng.gen_range(0.0..0.5);
                let mut cons = Vec::new();
                for _ in 0..rng.gen_range(1..=6) {
                    let a = rng.gen_range(0..n);
                    let b = (a + rng.gen_range(1..n)) % n;
                    let rest: Vec<usize> = (0..n).filter(|&i| i != a && i != b).collect();
                    let k = rng.gen_range(1..=rest.len());
                    let mut rhs: Vec<usize> = rest.clone();
                    for i in (1..rhs.len()).rev() {
                        rhs.swap(i, rng.gen_range(0..=i));
                    }
                    rhs.truncate(k);
                    cons.push(OracleConstraint { lhs: [a, b], rhs, c });
                }

                let mut sys = ConstraintSystem::new();
                let vars: Vec<usize> =
                    (0..n).map(|i| sys.variable(&Representation::from(format!("r{i}()")), SpecKind::Src)).collect();
                for (i, p) in pins.iter().enumerate() {
                    if let Some(v) = p {
                        sys.pin(vars[i], *v).map_err(|e| e.to_string())?;
                    }
                }
                for k in &cons {
                    sys.add_constraint(
                        Family::SrcSan,
                        [vars[k.lhs[0]], vars[k.lhs[1]]],
                        k.rhs.iter().map(|&i| vars[i]).collect(),
                        k.c,
                    );
                }
                let t = Instant::now();
                let got = solve(&sys, lambda, "p").map_err(|e| e.to_string())?;
                solver_time += t.elapsed();
                let oracle = grid_minimum(&pins, &cons, lambda, 0.005);
                let gap = (got.objective - oracle).abs();
                worst = worst.max(gap);
                check(gap <= 1e-2, || format!("system {round}: solver {} vs grid {oracle}", got.objective))?;
            }
            check(solver_time < Duration::from_secs(5), || format!("solver took {solver_time:?}"))?;
            Ok(format!("25 systems, worst gap {worst:.2e}, solver time {solver_time:?}"))
        })(),
    );
}

#[test]
fn criterion_2_worked_lp() {
    report(
        2,
        "worked LP",
        (|| {
            let mut sys = ConstraintSystem::new();
            let src = sys.variable(&"a()".into(), SpecKind::Src);
            let san = sys.variable(&"b()".into(), SpecKind::San);
            let snk = sys.variable(&"c(0)".into(), SpecKind::Snk);
            sys.pin(src, 1.0).map_err(|e| e.to_string())?;
            sys.pin(san, 1.0).map_err(|e| e.to_string())?;
            sys.add_constraint(Family::SrcSan, [src, san], vec![snk], 0.75);
            let s = solve(&sys, 0.1, "p").map_err(|e| e.to_string())?;
            // oracle: eps(x) = max(0, 2 - x - 0.75); eps + 0.1 x falls until x = 1
            let x = s.get(&"c(0)".into(), SpecKind::Snk).unwrap_or(f64::NAN);
            check((x - 1.0).abs() < 1e-6, || format!("snk = {x}"))?;
            check((s.epsilons[0] - 0.25).abs() < 1e-6, || format!("eps = {}", s.epsilons[0]))?;
            Ok(format!("snk = {x}, eps = {}", s.epsilons[0]))
        })(),
    );
}

#[test]
fn criterion_3_motivating_fixture() {
    report(
        3,
        "motivating fixture",
        (|| {
            let corpus = read_corpus(&data("motivating")).map_err(|e| e.to_string())?;
            let (name, files) = corpus.into_iter().next().ok_or("empty fixture")?;
            let model = ProjectModel::from_sources(name, files);
            check(model.skipped.is_empty(), || format!("unparsed files: {:?}", model.skipped))?;
            let find = |path: &str, kind: ElementKind, text: &str| -> Result<ElementId, String> {
                model
                    .elements()
                    .find(|(f, e)| f.file.path == path && e.kind == kind && f.file.slice(e.span) == text)
                    .map(|(_, e)| e.id.clone())
                    .ok_or_else(|| format!("no {kind:?} `{text}` in {path}"))
            };
            let e1 = find("slider.js", ElementKind::PropertyRead, "req.body")?;
            let e2 = find("slider.js", ElementKind::CallResult, "text.toLowerCase().replace(/\\s+/g, '-')")?;
            let e3 = find("slider.js", ElementKind::CallArgument(0), "{ id: id }")?;
            let e4 = find("loginlog.js", ElementKind::PropertyRead, "req.body.token")?;
            let e5 = find("loginlog.js", ElementKind::CallResult, "token.replace('Bearer ', '')")?;
            let e6 = find("loginlog.js", ElementKind::CallArgument(0), "{ token: token }")?;
            let log = find("loginlog.js", ElementKind::CallArgument(0), "token")?;

            let triples = mine_triples(&build_graph(&model), DEFAULT_TRIPLE_CAP).map_err(|e| e.to_string())?;
            let has = |a: &ElementId, b: &ElementId, c: &ElementId| {
                triples.iter().any(|t| &t.src == a && &t.san == b && &t.snk == c)
            };
            check(has(&e1, &e2, &e3), || "missing first triple".into())?;
            check(has(&e4, &e5, &e6), || "missing second triple".into())?;
            check(has(&e4, &e5, &log), || "missing console.log triple".into())?;

            let (file, el) = model.find(&e3).ok_or("sink element vanished")?;
            let paths: BTreeSet<String> = compute_access_paths(file, el).iter().map(|p| p.to_string()).collect();
            for expected in
                ["findByIdAndUpdate(0)", "getquerySendResponse(0).findByIdAndUpdate(0)", "getquerySendResponse(0).*(0)"]
            {
                check(paths.contains(expected), || format!("{expected} not among {paths:?}"))?;
            }
            let canon = canonicalize(&compute_access_paths(file, el)).ok_or("no canonical form")?;
            check(canon.as_str() == "findByIdAndUpdate(0)", || format!("canonical {canon}"))?;
            Ok(format!("{} triples, canonical {canon}", triples.len()))
        })(),
    );
}

#[test]
fn criterion_4_planted_corpus() {
    report(
        4,
        "planted corpus",
        (|| {
            let t = Instant::now();
            let cfg = PipelineConfig {
                corpus: Some(data("planted/train")),
                test_corpus: Some(data("planted/test")),
                seeds: Some(data("planted/seeds.jsonl")),
                ek_seeds: Some(data("planted/pool_seeds.jsonl")),
                ..Default::default()
            };
            let a = run_in_memory(&cfg).map_err(|e| e.to_string())?;
            let elapsed = t.elapsed();
            let planted = Representation::from("saveRecord(0)");
            let decoy = Representation::from("log(0)");
            let score = a.specs.iter().find(|s| s.rep == planted && s.kind == SpecKind::Snk).map(|s| s.score);
            check(score.is_some_and(|s| s >= 0.5), || format!("planted spec score {score:?}"))?;
            check(a.refined.first().is_some_and(|p| p.rep == planted), || "planted sink is not ranked first".into())?;
            let rank = |v: &[taintmine::predictor::PredictedSink]| v.iter().position(|p| p.rep == decoy);
            let (before, after) = (rank(&a.predictions), rank(&a.refined));
            check(before.is_some() && after > before, || format!("decoy rank {before:?} -> {after:?}"))?;
            check(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
            Ok(format!(
                "planted score {:.3}, decoy rank {} -> {}, {elapsed:?}",
                score.unwrap_or_default(),
                before.unwrap_or_default(),
                after.unwrap_or_default()
            ))
        })(),
    );
}

#[test]
fn criterion_5_refined_score_formula() {
    report(
        5,
        "refined score formula",
        (|| {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let mut worst = 0.0f64;
            for _ in 0..1000 {
                let (p, zs, zf): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
                let expected = (p + (zs + zf) / 2.0) / 2.0;
                let got = refine_score(p, zs, zf);
                worst = worst.max((got - expected).abs());
            }
            check(worst <= 1e-9, || format!("max error {worst:e}"))?;
            Ok(format!("1000 triples, max error {worst:.1e}"))
        })(),
    );
}

#[test]
fn criterion_6_ban_similar_oracle() {
    report(
        6,
        "ban-similar oracle",
        (|| {
            let preds = load_predictions("ban_similar/predictions.jsonl");
            check(preds.len() == 20, || format!("fixture has {} predictions", preds.len()))?;
            let e = TokenHashEmbedder::default();
            let vecs: Vec<(Vec<f64>, Vec<f64>)> =
                preds.iter().map(|p| (e.embed(&p.stmt).0, e.embed(&p.func).0)).collect();
            let ep: PredictionEmbeddings =
                preds.iter().map(|p| (p.id.clone(), CodePair::of(&e, &p.stmt, &p.func))).collect();
            let mut sizes = Vec::new();
            for alpha in [0.80, 0.90, 0.95, 1.0] {
                let mut total = 0;
                for (i, p) in preds.iter().enumerate() {
                    let mut expected = BTreeSet::from([p.id.clone()]);
                    for (j, q) in preds.iter().enumerate() {
                        let sim = (cos(&vecs[i].0, &vecs[j].0) + cos(&vecs[i].1, &vecs[j].1)) / 2.0;
                        if i != j && q.rep == p.rep && sim > alpha + 1e-12 {
                            expected.insert(q.id.clone());
                        }
                    }
                    let mut s = TriageSession::new(preds.clone(), ep.clone());
                    let got: BTreeSet<ElementId> =
                        s.ban_similar(&p.id, alpha).map_err(|e| e.to_string())?.into_iter().collect();
                    check(got == expected, || format!("alpha {alpha}, clicked {}: {got:?} vs {expected:?}", p.id))?;
                    if alpha == 1.0 {
                        check(got.len() == 1, || format!("alpha 1.0 dismissed {got:?}"))?;
                    }
                    total += got.len();
                }
                sizes.push(format!("{alpha}:{total}"));
            }
            Ok(format!("total dismissed per alpha {}", sizes.join(" ")))
        })(),
    );
}

#[test]
fn criterion_7_eval_identities() {
    report(
        7,
        "eval identities",
        (|| {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let draw = |rng: &mut ChaCha8Rng| -> BTreeSet<u32> { (0..8).filter(|_| rng.gen_bool(0.4)).collect() };
            let same = |r: Ratio, o: Option<f64>| match (r, o) {
                (Ratio::Value(a), Some(b)) => (a - b).abs() < 1e-12,
                (Ratio::NotApplicable, None) => true,
                _ => false,
            };
            let mut na = 0;
            for i in 0..50 {
                let (old, boosted, new) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
                let boosted: BTreeSet<u32> = boosted.union(&old).copied().collect();
                let r = eval_boosted(&old, &boosted, &new);
                let o = set_oracle(&old, &boosted, &new);
                check(same(r.precision, o.precision) && same(r.recall, o.recall), || format!("triple {i}: {r:?}"))?;
                check(
                    (r.alerts_to_recover, r.alerts_recovered, r.spurious_alerts)
                        == (o.to_recover, o.recovered, o.spurious),
                    || format!("triple {i}: counts {r:?}"),
                )?;
                na += usize::from(o.precision.is_none()) + usize::from(o.recall.is_none());
            }
            let a: BTreeSet<u32> = [1].into();
            let r = eval_boosted(&a, &a, &[1, 2].into());
            check(r.precision == Ratio::NotApplicable, || "boosted = old must be n/a".into())?;
            let r = eval_boosted(&a, &[1, 2, 3].into(), &a);
            check(r.recall == Ratio::NotApplicable && r.spurious_alerts == 2, || "new = old must be n/a".into())?;
            Ok(format!("50 triples, {na} not-applicable fields"))
        })(),
    );
}

#[test]
fn criterion_8_triage_monotonicity() {
    report(
        8,
        "triage monotonicity",
        (|| {
            let preds = load_predictions("triage/refined.jsonl");
            let labels = load_labels(&data("triage/labels.jsonl")).map_err(|e| e.to_string())?;
            check(preds.len() == 50, || format!("fixture has {} predictions", preds.len()))?;
            let e = TokenHashEmbedder::default();
            let ep: PredictionEmbeddings =
                preds.iter().map(|p| (p.id.clone(), CodePair::of(&e, &p.stmt, &p.func))).collect();
            let mut prev: Option<(usize, usize)> = None;
            let mut trace = Vec::new();
            for step in 0..=15 {
                let alpha = 0.95 - 0.01 * step as f64;
                let r = simulate_triage(&preds, &labels, &ep, 0.5, 0.2, alpha).map_err(|e| e.to_string())?;
                check(
                    r.discarded_by_score + r.discarded_by_coarseness + r.steps_to_triage + r.swept == r.total,
                    || format!("accounting broken at {alpha:.2}: {r:?}"),
                )?;
                if let Some((steps, fns)) = prev {
                    check(r.steps_to_triage <= steps, || format!("steps rose at {alpha:.2}"))?;
                    check(r.false_negatives >= fns, || format!("false negatives fell at {alpha:.2}"))?;
                }
                prev = Some((r.steps_to_triage, r.false_negatives));
                if step % 5 == 0 {
                    trace.push(format!("{alpha:.2}:{}/{}", r.steps_to_triage, r.false_negatives));
                }
            }
            Ok(format!("steps/false negatives {}", trace.join(" ")))
        })(),
    );
}

#[test]
fn criterion_9_audit_replay() {
    report(
        9,
        "audit replay",
        (|| {
            let preds = load_predictions("ban_similar/predictions.jsonl");
            let e = TokenHashEmbedder::default();
            let ep: PredictionEmbeddings =
                preds.iter().map(|p| (p.id.clone(), CodePair::of(&e, &p.stmt, &p.func))).collect();
            let reps: Vec<Representation> =
                preds.iter().map(|p| p.rep.clone()).collect::<BTreeSet<_>>().into_iter().collect();
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            let mut longest = 0;
            for seq in 0..100 {
                let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
                let mut s = TriageSession::open(preds.clone(), ep.clone(), dir.path()).map_err(|e| e.to_string())?;
                let len = rng.gen_range(0..=200);
                longest = longest.max(len);
                for _ in 0..len {
                    let id = &preds[rng.gen_range(0..preds.len())].id;
                    let r = match rng.gen_range(0..5) {
                        0 => s.ban(id).map(drop),
                        1 => s.ban_similar(id, rng.gen_range(0.8..=1.0)).map(drop),
                        2 => s.unban(id),
                        3 => s.accept(id),
                        _ => s.toggle_representation(&reps[rng.gen_range(0..reps.len())], rng.gen_bool(0.5)),
                    };
                    r.map_err(|e| e.to_string())?;
                }
                let live = s.state().clone();
                drop(s);
                let restored = load_state(dir.path()).map_err(|e| e.to_string())?;
                let replayed = FeedbackState::replay(live.audit_log.clone());
                check(restored == live && restored.audit_log == live.audit_log, || {
                    format!("sequence {seq}: disk state differs")
                })?;
                check(replayed.same_sets(&live), || format!("sequence {seq}: replay differs"))?;
            }
            Ok(format!("100 sequences, longest {longest}"))
        })(),
    );
}
