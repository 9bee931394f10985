//! Acceptance suite: every release criterion as one test, each printing a
//! labeled pass line. Run with `cargo test -p nesc --test acceptance`
//! (add `-- --nocapture` to see the lines as they pass).

mod common;

use std::time::Instant;

use nesc::calibration::{calibrate, fit_pav};
use nesc::metrics::{default_thresholds, entity_prf, pr_curve, token_prf};
use nesc::ner::{
    crf_nll, crf_nll_on_tape, emissions, emissions_on_tape, encode, encode_on_tape, tag_vectors,
    train_ner, viterbi, EntitySpan, Label, NerParams, NerTrainConfig, ALL_LABELS, NUM_LABELS,
};
use nesc::sampling::{build_dataset, perturb, sample_random_negative, LengthDistribution};
use nesc::scorer::{
    head_log_probs_on_tape, nesc_score, score_span, train_head, train_nesc, HeadSample,
    NescParams, NescTrainConfig, POSITIVE_CLASS,
};
use nesc::tensor::{Tape, Tensor, Value};
use nesc::{
    build_dataset as build_nesc_dataset, EmbeddingTable, EntityType, Rng, SamplerConfig,
};

fn pass(line: &str) {
    eprintln!("[PASS] {line}");
}

/// Emissions produced by a real small encoder over random token vectors.
fn model_emissions(t: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    let vocab: Vec<String> = (0..8).map(|i| format!("w{i}")).collect();
    let table = EmbeddingTable::random(&vocab, rng);
    let params = NerParams::init(5, 0.0, rng);
    let tokens: Vec<nesc::Token> = (0..t)
        .map(|_| {
            nesc::Token::from_surface(vocab[rng.below(vocab.len())].clone(), nesc::PosTag::NOUN)
        })
        .collect();
    let vectors = nesc::features::vectorize_sentence(&tokens, &table).expect("featurizes");
    let contexts = encode(&vectors, &params, false, rng).expect("encodes");
    contexts
        .iter()
        .map(|c| emissions(c, &params).expect("emissions"))
        .collect()
}

fn random_transitions(rng: &mut Rng) -> Tensor {
    Tensor::new(
        vec![NUM_LABELS + 2, NUM_LABELS + 2],
        (0..(NUM_LABELS + 2) * (NUM_LABELS + 2))
            .map(|_| rng.uniform(-1.5, 1.5))
            .collect(),
    )
    .expect("shape matches")
}

#[test]
fn crf_partition_matches_exhaustive_enumeration() {
    let started = Instant::now();
    let mut rng = Rng::seed(1001);

    // 200 instances, 50 per sequence length, emissions from an H=5 model.
    for t in 1..=4usize {
        for _ in 0..50 {
            let emission_rows = model_emissions(t, &mut rng);
            let transitions = random_transitions(&mut rng);
            let gold: Vec<Label> = (0..t)
                .map(|_| ALL_LABELS[rng.below(NUM_LABELS)])
                .collect();
            let nll = crf_nll(&emission_rows, &transitions, &gold).expect("nll");
            let oracle_log_z = common::oracle_log_partition(&emission_rows, &transitions);
            let oracle_gold = common::oracle_path_score(&emission_rows, &transitions, &gold);
            assert!(
                (nll - (oracle_log_z - oracle_gold)).abs() < 1e-8,
                "T={t}: nll {nll} vs oracle {}",
                oracle_log_z - oracle_gold
            );
        }
    }

    // exp(-nll) over every possible gold sequence sums to 1.
    for t in 1..=3usize {
        for _ in 0..2 {
            let emission_rows = model_emissions(t, &mut rng);
            let transitions = random_transitions(&mut rng);
            let total: f64 = common::all_label_paths(t)
                .iter()
                .map(|p| (-crf_nll(&emission_rows, &transitions, p).expect("nll")).exp())
                .sum();
            assert!((total - 1.0).abs() < 1e-8, "T={t}: paths sum to {total}");
        }
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 120, "took {elapsed:?}, budget is 2 minutes");
    pass(&format!(
        "CRF log-partition and path normalization match exhaustive enumeration ({elapsed:?})"
    ));
}

#[test]
fn viterbi_matches_brute_force_argmax() {
    let mut rng = Rng::seed(1002);
    for t in 1..=4usize {
        for _ in 0..50 {
            let emission_rows = model_emissions(t, &mut rng);
            let transitions = random_transitions(&mut rng);
            let (path, score) = viterbi(&emission_rows, &transitions).expect("decodes");
            let (oracle_path, oracle_score) =
                common::oracle_best_path(&emission_rows, &transitions);
            assert!(
                (score - oracle_score).abs() < 1e-10,
                "T={t}: score {score} vs {oracle_score}"
            );
            assert_eq!(path, oracle_path, "T={t}: decoded path differs");
        }
    }
    // Deliberate full tie: the backtrack rule must pick all-O.
    let emission_rows = vec![vec![0.0; NUM_LABELS]; 3];
    let transitions = Tensor::zeros(vec![NUM_LABELS + 2, NUM_LABELS + 2]);
    let (path, _) = viterbi(&emission_rows, &transitions).expect("decodes");
    let (oracle_path, _) = common::oracle_best_path(&emission_rows, &transitions);
    assert_eq!(path, oracle_path);
    assert!(path.iter().all(|l| *l == Label::Outside));
    pass("Viterbi equals brute-force argmax with the lowest-index tie rule");
}

fn ner_loss_of(params: &NerParams, vectors: &[nesc::TokenVector], gold: &[Label]) -> f64 {
    let mut tape = Tape::new();
    let bound = params.bind(&mut tape);
    let mut rng = Rng::seed(0);
    let contexts = encode_on_tape(&mut tape, vectors, &bound, false, &mut rng).expect("encodes");
    let emission_values: Vec<Value> = contexts
        .into_iter()
        .map(|c| emissions_on_tape(&mut tape, c, &bound).expect("emissions"))
        .collect();
    let loss =
        crf_nll_on_tape(&mut tape, &emission_values, bound.transitions, gold).expect("loss");
    tape.item(loss)
}

#[test]
#[allow(clippy::needless_range_loop)]
fn gradient_suite_full_ner_loss() {
    let mut rng = Rng::seed(1003);
    let vocab = ["a", "b", "c"];
    let table = EmbeddingTable::random(&vocab, &mut rng);
    let tokens: Vec<nesc::Token> = vocab
        .iter()
        .map(|w| nesc::Token::from_surface(*w, nesc::PosTag::NOUN))
        .collect();
    let vectors = nesc::features::vectorize_sentence(&tokens, &table).expect("featurizes");
    let gold = vec![
        Label::parse("B-Place").unwrap(),
        Label::parse("I-Place").unwrap(),
        Label::Outside,
    ];
    let mut params = NerParams::init(5, 0.0, &mut rng);
    params.transitions = random_transitions(&mut rng);

    let mut tape = Tape::new();
    let bound = params.bind(&mut tape);
    let mut enc_rng = Rng::seed(0);
    let contexts =
        encode_on_tape(&mut tape, &vectors, &bound, false, &mut enc_rng).expect("encodes");
    let emission_values: Vec<Value> = contexts
        .into_iter()
        .map(|c| emissions_on_tape(&mut tape, c, &bound).expect("emissions"))
        .collect();
    let loss =
        crf_nll_on_tape(&mut tape, &emission_values, bound.transitions, &gold).expect("loss");
    let grads = tape.backward(loss).expect("backward");

    let h = 1e-5;
    let leaf_values = bound.leaf_values();
    let mut probe = params.clone();
    let mut checked = 0usize;
    for (bi, leaf) in leaf_values.iter().enumerate() {
        let name = params.blocks()[bi].0;
        let ad = grads.get(*leaf).data().to_vec();
        for e in 0..ad.len() {
            let orig = probe.blocks()[bi].1.data()[e];
            probe.blocks_mut()[bi].1.data_mut()[e] = orig + h;
            let up = ner_loss_of(&probe, &vectors, &gold);
            probe.blocks_mut()[bi].1.data_mut()[e] = orig - h;
            let down = ner_loss_of(&probe, &vectors, &gold);
            probe.blocks_mut()[bi].1.data_mut()[e] = orig;
            let fd = (up - down) / (2.0 * h);
            let rel = common::rel_err(ad[e], fd);
            assert!(
                rel < 1e-4,
                "block {name} elem {e}: autodiff {} vs numeric {} (rel {rel})",
                ad[e],
                fd
            );
            checked += 1;
        }
    }
    pass(&format!(
        "full tagger loss gradients match finite differences on {checked} parameters"
    ));
}

#[test]
#[allow(clippy::needless_range_loop)]
fn gradient_suite_full_nesc_loss() {
    let mut rng = Rng::seed(1004);
    let input = 10;
    let params = NescParams::init(input, 5, 2, 1.7, 1.0, &mut rng);
    let slice: Vec<Vec<f64>> = (0..4)
        .map(|_| (0..input).map(|_| rng.uniform(-1.0, 1.0)).collect())
        .collect();

    let loss_of = |p: &NescParams| -> f64 {
        let mut tape = Tape::new();
        let bound = p.bind(&mut tape);
        let values: Vec<Value> = slice
            .iter()
            .map(|v| tape.leaf(Tensor::vector(v)))
            .collect();
        let lp = head_log_probs_on_tape(&mut tape, &values, 5, &bound).expect("head");
        let picked = tape.index(lp, POSITIVE_CLASS).expect("index");
        let loss = tape.scale(picked, -p.w_pos);
        tape.item(loss)
    };

    let mut tape = Tape::new();
    let bound = params.bind(&mut tape);
    let values: Vec<Value> = slice
        .iter()
        .map(|v| tape.leaf(Tensor::vector(v)))
        .collect();
    let lp = head_log_probs_on_tape(&mut tape, &values, 5, &bound).expect("head");
    let picked = tape.index(lp, POSITIVE_CLASS).expect("index");
    let loss = tape.scale(picked, -params.w_pos);
    let grads = tape.backward(loss).expect("backward");

    let h = 1e-5;
    let mut probe = params.clone();
    let mut checked = 0usize;
    for (bi, leaf) in bound.leaf_values().iter().enumerate() {
        let name = params.blocks()[bi].0;
        let ad = grads.get(*leaf).data().to_vec();
        for e in 0..ad.len() {
            let orig = probe.blocks()[bi].1.data()[e];
            probe.blocks_mut()[bi].1.data_mut()[e] = orig + h;
            let up = loss_of(&probe);
            probe.blocks_mut()[bi].1.data_mut()[e] = orig - h;
            let down = loss_of(&probe);
            probe.blocks_mut()[bi].1.data_mut()[e] = orig;
            let fd = (up - down) / (2.0 * h);
            let rel = common::rel_err(ad[e], fd);
            assert!(
                rel < 1e-4,
                "block {name} elem {e}: autodiff {} vs numeric {} (rel {rel})",
                ad[e],
                fd
            );
            checked += 1;
        }
    }
    pass(&format!(
        "full span-scorer loss gradients match finite differences on {checked} parameters"
    ));
}

#[test]
fn tagger_memorizes_planted_entities() {
    let started = Instant::now();
    let (corpus, table) = common::planted_corpus(50, 77);
    let sentences = corpus.to_training(&table).expect("featurizes");

    let config = NerTrainConfig {
        epochs: 100,
        ..NerTrainConfig::default()
    };
    assert_eq!(config.hidden, 100);
    let mut rng = Rng::seed(77);
    let trained = train_ner(&sentences, &config, &mut rng).expect("trains");

    let mut gold_spans = Vec::new();
    let mut pred_spans = Vec::new();
    for (i, sentence) in sentences.iter().enumerate() {
        let output = tag_vectors(&sentence.vectors, &trained.params).expect("tags");
        gold_spans.push(corpus.gold_spans(i));
        pred_spans.push(output.spans);
    }
    let prf = entity_prf(&gold_spans, &pred_spans, true).expect("scores");
    let elapsed = started.elapsed();
    assert!(
        prf.f1 >= 0.95,
        "typed F1 {} after 100 epochs (P {}, R {})",
        prf.f1,
        prf.precision,
        prf.recall
    );
    assert!(elapsed.as_secs() < 300, "took {elapsed:?}, budget is 5 minutes");
    pass(&format!(
        "tagger memorizes 50 planted sentences: typed F1 {:.3} in {elapsed:?}",
        prf.f1
    ));
}

#[test]
fn span_scorer_separates_constructed_windows() {
    // Windows built directly in encoder space, linearly separable along
    // one axis; train on one split, measure ROC-AUC on the other.
    let mut rng = Rng::seed(1005);
    let dim = 12;
    let make = |positive: bool, rng: &mut Rng| -> HeadSample {
        let sign = if positive { 0.8 } else { -0.8 };
        let slice: Vec<Vec<f64>> = (0..4)
            .map(|_| {
                (0..dim)
                    .map(|d| {
                        let base = if d == 0 { sign } else { 0.0 };
                        base + rng.uniform(-0.25, 0.25)
                    })
                    .collect()
            })
            .collect();
        HeadSample {
            slice,
            target: positive,
        }
    };
    let train: Vec<HeadSample> = (0..300).map(|i| make(i % 3 == 0, &mut rng)).collect();
    let held_out: Vec<HeadSample> = (0..100).map(|i| make(i % 3 == 0, &mut rng)).collect();

    let config = NescTrainConfig {
        hidden: 16,
        epochs: 15,
        ..NescTrainConfig::default()
    };
    let w_pos = 2.0; // 1:2 imbalance in the construction
    let out = train_head(&train, w_pos, 1.0, &config, &mut rng).expect("trains");

    let scores: Vec<f64> = held_out
        .iter()
        .map(|s| nesc_score(&s.slice, &out.params).expect("scores"))
        .collect();
    let labels: Vec<bool> = held_out.iter().map(|s| s.target).collect();
    let auc = common::roc_auc(&scores, &labels);
    assert!(auc >= 0.95, "held-out ROC-AUC {auc}");
    pass(&format!(
        "span scorer reaches held-out ROC-AUC {auc:.3} on separable windows"
    ));
}

#[test]
fn sampler_reproduces_expected_perturbations() {
    // The seven-token example sentence with its two-token entity.
    let gold = vec![EntitySpan::typed(3, 4, EntityType::Place)];
    let got = perturb((3, 4), 7, &gold);
    for expected in [(4, 4), (3, 3), (2, 3), (4, 5)] {
        assert!(
            got.contains(&expected),
            "expected perturbation {expected:?} missing from {got:?}"
        );
    }

    // Ten thousand random draws over a labeled corpus: no accepted span may
    // collide with a gold entity.
    let (corpus, _) = common::planted_corpus(25, 1006);
    let dist = LengthDistribution::fit(&corpus).expect("fits");
    let mut rng = Rng::seed(1006);
    let mut accepted = 0usize;
    for draw in 0..10_000 {
        let idx = draw % corpus.len();
        let gold = corpus.gold_spans(idx);
        let n = corpus.sentences[idx].len();
        if let Some((start, end)) = sample_random_negative(n, &gold, &dist, &mut rng, 20) {
            accepted += 1;
            assert!(
                !gold.iter().any(|g| g.start == start && g.end == end),
                "draw {draw} returned the gold span ({start},{end})"
            );
        }
    }
    assert!(accepted > 9_000, "only {accepted} draws accepted");
    pass(&format!(
        "perturbations include all four expected spans; {accepted}/10000 random draws, zero gold collisions"
    ));
}

#[test]
fn isotonic_fit_matches_monotone_oracle() {
    let mut rng = Rng::seed(1007);

    // PAV against the exact monotone least-squares oracle.
    for round in 0..200 {
        let n = 1 + rng.below(8);
        let mut scores: Vec<f64> = (0..n).map(|_| rng.unit()).collect();
        scores.sort_by(f64::total_cmp);
        scores.dedup();
        let labels: Vec<u8> = (0..scores.len()).map(|_| rng.below(2) as u8).collect();
        let cal = fit_pav(&scores, &labels).expect("fits");
        let oracle = common::oracle_monotone_fit(&scores, &labels);
        let fitted: Vec<f64> = scores.iter().map(|&s| calibrate(s, &cal)).collect();
        for (i, (a, b)) in fitted.iter().zip(&oracle).enumerate() {
            assert!(
                (a - b).abs() < 1e-6,
                "round {round} point {i}: pav {a} vs oracle {b}"
            );
        }
    }

    // Monotone over ten thousand random probe pairs.
    let scores: Vec<f64> = (0..40).map(|_| rng.unit()).collect();
    let labels: Vec<u8> = (0..40).map(|_| rng.below(2) as u8).collect();
    let cal = fit_pav(&scores, &labels).expect("fits");
    for _ in 0..10_000 {
        let a = rng.uniform(-0.2, 1.2);
        let b = rng.uniform(-0.2, 1.2);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        assert!(calibrate(lo, &cal) <= calibrate(hi, &cal) + 1e-15);
    }

    // Calibrated squared error never exceeds the raw one.
    for _ in 0..100 {
        let n = 1 + rng.below(30);
        let scores: Vec<f64> = (0..n).map(|_| rng.unit()).collect();
        let labels: Vec<u8> = (0..n).map(|_| rng.below(2) as u8).collect();
        let cal = fit_pav(&scores, &labels).expect("fits");
        let raw: f64 = scores
            .iter()
            .zip(&labels)
            .map(|(s, &l)| (s - l as f64).powi(2))
            .sum();
        let fitted: f64 = scores
            .iter()
            .zip(&labels)
            .map(|(s, &l)| (calibrate(*s, &cal) - l as f64).powi(2))
            .sum();
        assert!(fitted <= raw + 1e-12);
    }
    pass("PAV matches the monotone least-squares oracle; calibration is monotone and never hurts MSE");
}

#[test]
fn metrics_match_set_comparison_oracle() {
    let mut rng = Rng::seed(1008);

    // Token level on a thousand random sentences.
    for _ in 0..1000 {
        let len = 1 + rng.below(12);
        let gold: Vec<Label> = (0..len).map(|_| ALL_LABELS[rng.below(NUM_LABELS)]).collect();
        let pred: Vec<Label> = (0..len).map(|_| ALL_LABELS[rng.below(NUM_LABELS)]).collect();
        let prf = token_prf(&gold, &pred).expect("scores");
        let mut tp = 0;
        let mut fp = 0;
        let mut fn_ = 0;
        for (g, p) in gold.iter().zip(&pred) {
            match (*g != Label::Outside, *p != Label::Outside) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fn_ += 1,
                _ => {}
            }
        }
        assert_eq!((prf.tp, prf.fp, prf.fn_), (tp, fp, fn_));
    }

    // Entity level: random non-overlapping span sets, exact-match counting
    // done by brute-force multiset intersection.
    let random_spans = |len: usize, rng: &mut Rng| -> Vec<EntitySpan> {
        let mut spans = Vec::new();
        let mut at = 0;
        while at < len {
            if rng.bernoulli(0.4) {
                let width = 1 + rng.below((len - at).min(3));
                spans.push(EntitySpan::typed(
                    at,
                    at + width - 1,
                    nesc::ner::ENTITY_TYPES[rng.below(5)],
                ));
                at += width + 1;
            } else {
                at += 1;
            }
        }
        spans
    };
    for _ in 0..1000 {
        let len = 1 + rng.below(12);
        let gold = vec![random_spans(len, &mut rng)];
        let pred = vec![random_spans(len, &mut rng)];
        for typed in [false, true] {
            let prf = entity_prf(&gold, &pred, typed).expect("scores");
            let matches = |a: &EntitySpan, b: &EntitySpan| {
                a.start == b.start && a.end == b.end && (!typed || a.entity_type == b.entity_type)
            };
            let mut used = vec![false; gold[0].len()];
            let mut tp = 0;
            for p in &pred[0] {
                if let Some(i) = gold[0]
                    .iter()
                    .enumerate()
                    .position(|(i, g)| !used[i] && matches(g, p))
                {
                    used[i] = true;
                    tp += 1;
                }
            }
            assert_eq!(prf.tp, tp);
            assert_eq!(prf.fp, pred[0].len() - tp);
            assert_eq!(prf.fn_, gold[0].len() - tp);
            if typed {
                let untyped = entity_prf(&gold, &pred, false).expect("scores");
                assert!(prf.tp <= untyped.tp, "typed matches exceed untyped");
            }
        }
    }

    // Recall is monotone nonincreasing over the full threshold grid.
    let scores: Vec<f64> = (0..500).map(|_| rng.unit()).collect();
    let labels: Vec<u8> = (0..500).map(|_| rng.below(2) as u8).collect();
    let points = pr_curve(&scores, &labels, &default_thresholds()).expect("sweeps");
    for w in points.windows(2) {
        assert!(w[1].recall <= w[0].recall + 1e-15);
    }
    pass("token and entity scoring match the set-comparison oracle on 1000 sentences");
}

#[test]
fn training_is_deterministic_and_persistence_exact() {
    let (corpus, table) = common::planted_corpus(10, 1009);
    let sentences = corpus.to_training(&table).expect("featurizes");
    let ner_cfg = NerTrainConfig {
        hidden: 8,
        dropout: 0.3,
        epochs: 5,
        ..NerTrainConfig::default()
    };

    // Bit-identical tagger training under one seed.
    let mut rng_a = Rng::seed(2024);
    let a = train_ner(&sentences, &ner_cfg, &mut rng_a).expect("trains");
    let mut rng_b = Rng::seed(2024);
    let b = train_ner(&sentences, &ner_cfg, &mut rng_b).expect("trains");
    for ((name, ta), (_, tb)) in a.params.blocks().iter().zip(b.params.blocks().iter()) {
        let bits_a: Vec<u64> = ta.data().iter().map(|v| v.to_bits()).collect();
        let bits_b: Vec<u64> = tb.data().iter().map(|v| v.to_bits()).collect();
        assert_eq!(bits_a, bits_b, "block {name} differs between identical runs");
    }
    assert_eq!(a.epoch_losses, b.epoch_losses);

    // Bit-identical span-scorer training under one seed.
    let dataset = build_nesc_dataset(&corpus, &SamplerConfig::default(), 2024).expect("builds");
    let dataset_again = build_dataset(&corpus, &SamplerConfig::default(), 2024).expect("builds");
    assert_eq!(dataset, dataset_again);
    let nesc_cfg = NescTrainConfig {
        hidden: 6,
        epochs: 4,
        ..NescTrainConfig::default()
    };
    let mut rng_c = Rng::seed(7);
    let head_a =
        train_nesc(&corpus, &table, &dataset, &a.params, &nesc_cfg, &mut rng_c).expect("trains");
    let mut rng_d = Rng::seed(7);
    let head_b =
        train_nesc(&corpus, &table, &dataset, &a.params, &nesc_cfg, &mut rng_d).expect("trains");
    assert_eq!(head_a.params, head_b.params);

    // Bundle round-trip preserves span scores exactly.
    let config = nesc::Config {
        hidden_size: 8,
        dropout: 0.3,
        nesc_hidden: 6,
        ..nesc::Config::default()
    };
    let mut bundle = nesc::ModelBundle::new(config, a.params.clone());
    bundle.nesc = Some(head_a.params.clone());
    bundle.length_dist = Some(dataset.length_dist.clone());
    bundle.calibrator = Some(fit_pav(&[0.2, 0.5, 0.8], &[0, 1, 1]).expect("fits"));

    let mut bytes = Vec::new();
    bundle.write(&mut bytes).expect("serializes");
    let reloaded = nesc::ModelBundle::read(std::io::Cursor::new(&bytes)).expect("parses");
    assert_eq!(bundle, reloaded);

    let nesc_orig = bundle.nesc.as_ref().unwrap();
    let nesc_back = reloaded.nesc.as_ref().unwrap();
    let mut probes = 0usize;
    for idx in 0..corpus.len() {
        let tokens = corpus.tokens(idx);
        for span in [(0usize, 0usize), (0, tokens.len() - 1)] {
            let before = score_span(
                &tokens,
                span,
                &table,
                &bundle.ner,
                nesc_orig,
                bundle.calibrator.as_ref(),
            )
            .expect("scores");
            let after = score_span(
                &tokens,
                span,
                &table,
                &reloaded.ner,
                nesc_back,
                reloaded.calibrator.as_ref(),
            )
            .expect("scores");
            assert_eq!(before.to_bits(), after.to_bits());
            probes += 1;
        }
    }
    pass(&format!(
        "training is bit-deterministic; bundle round-trip preserves {probes} probe scores exactly"
    ));
}
