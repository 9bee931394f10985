//! The `nesc` command line: file-based training, tagging, sampling,
//! calibration, and evaluation.
//!
//! Exit codes: 0 on success, 1 on data errors, 2 on usage errors. All
//! randomness derives from `--seed`, so identical invocations produce
//! byte-identical outputs.

use std::path::{Path, PathBuf};

use crate::bundle::{file_checksum, ModelBundle};
use crate::calibration::fit_pav;
use crate::config::Config;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::features::{tokenize, EmbeddingTable, PosTag, Token};
use crate::metrics::{default_thresholds, entity_prf, pr_curve, token_prf, write_pr_curve, Prf};
use crate::ner::{tag, train_ner, EntitySpan, Label};
use crate::rng::Rng;
use crate::sampling::build_dataset;
use crate::scorer::{score_span_encoded, train_nesc};

const HELP: &str = "\
nesc - named-entity tagging with calibrated span confidence

usage: nesc <command> [flags] [text]

commands:
  validate-data <file>...   parse corpus files and report their shape
  train-ner                 train the tagger        (--train, --model)
  tag                       tag text                (--model, text or --input)
  build-nesc-data           emit span samples       (--train, --out)
  train-nesc                train the span scorer   (--train, --model)
  calibrate                 fit isotonic calibration (--validation, --model)
  score                     score one span          (--model, --span i,j, text)
  evaluate                  three-level report      (--test, --model)
  pr-curve                  threshold sweep CSV     (--test, --model, --out)
  demo                      annotated text report   (--model, text)
  help                      print this message

flags:
  --seed <n>         RNG seed (default 42)
  --config <file>    key=value hyperparameter file
  --embeddings <file> embedding text file
  --model <file>     model bundle to read or write
  --k <n>            context size override
  --train <file>     training corpus (TSV)
  --validation <file> validation corpus (TSV)
  --test <file>      test corpus (TSV)
  --input <file>     text file, one sentence per line
  --out <file>       output path
  --span <i,j>       inclusive token range
";

/// Report output: ignore write failures so a closed pipe (`nesc ... | head`)
/// ends output without tearing the process down.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

macro_rules! outp {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($arg)*);
    }};
}

/// Runs the CLI; returns the process exit code.
pub fn run(args: &[String]) -> i32 {
    match execute(args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Usage(_)) {
                eprintln!("\n{HELP}");
            }
            e.exit_code()
        }
    }
}

#[derive(Debug, Default)]
struct Args {
    seed: u64,
    config: Option<PathBuf>,
    embeddings: Option<PathBuf>,
    model: Option<PathBuf>,
    k: Option<usize>,
    train: Option<PathBuf>,
    validation: Option<PathBuf>,
    test: Option<PathBuf>,
    input: Option<PathBuf>,
    out: Option<PathBuf>,
    span: Option<(usize, usize)>,
    positional: Vec<String>,
}

fn parse_args(raw: &[String]) -> Result<Args> {
    let mut args = Args {
        seed: 42,
        ..Args::default()
    };
    let mut it = raw.iter();
    while let Some(arg) = it.next() {
        let mut value = |flag: &str| -> Result<String> {
            it.next()
                .cloned()
                .ok_or_else(|| Error::Usage(format!("{flag} needs a value")))
        };
        match arg.as_str() {
            "--seed" => {
                let v = value("--seed")?;
                args.seed = v
                    .parse()
                    .map_err(|_| Error::Usage(format!("bad --seed value {v:?}")))?;
            }
            "--config" => args.config = Some(PathBuf::from(value("--config")?)),
            "--embeddings" => args.embeddings = Some(PathBuf::from(value("--embeddings")?)),
            "--model" => args.model = Some(PathBuf::from(value("--model")?)),
            "--k" => {
                let v = value("--k")?;
                args.k = Some(
                    v.parse()
                        .map_err(|_| Error::Usage(format!("bad --k value {v:?}")))?,
                );
            }
            "--train" => args.train = Some(PathBuf::from(value("--train")?)),
            "--validation" => args.validation = Some(PathBuf::from(value("--validation")?)),
            "--test" => args.test = Some(PathBuf::from(value("--test")?)),
            "--input" => args.input = Some(PathBuf::from(value("--input")?)),
            "--out" => args.out = Some(PathBuf::from(value("--out")?)),
            "--span" => {
                let v = value("--span")?;
                let (i, j) = v
                    .split_once(',')
                    .ok_or_else(|| Error::Usage(format!("--span wants i,j, got {v:?}")))?;
                let parse = |s: &str| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Usage(format!("bad --span value {v:?}")))
                };
                args.span = Some((parse(i)?, parse(j)?));
            }
            flag if flag.starts_with("--") => {
                return Err(Error::Usage(format!("unknown flag {flag}")));
            }
            positional => args.positional.push(positional.to_string()),
        }
    }
    Ok(args)
}

fn execute(raw: &[String]) -> Result<()> {
    let Some(command) = raw.first() else {
        return Err(Error::Usage("no command given".into()));
    };
    if command == "help" || command == "--help" || command == "-h" {
        outp!("{HELP}");
        return Ok(());
    }
    let args = parse_args(&raw[1..])?;
    match command.as_str() {
        "validate-data" => validate_data(&args),
        "train-ner" => cmd_train_ner(&args),
        "tag" => cmd_tag(&args),
        "build-nesc-data" => cmd_build_nesc_data(&args),
        "train-nesc" => cmd_train_nesc(&args),
        "calibrate" => cmd_calibrate(&args),
        "score" => cmd_score(&args),
        "evaluate" => cmd_evaluate(&args),
        "pr-curve" => cmd_pr_curve(&args),
        "demo" => cmd_demo(&args),
        other => Err(Error::Usage(format!("unknown command {other:?}"))),
    }
}

fn require<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| Error::Usage(format!("{flag} is required for this command")))
}

/// CLI config: defaults, then the file, then the --k override.
fn effective_config(args: &Args) -> Result<Config> {
    let mut cfg = match &args.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(k) = args.k {
        cfg.context_size = k;
    }
    Ok(cfg)
}

/// Loads embeddings when given, along with their checksum.
fn load_table(args: &Args) -> Result<(EmbeddingTable, Option<u64>)> {
    match &args.embeddings {
        Some(path) => {
            let table = EmbeddingTable::load(path)?;
            Ok((table, Some(file_checksum(path)?)))
        }
        None => Ok((EmbeddingTable::empty(), None)),
    }
}

/// A model must be used with the embeddings it was trained with.
fn check_embeddings(bundle: &ModelBundle, provided: Option<u64>) -> Result<()> {
    match (bundle.embedding_checksum, provided) {
        (Some(want), Some(got)) if want == got => Ok(()),
        (Some(_), Some(_)) => Err(Error::Data(
            "embedding file does not match the one the model was trained with".into(),
        )),
        (Some(_), None) => Err(Error::Data(
            "model was trained with embeddings; pass --embeddings".into(),
        )),
        (None, Some(_)) => Err(Error::Data(
            "model was trained without embeddings; drop --embeddings".into(),
        )),
        (None, None) => Ok(()),
    }
}

/// Raw text becomes tokens with the reserved POS tag.
fn text_tokens(text: &str) -> Vec<Token> {
    tokenize(text)
        .into_iter()
        .map(|t| t.with_pos(PosTag::X))
        .collect()
}

/// Sentences for text commands: positional text, or --input lines.
fn input_sentences(args: &Args) -> Result<Vec<String>> {
    match (&args.input, args.positional.is_empty()) {
        (Some(_), false) => Err(Error::Usage(
            "give either --input or positional text, not both".into(),
        )),
        (Some(path), true) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
            Ok(text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(str::to_string)
                .collect())
        }
        (None, false) => Ok(vec![args.positional.join(" ")]),
        (None, true) => Err(Error::Usage("no text given".into())),
    }
}

fn validate_data(args: &Args) -> Result<()> {
    if args.positional.is_empty() {
        return Err(Error::Usage("validate-data needs at least one file".into()));
    }
    for name in &args.positional {
        let corpus = Corpus::load(Path::new(name))?;
        out!(
            "{name}: {} sentences, {} tokens, {} entities",
            corpus.len(),
            corpus.token_count(),
            corpus.entity_count()
        );
    }
    Ok(())
}

fn cmd_train_ner(args: &Args) -> Result<()> {
    let train_path = require(&args.train, "--train")?;
    let model_path = require(&args.model, "--model")?;
    let config = effective_config(args)?;
    let (table, checksum) = load_table(args)?;
    let corpus = Corpus::load(train_path)?;
    let sentences = corpus.to_training(&table)?;

    let mut rng = Rng::seed(args.seed);
    let result = train_ner(&sentences, &config.ner_train(), &mut rng)?;
    for (epoch, loss) in result.epoch_losses.iter().enumerate() {
        out!("epoch {} loss {:.6}", epoch + 1, loss);
    }

    let mut bundle = ModelBundle::new(config, result.params);
    bundle.embedding_checksum = checksum;
    bundle.save(model_path)?;
    out!("saved model to {}", model_path.display());
    Ok(())
}

fn cmd_tag(args: &Args) -> Result<()> {
    let model_path = require(&args.model, "--model")?;
    let bundle = ModelBundle::load(model_path)?;
    let (table, checksum) = load_table(args)?;
    check_embeddings(&bundle, checksum)?;

    for text in input_sentences(args)? {
        let tokens = text_tokens(&text);
        let output = tag(&tokens, &table, &bundle.ner)?;
        out!("{text}");
        print_spans(&output.spans, &tokens);
        print_probability_table(&tokens, &output.probabilities);
        out!();
    }
    Ok(())
}

fn print_spans(spans: &[EntitySpan], tokens: &[Token]) {
    if spans.is_empty() {
        out!("spans: (none)");
        return;
    }
    out!("spans:");
    for s in spans {
        let surface: Vec<&str> = tokens[s.start..=s.end]
            .iter()
            .map(|t| t.surface.as_str())
            .collect();
        let type_name = s.entity_type.map_or("?", |t| t.name());
        out!(
            "  [{}..{}] {} \"{}\"",
            s.start,
            s.end,
            type_name,
            surface.join(" ")
        );
    }
}

/// Table of per-token label probabilities: one row per label, one column
/// per token.
fn print_probability_table(tokens: &[Token], probabilities: &[Vec<f64>]) {
    if tokens.is_empty() {
        return;
    }
    let label_width = 18;
    let col = 12;
    outp!("{:label_width$}", "");
    for t in tokens {
        let shown: String = t.surface.chars().take(col - 1).collect();
        outp!("{shown:>col$}");
    }
    out!();
    for label in crate::ner::ALL_LABELS {
        outp!("{:label_width$}", label.display_name());
        for p in probabilities {
            outp!("{:>col$.3}", p[label.index()]);
        }
        out!();
    }
}

fn cmd_build_nesc_data(args: &Args) -> Result<()> {
    let train_path = require(&args.train, "--train")?;
    let out_path = require(&args.out, "--out")?;
    let config = effective_config(args)?;
    let corpus = Corpus::load(train_path)?;
    let dataset = build_dataset(&corpus, &config.sampler(), args.seed)?;

    let file = std::fs::File::create(out_path)?;
    dataset.write(std::io::BufWriter::new(file))?;
    out!(
        "{} samples ({} positive, {} negative), w_pos {:.4}, w_neg {}",
        dataset.samples.len(),
        dataset.positives(),
        dataset.negatives(),
        dataset.w_pos,
        dataset.w_neg
    );
    out!("wrote {}", out_path.display());
    Ok(())
}

/// Later pipeline stages reuse the config stored at train-ner time; only
/// the span-scorer knobs may change.
fn merge_stage_config(bundle: &Config, args: &Args) -> Result<Config> {
    let mut cfg = match &args.config {
        Some(path) => {
            let file_cfg = Config::load(path)?;
            Config {
                hidden_size: bundle.hidden_size,
                dropout: bundle.dropout,
                ..file_cfg
            }
        }
        None => bundle.clone(),
    };
    if let Some(k) = args.k {
        cfg.context_size = k;
    }
    Ok(cfg)
}

fn cmd_train_nesc(args: &Args) -> Result<()> {
    let train_path = require(&args.train, "--train")?;
    let model_path = require(&args.model, "--model")?;
    let mut bundle = ModelBundle::load(model_path)?;
    let (table, checksum) = load_table(args)?;
    check_embeddings(&bundle, checksum)?;
    let config = merge_stage_config(&bundle.config, args)?;

    let corpus = Corpus::load(train_path)?;
    let dataset = build_dataset(&corpus, &config.sampler(), args.seed)?;
    out!(
        "{} samples ({} positive, {} negative), w_pos {:.4}",
        dataset.samples.len(),
        dataset.positives(),
        dataset.negatives(),
        dataset.w_pos
    );

    let mut rng = Rng::seed(args.seed);
    let result = train_nesc(
        &corpus,
        &table,
        &dataset,
        &bundle.ner,
        &config.nesc_train(),
        &mut rng,
    )?;
    for (epoch, loss) in result.epoch_losses.iter().enumerate() {
        out!("epoch {} loss {:.6}", epoch + 1, loss);
    }

    bundle.nesc = Some(result.params);
    bundle.length_dist = Some(dataset.length_dist.clone());
    bundle.config = config;
    let out = args.out.as_deref().unwrap_or(model_path);
    bundle.save(out)?;
    out!("saved model to {}", out.display());
    Ok(())
}

/// Scores every dataset sample against a bundle's frozen encoder.
fn score_dataset(
    corpus: &Corpus,
    table: &EmbeddingTable,
    bundle: &ModelBundle,
    dataset: &crate::sampling::NescDataset,
    calibrated: bool,
) -> Result<(Vec<f64>, Vec<u8>)> {
    let nesc = bundle
        .nesc
        .as_ref()
        .ok_or_else(|| Error::Usage("model has no span scorer; run train-nesc first".into()))?;
    let vectors = corpus.vectorize(table)?;
    let mut rng = Rng::seed(0);
    let mut contexts: Vec<Option<Vec<Vec<f64>>>> = vec![None; corpus.len()];
    let calibrator = if calibrated {
        bundle.calibrator.as_ref()
    } else {
        None
    };
    let mut scores = Vec::with_capacity(dataset.samples.len());
    let mut labels = Vec::with_capacity(dataset.samples.len());
    for s in &dataset.samples {
        if contexts[s.sentence].is_none() {
            contexts[s.sentence] = Some(crate::ner::encode(
                &vectors[s.sentence],
                &bundle.ner,
                false,
                &mut rng,
            )?);
        }
        let ctx = contexts[s.sentence].as_ref().expect("filled");
        scores.push(score_span_encoded(ctx, (s.start, s.end), nesc, calibrator)?);
        labels.push(s.target as u8);
    }
    Ok((scores, labels))
}

fn cmd_calibrate(args: &Args) -> Result<()> {
    let validation_path = require(&args.validation, "--validation")?;
    let model_path = require(&args.model, "--model")?;
    let mut bundle = ModelBundle::load(model_path)?;
    let (table, checksum) = load_table(args)?;
    check_embeddings(&bundle, checksum)?;

    let corpus = Corpus::load(validation_path)?;
    let dataset = build_dataset(&corpus, &bundle.config.sampler(), args.seed)?;
    let (scores, labels) = score_dataset(&corpus, &table, &bundle, &dataset, false)?;
    let calibrator = fit_pav(&scores, &labels)?;
    out!(
        "fitted calibrator with {} knots from {} validation samples",
        calibrator.thresholds().len(),
        scores.len()
    );

    bundle.calibrator = Some(calibrator);
    let out = args.out.as_deref().unwrap_or(model_path);
    bundle.save(out)?;
    out!("saved model to {}", out.display());
    Ok(())
}

fn cmd_score(args: &Args) -> Result<()> {
    let model_path = require(&args.model, "--model")?;
    let (start, end) = args
        .span
        .ok_or_else(|| Error::Usage("--span i,j is required".into()))?;
    let bundle = ModelBundle::load(model_path)?;
    let (table, checksum) = load_table(args)?;
    check_embeddings(&bundle, checksum)?;
    let nesc = bundle
        .nesc
        .as_ref()
        .ok_or_else(|| Error::Usage("model has no span scorer; run train-nesc first".into()))?;

    let sentences = input_sentences(args)?;
    for text in sentences {
        let tokens = text_tokens(&text);
        let p = crate::scorer::score_span(
            &tokens,
            (start, end),
            &table,
            &bundle.ner,
            nesc,
            bundle.calibrator.as_ref(),
        )?;
        let surface: Vec<&str> = tokens
            .get(start..=end)
            .map(|s| s.iter().map(|t| t.surface.as_str()).collect())
            .unwrap_or_default();
        out!("{:.6}\t\"{}\"", p, surface.join(" "));
    }
    Ok(())
}

fn cmd_evaluate(args: &Args) -> Result<()> {
    let test_path = require(&args.test, "--test")?;
    let model_path = require(&args.model, "--model")?;
    let bundle = ModelBundle::load(model_path)?;
    let (table, checksum) = load_table(args)?;
    check_embeddings(&bundle, checksum)?;

    let corpus = Corpus::load(test_path)?;
    let mut gold_labels: Vec<Label> = Vec::new();
    let mut pred_labels: Vec<Label> = Vec::new();
    let mut gold_spans: Vec<Vec<EntitySpan>> = Vec::new();
    let mut pred_spans: Vec<Vec<EntitySpan>> = Vec::new();
    for i in 0..corpus.len() {
        let output = tag(&corpus.tokens(i), &table, &bundle.ner)?;
        gold_labels.extend(corpus.labels(i));
        pred_labels.extend(output.labels.iter().copied());
        gold_spans.push(corpus.gold_spans(i));
        pred_spans.push(output.spans);
    }

    let rows = [
        ("untyped token level", token_prf(&gold_labels, &pred_labels)?),
        ("untyped entity level", entity_prf(&gold_spans, &pred_spans, false)?),
        ("typed entity level", entity_prf(&gold_spans, &pred_spans, true)?),
    ];
    out!(
        "{:<22} {:>9} {:>9} {:>9} {:>6} {:>6} {:>6}",
        "measure", "precision", "recall", "f1", "tp", "fp", "fn"
    );
    for (name, prf) in rows {
        print_prf_row(name, &prf);
    }
    Ok(())
}

fn print_prf_row(name: &str, prf: &Prf) {
    out!(
        "{:<22} {:>9.4} {:>9.4} {:>9.4} {:>6} {:>6} {:>6}",
        name, prf.precision, prf.recall, prf.f1, prf.tp, prf.fp, prf.fn_
    );
}

fn cmd_pr_curve(args: &Args) -> Result<()> {
    let test_path = require(&args.test, "--test")?;
    let model_path = require(&args.model, "--model")?;
    let out_path = require(&args.out, "--out")?;
    let bundle = ModelBundle::load(model_path)?;
    let (table, checksum) = load_table(args)?;
    check_embeddings(&bundle, checksum)?;

    let corpus = Corpus::load(test_path)?;
    let dataset = build_dataset(&corpus, &bundle.config.sampler(), args.seed)?;
    let (scores, labels) = score_dataset(&corpus, &table, &bundle, &dataset, true)?;
    let points = pr_curve(&scores, &labels, &default_thresholds())?;

    let file = std::fs::File::create(out_path)?;
    write_pr_curve(&points, std::io::BufWriter::new(file))?;
    out!(
        "wrote {} ({} thresholds over {} samples)",
        out_path.display(),
        points.len(),
        scores.len()
    );
    Ok(())
}

fn cmd_demo(args: &Args) -> Result<()> {
    let model_path = require(&args.model, "--model")?;
    let bundle = ModelBundle::load(model_path)?;
    let (table, checksum) = load_table(args)?;
    check_embeddings(&bundle, checksum)?;
    let nesc = bundle
        .nesc
        .as_ref()
        .ok_or_else(|| Error::Usage("model has no span scorer; run train-nesc first".into()))?;

    for text in input_sentences(args)? {
        let tokens = text_tokens(&text);
        let output = tag(&tokens, &table, &bundle.ner)?;
        out!("{text}");
        if output.spans.is_empty() {
            out!("  (no entities)");
            continue;
        }
        for s in &output.spans {
            let p = score_span_encoded(
                &output.contexts,
                (s.start, s.end),
                nesc,
                bundle.calibrator.as_ref(),
            )?;
            let surface: Vec<&str> = tokens[s.start..=s.end]
                .iter()
                .map(|t| t.surface.as_str())
                .collect();
            let type_name = s.entity_type.map_or("?", |t| t.name()).to_lowercase();
            out!("  {}  [{} {:.3}]", surface.join(" "), type_name, p);
        }
    }
    Ok(())
}
