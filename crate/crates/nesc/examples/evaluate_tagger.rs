//! The three evaluation levels (untyped token, untyped entity, typed
//! entity) plus a precision-recall sweep over span scores.
//!
//! ```bash
//! cargo run -p nesc --example evaluate_tagger
//! ```

use nesc::metrics::default_thresholds;
use nesc::ner::Label;
use nesc::{entity_prf, pr_curve, token_prf, EntitySpan, EntityType, Rng};

fn labels(tags: &[&str]) -> Vec<Label> {
    tags.iter().map(|t| Label::parse(t).expect("valid tag")).collect()
}

fn main() -> nesc::Result<()> {
    // Gold: "San Francisco" is a Place. Prediction: right span, wrong type,
    // plus a spurious single-token entity.
    let gold_labels = labels(&["O", "O", "B-Place", "I-Place", "O"]);
    let pred_labels = labels(&["O", "B-Person", "B-Organization", "I-Organization", "O"]);
    let gold_spans = vec![vec![EntitySpan::typed(2, 3, EntityType::Place)]];
    let pred_spans = vec![vec![
        EntitySpan::typed(1, 1, EntityType::Person),
        EntitySpan::typed(2, 3, EntityType::Organization),
    ]];

    println!("{:<22} {:>9} {:>9} {:>9}", "measure", "precision", "recall", "f1");
    let rows = [
        ("untyped token level", token_prf(&gold_labels, &pred_labels)?),
        ("untyped entity level", entity_prf(&gold_spans, &pred_spans, false)?),
        ("typed entity level", entity_prf(&gold_spans, &pred_spans, true)?),
    ];
    for (name, prf) in rows {
        println!("{name:<22} {:>9.4} {:>9.4} {:>9.4}", prf.precision, prf.recall, prf.f1);
    }

    // A score sweep over synthetic span scores: positives score higher on
    // average, so precision climbs as recall falls.
    let mut rng = Rng::seed(9);
    let mut scores = Vec::new();
    let mut truths = Vec::new();
    for i in 0..400 {
        let positive = i % 4 == 0;
        let base = if positive { 0.65 } else { 0.35 };
        scores.push((base + rng.uniform(-0.3, 0.3)).clamp(0.0, 1.0));
        truths.push(u8::from(positive));
    }
    let points = pr_curve(&scores, &truths, &default_thresholds())?;
    println!("\nthreshold  precision  recall");
    for p in points.iter().step_by(20) {
        println!("{:>9.2} {:>10.3} {:>7.3}", p.threshold, p.precision, p.recall);
    }
    Ok(())
}
