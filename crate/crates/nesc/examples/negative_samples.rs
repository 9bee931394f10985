//! How span-classifier training data is generated: one positive per gold
//! entity, perturbation negatives, and length-matched random negatives.
//!
//! ```bash
//! cargo run -p nesc --example negative_samples
//! ```

use nesc::corpus::{ConllToken, Split};
use nesc::ner::spans_to_labels;
use nesc::sampling::{perturb, LengthDistribution, Provenance};
use nesc::{build_dataset, Corpus, EntitySpan, EntityType, PosTag, SamplerConfig};

fn main() -> nesc::Result<()> {
    let words = ["homeless", "population", "in", "San", "Francisco", "is", "surging"];
    let span = EntitySpan::typed(3, 4, EntityType::Place);
    let labels = spans_to_labels(&[span], words.len())?;
    let sentence: Vec<ConllToken> = words
        .iter()
        .zip(labels)
        .map(|(w, label)| ConllToken {
            surface: w.to_string(),
            pos: PosTag::X,
            label,
        })
        .collect();
    let corpus = Corpus::new(vec![sentence], Split::Train);

    println!("sentence: {}", words.join(" "));
    println!("gold entity: tokens 3..4 (\"San Francisco\")\n");

    println!("perturbation negatives:");
    let gold = corpus.gold_spans(0);
    for (start, end) in perturb((3, 4), words.len(), &gold) {
        println!("  [{start}..{end}] \"{}\"", words[start..=end].join(" "));
    }

    let dist = LengthDistribution::fit(&corpus)?;
    println!("\nentity length distribution: {:?} with probs {:?}", dist.lengths(), dist.probs());

    let cfg = SamplerConfig {
        random_negatives_per_sentence: 3,
        ..SamplerConfig::default()
    };
    let dataset = build_dataset(&corpus, &cfg, 42)?;
    println!(
        "\ndataset: {} samples, {} positive / {} negative, w_pos = {:.3}",
        dataset.samples.len(),
        dataset.positives(),
        dataset.negatives(),
        dataset.w_pos
    );
    for s in &dataset.samples {
        let tag = match s.provenance {
            Provenance::Positive => "positive ",
            Provenance::Perturbed => "perturbed",
            Provenance::Random => "random   ",
        };
        println!(
            "  {tag} target={} [{}..{}] \"{}\"",
            s.target as u8,
            s.start,
            s.end,
            words[s.start..=s.end].join(" ")
        );
    }
    Ok(())
}
