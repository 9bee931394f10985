//! The full pipeline in memory: train the tagger, build span samples over
//! its frozen encoder, train the span scorer, and compare the confidence
//! of a real entity against its perturbations.
//!
//! ```bash
//! cargo run -p nesc --example span_confidence
//! ```

use nesc::corpus::{ConllToken, Split};
use nesc::ner::spans_to_labels;
use nesc::sampling::perturb;
use nesc::{
    build_dataset, score_span, train_ner, train_nesc, Corpus, EmbeddingTable, EntitySpan,
    EntityType, NerTrainConfig, NescTrainConfig, PosTag, Rng, SamplerConfig, Token,
};

const PEOPLE: [&str; 4] = ["ada", "grace", "alan", "edsger"];
const VERBS: [&str; 3] = ["met", "called", "thanked"];
const FILLERS: [&str; 4] = ["yesterday", "twice", "quietly", "outside"];

fn sentence(words: &[&str], spans: &[EntitySpan]) -> Vec<ConllToken> {
    let labels = spans_to_labels(spans, words.len()).expect("valid spans");
    words
        .iter()
        .zip(labels)
        .map(|(w, label)| ConllToken {
            surface: w.to_string(),
            pos: PosTag::X,
            label,
        })
        .collect()
}

fn build_corpus(rng: &mut Rng) -> Corpus {
    let mut sentences = Vec::new();
    for _ in 0..30 {
        let a = PEOPLE[rng.below(PEOPLE.len())];
        let b = PEOPLE[rng.below(PEOPLE.len())];
        let verb = VERBS[rng.below(VERBS.len())];
        let filler = FILLERS[rng.below(FILLERS.len())];
        let words = vec![a, verb, b, filler];
        sentences.push(sentence(
            &words,
            &[
                EntitySpan::typed(0, 0, EntityType::Person),
                EntitySpan::typed(2, 2, EntityType::Person),
            ],
        ));
    }
    Corpus::new(sentences, Split::Train)
}

fn main() -> nesc::Result<()> {
    let mut rng = Rng::seed(33);
    let mut vocab: Vec<&str> = Vec::new();
    vocab.extend(PEOPLE);
    vocab.extend(VERBS);
    vocab.extend(FILLERS);
    let table = EmbeddingTable::random(&vocab, &mut rng);
    let corpus = build_corpus(&mut rng);

    println!("1. training the tagger on {} sentences ...", corpus.len());
    let ner_cfg = NerTrainConfig {
        hidden: 12,
        dropout: 0.2,
        epochs: 30,
        ..NerTrainConfig::default()
    };
    let ner = train_ner(&corpus.to_training(&table)?, &ner_cfg, &mut rng)?.params;

    println!("2. building span samples ...");
    let dataset = build_dataset(&corpus, &SamplerConfig::default(), 33)?;
    println!(
        "   {} samples, {} positive / {} negative, w_pos = {:.3}",
        dataset.samples.len(),
        dataset.positives(),
        dataset.negatives(),
        dataset.w_pos
    );

    println!("3. training the span scorer over the frozen encoder ...");
    let nesc_cfg = NescTrainConfig {
        hidden: 16,
        epochs: 20,
        ..NescTrainConfig::default()
    };
    let nesc = train_nesc(&corpus, &table, &dataset, &ner, &nesc_cfg, &mut rng)?.params;

    let words = ["grace", "called", "alan", "twice"];
    let tokens: Vec<Token> = words
        .iter()
        .map(|w| Token::from_surface(*w, PosTag::X))
        .collect();
    println!("\n4. confidence per candidate span of: {}", words.join(" "));
    let entity = (2, 2);
    let p = score_span(&tokens, entity, &table, &ner, &nesc, None)?;
    println!("   [{}..{}] \"{}\"  ->  {:.3}   (gold entity)", entity.0, entity.1, words[2], p);
    for (start, end) in perturb(entity, words.len(), &[]) {
        let p = score_span(&tokens, (start, end), &table, &ner, &nesc, None)?;
        println!(
            "   [{start}..{end}] \"{}\"  ->  {:.3}",
            words[start..=end].join(" "),
            p
        );
    }
    Ok(())
}
