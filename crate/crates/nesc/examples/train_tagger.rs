//! Train the tagger on a small synthetic corpus, then tag a sentence and
//! print its per-token probability table.
//!
//! ```bash
//! cargo run -p nesc --example train_tagger
//! ```

use nesc::corpus::{ConllToken, Split};
use nesc::ner::{spans_to_labels, ALL_LABELS};
use nesc::{
    tag, train_ner, Corpus, EmbeddingTable, EntitySpan, EntityType, NerTrainConfig, PosTag, Rng,
};

const PEOPLE: [&str; 3] = ["alice", "bob", "carol"];
const PLACES: [&str; 3] = ["paris", "tokyo", "lima"];
const FILLERS: [&str; 5] = ["visited", "loves", "the", "city", "again"];

fn sentence(words: &[&str], spans: &[EntitySpan]) -> Vec<ConllToken> {
    let labels = spans_to_labels(spans, words.len()).expect("valid spans");
    words
        .iter()
        .zip(labels)
        .map(|(w, label)| ConllToken {
            surface: w.to_string(),
            pos: if FILLERS.contains(w) { PosTag::VERB } else { PosTag::PROPN },
            label,
        })
        .collect()
}

fn build_corpus(rng: &mut Rng) -> Corpus {
    let mut sentences = Vec::new();
    for _ in 0..24 {
        let person = PEOPLE[rng.below(PEOPLE.len())];
        let place = PLACES[rng.below(PLACES.len())];
        let verb = FILLERS[rng.below(2)];
        let words = vec![person, verb, "the", "city", "of", place];
        sentences.push(sentence(
            &words,
            &[
                EntitySpan::typed(0, 0, EntityType::Person),
                EntitySpan::typed(5, 5, EntityType::Place),
            ],
        ));
    }
    Corpus::new(sentences, Split::Train)
}

fn main() -> nesc::Result<()> {
    let mut rng = Rng::seed(21);
    let mut vocab: Vec<&str> = Vec::new();
    vocab.extend(PEOPLE);
    vocab.extend(PLACES);
    vocab.extend(FILLERS);
    vocab.extend(["of"]);
    let table = EmbeddingTable::random(&vocab, &mut rng);
    let corpus = build_corpus(&mut rng);

    let config = NerTrainConfig {
        hidden: 16,
        dropout: 0.2,
        epochs: 40,
        ..NerTrainConfig::default()
    };
    println!("training on {} sentences ...", corpus.len());
    let result = train_ner(&corpus.to_training(&table)?, &config, &mut rng)?;
    for (i, loss) in result.epoch_losses.iter().enumerate() {
        if (i + 1) % 10 == 0 {
            println!("  epoch {:>3}: mean loss {:.4}", i + 1, loss);
        }
    }

    let tokens: Vec<nesc::Token> = ["bob", "loves", "the", "city", "of", "tokyo"]
        .iter()
        .map(|w| nesc::Token::from_surface(*w, PosTag::PROPN))
        .collect();
    let output = tag(&tokens, &table, &result.params)?;

    println!("\nbob loves the city of tokyo");
    for s in &output.spans {
        let surface: Vec<&str> = tokens[s.start..=s.end]
            .iter()
            .map(|t| t.surface.as_str())
            .collect();
        println!(
            "  span [{}..{}] {} {:?}",
            s.start,
            s.end,
            s.entity_type.map_or("?", |t| t.name()),
            surface.join(" ")
        );
    }

    println!("\nper-token label probabilities:");
    print!("{:<18}", "");
    for t in &tokens {
        print!("{:>9}", t.surface);
    }
    println!();
    for label in ALL_LABELS {
        print!("{:<18}", label.display_name());
        for col in &output.probabilities {
            print!("{:>9.3}", col[label.index()]);
        }
        println!();
    }
    Ok(())
}
