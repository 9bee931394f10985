//! Tokenize informal text and inspect the 253-dim token vectors.
//!
//! ```bash
//! cargo run -p nesc --example tokenize_and_vectorize
//! ```

use nesc::features::{EMBED_DIM, POS_DIM, SURFACE_DIM};
use nesc::{tokenize, vectorize, EmbeddingTable, PosTag, Rng};

fn main() -> nesc::Result<()> {
    let text = "see @jack: NASA loves #Win https://t.co/x !";
    println!("text: {text}\n");

    let tokens = tokenize(text);
    println!("{} tokens:", tokens.len());
    for t in &tokens {
        println!("  {:>3}..{:<3} {:?}", t.start, t.end, t.surface);
    }

    // A small random embedding table stands in for a pre-trained file.
    let mut rng = Rng::seed(7);
    let table = EmbeddingTable::random(&["see", "loves", "nasa"], &mut rng);

    println!("\nvector layout: [{EMBED_DIM} embedding | {SURFACE_DIM} surface | {POS_DIM} pos]");
    for t in tokens {
        let t = t.with_pos(PosTag::X);
        let v = vectorize(&t, &table)?;
        let embedded = v.embedding_part().iter().any(|&x| x != 0.0);
        let surface_hits: Vec<usize> = v
            .surface_part()
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0.0)
            .map(|(i, _)| i)
            .collect();
        println!(
            "  {:<16} embedded: {:<5} surface indicators at {:?}",
            t.surface, embedded, surface_hits
        );
    }
    Ok(())
}
