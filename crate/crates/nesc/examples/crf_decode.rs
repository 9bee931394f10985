//! Viterbi decoding and sequence likelihood on a hand-built CRF instance.
//!
//! ```bash
//! cargo run -p nesc --example crf_decode
//! ```

use nesc::ner::{crf_nll, path_score, viterbi, Label, END, NUM_LABELS, NUM_STATES, START};
use nesc::tensor::Tensor;

fn main() -> nesc::Result<()> {
    // Three tokens; emissions favor B-Place then I-Place then O.
    let b_place = Label::parse("B-Place")?.index();
    let i_place = Label::parse("I-Place")?.index();
    let mut emissions = vec![vec![-2.0; NUM_LABELS]; 3];
    emissions[0][b_place] = 1.5;
    emissions[1][i_place] = 1.2;
    emissions[2][Label::Outside.index()] = 2.0;

    // Transitions: discourage entering I-Place from anything but B-Place.
    let mut transitions = Tensor::zeros(vec![NUM_STATES, NUM_STATES]);
    for from in 0..NUM_LABELS {
        if from != b_place && from != i_place {
            transitions.set(from, i_place, -4.0);
        }
    }
    transitions.set(START, b_place, 0.5);
    transitions.set(Label::Outside.index(), END, 0.3);

    let (path, score) = viterbi(&emissions, &transitions)?;
    println!("decoded path (score {score:.4}):");
    for (t, label) in path.iter().enumerate() {
        println!("  token {t}: {}", label.display_name());
    }

    let gold: Vec<Label> = path.clone();
    let nll = crf_nll(&emissions, &transitions, &gold)?;
    println!("\nnegative log-likelihood of that path: {nll:.4}");
    println!("probability of the decoded path:      {:.4}", (-nll).exp());

    // Compare against a worse path.
    let all_outside = vec![Label::Outside; 3];
    println!(
        "\nscore of all-O path: {:.4} (decoded beats it by {:.4})",
        path_score(&emissions, &transitions, &all_outside),
        score - path_score(&emissions, &transitions, &all_outside)
    );
    Ok(())
}
