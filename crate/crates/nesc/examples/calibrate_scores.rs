//! Isotonic calibration: fit pool-adjacent-violators on (score, label)
//! pairs and map new scores through the fitted knots.
//!
//! ```bash
//! cargo run -p nesc --example calibrate_scores
//! ```

use nesc::{calibrate, fit_pav, Rng};

fn main() -> nesc::Result<()> {
    // An over-confident classifier: high scores are right, mid scores are
    // noisy coin flips.
    let mut rng = Rng::seed(5);
    let mut scores = Vec::new();
    let mut labels = Vec::new();
    for _ in 0..200 {
        let s = rng.unit();
        let p_true = (s * 0.6 + 0.2).min(1.0); // true accuracy is flatter than s
        scores.push(s);
        labels.push(u8::from(rng.bernoulli(p_true)));
    }

    let cal = fit_pav(&scores, &labels)?;
    println!("fitted {} knots", cal.thresholds().len());

    println!("\n{:>8} {:>12}", "raw", "calibrated");
    for raw in [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
        println!("{raw:>8.2} {:>12.4}", calibrate(raw, &cal));
    }

    // The calibrated scores can only fit the labels better (in squared
    // error) than the raw ones.
    let mse = |f: &dyn Fn(f64) -> f64| -> f64 {
        scores
            .iter()
            .zip(&labels)
            .map(|(s, &l)| (f(*s) - l as f64).powi(2))
            .sum::<f64>()
            / scores.len() as f64
    };
    println!("\nraw mse        {:.5}", mse(&|s| s));
    println!("calibrated mse {:.5}", mse(&|s| calibrate(s, &cal)));
    Ok(())
}
