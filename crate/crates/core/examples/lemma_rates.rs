//! Growth of localized operator norms against the index function A.
//!
//! cargo run --release --example lemma_rates

use alphamod::asymptotic_lab::{lemma41_check, lemma_example_set, LemmaOptions};

fn main() -> alphamod::Result<()> {
    let opts = LemmaOptions { trials: 4, seed: 7, ..LemmaOptions::for_dimension(1) };
    println!("{:<16} {:>6} {:>8} {:>9} {:>9} {:>9}  pass", "case", "A", "slope", "uniform", "concent.", "spread");
    for (label, a, b) in lemma_example_set() {
        let r = lemma41_check(&a, &b, &opts)?;
        let s: Vec<f64> = r.fits.iter().map(|f| f.fit.slope).collect();
        println!(
            "{label:<16} {:>6.3} {:>8.3} {:>9.3} {:>9.3} {:>9.3}  {}",
            r.predicted.value, r.max_fit.slope, s[0], s[1], s[2], r.pass
        );
    }
    Ok(())
}
