//! Prints NMR for AEC and linear Shapley values on the two collinear
//! simulation specs over a handful of seeds.
//!
//! ```text
//! cargo run --release -p aec --example nmr_table -- 5
//! ```

use std::time::Instant;

use aec::simgen::{generate, SimSpec};
use aec::stability::nmr_comparison;

fn main() -> Result<(), aec::Error> {
    let seeds: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(5);
    println!("dataset,seed,aec,linear_shap,seconds");
    for seed in 0..seeds {
        for (label, spec) in [
            (
                "simulated-classification",
                SimSpec::collinear_classification(seed),
            ),
            ("simulated-regression", SimSpec::collinear_regression(seed)),
        ] {
            let start = Instant::now();
            let d = generate(&spec)?;
            let c = nmr_comparison(&d)?;
            println!(
                "{label},{seed},{:.3},{:.3},{:.1}",
                c.aec.nmr,
                c.linear_shap.nmr,
                start.elapsed().as_secs_f64()
            );
        }
    }
    Ok(())
}
