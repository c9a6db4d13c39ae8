//! The length-7 Hamming code admits no 3-PIR encoder, linear or not, while
//! the length-3 one does.
//!
//!     cargo run --release --example hamming_impossibility

use pir_codes::hamming::{build_hamming, check_claims, check_no_3pir_any_encoder, coset_triples};
use pir_codes::searchlab::{encoder_exists_3pir, DEFAULT_COMPONENT_CAP};
use pir_codes::Budget;

fn main() -> pir_codes::Result<()> {
    for r in [2, 3] {
        let check = check_no_3pir_any_encoder(r)?;
        println!(
            "r = {r}: {:?} after {} triples",
            check.verdict, check.triples
        );
        println!("  components per triple: {:?}", check.component_histogram);
        if let Some(c) = &check.counterexample {
            println!("  encoder from triple {:?}", c);
        }
    }

    let code = build_hamming(3)?.linear().to_code()?;
    let (out, stats) = encoder_exists_3pir(&code, DEFAULT_COMPONENT_CAP, Budget::UNLIMITED)?;
    println!(
        "direct search: {out:?} after {} triples, {} nodes",
        stats.triples, stats.nodes
    );

    // the linear obstruction: recovery triples come from cosets of a subspace
    for sets in coset_triples(4)?.into_iter().take(3) {
        let report = check_claims(4, &sets)?;
        println!("{:?}: all claims hold = {}", sets, report.all_hold());
    }
    Ok(())
}
