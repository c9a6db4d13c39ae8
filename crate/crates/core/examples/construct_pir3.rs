//! Build the shortest known systematic 3-PIR code for a few k, show the
//! recovery sets of each data bit, and check them with the exact verifier.
//!
//!     cargo run --example construct_pir3 -- 6

use pir_codes::constructions::{build_pir3, extend_for_even_t};
use pir_codes::recovery::{verify_batch, RecoveryDecoder};
use pir_codes::Budget;

fn main() -> pir_codes::Result<()> {
    let k: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(4);
    let code = build_pir3(k)?;
    println!("k = {k}, n = {}", code.n());
    for row in code.generator().rows() {
        println!("  {row}");
    }
    for family in &code.witnesses {
        let sets: Vec<_> = family.sets.iter().map(|s| s.positions().to_vec()).collect();
        println!("bit {}: {sets:?}", family.bit);
    }

    let report = code.verify(Budget::UNLIMITED)?;
    println!("3-PIR: {:?}", report.verdict);
    println!(
        "3-batch: {:?}",
        verify_batch(&code.encoder, 3, Budget::UNLIMITED)?.verdict
    );

    // read bit 1 back from a codeword through its second recovery set
    let data = (1usize << k) - 1;
    let word = code.encoder.encode_index(data);
    let set = &code.witnesses[0].sets[1];
    let decoder = RecoveryDecoder::new(&code.encoder, 1, set)?.expect("witness sets recover");
    println!(
        "codeword {word}, bit 1 via {:?} = {:?}",
        set.positions(),
        decoder.decode(&word)
    );

    let ext = extend_for_even_t(&code)?;
    println!(
        "extension: n = {}, 4-PIR: {:?}",
        ext.n(),
        ext.verify(Budget::UNLIMITED)?.verdict
    );
    Ok(())
}
