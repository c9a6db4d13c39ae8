//! PIR codes from pair packings: find a packing of 4-sets, turn it into a
//! 5-PIR code and extend that to a 6-PIR code.
//!
//!     cargo run --release --example packing_pir -- 15

use pir_codes::constructions::{build_packing_pir, extend_for_even_t};
use pir_codes::designs::{
    exact_packing, is_packing, packing_number_formula, packing_with_blocks, PackingSearch,
};
use pir_codes::Budget;

fn main() -> pir_codes::Result<()> {
    let k: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(9);

    println!("largest packings of 4-sets:");
    for r in 4..=16 {
        println!("  r = {r:>2}: {}", packing_number_formula(r)?);
    }

    let design = packing_with_blocks(k, 4, Budget::UNLIMITED)?;
    println!(
        "{} blocks on {} points, valid: {}",
        design.num_blocks(),
        design.v,
        is_packing(&design)?.is_valid()
    );
    print!("{}", design.to_text());

    let code = build_packing_pir(k, 5, &design)?;
    println!(
        "5-PIR code: k = {k}, n = {}, verified: {}",
        code.n(),
        code.verify(Budget::UNLIMITED)?.holds()
    );
    let ext = extend_for_even_t(&code)?;
    println!(
        "6-PIR code: n = {}, verified: {}",
        ext.n(),
        ext.verify(Budget::UNLIMITED)?.holds()
    );

    // one block more than the formula is impossible
    let r = design.v;
    if r <= 10 {
        let target = packing_number_formula(r)? + 1;
        let (out, nodes) = exact_packing(r, 4, target, Budget(10_000_000))?;
        println!(
            "{target} blocks on {r} points: {} ({nodes} nodes)",
            matches!(out, PackingSearch::ProvenImpossible)
        );
    }
    Ok(())
}
