//! Largest binary codes of minimum distance 3 by clique search.
//!
//!     cargo run --release --example max_code_size -- 8

use pir_codes::bounds::{max_code_size, sphere_packing_bound};
use pir_codes::Budget;

fn main() -> pir_codes::Result<()> {
    let top: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(7);
    for n in 3..=top.max(3) {
        let e = max_code_size(n, Budget::UNLIMITED)?;
        println!(
            "n = {n:>2}: {:>4} ({:?}, sphere packing {}, {} nodes)",
            e.value,
            e.source,
            sphere_packing_bound(n),
            e.nodes
        );
        if let Some(code) = e.witness_code().filter(|_| n <= 6) {
            print!("{}", code.to_text());
        }
    }
    Ok(())
}
