//! Optimal lengths of systematic 3-PIR codes with the reasoning behind each
//! lower bound.
//!
//!     cargo run --release --example optimality_table

use pir_codes::bounds::{optimality_report_3pir, OptimalityOptions};
use pir_codes::constructions::linear_length_table;

fn main() -> pir_codes::Result<()> {
    for (k, n) in linear_length_table(3, 8)? {
        println!("k = {k}: n = {n}");
    }
    let opts = OptimalityOptions {
        verify_uniqueness: true,
        ..OptimalityOptions::default()
    };
    for k in 1..=6 {
        let r = optimality_report_3pir(k, opts)?;
        println!(
            "\nk = {k}: {} <= n <= {} ({:?})",
            r.lower_bound, r.upper_bound, r.verdict
        );
        for step in &r.lower_chain {
            println!("  [{:?}] {}", step.source, step.claim);
        }
    }
    Ok(())
}
