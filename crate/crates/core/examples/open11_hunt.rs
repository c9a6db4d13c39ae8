//! Look for a 3-PIR encoder on (11,128,3) codes drawn from the heuristic
//! search. A miss here proves nothing; only found encoders are conclusive.
//!
//!     cargo run --release --example open11_hunt -- 4

use pir_codes::searchlab::{open11_hunt, HuntConfig};
use pir_codes::Budget;

fn main() -> pir_codes::Result<()> {
    let codes: u64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(2);
    let config = HuntConfig {
        codes,
        per_code_budget: 50_000,
        ..HuntConfig::default()
    };
    let report = open11_hunt(&config, None, Budget::UNLIMITED, 7)?;
    println!(
        "{} code(s): {} encoder(s), {} without, {} undecided",
        report.examined,
        report.encoders.len(),
        report.no_encoder,
        report.unknown
    );
    for log in &report.logged {
        println!(
            "  {:?} at depth {}, first words {:?}",
            log.verdict,
            log.depth,
            &log.code[..4]
        );
    }
    Ok(())
}
