//! Exhaustive and seeded heuristic code search with a resumable checkpoint.
//!
//!     cargo run --release --example search_codes

use pir_codes::hamming::build_hamming;
use pir_codes::searchlab::{canonical_form, search_codes, SearchMode, SearchParams};
use pir_codes::Budget;

fn main() -> pir_codes::Result<()> {
    let params = SearchParams {
        n: 7,
        size: 16,
        dmin: 3,
        mode: SearchMode::Exhaustive,
    };
    // small budget slices, resumed from disk until the search completes
    let dir = std::env::temp_dir().join(format!("pirc-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("search.ckpt");
    let mut slices = 0;
    let run = loop {
        slices += 1;
        let run = search_codes(params, Some(&path), Budget(2_000))?;
        if run.complete {
            break run;
        }
    };
    println!(
        "(7,16,3): {} class(es) after {slices} slices, {} nodes",
        run.codes.len(),
        run.nodes
    );
    let hamming = canonical_form(&build_hamming(3)?.linear().to_code()?)?;
    println!(
        "equal to the Hamming code: {}",
        run.codes.first() == Some(&hamming)
    );
    std::fs::remove_dir_all(&dir)?;

    let heuristic = SearchParams {
        n: 10,
        size: 64,
        dmin: 3,
        mode: SearchMode::Heuristic {
            seed: 1,
            iterations: 20,
        },
    };
    let run = search_codes(heuristic, None, Budget::UNLIMITED)?;
    println!("(10,64,3) heuristic: {} code(s) found", run.codes.len());
    if let Some(code) = run.codes.first() {
        println!("  minimum distance {}", code.min_distance()?);
    }
    Ok(())
}
