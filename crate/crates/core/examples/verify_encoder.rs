//! Verify an arbitrary (nonlinear) encoder given as an explicit table and
//! compare its distance with the PIR distance bound.
//!
//!     cargo run --example verify_encoder

use pir_codes::bounds::check_mindist_bound;
use pir_codes::gf2::parse_matrix;
use pir_codes::recovery::{minimal_recovery_sets, verify_pir, Encoder};
use pir_codes::Budget;

const TABLE: &str = "\
# data codeword
00 00000
01 00111
10 11001
11 11110
";

fn main() -> pir_codes::Result<()> {
    let e = Encoder::parse_explicit(TABLE)?;
    println!(
        "k = {}, n = {}, d = {}",
        e.k(),
        e.n(),
        e.code().min_distance()?
    );
    for j in 1..=e.k() {
        let sets = minimal_recovery_sets(&e, j, e.n(), Budget::UNLIMITED)?;
        let sets: Vec<_> = sets.sets.iter().map(|s| s.positions().to_vec()).collect();
        println!("bit {j} minimal recovery sets: {sets:?}");
    }
    for t in 1..=4 {
        let r = verify_pir(&e, t, None, 1, None, Budget::UNLIMITED)?;
        println!("{t}-PIR: {:?}", r.verdict);
    }
    let c = check_mindist_bound(&e, 3, 1, Budget::UNLIMITED)?;
    println!(
        "distance {} against bound {}: ok = {}, vacuous = {}",
        c.d, c.bound, c.ok, c.vacuous
    );

    // a repetition code with every position used twice
    let rep = Encoder::linear(parse_matrix("111")?)?;
    let r = verify_pir(&rep, 6, None, 2, None, Budget::UNLIMITED)?;
    println!("repetition code, t = 6, mu = 2: {:?}", r.verdict);
    println!("{}", r.to_json());
    Ok(())
}
